#include "effbench/process.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <boost/process.hpp>

#include "effbench/error.hpp"

namespace effbench {

namespace bp = boost::process;
namespace fs = std::filesystem;

ProcessResult run_shell(const std::string& command, const fs::path& workdir,
                        std::chrono::duration<double> timeout) {
  ProcessResult r;
  const auto out_path = workdir / ".effbench_stdout";
  const auto err_path = workdir / ".effbench_stderr";
  const auto t0 = std::chrono::steady_clock::now();
  {
    bp::group group;
    std::error_code ec;
    bp::child child(std::string("/bin/sh"), std::vector<std::string>{"-c", command},
                    bp::std_out > out_path.string(), bp::std_err > err_path.string(),
                    bp::std_in < bp::null, bp::start_dir(workdir.string()), group, ec);
    if (ec) {
      throw Error(ErrorKind::Io, "cannot spawn /bin/sh: " + ec.message());
    }
    const auto budget = std::chrono::duration_cast<std::chrono::milliseconds>(timeout);
    if (!child.wait_for(budget)) {
      r.timed_out = true;
      group.terminate(ec);
      child.wait(ec);
    } else {
      r.exit_code = child.exit_code();
    }
  }
  r.elapsed = std::chrono::steady_clock::now() - t0;
  r.command_not_found = !r.timed_out && r.exit_code == 127;
  std::error_code ec;
  if (fs::exists(out_path, ec)) r.output = read_text_file(out_path);
  if (fs::exists(err_path, ec)) r.output += read_text_file(err_path);
  fs::remove(out_path, ec);
  fs::remove(err_path, ec);
  return r;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = vars.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
  }
  return out;
}

std::string shell_quote(std::string_view s) {
  bool plain = !s.empty();
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '/' ||
          c == '+' || c == '-')) {
      plain = false;
    }
  }
  if (plain) return std::string(s);
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out += "'";
  return out;
}

fs::path make_scratch_dir(const fs::path& parent, std::string_view prefix) {
  const fs::path base = parent.empty() ? fs::temp_directory_path() : parent;
  fs::create_directories(base);
  thread_local std::mt19937_64 rng{std::random_device{}()};
  for (int attempt = 0; attempt < 64; ++attempt) {
    char suffix[17];
    std::snprintf(suffix, sizeof suffix, "%016llx", static_cast<unsigned long long>(rng()));
    const auto dir = base / (std::string(prefix) + "-" + suffix);
    std::error_code ec;
    if (fs::create_directory(dir, ec)) return dir;
  }
  throw Error(ErrorKind::Io, "cannot create scratch directory under " + base.string());
}

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string(), p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& p, std::string_view content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string(), p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + p.string(), p.string());
}

std::string expand_env(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') {
      const auto close = s.find('}', i + 2);
      if (close != std::string_view::npos) {
        const std::string name(s.substr(i + 2, close - i - 2));
        if (const char* v = std::getenv(name.c_str())) out += v;
        i = close;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

}  // namespace effbench
