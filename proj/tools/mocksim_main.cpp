// Stand-in for a compile-then-run Verilog simulator, used when no real
// simulator is installed. `compile` performs the structural checks a real
// front end would trip over and records `// mocksim: ...` directives found in
// the sources; `run` prints a testbench-style transcript driven by them.
//
// Directives (in any source, usually the candidate):
//   // mocksim: mismatches=N   report N mismatches
//   // mocksim: timeout        print the testbench watchdog message
//   // mocksim: hang           never finish (exercises the wall timeout)
//   // mocksim: crash          exit without any verdict marker

#include <chrono>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "effbench/error.hpp"
#include "effbench/process.hpp"
#include "effbench/verilog.hpp"

namespace {

namespace vl = effbench::verilog;

constexpr std::string_view kMagic = "mocksim-image-v1";

std::vector<std::string> directives_in(const std::string& text) {
  std::vector<std::string> out;
  std::size_t from = 0;
  while (true) {
    const auto p = text.find("mocksim:", from);
    if (p == std::string::npos) break;
    auto e = text.find('\n', p);
    if (e == std::string::npos) e = text.size();
    std::string d = text.substr(p + 8, e - p - 8);
    const auto b = d.find_first_not_of(" \t");
    const auto l = d.find_last_not_of(" \t\r");
    if (b != std::string::npos) out.push_back(d.substr(b, l - b + 1));
    from = e;
  }
  return out;
}

int do_compile(const std::string& out, const std::vector<std::string>& sources) {
  std::vector<vl::ModuleSpan> mods;
  std::string all;
  std::vector<std::string> directives;
  for (const auto& s : sources) {
    std::string text;
    try {
      text = effbench::read_text_file(s);
    } catch (const effbench::Error& e) {
      std::cerr << s << ": cannot open source file\n";
      return 1;
    }
    std::string diag;
    if (!vl::structurally_balanced(text, &diag)) {
      std::cerr << s << ": syntax error: " << diag << "\n";
      return 1;
    }
    for (auto& m : vl::find_modules(text)) mods.push_back(std::move(m));
    for (auto& d : directives_in(text)) directives.push_back(std::move(d));
    all += text;
    all += '\n';
  }

  const vl::ModuleSpan* opt = nullptr;
  const vl::ModuleSpan* unopt = nullptr;
  for (const auto& m : mods) {
    if (m.name == "opt_model") opt = &m;
    if (m.name == "unopt_model") unopt = &m;
  }
  if (!opt || !unopt) {
    std::cerr << "error: unknown module type: " << (opt ? "unopt_model" : "opt_model") << "\n";
    return 1;
  }
  if (!vl::same_port_set(opt->ports, unopt->ports)) {
    std::cerr << "error: port mismatch between opt_model and unopt_model\n";
    return 1;
  }
  if (!vl::instantiates(all, "opt_model") || !vl::instantiates(all, "unopt_model")) {
    std::cerr << "error: no testbench instantiates both models\n";
    return 1;
  }

  std::string image(kMagic);
  image += '\n';
  for (const auto& d : directives) image += d + "\n";
  effbench::write_text_file(out, image);
  return 0;
}

int do_run(const std::string& image_path) {
  std::string image;
  try {
    image = effbench::read_text_file(image_path);
  } catch (const effbench::Error&) {
    std::cerr << image_path << ": cannot open image\n";
    return 1;
  }
  if (image.rfind(kMagic, 0) != 0) {
    std::cerr << image_path << ": not a mocksim image\n";
    return 1;
  }

  unsigned long long mismatches = 0;
  std::size_t pos = image.find('\n');
  while (pos != std::string::npos && pos + 1 < image.size()) {
    auto e = image.find('\n', pos + 1);
    const auto line = image.substr(pos + 1, (e == std::string::npos ? image.size() : e) - pos - 1);
    pos = e;
    if (line == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return 0;
    }
    if (line == "crash") {
      std::cerr << "mocksim: segmentation fault in simulation kernel\n";
      return 139;
    }
    if (line == "timeout") {
      std::cout << "Time=0 Clock=1\nTIMEOUT\n";
      return 0;
    }
    if (line.rfind("mismatches=", 0) == 0) mismatches = std::stoull(line.substr(11));
  }

  for (int clk = 1; clk <= 4; ++clk) {
    std::cout << "Time=" << clk * 10 << " Clock=" << clk << " match=" << (mismatches ? 0 : 1)
              << "\n";
  }
  std::cout << "Simulation completed.\n";
  std::cout << "Total mismatches:          " << mismatches << "\n";
  std::cout << "Simulation finished at 40 ps\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"effbench-mocksim: deterministic simulator stand-in"};
  app.require_subcommand(1);

  std::string out;
  std::vector<std::string> sources;
  auto* compile = app.add_subcommand("compile", "check sources and write a run image");
  compile->add_option("-o", out, "output image")->required();
  compile->add_option("sources", sources, "Verilog sources")->required();

  std::string image;
  auto* run = app.add_subcommand("run", "run a compiled image");
  run->add_option("image", image, "image written by compile")->required();

  CLI11_PARSE(app, argc, argv);
  if (*compile) return do_compile(out, sources);
  return do_run(image);
}
