#include "test_util.hpp"

#include <chrono>

#include "effbench/process.hpp"

namespace effbench::testutil {

namespace fs = std::filesystem;

fs::path data_dir() { return EFFBENCH_DATA_DIR; }
fs::path suite_manifest() { return data_dir() / "suites" / "samples.yaml"; }
fs::path toolchains_file() { return data_dir() / "toolchains" / "toolchains.yaml"; }
fs::path mocksim_path() { return EFFBENCH_MOCKSIM; }
fs::path cli_path() { return EFFBENCH_CLI; }

ProblemBundle sample_bundle(const std::string& id) {
  return load_bundle(data_dir() / "problems" / id);
}

bool tool_available(const std::string& tool) {
  const auto r = run_shell("command -v " + shell_quote(tool), fs::temp_directory_path(),
                           std::chrono::seconds(10));
  return r.exit_code == 0;
}

TempDir::TempDir(const std::string& prefix) : path_(make_scratch_dir({}, prefix)) {}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

RunConfig mock_run_config(ClientKind client, int n, std::vector<int> ks) {
  RunConfig c;
  c.suite = suite_manifest();
  c.toolchains = toolchains_file();
  c.client = client;
  c.gen.model_name = "scripted";
  c.gen.n = n;
  c.gen.auth_env = "";
  c.ks = std::move(ks);
  c.backend = "mock";
  c.strategy = "balanced";
  c.simulator = "mock";
  c.mocksim = mocksim_path();
  return c;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

}  // namespace effbench::testutil
