#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace effbench {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  /// Exit code 127 from the shell: the command itself could not be found.
  bool command_not_found = false;
  std::string output;  // stdout followed by stderr
  std::chrono::duration<double> elapsed{};
};

/// Runs `command` through /bin/sh in `workdir`, capturing stdout and stderr.
/// On timeout the whole process group is killed.
ProcessResult run_shell(const std::string& command, const std::filesystem::path& workdir,
                        std::chrono::duration<double> timeout);

/// Substitutes `{name}` placeholders present in `vars`; other brace groups
/// (Tcl lists, Verilog concatenations) are left untouched.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// Quotes `s` for /bin/sh when it contains anything but [A-Za-z0-9_./+-].
std::string shell_quote(std::string_view s);

/// Fresh uniquely named directory below `parent` (system temp dir when empty).
std::filesystem::path make_scratch_dir(const std::filesystem::path& parent, std::string_view prefix);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, std::string_view content);

/// Expands `${VAR}` from the environment; unset variables expand to "".
std::string expand_env(std::string_view s);

}  // namespace effbench
