#pragma once

// Lightweight lexical helpers over Verilog / SystemVerilog text. This is not a
// parser: it finds module regions, declared port names and module identifiers,
// which is all the harness needs to compose simulation units and compare
// interfaces. Offsets always refer to the original text.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace effbench::verilog {

/// Returns a copy of `src` of identical length in which comments and string
/// literals are blanked (newlines kept), so offsets stay valid.
std::string mask_comments(std::string_view src);

struct ModuleSpan {
  std::size_t begin = 0;  // offset of the `module` keyword
  std::size_t end = 0;    // one past `endmodule` (and its `: label`, if any)
  std::string name;
  std::size_t name_begin = 0;
  std::size_t name_end = 0;
  std::optional<std::pair<std::size_t, std::size_t>> end_label;  // [begin, end)
  std::vector<std::string> ports;  // declaration order
};

/// Every `module ... endmodule` region whose `module` keyword starts a line.
/// Unterminated modules are not reported.
std::vector<ModuleSpan> find_modules(std::string_view src);

struct ModuleDecl {
  std::string name;
  std::vector<std::string> ports;
};

/// Parses a bare module declaration (`module name #(...) (...);`), as stored in a
/// bundle's header file. No `endmodule` is required.
std::optional<ModuleDecl> parse_declaration(std::string_view header);

/// Port names of a port list body (text between the outer parentheses). Handles
/// ANSI declarations with directions, types and ranges as well as plain name lists.
std::vector<std::string> parse_port_list(std::string_view body);

/// True when both lists name the same set of ports.
bool same_port_set(std::vector<std::string> a, std::vector<std::string> b);

/// Index of the module whose port set equals `header_ports`; the last such module
/// wins. Falls back to the last module when none matches. nullopt if `mods` is empty.
std::optional<std::size_t> select_top(const std::vector<ModuleSpan>& mods,
                                      const std::vector<std::string>& header_ports);

/// Rewrites the declaration identifier of `mod` (and a matching `endmodule : label`)
/// to `new_name`. Port names and everything else are untouched.
std::string rename_module(std::string_view src, const ModuleSpan& mod, std::string_view new_name);

/// Renames the module chosen by select_top(). nullopt when `src` holds no module.
std::optional<std::string> rename_top(std::string_view src,
                                      const std::vector<std::string>& header_ports,
                                      std::string_view new_name);

/// Structural sanity check used by the mock tools: balanced brackets and keyword
/// pairs (begin/end, case/endcase, module/endmodule, ...). On failure `diag`
/// describes the first problem.
bool structurally_balanced(std::string_view src, std::string* diag = nullptr);

/// Text of `mod` (keyword through `endmodule`), optionally with the module renamed.
std::string module_text(std::string_view src, const ModuleSpan& mod,
                        std::optional<std::string_view> new_name = std::nullopt);

/// Whitespace- and comment-insensitive form of the module bodies in `src` with
/// the top module renamed to `top`. Text outside modules is ignored.
/// Two sources that differ only in formatting, comments or the top module's name
/// have the same canonical form.
std::string canonical_form(std::string_view src, const std::vector<std::string>& header_ports);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// fnv1a64 of canonical_form(), rendered as 16 lowercase hex digits.
std::string design_fingerprint(std::string_view src, const std::vector<std::string>& header_ports);

/// True when `text` instantiates module `module_name` (`module_name [#(...)] inst (`).
bool instantiates(std::string_view text, std::string_view module_name);

}  // namespace effbench::verilog
