#include "effbench/verilog.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>

namespace effbench::verilog {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

std::size_t scan_ident(std::string_view s, std::size_t i) {
  if (i >= s.size() || !is_ident_start(s[i])) return i;
  while (i < s.size() && is_ident_char(s[i])) ++i;
  return i;
}

/// `s[open]` must be an opening bracket. Returns the offset one past its match,
/// or npos when unbalanced.
std::size_t skip_balanced(std::string_view s, std::size_t open) {
  const char o = s[open];
  const char c = o == '(' ? ')' : o == '[' ? ']' : '}';
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == o) {
      ++depth;
    } else if (s[i] == c) {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

/// Offset of `word` as a whole identifier at or after `from`, or npos.
std::size_t find_word(std::string_view s, std::string_view word, std::size_t from) {
  while (true) {
    const auto p = s.find(word, from);
    if (p == std::string_view::npos) return p;
    const bool left_ok = p == 0 || !is_ident_char(s[p - 1]);
    const bool right_ok = p + word.size() >= s.size() || !is_ident_char(s[p + word.size()]);
    if (left_ok && right_ok) return p;
    from = p + 1;
  }
}

bool starts_line(std::string_view s, std::size_t p) {
  while (p > 0) {
    const char c = s[p - 1];
    if (c == '\n') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
    --p;
  }
  return true;
}

struct DeclParse {
  std::string name;
  std::size_t name_begin = 0;
  std::size_t name_end = 0;
  std::vector<std::string> ports;
  std::size_t after = 0;
};

/// `kw` is the offset of a `module` keyword in masked text.
std::optional<DeclParse> parse_decl_at(std::string_view masked, std::size_t kw) {
  DeclParse d;
  std::size_t i = skip_space(masked, kw + 6);
  for (std::string_view lifetime : {"automatic", "static"}) {
    if (masked.substr(i, lifetime.size()) == lifetime &&
        (i + lifetime.size() >= masked.size() || !is_ident_char(masked[i + lifetime.size()]))) {
      i = skip_space(masked, i + lifetime.size());
    }
  }
  const auto name_end = scan_ident(masked, i);
  if (name_end == i) return std::nullopt;
  d.name = std::string(masked.substr(i, name_end - i));
  d.name_begin = i;
  d.name_end = name_end;
  i = skip_space(masked, name_end);
  if (i < masked.size() && masked[i] == '#') {
    i = skip_space(masked, i + 1);
    if (i < masked.size() && masked[i] == '(') {
      const auto j = skip_balanced(masked, i);
      if (j == std::string_view::npos) return std::nullopt;
      i = skip_space(masked, j);
    }
  }
  if (i < masked.size() && masked[i] == '(') {
    const auto j = skip_balanced(masked, i);
    if (j == std::string_view::npos) return std::nullopt;
    d.ports = parse_port_list(masked.substr(i + 1, j - i - 2));
    i = j;
  }
  d.after = i;
  return d;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  const auto word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '`' || c == '\\';
  };
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      // A separator survives only where dropping it would join two tokens.
      if (pending && word(out.back()) && word(c)) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string mask_comments(std::string_view src) {
  std::string out(src);
  enum class State { Code, Line, Block, String } st = State::Code;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const char c = src[i];
    const char next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (st) {
      case State::Code:
        if (c == '/' && next == '/') {
          st = State::Line;
          out[i] = out[i + 1] = ' ';
          ++i;
        } else if (c == '/' && next == '*') {
          st = State::Block;
          out[i] = out[i + 1] = ' ';
          ++i;
        } else if (c == '"') {
          st = State::String;
          out[i] = ' ';
        }
        break;
      case State::Line:
        if (c == '\n') {
          st = State::Code;
        } else {
          out[i] = ' ';
        }
        break;
      case State::Block:
        if (c == '*' && next == '/') {
          out[i] = out[i + 1] = ' ';
          ++i;
          st = State::Code;
        } else if (c != '\n') {
          out[i] = ' ';
        }
        break;
      case State::String:
        if (c == '\\' && next != '\0') {
          out[i] = ' ';
          if (next != '\n') out[i + 1] = ' ';
          ++i;
        } else if (c == '"' || c == '\n') {
          if (c == '"') out[i] = ' ';
          st = State::Code;
        } else {
          out[i] = ' ';
        }
        break;
    }
  }
  return out;
}

std::vector<std::string> parse_port_list(std::string_view body) {
  std::vector<std::string> items;
  {
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
      const char c = body[i];
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') --depth;
      if (c == ',' && depth == 0) {
        items.emplace_back(body.substr(start, i - start));
        start = i + 1;
      }
    }
    items.emplace_back(body.substr(start));
  }

  std::vector<std::string> ports;
  for (auto& item : items) {
    // Drop attributes, ranges and default values; what remains ends with the name.
    std::string cleaned;
    for (std::size_t i = 0; i < item.size(); ++i) {
      if (item[i] == '(' && i + 1 < item.size() && item[i + 1] == '*') {
        const auto close = item.find("*)", i + 2);
        if (close == std::string::npos) break;
        i = close + 1;
        continue;
      }
      if (item[i] == '[' || item[i] == '(' || item[i] == '{') {
        const auto j = skip_balanced(item, i);
        if (j == std::string_view::npos) break;
        cleaned.push_back(' ');
        i = j - 1;
        continue;
      }
      if (item[i] == '=') break;
      cleaned.push_back(item[i]);
    }
    std::string last;
    for (std::size_t i = 0; i < cleaned.size();) {
      if (is_ident_start(cleaned[i]) && (i == 0 || !is_ident_char(cleaned[i - 1]))) {
        const auto j = scan_ident(cleaned, i);
        last = cleaned.substr(i, j - i);
        i = j;
      } else {
        ++i;
      }
    }
    if (!last.empty()) ports.push_back(last);
  }
  return ports;
}

std::vector<ModuleSpan> find_modules(std::string_view src) {
  const std::string masked = mask_comments(src);
  const std::string_view m(masked);
  std::vector<ModuleSpan> mods;
  std::size_t from = 0;
  while (true) {
    const auto kw = find_word(m, "module", from);
    if (kw == std::string_view::npos) break;
    if (!starts_line(m, kw)) {
      from = kw + 6;
      continue;
    }
    const auto decl = parse_decl_at(m, kw);
    if (!decl) {
      from = kw + 6;
      continue;
    }
    const auto endkw = find_word(m, "endmodule", decl->after);
    if (endkw == std::string_view::npos) break;

    ModuleSpan span;
    span.begin = kw;
    span.name = decl->name;
    span.name_begin = decl->name_begin;
    span.name_end = decl->name_end;
    span.ports = decl->ports;
    span.end = endkw + 9;
    auto i = skip_space(m, span.end);
    if (i < m.size() && m[i] == ':') {
      const auto lb = skip_space(m, i + 1);
      const auto le = scan_ident(m, lb);
      if (le > lb) {
        span.end_label = std::make_pair(lb, le);
        span.end = le;
      }
    }
    from = span.end;
    mods.push_back(std::move(span));
  }
  return mods;
}

std::optional<ModuleDecl> parse_declaration(std::string_view header) {
  const std::string masked = mask_comments(header);
  const auto kw = find_word(masked, "module", 0);
  if (kw == std::string_view::npos) return std::nullopt;
  auto d = parse_decl_at(masked, kw);
  if (!d) return std::nullopt;
  return ModuleDecl{d->name, d->ports};
}

bool same_port_set(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::optional<std::size_t> select_top(const std::vector<ModuleSpan>& mods,
                                      const std::vector<std::string>& header_ports) {
  if (mods.empty()) return std::nullopt;
  for (std::size_t i = mods.size(); i-- > 0;) {
    if (same_port_set(mods[i].ports, header_ports)) return i;
  }
  return mods.size() - 1;
}

std::string rename_module(std::string_view src, const ModuleSpan& mod, std::string_view new_name) {
  std::string out(src);
  if (mod.end_label) {
    const auto [lb, le] = *mod.end_label;
    if (out.compare(lb, le - lb, mod.name) == 0) out.replace(lb, le - lb, new_name);
  }
  out.replace(mod.name_begin, mod.name_end - mod.name_begin, new_name);
  return out;
}

std::optional<std::string> rename_top(std::string_view src,
                                      const std::vector<std::string>& header_ports,
                                      std::string_view new_name) {
  const auto mods = find_modules(src);
  const auto top = select_top(mods, header_ports);
  if (!top) return std::nullopt;
  return rename_module(src, mods[*top], new_name);
}

bool structurally_balanced(std::string_view src, std::string* diag) {
  const std::string masked = mask_comments(src);
  const std::string_view m(masked);

  struct Open {
    std::string token;
    std::size_t line;
  };
  std::vector<Open> stack;
  std::size_t line = 1;

  auto fail = [&](const std::string& why) {
    if (diag) *diag = "line " + std::to_string(line) + ": " + why;
    return false;
  };

  static constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kPairs{{
      {"begin", "end"},
      {"case", "endcase"},
      {"casez", "endcase"},
      {"casex", "endcase"},
      {"randcase", "endcase"},
      {"module", "endmodule"},
      {"function", "endfunction"},
      {"task", "endtask"},
      {"generate", "endgenerate"},
  }};

  for (std::size_t i = 0; i < m.size();) {
    const char c = m[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back({std::string(1, c), line});
      ++i;
      continue;
    }
    if (c == ')' || c == ']' || c == '}') {
      const char want = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (stack.empty() || stack.back().token != std::string(1, want)) {
        return fail(std::string("unexpected '") + c + "'");
      }
      stack.pop_back();
      ++i;
      continue;
    }
    if (c == '\\') {  // escaped identifier runs to whitespace
      while (i < m.size() && !is_space(m[i])) ++i;
      continue;
    }
    if (is_ident_start(c) && (i == 0 || !is_ident_char(m[i - 1]))) {
      const auto j = scan_ident(m, i);
      const auto tok = m.substr(i, j - i);
      i = j;
      bool handled = false;
      for (const auto& [open, close] : kPairs) {
        if (tok == open) {
          stack.push_back({std::string(open), line});
          handled = true;
          break;
        }
      }
      if (handled) continue;
      for (const auto& [open, close] : kPairs) {
        if (tok == close) {
          if (stack.empty()) return fail("unexpected '" + std::string(tok) + "'");
          const auto& top = stack.back().token;
          bool match = false;
          for (const auto& [o2, c2] : kPairs) {
            if (o2 == top && c2 == tok) match = true;
          }
          if (!match) {
            return fail("'" + std::string(tok) + "' closes '" + top + "' opened on line " +
                        std::to_string(stack.back().line));
          }
          stack.pop_back();
          break;
        }
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      // Skip number literals like 4'b0000 so their base letters are not tokens.
      while (i < m.size() && (is_ident_char(m[i]) || m[i] == '\'')) ++i;
      continue;
    }
    if (c == '\'') {
      ++i;
      while (i < m.size() && is_ident_char(m[i])) ++i;
      continue;
    }
    ++i;
  }
  if (!stack.empty()) {
    line = stack.back().line;
    return fail("'" + stack.back().token + "' is never closed");
  }
  return true;
}

std::string module_text(std::string_view src, const ModuleSpan& mod,
                        std::optional<std::string_view> new_name) {
  std::string piece(src.substr(mod.begin, mod.end - mod.begin));
  if (!new_name) return piece;
  auto shifted = mod;
  shifted.name_begin -= mod.begin;
  shifted.name_end -= mod.begin;
  if (shifted.end_label) {
    shifted.end_label->first -= mod.begin;
    shifted.end_label->second -= mod.begin;
  }
  return rename_module(piece, shifted, *new_name);
}

std::string canonical_form(std::string_view src, const std::vector<std::string>& header_ports) {
  std::string masked = mask_comments(src);
  const auto mods = find_modules(src);
  const auto top = select_top(mods, header_ports);
  if (!top) return collapse_whitespace(masked);
  // Only module bodies count: preambles such as `timescale do not change the design.
  std::string joined;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    joined += i == *top ? module_text(masked, mods[i], "top") : module_text(masked, mods[i]);
    joined += '\n';
  }
  return collapse_whitespace(joined);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string design_fingerprint(std::string_view src, const std::vector<std::string>& header_ports) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_form(src, header_ports))));
  return buf;
}

bool instantiates(std::string_view text, std::string_view module_name) {
  const std::string masked = mask_comments(text);
  const std::string_view m(masked);
  std::size_t from = 0;
  while (true) {
    const auto p = find_word(m, module_name, from);
    if (p == std::string_view::npos) return false;
    from = p + module_name.size();
    auto i = skip_space(m, from);
    if (i < m.size() && m[i] == '#') {
      i = skip_space(m, i + 1);
      if (i >= m.size() || m[i] != '(') continue;
      const auto j = skip_balanced(m, i);
      if (j == std::string_view::npos) continue;
      i = skip_space(m, j);
    }
    const auto e = scan_ident(m, i);
    if (e == i) continue;
    i = skip_space(m, e);
    if (i < m.size() && m[i] == '(') return true;
  }
}

}  // namespace effbench::verilog
