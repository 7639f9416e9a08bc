#include <gtest/gtest.h>

#include "effbench/verilog.hpp"

using namespace effbench::verilog;

namespace {

const char* kTwo = R"(// helper first
module half_adder(input a, input b, output s, output c);
  assign s = a ^ b; // "endmodule" in a comment
  assign c = a & b;
endmodule

module adder (
  input  [3:0] x,
  input  [3:0] y,
  output [4:0] sum
);
  assign sum = x + y;
endmodule : adder
)";

}  // namespace

TEST(Verilog, MaskKeepsOffsets) {
  const std::string src = "a // b\n/* c\nd */ \"e\" f";
  const auto m = mask_comments(src);
  ASSERT_EQ(m.size(), src.size());
  EXPECT_EQ(m.find('b'), std::string::npos);
  EXPECT_EQ(m.find('e'), std::string::npos);
  EXPECT_NE(m.find('f'), std::string::npos);
  EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 2);
}

TEST(Verilog, FindsModulesAndPorts) {
  const auto mods = find_modules(kTwo);
  ASSERT_EQ(mods.size(), 2u);
  EXPECT_EQ(mods[0].name, "half_adder");
  EXPECT_EQ(mods[0].ports, (std::vector<std::string>{"a", "b", "s", "c"}));
  EXPECT_EQ(mods[1].name, "adder");
  EXPECT_EQ(mods[1].ports, (std::vector<std::string>{"x", "y", "sum"}));
  ASSERT_TRUE(mods[1].end_label.has_value());
}

TEST(Verilog, UnterminatedModuleIgnored) {
  EXPECT_TRUE(find_modules("module m(input a);\n assign b = a;\n").empty());
}

TEST(Verilog, ParsesDeclarationWithParameters) {
  const auto d = parse_declaration(
      "module trailing_zeros #(parameter\n  DATA_WIDTH = 32\n) (\n  input [DATA_WIDTH-1:0] din,\n"
      "  output logic [$clog2(DATA_WIDTH):0] dout\n);\n");
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->name, "trailing_zeros");
  EXPECT_EQ(d->ports, (std::vector<std::string>{"din", "dout"}));
}

TEST(Verilog, PortListForms) {
  EXPECT_EQ(parse_port_list("a, b, c"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(parse_port_list("input wire [7:0] a, b, output reg signed [3:0] q"),
            (std::vector<std::string>{"a", "b", "q"}));
  EXPECT_TRUE(same_port_set({"a", "b"}, {"b", "a"}));
  EXPECT_FALSE(same_port_set({"a", "b"}, {"a"}));
}

TEST(Verilog, SelectTopByPortsLastWins) {
  const auto mods = find_modules(kTwo);
  EXPECT_EQ(select_top(mods, {"sum", "x", "y"}), 1u);
  EXPECT_EQ(select_top(mods, {"a", "b", "c", "s"}), 0u);
  EXPECT_EQ(select_top(mods, {"nope"}), 1u);  // fallback: last module
  EXPECT_FALSE(select_top({}, {"a"}).has_value());
}

TEST(Verilog, RenameTouchesOnlyDeclarationAndLabel) {
  const auto renamed = rename_top(kTwo, {"x", "y", "sum"}, "opt_model");
  ASSERT_TRUE(renamed.has_value());
  EXPECT_NE(renamed->find("module opt_model ("), std::string::npos);
  EXPECT_NE(renamed->find("endmodule : opt_model"), std::string::npos);
  EXPECT_NE(renamed->find("module half_adder"), std::string::npos);
  EXPECT_NE(renamed->find("assign sum = x + y;"), std::string::npos);
  EXPECT_FALSE(rename_top("no modules here", {}, "x").has_value());
}

TEST(Verilog, RenameKeepsParameterList) {
  const std::string src = "module trailing_zeros #(parameter DATA_WIDTH = 32) (input [31:0] din, output [5:0] dout);\nendmodule\n";
  const auto r = rename_top(src, {"din", "dout"}, "opt_model");
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->rfind("module opt_model #(parameter DATA_WIDTH = 32)", 0), 0u);
}

TEST(Verilog, StructuralBalance) {
  EXPECT_TRUE(structurally_balanced(kTwo));
  std::string diag;
  EXPECT_FALSE(structurally_balanced("module m(input a);\n always @* begin\n x = (a;\n end\nendmodule\n", &diag));
  EXPECT_FALSE(diag.empty());
  EXPECT_FALSE(structurally_balanced("module m(input a);\n always @* begin\n x = a;\nendmodule\n"));
  EXPECT_TRUE(structurally_balanced("module m(input a);\n always @* case (a) 1'b0: x = 0; default: x = 1; endcase\nendmodule\n"));
}

TEST(Verilog, CanonicalFormIgnoresFormattingCommentsAndTopName) {
  const std::string a = "module foo(input a, output b);\n  assign b = ~a; // invert\nendmodule\n";
  const std::string b = "`timescale 1ns/1ps\n// preamble\nmodule   bar (input a,\n output b);\nassign b = ~a;\n\n\nendmodule";
  const std::string c = "module foo(input a, output b);\n  assign b = a;\nendmodule\n";
  EXPECT_EQ(canonical_form(a, {"a", "b"}), canonical_form(b, {"a", "b"}));
  EXPECT_NE(canonical_form(a, {"a", "b"}), canonical_form(c, {"a", "b"}));
  EXPECT_EQ(design_fingerprint(a, {"a", "b"}), design_fingerprint(b, {"a", "b"}));
  EXPECT_EQ(design_fingerprint(a, {"a", "b"}).size(), 16u);
}

TEST(Verilog, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Verilog, Instantiation) {
  const std::string tb = "opt_model #(.W(4)) dut (.a(a));\nunopt_model ref_i(.a(a));\n// opt_model fake(\n";
  EXPECT_TRUE(instantiates(tb, "opt_model"));
  EXPECT_TRUE(instantiates(tb, "unopt_model"));
  EXPECT_FALSE(instantiates(tb, "other_model"));
  EXPECT_FALSE(instantiates("// unopt_model u(\n", "unopt_model"));
}

TEST(Verilog, ModuleText) {
  const auto mods = find_modules(kTwo);
  const auto t = module_text(kTwo, mods[1], std::string_view("renamed"));
  EXPECT_EQ(t.rfind("module renamed", 0), 0u);
  EXPECT_NE(t.find("endmodule : renamed"), std::string::npos);
}
