#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qfound/experiments.hpp"
#include "qfound/qasm.hpp"
#include "qfound/rng.hpp"
#include "random_circuit.hpp"

namespace qfound {
namespace {

using qasm::ParseError;
using qasm::SemanticError;

constexpr const char* kHeader = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(QasmParse, BellProgram) {
  const Circuit c = qasm::parse("OPENQASM 2.0; qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q -> c;");
  Circuit expected(2, 2);
  expected.h(0).cx(0, 1).measure(0, 0).measure(1, 1);
  EXPECT_EQ(c, expected);
}

TEST(QasmParse, HardyAngleExpression) {
  const Circuit c = qasm::parse(std::string(kHeader) + "qreg q[1];\nry(0.575*pi) q[0];\n");
  ASSERT_EQ(c.size(), 1u);
  const auto& g = *c.instructions()[0].gate;
  EXPECT_EQ(g.kind(), GateKind::kRy);
  EXPECT_NEAR(g.params()[0], 0.575 * std::numbers::pi, 1e-15);
}

TEST(QasmParse, AngleExpressions) {
  const Circuit c = qasm::parse(std::string(kHeader) +
                                "qreg q[1];\nu3(-pi/2, 2*(pi/4), -(-1.5e-1)) q[0];\nu1(3.) q[0];\nu2(.5,pi) q[0];\n");
  ASSERT_EQ(c.size(), 3u);
  const auto& p = c.instructions()[0].gate->params();
  EXPECT_DOUBLE_EQ(p[0], -std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(p[1], std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(p[2], 0.15);
  EXPECT_DOUBLE_EQ(c.instructions()[1].gate->params()[0], 3.0);
  EXPECT_DOUBLE_EQ(c.instructions()[2].gate->params()[0], 0.5);
}

TEST(QasmParse, IndexOutOfRangeIsSemantic) {
  const std::string src = std::string(kHeader) + "qreg q[2];\nh q[5];\n";
  try {
    qasm::parse(src);
    FAIL() << "accepted out-of-range index";
  } catch (const SemanticError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 5);
    EXPECT_NE(e.message().find("index out of range"), std::string::npos);
  }
}

TEST(QasmParse, UnsupportedGateIsSemantic) {
  EXPECT_THROW(qasm::parse(std::string(kHeader) + "qreg q[1];\nt q[0];\n"), SemanticError);
  EXPECT_THROW(qasm::parse(std::string(kHeader) + "qreg q[1];\nh r[0];\n"), SemanticError);
}

TEST(QasmParse, SyntaxErrorCarriesPosition) {
  try {
    qasm::parse(std::string(kHeader) + "qreg q[2]\nh q[0];\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 1);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(QasmParse, RegisterBroadcast) {
  const Circuit c = qasm::parse(std::string(kHeader) + "qreg a[2];\nqreg b[2];\nh a;\ncx a,b;\n");
  Circuit expected(4);
  expected.h(0).h(1).cx(0, 2).cx(1, 3);
  EXPECT_EQ(c, expected);
}

TEST(QasmParse, CrlfAccepted) {
  const Circuit lf = qasm::parse(std::string(kHeader) + "qreg q[2];\nh q[0];\ncx q[0],q[1];\n");
  const Circuit crlf =
      qasm::parse("OPENQASM 2.0;\r\ninclude \"qelib1.inc\";\r\nqreg q[2];\r\nh q[0];\r\ncx q[0],q[1];\r\n");
  EXPECT_EQ(lf, crlf);
}

TEST(QasmParse, CommentsIgnored) {
  const Circuit c = qasm::parse("// leading\nOPENQASM 2.0; // trailing\nqreg q[1];\n// x q[0];\nx q[0];\n");
  EXPECT_EQ(c.size(), 1u);
}

TEST(QasmParse, Deterministic) {
  const std::string src = qasm::emit(build_hardy(0.3, 1.9));
  EXPECT_EQ(qasm::parse(src), qasm::parse(src));
}

TEST(QasmEmit, EraserProgram) {
  const std::string text = qasm::emit(build_eraser(false));
  const auto lines = lines_of(text);
  // Header, include, two registers, three gates, one register-wide measure.
  ASSERT_EQ(lines.size(), 8u) << text;
  EXPECT_EQ(lines[0], "OPENQASM 2.0;");
  EXPECT_EQ(lines[1], "include \"qelib1.inc\";");
  EXPECT_EQ(lines[2], "qreg q[2];");
  EXPECT_EQ(lines[3], "creg c[2];");
  EXPECT_EQ(lines[4], "h q[0];");
  EXPECT_EQ(lines[5], "cx q[0],q[1];");
  EXPECT_EQ(lines[6], "h q[0];");
  EXPECT_EQ(lines[7], "measure q -> c;");
  EXPECT_EQ(qasm::parse(text), build_eraser(false));
}

TEST(QasmEmit, EmptyCircuit) {
  EXPECT_EQ(qasm::emit(Circuit(1)), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n");
}

TEST(QasmEmit, LowercaseAndLf) {
  const std::string text = qasm::emit(build_hardy(0.5, 0.5));
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(std::count_if(text.begin(), text.end(), [](char ch) { return ch >= 'A' && ch <= 'Z'; }),
            static_cast<long>(std::string("OPENQASM").size()));
}

TEST(QasmEmit, AnglesBitExact) {
  Circuit c(1);
  c.ry(0.1, 0).gate(gates::u3(std::nextafter(1.0, 2.0), -1e-300, 5e-324), {0});
  EXPECT_EQ(qasm::parse(qasm::emit(c)), c);
}

TEST(QasmRoundTrip, RandomThreeQubitBasisCircuit) {
  Rng rng(17);
  Circuit c(3);
  for (int i = 0; i < 40; ++i) {
    if (rng.uniform() < 0.3) {
      const auto qs = fixtures::distinct_qubits(rng, 3, 2);
      c.cx(qs[0], qs[1]);
    } else {
      c.gate(gates::u3(fixtures::random_angle(rng), fixtures::random_angle(rng), fixtures::random_angle(rng)),
             {static_cast<int>(rng.below(3))});
    }
  }
  EXPECT_EQ(qasm::parse(qasm::emit(c)), c);
}

TEST(QasmRoundTrip, FiveHundredRandomPrograms) {
  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const Circuit c = fixtures::random_program(rng, n, 1 + static_cast<int>(rng.below(30)));
    const std::string text = qasm::emit(c);
    ASSERT_EQ(qasm::parse(text), c) << "case " << i << "\n" << text;
    ASSERT_EQ(qasm::emit(qasm::parse(text)), text);
  }
}

TEST(QasmRoundTrip, ExperimentBuilders) {
  for (const Circuit& c : {build_eraser(false), build_eraser(true), build_bomb(true), build_bomb(false),
                           build_general_bomb(AngleVector::equal(5)), build_hardy(1.0, 2.0)}) {
    EXPECT_EQ(qasm::parse(qasm::emit(c)), c) << c.name();
  }
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(QasmMalformed, CorpusProducesPositionedDiagnostics) {
  const std::filesystem::path dir = std::filesystem::path(QFOUND_TEST_DATA) / "malformed";
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".qasm") continue;
    ++files;
    const std::string src = slurp(entry.path());
    const auto lines = lines_of(src);
    int line = 0;
    int column = 0;
    try {
      qasm::parse(src);
      ADD_FAILURE() << entry.path().filename() << " was accepted";
      continue;
    } catch (const ParseError& e) {
      line = e.line();
      column = e.column();
    } catch (const SemanticError& e) {
      line = e.line();
      column = e.column();
    }
    SCOPED_TRACE(entry.path().filename().string());
    ASSERT_GE(line, 1);
    ASSERT_LE(line, static_cast<int>(lines.size()) + 1);
    ASSERT_GE(column, 1);
    if (line <= static_cast<int>(lines.size())) {
      EXPECT_LE(column, static_cast<int>(lines[static_cast<std::size_t>(line - 1)].size()) + 1);
    }
  }
  EXPECT_GE(files, 20);
}

struct MalformedCase {
  const char* file;
  int line;
  int column;
  bool syntactic;
};

TEST(QasmMalformed, KnownPositions) {
  const MalformedCase cases[] = {
      {"missing_semicolon", 4, 1, true},    {"bad_version", 1, 10, false},
      {"index_out_of_range", 4, 5, false},  {"unknown_gate", 4, 1, false},
      {"undeclared_register", 4, 3, false}, {"unexpected_character", 4, 9, true},
      {"division_by_zero", 4, 6, false},    {"binary_plus", 4, 6, true},
      {"missing_header", 1, 1, true},       {"repeated_qubit", 4, 1, false},
  };
  const std::filesystem::path dir = std::filesystem::path(QFOUND_TEST_DATA) / "malformed";
  for (const auto& c : cases) {
    SCOPED_TRACE(c.file);
    const std::string src = slurp(dir / (std::string(c.file) + ".qasm"));
    try {
      qasm::parse(src);
      ADD_FAILURE() << "accepted";
    } catch (const ParseError& e) {
      EXPECT_TRUE(c.syntactic);
      EXPECT_EQ(e.line(), c.line);
      EXPECT_EQ(e.column(), c.column);
    } catch (const SemanticError& e) {
      EXPECT_FALSE(c.syntactic);
      EXPECT_EQ(e.line(), c.line);
      EXPECT_EQ(e.column(), c.column);
    }
  }
}

TEST(QasmLoad, MissingFileThrows) {
  EXPECT_ANY_THROW(qasm::load("/nonexistent/file.qasm"));
}

}  // namespace
}  // namespace qfound
