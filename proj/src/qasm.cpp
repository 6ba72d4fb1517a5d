#include "qfound/qasm.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

namespace qfound::qasm {

ParseError::ParseError(int line, int column, std::string message, std::string expected)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
                         (expected.empty() ? "" : " (expected " + expected + ")")),
      line_(line),
      column_(column),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

SemanticError::SemanticError(int line, int column, std::string message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

namespace {

enum class Tok { kIdent, kNumber, kString, kSemi, kComma, kLParen, kRParen, kLBracket, kRBracket, kArrow, kMinus,
                 kPlus, kStar, kSlash, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::string describe(Tok t) {
  switch (t) {
    case Tok::kIdent: return "identifier";
    case Tok::kNumber: return "number";
    case Tok::kString: return "string";
    case Tok::kSemi: return "';'";
    case Tok::kComma: return "','";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kLBracket: return "'['";
    case Tok::kRBracket: return "']'";
    case Tok::kArrow: return "'->'";
    case Tok::kMinus: return "'-'";
    case Tok::kPlus: return "'+'";
    case Tok::kStar: return "'*'";
    case Tok::kSlash: return "'/'";
    case Tok::kEnd: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int tl = line;
    const int tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::kIdent, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k >= src.size() || !std::isdigit(static_cast<unsigned char>(src[k]))) {
          int ec = tc + static_cast<int>(k - i);
          throw ParseError(tl, ec, "malformed exponent in number", "digit");
        }
        while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
        j = k;
      }
      out.push_back({Tok::kNumber, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') throw ParseError(tl, tc, "unterminated string literal", "'\"'");
      out.push_back({Tok::kString, std::string(src.substr(i + 1, j - i - 1)), tl, tc});
      advance(j - i + 1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({Tok::kArrow, "->", tl, tc});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case ';': kind = Tok::kSemi; break;
      case ',': kind = Tok::kComma; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      case '[': kind = Tok::kLBracket; break;
      case ']': kind = Tok::kRBracket; break;
      case '-': kind = Tok::kMinus; break;
      case '+': kind = Tok::kPlus; break;
      case '*': kind = Tok::kStar; break;
      case '/': kind = Tok::kSlash; break;
      default: throw ParseError(tl, tc, std::string("unexpected character '") + c + "'", "token");
    }
    out.push_back({kind, std::string(1, c), tl, tc});
    advance(1);
  }
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

struct Register {
  int offset;
  int size;
};

// A register reference; index < 0 means the whole register.
struct Operand {
  const Register* reg;
  int index;
  int line;
  int column;
};

struct Statement {
  Instruction inst;
  int line;
  int column;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  Circuit run() {
    header();
    while (peek().kind != Tok::kEnd) statement();
    Circuit circuit(std::max(qubits_, 1), clbits_);
    if (qubits_ == 0) throw SemanticError(toks_.back().line, toks_.back().column, "program declares no qubits");
    for (auto& s : stmts_) {
      try {
        circuit.append(std::move(s.inst));
      } catch (const std::exception& e) {
        throw SemanticError(s.line, s.column, e.what());
      }
    }
    return circuit;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  const Token& expect(Tok kind) {
    const Token& t = peek();
    if (t.kind != kind) {
      throw ParseError(t.line, t.column, "unexpected " + (t.kind == Tok::kEnd ? describe(t.kind) : "'" + t.text + "'"),
                       describe(kind));
    }
    return take();
  }

  const Token& expect_keyword(std::string_view word) {
    const Token& t = peek();
    if (t.kind != Tok::kIdent || t.text != word) {
      throw ParseError(t.line, t.column, "unexpected " + (t.kind == Tok::kEnd ? describe(t.kind) : "'" + t.text + "'"),
                       "'" + std::string(word) + "'");
    }
    return take();
  }

  void header() {
    expect_keyword("OPENQASM");
    const Token& v = expect(Tok::kNumber);
    if (v.text != "2.0") throw SemanticError(v.line, v.column, "unsupported OpenQASM version '" + v.text + "'");
    expect(Tok::kSemi);
  }

  int integer(const Token& t) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw ParseError(t.line, t.column, "expected a non-negative integer, got '" + t.text + "'", "integer");
    return value;
  }

  void statement() {
    const Token& t = peek();
    if (t.kind != Tok::kIdent) throw ParseError(t.line, t.column, "unexpected '" + t.text + "'", "statement");
    if (t.text == "include") return include();
    if (t.text == "qreg" || t.text == "creg") return declaration();
    if (t.text == "measure") return measure();
    if (t.text == "barrier") return barrier();
    if (t.text == "gate" || t.text == "opaque" || t.text == "if" || t.text == "reset")
      throw SemanticError(t.line, t.column, "'" + t.text + "' statements are not supported");
    if (t.text == "OPENQASM") throw ParseError(t.line, t.column, "duplicate version header", "statement");
    gate_application();
  }

  void include() {
    take();
    const Token& s = expect(Tok::kString);
    if (s.text != "qelib1.inc") throw SemanticError(s.line, s.column, "only \"qelib1.inc\" may be included");
    expect(Tok::kSemi);
  }

  void declaration() {
    const Token& kw = take();
    const bool quantum = kw.text == "qreg";
    const Token& name = expect(Tok::kIdent);
    expect(Tok::kLBracket);
    const Token& size_tok = expect(Tok::kNumber);
    const int size = integer(size_tok);
    expect(Tok::kRBracket);
    expect(Tok::kSemi);
    if (size < 1) throw SemanticError(size_tok.line, size_tok.column, "register size must be positive");
    if (qregs_.count(name.text) || cregs_.count(name.text))
      throw SemanticError(name.line, name.column, "register '" + name.text + "' already declared");
    if (quantum) {
      if (qubits_ + size > kMaxQubits) throw SemanticError(size_tok.line, size_tok.column, "too many qubits");
      qregs_[name.text] = Register{qubits_, size};
      qubits_ += size;
    } else {
      cregs_[name.text] = Register{clbits_, size};
      clbits_ += size;
    }
  }

  Operand operand(bool quantum) {
    const Token& name = expect(Tok::kIdent);
    auto& table = quantum ? qregs_ : cregs_;
    auto it = table.find(name.text);
    if (it == table.end()) {
      throw SemanticError(name.line, name.column,
                          std::string("undeclared ") + (quantum ? "quantum" : "classical") + " register '" + name.text + "'");
    }
    Operand op{&it->second, -1, name.line, name.column};
    if (peek().kind == Tok::kLBracket) {
      take();
      const Token& idx = expect(Tok::kNumber);
      op.index = integer(idx);
      expect(Tok::kRBracket);
      if (op.index >= it->second.size) {
        throw SemanticError(idx.line, idx.column,
                            "index out of range: " + name.text + "[" + idx.text + "] (size " +
                                std::to_string(it->second.size) + ")");
      }
    }
    return op;
  }

  // Expands register-wide operands; all whole registers must agree in size.
  std::vector<std::vector<int>> broadcast(const std::vector<Operand>& ops, int line, int column) {
    int width = -1;
    for (const auto& op : ops) {
      if (op.index >= 0) continue;
      if (width >= 0 && width != op.reg->size) throw SemanticError(line, column, "register size mismatch in broadcast");
      width = op.reg->size;
    }
    const int count = width < 0 ? 1 : width;
    std::vector<std::vector<int>> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      for (const auto& op : ops) out[static_cast<std::size_t>(k)].push_back(op.reg->offset + (op.index >= 0 ? op.index : k));
    }
    return out;
  }

  double primary() {
    const Token& t = peek();
    if (t.kind == Tok::kMinus) {
      take();
      return -primary();
    }
    if (t.kind == Tok::kNumber) {
      take();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size())
        throw ParseError(t.line, t.column, "invalid number '" + t.text + "'", "number");
      return v;
    }
    if (t.kind == Tok::kIdent && t.text == "pi") {
      take();
      return std::numbers::pi;
    }
    if (t.kind == Tok::kLParen) {
      take();
      const double v = expression();
      expect(Tok::kRParen);
      return v;
    }
    throw ParseError(t.line, t.column, "unexpected " + (t.kind == Tok::kEnd ? describe(t.kind) : "'" + t.text + "'"),
                     "angle expression");
  }

  double expression() {
    double v = primary();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      const Token& op = take();
      const double rhs = primary();
      if (op.kind == Tok::kStar) {
        v *= rhs;
      } else {
        if (rhs == 0.0) throw SemanticError(op.line, op.column, "division by zero in angle expression");
        v /= rhs;
      }
    }
    return v;
  }

  void gate_application() {
    const Token name = take();
    std::optional<GateKind> kind;
    try {
      kind = gate_kind_from_name(name.text);
    } catch (const std::invalid_argument&) {
    }
    if (!kind || name.text == "cnot" || name.text == "toffoli")
      throw SemanticError(name.line, name.column, "unsupported gate '" + name.text + "'");

    std::vector<double> params;
    if (peek().kind == Tok::kLParen) {
      take();
      params.push_back(expression());
      while (peek().kind == Tok::kComma) {
        take();
        params.push_back(expression());
      }
      expect(Tok::kRParen);
    }
    if (static_cast<int>(params.size()) != param_count_of(*kind)) {
      throw SemanticError(name.line, name.column,
                          "gate '" + name.text + "' takes " + std::to_string(param_count_of(*kind)) +
                              " parameter(s), got " + std::to_string(params.size()));
    }

    std::vector<Operand> ops{operand(true)};
    while (peek().kind == Tok::kComma) {
      take();
      ops.push_back(operand(true));
    }
    expect(Tok::kSemi);
    if (static_cast<int>(ops.size()) != arity_of(*kind)) {
      throw SemanticError(name.line, name.column,
                          "gate '" + name.text + "' acts on " + std::to_string(arity_of(*kind)) + " qubit(s), got " +
                              std::to_string(ops.size()));
    }
    for (auto& qubits : broadcast(ops, name.line, name.column)) {
      stmts_.push_back({Instruction::gate_op(GateDef(*kind, params), std::move(qubits)), name.line, name.column});
    }
  }

  void measure() {
    const Token kw = take();
    const Operand q = operand(true);
    expect(Tok::kArrow);
    const Operand c = operand(false);
    expect(Tok::kSemi);
    if ((q.index < 0) != (c.index < 0))
      throw SemanticError(kw.line, kw.column, "measure must map a register to a register or a bit to a bit");
    if (q.index < 0) {
      if (q.reg->size != c.reg->size) throw SemanticError(kw.line, kw.column, "register size mismatch in measure");
      for (int k = 0; k < q.reg->size; ++k)
        stmts_.push_back({Instruction::measure(q.reg->offset + k, c.reg->offset + k), kw.line, kw.column});
    } else {
      stmts_.push_back({Instruction::measure(q.reg->offset + q.index, c.reg->offset + c.index), kw.line, kw.column});
    }
  }

  void barrier() {
    const Token kw = take();
    std::vector<int> qubits;
    auto add = [&](const Operand& op) {
      if (op.index >= 0) {
        qubits.push_back(op.reg->offset + op.index);
      } else {
        for (int k = 0; k < op.reg->size; ++k) qubits.push_back(op.reg->offset + k);
      }
    };
    add(operand(true));
    while (peek().kind == Tok::kComma) {
      take();
      add(operand(true));
    }
    expect(Tok::kSemi);
    stmts_.push_back({Instruction::barrier(std::move(qubits)), kw.line, kw.column});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Register> qregs_;
  std::map<std::string, Register> cregs_;
  int qubits_ = 0;
  int clbits_ = 0;
  std::vector<Statement> stmts_;
};

std::string format_angle(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Circuit parse(std::string_view source) { return Parser(source).run(); }

Circuit load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string emit(const Circuit& circuit) {
  std::ostringstream os;
  const int n = circuit.num_qubits();
  os << "OPENQASM 2.0;\n";
  os << "include \"qelib1.inc\";\n";
  os << "qreg q[" << n << "];\n";
  if (circuit.num_clbits() > 0) os << "creg c[" << circuit.num_clbits() << "];\n";

  const auto& insts = circuit.instructions();
  // A trailing block measuring every qubit i into clbit i collapses to one line.
  std::size_t measure_block = insts.size();
  if (circuit.num_clbits() == n && insts.size() >= static_cast<std::size_t>(n)) {
    const std::size_t start = insts.size() - static_cast<std::size_t>(n);
    bool full = true;
    for (int k = 0; k < n && full; ++k) {
      const auto& in = insts[start + static_cast<std::size_t>(k)];
      full = in.kind == InstructionKind::kMeasure && in.qubits[0] == k && in.clbit == k;
    }
    if (full) measure_block = start;
  }

  auto qubit_list = [&](const std::vector<int>& qs) {
    bool all = static_cast<int>(qs.size()) == n;
    for (int k = 0; all && k < n; ++k) all = qs[static_cast<std::size_t>(k)] == k;
    if (all) return std::string("q");
    std::string s;
    for (std::size_t k = 0; k < qs.size(); ++k) {
      if (k) s += ",";
      s += "q[" + std::to_string(qs[k]) + "]";
    }
    return s;
  };

  for (std::size_t i = 0; i < measure_block; ++i) {
    const auto& in = insts[i];
    switch (in.kind) {
      case InstructionKind::kGate: {
        os << in.gate->name();
        const auto& p = in.gate->params();
        if (!p.empty()) {
          os << "(";
          for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "") << format_angle(p[k]);
          os << ")";
        }
        os << " ";
        for (std::size_t k = 0; k < in.qubits.size(); ++k) os << (k ? "," : "") << "q[" << in.qubits[k] << "]";
        os << ";\n";
        break;
      }
      case InstructionKind::kMeasure:
        os << "measure q[" << in.qubits[0] << "] -> c[" << in.clbit << "];\n";
        break;
      case InstructionKind::kBarrier:
        os << "barrier " << qubit_list(in.qubits) << ";\n";
        break;
    }
  }
  if (measure_block < insts.size()) os << "measure q -> c;\n";
  return os.str();
}

}  // namespace qfound::qasm
