/*
 * SPDX-License-Identifier: MIT
 *
 * Licensed under the MIT License
 */

#pragma once

#include "qccd/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qccd {

/// Native gate set of the target devices.
enum class GateKind : std::uint8_t { RX, RY, RZ, RZZ };

[[nodiscard]] inline const char* toString(const GateKind kind) {
  switch (kind) {
  case GateKind::RX:
    return "rx";
  case GateKind::RY:
    return "ry";
  case GateKind::RZ:
    return "rz";
  case GateKind::RZZ:
    return "rzz";
  }
  return "?";
}

[[nodiscard]] inline std::size_t arity(const GateKind kind) {
  return kind == GateKind::RZZ ? 2 : 1;
}

/// Gate durations in time steps.
struct GateTimes {
  std::size_t singleQubit = 1;
  std::size_t twoQubit = 3;

  [[nodiscard]] std::size_t of(const GateKind kind) const {
    return arity(kind) == 2 ? twoQubit : singleQubit;
  }
  bool operator==(const GateTimes&) const = default;
};

struct Gate {
  GateId id = 0;
  GateKind kind = GateKind::RZ;
  std::vector<Qubit> qubits;
  /// Carried through unchanged; scheduling never looks at it.
  double angle = 0.0;
  std::size_t duration = 1;

  [[nodiscard]] bool isTwoQubit() const { return qubits.size() == 2; }
  bool operator==(const Gate&) const = default;
};

class Circuit {
public:
  Circuit() = default;
  explicit Circuit(const std::size_t numQubits, const GateTimes times = {})
      : numQubits_(numQubits), times_(times) {}

  /// Appends a gate and returns its id. Throws std::invalid_argument when the
  /// operands do not fit the gate kind or the register.
  GateId add(const GateKind kind, std::vector<Qubit> qubits,
             const double angle = 0.0) {
    if (qubits.size() != arity(kind)) {
      throw std::invalid_argument(std::string(toString(kind)) + " expects " +
                                  std::to_string(arity(kind)) + " qubit(s)");
    }
    for (const Qubit q : qubits) {
      if (q >= numQubits_) {
        throw std::invalid_argument("qubit index " + std::to_string(q) +
                                    " out of range");
      }
    }
    if (qubits.size() == 2 && qubits[0] == qubits[1]) {
      throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
    const auto id = static_cast<GateId>(gates_.size());
    gates_.push_back(Gate{id, kind, std::move(qubits), angle, times_.of(kind)});
    return id;
  }

  [[nodiscard]] std::size_t numQubits() const { return numQubits_; }
  [[nodiscard]] std::size_t size() const { return gates_.size(); }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] const Gate& gate(const GateId id) const { return gates_.at(id); }
  [[nodiscard]] const GateTimes& gateTimes() const { return times_; }

  [[nodiscard]] Circuit withGateTimes(const GateTimes times) const {
    Circuit copy = *this;
    copy.times_ = times;
    for (auto& g : copy.gates_) {
      g.duration = times.of(g.kind);
    }
    return copy;
  }

  bool operator==(const Circuit&) const = default;

private:
  std::size_t numQubits_ = 0;
  GateTimes times_;
  std::vector<Gate> gates_;
};

class QasmError : public std::runtime_error {
public:
  QasmError(const std::string& message, const std::size_t line,
            const std::size_t column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line), column_(column) {}
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

struct Token {
  enum class Kind : std::uint8_t { Identifier, Number, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline std::vector<Token> tokenize(const std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t i = 0;
  const auto advance = [&](const std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') {
        advance(1);
      }
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    std::size_t len = 1;
    if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
      tok.kind = Token::Kind::Identifier;
      while (i + len < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i + len])) != 0 ||
              text[i + len] == '_')) {
        ++len;
      }
    } else if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '-' ||
               c == '+' || c == '.') {
      tok.kind = Token::Kind::Number;
      while (i + len < text.size()) {
        const char d = text[i + len];
        const bool exponentSign =
            (d == '-' || d == '+') &&
            (text[i + len - 1] == 'e' || text[i + len - 1] == 'E');
        if (std::isdigit(static_cast<unsigned char>(d)) != 0 || d == '.' ||
            d == 'e' || d == 'E' || exponentSign) {
          ++len;
        } else {
          break;
        }
      }
    } else if (c == '"') {
      tok.kind = Token::Kind::String;
      while (i + len < text.size() && text[i + len] != '"') {
        ++len;
      }
      if (i + len >= text.size()) {
        throw QasmError("unterminated string", line, column);
      }
      ++len;
    } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',' ||
               c == ';') {
      tok.kind = Token::Kind::Symbol;
    } else {
      throw QasmError(std::string("unexpected character '") + c + "'", line,
                      column);
    }
    tok.text = std::string(text.substr(i, len));
    advance(len);
    tokens.push_back(std::move(tok));
  }
  Token end;
  end.line = line;
  end.column = column;
  tokens.push_back(end);
  return tokens;
}

class QasmParser {
public:
  QasmParser(const std::string_view text, const GateTimes times)
      : tokens_(tokenize(text)), times_(times) {}

  Circuit parse() {
    Circuit circuit(0, times_);
    bool haveRegister = false;
    while (peek().kind != Token::Kind::End) {
      const Token head = next();
      if (head.kind != Token::Kind::Identifier) {
        throw QasmError("expected a statement, got '" + head.text + "'",
                        head.line, head.column);
      }
      if (head.text == "OPENQASM") {
        expect(Token::Kind::Number, "version number");
        expectSymbol(";");
      } else if (head.text == "include") {
        expect(Token::Kind::String, "file name");
        expectSymbol(";");
      } else if (head.text == "qreg") {
        if (haveRegister) {
          throw QasmError("only one qreg is supported", head.line, head.column);
        }
        registerName_ = expect(Token::Kind::Identifier, "register name").text;
        expectSymbol("[");
        const auto size = parseIndex();
        expectSymbol("]");
        expectSymbol(";");
        circuit = Circuit(size, times_);
        haveRegister = true;
      } else {
        GateKind kind{};
        if (head.text == "rx") {
          kind = GateKind::RX;
        } else if (head.text == "ry") {
          kind = GateKind::RY;
        } else if (head.text == "rz") {
          kind = GateKind::RZ;
        } else if (head.text == "rzz") {
          kind = GateKind::RZZ;
        } else {
          throw QasmError("unknown gate or statement '" + head.text + "'",
                          head.line, head.column);
        }
        if (!haveRegister) {
          throw QasmError("gate before qreg declaration", head.line,
                          head.column);
        }
        expectSymbol("(");
        const double angle = parseNumber();
        expectSymbol(")");
        std::vector<Qubit> qubits;
        for (std::size_t k = 0; k < arity(kind); ++k) {
          if (k > 0) {
            expectSymbol(",");
          }
          const Token& at = peek();
          const auto q = parseOperand();
          if (q >= circuit.numQubits()) {
            throw QasmError("qubit index " + std::to_string(q) +
                                " out of range",
                            at.line, at.column);
          }
          if (!qubits.empty() && qubits.front() == q) {
            throw QasmError("two-qubit gate needs distinct qubits", at.line,
                            at.column);
          }
          qubits.push_back(q);
        }
        expectSymbol(";");
        circuit.add(kind, std::move(qubits), angle);
      }
    }
    return circuit;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  Token next() {
    Token tok = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) {
      ++pos_;
    }
    return tok;
  }
  Token expect(const Token::Kind kind, const std::string& what) {
    Token tok = next();
    if (tok.kind != kind) {
      throw QasmError("expected " + what +
                          (tok.kind == Token::Kind::End
                               ? std::string(", got end of input")
                               : ", got '" + tok.text + "'"),
                      tok.line, tok.column);
    }
    return tok;
  }
  void expectSymbol(const std::string& symbol) {
    const Token tok = next();
    if (tok.kind != Token::Kind::Symbol || tok.text != symbol) {
      throw QasmError("expected '" + symbol + "'" +
                          (tok.kind == Token::Kind::End
                               ? std::string(", got end of input")
                               : ", got '" + tok.text + "'"),
                      tok.line, tok.column);
    }
  }
  double parseNumber() {
    const Token tok = expect(Token::Kind::Number, "angle");
    double value = 0.0;
    const char* first = tok.text.data();
    if (*first == '+') {
      ++first;
    }
    const char* last = tok.text.data() + tok.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      throw QasmError("malformed number '" + tok.text + "'", tok.line,
                      tok.column);
    }
    return value;
  }
  Qubit parseIndex() {
    const Token tok = expect(Token::Kind::Number, "index");
    Qubit value = 0;
    const auto [ptr, ec] = std::from_chars(
        tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
      throw QasmError("malformed index '" + tok.text + "'", tok.line,
                      tok.column);
    }
    return value;
  }
  Qubit parseOperand() {
    const Token name = expect(Token::Kind::Identifier, "register name");
    if (name.text != registerName_) {
      throw QasmError("unknown register '" + name.text + "'", name.line,
                      name.column);
    }
    expectSymbol("[");
    const auto index = parseIndex();
    expectSymbol("]");
    return index;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  GateTimes times_;
  std::string registerName_;
};

} // namespace detail

/**
 * Parses the supported OpenQASM subset: an optional header and include line,
 * a single `qreg`, and `rx`/`ry`/`rz`/`rzz` gates with one angle each.
 * @throws QasmError with the line and column of the offending token
 */
[[nodiscard]] inline Circuit parseQasm(const std::string_view text,
                                       const GateTimes times = {}) {
  return detail::QasmParser(text, times).parse();
}

/// Inverse of parseQasm; angles are printed with round-trip precision.
[[nodiscard]] inline std::string toQasm(const Circuit& circuit) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out << "qreg q[" << circuit.numQubits() << "];\n";
  char angle[64];
  for (const auto& g : circuit.gates()) {
    std::snprintf(angle, sizeof(angle), "%.17g", g.angle);
    out << toString(g.kind) << "(" << angle << ") q[" << g.qubits[0] << "]";
    if (g.isTwoQubit()) {
      out << ",q[" << g.qubits[1] << "]";
    }
    out << ";\n";
  }
  return out.str();
}

namespace detail {
inline void hadamard(Circuit& c, const Qubit q) {
  c.add(GateKind::RY, {q}, std::numbers::pi / 2);
  c.add(GateKind::RX, {q}, std::numbers::pi);
}
inline void requireWidth(const std::size_t n) {
  if (n < 2) {
    throw std::invalid_argument("benchmark circuits need at least 2 qubits");
  }
}
} // namespace detail

/// GHZ preparation: H on q0 followed by a CX ladder, 2 + 5(n-1) gates.
[[nodiscard]] inline Circuit ghz(const std::size_t n,
                                 const GateTimes times = {}) {
  detail::requireWidth(n);
  Circuit c(n, times);
  detail::hadamard(c, 0);
  for (Qubit i = 0; i + 1 < n; ++i) {
    const Qubit control = i;
    const Qubit target = i + 1;
    c.add(GateKind::RY, {target}, -std::numbers::pi / 2);
    c.add(GateKind::RZZ, {control, target}, std::numbers::pi / 2);
    c.add(GateKind::RZ, {control}, -std::numbers::pi / 2);
    c.add(GateKind::RX, {target}, std::numbers::pi / 2);
    c.add(GateKind::RY, {target}, std::numbers::pi / 2);
  }
  return c;
}

/// Textbook QFT without the final swaps, 2n + 3n(n-1)/2 gates.
[[nodiscard]] inline Circuit qft(const std::size_t n,
                                 const GateTimes times = {}) {
  detail::requireWidth(n);
  Circuit c(n, times);
  for (Qubit i = 0; i < n; ++i) {
    detail::hadamard(c, i);
    for (Qubit j = i + 1; j < n; ++j) {
      const double theta = std::numbers::pi / std::pow(2.0, j - i);
      c.add(GateKind::RZ, {j}, theta / 2);
      c.add(GateKind::RZ, {i}, theta / 2);
      c.add(GateKind::RZZ, {j, i}, -theta / 2);
    }
  }
  return c;
}

/**
 * n layers; every layer packs all qubits into disjoint native gates, drawing
 * the kind of each gate uniformly from {rx, ry, rz, rzz}.
 */
[[nodiscard]] inline Circuit randomCircuit(const std::size_t n,
                                           const std::uint64_t seed,
                                           const GateTimes times = {}) {
  detail::requireWidth(n);
  Circuit c(n, times);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> anyKind(0, 3);
  std::uniform_int_distribution<int> singleKind(0, 2);
  std::uniform_real_distribution<double> anyAngle(0.0, 2 * std::numbers::pi);
  std::vector<Qubit> order(n);
  for (Qubit q = 0; q < n; ++q) {
    order[q] = q;
  }
  for (std::size_t layer = 0; layer < n; ++layer) {
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t i = 0;
    while (i < n) {
      auto kind = static_cast<GateKind>(anyKind(rng));
      if (kind == GateKind::RZZ && i + 1 >= n) {
        kind = static_cast<GateKind>(singleKind(rng));
      }
      const double angle = anyAngle(rng);
      if (kind == GateKind::RZZ) {
        c.add(kind, {order[i], order[i + 1]}, angle);
        i += 2;
      } else {
        c.add(kind, {order[i]}, angle);
        ++i;
      }
    }
  }
  return c;
}

} // namespace qccd
