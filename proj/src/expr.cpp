// SPDX-License-Identifier: Apache-2.0
#include "invrob/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>

#include "invrob/errors.hpp"

namespace invrob::expr {
namespace {

using Op = Program::Op;

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  void parse(std::vector<Program::Instr>& code, std::vector<double>& consts) {
    code_ = &code;
    consts_ = &consts;
    skip();
    if (pos_ == src_.size()) fail("empty expression");
    expression();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
  }

  std::size_t x_arity = 0, u_arity = 0;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SpecError("expression \"" + std::string(src_) + "\": " + msg + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void emit(Op op, std::size_t arg = 0) { code_->push_back({op, arg}); }

  void expression() {
    term();
    while (true) {
      if (accept('+')) {
        term();
        emit(Op::Add);
      } else if (accept('-')) {
        term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    while (true) {
      if (accept('*')) {
        unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::Neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Op::Pow);
    }
  }

  void primary() {
    skip();
    if (pos_ == src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      expression();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "x" || name == "u") {
        const std::size_t idx = index();
        auto& arity = name == "x" ? x_arity : u_arity;
        arity = std::max(arity, idx + 1);
        emit(name == "x" ? Op::X : Op::U, idx);
        return;
      }
      if (name == "exp" || name == "log") {
        expect('(');
        expression();
        expect(')');
        emit(name == "exp" ? Op::Exp : Op::Log);
        return;
      }
      if (name == "min" || name == "max") {
        expect('(');
        std::size_t args = 0;
        do {
          expression();
          ++args;
        } while (accept(','));
        expect(')');
        if (args < 2) fail(std::string(name) + " needs at least two arguments");
        emit(name == "min" ? Op::Min : Op::Max, args);
        return;
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::size_t index() {
    expect('[');
    skip();
    std::size_t idx = 0;
    const auto* first = src_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, src_.data() + src_.size(), idx);
    if (ec != std::errc() || ptr == first) fail("expected a nonnegative integer index");
    pos_ += static_cast<std::size_t>(ptr - first);
    expect(']');
    return idx;
  }

  void number() {
    const auto* first = src_.data() + pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, src_.data() + src_.size(), v);
    if (ec != std::errc() || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    consts_->push_back(v);
    emit(Op::Const, consts_->size() - 1);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Program::Instr>* code_ = nullptr;
  std::vector<double>* consts_ = nullptr;
};

std::size_t stack_depth(const std::vector<Program::Instr>& code) {
  std::size_t depth = 0, peak = 0;
  for (const auto& in : code) {
    switch (in.op) {
      case Op::Const:
      case Op::X:
      case Op::U:
        ++depth;
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow:
        --depth;
        break;
      case Op::Min:
      case Op::Max:
        depth -= in.arg - 1;
        break;
      case Op::Neg:
      case Op::Exp:
      case Op::Log:
        break;
    }
    peak = std::max(peak, depth);
  }
  return peak;
}

}  // namespace

Program compile(std::string_view source) {
  Program p;
  p.source_ = std::string(source);
  Parser parser(p.source_);
  parser.parse(p.code_, p.consts_);
  p.x_arity_ = parser.x_arity;
  p.u_arity_ = parser.u_arity;
  p.depth_ = stack_depth(p.code_);
  return p;
}

double Program::operator()(ConstSpan x, ConstSpan u) const {
  std::array<double, 32> small{};
  std::unique_ptr<double[]> big;
  double* s = small.data();
  if (depth_ > small.size()) {
    big = std::make_unique<double[]>(depth_);
    s = big.get();
  }
  std::size_t top = 0;  // number of values on the stack
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const: s[top++] = consts_[in.arg]; break;
      case Op::X: s[top++] = x[in.arg]; break;
      case Op::U: s[top++] = u[in.arg]; break;
      case Op::Add: --top; s[top - 1] += s[top]; break;
      case Op::Sub: --top; s[top - 1] -= s[top]; break;
      case Op::Mul: --top; s[top - 1] *= s[top]; break;
      case Op::Div: --top; s[top - 1] /= s[top]; break;
      case Op::Pow: --top; s[top - 1] = std::pow(s[top - 1], s[top]); break;
      case Op::Neg: s[top - 1] = -s[top - 1]; break;
      case Op::Exp: s[top - 1] = std::exp(s[top - 1]); break;
      case Op::Log: s[top - 1] = std::log(s[top - 1]); break;
      case Op::Min:
      case Op::Max: {
        const std::size_t base = top - in.arg;
        double r = s[base];
        for (std::size_t k = base + 1; k < top; ++k) r = in.op == Op::Min ? std::min(r, s[k]) : std::max(r, s[k]);
        top = base;
        s[top++] = r;
        break;
      }
    }
  }
  return s[0];
}

ProblemFunction make_function(std::string_view source, std::size_t n, std::size_t m, Convexity flag) {
  auto prog = std::make_shared<const Program>(compile(source));
  if (prog->x_arity() > n)
    throw SpecError("expression \"" + std::string(source) + "\" uses x[" + std::to_string(prog->x_arity() - 1) +
                    "] but the decision dimension is " + std::to_string(n));
  if (prog->u_arity() > m)
    throw SpecError("expression \"" + std::string(source) + "\" uses u[" + std::to_string(prog->u_arity() - 1) +
                    "] but the scenario dimension is " + std::to_string(m));
  ProblemFunction f;
  f.eval = [prog](ConstSpan x, ConstSpan u) { return (*prog)(x, u); };
  f.convexity = flag;
  f.source = std::string(source);
  return f;
}

}  // namespace invrob::expr
