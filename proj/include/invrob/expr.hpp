// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "invrob/types.hpp"

namespace invrob::expr {

/// Expression language of problem specs:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | '+' unary | power
///   power   := primary ('^' unary)?          right-associative, so
///                                            -x^2 = -(x^2), 2^-1 = 0.5
///   primary := number | x[i] | u[j] | '(' expr ')'
///            | exp(expr) | log(expr) | min(expr, expr, ...) | max(expr, ...)
///
/// Compiled to a postfix program evaluated on a small value stack.
class Program {
 public:
  enum class Op : unsigned char { Const, X, U, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Min, Max };
  struct Instr {
    Op op;
    std::size_t arg;  ///< constant slot, variable index or argument count
  };

  double operator()(ConstSpan x, ConstSpan u) const;

  const std::string& source() const { return source_; }
  /// One past the largest x / u index referenced (0 when unused).
  std::size_t x_arity() const { return x_arity_; }
  std::size_t u_arity() const { return u_arity_; }
  const std::vector<Instr>& code() const { return code_; }

 private:
  friend Program compile(std::string_view);

  std::string source_;
  std::vector<Instr> code_;
  std::vector<double> consts_;
  std::size_t depth_ = 0;
  std::size_t x_arity_ = 0;
  std::size_t u_arity_ = 0;
};

/// Throws SpecError naming the column of the first offending character.
Program compile(std::string_view source);

/// Compiles and checks the variable indices against the problem dimensions.
ProblemFunction make_function(std::string_view source, std::size_t n, std::size_t m, Convexity flag);

}  // namespace invrob::expr
