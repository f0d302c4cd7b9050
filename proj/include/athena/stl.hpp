#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "athena/trace.hpp"

namespace athena::detail {
class Lexer;
}

namespace athena::stl {

struct Expr;

/// abs(inner)
struct AbsFactor {
  std::shared_ptr<const Expr> inner;
  bool operator==(const AbsFactor& other) const;
};

struct Term {
  double coefficient = 1.0;
  /// Channel name or abs(...) of a nested expression.
  std::variant<std::string, AbsFactor> factor;
  bool operator==(const Term&) const = default;
};

/// Linear combination of channels (and abs() of sub-expressions) plus a
/// constant. Evaluated left to right: ((c1*f1 + c2*f2) + ...) + constant.
struct Expr {
  std::vector<Term> terms;
  double constant = 0.0;

  static Expr channel(std::string name, double coefficient = 1.0);
  static Expr number(double value);
  static Expr abs(Expr inner);

  bool is_constant() const noexcept { return terms.empty(); }
  bool operator==(const Expr&) const = default;
};

inline bool AbsFactor::operator==(const AbsFactor& other) const {
  return *inner == *other.inner;
}

Expr operator-(Expr lhs, const Expr& rhs);

/// Values of `expr` at grid samples [0, length).
std::vector<double> evaluate(const Expr& expr, const Trace& trace, std::size_t length);

enum class Comparator { Less, LessEqual, Greater, GreaterEqual };

struct Interval {
  double lower;
  double upper;
  bool operator==(const Interval&) const = default;
};

/// Immutable STL syntax tree. Copies share structure.
class Formula {
 public:
  struct Node;

  explicit Formula(Node node);

  const Node& node() const noexcept { return *node_; }
  bool operator==(const Formula& other) const;

 private:
  std::shared_ptr<const Node> node_;
};

struct Predicate {
  Expr expr;
  Comparator comparator;
  double bound;
  bool operator==(const Predicate&) const = default;
};
struct Not {
  Formula operand;
  bool operator==(const Not&) const = default;
};
struct And {
  Formula lhs, rhs;
  bool operator==(const And&) const = default;
};
struct Or {
  Formula lhs, rhs;
  bool operator==(const Or&) const = default;
};
struct Implies {
  Formula lhs, rhs;
  bool operator==(const Implies&) const = default;
};
struct Globally {
  Interval interval;
  Formula operand;
  bool operator==(const Globally&) const = default;
};
struct Eventually {
  Interval interval;
  Formula operand;
  bool operator==(const Eventually&) const = default;
};

struct Formula::Node {
  std::variant<Predicate, Not, And, Or, Implies, Globally, Eventually> value;
  bool operator==(const Node&) const = default;
};

Formula predicate(Expr expr, Comparator comparator, double bound);
Formula negation(Formula operand);
Formula conjunction(Formula lhs, Formula rhs);
Formula disjunction(Formula lhs, Formula rhs);
Formula implication(Formula lhs, Formula rhs);
/// Throws SemanticError unless 0 <= lower <= upper.
Formula globally(Interval interval, Formula operand);
Formula eventually(Interval interval, Formula operand);

/// Parses the textual formula syntax, e.g. "G[0,30](RPM < 3000) -> G[0,4](Speed < 35)".
/// Throws ParseError (with a character offset) or SemanticError.
Formula parse(std::string_view text);

/// Canonical text form; parse(to_string(f)) == f.
std::string to_string(const Formula& formula);
std::string to_string(const Expr& expr);

std::set<std::string> channels(const Formula& formula);
void collect_channels(const Expr& expr, std::set<std::string>& out);

/// Largest time offset (seconds) the formula looks ahead from t = 0.
double horizon(const Formula& formula);

/// Space robustness at t = 0 on the discrete grid. Positive means satisfied,
/// negative violated. Throws MissingChannel or HorizonError.
double robustness(const Formula& formula, const Trace& trace);

/// Boolean semantics on the same samples; strict comparators are strict.
bool satisfied(const Formula& formula, const Trace& trace);

namespace detail {
/// Parses an arithmetic expression at the lexer's position (shared with the
/// manual-fitness parser).
Expr parse_expr(athena::detail::Lexer& lexer);
/// Sample offsets [first, last] selected by an interval at the given step.
std::pair<std::size_t, std::size_t> interval_offsets(Interval interval, double step);
}  // namespace detail

}  // namespace athena::stl
