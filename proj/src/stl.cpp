#include "athena/stl.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

#include "athena/detail/lexer.hpp"
#include "athena/errors.hpp"

namespace athena::stl {

using athena::detail::Lexer;
using athena::detail::TokenKind;

Expr Expr::channel(std::string name, double coefficient) {
  Expr e;
  e.terms.push_back(Term{coefficient, std::move(name)});
  return e;
}

Expr Expr::number(double value) {
  Expr e;
  e.constant = value;
  return e;
}

Expr Expr::abs(Expr inner) {
  Expr e;
  e.terms.push_back(Term{1.0, AbsFactor{std::make_shared<const Expr>(std::move(inner))}});
  return e;
}

Expr operator-(Expr lhs, const Expr& rhs) {
  for (const Term& t : rhs.terms) lhs.terms.push_back(Term{-t.coefficient, t.factor});
  lhs.constant -= rhs.constant;
  return lhs;
}

std::vector<double> evaluate(const Expr& expr, const Trace& trace, std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (const Term& term : expr.terms) {
    if (const auto* name = std::get_if<std::string>(&term.factor)) {
      const auto values = trace.channel(*name);
      for (std::size_t i = 0; i < length; ++i) out[i] += term.coefficient * values[i];
    } else {
      const auto inner = evaluate(*std::get<AbsFactor>(term.factor).inner, trace, length);
      for (std::size_t i = 0; i < length; ++i) out[i] += term.coefficient * std::abs(inner[i]);
    }
  }
  for (double& v : out) v += expr.constant;
  return out;
}

Formula::Formula(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

bool Formula::operator==(const Formula& other) const {
  return node_ == other.node_ || *node_ == *other.node_;
}

namespace {

void check_interval(Interval iv) {
  if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper)) {
    throw SemanticError("temporal interval bounds must be finite");
  }
  if (iv.lower < 0.0) throw SemanticError("temporal interval must start at or after 0");
  if (iv.lower > iv.upper) {
    throw SemanticError(fmt::format("empty temporal interval [{},{}]", iv.lower, iv.upper));
  }
}

}  // namespace

Formula predicate(Expr expr, Comparator comparator, double bound) {
  if (!std::isfinite(bound)) throw SemanticError("predicate bound must be finite");
  return Formula(Formula::Node{Predicate{std::move(expr), comparator, bound}});
}
Formula negation(Formula operand) { return Formula(Formula::Node{Not{std::move(operand)}}); }
Formula conjunction(Formula lhs, Formula rhs) {
  return Formula(Formula::Node{And{std::move(lhs), std::move(rhs)}});
}
Formula disjunction(Formula lhs, Formula rhs) {
  return Formula(Formula::Node{Or{std::move(lhs), std::move(rhs)}});
}
Formula implication(Formula lhs, Formula rhs) {
  return Formula(Formula::Node{Implies{std::move(lhs), std::move(rhs)}});
}
Formula globally(Interval interval, Formula operand) {
  check_interval(interval);
  return Formula(Formula::Node{Globally{interval, std::move(operand)}});
}
Formula eventually(Interval interval, Formula operand) {
  check_interval(interval);
  return Formula(Formula::Node{Eventually{interval, std::move(operand)}});
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

namespace {

Expr parse_term(Lexer& lex) {
  if (lex.peek().kind == TokenKind::Number) {
    const double value = lex.next().number;
    if (!lex.accept(TokenKind::Star)) return Expr::number(value);
    Expr factor = parse_term(lex);
    if (factor.is_constant()) lex.fail("expected a channel or abs() after '*'");
    for (Term& t : factor.terms) t.coefficient *= value;
    return factor;
  }
  if (lex.at_keyword("abs")) {
    lex.next();
    lex.expect(TokenKind::LParen);
    Expr inner = parse_expr(lex);
    lex.expect(TokenKind::RParen);
    return Expr::abs(std::move(inner));
  }
  if (lex.peek().kind == TokenKind::Ident) {
    return Expr::channel(std::string(lex.next().text));
  }
  lex.fail("expected a number, channel or abs(), found " +
           std::string(athena::detail::describe(lex.peek().kind)));
}

}  // namespace

Expr parse_expr(Lexer& lex) {
  Expr out;
  auto append = [&out](Expr term, double sign) {
    for (Term& t : term.terms) out.terms.push_back(Term{sign * t.coefficient, std::move(t.factor)});
    out.constant += sign * term.constant;
  };
  double sign = 1.0;
  if (lex.accept(TokenKind::Minus)) {
    sign = -1.0;
  } else {
    lex.accept(TokenKind::Plus);
  }
  append(parse_term(lex), sign);
  for (;;) {
    if (lex.accept(TokenKind::Plus)) {
      append(parse_term(lex), 1.0);
    } else if (lex.accept(TokenKind::Minus)) {
      append(parse_term(lex), -1.0);
    } else {
      return out;
    }
  }
}

std::pair<std::size_t, std::size_t> interval_offsets(Interval interval, double step) {
  const double first = std::max(0.0, std::ceil((interval.lower - kTimeTolerance) / step));
  const double last = std::floor((interval.upper + kTimeTolerance) / step);
  if (first > last) {
    throw HorizonError(fmt::format("interval [{},{}] selects no sample at step {}", interval.lower,
                                   interval.upper, step));
  }
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(last)};
}

}  // namespace detail

namespace {

bool is_keyword(std::string_view word) {
  return word == "and" || word == "or" || word == "not" || word == "abs";
}

Comparator flip(Comparator c) {
  switch (c) {
    case Comparator::Less: return Comparator::Greater;
    case Comparator::LessEqual: return Comparator::GreaterEqual;
    case Comparator::Greater: return Comparator::Less;
    case Comparator::GreaterEqual: return Comparator::LessEqual;
  }
  return c;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Formula parse() {
    if (lex_.peek().kind == TokenKind::End) lex_.fail("empty formula");
    Formula f = parse_implies();
    if (lex_.peek().kind != TokenKind::End) {
      lex_.fail("unexpected " + std::string(athena::detail::describe(lex_.peek().kind)));
    }
    return f;
  }

 private:
  // '->' binds loosest and associates to the right.
  Formula parse_implies() {
    Formula lhs = parse_or();
    if (lex_.accept(TokenKind::Arrow)) return implication(std::move(lhs), parse_implies());
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (lex_.accept_keyword("or")) lhs = disjunction(std::move(lhs), parse_and());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (lex_.accept_keyword("and")) lhs = conjunction(std::move(lhs), parse_unary());
    return lhs;
  }

  bool at_temporal(std::string_view op) const {
    return lex_.at_keyword(op) && lex_.peek_next() == TokenKind::LBracket;
  }

  Interval parse_interval() {
    const std::size_t at = lex_.peek().offset;
    lex_.expect(TokenKind::LBracket);
    const double lo = lex_.expect_number();
    lex_.expect(TokenKind::Comma);
    const double hi = lex_.expect_number();
    lex_.expect(TokenKind::RBracket);
    if (lo > hi) {
      throw SemanticError(fmt::format("interval [{},{}] at offset {} has lower > upper", lo, hi, at));
    }
    if (lo < 0.0) throw SemanticError(fmt::format("interval at offset {} starts before 0", at));
    return Interval{lo, hi};
  }

  Formula parse_unary() {
    if (lex_.accept_keyword("not")) return negation(parse_unary());
    if (at_temporal("G")) {
      lex_.next();
      const Interval iv = parse_interval();
      return globally(iv, parse_unary());
    }
    if (at_temporal("F")) {
      lex_.next();
      const Interval iv = parse_interval();
      return eventually(iv, parse_unary());
    }
    if (lex_.accept(TokenKind::LParen)) {
      Formula inner = parse_implies();
      lex_.expect(TokenKind::RParen);
      return inner;
    }
    return parse_atom();
  }

  std::optional<Comparator> accept_comparator() {
    switch (lex_.peek().kind) {
      case TokenKind::Less: lex_.next(); return Comparator::Less;
      case TokenKind::LessEqual: lex_.next(); return Comparator::LessEqual;
      case TokenKind::Greater: lex_.next(); return Comparator::Greater;
      case TokenKind::GreaterEqual: lex_.next(); return Comparator::GreaterEqual;
      default: return std::nullopt;
    }
  }

  static Formula make_predicate(const Expr& lhs, Comparator c, const Expr& rhs) {
    if (rhs.is_constant()) return predicate(lhs, c, rhs.constant);
    if (lhs.is_constant()) return predicate(rhs, flip(c), lhs.constant);
    return predicate(lhs - rhs, c, 0.0);
  }

  // expr cmp expr [cmp expr]; the chained form a < e < b means (a < e) and (e < b).
  Formula parse_atom() {
    if (lex_.peek().kind == TokenKind::Ident && is_keyword(lex_.peek().text) &&
        lex_.peek().text != "abs") {
      lex_.fail("unexpected keyword '" + std::string(lex_.peek().text) + "'");
    }
    const Expr first = stl::detail::parse_expr(lex_);
    const auto c1 = accept_comparator();
    if (!c1) lex_.fail("expected a comparison operator");
    const Expr second = stl::detail::parse_expr(lex_);
    const auto c2 = accept_comparator();
    if (!c2) return make_predicate(first, *c1, second);
    const Expr third = stl::detail::parse_expr(lex_);
    return conjunction(make_predicate(first, *c1, second), make_predicate(second, *c2, third));
  }

  Lexer lex_;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printing and inspection

namespace {

std::string_view symbol(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
  }
  return "?";
}

std::string factor_text(const Term& t) {
  if (const auto* name = std::get_if<std::string>(&t.factor)) return *name;
  return "abs(" + to_string(*std::get<AbsFactor>(t.factor).inner) + ")";
}

}  // namespace

std::string to_string(const Expr& expr) {
  std::string out;
  for (const Term& t : expr.terms) {
    const double mag = std::abs(t.coefficient);
    const bool negative = std::signbit(t.coefficient);
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    if (mag != 1.0) out += fmt::format("{}*", mag);
    out += factor_text(t);
  }
  if (out.empty()) return fmt::format("{}", expr.constant);
  if (expr.constant != 0.0) {
    out += fmt::format(" {} {}", std::signbit(expr.constant) ? "-" : "+", std::abs(expr.constant));
  }
  return out;
}

std::string to_string(const Formula& formula) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return fmt::format("{} {} {}", to_string(n.expr), symbol(n.comparator), n.bound);
        } else if constexpr (std::is_same_v<T, Not>) {
          return "not (" + to_string(n.operand) + ")";
        } else if constexpr (std::is_same_v<T, And>) {
          return "(" + to_string(n.lhs) + ") and (" + to_string(n.rhs) + ")";
        } else if constexpr (std::is_same_v<T, Or>) {
          return "(" + to_string(n.lhs) + ") or (" + to_string(n.rhs) + ")";
        } else if constexpr (std::is_same_v<T, Implies>) {
          return "(" + to_string(n.lhs) + ") -> (" + to_string(n.rhs) + ")";
        } else if constexpr (std::is_same_v<T, Globally>) {
          return fmt::format("G[{},{}] ({})", n.interval.lower, n.interval.upper,
                             to_string(n.operand));
        } else {
          return fmt::format("F[{},{}] ({})", n.interval.lower, n.interval.upper,
                             to_string(n.operand));
        }
      },
      formula.node().value);
}

void collect_channels(const Expr& expr, std::set<std::string>& out) {
  for (const Term& t : expr.terms) {
    if (const auto* name = std::get_if<std::string>(&t.factor)) {
      out.insert(*name);
    } else {
      collect_channels(*std::get<AbsFactor>(t.factor).inner, out);
    }
  }
}

namespace {

void collect_channels(const Formula& f, std::set<std::string>& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          stl::collect_channels(n.expr, out);
        } else if constexpr (std::is_same_v<T, Not> || std::is_same_v<T, Globally> ||
                             std::is_same_v<T, Eventually>) {
          collect_channels(n.operand, out);
        } else {
          collect_channels(n.lhs, out);
          collect_channels(n.rhs, out);
        }
      },
      f.node().value);
}

// Furthest look-ahead, either in seconds (step == 0) or in samples.
double look_ahead(const Formula& f, double step) {
  return std::visit(
      [step](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Predicate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Not>) {
          return look_ahead(n.operand, step);
        } else if constexpr (std::is_same_v<T, Globally> || std::is_same_v<T, Eventually>) {
          const double own = step == 0.0
                                 ? n.interval.upper
                                 : static_cast<double>(detail::interval_offsets(n.interval, step).second);
          return own + look_ahead(n.operand, step);
        } else {
          return std::max(look_ahead(n.lhs, step), look_ahead(n.rhs, step));
        }
      },
      f.node().value);
}

}  // namespace

std::set<std::string> channels(const Formula& formula) {
  std::set<std::string> out;
  collect_channels(formula, out);
  return out;
}

double horizon(const Formula& formula) { return look_ahead(formula, 0.0); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

void check_evaluable(const Formula& f, const Trace& trace) {
  for (const std::string& name : channels(f)) {
    if (!trace.has(name)) throw MissingChannel(name);
  }
  const double needed = look_ahead(f, trace.grid().step()) + 1.0;
  if (needed > static_cast<double>(trace.grid().size())) {
    throw HorizonError(fmt::format("formula needs {} s of trace, trace covers {} s", horizon(f),
                                   trace.grid().end()));
  }
}

// out[i] = extreme of in[i+lo .. i+hi] using a monotone deque.
template <typename Better>
std::vector<double> sliding_extreme(const std::vector<double>& in, std::size_t length,
                                    std::size_t lo, std::size_t hi, Better better) {
  std::vector<double> out(length);
  std::deque<std::size_t> window;
  std::size_t next = lo;
  for (std::size_t i = 0; i < length; ++i) {
    for (; next <= i + hi; ++next) {
      while (!window.empty() && !better(in[window.back()], in[next])) window.pop_back();
      window.push_back(next);
    }
    while (window.front() < i + lo) window.pop_front();
    out[i] = in[window.front()];
  }
  return out;
}

class RobustnessEvaluator {
 public:
  explicit RobustnessEvaluator(const Trace& trace) : trace_(trace) {}

  std::vector<double> eval(const Formula& f, std::size_t length) const {
    return std::visit([&](const auto& n) { return eval_node(n, length); }, f.node().value);
  }

 private:
  std::vector<double> eval_node(const Predicate& p, std::size_t length) const {
    std::vector<double> v = evaluate(p.expr, trace_, length);
    const bool upper = p.comparator == Comparator::Less || p.comparator == Comparator::LessEqual;
    for (double& x : v) x = upper ? p.bound - x : x - p.bound;
    return v;
  }
  std::vector<double> eval_node(const Not& n, std::size_t length) const {
    std::vector<double> v = eval(n.operand, length);
    for (double& x : v) x = -x;
    return v;
  }
  std::vector<double> eval_node(const And& n, std::size_t length) const {
    std::vector<double> a = eval(n.lhs, length);
    const std::vector<double> b = eval(n.rhs, length);
    for (std::size_t i = 0; i < length; ++i) a[i] = std::min(a[i], b[i]);
    return a;
  }
  std::vector<double> eval_node(const Or& n, std::size_t length) const {
    std::vector<double> a = eval(n.lhs, length);
    const std::vector<double> b = eval(n.rhs, length);
    for (std::size_t i = 0; i < length; ++i) a[i] = std::max(a[i], b[i]);
    return a;
  }
  std::vector<double> eval_node(const Implies& n, std::size_t length) const {
    std::vector<double> a = eval(n.lhs, length);
    const std::vector<double> b = eval(n.rhs, length);
    for (std::size_t i = 0; i < length; ++i) a[i] = std::max(-a[i], b[i]);
    return a;
  }
  std::vector<double> eval_node(const Globally& n, std::size_t length) const {
    const auto [lo, hi] = detail::interval_offsets(n.interval, trace_.grid().step());
    return sliding_extreme(eval(n.operand, length + hi), length, lo, hi,
                           [](double kept, double incoming) { return kept < incoming; });
  }
  std::vector<double> eval_node(const Eventually& n, std::size_t length) const {
    const auto [lo, hi] = detail::interval_offsets(n.interval, trace_.grid().step());
    return sliding_extreme(eval(n.operand, length + hi), length, lo, hi,
                           [](double kept, double incoming) { return kept > incoming; });
  }

  const Trace& trace_;
};

class BooleanEvaluator {
 public:
  explicit BooleanEvaluator(const Trace& trace) : trace_(trace) {}

  std::vector<char> eval(const Formula& f, std::size_t length) const {
    return std::visit([&](const auto& n) { return eval_node(n, length); }, f.node().value);
  }

 private:
  std::vector<char> eval_node(const Predicate& p, std::size_t length) const {
    const std::vector<double> v = evaluate(p.expr, trace_, length);
    std::vector<char> out(length);
    for (std::size_t i = 0; i < length; ++i) {
      switch (p.comparator) {
        case Comparator::Less: out[i] = v[i] < p.bound; break;
        case Comparator::LessEqual: out[i] = v[i] <= p.bound; break;
        case Comparator::Greater: out[i] = v[i] > p.bound; break;
        case Comparator::GreaterEqual: out[i] = v[i] >= p.bound; break;
      }
    }
    return out;
  }
  std::vector<char> eval_node(const Not& n, std::size_t length) const {
    std::vector<char> v = eval(n.operand, length);
    for (char& x : v) x = !x;
    return v;
  }
  template <typename Op>
  std::vector<char> combine(const Formula& lhs, const Formula& rhs, std::size_t length, Op op) const {
    std::vector<char> a = eval(lhs, length);
    const std::vector<char> b = eval(rhs, length);
    for (std::size_t i = 0; i < length; ++i) a[i] = op(a[i] != 0, b[i] != 0);
    return a;
  }
  std::vector<char> eval_node(const And& n, std::size_t length) const {
    return combine(n.lhs, n.rhs, length, [](bool a, bool b) { return a && b; });
  }
  std::vector<char> eval_node(const Or& n, std::size_t length) const {
    return combine(n.lhs, n.rhs, length, [](bool a, bool b) { return a || b; });
  }
  std::vector<char> eval_node(const Implies& n, std::size_t length) const {
    return combine(n.lhs, n.rhs, length, [](bool a, bool b) { return !a || b; });
  }
  // Counts of true samples in each window via prefix sums.
  std::vector<char> windowed(const Formula& operand, Interval iv, std::size_t length,
                             bool require_all) const {
    const auto [lo, hi] = detail::interval_offsets(iv, trace_.grid().step());
    const std::vector<char> v = eval(operand, length + hi);
    std::vector<std::size_t> prefix(v.size() + 1, 0);
    for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + (v[i] ? 1 : 0);
    std::vector<char> out(length);
    for (std::size_t i = 0; i < length; ++i) {
      const std::size_t count = prefix[i + hi + 1] - prefix[i + lo];
      out[i] = require_all ? count == hi - lo + 1 : count > 0;
    }
    return out;
  }
  std::vector<char> eval_node(const Globally& n, std::size_t length) const {
    return windowed(n.operand, n.interval, length, true);
  }
  std::vector<char> eval_node(const Eventually& n, std::size_t length) const {
    return windowed(n.operand, n.interval, length, false);
  }

  const Trace& trace_;
};

}  // namespace

double robustness(const Formula& formula, const Trace& trace) {
  check_evaluable(formula, trace);
  return RobustnessEvaluator(trace).eval(formula, 1)[0];
}

bool satisfied(const Formula& formula, const Trace& trace) {
  check_evaluable(formula, trace);
  return BooleanEvaluator(trace).eval(formula, 1)[0] != 0;
}

}  // namespace athena::stl
