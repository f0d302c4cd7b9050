#include "athena/fitness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "athena/detail/lexer.hpp"
#include "athena/errors.hpp"
#include "athena/models.hpp"

namespace athena::fitness {

using athena::detail::Lexer;
using athena::detail::TokenKind;

ManualExpr::ManualExpr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

bool ManualExpr::operator==(const ManualExpr& other) const {
  return node_ == other.node_ || *node_ == *other.node_;
}

namespace {

ManualExpr make(auto term) { return ManualExpr(ManualExpr::Node{std::move(term)}); }

class ManualParser {
 public:
  explicit ManualParser(std::string_view text) : lex_(text) {}

  ManualExpr parse() {
    if (lex_.peek().kind == TokenKind::End) lex_.fail("empty manual fitness expression");
    ManualExpr e = parse_sum();
    if (lex_.peek().kind != TokenKind::End) {
      lex_.fail("unexpected " + std::string(athena::detail::describe(lex_.peek().kind)));
    }
    return e;
  }

 private:
  ManualExpr parse_sum() {
    ManualExpr lhs = parse_product();
    for (;;) {
      if (lex_.accept(TokenKind::Plus)) {
        lhs = make(Binary{BinaryOp::Add, std::move(lhs), parse_product()});
      } else if (lex_.accept(TokenKind::Minus)) {
        lhs = make(Binary{BinaryOp::Sub, std::move(lhs), parse_product()});
      } else {
        return lhs;
      }
    }
  }

  ManualExpr parse_product() {
    ManualExpr lhs = parse_factor();
    while (lex_.accept(TokenKind::Star)) {
      lhs = make(Binary{BinaryOp::Mul, std::move(lhs), parse_factor()});
    }
    return lhs;
  }

  Window parse_window() {
    const std::size_t at = lex_.peek().offset;
    lex_.expect(TokenKind::LBracket);
    const double a = lex_.expect_number();
    lex_.expect(TokenKind::Comma);
    const double b = lex_.expect_number();
    lex_.expect(TokenKind::RBracket);
    if (!(a < b)) throw SemanticError(fmt::format("window at offset {} needs begin < end", at));
    return Window{a, b};
  }

  std::string parse_channel() { return std::string(lex_.expect(TokenKind::Ident).text); }

  ManualExpr parse_factor() {
    const auto& tok = lex_.peek();
    if (tok.kind == TokenKind::Number) return make(Constant{lex_.next().number});
    if (lex_.accept(TokenKind::Minus)) {
      if (lex_.peek().kind == TokenKind::Number) return make(Constant{-lex_.next().number});
      return make(Negate{parse_factor()});
    }
    if (lex_.accept(TokenKind::LParen)) {
      ManualExpr inner = parse_sum();
      lex_.expect(TokenKind::RParen);
      return inner;
    }
    if (tok.kind != TokenKind::Ident) {
      lex_.fail("expected a number, '(' or function, found " +
                std::string(athena::detail::describe(tok.kind)));
    }
    const std::size_t at = tok.offset;
    const std::string fn(lex_.next().text);
    lex_.expect(TokenKind::LParen);
    ManualExpr result = call(fn, at);
    lex_.expect(TokenKind::RParen);
    return result;
  }

  ManualExpr call(const std::string& fn, std::size_t at) {
    static const std::unordered_map<std::string, Stat> stats{
        {"mean", Stat::Mean}, {"min", Stat::Min}, {"max", Stat::Max}, {"ptp", Stat::PeakToPeak}};
    if (const auto it = stats.find(fn); it != stats.end()) {
      stl::Expr signal = stl::detail::parse_expr(lex_);
      if (signal.is_constant()) lex_.fail_at(fn + "() needs a channel expression", at);
      lex_.expect(TokenKind::Comma);
      return make(WindowStatTerm{std::move(signal), it->second, parse_window()});
    }
    if (fn == "slope_pos" || fn == "slope_neg") {
      std::string channel = parse_channel();
      lex_.expect(TokenKind::Comma);
      const auto dir = fn == "slope_pos" ? SlopeDirection::Positive : SlopeDirection::Negative;
      return make(SlopeTerm{std::move(channel), dir, parse_window()});
    }
    if (fn == "at") {
      std::string channel = parse_channel();
      lex_.expect(TokenKind::Comma);
      return make(AtTerm{std::move(channel), lex_.expect_number()});
    }
    if (fn == "scale") {
      ManualExpr operand = parse_sum();
      lex_.expect(TokenKind::Comma);
      const Window range = parse_window();
      return make(ScaleTerm{std::move(operand), range.begin, range.end});
    }
    if (fn == "target") {
      ManualExpr operand = parse_sum();
      lex_.expect(TokenKind::Comma);
      return make(TargetTerm{std::move(operand), lex_.expect_number()});
    }
    lex_.fail_at("unknown function '" + fn + "'", at);
  }

  Lexer lex_;
};

std::string_view stat_name(Stat s) {
  switch (s) {
    case Stat::Min: return "min";
    case Stat::Max: return "max";
    case Stat::Mean: return "mean";
    case Stat::PeakToPeak: return "ptp";
  }
  return "?";
}

}  // namespace

ManualExpr parse_manual(std::string_view text) { return ManualParser(text).parse(); }

std::string to_string(const ManualExpr& expr) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return fmt::format("{}", n.value);
        } else if constexpr (std::is_same_v<T, WindowStatTerm>) {
          return fmt::format("{}({},[{},{}])", stat_name(n.stat), stl::to_string(n.signal),
                             n.window.begin, n.window.end);
        } else if constexpr (std::is_same_v<T, SlopeTerm>) {
          return fmt::format("{}({},[{},{}])",
                             n.direction == SlopeDirection::Positive ? "slope_pos" : "slope_neg",
                             n.channel, n.window.begin, n.window.end);
        } else if constexpr (std::is_same_v<T, AtTerm>) {
          return fmt::format("at({},{})", n.channel, n.time);
        } else if constexpr (std::is_same_v<T, ScaleTerm>) {
          return fmt::format("scale({},[{},{}])", to_string(n.operand), n.lo, n.hi);
        } else if constexpr (std::is_same_v<T, TargetTerm>) {
          return fmt::format("target({},{})", to_string(n.operand), n.target);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return "-(" + to_string(n.operand) + ")";
        } else {
          const char* op = n.op == BinaryOp::Add ? "+" : n.op == BinaryOp::Sub ? "-" : "*";
          return fmt::format("({} {} {})", to_string(n.lhs), op, to_string(n.rhs));
        }
      },
      expr.node().value);
}

namespace {

void collect(const ManualExpr& expr, std::set<std::string>& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, WindowStatTerm>) {
          stl::collect_channels(n.signal, out);
        } else if constexpr (std::is_same_v<T, SlopeTerm> || std::is_same_v<T, AtTerm>) {
          out.insert(n.channel);
        } else if constexpr (std::is_same_v<T, ScaleTerm> || std::is_same_v<T, TargetTerm> ||
                             std::is_same_v<T, Negate>) {
          collect(n.operand, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect(n.lhs, out);
          collect(n.rhs, out);
        }
      },
      expr.node().value);
}

class ManualEvaluator {
 public:
  ManualEvaluator(const Trace& trace, const ControlPointMap* cps) : trace_(trace), cps_(cps) {}

  double eval(const ManualExpr& e) const {
    return std::visit([this](const auto& n) { return eval_node(n); }, e.node().value);
  }

 private:
  double eval_node(const Constant& n) const { return n.value; }
  double eval_node(const WindowStatTerm& n) const {
    const auto values = stl::evaluate(n.signal, trace_, trace_.grid().size());
    return window_stat(values, trace_.grid(), n.stat, n.window);
  }
  double eval_node(const SlopeTerm& n) const {
    if (cps_ != nullptr) {
      if (const auto it = cps_->find(n.channel); it != cps_->end()) {
        return steepest_slope(it->second, n.direction, n.window);
      }
    }
    const auto values = trace_.channel(n.channel);
    const TimeGrid& grid = trace_.grid();
    std::vector<double> times(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) times[i] = grid.time(i);
    return steepest_slope(ControlPoints(std::move(times), {values.begin(), values.end()}),
                          n.direction, n.window);
  }
  double eval_node(const AtTerm& n) const {
    const TimeGrid& grid = trace_.grid();
    if (!(n.time >= -kTimeTolerance && n.time <= grid.end() + kTimeTolerance)) {
      throw InvalidArgument(fmt::format("at(): time {} outside [0,{}]", n.time, grid.end()));
    }
    const auto values = trace_.channel(n.channel);
    const double idx = std::clamp(std::round(n.time / grid.step()), 0.0,
                                  static_cast<double>(grid.size() - 1));
    return values[static_cast<std::size_t>(idx)];
  }
  double eval_node(const ScaleTerm& n) const { return scale(eval(n.operand), n.lo, n.hi); }
  double eval_node(const TargetTerm& n) const { return std::abs(eval(n.operand) - n.target); }
  double eval_node(const Negate& n) const { return -eval(n.operand); }
  double eval_node(const Binary& n) const {
    const double a = eval(n.lhs);
    const double b = eval(n.rhs);
    switch (n.op) {
      case BinaryOp::Add: return a + b;
      case BinaryOp::Sub: return a - b;
      case BinaryOp::Mul: return a * b;
    }
    return 0.0;
  }

  const Trace& trace_;
  const ControlPointMap* cps_;
};

}  // namespace

std::set<std::string> channels(const ManualExpr& expr) {
  std::set<std::string> out;
  collect(expr, out);
  return out;
}

double manual_fitness(const ManualExpr& expr, const Trace& trace,
                      const ControlPointMap* control_points) {
  return ManualEvaluator(trace, control_points).eval(expr);
}

double auto_fitness(const stl::Formula& formula, const Trace& trace, double auto_scale) {
  if (!(auto_scale > 0.0 && std::isfinite(auto_scale))) {
    throw InvalidArgument("auto_scale must be positive");
  }
  return std::clamp(stl::robustness(formula, trace) / auto_scale, -1.0, 1.0);
}

double athena_combine(double fa, double fm, double p) {
  if (!std::isfinite(fa) || !std::isfinite(fm)) throw InvalidArgument("fitness must be finite");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0,1]");
  return p * fa + (1.0 - p) * fm;
}

FitnessAssessment::FitnessAssessment(stl::Formula formula, ManualExpr manual, double p,
                                     double auto_scale, std::optional<PSchedule> schedule,
                                     double threshold)
    : formula_(std::move(formula)),
      manual_(std::move(manual)),
      p_(p),
      auto_scale_(auto_scale),
      schedule_(schedule),
      threshold_(threshold) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(p)) throw InvalidArgument("p must lie in [0,1]");
  if (!(auto_scale > 0.0 && std::isfinite(auto_scale))) {
    throw InvalidArgument("auto_scale must be positive");
  }
  if (schedule && !(in_unit(schedule->start) && in_unit(schedule->end))) {
    throw InvalidArgument("p schedule endpoints must lie in [0,1]");
  }
  if (!std::isfinite(threshold)) throw InvalidArgument("threshold must be finite");
}

double FitnessAssessment::effective_p(std::size_t iteration, std::size_t max_iterations) const {
  if (iteration >= max_iterations) {
    throw InvalidArgument(fmt::format("iteration {} outside budget {}", iteration, max_iterations));
  }
  if (!schedule_) return p_;
  if (max_iterations == 1) return schedule_->start;
  const double frac = static_cast<double>(iteration) / static_cast<double>(max_iterations - 1);
  return schedule_->start + (schedule_->end - schedule_->start) * frac;
}

FitnessValue assess(const FitnessAssessment& cfg, const Trace& trace, std::size_t iteration,
                    std::size_t max_iterations, const ControlPointMap* control_points) {
  FitnessValue v;
  v.p = cfg.effective_p(iteration, max_iterations);
  v.robustness = stl::robustness(cfg.formula(), trace);
  v.automatic = std::clamp(v.robustness / cfg.auto_scale(), -1.0, 1.0);
  v.manual = manual_fitness(cfg.manual(), trace, control_points);
  v.combined = athena_combine(v.automatic, v.manual, v.p);
  v.stop = v.robustness < cfg.threshold();
  return v;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

struct RawEntry {
  const char* id;
  const char* description;
  const char* plant;
  const char* formula;
  const char* manual;
  const char* assumption;
  double auto_scale;
};

constexpr const char* kAtBox = "Throttle:pchip:0:100:7,Brake:pchip:0:325:3";
constexpr const char* kCcBox = "throttle:pchip:0:1:7,brake:pchip:0:1:3";
constexpr const char* kAt6Manual =
    "0.5 * (target(scale(mean(Throttle,[0,33]),[0,100]), 0.45) + "
    "scale(mean(Brake,[0,25]),[0,325]))";
constexpr const char* kCcPushForward =
    "scale(max(brake,[0,100]),[0,1]) - scale(min(throttle,[0,100]),[0,1])";

// Manual terms: "maximise X" enters as -scale(X), "minimise Y" as +scale(Y),
// "close to T" as target(scale(X), T). Pairs of non-negative terms are
// averaged so every preset stays in [-1, 1].
constexpr RawEntry kRawCatalog[] = {
    {"AT1", "speed below 120 mph during [0,20] s", "at_lite", "G[0,20] (Speed < 120)",
     "scale(max(Brake,[0,25]),[0,325]) - scale(min(Throttle,[0,17]),[0,100])", kAtBox, 120.0},
    {"AT2", "engine speed below 4750 rpm during [0,10] s", "at_lite", "G[0,10] (RPM < 4750)",
     "scale(mean(Brake,[0,25]),[0,325]) - scale(mean(Throttle,[0,8]),[0,100])", kAtBox, 4750.0},
    {"AT6a", "low RPM over [0,30] s implies speed below 35 during [0,4] s", "at_lite",
     "G[0,30] (RPM < 3000) -> G[0,4] (Speed < 35)", kAt6Manual, kAtBox, 35.0},
    {"AT6b", "low RPM over [0,30] s implies speed below 50 during [0,8] s", "at_lite",
     "G[0,30] (RPM < 3000) -> G[0,8] (Speed < 50)", kAt6Manual, kAtBox, 50.0},
    {"AT6c", "low RPM over [0,30] s implies speed below 65 during [0,20] s", "at_lite",
     "G[0,30] (RPM < 3000) -> G[0,20] (Speed < 65)", kAt6Manual, kAtBox, 65.0},
    {"CC1", "gap y5 - y4 stays at most 40 over [0,100] s", "chasing_cars",
     "G[0,100] (y5 - y4 <= 40)", kCcPushForward, kCcBox, 40.0},
    {"CC2", "gap y5 - y4 reaches 15 within every 30 s window starting in [0,70] s",
     "chasing_cars", "G[0,70] F[0,30] (y5 - y4 >= 15)",
     "scale(max(throttle,[0,100]),[0,1]) - scale(min(brake,[0,100]),[0,1])", kCcBox, 15.0},
    {"CC3", "over [0,80] s: y2 - y1 stays at most 20 for 20 s, or y5 - y4 reaches 40 within 20 s",
     "chasing_cars", "G[0,80] ((G[0,20] (y2 - y1 <= 20)) or (F[0,20] (y5 - y4 >= 40)))",
     kCcPushForward, kCcBox, 20.0},
    {"CC4", "from every instant in [0,65] s, y5 - y4 holds at least 8 for 20 s within 30 s",
     "chasing_cars", "G[0,65] F[0,30] G[0,20] (y5 - y4 >= 8)", "scale(min(y5 - y4,[0,100]),[0,20])",
     kCcBox, 8.0},
    {"CC5", "a 5 s stretch of y2 - y1 >= 9 is followed by y5 - y4 >= 9 over [5,20] s",
     "chasing_cars", "G[0,72] F[0,8] ((G[0,5] (y2 - y1 >= 9)) -> (G[5,20] (y5 - y4 >= 9)))",
     "target(scale(mean(throttle,[0,33]),[0,1]), 0.3) - scale(mean(brake,[0,50]),[0,1])", kCcBox,
     9.0},
    {"CCx", "all consecutive gaps exceed 7.5 over [0,50] s", "chasing_cars",
     "G[0,50] (y2 - y1 > 7.5) and G[0,50] (y3 - y2 > 7.5) and G[0,50] (y4 - y3 > 7.5) and "
     "G[0,50] (y5 - y4 > 7.5)",
     "scale(at(throttle,17),[0,1]) - scale(at(throttle,0),[0,1])", kCcBox, 7.5},
};

const std::vector<CatalogEntry>& entries() {
  static const std::vector<CatalogEntry> built = [] {
    std::vector<CatalogEntry> out;
    for (const RawEntry& raw : kRawCatalog) {
      stl::Formula formula = stl::parse(raw.formula);
      const auto plant = models::builtin(raw.plant);
      Assumption assumption = parse_assumption(raw.assumption);
      assumption.validate(plant->ports());
      const double horizon = std::max(plant->default_horizon(), stl::horizon(formula));
      out.push_back(CatalogEntry{raw.id, raw.description, raw.plant, raw.formula, raw.manual,
                                 std::move(formula), parse_manual(raw.manual),
                                 std::move(assumption), raw.auto_scale, horizon});
    }
    return out;
  }();
  return built;
}

}  // namespace

const CatalogEntry& catalog(std::string_view id) {
  for (const CatalogEntry& e : entries()) {
    if (e.id == id) return e;
  }
  throw NotFound(fmt::format("unknown requirement '{}'", id));
}

std::vector<std::string> catalog_ids() {
  std::vector<std::string> ids;
  for (const CatalogEntry& e : entries()) ids.push_back(e.id);
  return ids;
}

}  // namespace athena::fitness
