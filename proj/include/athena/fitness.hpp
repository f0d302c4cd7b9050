#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "athena/assumption.hpp"
#include "athena/signals.hpp"
#include "athena/stl.hpp"
#include "athena/trace.hpp"

namespace athena::fitness {

using ControlPointMap = std::map<std::string, ControlPoints>;

/// Engineer-defined fitness term tree. Immutable; copies share structure.
///
/// Text syntax (whitespace-insensitive):
///
///     expr   := term (('+' | '-') term)*
///     term   := factor ('*' factor)*
///     factor := number | '-' factor | '(' expr ')'
///             | ('mean'|'min'|'max'|'ptp') '(' signal ',' window ')'
///             | ('slope_pos'|'slope_neg') '(' channel ',' window ')'
///             | 'at' '(' channel ',' number ')'
///             | 'scale' '(' expr ',' '[' number ',' number ']' ')'
///             | 'target' '(' expr ',' number ')'
///     window := '[' number ',' number ']'
///
/// `signal` is a linear channel expression as in formulas (e.g. `y5 - y4`).
class ManualExpr {
 public:
  struct Node;

  explicit ManualExpr(Node node);

  const Node& node() const noexcept { return *node_; }
  bool operator==(const ManualExpr& other) const;

 private:
  std::shared_ptr<const Node> node_;
};

struct Constant {
  double value;
  bool operator==(const Constant&) const = default;
};
struct WindowStatTerm {
  stl::Expr signal;
  Stat stat;
  Window window;
  bool operator==(const WindowStatTerm& o) const {
    return signal == o.signal && stat == o.stat && window.begin == o.window.begin &&
           window.end == o.window.end;
  }
};
/// Steepest slope between consecutive control points of an input channel.
/// Falls back to the sampled channel when no control points are supplied.
struct SlopeTerm {
  std::string channel;
  SlopeDirection direction;
  Window window;
  bool operator==(const SlopeTerm& o) const {
    return channel == o.channel && direction == o.direction && window.begin == o.window.begin &&
           window.end == o.window.end;
  }
};
/// Channel value at the grid sample nearest to `time`.
struct AtTerm {
  std::string channel;
  double time;
  bool operator==(const AtTerm&) const = default;
};
struct ScaleTerm {
  ManualExpr operand;
  double lo, hi;
  bool operator==(const ScaleTerm&) const = default;
};
/// |operand - target|
struct TargetTerm {
  ManualExpr operand;
  double target;
  bool operator==(const TargetTerm&) const = default;
};
struct Negate {
  ManualExpr operand;
  bool operator==(const Negate&) const = default;
};
enum class BinaryOp { Add, Sub, Mul };
struct Binary {
  BinaryOp op;
  ManualExpr lhs, rhs;
  bool operator==(const Binary&) const = default;
};

struct ManualExpr::Node {
  std::variant<Constant, WindowStatTerm, SlopeTerm, AtTerm, ScaleTerm, TargetTerm, Negate, Binary>
      value;
  bool operator==(const Node&) const = default;
};

ManualExpr parse_manual(std::string_view text);
std::string to_string(const ManualExpr& expr);
std::set<std::string> channels(const ManualExpr& expr);

/// Evaluates the expression as written. Throws MissingChannel or
/// InvalidArgument (bad window).
double manual_fitness(const ManualExpr& expr, const Trace& trace,
                      const ControlPointMap* control_points = nullptr);

/// clamp(robustness / auto_scale, -1, 1).
double auto_fitness(const stl::Formula& formula, const Trace& trace, double auto_scale);

/// p * fa + (1 - p) * fm
double athena_combine(double fa, double fm, double p);

/// Linear change of p from `start` at the first iteration to `end` at the last.
struct PSchedule {
  double start;
  double end;
};

/// Everything needed to score a trace: the requirement, the manual term, the
/// weight p (or a schedule for it), the robustness normaliser and the
/// robustness threshold below which the search stops.
class FitnessAssessment {
 public:
  FitnessAssessment(stl::Formula formula, ManualExpr manual, double p, double auto_scale,
                    std::optional<PSchedule> schedule = std::nullopt, double threshold = 0.0);

  const stl::Formula& formula() const noexcept { return formula_; }
  const ManualExpr& manual() const noexcept { return manual_; }
  double p() const noexcept { return p_; }
  double auto_scale() const noexcept { return auto_scale_; }
  const std::optional<PSchedule>& schedule() const noexcept { return schedule_; }
  double threshold() const noexcept { return threshold_; }

  double effective_p(std::size_t iteration, std::size_t max_iterations) const;

 private:
  stl::Formula formula_;
  ManualExpr manual_;
  double p_;
  double auto_scale_;
  std::optional<PSchedule> schedule_;
  double threshold_;
};

struct FitnessValue {
  double automatic = 0.0;
  double manual = 0.0;
  double combined = 0.0;
  double robustness = 0.0;  // unscaled
  double p = 0.0;           // effective weight used for `combined`
  bool stop = false;        // robustness < threshold
};

FitnessValue assess(const FitnessAssessment& cfg, const Trace& trace, std::size_t iteration,
                    std::size_t max_iterations, const ControlPointMap* control_points = nullptr);

/// A shipped requirement with its plant, search box and manual fitness.
struct CatalogEntry {
  std::string id;
  std::string description;
  std::string plant;
  std::string formula_text;
  std::string manual_text;
  stl::Formula formula;
  ManualExpr manual;
  Assumption assumption;
  double auto_scale;
  /// Simulation horizon: the plant's, extended when the formula looks further.
  double horizon;
};

/// Throws NotFound for unknown ids.
const CatalogEntry& catalog(std::string_view id);
std::vector<std::string> catalog_ids();

}  // namespace athena::fitness
