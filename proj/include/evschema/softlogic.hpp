#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evschema {

struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
  std::string to_string() const;
};

inline constexpr double kStepRuleWeight = 100.0;
inline constexpr double kSchemaRuleWeight = 10.0;
inline constexpr double kNegativePriorWeight = 1.0;

/// Weighted implication body -> head. A missing head is the constant false,
/// which turns the rule into a negative prior on the body.
struct GroundRule {
  std::vector<Atom> body;
  std::optional<Atom> head;
  double weight = 1.0;

  bool operator==(const GroundRule&) const = default;
};

struct SoftLogicProgram {
  std::map<Atom, double> observed;  // closed atoms with fixed truth
  std::vector<Atom> targets;        // open atoms, each solved in [0,1]
  std::vector<GroundRule> rules;
  bool truncated = false;           // grounding hit its enumeration cap

  /// Throws PreconditionError if an atom is both observed and a target, a
  /// rule mentions an unknown atom, or a weight is not positive.
  void check() const;
};

struct SolverOptions {
  double tolerance = 1e-4;
  std::size_t max_iterations = 5000;
};

struct SolveResult {
  std::map<Atom, double> truths;  // every target
  std::size_t iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::vector<double> objective_history;  // after each iteration, starting at x = 0
};

/// Lukasiewicz conjunction: max(0, sum - (n - 1)).
double lukasiewicz_and(const std::vector<double>& truths);

/// sum over rules of weight * max(0, and(body) - truth(head)), truths taken
/// from `observed` or `assignment`.
double hinge_objective(const SoftLogicProgram& program, const std::map<Atom, double>& assignment);

/// Minimizes the hinge objective over the box [0,1]^targets. Each iteration
/// runs an exact line search along every coordinate, then along each
/// variable's rule-propagation direction (the variable together with the
/// heads it feeds). Every step is an exact 1-D minimization, so the
/// objective never increases.
SolveResult solve(const SoftLogicProgram& program, const SolverOptions& options = {});

}  // namespace evschema
