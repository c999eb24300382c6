#include "evschema/softlogic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "evschema/error.hpp"

namespace evschema {

std::string Atom::to_string() const {
  std::string out = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i];
  return out + ")";
}

void SoftLogicProgram::check() const {
  std::set<Atom> open(targets.begin(), targets.end());
  if (open.size() != targets.size()) throw PreconditionError("duplicate target atom");
  for (const auto& t : targets)
    if (observed.contains(t))
      throw PreconditionError("atom " + t.to_string() + " is both observed and a target");
  const auto known = [&](const Atom& a) { return open.contains(a) || observed.contains(a); };
  for (const auto& r : rules) {
    if (!(r.weight > 0.0)) throw PreconditionError("rule weight must be positive");
    if (r.body.empty()) throw PreconditionError("rule with empty body");
    for (const auto& a : r.body)
      if (!known(a)) throw PreconditionError("rule mentions unknown atom " + a.to_string());
    if (r.head && !known(*r.head))
      throw PreconditionError("rule mentions unknown atom " + r.head->to_string());
  }
}

double lukasiewicz_and(const std::vector<double>& truths) {
  double s = 0.0;
  for (double t : truths) s += t;
  return std::max(0.0, s - (static_cast<double>(truths.size()) - 1.0));
}

double hinge_objective(const SoftLogicProgram& program, const std::map<Atom, double>& assignment) {
  const auto truth = [&](const Atom& a) {
    if (auto it = program.observed.find(a); it != program.observed.end()) return it->second;
    return assignment.at(a);
  };
  double f = 0.0;
  for (const auto& r : program.rules) {
    std::vector<double> b;
    b.reserve(r.body.size());
    for (const auto& a : r.body) b.push_back(truth(a));
    const double head = r.head ? truth(*r.head) : 0.0;
    f += r.weight * std::max(0.0, lukasiewicz_and(b) - head);
  }
  return f;
}

namespace {

// Each potential is weight * max(0, sum_k coef_k * x_k + offset). Because
// head truths are >= 0, max(0, max(0, L) - h) == max(0, L - h).
struct Potential {
  double weight;
  double offset;
  std::vector<std::pair<std::size_t, double>> coefs;
};

struct Compiled {
  double constant = 0.0;  // potentials without open atoms
  std::vector<Potential> potentials;
  std::vector<std::vector<std::size_t>> touching;     // var -> potentials
  std::vector<std::vector<std::size_t>> propagation;  // var -> var plus heads fed by it
};

Compiled compile(const SoftLogicProgram& p, const std::map<Atom, std::size_t>& var) {
  Compiled c;
  c.touching.resize(var.size());
  std::vector<std::set<std::size_t>> feeds(var.size());
  for (const auto& r : p.rules) {
    Potential pot{r.weight, -(static_cast<double>(r.body.size()) - 1.0), {}};
    std::map<std::size_t, double> coef;
    std::vector<std::size_t> body_vars;
    for (const auto& a : r.body) {
      if (auto it = var.find(a); it != var.end()) {
        coef[it->second] += 1.0;
        body_vars.push_back(it->second);
      } else {
        pot.offset += p.observed.at(a);
      }
    }
    if (r.head) {
      if (auto it = var.find(*r.head); it != var.end()) {
        coef[it->second] -= 1.0;
        for (auto b : body_vars) feeds[b].insert(it->second);
      } else {
        pot.offset -= p.observed.at(*r.head);
      }
    }
    for (auto [v, k] : coef)
      if (k != 0.0) pot.coefs.emplace_back(v, k);
    if (pot.coefs.empty()) {
      c.constant += pot.weight * std::max(0.0, pot.offset);
      continue;
    }
    const std::size_t id = c.potentials.size();
    for (auto [v, _] : pot.coefs) c.touching[v].push_back(id);
    c.potentials.push_back(std::move(pot));
  }
  // Closure: moving a variable drags along everything it (transitively) feeds.
  c.propagation.resize(var.size());
  for (std::size_t v = 0; v < var.size(); ++v) {
    if (feeds[v].empty()) continue;
    std::set<std::size_t> seen{v};
    std::vector<std::size_t> frontier{v};
    while (!frontier.empty()) {
      const std::size_t u = frontier.back();
      frontier.pop_back();
      for (auto h : feeds[u])
        if (seen.insert(h).second) frontier.push_back(h);
    }
    c.propagation[v].assign(seen.begin(), seen.end());
  }
  return c;
}

double evaluate(const Compiled& c, const std::vector<double>& x) {
  double f = c.constant;
  for (const auto& pot : c.potentials) {
    double z = pot.offset;
    for (auto [v, k] : pot.coefs) z += k * x[v];
    f += pot.weight * std::max(0.0, z);
  }
  return f;
}

// argmin over t in [lo, hi] of sum_i w_i * max(0, slope_i * t + icpt_i); lo <= 0 <= hi.
// Among minimizers, returns the one closest to 0 (the current point).
struct Line {
  double w, slope, icpt;
};

double minimize_line(const std::vector<Line>& lines, double lo, double hi) {
  struct Kink {
    double t, inc;
  };
  std::vector<Kink> kinks;
  double slope = 0.0;  // right derivative just after lo
  for (const auto& l : lines) {
    if (l.slope == 0.0) continue;
    const double z = l.slope * lo + l.icpt;
    if (z > 0.0 || (z == 0.0 && l.slope > 0.0)) slope += l.w * l.slope;
    const double bp = -l.icpt / l.slope;
    if (bp > lo && bp < hi) kinks.push_back({bp, l.w * std::abs(l.slope)});
  }
  std::sort(kinks.begin(), kinks.end(), [](const Kink& a, const Kink& b) { return a.t < b.t; });

  // Flat optimal interval [best_lo, best_hi].
  double best_lo = hi, best_hi = hi;
  double s = slope;
  double at = lo;
  std::size_t k = 0;
  bool found_lo = false;
  while (true) {
    if (!found_lo && s >= 0.0) {
      best_lo = at;
      found_lo = true;
    }
    if (found_lo && s > 0.0) {
      best_hi = at;
      break;
    }
    if (k == kinks.size()) break;
    at = kinks[k].t;
    while (k < kinks.size() && kinks[k].t == at) s += kinks[k++].inc;
  }
  if (!found_lo) return hi;
  return std::clamp(0.0, best_lo, best_hi);
}

// Exact line search from x along direction d (entries +1 on `dir_vars`).
bool line_step(const Compiled& c, std::vector<double>& x, const std::vector<std::size_t>& dir_vars) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (auto v : dir_vars) {
    lo = std::max(lo, -x[v]);
    hi = std::min(hi, 1.0 - x[v]);
  }
  if (!(hi > lo)) return false;

  std::set<std::size_t> pots;
  for (auto v : dir_vars) pots.insert(c.touching[v].begin(), c.touching[v].end());
  std::vector<Line> lines;
  lines.reserve(pots.size());
  for (auto id : pots) {
    const auto& pot = c.potentials[id];
    double z = pot.offset, sl = 0.0;
    for (auto [v, k] : pot.coefs) {
      z += k * x[v];
      if (std::binary_search(dir_vars.begin(), dir_vars.end(), v)) sl += k;
    }
    lines.push_back({pot.weight, sl, z});
  }
  const double t = minimize_line(lines, lo, hi);
  if (t == 0.0) return false;
  for (auto v : dir_vars) x[v] = std::clamp(x[v] + t, 0.0, 1.0);
  return true;
}

}  // namespace

SolveResult solve(const SoftLogicProgram& program, const SolverOptions& options) {
  program.check();
  std::map<Atom, std::size_t> var;
  for (std::size_t i = 0; i < program.targets.size(); ++i) var.emplace(program.targets[i], i);
  const Compiled c = compile(program, var);

  std::vector<double> x(program.targets.size(), 0.0);
  SolveResult result;
  double f = evaluate(c, x);
  result.objective_history.push_back(f);
  while (result.iterations < options.max_iterations) {
    ++result.iterations;
    for (std::size_t v = 0; v < x.size(); ++v) line_step(c, x, {v});
    for (std::size_t v = 0; v < x.size(); ++v)
      if (!c.propagation[v].empty()) line_step(c, x, c.propagation[v]);
    const double next = evaluate(c, x);
    result.objective_history.push_back(next);
    const double improvement = f - next;
    f = next;
    if (improvement < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.objective = hinge_objective(program, [&] {
    std::map<Atom, double> a;
    for (std::size_t i = 0; i < x.size(); ++i) a.emplace(program.targets[i], x[i]);
    result.truths = a;
    return a;
  }());
  return result;
}

}  // namespace evschema
