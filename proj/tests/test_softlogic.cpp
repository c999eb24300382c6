#include <doctest.h>

#include <random>

#include "evschema/error.hpp"
#include "evschema/softlogic.hpp"
#include "oracles/grid_solver.hpp"

using namespace evschema;

namespace {

Atom at(const std::string& p) { return {p, {"x"}}; }

// A & B -> C with weight w, prior 1 on C.
SoftLogicProgram implication(double a, double b, double w = 100.0) {
  SoftLogicProgram p;
  p.observed = {{at("A"), a}, {at("B"), b}};
  p.targets = {at("C")};
  p.rules = {{{at("A"), at("B")}, at("C"), w}, {{at("C")}, std::nullopt, 1.0}};
  return p;
}

// Two steps feeding a schema atom, as in the remote-teaching encoding.
SoftLogicProgram two_step(double e1, double r1, double e2, double r2) {
  SoftLogicProgram p;
  p.observed = {{at("Lecture"), e1}, {at("Lecture/Agent"), r1}, {at("Seminar"), e2}, {at("Seminar/Agent"), r2}};
  p.targets = {at("step1"), at("step2"), at("schema")};
  p.rules = {{{at("Lecture"), at("Lecture/Agent")}, at("step1"), 100.0},
             {{at("Seminar"), at("Seminar/Agent")}, at("step2"), 100.0},
             {{at("step1"), at("step2")}, at("schema"), 10.0}};
  for (const auto& t : p.targets) p.rules.push_back({{t}, std::nullopt, 1.0});
  return p;
}

SoftLogicProgram random_program(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SoftLogicProgram p;
  const int n_obs = 2 + static_cast<int>(gen() % 3);
  for (int i = 0; i < n_obs; ++i) p.observed[at("o" + std::to_string(i))] = u(gen);
  const int n_open = 1 + static_cast<int>(gen() % 3);
  for (int i = 0; i < n_open; ++i) p.targets.push_back(at("t" + std::to_string(i)));
  std::vector<Atom> all;
  for (const auto& [a, _] : p.observed) all.push_back(a);
  for (int i = 0; i < n_open; ++i) {
    std::vector<Atom> body;
    for (const auto& a : all)
      if (gen() % 2) body.push_back(a);
    if (body.empty()) body.push_back(all[0]);
    const double w = std::vector<double>{1.0, 10.0, 100.0}[gen() % 3];
    p.rules.push_back({body, p.targets[i], w});
    p.rules.push_back({{p.targets[i]}, std::nullopt, 1.0});
    all.push_back(p.targets[i]);
  }
  return p;
}

}  // namespace

TEST_CASE("lukasiewicz conjunction") {
  CHECK(lukasiewicz_and({1.0, 1.0}) == 1.0);
  CHECK(lukasiewicz_and({0.8, 0.9}) == doctest::Approx(0.7));
  CHECK(lukasiewicz_and({0.3, 0.4}) == 0.0);
  CHECK(lukasiewicz_and({0.6}) == 0.6);
}

TEST_CASE("a heavy implication carries its body truth to the head") {
  const SolveResult r = solve(implication(1.0, 1.0));
  CHECK(r.truths.at(at("C")) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.converged);
  CHECK(solve(implication(0.0, 1.0)).truths.at(at("C")) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(solve(implication(0.9, 0.8)).truths.at(at("C")) == doctest::Approx(0.7).epsilon(1e-3));
  // With the prior heavier than the rule the head stays at 0.
  CHECK(solve(implication(1.0, 1.0, 0.5)).truths.at(at("C")) == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("two-step chain against an exhaustive grid minimum") {
  const SoftLogicProgram p = two_step(1.0, 1.0, 1.0, 1.0);
  const SolveResult r = solve(p);
  CHECK(r.truths.at(at("schema")) >= 0.99);
  const auto grid = oracle::grid_minimize(p);
  CHECK(r.objective == doctest::Approx(hinge_objective(p, grid)).epsilon(1e-6));
  for (const auto& t : p.targets) CHECK(r.truths.at(t) == doctest::Approx(grid.at(t)).epsilon(1e-3));
}

TEST_CASE("property: solver reaches the grid optimum on random small programs") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 60; ++trial) {
    const SoftLogicProgram p = random_program(gen);
    p.check();
    const SolveResult r = solve(p);
    const double best = hinge_objective(p, oracle::grid_minimize(p));
    CHECK(r.objective <= best + 1e-3);
    CHECK(r.objective == doctest::Approx(hinge_objective(p, r.truths)).epsilon(1e-9));
    for (const auto& [a, v] : r.truths) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
      CHECK(r.objective_history[i] <= r.objective_history[i - 1] + 1e-12);
  }
}

TEST_CASE("property: raising an observed confidence never lowers the schema atom") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double v[4] = {u(gen), u(gen), u(gen), u(gen)};
    const double before = solve(two_step(v[0], v[1], v[2], v[3])).truths.at(at("schema"));
    const int k = static_cast<int>(gen() % 4);
    v[k] = v[k] + (1.0 - v[k]) * u(gen);
    const double after = solve(two_step(v[0], v[1], v[2], v[3])).truths.at(at("schema"));
    CHECK(after >= before - 1e-6);
  }
}

TEST_CASE("program checks") {
  SoftLogicProgram p = implication(1.0, 1.0);
  p.observed[at("C")] = 0.5;
  CHECK_THROWS_AS(p.check(), PreconditionError);
  p = implication(1.0, 1.0);
  p.rules[0].weight = 0.0;
  CHECK_THROWS_AS(p.check(), PreconditionError);
  p = implication(1.0, 1.0);
  p.rules[0].body.push_back(at("Z"));
  CHECK_THROWS_AS(p.check(), PreconditionError);
  CHECK_THROWS_AS(solve(p), PreconditionError);
}

TEST_CASE("iteration cap is reported, not thrown") {
  const SolveResult r = solve(two_step(1.0, 1.0, 1.0, 1.0), SolverOptions{0.0, 1});
  CHECK(r.iterations == 1);
  CHECK_FALSE(r.converged);
}
