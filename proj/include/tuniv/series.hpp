#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tuniv/approx.hpp"
#include "tuniv/polynomial.hpp"
#include "tuniv/rational.hpp"

namespace tuniv {

/// Concrete witness for one universality task: the chosen indices, the scale
/// a_k and anchor b_{nlp} they decode to, the placed window and the measured
/// errors. Everything needed to re-verify independently.
struct Witness {
  std::size_t task_index = 0;

  // Membership indices. p == 0 / l == 0 mark explicit-route tasks (explicit
  // boundary point or explicit curve parameter instead of enumerated ones).
  std::uint64_t m = 1;
  bigint target_index = 0;  // j; 0 when the target was given explicitly
  std::uint64_t p = 0;
  std::uint64_t s = 1;
  std::uint64_t t = 1;
  std::uint64_t l = 0;
  std::uint64_t k = 0;
  std::uint64_t n = 0;

  std::optional<double> curve_alpha;  // explicit-curve route
  std::optional<std::vector<cplx>> target_coeffs;

  double a = 0.0;
  cplx b;
  cplx zeta;
  Disk window;
  double delta = 0.0;          // boundary clearance used at placement
  double achieved_error = 0.0; // control sup error in task coordinates
  double b_dist = 0.0;         // |b - zeta|
  int fit_degree = 0;
  int control_n = 0;
  double control_phase = 0.0;
};

/// Perturbation-budget ledger of one build: the shared tail budget T, the
/// per-step near-zero tolerances tau_i and what each completed task has had
/// debited from its slack since completion.
struct BudgetLedger {
  double tail_budget = 0.0;            // T = min over tasks of 1/(4s)
  std::vector<double> step_tau;        // tau_i = T 2^{-i}, by step
  std::vector<double> slack_budget;    // per task: 1/(4s)
  std::vector<double> slack_consumed;  // per task: sum of later tau_i
};

/// Ordered list of correction polynomials with their witnesses and budgets.
/// Evaluation is the plain sum of corrections; the terms are never merged, so
/// termwise bookkeeping (as in the difference decomposition) stays exact.
struct UniversalSeries {
  std::string family_name = "radii";
  std::vector<Polynomial> corrections;
  std::vector<Witness> witnesses;
  BudgetLedger budgets;

  cplx eval(cplx z) const {
    cplx acc(0.0, 0.0);
    for (const auto& q : corrections) acc += q.eval(z);
    return acc;
  }

  cplx deriv(cplx z) const {
    cplx acc(0.0, 0.0);
    for (const auto& q : corrections) acc += q.deriv(z);
    return acc;
  }

  EvalFn evaluator() const {
    return [this](cplx z) { return eval(z); };
  }
};

}  // namespace tuniv
