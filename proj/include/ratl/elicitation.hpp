#ifndef RATL_ELICITATION_HPP
#define RATL_ELICITATION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ratl/contracts.hpp"
#include "ratl/exec.hpp"

namespace ratl {

// Recovers the implicit belief of a black-box rational decision maker by
// probing payoff-ratio contracts e_i - t*e_r and bisecting on the accept /
// reject flip. max_queries == 0 selects the budget 64 * m * log2(1/tol).
//
// Throws irrationality_error (with a witness in the message) when probes
// contradict the axioms, budget_error when the query budget runs out.
Belief elicit_beliefs(const DecisionMaker& dm, std::size_t alphabet_size,
                      double tol = 1e-6, std::uint64_t max_queries = 0,
                      ExecMode exec = default_exec_mode());

std::uint64_t elicit_query_budget(std::size_t alphabet_size, double tol);

struct SeparationResult {
    bool feasible = false;
    std::optional<Belief> belief;  // set when feasible
    // most negative constraint slack of the returned belief (>= -1e-9 when
    // feasible); for infeasible instances the phase-1 residual
    double certificate = 0.0;
};

// Finds a normalized belief p >= 0 with p.x >= 0 for every accepted contract
// and p.y <= 0 for every rejected one, or reports that no half space through
// the origin explains the labels. alphabet_size may be 0 when at least one
// contract is given; with both lists empty it sizes the uniform result.
SeparationResult separate_labeled(const std::vector<Contract>& accepted,
                                  const std::vector<Contract>& rejected,
                                  std::size_t alphabet_size = 0);

// Fraction of n random contracts (entries uniform in [-1,1]) on which
// decide(b,.) and dm agree; either matches anything.
double cross_validate(const DecisionMaker& dm, const Belief& b, std::size_t n,
                      double tol, std::uint64_t seed,
                      ExecMode exec = default_exec_mode());

}  // namespace ratl

#endif
