#ifndef RATL_PLANNER_HPP
#define RATL_PLANNER_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "ratl/contracts.hpp"
#include "ratl/environment.hpp"
#include "ratl/exec.hpp"
#include "ratl/policy.hpp"

namespace ratl {

// Value of a plan together with a certified bound on everything the finite
// horizon cut off: the true infinite-horizon value lies in
// [value, value + tail_bound].
struct ValueResult {
    double value = 0.0;
    double tail_bound = 0.0;
};

struct PlanResult {
    double value = 0.0;
    Policy policy;
    double tail_bound = 0.0;
};

// One hypothesis inside an expectimax ensemble: an environment, the state
// distribution it is in, a linear coefficient, and the discount factor its
// next reward carries (gamma^t for a hypothesis at interaction step t).
// A singleton ensemble plans in one environment; the mixture agent plans
// with one member per surviving environment.
struct EnsembleMember {
    const Environment* env = nullptr;
    StateDistribution dist;
    double weight = 1.0;
    double discount_pow = 1.0;
};

// Sum over members of weight * expected discounted reward under pi.
double ensemble_policy_value(std::span<const EnsembleMember> members,
                             const Policy& pi, ExecMode exec = default_exec_mode());

// Depth-limited expectimax over the ensemble: maximizes the weighted sum,
// breaking ties toward the lowest action index. Returns the optimal policy
// tree when want_policy is set (tail_bound is left 0; bounds are the
// caller's business since members may carry different envelopes).
PlanResult ensemble_best(std::span<const EnsembleMember> members,
                         std::size_t horizon, ExecMode exec = default_exec_mode(),
                         bool want_policy = true);

// Expected discounted reward of pi in env from interaction step from_step,
// conditioned on the history h (from_step must equal h.size()).
ValueResult value_of_policy(const Environment& env, const Policy& pi,
                            std::size_t from_step, const HistoryRecord& h,
                            ExecMode exec = default_exec_mode());

// Depth-limited optimal plan in a single environment.
PlanResult optimal_value(const Environment& env, std::size_t from_step,
                         const HistoryRecord& h, std::size_t horizon,
                         ExecMode exec = default_exec_mode());

// Smallest horizon whose tail bound (from step 0) is at most eps.
std::size_t horizon_for_tolerance(const Environment& env, double eps);

// Comparing two candidate plans priced by possibly different beliefs.
enum class Preference { first, second, either };

Preference choose_active(const Belief& p, const Contract& x, const Belief& q,
                         const Contract& y);

// Index of the contract with the highest expectation under its own belief;
// ties go to the lowest index.
std::size_t best_action(std::span<const Belief> beliefs,
                        std::span<const Contract> contracts);

}  // namespace ratl

#endif
