#ifndef RATL_MIXTURE_HPP
#define RATL_MIXTURE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ratl/environment.hpp"
#include "ratl/exec.hpp"
#include "ratl/planner.hpp"
#include "ratl/policy.hpp"

namespace ratl {

// A finite hypothesis class: candidate environments with normalized prior
// weights. All members must expose the same action/percept interface.
class EnvironmentClass {
public:
    EnvironmentClass(std::vector<Environment> envs, std::vector<double> weights,
                     std::string id = "class");

    const std::string& id() const { return id_; }
    std::size_t size() const { return envs_.size(); }
    const Environment& env(std::size_t i) const { return envs_.at(i); }
    double weight(std::size_t i) const { return weights_.at(i); }
    std::span<const double> weights() const { return weights_; }
    std::size_t num_actions() const { return envs_.front().num_actions(); }
    std::size_t num_percepts() const { return envs_.front().num_percepts(); }

    // index of the environment with this id; throws when absent
    std::size_t find(const std::string& env_id) const;

    // Class file: optional "class <id>" line, then one "env <weight> <path>"
    // line per member with paths relative to the file's directory.
    static EnvironmentClass load(const std::string& path);

private:
    std::vector<Environment> envs_;
    std::vector<double> weights_;
    std::string id_;
};

// Posterior over a hypothesis class after a history: environments that could
// not have produced the percepts get weight zero, the survivors keep their
// prior proportions. Tracks each survivor's filtered state distribution so
// values can be conditioned without replaying the history.
class PosteriorState {
public:
    explicit PosteriorState(const EnvironmentClass& ec);

    static PosteriorState from_history(const EnvironmentClass& ec,
                                       std::span<const std::size_t> actions,
                                       std::span<const std::size_t> percepts);

    const EnvironmentClass& cls() const { return *ec_; }
    std::size_t step() const { return step_; }
    std::span<const double> posterior() const { return posterior_; }
    bool consistent(std::size_t i) const { return alive_.at(i) != 0; }
    std::size_t surviving() const;
    const StateDistribution& state_dist(std::size_t i) const;
    const std::vector<std::pair<std::size_t, std::size_t>>& history() const {
        return history_;
    }

    friend PosteriorState posterior_update(const PosteriorState& ps,
                                           std::size_t action, std::size_t percept);

private:
    const EnvironmentClass* ec_;
    std::vector<double> posterior_;
    std::vector<char> alive_;
    std::vector<StateDistribution> dists_;
    std::vector<std::pair<std::size_t, std::size_t>> history_;
    std::size_t step_ = 0;
};

// One interaction step: drop environments inconsistent with the percept and
// renormalize. Throws class_exhausted_error when nothing survives.
PosteriorState posterior_update(const PosteriorState& ps, std::size_t action,
                                std::size_t percept);

// Prior-weighted value of pi across the class, from the empty history.
double mixture_value(const EnvironmentClass& ec, const Policy& pi,
                     ExecMode exec = default_exec_mode());

// Posterior-weighted relative value sum_i p_i * V_i(pi) / V_i(best), where
// both values are taken at the posterior's step over pi's horizon.
double relative_mixture_value(const PosteriorState& ps, const Policy& pi,
                              ExecMode exec = default_exec_mode());

struct MixturePlan {
    Policy policy;
    // optimal single-environment values at the current step, one per class
    // member (0 for the inconsistent ones)
    std::vector<double> vstar;
    double objective = 0.0;  // relative value of the chosen policy
};

// The policy maximizing the posterior-weighted relative value at depth
// `horizon`, found by one expectimax pass over the surviving environments
// with coefficients p_i / V_i(best).
MixturePlan mixture_policy(const PosteriorState& ps, std::size_t horizon,
                           ExecMode exec = default_exec_mode());

struct SkillPoint {
    std::size_t step = 0;
    std::size_t action = 0;
    std::size_t percept = 0;
    double reward = 0.0;
    double w = 0.0;      // relative value of the played plan in the true environment
    double delta = 0.0;  // posterior-weighted regret sum_i p_i * (1 - w_i)
    std::size_t surviving = 0;
    double p_true = 0.0;        // posterior mass on the true environment
    std::vector<double> w_all;  // per-environment relative values (0 when dead)
};

struct SkillCurve {
    std::vector<std::string> provenance;  // emitted as leading comment lines
    std::vector<SkillPoint> points;
};

// Run the posterior-reweighting agent against one member of its own class
// for `steps` interactions, planning to depth `horizon` each step.
SkillCurve run_optimality_experiment(const EnvironmentClass& ec,
                                     const std::string& true_env_id,
                                     std::size_t steps, std::size_t horizon,
                                     std::uint64_t seed,
                                     ExecMode exec = default_exec_mode());

void write_skill_csv(const SkillCurve& sc, std::ostream& os);

}  // namespace ratl

#endif
