#ifndef RATL_ENVIRONMENT_HPP
#define RATL_ENVIRONMENT_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ratl/errors.hpp"

namespace ratl {

// One interaction step: the agent played action, saw percept, and collected
// reward (already time-discounted by the environment's envelope).
struct HistoryStep {
    std::size_t action = 0;
    std::size_t percept = 0;
    double reward = 0.0;
};

class HistoryRecord {
public:
    HistoryRecord() = default;
    explicit HistoryRecord(std::vector<HistoryStep> steps) : steps_(std::move(steps)) {}

    std::size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    const HistoryStep& operator[](std::size_t t) const { return steps_[t]; }
    void push_back(HistoryStep s) { steps_.push_back(s); }

    std::vector<std::size_t> actions() const;
    std::vector<std::size_t> percepts() const;

private:
    std::vector<HistoryStep> steps_;
};

// Belief over environment states, used when percepts identify the state only
// partially.
using StateDistribution = std::vector<double>;

// Finite-state reactive environment. A transition branch declares a base
// reward in [0, reward_cap]; the reward emitted at interaction step t is
// base * discount^t, which keeps per-step rewards inside the declared
// envelope and the total below reward_cap / (1 - discount) under any policy.
class Environment {
public:
    struct Branch {
        std::size_t percept = 0;
        double reward = 0.0;  // base reward, before discounting
        std::size_t next_state = 0;
        double prob = 1.0;
    };

    Environment(std::string id, std::size_t num_states, std::size_t num_actions,
                std::size_t num_percepts, std::size_t initial_state,
                double reward_cap, double discount,
                std::vector<std::vector<std::vector<Branch>>> transitions);

    const std::string& id() const { return id_; }
    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    std::size_t num_percepts() const { return num_percepts_; }
    std::size_t initial_state() const { return initial_state_; }
    double reward_cap() const { return reward_cap_; }
    double discount() const { return discount_; }
    bool deterministic() const { return deterministic_; }

    const std::vector<Branch>& branches(std::size_t state, std::size_t action) const;

    // Unique branch of a deterministic environment.
    const Branch& step(std::size_t state, std::size_t action) const;
    const Branch& sample_step(std::size_t state, std::size_t action,
                              std::mt19937_64& rng) const;

    // Percept-conditional transition over a state distribution. Returns the
    // percept mass P(percept | dist, action); reward_out accumulates the
    // mass-weighted expected base reward and next_out the unnormalized
    // posterior state distribution.
    double observe(std::span<const double> dist, std::size_t action,
                   std::size_t percept, double& reward_out,
                   StateDistribution& next_out) const;

    // Probability that the environment would emit these percepts given the
    // actions (1 or 0 for deterministic environments).
    double prefix_probability(std::span<const std::size_t> actions,
                              std::span<const std::size_t> percepts) const;

    // I(h, env): could this environment have produced h's percepts?
    bool consistent(const HistoryRecord& h) const;

    // Posterior state distribution after h, or nullopt when inconsistent.
    std::optional<StateDistribution> filter(const HistoryRecord& h) const;

    StateDistribution initial_distribution() const;

    // total reward beyond the first `horizon` steps, starting at step
    // `from_step`, is at most this
    double tail_bound(std::size_t from_step, std::size_t horizon) const;

    void write(std::ostream& os) const;
    static Environment read(std::istream& is);
    static Environment load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::string id_;
    std::size_t num_states_;
    std::size_t num_actions_;
    std::size_t num_percepts_;
    std::size_t initial_state_;
    double reward_cap_;
    double discount_;
    bool deterministic_ = true;
    // [state][action] -> branches
    std::vector<std::vector<std::vector<Branch>>> transitions_;
};

}  // namespace ratl

#endif
