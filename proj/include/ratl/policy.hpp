#ifndef RATL_POLICY_HPP
#define RATL_POLICY_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ratl/errors.hpp"

namespace ratl {

// Finite-horizon plan: a tree indexed by the percepts seen so far, holding
// one action per node. Branches a planner never expanded (because they have
// zero probability under its model) fall back to action 0, which keeps the
// policy total without storing the full percept tree.
class Policy {
public:
    struct Node {
        std::size_t action = 0;
        // child index per percept, -1 for an unexpanded branch
        std::vector<int> children;
    };

    Policy() = default;
    Policy(std::vector<Node> nodes, std::size_t horizon, std::size_t num_percepts);

    static Policy constant(std::size_t action, std::size_t horizon,
                           std::size_t num_percepts);

    // Complete tree from breadth-first action labels; used to enumerate
    // every depth-h policy over small alphabets.
    static Policy from_bfs_actions(std::span<const std::size_t> actions,
                                   std::size_t horizon, std::size_t num_percepts);

    static std::size_t complete_tree_size(std::size_t horizon, std::size_t num_percepts);

    std::size_t horizon() const { return horizon_; }
    std::size_t num_percepts() const { return num_percepts_; }
    bool empty() const { return nodes_.empty(); }
    std::size_t num_nodes() const { return nodes_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }

    // Action after seeing these percepts (from the policy's root). Length
    // must stay below the horizon.
    std::size_t action_at(std::span<const std::size_t> percepts) const;

    std::string str() const;

private:
    std::vector<Node> nodes_;  // nodes_[0] is the root when non-empty
    std::size_t horizon_ = 0;
    std::size_t num_percepts_ = 1;
};

}  // namespace ratl

#endif
