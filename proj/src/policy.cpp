#include "ratl/policy.hpp"

#include <sstream>

namespace ratl {

Policy::Policy(std::vector<Node> nodes, std::size_t horizon, std::size_t num_percepts)
    : nodes_(std::move(nodes)), horizon_(horizon), num_percepts_(num_percepts) {
    if (num_percepts_ == 0) throw precondition_error("policy needs at least one percept");
    if (horizon_ == 0 && !nodes_.empty())
        throw precondition_error("horizon-zero policy cannot have nodes");
    if (horizon_ > 0 && nodes_.empty())
        throw precondition_error("positive-horizon policy needs a root node");
    for (const auto& n : nodes_) {
        if (!n.children.empty() && n.children.size() != num_percepts_)
            throw precondition_error("policy node must have one child slot per percept");
        for (int c : n.children)
            if (c != -1 && (c < 0 || std::size_t(c) >= nodes_.size()))
                throw precondition_error("policy child index out of range");
    }
}

Policy Policy::constant(std::size_t action, std::size_t horizon, std::size_t num_percepts) {
    if (horizon == 0) return Policy({}, 0, num_percepts);
    std::vector<Node> nodes(horizon);
    for (std::size_t d = 0; d < horizon; ++d) {
        nodes[d].action = action;
        if (d + 1 < horizon)
            nodes[d].children.assign(num_percepts, int(d + 1));
    }
    return Policy(std::move(nodes), horizon, num_percepts);
}

std::size_t Policy::complete_tree_size(std::size_t horizon, std::size_t num_percepts) {
    // 1 + P + P^2 + ... + P^(h-1); reject sizes no caller could allocate
    constexpr std::size_t cap = std::size_t{1} << 40;
    std::size_t total = 0, layer = 1;
    for (std::size_t d = 0; d < horizon; ++d) {
        total += layer;
        if (total > cap || (num_percepts > 1 && layer > cap / num_percepts))
            throw precondition_error("complete policy tree would be too large");
        layer *= num_percepts;
    }
    return total;
}

Policy Policy::from_bfs_actions(std::span<const std::size_t> actions,
                                std::size_t horizon, std::size_t num_percepts) {
    const std::size_t want = complete_tree_size(horizon, num_percepts);
    if (actions.size() != want)
        throw dimension_error("complete depth-" + std::to_string(horizon) +
                              " tree needs " + std::to_string(want) + " actions, got " +
                              std::to_string(actions.size()));
    std::vector<Node> nodes(want);
    // breadth-first layout: node k's child for percept j sits at k*P + 1 + j
    std::size_t interior = horizon >= 1 ? complete_tree_size(horizon - 1, num_percepts) : 0;
    for (std::size_t k = 0; k < want; ++k) {
        nodes[k].action = actions[k];
        if (k < interior)
            for (std::size_t j = 0; j < num_percepts; ++j)
                nodes[k].children.push_back(int(k * num_percepts + 1 + j));
    }
    return Policy(std::move(nodes), horizon, num_percepts);
}

std::size_t Policy::action_at(std::span<const std::size_t> percepts) const {
    if (percepts.size() >= horizon_)
        throw precondition_error("percept path reaches past the policy horizon");
    int node = 0;
    for (std::size_t j : percepts) {
        if (j >= num_percepts_) throw precondition_error("percept out of range");
        const auto& children = nodes_[std::size_t(node)].children;
        int next = children.empty() ? -1 : children[j];
        if (next == -1) return 0;  // unexpanded branch: default action
        node = next;
    }
    return nodes_[std::size_t(node)].action;
}

std::string Policy::str() const {
    std::ostringstream os;
    os << "policy(horizon=" << horizon_ << ", nodes=" << nodes_.size() << ")";
    return os.str();
}

}  // namespace ratl
