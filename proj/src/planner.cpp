#include "ratl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace ratl {

namespace {

// policy tree under construction; percept slots left null were never reached
struct BuildNode {
    std::size_t action = 0;
    std::vector<std::unique_ptr<BuildNode>> kids;
};

void validate_members(std::span<const EnsembleMember> members) {
    if (members.empty()) throw precondition_error("ensemble needs at least one member");
    const Environment* first = members.front().env;
    for (const auto& m : members) {
        if (m.env == nullptr) throw precondition_error("ensemble member without environment");
        if (m.env->num_actions() != first->num_actions() ||
            m.env->num_percepts() != first->num_percepts())
            throw dimension_error("ensemble members disagree on the interface");
        if (m.dist.size() != m.env->num_states())
            throw dimension_error("ensemble member state distribution has wrong length");
        if (!std::isfinite(m.weight) || m.weight < 0.0)
            throw precondition_error("ensemble member weight must be finite and non-negative");
        if (!std::isfinite(m.discount_pow) || m.discount_pow < 0.0)
            throw precondition_error("ensemble member discount power must be finite and non-negative");
    }
}

// members advanced through (action, percept); empty when no member can
// produce the percept. imm collects the discounted reward mass.
std::vector<EnsembleMember> advance(std::span<const EnsembleMember> members,
                                    std::size_t action, std::size_t percept,
                                    double& imm) {
    std::vector<EnsembleMember> next;
    imm = 0.0;
    StateDistribution scratch;
    for (const auto& m : members) {
        double rew = 0.0;
        const double mass = m.env->observe(m.dist, action, percept, rew, scratch);
        imm += m.weight * m.discount_pow * rew;
        if (mass > 0.0) {
            for (double& v : scratch) v /= mass;
            next.push_back(EnsembleMember{m.env, scratch, m.weight * mass,
                                          m.discount_pow * m.env->discount()});
        }
    }
    return next;
}

class ExpectimaxCore {
public:
    explicit ExpectimaxCore(std::size_t num_actions, std::size_t num_percepts)
        : num_actions_(num_actions), num_percepts_(num_percepts) {}

    double best(std::span<const EnsembleMember> members, std::size_t depth,
                int spawn, std::unique_ptr<BuildNode>* out) const {
        std::vector<double> q(num_actions_, 0.0);
        std::vector<std::unique_ptr<BuildNode>> cand(num_actions_);
        std::vector<std::exception_ptr> errs(num_actions_);
        if (spawn > 0) {
#pragma omp taskgroup
            {
                for (std::size_t a = 0; a < num_actions_; ++a) {
#pragma omp task default(shared) firstprivate(a)
                    {
                        try {
                            q[a] = eval_action(members, a, depth, spawn - 1,
                                               out ? &cand[a] : nullptr);
                        } catch (...) {
                            errs[a] = std::current_exception();
                        }
                    }
                }
            }
            for (auto& e : errs)
                if (e) std::rethrow_exception(e);
        } else {
            for (std::size_t a = 0; a < num_actions_; ++a)
                q[a] = eval_action(members, a, depth, 0, out ? &cand[a] : nullptr);
        }
        std::size_t pick = 0;
        for (std::size_t a = 1; a < num_actions_; ++a)
            if (q[a] > q[pick]) pick = a;  // ties keep the lowest index
        if (out) *out = std::move(cand[pick]);
        return q[pick];
    }

    double eval_action(std::span<const EnsembleMember> members, std::size_t action,
                       std::size_t depth, int spawn,
                       std::unique_ptr<BuildNode>* out) const {
        std::unique_ptr<BuildNode> node;
        if (out) {
            node = std::make_unique<BuildNode>();
            node->action = action;
            node->kids.resize(num_percepts_);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < num_percepts_; ++j) {
            double imm = 0.0;
            std::vector<EnsembleMember> child = advance(members, action, j, imm);
            if (child.empty()) continue;
            double cont = 0.0;
            if (depth > 1)
                cont = best(child, depth - 1, spawn, out ? &node->kids[j] : nullptr);
            total += imm + cont;
        }
        if (out) *out = std::move(node);
        return total;
    }

    double forced(std::span<const EnsembleMember> members, const Policy& pi,
                  int node, std::size_t depth) const {
        // node == -1 means the policy never expanded this branch: action 0 all
        // the way down
        const std::size_t action =
            node >= 0 ? pi.nodes()[std::size_t(node)].action : 0;
        double total = 0.0;
        for (std::size_t j = 0; j < num_percepts_; ++j) {
            double imm = 0.0;
            std::vector<EnsembleMember> child = advance(members, action, j, imm);
            if (child.empty()) continue;
            double cont = 0.0;
            if (depth > 1) {
                int next = -1;
                if (node >= 0) {
                    const auto& kids = pi.nodes()[std::size_t(node)].children;
                    if (!kids.empty()) next = kids[j];
                }
                cont = forced(child, pi, next, depth - 1);
            }
            total += imm + cont;
        }
        return total;
    }

private:
    std::size_t num_actions_;
    std::size_t num_percepts_;
};

// enough task levels to keep every thread fed without flooding the runtime
int spawn_levels(std::size_t depth, std::size_t num_actions, std::size_t num_percepts) {
    const double branch = double(num_actions * num_percepts);
    const double want = 16.0 * double(max_threads());
    int levels = 0;
    double tasks = 1.0;
    while (levels < int(depth) && tasks < want && levels < 6) {
        tasks *= branch;
        ++levels;
    }
    return levels;
}

Policy flatten(const BuildNode* root, std::size_t horizon, std::size_t num_percepts) {
    if (!root || horizon == 0) return Policy({}, 0, num_percepts);
    std::vector<Policy::Node> nodes;
    std::vector<const BuildNode*> queue{root};
    nodes.emplace_back();
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const BuildNode* b = queue[i];
        nodes[i].action = b->action;
        if (!b->kids.empty()) {
            nodes[i].children.assign(num_percepts, -1);
            for (std::size_t j = 0; j < num_percepts; ++j) {
                if (b->kids[j]) {
                    nodes[i].children[j] = int(queue.size());
                    queue.push_back(b->kids[j].get());
                    nodes.emplace_back();
                }
            }
        }
    }
    return Policy(std::move(nodes), horizon, num_percepts);
}

double run_best(std::span<const EnsembleMember> members, std::size_t depth,
                ExecMode exec, std::unique_ptr<BuildNode>* out) {
    const std::size_t A = members.front().env->num_actions();
    const std::size_t P = members.front().env->num_percepts();
    ExpectimaxCore core(A, P);
    if (depth == 0) return 0.0;
#ifdef _OPENMP
    if (exec == ExecMode::openmp && !detail::inside_parallel()) {
        const int spawn = spawn_levels(depth, A, P);
        if (spawn > 0) {
            double r = 0.0;
            std::exception_ptr err;
#pragma omp parallel
#pragma omp single
            {
                try {
                    r = core.best(members, depth, spawn, out);
                } catch (...) {
                    err = std::current_exception();
                }
            }
            if (err) std::rethrow_exception(err);
            return r;
        }
    }
#else
    (void)exec;
#endif
    return core.best(members, depth, 0, out);
}

void validate_policy_against(const Policy& pi, const Environment& env) {
    if (pi.num_percepts() != env.num_percepts())
        throw dimension_error("policy percept alphabet does not match the environment");
    for (const auto& n : pi.nodes())
        if (n.action >= env.num_actions())
            throw precondition_error("policy action out of range for the environment");
}

}  // namespace

double ensemble_policy_value(std::span<const EnsembleMember> members,
                             const Policy& pi, ExecMode exec) {
    (void)exec;  // forced evaluation is cheap; kept serial for determinism
    validate_members(members);
    for (const auto& m : members) validate_policy_against(pi, *m.env);
    if (pi.horizon() == 0) return 0.0;
    ExpectimaxCore core(members.front().env->num_actions(),
                        members.front().env->num_percepts());
    return core.forced(members, pi, pi.empty() ? -1 : 0, pi.horizon());
}

PlanResult ensemble_best(std::span<const EnsembleMember> members,
                         std::size_t horizon, ExecMode exec, bool want_policy) {
    validate_members(members);
    PlanResult res;
    const std::size_t P = members.front().env->num_percepts();
    if (horizon == 0) {
        res.policy = Policy({}, 0, P);
        return res;
    }
    std::unique_ptr<BuildNode> root;
    res.value = run_best(members, horizon, exec, want_policy ? &root : nullptr);
    res.policy = want_policy ? flatten(root.get(), horizon, P) : Policy({}, 0, P);
    return res;
}

ValueResult value_of_policy(const Environment& env, const Policy& pi,
                            std::size_t from_step, const HistoryRecord& h,
                            ExecMode exec) {
    if (from_step != h.size())
        throw precondition_error("from_step must equal the history length");
    validate_policy_against(pi, env);
    auto dist = env.filter(h);
    if (!dist) throw conditioning_error("history is inconsistent with the environment");
    EnsembleMember m{&env, std::move(*dist), 1.0,
                     std::pow(env.discount(), double(from_step))};
    ValueResult res;
    res.value = ensemble_policy_value({&m, 1}, pi, exec);
    res.tail_bound = env.tail_bound(from_step, pi.horizon());
    return res;
}

PlanResult optimal_value(const Environment& env, std::size_t from_step,
                         const HistoryRecord& h, std::size_t horizon, ExecMode exec) {
    if (from_step != h.size())
        throw precondition_error("from_step must equal the history length");
    auto dist = env.filter(h);
    if (!dist) throw conditioning_error("history is inconsistent with the environment");
    EnsembleMember m{&env, std::move(*dist), 1.0,
                     std::pow(env.discount(), double(from_step))};
    PlanResult res = ensemble_best({&m, 1}, horizon, exec, true);
    res.tail_bound = env.tail_bound(from_step, horizon);
    return res;
}

std::size_t horizon_for_tolerance(const Environment& env, double eps) {
    if (!(eps > 0.0)) throw precondition_error("tolerance must be positive");
    std::size_t h = 0;
    if (env.tail_bound(0, 0) <= eps) return 0;
    const double c = env.reward_cap();
    const double g = env.discount();
    h = std::size_t(std::ceil(std::log(eps * (1.0 - g) / c) / std::log(g)));
    while (env.tail_bound(0, h) > eps) ++h;
    while (h > 0 && env.tail_bound(0, h - 1) <= eps) --h;
    return h;
}

Preference choose_active(const Belief& p, const Contract& x, const Belief& q,
                         const Contract& y) {
    const double vx = expectation(p, x);
    const double vy = expectation(q, y);
    if (vx > vy) return Preference::first;
    if (vy > vx) return Preference::second;
    return Preference::either;
}

std::size_t best_action(std::span<const Belief> beliefs,
                        std::span<const Contract> contracts) {
    if (beliefs.empty()) throw precondition_error("best_action needs at least one option");
    if (beliefs.size() != contracts.size())
        throw dimension_error("one belief per contract required");
    std::size_t pick = 0;
    double best = expectation(beliefs[0], contracts[0]);
    for (std::size_t i = 1; i < beliefs.size(); ++i) {
        const double v = expectation(beliefs[i], contracts[i]);
        if (v > best) {
            best = v;
            pick = i;
        }
    }
    return pick;
}

}  // namespace ratl
