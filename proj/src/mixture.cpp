#include "ratl/mixture.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "textio.hpp"

namespace ratl {

EnvironmentClass::EnvironmentClass(std::vector<Environment> envs,
                                   std::vector<double> weights, std::string id)
    : envs_(std::move(envs)), weights_(std::move(weights)), id_(std::move(id)) {
    if (envs_.empty()) throw precondition_error("environment class cannot be empty");
    if (weights_.size() != envs_.size())
        throw dimension_error("one weight per environment required");
    double total = 0.0;
    for (double w : weights_) {
        if (!std::isfinite(w) || w <= 0.0)
            throw precondition_error("class weights must be finite and positive");
        total += w;
    }
    for (double& w : weights_) w /= total;
    std::set<std::string> ids;
    for (const auto& e : envs_) {
        if (!ids.insert(e.id()).second)
            throw precondition_error("duplicate environment id " + e.id());
        if (e.num_actions() != envs_.front().num_actions() ||
            e.num_percepts() != envs_.front().num_percepts())
            throw dimension_error("class members disagree on the interface");
    }
}

std::size_t EnvironmentClass::find(const std::string& env_id) const {
    for (std::size_t i = 0; i < envs_.size(); ++i)
        if (envs_[i].id() == env_id) return i;
    throw precondition_error("environment " + env_id + " is not in the class");
}

EnvironmentClass EnvironmentClass::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open class file " + path, 0);
    const auto dir = std::filesystem::path(path).parent_path();

    std::string cls_id = std::filesystem::path(path).stem().string();
    std::vector<Environment> envs;
    std::vector<double> weights;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (key[0] == '#') continue;
        if (key == "class") {
            if (!(ss >> cls_id)) throw parse_error("class line needs an identifier", lineno);
        } else if (key == "env") {
            std::string w_tok, rel;
            if (!(ss >> w_tok >> rel))
                throw parse_error("env line needs a weight and a path", lineno);
            const double w = detail::parse_double(w_tok, lineno);
            const auto env_path = dir / rel;
            envs.push_back(Environment::load(env_path.string()));
            weights.push_back(w);
        } else {
            throw parse_error("unknown keyword '" + key + "'", lineno);
        }
    }
    if (envs.empty()) throw parse_error("class file lists no environments", lineno);
    return EnvironmentClass(std::move(envs), std::move(weights), std::move(cls_id));
}

PosteriorState::PosteriorState(const EnvironmentClass& ec)
    : ec_(&ec),
      posterior_(ec.weights().begin(), ec.weights().end()),
      alive_(ec.size(), 1),
      dists_(ec.size()) {
    for (std::size_t i = 0; i < ec.size(); ++i)
        dists_[i] = ec.env(i).initial_distribution();
}

PosteriorState PosteriorState::from_history(const EnvironmentClass& ec,
                                            std::span<const std::size_t> actions,
                                            std::span<const std::size_t> percepts) {
    if (actions.size() != percepts.size())
        throw dimension_error("action and percept sequences differ in length");
    PosteriorState ps(ec);
    for (std::size_t t = 0; t < actions.size(); ++t)
        ps = posterior_update(ps, actions[t], percepts[t]);
    return ps;
}

std::size_t PosteriorState::surviving() const {
    std::size_t n = 0;
    for (char a : alive_) n += a != 0;
    return n;
}

const StateDistribution& PosteriorState::state_dist(std::size_t i) const {
    if (!consistent(i))
        throw precondition_error("no state distribution for an inconsistent environment");
    return dists_.at(i);
}

PosteriorState posterior_update(const PosteriorState& ps, std::size_t action,
                                std::size_t percept) {
    const EnvironmentClass& ec = *ps.ec_;
    if (action >= ec.num_actions()) throw precondition_error("action out of range");
    if (percept >= ec.num_percepts()) throw precondition_error("percept out of range");
    PosteriorState next = ps;
    double total = 0.0;
    StateDistribution scratch;
    for (std::size_t i = 0; i < ec.size(); ++i) {
        if (!next.alive_[i]) continue;
        double rew = 0.0;
        const double mass = ec.env(i).observe(next.dists_[i], action, percept, rew, scratch);
        if (mass <= 0.0) {
            next.alive_[i] = 0;
            next.posterior_[i] = 0.0;
            next.dists_[i].clear();
            continue;
        }
        for (double& v : scratch) v /= mass;
        next.dists_[i] = scratch;
        // survivors keep their prior proportions
        next.posterior_[i] = ec.weight(i);
        total += ec.weight(i);
    }
    if (total <= 0.0)
        throw class_exhausted_error("no environment in the class can explain the history");
    for (double& p : next.posterior_) p /= total;
    next.history_.emplace_back(action, percept);
    ++next.step_;
    return next;
}

namespace {

// singleton-ensemble values for one class member at the posterior's step
EnsembleMember member_at(const PosteriorState& ps, std::size_t i, double weight) {
    const Environment& env = ps.cls().env(i);
    return EnsembleMember{&env, ps.state_dist(i), weight,
                          std::pow(env.discount(), double(ps.step()))};
}

}  // namespace

double mixture_value(const EnvironmentClass& ec, const Policy& pi, ExecMode exec) {
    std::vector<double> vals(ec.size(), 0.0);
    parallel_for(ec.size(), exec, [&](std::size_t i) {
        const Environment& env = ec.env(i);
        EnsembleMember m{&env, env.initial_distribution(), 1.0, 1.0};
        vals[i] = ensemble_policy_value({&m, 1}, pi, exec);
    });
    double total = 0.0;
    for (std::size_t i = 0; i < ec.size(); ++i) total += ec.weight(i) * vals[i];
    return total;
}

double relative_mixture_value(const PosteriorState& ps, const Policy& pi,
                              ExecMode exec) {
    const EnvironmentClass& ec = ps.cls();
    std::vector<double> ratio(ec.size(), 0.0);
    std::vector<std::exception_ptr> errs(ec.size());
    parallel_for(ec.size(), exec, [&](std::size_t i) {
        if (!ps.consistent(i)) return;
        try {
            EnsembleMember m = member_at(ps, i, 1.0);
            const double v = ensemble_policy_value({&m, 1}, pi, exec);
            const double vstar =
                ensemble_best({&m, 1}, pi.horizon(), exec, false).value;
            if (vstar <= 0.0)
                throw degenerate_environment_error(
                    "optimal value is zero in consistent environment " + ec.env(i).id());
            ratio[i] = v / vstar;
        } catch (...) {
            errs[i] = std::current_exception();
        }
    });
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    double total = 0.0;
    for (std::size_t i = 0; i < ec.size(); ++i)
        total += ps.posterior()[i] * ratio[i];
    return total;
}

MixturePlan mixture_policy(const PosteriorState& ps, std::size_t horizon,
                           ExecMode exec) {
    if (horizon == 0) throw precondition_error("mixture planning needs a positive horizon");
    const EnvironmentClass& ec = ps.cls();
    MixturePlan plan;
    plan.vstar.assign(ec.size(), 0.0);
    std::vector<std::exception_ptr> errs(ec.size());
    parallel_for(ec.size(), exec, [&](std::size_t i) {
        if (!ps.consistent(i)) return;
        try {
            EnsembleMember m = member_at(ps, i, 1.0);
            const double vstar = ensemble_best({&m, 1}, horizon, exec, false).value;
            if (vstar <= 0.0)
                throw degenerate_environment_error(
                    "optimal value is zero in consistent environment " + ec.env(i).id());
            plan.vstar[i] = vstar;
        } catch (...) {
            errs[i] = std::current_exception();
        }
    });
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    std::vector<EnsembleMember> members;
    for (std::size_t i = 0; i < ec.size(); ++i)
        if (ps.consistent(i))
            members.push_back(member_at(ps, i, ps.posterior()[i] / plan.vstar[i]));
    PlanResult res = ensemble_best(members, horizon, exec, true);
    plan.policy = std::move(res.policy);
    plan.objective = res.value;
    return plan;
}

SkillCurve run_optimality_experiment(const EnvironmentClass& ec,
                                     const std::string& true_env_id,
                                     std::size_t steps, std::size_t horizon,
                                     std::uint64_t seed, ExecMode exec) {
    if (steps == 0) throw precondition_error("experiment needs at least one step");
    if (horizon == 0) throw precondition_error("experiment needs a positive horizon");
    const std::size_t mu = ec.find(true_env_id);
    const Environment& true_env = ec.env(mu);

    SkillCurve curve;
    curve.points.reserve(steps);
    PosteriorState ps(ec);
    std::mt19937_64 rng(seed);
    std::size_t true_state = true_env.initial_state();

    for (std::size_t k = 0; k < steps; ++k) {
        MixturePlan plan = mixture_policy(ps, horizon, exec);

        // relative value of the played plan in every surviving environment
        std::vector<double> w_all(ec.size(), 0.0);
        std::vector<std::exception_ptr> errs(ec.size());
        parallel_for(ec.size(), exec, [&](std::size_t i) {
            if (!ps.consistent(i)) return;
            try {
                EnsembleMember m = member_at(ps, i, 1.0);
                w_all[i] = ensemble_policy_value({&m, 1}, plan.policy, exec) / plan.vstar[i];
            } catch (...) {
                errs[i] = std::current_exception();
            }
        });
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);

        double delta = 0.0;
        for (std::size_t i = 0; i < ec.size(); ++i)
            if (ps.consistent(i)) delta += ps.posterior()[i] * (1.0 - w_all[i]);

        const std::size_t a = plan.policy.action_at({});
        const auto& br = true_env.sample_step(true_state, a, rng);
        const double reward =
            br.reward * std::pow(true_env.discount(), double(k));

        SkillPoint pt;
        pt.step = k;
        pt.action = a;
        pt.percept = br.percept;
        pt.reward = reward;
        pt.w = w_all[mu];
        pt.delta = delta;
        pt.surviving = ps.surviving();
        pt.p_true = ps.posterior()[mu];
        pt.w_all = std::move(w_all);
        curve.points.push_back(std::move(pt));

        true_state = br.next_state;
        ps = posterior_update(ps, a, br.percept);
    }
    return curve;
}

void write_skill_csv(const SkillCurve& sc, std::ostream& os) {
    using detail::format_double;
    for (const auto& line : sc.provenance) os << "# " << line << "\n";
    os << "step,action,percept,reward,W,Delta,surviving_envs\n";
    for (const auto& p : sc.points) {
        os << p.step << "," << p.action << "," << p.percept << ","
           << format_double(p.reward) << "," << format_double(p.w) << ","
           << format_double(p.delta) << "," << p.surviving << "\n";
    }
}

}  // namespace ratl
