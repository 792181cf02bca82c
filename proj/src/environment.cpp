#include "ratl/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "textio.hpp"

namespace ratl {

namespace {

constexpr double kProbSlack = 1e-9;

}  // namespace

std::vector<std::size_t> HistoryRecord::actions() const {
    std::vector<std::size_t> out;
    out.reserve(steps_.size());
    for (const auto& s : steps_) out.push_back(s.action);
    return out;
}

std::vector<std::size_t> HistoryRecord::percepts() const {
    std::vector<std::size_t> out;
    out.reserve(steps_.size());
    for (const auto& s : steps_) out.push_back(s.percept);
    return out;
}

Environment::Environment(std::string id, std::size_t num_states,
                         std::size_t num_actions, std::size_t num_percepts,
                         std::size_t initial_state, double reward_cap,
                         double discount,
                         std::vector<std::vector<std::vector<Branch>>> transitions)
    : id_(std::move(id)),
      num_states_(num_states),
      num_actions_(num_actions),
      num_percepts_(num_percepts),
      initial_state_(initial_state),
      reward_cap_(reward_cap),
      discount_(discount),
      transitions_(std::move(transitions)) {
    if (num_states_ == 0 || num_actions_ == 0 || num_percepts_ == 0)
        throw precondition_error("environment needs at least one state, action and percept");
    if (initial_state_ >= num_states_)
        throw precondition_error("initial state out of range");
    if (!(reward_cap_ >= 0.0) || !std::isfinite(reward_cap_))
        throw precondition_error("reward cap must be finite and non-negative");
    if (!(discount_ > 0.0) || !(discount_ < 1.0))
        throw precondition_error("discount must lie in (0, 1)");
    if (transitions_.size() != num_states_)
        throw precondition_error("transition table must cover every state");
    for (std::size_t s = 0; s < num_states_; ++s) {
        if (transitions_[s].size() != num_actions_)
            throw precondition_error("transition table must cover every action");
        for (std::size_t a = 0; a < num_actions_; ++a) {
            const auto& brs = transitions_[s][a];
            if (brs.empty())
                throw precondition_error("missing transition for state " +
                                         std::to_string(s) + ", action " + std::to_string(a));
            double total = 0.0;
            for (const auto& br : brs) {
                if (br.percept >= num_percepts_)
                    throw precondition_error("branch percept out of range");
                if (br.next_state >= num_states_)
                    throw precondition_error("branch next state out of range");
                if (!std::isfinite(br.reward) || br.reward < 0.0 || br.reward > reward_cap_)
                    throw precondition_error("branch reward outside [0, reward_cap]");
                if (!(br.prob > 0.0) || br.prob > 1.0 + kProbSlack)
                    throw precondition_error("branch probability must lie in (0, 1]");
                total += br.prob;
            }
            if (std::fabs(total - 1.0) > kProbSlack)
                throw precondition_error("branch probabilities for state " + std::to_string(s) +
                                         ", action " + std::to_string(a) + " must sum to 1");
            if (brs.size() > 1) deterministic_ = false;
        }
    }
}

const std::vector<Environment::Branch>& Environment::branches(std::size_t state,
                                                              std::size_t action) const {
    if (state >= num_states_) throw precondition_error("state out of range");
    if (action >= num_actions_) throw precondition_error("action out of range");
    return transitions_[state][action];
}

const Environment::Branch& Environment::step(std::size_t state, std::size_t action) const {
    if (!deterministic_)
        throw precondition_error("step() requires a deterministic environment");
    return branches(state, action).front();
}

const Environment::Branch& Environment::sample_step(std::size_t state, std::size_t action,
                                                    std::mt19937_64& rng) const {
    const auto& brs = branches(state, action);
    if (brs.size() == 1) return brs.front();
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (const auto& br : brs) {
        if (u < br.prob) return br;
        u -= br.prob;
    }
    return brs.back();
}

double Environment::observe(std::span<const double> dist, std::size_t action,
                            std::size_t percept, double& reward_out,
                            StateDistribution& next_out) const {
    if (dist.size() != num_states_)
        throw dimension_error("state distribution has wrong length");
    if (action >= num_actions_) throw precondition_error("action out of range");
    if (percept >= num_percepts_) throw precondition_error("percept out of range");
    next_out.assign(num_states_, 0.0);
    double mass = 0.0;
    reward_out = 0.0;
    for (std::size_t s = 0; s < num_states_; ++s) {
        const double ps = dist[s];
        if (ps == 0.0) continue;
        for (const auto& br : transitions_[s][action]) {
            if (br.percept != percept) continue;
            const double w = ps * br.prob;
            mass += w;
            reward_out += w * br.reward;
            next_out[br.next_state] += w;
        }
    }
    return mass;
}

double Environment::prefix_probability(std::span<const std::size_t> actions,
                                       std::span<const std::size_t> percepts) const {
    if (actions.size() != percepts.size())
        throw dimension_error("action and percept sequences differ in length");
    StateDistribution dist = initial_distribution();
    StateDistribution next;
    double prob = 1.0;
    double reward = 0.0;
    for (std::size_t t = 0; t < actions.size(); ++t) {
        const double mass = observe(dist, actions[t], percepts[t], reward, next);
        if (mass <= 0.0) return 0.0;
        prob *= mass;
        for (double& v : next) v /= mass;
        dist.swap(next);
    }
    return prob;
}

bool Environment::consistent(const HistoryRecord& h) const {
    return prefix_probability(h.actions(), h.percepts()) > 0.0;
}

std::optional<StateDistribution> Environment::filter(const HistoryRecord& h) const {
    StateDistribution dist = initial_distribution();
    StateDistribution next;
    double reward = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) {
        const double mass = observe(dist, h[t].action, h[t].percept, reward, next);
        if (mass <= 0.0) return std::nullopt;
        for (double& v : next) v /= mass;
        dist.swap(next);
    }
    return dist;
}

StateDistribution Environment::initial_distribution() const {
    StateDistribution dist(num_states_, 0.0);
    dist[initial_state_] = 1.0;
    return dist;
}

double Environment::tail_bound(std::size_t from_step, std::size_t horizon) const {
    return reward_cap_ * std::pow(discount_, double(from_step + horizon)) /
           (1.0 - discount_);
}

void Environment::write(std::ostream& os) const {
    using detail::format_double;
    os << "env " << id_ << "\n";
    os << "states " << num_states_ << "\n";
    os << "actions " << num_actions_ << "\n";
    os << "percepts " << num_percepts_ << "\n";
    os << "kind " << (deterministic_ ? "deterministic" : "stochastic") << "\n";
    os << "envelope " << format_double(reward_cap_) << " " << format_double(discount_) << "\n";
    os << "start " << initial_state_ << "\n";
    for (std::size_t s = 0; s < num_states_; ++s)
        for (std::size_t a = 0; a < num_actions_; ++a)
            for (const auto& br : transitions_[s][a]) {
                os << "t " << s << " " << a << " " << br.percept << " "
                   << format_double(br.reward) << " " << br.next_state;
                if (transitions_[s][a].size() > 1 || br.prob != 1.0)
                    os << " " << format_double(br.prob);
                os << "\n";
            }
}

Environment Environment::read(std::istream& is) {
    using detail::parse_double;
    using detail::parse_size;

    std::string id;
    std::optional<std::size_t> states, actions, percepts, start;
    std::optional<double> cap, gamma;
    std::optional<bool> declared_deterministic;
    struct RawBranch {
        std::size_t s, a;
        Branch br;
        int line;
    };
    std::vector<RawBranch> raw;

    std::string line;
    int lineno = 0;
    bool saw_env = false;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;  // blank line
        if (key[0] == '#') continue;
        if (key == "env") {
            if (saw_env) throw parse_error("duplicate env line", lineno);
            if (!(ss >> id)) throw parse_error("env line needs an identifier", lineno);
            saw_env = true;
        } else if (key == "states" || key == "actions" || key == "percepts" ||
                   key == "start") {
            std::string tok;
            if (!(ss >> tok)) throw parse_error(key + " line needs a count", lineno);
            std::size_t v = parse_size(tok, lineno);
            if (key == "states") states = v;
            else if (key == "actions") actions = v;
            else if (key == "percepts") percepts = v;
            else start = v;
        } else if (key == "kind") {
            std::string tok;
            if (!(ss >> tok)) throw parse_error("kind line needs a value", lineno);
            if (tok == "deterministic") declared_deterministic = true;
            else if (tok == "stochastic") declared_deterministic = false;
            else throw parse_error("kind must be deterministic or stochastic", lineno);
        } else if (key == "envelope") {
            std::string c_tok, g_tok;
            if (!(ss >> c_tok >> g_tok))
                throw parse_error("envelope line needs reward cap and discount", lineno);
            cap = parse_double(c_tok, lineno);
            gamma = parse_double(g_tok, lineno);
        } else if (key == "t") {
            std::string s_tok, a_tok, j_tok, r_tok, n_tok, p_tok;
            if (!(ss >> s_tok >> a_tok >> j_tok >> r_tok >> n_tok))
                throw parse_error("transition needs state action percept reward next", lineno);
            RawBranch rb;
            rb.s = parse_size(s_tok, lineno);
            rb.a = parse_size(a_tok, lineno);
            rb.br.percept = parse_size(j_tok, lineno);
            rb.br.reward = parse_double(r_tok, lineno);
            rb.br.next_state = parse_size(n_tok, lineno);
            rb.br.prob = (ss >> p_tok) ? parse_double(p_tok, lineno) : 1.0;
            rb.line = lineno;
            raw.push_back(rb);
        } else {
            throw parse_error("unknown keyword '" + key + "'", lineno);
        }
    }
    if (!saw_env) throw parse_error("missing env line", lineno);
    if (!states || !actions || !percepts)
        throw parse_error("missing states/actions/percepts line", lineno);
    if (!cap || !gamma) throw parse_error("missing envelope line", lineno);
    if (!start) throw parse_error("missing start line", lineno);

    std::vector<std::vector<std::vector<Branch>>> table(
        *states, std::vector<std::vector<Branch>>(*actions));
    for (const auto& rb : raw) {
        if (rb.s >= *states) throw parse_error("transition state out of range", rb.line);
        if (rb.a >= *actions) throw parse_error("transition action out of range", rb.line);
        table[rb.s][rb.a].push_back(rb.br);
    }

    Environment env(id, *states, *actions, *percepts, *start, *cap, *gamma,
                    std::move(table));
    if (declared_deterministic && *declared_deterministic != env.deterministic())
        throw parse_error("kind line disagrees with the transition table", lineno);
    return env;
}

Environment Environment::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw parse_error("cannot open environment file " + path, 0);
    return read(is);
}

void Environment::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw precondition_error("cannot write environment file " + path);
    write(os);
}

}  // namespace ratl
