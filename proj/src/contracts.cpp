#include "ratl/contracts.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>

namespace ratl {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw precondition_error(std::string(what) + " has a non-finite entry");
        }
    }
}

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        os << v[i];
    }
    return os.str();
}

}  // namespace

Contract::Contract(std::vector<double> payoffs) : payoffs_(std::move(payoffs)) {
    require_finite(payoffs_, "contract");
}

Contract::Contract(std::initializer_list<double> payoffs)
    : Contract(std::vector<double>(payoffs)) {}

Contract Contract::operator-() const {
    std::vector<double> neg(payoffs_.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -payoffs_[i];
    return Contract(std::move(neg));
}

Contract& Contract::operator+=(const Contract& other) {
    if (payoffs_.size() != other.payoffs_.size()) {
        throw dimension_error("contract sum: alphabet sizes differ");
    }
    for (std::size_t i = 0; i < payoffs_.size(); ++i) payoffs_[i] += other.payoffs_[i];
    return *this;
}

Contract& Contract::operator*=(double scale) {
    for (double& p : payoffs_) p *= scale;
    require_finite(payoffs_, "scaled contract");
    return *this;
}

std::string Contract::str() const { return "(" + join(payoffs_) + ")"; }

const char* to_string(Decision d) {
    switch (d) {
        case Decision::accept: return "accept";
        case Decision::reject: return "reject";
        case Decision::either: return "either";
    }
    return "?";
}

Decision dual(Decision d) {
    switch (d) {
        case Decision::accept: return Decision::reject;
        case Decision::reject: return Decision::accept;
        case Decision::either: return Decision::either;
    }
    return Decision::either;
}

Belief::Belief(std::vector<double> probs, bool normalize) : probs_(std::move(probs)) {
    require_finite(probs_, "belief");
    double sum = 0.0;
    for (double p : probs_) {
        if (p < 0.0) throw precondition_error("belief has a negative entry");
        sum += p;
    }
    if (probs_.empty() || sum <= 0.0) {
        throw precondition_error("belief must have a positive total weight");
    }
    if (normalize) {
        for (double& p : probs_) p /= sum;
        normalized_ = true;
    } else {
        normalized_ = std::abs(sum - 1.0) <= 1e-12;
    }
}

Belief::Belief(std::initializer_list<double> probs)
    : Belief(std::vector<double>(probs)) {}

Belief Belief::uniform(std::size_t alphabet_size) {
    if (alphabet_size == 0) throw precondition_error("alphabet size must be positive");
    return Belief(std::vector<double>(alphabet_size, 1.0));
}

Belief Belief::normalize() const {
    if (normalized_) return *this;
    return Belief(probs_);
}

std::string Belief::str() const { return join(probs_); }

double expectation(const Belief& b, const Contract& x) {
    if (b.size() != x.size()) {
        throw dimension_error("expectation: belief and contract sizes differ");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) sum += b[i] * x[i];
    return sum;
}

Decision decide(const Belief& b, const Contract& x, double tol) {
    if (tol < 0.0) throw precondition_error("decide: tolerance must be >= 0");
    double e = expectation(b, x);
    if (e > tol) return Decision::accept;
    if (e < -tol) return Decision::reject;
    return Decision::either;
}

DecisionMaker make_belief_oracle(Belief b, double tol) {
    return [b = std::move(b), tol](const Contract& x) { return decide(b, x, tol); };
}

DecisionMaker make_affine_oracle(double threshold) {
    return [threshold](const Contract& x) {
        if (x.size() == 0) throw dimension_error("affine oracle: empty contract");
        return x[0] >= threshold ? Decision::accept : Decision::reject;
    };
}

DecisionMaker make_always_accept_oracle() {
    return [](const Contract&) { return Decision::accept; };
}

DecisionMaker make_sign_flipped_oracle(Belief b, double tol) {
    return [b = std::move(b), tol](const Contract& x) {
        return dual(decide(b, x, tol));
    };
}

bool AxiomReport::has_violation(int axiom) const {
    return std::any_of(violations.begin(), violations.end(),
                       [axiom](const AxiomViolation& v) { return v.axiom == axiom; });
}

std::string AxiomReport::str() const {
    std::ostringstream os;
    if (ok()) {
        os << "no violations (" << queries << " queries)";
        return os.str();
    }
    os << violations.size() << " violation(s):";
    for (const AxiomViolation& v : violations) {
        os << "\n  axiom " << v.axiom << ": " << v.detail;
        for (const Contract& w : v.witnesses) os << "  " << w.str();
    }
    return os.str();
}

namespace {

bool all_nonneg(const Contract& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) return false;
    }
    return true;
}

bool all_neg(const Contract& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= 0.0) return false;
    }
    return true;
}

}  // namespace

AxiomReport check_axioms(const DecisionMaker& dm,
                         const std::vector<Contract>& samples,
                         std::uint64_t seed,
                         const AxiomCheckOptions& options) {
    if (samples.empty()) throw precondition_error("check_axioms: empty sample set");
    const std::size_t m = samples[0].size();
    for (const Contract& x : samples) {
        if (x.size() != m) throw dimension_error("check_axioms: mixed alphabets");
    }

    // probe set: the samples plus the two canonical sign probes
    std::vector<Contract> probes = samples;
    probes.emplace_back(std::vector<double>(m, 1.0));
    probes.emplace_back(std::vector<double>(m, -1.0));

    std::atomic<std::uint64_t> queries{0};
    // violations land in per-index slots and are merged in index order, so the
    // report is identical for serial and openmp execution
    std::vector<std::vector<AxiomViolation>> slots(probes.size());

    auto ask = [&](const Contract& x, Decision& out,
                   std::vector<AxiomViolation>& slot) {
        queries.fetch_add(1, std::memory_order_relaxed);
        try {
            out = dm(x);
            return true;
        } catch (const std::exception& ex) {
            slot.push_back(
                {1, {x}, std::string("decision maker failed to decide: ") + ex.what()});
            return false;
        }
    };

    // axioms 1 (completeness), 2 (negation duality), 4 (sign):
    // one pass over the probe set
    std::vector<Decision> decisions(probes.size(), Decision::either);
    std::vector<char> decided(probes.size(), 0);
    parallel_for(probes.size(), options.exec, [&](std::size_t i) {
        const Contract& x = probes[i];
        Decision dx;
        if (!ask(x, dx, slots[i])) return;
        decisions[i] = dx;
        decided[i] = 1;

        Decision dnx;
        if (!ask(-x, dnx, slots[i])) return;
        if (dnx != dual(dx)) {
            slots[i].push_back(
                {2, {x, -x},
                 std::string("decide(x)=") + to_string(dx) + " but decide(-x)=" +
                     to_string(dnx)});
        }
        if (all_nonneg(x) && dx == Decision::reject) {
            slots[i].push_back(
                {4, {x}, "componentwise non-negative contract rejected"});
        }
        if (all_neg(x) && dx == Decision::accept) {
            slots[i].push_back(
                {4, {x}, "componentwise negative contract accepted"});
        }
    });

    // axiom 3 (conic closure): lambda*x + gamma*y of accepted pairs must not
    // be rejected
    std::vector<std::size_t> accepted;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        if (decided[i] && decisions[i] != Decision::reject) accepted.push_back(i);
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(accepted.size() * (accepted.size() + 1) / 2);
    for (std::size_t a = 0; a < accepted.size(); ++a) {
        for (std::size_t b = a; b < accepted.size(); ++b) {
            pairs.emplace_back(accepted[a], accepted[b]);
        }
    }
    if (pairs.size() > options.max_pairs) {
        std::mt19937_64 rng(seed);
        std::shuffle(pairs.begin(), pairs.end(), rng);
        pairs.resize(options.max_pairs);
    }

    std::vector<std::vector<AxiomViolation>> pair_slots(pairs.size());
    parallel_for(pairs.size(), options.exec, [&](std::size_t k) {
        const Contract& x = probes[pairs[k].first];
        const Contract& y = probes[pairs[k].second];
        for (double lambda : options.cone_grid) {
            for (double gamma : options.cone_grid) {
                Contract combo = lambda * x + gamma * y;
                Decision d;
                if (!ask(combo, d, pair_slots[k])) return;
                if (d == Decision::reject) {
                    std::ostringstream os;
                    os << "accepted pair, but " << lambda << "*x + " << gamma
                       << "*y rejected";
                    pair_slots[k].push_back({3, {x, y, combo}, os.str()});
                    return;
                }
            }
        }
    });

    AxiomReport report;
    for (auto& slot : slots) {
        for (auto& v : slot) report.violations.push_back(std::move(v));
    }
    for (auto& slot : pair_slots) {
        for (auto& v : slot) report.violations.push_back(std::move(v));
    }
    report.queries = queries.load();
    return report;
}

}  // namespace ratl
