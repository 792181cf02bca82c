#include "ratl/elicitation.hpp"

#include <atomic>
#include <cmath>
#include <random>

#include "simplex.hpp"

namespace ratl {

std::uint64_t elicit_query_budget(std::size_t alphabet_size, double tol) {
    return static_cast<std::uint64_t>(
        std::ceil(64.0 * static_cast<double>(alphabet_size) * std::log2(1.0 / tol)));
}

namespace {

Contract unit(std::size_t m, std::size_t i, double scale = 1.0) {
    std::vector<double> v(m, 0.0);
    v[i] = scale;
    return Contract(std::move(v));
}

// e_i - t * e_r
Contract ray(std::size_t m, std::size_t i, std::size_t r, double t) {
    std::vector<double> v(m, 0.0);
    v[i] = 1.0;
    v[r] = -t;
    return Contract(std::move(v));
}

struct CountingOracle {
    const DecisionMaker& dm;
    std::uint64_t budget;
    std::atomic<std::uint64_t> used{0};

    Decision ask(const Contract& x) {
        if (used.fetch_add(1, std::memory_order_relaxed) >= budget) {
            throw budget_error("elicit_beliefs: query budget exhausted");
        }
        return dm(x);
    }
};

}  // namespace

Belief elicit_beliefs(const DecisionMaker& dm, std::size_t alphabet_size,
                      double tol, std::uint64_t max_queries, ExecMode exec) {
    const std::size_t m = alphabet_size;
    if (m == 0) throw precondition_error("elicit_beliefs: alphabet size must be positive");
    if (!(tol > 0.0) || tol > 0.5) {
        throw precondition_error("elicit_beliefs: tol must be in (0, 0.5]");
    }
    if (m == 1) return Belief{1.0};

    CountingOracle oracle{dm, max_queries ? max_queries : elicit_query_budget(m, tol)};

    // reference pass: coordinate r is never dominated, so every ratio
    // p_i / p_r lies in [0, 1] up to the oracle's boundary band
    std::vector<char> dominated(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            std::vector<double> v(m, 0.0);
            v[j] = 1.0;
            v[i] = -1.0;
            if (oracle.ask(Contract(std::move(v))) == Decision::accept) {
                dominated[i] = 1;
                break;
            }
        }
    }
    std::size_t ref = m;
    for (std::size_t i = 0; i < m; ++i) {
        if (!dominated[i]) {
            ref = i;
            break;
        }
    }
    if (ref == m) {
        throw irrationality_error(
            "elicit_beliefs: every coordinate dominated (cyclic preferences)");
    }

    const double s_tol = tol / 16.0;
    auto to_t = [](double s) { return s / (1.0 - s); };

    std::vector<double> ratios(m, 0.0);
    ratios[ref] = 1.0;
    std::vector<std::exception_ptr> failures(m);

    parallel_for(m, exec, [&](std::size_t i) {
        if (i == ref) return;
        try {
            Decision d_neg = oracle.ask(-unit(m, i));
            if (d_neg == Decision::either) {
                ratios[i] = 0.0;  // -e_i on the boundary pins p_i = 0
                return;
            }
            Decision d_pos = oracle.ask(unit(m, i));
            if (d_pos == Decision::reject) {
                throw irrationality_error(
                    "elicit_beliefs: non-negative contract rejected, witness " +
                    unit(m, i).str());
            }
            if (d_neg == Decision::accept || d_pos != dual(d_neg)) {
                throw irrationality_error(
                    "elicit_beliefs: negation duality broken on witness pair " +
                    unit(m, i).str() + " / " + (-unit(m, i)).str());
            }

            // bracket the flip of e_i - t*e_r: accept at s_lo, reject at s_hi
            double s_lo = 0.0;
            double s_hi = -1.0;
            double t_probe = 1.0;
            bool located = false;
            while (s_hi < 0.0) {
                if (t_probe > 1048576.0) {
                    throw irrationality_error(
                        "elicit_beliefs: accepts unbounded multiples of -e_r, "
                        "witness " +
                        ray(m, i, ref, t_probe / 2.0).str());
                }
                double s = t_probe / (1.0 + t_probe);
                Decision d = oracle.ask(ray(m, i, ref, t_probe));
                if (d == Decision::accept) {
                    s_lo = s;
                    t_probe *= 2.0;
                } else if (d == Decision::reject) {
                    s_hi = s;
                } else {
                    ratios[i] = t_probe;  // boundary located
                    located = true;
                    break;
                }
            }
            if (located) return;

            while (s_hi - s_lo > s_tol) {
                double s_mid = 0.5 * (s_lo + s_hi);
                Decision d = oracle.ask(ray(m, i, ref, to_t(s_mid)));
                if (d == Decision::accept) {
                    s_lo = s_mid;
                } else if (d == Decision::reject) {
                    s_hi = s_mid;
                } else {
                    s_lo = s_hi = s_mid;  // boundary located
                }
            }
            ratios[i] = to_t(0.5 * (s_lo + s_hi));
        } catch (...) {
            failures[i] = std::current_exception();
        }
    });

    for (std::size_t i = 0; i < m; ++i) {
        if (failures[i]) std::rethrow_exception(failures[i]);
    }
    return Belief(std::move(ratios));
}

SeparationResult separate_labeled(const std::vector<Contract>& accepted,
                                  const std::vector<Contract>& rejected,
                                  std::size_t alphabet_size) {
    std::size_t m = alphabet_size;
    for (const Contract& x : accepted) {
        if (m == 0) m = x.size();
        if (x.size() != m) throw dimension_error("separate_labeled: mixed alphabets");
    }
    for (const Contract& y : rejected) {
        if (m == 0) m = y.size();
        if (y.size() != m) throw dimension_error("separate_labeled: mixed alphabets");
    }
    if (m == 0) {
        throw precondition_error(
            "separate_labeled: alphabet size required when both label sets are empty");
    }
    if (accepted.empty() && rejected.empty()) {
        return {true, Belief::uniform(m), 0.0};
    }

    // variables: p (m), one slack per constraint; rows: sum(p) = 1 first,
    // then -x.p + u = 0 per accepted, y.p + v = 0 per rejected
    const std::size_t n_a = accepted.size();
    const std::size_t n_r = rejected.size();
    const std::size_t cols = m + n_a + n_r;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    a.emplace_back(cols, 0.0);
    for (std::size_t c = 0; c < m; ++c) a.back()[c] = 1.0;
    b.push_back(1.0);
    for (std::size_t k = 0; k < n_a; ++k) {
        a.emplace_back(cols, 0.0);
        for (std::size_t c = 0; c < m; ++c) a.back()[c] = -accepted[k][c];
        a.back()[m + k] = 1.0;
        b.push_back(0.0);
    }
    for (std::size_t k = 0; k < n_r; ++k) {
        a.emplace_back(cols, 0.0);
        for (std::size_t c = 0; c < m; ++c) a.back()[c] = rejected[k][c];
        a.back()[m + n_a + k] = 1.0;
        b.push_back(0.0);
    }

    detail::SimplexResult lp = detail::phase1_feasible(std::move(a), std::move(b));
    if (!lp.feasible) {
        return {false, std::nullopt, lp.artificial_sum};
    }

    Belief p(std::vector<double>(lp.x.begin(), lp.x.begin() + m));
    double min_slack = 0.0;
    for (const Contract& x : accepted) min_slack = std::min(min_slack, expectation(p, x));
    for (const Contract& y : rejected) min_slack = std::min(min_slack, -expectation(p, y));
    return {true, p, min_slack};
}

double cross_validate(const DecisionMaker& dm, const Belief& b, std::size_t n,
                      double tol, std::uint64_t seed, ExecMode exec) {
    if (n == 0) throw precondition_error("cross_validate: sample count must be positive");
    const std::size_t m = b.size();

    // contracts are drawn serially so the sample set is independent of the
    // execution mode
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Contract> samples;
    samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v(m);
        for (double& x : v) x = u(rng);
        samples.emplace_back(std::move(v));
    }

    std::vector<char> agree(n, 0);
    std::vector<std::exception_ptr> failures(n);
    parallel_for(n, exec, [&](std::size_t k) {
        try {
            Decision mine = decide(b, samples[k], tol);
            Decision theirs = dm(samples[k]);
            agree[k] = mine == theirs || mine == Decision::either ||
                       theirs == Decision::either;
        } catch (...) {
            failures[k] = std::current_exception();
        }
    });
    for (std::size_t k = 0; k < n; ++k) {
        if (failures[k]) std::rethrow_exception(failures[k]);
    }

    std::size_t count = 0;
    for (char c : agree) count += c;
    return static_cast<double>(count) / static_cast<double>(n);
}

}  // namespace ratl
