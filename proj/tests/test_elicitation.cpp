#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ratl/elicitation.hpp"

using namespace ratl;

namespace {

double linf(const Belief& a, const Belief& b) {
    REQUIRE(a.size() == b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("round-trip on a known two-outcome belief") {
    Belief p({1.0 / 3.0, 2.0 / 3.0});
    Belief r = elicit_beliefs(make_belief_oracle(p), 2, 1e-6);
    CHECK(linf(r, p) < 1e-6);
}

TEST_CASE("degenerate belief is recovered exactly") {
    Belief p({1.0, 0.0});
    Belief r = elicit_beliefs(make_belief_oracle(p), 2, 1e-6);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == 0.0);
}

TEST_CASE("single-outcome alphabet needs no queries") {
    auto dm = make_belief_oracle(Belief({1.0}));
    Belief r = elicit_beliefs(dm, 1, 1e-6);
    CHECK(r.size() == 1);
    CHECK(r[0] == 1.0);
}

TEST_CASE("random beliefs round-trip within the contract tolerance") {
    std::mt19937_64 rng(31);
    for (std::size_t m = 2; m <= 8; ++m) {
        for (int rep = 0; rep < 5; ++rep) {
            Belief p = oracles::random_belief(rng, m);
            Belief r = elicit_beliefs(make_belief_oracle(p), m, 1e-6);
            CHECK(linf(r, p) < 1e-5);
        }
    }
}

TEST_CASE("query budget is respected and exhaustion reported") {
    Belief p({0.3, 0.7});
    // the documented budget suffices
    CHECK_NOTHROW(elicit_beliefs(make_belief_oracle(p), 2, 1e-6,
                                 elicit_query_budget(2, 1e-6)));
    // a starved budget errors out instead of returning garbage
    CHECK_THROWS_AS(elicit_beliefs(make_belief_oracle(p), 2, 1e-6, 3), budget_error);
}

TEST_CASE("irrational oracles are reported, not repaired") {
    CHECK_THROWS_AS(elicit_beliefs(make_always_accept_oracle(), 3, 1e-6),
                    irrationality_error);
    CHECK_THROWS_AS(elicit_beliefs(make_sign_flipped_oracle(Belief{0.4, 0.6}), 2, 1e-6),
                    irrationality_error);
}

TEST_CASE("tolerance validation") {
    auto dm = make_belief_oracle(Belief{0.5, 0.5});
    CHECK_THROWS_AS(elicit_beliefs(dm, 2, 0.0), precondition_error);
    CHECK_THROWS_AS(elicit_beliefs(dm, 2, 0.7), precondition_error);
    CHECK_THROWS_AS(elicit_beliefs(dm, 0, 1e-6), precondition_error);
}

TEST_CASE("separate_labeled on hand-checked instances") {
    SUBCASE("one accepted, one rejected") {
        auto res = separate_labeled({Contract{2, -1}}, {Contract{1, -2}});
        REQUIRE(res.feasible);
        const Belief& p = *res.belief;
        CHECK(expectation(p, Contract{2, -1}) >= -1e-9);
        CHECK(expectation(p, Contract{1, -2}) <= 1e-9);
        CHECK(res.certificate >= -1e-9);
    }
    SUBCASE("same contract on both sides forces the boundary") {
        auto res = separate_labeled({Contract{1, -1}}, {Contract{1, -1}});
        REQUIRE(res.feasible);
        CHECK(std::fabs(expectation(*res.belief, Contract{1, -1})) <= 1e-9);
    }
    SUBCASE("all-negative accepted contract is infeasible") {
        auto res = separate_labeled({Contract{-1, -1}}, {});
        CHECK_FALSE(res.feasible);
        CHECK_FALSE(res.belief.has_value());
    }
    SUBCASE("empty input returns the uniform belief") {
        auto res = separate_labeled({}, {}, 3);
        REQUIRE(res.feasible);
        CHECK((*res.belief)[1] == doctest::Approx(1.0 / 3.0));
        CHECK_THROWS_AS(separate_labeled({}, {}), precondition_error);
    }
}

TEST_CASE("labels generated by any belief are always separable") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = 2 + rep % 5;
        Belief b = oracles::random_belief(rng, m);
        std::vector<Contract> accepted, rejected;
        for (int i = 0; i < 30; ++i) {
            std::vector<double> x(m);
            for (double& v : x) v = u(rng);
            Contract c(x);
            switch (decide(b, c)) {
                case Decision::accept: accepted.push_back(c); break;
                case Decision::reject: rejected.push_back(c); break;
                case Decision::either: break;
            }
        }
        auto res = separate_labeled(accepted, rejected, m);
        REQUIRE(res.feasible);
        CHECK(res.certificate >= -1e-9);
    }
}

TEST_CASE("cross_validate: self-agreement is total") {
    Belief p({0.3, 0.2, 0.5});
    CHECK(cross_validate(make_belief_oracle(p), p, 5000, 1e-9, 41) == 1.0);
    CHECK_THROWS_AS(cross_validate(make_belief_oracle(p), p, 0, 1e-9, 41),
                    precondition_error);
}

TEST_CASE("cross_validate: disagreement matches the geometric measure") {
    Belief truth({0.3, 0.7});
    Belief wrong({0.7, 0.3});
    const double rate = cross_validate(make_belief_oracle(truth), wrong, 10000, 1e-9, 43);
    CHECK(rate < 1.0);
    const double expected = 1.0 - oracles::grid_disagreement(truth, wrong);
    CHECK(rate == doctest::Approx(expected).epsilon(0.02));
}
