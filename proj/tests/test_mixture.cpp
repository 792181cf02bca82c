#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ratl/mixture.hpp"

using namespace ratl;
using Branches = std::vector<std::vector<std::vector<Environment::Branch>>>;

namespace {

// one-state machine that always shows `percept` and pays for one action
Environment beacon_env(const std::string& id, std::size_t percept,
                       std::size_t paying_action) {
    Branches t(1, std::vector<std::vector<Environment::Branch>>(2));
    for (std::size_t a = 0; a < 2; ++a)
        t[0][a] = {{percept, a == paying_action ? 1.0 : 0.0, 0, 1.0}};
    return Environment(id, 1, 2, 2, 0, 1.0, 0.5, std::move(t));
}

// two-step chain paying `first` then `second` forever-zero afterwards
Environment chain_env(const std::string& id, double first, double second) {
    Branches t(3, std::vector<std::vector<Environment::Branch>>(1));
    t[0][0] = {{0, first, 1, 1.0}};
    t[1][0] = {{0, second, 2, 1.0}};
    t[2][0] = {{0, 0.0, 2, 1.0}};
    return Environment(id, 3, 1, 1, 0, 2.0, 0.5, std::move(t));
}

// single state, two actions with fixed base rewards
Environment bandit_env(const std::string& id, double pay0, double pay1) {
    Branches t(1, std::vector<std::vector<Environment::Branch>>(2));
    t[0][0] = {{0, pay0, 0, 1.0}};
    t[0][1] = {{0, pay1, 0, 1.0}};
    return Environment(id, 1, 2, 1, 0, 2.0, 0.5, std::move(t));
}

EnvironmentClass demo5() {
    return EnvironmentClass::load(std::string(RATL_DATA_DIR) + "/demo5.cls");
}

}  // namespace

TEST_CASE("class construction and loading") {
    CHECK_THROWS_AS(EnvironmentClass({}, {}), precondition_error);
    CHECK_THROWS_AS(EnvironmentClass({beacon_env("a", 0, 0)}, {1.0, 1.0}),
                    dimension_error);
    CHECK_THROWS_AS(EnvironmentClass({beacon_env("a", 0, 0)}, {0.0}),
                    precondition_error);
    CHECK_THROWS_AS(
        EnvironmentClass({beacon_env("a", 0, 0), beacon_env("a", 1, 1)}, {1.0, 1.0}),
        precondition_error);  // duplicate id

    EnvironmentClass two({beacon_env("a", 0, 0), beacon_env("b", 1, 1)}, {3.0, 1.0});
    CHECK(two.weight(0) == doctest::Approx(0.75));
    CHECK(two.find("b") == 1);
    CHECK_THROWS_AS(two.find("c"), precondition_error);

    EnvironmentClass d5 = demo5();
    CHECK(d5.size() == 5);
    CHECK(d5.id() == "demo5");
    for (std::size_t i = 0; i < 5; ++i) CHECK(d5.weight(i) == doctest::Approx(0.2));
    CHECK_THROWS_AS(EnvironmentClass::load(std::string(RATL_DATA_DIR) + "/absent.cls"),
                    parse_error);
}

TEST_CASE("posterior updates: elimination, renormalization, exhaustion") {
    EnvironmentClass abc(
        {beacon_env("a", 1, 0), beacon_env("b", 0, 0), beacon_env("c", 0, 1)},
        {1.0, 1.0, 1.0});
    PosteriorState fresh(abc);
    CHECK(fresh.surviving() == 3);
    CHECK(fresh.posterior()[0] == doctest::Approx(1.0 / 3));

    PosteriorState saw0 = posterior_update(fresh, 0, 0);
    CHECK(saw0.surviving() == 2);
    CHECK(saw0.posterior()[0] == 0.0);
    CHECK(saw0.posterior()[1] == doctest::Approx(0.5));
    CHECK(saw0.posterior()[2] == doctest::Approx(0.5));
    CHECK_FALSE(saw0.consistent(0));
    CHECK_THROWS_AS(saw0.state_dist(0), precondition_error);

    PosteriorState saw1 = posterior_update(fresh, 0, 1);
    CHECK(saw1.surviving() == 1);
    CHECK(saw1.posterior()[0] == doctest::Approx(1.0));

    // a percept nothing predicts kills the whole class
    EnvironmentClass only0({beacon_env("a", 0, 0), beacon_env("b", 0, 1)}, {1.0, 1.0});
    CHECK_THROWS_AS(posterior_update(PosteriorState(only0), 0, 1),
                    class_exhausted_error);

    // agreeing percepts leave the posterior untouched
    PosteriorState still = posterior_update(PosteriorState(only0), 1, 0);
    CHECK(still.posterior()[0] == doctest::Approx(0.5));
    CHECK(still.step() == 1);
    REQUIRE(still.history().size() == 1);
    CHECK(still.history()[0] == std::pair<std::size_t, std::size_t>{1, 0});
}

TEST_CASE("from_history folds single updates") {
    EnvironmentClass d5 = demo5();
    std::vector<std::size_t> actions = {0, 1, 0}, percepts;
    // replay the percepts of member 3
    const Environment& e3 = d5.env(3);
    std::size_t s = e3.initial_state();
    for (std::size_t a : actions) {
        const auto& br = e3.step(s, a);
        percepts.push_back(br.percept);
        s = br.next_state;
    }
    PosteriorState folded = PosteriorState::from_history(d5, actions, percepts);
    PosteriorState stepped(d5);
    for (std::size_t t = 0; t < actions.size(); ++t)
        stepped = posterior_update(stepped, actions[t], percepts[t]);
    CHECK(folded.step() == 3);
    REQUIRE(folded.posterior().size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(folded.posterior()[i] == stepped.posterior()[i]);
    CHECK(folded.posterior()[3] > 0.0);

    // surviving count never grows as the history extends
    std::size_t prev = 5;
    PosteriorState ps(d5);
    for (std::size_t t = 0; t < actions.size(); ++t) {
        ps = posterior_update(ps, actions[t], percepts[t]);
        CHECK(ps.surviving() <= prev);
        prev = ps.surviving();
    }
}

TEST_CASE("mixture value of a fixed policy") {
    EnvironmentClass pair({chain_env("x", 1.0, 0.0), chain_env("y", 1.0, 2.0)},
                          {1.0, 1.0});
    Policy pi = Policy::constant(0, 2, 1);
    CHECK(mixture_value(pair, pi) == doctest::Approx(1.5));  // (1 + 2)/2

    EnvironmentClass lone({chain_env("x", 1.0, 0.0)}, {1.0});
    CHECK(mixture_value(lone, pi) == doctest::Approx(1.0));

    Environment z = Environment::load(std::string(RATL_DATA_DIR) + "/null.env");
    EnvironmentClass zero({z}, {1.0});
    CHECK(mixture_value(zero, Policy::constant(0, 3, 1)) == 0.0);
}

TEST_CASE("relative value: ratios against each surviving optimum") {
    EnvironmentClass pair({bandit_env("p", 1.0, 0.0), bandit_env("q", 1.0, 2.0)},
                          {1.0, 1.0});
    PosteriorState ps(pair);
    Policy pick0 = Policy::constant(0, 1, 1);
    // optimal in p (ratio 1), half-rate in q (1/2): average 0.75
    CHECK(relative_mixture_value(ps, pick0) == doctest::Approx(0.75));

    Policy pick1 = Policy::constant(1, 1, 1);
    CHECK(relative_mixture_value(ps, pick1) == doctest::Approx(0.5));  // 0 + 1

    EnvironmentClass lone({bandit_env("p", 1.0, 0.0)}, {1.0});
    PosteriorState lp(lone);
    MixturePlan best = mixture_policy(lp, 3);
    CHECK(relative_mixture_value(lp, best.policy) == doctest::Approx(1.0));
    CHECK(best.objective == doctest::Approx(1.0));

    Environment z = Environment::load(std::string(RATL_DATA_DIR) + "/null.env");
    EnvironmentClass zero({z}, {1.0});
    CHECK_THROWS_AS(relative_mixture_value(PosteriorState(zero),
                                           Policy::constant(0, 2, 1)),
                    degenerate_environment_error);
    CHECK_THROWS_AS(mixture_policy(PosteriorState(zero), 2),
                    degenerate_environment_error);
}

TEST_CASE("mixture planning: singleton and unanimous classes reduce to expectimax") {
    EnvironmentClass d5 = demo5();
    EnvironmentClass lone({d5.env(0)}, {1.0});
    MixturePlan plan = mixture_policy(PosteriorState(lone), 4);
    PlanResult direct = optimal_value(d5.env(0), 0, HistoryRecord{}, 4);
    REQUIRE(plan.policy.num_nodes() == direct.policy.num_nodes());
    for (std::size_t k = 0; k < plan.policy.num_nodes(); ++k)
        CHECK(plan.policy.nodes()[k].action == direct.policy.nodes()[k].action);
    CHECK(plan.vstar[0] == doctest::Approx(direct.value));
    CHECK(plan.objective == doctest::Approx(1.0));
}

TEST_CASE("mixture planning maximizes the posterior-weighted relative value") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Environment> envs;
        envs.push_back(oracles::random_environment(rng, 2, 2, 2, true));
        envs.push_back(oracles::random_environment(rng, 2, 2, 2, rep % 2 == 0));
        std::uniform_real_distribution<double> u(0.5, 2.0);
        EnvironmentClass ec(std::move(envs), {u(rng), u(rng)});
        PosteriorState ps(ec);

        const std::size_t H = 2;
        MixturePlan plan = mixture_policy(ps, H);

        // enumerate every complete policy and price it by the same objective
        std::vector<double> vstar(ec.size());
        for (std::size_t i = 0; i < ec.size(); ++i)
            vstar[i] = oracles::brute_force_optimal(ec.env(i), H);
        double best = -1.0;
        oracles::for_each_complete_policy(2, 2, H, [&](const Policy& pi) {
            double obj = 0.0;
            for (std::size_t i = 0; i < ec.size(); ++i)
                obj += ec.weight(i) * oracles::policy_value(ec.env(i), pi) / vstar[i];
            best = std::max(best, obj);
        });
        CHECK(plan.objective == doctest::Approx(best).epsilon(1e-9));
        CHECK(relative_mixture_value(ps, plan.policy) ==
              doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("the class mixture dominates each member's sequence probabilities") {
    EnvironmentClass d5 = demo5();
    for (std::size_t mask = 0; mask < 8; ++mask) {
        std::vector<std::size_t> actions = {mask & 1, (mask >> 1) & 1, (mask >> 2) & 1};
        for (std::size_t nu = 0; nu < d5.size(); ++nu) {
            // percepts member nu actually produces
            std::vector<std::size_t> percepts;
            std::size_t s = d5.env(nu).initial_state();
            for (std::size_t a : actions) {
                const auto& br = d5.env(nu).step(s, a);
                percepts.push_back(br.percept);
                s = br.next_state;
            }
            double mix = 0.0;
            for (std::size_t i = 0; i < d5.size(); ++i)
                mix += d5.weight(i) * d5.env(i).prefix_probability(actions, percepts);
            CHECK(mix >= d5.weight(nu) * d5.env(nu).prefix_probability(actions, percepts) -
                             1e-15);
            CHECK(d5.env(nu).prefix_probability(actions, percepts) == 1.0);
        }
    }
}

TEST_CASE("optimality experiment: identification drives relative value to one") {
    EnvironmentClass lr({beacon_env("left", 0, 0), beacon_env("right", 1, 1)},
                        {1.0, 1.0});
    SkillCurve curve = run_optimality_experiment(lr, "left", 6, 4, 123);
    REQUIRE(curve.points.size() == 6);
    CHECK(curve.points[0].surviving == 2);
    CHECK(curve.points[0].p_true == doctest::Approx(0.5));
    for (std::size_t k = 1; k < 6; ++k) {
        CHECK(curve.points[k].surviving == 1);
        CHECK(curve.points[k].p_true == doctest::Approx(1.0));
        CHECK(curve.points[k].w == doctest::Approx(1.0));
        CHECK(curve.points[k].delta == doctest::Approx(0.0));
        CHECK(curve.points[k].percept == 0);
        CHECK(curve.points[k].action == 0);
        CHECK(curve.points[k].reward == doctest::Approx(std::pow(0.5, double(k))));
    }
    // the posterior-weighted regret always covers the true-env shortfall
    for (const auto& pt : curve.points)
        CHECK(pt.p_true * (1.0 - pt.w) <= pt.delta + 1e-12);

    SkillCurve solo = run_optimality_experiment(
        EnvironmentClass({beacon_env("only", 0, 1)}, {1.0}), "only", 4, 3, 7);
    for (const auto& pt : solo.points) {
        CHECK(pt.w == doctest::Approx(1.0));
        CHECK(pt.action == 1);
        CHECK(pt.surviving == 1);
    }

    CHECK_THROWS_AS(run_optimality_experiment(lr, "nope", 3, 3, 1), precondition_error);
    CHECK_THROWS_AS(run_optimality_experiment(lr, "left", 0, 3, 1), precondition_error);
}

TEST_CASE("skill curve CSV is stable") {
    SkillCurve sc;
    sc.provenance = {"cmd: demo", "seed: 9"};
    SkillPoint p;
    p.step = 0;
    p.action = 1;
    p.percept = 0;
    p.reward = 0.5;
    p.w = 1.0;
    p.delta = 0.0;
    p.surviving = 2;
    p.p_true = 0.5;
    sc.points.push_back(p);
    std::ostringstream os;
    write_skill_csv(sc, os);
    CHECK(os.str() ==
          "# cmd: demo\n# seed: 9\n"
          "step,action,percept,reward,W,Delta,surviving_envs\n"
          "0,1,0,0.5,1,0,2\n");
}
