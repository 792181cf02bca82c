#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "ratl/distributions.hpp"

using namespace ratl;

namespace {

JointDistribution square() {
    // Pr(0,0)=0.1 Pr(0,1)=0.2 Pr(1,0)=0.3 Pr(1,1)=0.4
    return JointDistribution({2, 2}, {0.1, 0.2, 0.3, 0.4});
}

JointDistribution random_joint(std::mt19937_64& rng,
                               const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(n);
    for (double& v : p) v = u(rng) + 1e-6;
    return JointDistribution(shape, std::move(p));
}

}  // namespace

TEST_CASE("construction validates and normalizes") {
    JointDistribution d({2, 2}, {1, 2, 3, 4});
    CHECK(d.at({1, 1}) == doctest::Approx(0.4));
    double total = 0.0;
    for (double v : d.probs()) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(JointDistribution({2}, {0.5, -0.1}), precondition_error);
    CHECK_THROWS_AS(JointDistribution({2}, {0.0, 0.0}), precondition_error);
    CHECK_THROWS_AS(JointDistribution({2, 2}, {1, 2, 3}), dimension_error);
    CHECK_THROWS_AS(JointDistribution({1 << 13, 1 << 13}, {1.0}), precondition_error);
}

TEST_CASE("marginalize: row sums and identity") {
    JointDistribution m = marginalize(square(), {0});
    CHECK(m.at({0}) == doctest::Approx(0.3));
    CHECK(m.at({1}) == doctest::Approx(0.7));

    JointDistribution u({2, 2}, {0.25, 0.25, 0.25, 0.25});
    JointDistribution mu = marginalize(u, {0});
    CHECK(mu.at({0}) == doctest::Approx(0.5));

    JointDistribution all = marginalize(square(), {0, 1});
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(all.at_flat(i) == doctest::Approx(square().at_flat(i)));

    CHECK_THROWS_AS(marginalize(square(), {}), precondition_error);
    CHECK_THROWS_AS(marginalize(square(), {1, 0}), precondition_error);
    CHECK_THROWS_AS(marginalize(square(), {2}), precondition_error);
}

TEST_CASE("marginalize composes") {
    std::mt19937_64 rng(3);
    JointDistribution d = random_joint(rng, {3, 2, 4});
    JointDistribution two = marginalize(d, {0, 2});
    JointDistribution one_direct = marginalize(d, {2});
    JointDistribution one_chained = marginalize(two, {1});
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(one_chained.at_flat(i) == doctest::Approx(one_direct.at_flat(i)).epsilon(1e-12));
}

TEST_CASE("condition: posterior column and error cases") {
    JointDistribution c = condition(square(), 1, 0);
    CHECK(c.at({0}) == doctest::Approx(0.25));
    CHECK(c.at({1}) == doctest::Approx(0.75));

    // independent joint: conditioning changes nothing
    std::vector<double> p = {0.3, 0.7}, q = {0.6, 0.4};
    std::vector<double> joint(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) joint[2 * i + j] = p[i] * q[j];
    JointDistribution ind({2, 2}, joint);
    JointDistribution given_q = condition(ind, 1, 1);
    CHECK(given_q.at({0}) == doctest::Approx(0.3));

    JointDistribution zero_col({2, 2}, {0.5, 0.0, 0.5, 0.0});
    CHECK_THROWS_AS(condition(zero_col, 1, 1), conditioning_error);
    CHECK_THROWS_AS(condition(square(), 2, 0), precondition_error);
    CHECK_THROWS_AS(condition(JointDistribution({4}, {1, 1, 1, 1}), 0, 0),
                    precondition_error);
}

TEST_CASE("conditioning preserves decisions on slice-supported contracts") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        JointDistribution d = random_joint(rng, {3, 3});
        const std::size_t j0 = rep % 3;
        JointDistribution c = condition(d, 1, j0);
        // contract zero outside the slice var1 == j0
        std::vector<double> slice(3), full(9, 0.0);
        for (std::size_t i = 0; i < 3; ++i) {
            slice[i] = u(rng);
            full[3 * i + j0] = slice[i];
        }
        const Decision joint_decision = decide(d.as_belief(), Contract(full), 1e-12);
        const Decision cond_decision = decide(c.as_belief(), Contract(slice), 1e-12);
        if (joint_decision != Decision::either && cond_decision != Decision::either)
            CHECK(joint_decision == cond_decision);
    }
}

TEST_CASE("verify_bayes residual vanishes") {
    CHECK(verify_bayes(square(), 0, 0) <= 1e-15);

    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        JointDistribution d = random_joint(rng, {1 + rep % 6, 1 + (rep / 2) % 6});
        CHECK(verify_bayes(d, rep % d.shape()[0], rep % d.shape()[1]) <= 1e-12);
    }

    JointDistribution atom({2, 2}, {0, 0, 0, 1});
    CHECK(verify_bayes(atom, 1, 1) == 0.0);
    CHECK_THROWS_AS(verify_bayes(atom, 0, 0), conditioning_error);
    CHECK_THROWS_AS(verify_bayes(random_joint(rng, {2, 2, 2}), 0, 0), precondition_error);
}

TEST_CASE("informed posterior: condition the past, marginalize the future") {
    JointDistribution d({2, 2}, {0.4, 0.1, 0.2, 0.3});
    JointDistribution next = informed_posterior(d, History{0});
    CHECK(next.at({0}) == doctest::Approx(0.8));
    CHECK(next.at({1}) == doctest::Approx(0.2));

    // empty history: the marginal of the first position
    JointDistribution first = informed_posterior(d, History{});
    CHECK(first.at({0}) == doctest::Approx(0.5));

    // iid product: history is uninformative
    std::vector<double> p = {0.3, 0.7};
    std::vector<double> joint(8);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) joint[4 * a + 2 * b + c] = p[a] * p[b] * p[c];
    JointDistribution iid({2, 2, 2}, joint);
    JointDistribution after = informed_posterior(iid, History{1, 0});
    CHECK(after.at({0}) == doctest::Approx(0.3));

    JointDistribution dead({2, 2}, {0.0, 0.0, 0.5, 0.5});
    CHECK_THROWS_AS(informed_posterior(dead, History{0}), conditioning_error);
    CHECK_THROWS_AS(informed_posterior(d, History{0, 1}), precondition_error);
    CHECK_THROWS_AS(informed_posterior(d, History{2}), precondition_error);
}

TEST_CASE("informed posterior agrees with the condition chain") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t T = 2 + rep % 3;
        const std::size_t alphabet = 2 + rep % 3;
        JointDistribution d = random_joint(rng, std::vector<std::size_t>(T, alphabet));
        const std::size_t hlen = rep % T;
        History h;
        for (std::size_t t = 0; t < hlen; ++t) h.symbols.push_back((rep + t) % alphabet);

        JointDistribution fast = informed_posterior(d, h);
        JointDistribution slow = d;
        for (std::size_t t = 0; t < hlen; ++t) slow = condition(slow, 0, h.symbols[t]);
        if (slow.num_variables() > 1) slow = marginalize(slow, {0});
        for (std::size_t i = 0; i < alphabet; ++i)
            CHECK(fast.at_flat(i) == doctest::Approx(slow.at_flat(i)).epsilon(1e-12));
    }
}

TEST_CASE("text round-trip is lossless") {
    std::mt19937_64 rng(29);
    JointDistribution d = random_joint(rng, {3, 2, 2});
    std::ostringstream os;
    d.write(os);
    std::istringstream is(os.str());
    JointDistribution back = JointDistribution::read(is);
    REQUIRE(back.shape() == d.shape());
    for (std::size_t i = 0; i < d.table_size(); ++i)
        CHECK(back.at_flat(i) == d.at_flat(i));  // bit-exact via shortest round-trip

    std::ostringstream os2;
    back.write(os2);
    CHECK(os.str() == os2.str());
}

TEST_CASE("parse errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        std::istringstream is(text);
        try {
            JointDistribution::read(is);
        } catch (const parse_error& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("1 0.5\n0.5\n") == 1);
    CHECK(line_of("shape: 2\n0.5\nnope\n") == 3);
    CHECK(line_of("shape: 2 2\n0.5\n0.5\n") > 0);  // truncated table
    CHECK(line_of("shape: 0 2\n") == 1);
}
