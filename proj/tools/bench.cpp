// serial vs OpenMP timing for the parallel kernels; also checks that both
// modes produce bit-identical results
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "ratl/contracts.hpp"
#include "ratl/elicitation.hpp"
#include "ratl/environment.hpp"
#include "ratl/exec.hpp"
#include "ratl/mixture.hpp"
#include "ratl/planner.hpp"

namespace {

using ratl::Environment;

Environment random_env(std::uint64_t seed, std::size_t S, std::size_t A,
                       std::size_t P, std::size_t branches) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_p(0, P - 1), pick_s(0, S - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<std::vector<Environment::Branch>>> table(
        S, std::vector<std::vector<Environment::Branch>>(A));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            double total = 0.0;
            std::vector<double> raw(branches);
            for (double& v : raw) {
                v = 0.1 + u(rng);
                total += v;
            }
            for (std::size_t b = 0; b < branches; ++b)
                table[s][a].push_back({pick_p(rng), u(rng), pick_s(rng), raw[b] / total});
        }
    return Environment("bench" + std::to_string(seed), S, A, P, 0, 1.0, 0.8,
                       std::move(table));
}

template <typename F>
double best_ms(F&& fn) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial_ms, double omp_ms, bool identical) {
    std::printf("%-22s %10.1f ms %10.1f ms   x%-5.2f %s\n", name, serial_ms, omp_ms,
                omp_ms > 0 ? serial_ms / omp_ms : 0.0,
                identical ? "identical" : "RESULTS DIFFER");
}

}  // namespace

int main() {
    std::printf("%-22s %13s %13s   %-6s %s\n", "kernel", "serial", "openmp", "speed",
                "check");

    {
        Environment env = random_env(7, 6, 3, 3, 2);
        ratl::EnsembleMember m{&env, env.initial_distribution(), 1.0, 1.0};
        double vs = 0.0, vo = 0.0;
        const double ts = best_ms([&] {
            vs = ratl::ensemble_best({&m, 1}, 8, ratl::ExecMode::serial, false).value;
        });
        const double to = best_ms([&] {
            vo = ratl::ensemble_best({&m, 1}, 8, ratl::ExecMode::openmp, false).value;
        });
        row("expectimax h=8", ts, to, vs == vo);
    }

    {
        std::vector<Environment> envs;
        for (std::uint64_t i = 0; i < 8; ++i) envs.push_back(random_env(20 + i, 5, 3, 3, 2));
        ratl::EnvironmentClass ec(std::move(envs), std::vector<double>(8, 1.0));
        ratl::PosteriorState ps(ec);
        double vs = 0.0, vo = 0.0;
        const double ts = best_ms([&] {
            vs = ratl::mixture_policy(ps, 6, ratl::ExecMode::serial).objective;
        });
        const double to = best_ms([&] {
            vo = ratl::mixture_policy(ps, 6, ratl::ExecMode::openmp).objective;
        });
        row("mixture step h=6", ts, to, vs == vo);
    }

    {
        ratl::Belief b({0.05, 0.1, 0.15, 0.2, 0.2, 0.3});
        auto dm = ratl::make_belief_oracle(b);
        double vs = 0.0, vo = 0.0;
        const double ts = best_ms(
            [&] { vs = ratl::cross_validate(dm, b, 200000, 1e-9, 11, ratl::ExecMode::serial); });
        const double to = best_ms(
            [&] { vo = ratl::cross_validate(dm, b, 200000, 1e-9, 11, ratl::ExecMode::openmp); });
        row("cross_validate n=2e5", ts, to, vs == vo);
    }

    {
        ratl::Belief b({0.02, 0.04, 0.08, 0.16, 0.2, 0.2, 0.1, 0.2});
        auto dm = ratl::make_belief_oracle(b);
        ratl::Belief rs = b, ro = b;
        const double ts = best_ms(
            [&] { rs = ratl::elicit_beliefs(dm, b.size(), 1e-8, 0, ratl::ExecMode::serial); });
        const double to = best_ms(
            [&] { ro = ratl::elicit_beliefs(dm, b.size(), 1e-8, 0, ratl::ExecMode::openmp); });
        bool same = true;
        for (std::size_t i = 0; i < b.size(); ++i) same = same && rs[i] == ro[i];
        row("elicit m=8 tol=1e-8", ts, to, same);
    }

    return 0;
}
