// command-line front end: elicitation demos, axiom checks, planning,
// mixture-agent experiments, sequence-space demos
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ratl/contracts.hpp"
#include "ratl/distributions.hpp"
#include "ratl/elicitation.hpp"
#include "ratl/environment.hpp"
#include "ratl/errors.hpp"
#include "ratl/exec.hpp"
#include "ratl/mixture.hpp"
#include "ratl/planner.hpp"
#include "ratl/seqspace.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

ratl::Belief parse_belief_text(const std::string& text) {
    std::istringstream ss(text);
    std::vector<double> p;
    std::string tok;
    int col = 0;
    while (ss >> tok) {
        ++col;
        try {
            std::size_t pos = 0;
            p.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ratl::parse_error("belief entry " + std::to_string(col) +
                                        " is not a number: '" + tok + "'",
                                    0);
        }
    }
    if (p.empty()) throw ratl::parse_error("belief text holds no entries", 0);
    return ratl::Belief(std::move(p));
}

ratl::Belief load_belief_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ratl::parse_error("cannot open belief file " + path, 0);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_belief_text(buf.str());
}

std::string belief_text(const ratl::Belief& b) {
    std::string out;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (i) out += ' ';
        out += format_double(b[i]);
    }
    return out;
}

void write_or_print(const std::optional<std::string>& out_path, const std::string& body) {
    if (!out_path) {
        std::cout << body;
        return;
    }
    std::ofstream os(*out_path, std::ios::binary);
    if (!os) throw ratl::precondition_error("cannot write output file " + *out_path);
    os << body;
}

struct CommonOpts {
    std::string exec = "omp";
    ratl::ExecMode mode() const {
        return exec == "serial" ? ratl::ExecMode::serial : ratl::ExecMode::openmp;
    }
};

int run_elicit(const ratl::Belief& target, double tol, std::uint64_t seed,
               std::size_t samples, const CommonOpts& common,
               const std::optional<std::string>& out_path) {
    auto dm = ratl::make_belief_oracle(target);
    ratl::Belief recovered =
        ratl::elicit_beliefs(dm, target.size(), tol, 0, common.mode());
    double linf = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
        linf = std::max(linf, std::fabs(recovered[i] - target[i]));
    const double agree =
        ratl::cross_validate(dm, recovered, samples, tol, seed, common.mode());

    std::ostringstream body;
    body << "belief: " << belief_text(target) << "\n";
    body << "recovered: " << belief_text(recovered) << "\n";
    body << "linf_error: " << format_double(linf) << "\n";
    body << "agreement: " << format_double(agree) << "\n";
    write_or_print(out_path, body.str());
    return 0;
}

int run_axioms(const std::string& oracle, const ratl::Belief& b, std::size_t samples,
               std::uint64_t seed, double tol, const CommonOpts& common) {
    ratl::DecisionMaker dm;
    if (oracle == "belief") dm = ratl::make_belief_oracle(b, tol);
    else if (oracle == "affine") dm = ratl::make_affine_oracle();
    else if (oracle == "always-accept") dm = ratl::make_always_accept_oracle();
    else if (oracle == "sign-flipped") dm = ratl::make_sign_flipped_oracle(b, tol);
    else throw ratl::precondition_error("unknown oracle kind " + oracle);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<ratl::Contract> probes;
    probes.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> x(b.size());
        for (double& v : x) v = u(rng);
        probes.emplace_back(std::move(x));
    }
    ratl::AxiomReport report = ratl::check_axioms(dm, probes, seed + 1,
                                                  {.exec = common.mode()});
    std::cout << "oracle: " << oracle << "\n";
    std::cout << "samples: " << samples << "\n";
    std::cout << "queries: " << report.queries << "\n";
    std::cout << "violations: " << report.violations.size() << "\n";
    for (const auto& v : report.violations)
        std::cout << "axiom " << v.axiom << ": " << v.detail << "\n";
    return 0;
}

int run_plan(const std::string& env_path, std::optional<std::size_t> horizon,
             std::optional<double> tol, std::uint64_t seed, const CommonOpts& common) {
    ratl::Environment env = ratl::Environment::load(env_path);
    const std::size_t h =
        horizon ? *horizon
        : tol   ? std::max<std::size_t>(1, ratl::horizon_for_tolerance(env, *tol))
                : 8;
    ratl::PlanResult plan =
        ratl::optimal_value(env, 0, ratl::HistoryRecord{}, h, common.mode());

    std::cout << "env: " << env.id() << "\n";
    std::cout << "horizon: " << h << "\n";
    std::cout << "vstar: " << format_double(plan.value) << "\n";
    std::cout << "tail_bound: " << format_double(plan.tail_bound) << "\n";
    std::cout << "rollout:\n";
    std::mt19937_64 rng(seed);
    std::size_t state = env.initial_state();
    std::vector<std::size_t> seen;
    double total = 0.0;
    for (std::size_t t = 0; t < h; ++t) {
        const std::size_t a = plan.policy.action_at(seen);
        const auto& br = env.sample_step(state, a, rng);
        const double r = br.reward * std::pow(env.discount(), double(t));
        total += r;
        std::cout << "  step " << t << ": action " << a << " percept " << br.percept
                  << " reward " << format_double(r) << "\n";
        seen.push_back(br.percept);
        state = br.next_state;
    }
    std::cout << "realized: " << format_double(total) << "\n";
    return 0;
}

int run_mixture(const std::string& cls_path, const std::string& true_id,
                std::size_t steps, std::optional<std::size_t> horizon,
                std::optional<double> tol, std::uint64_t seed,
                const std::string& format, const std::optional<std::string>& out_path,
                const CommonOpts& common, const std::string& cmdline) {
    ratl::EnvironmentClass ec = ratl::EnvironmentClass::load(cls_path);
    std::size_t h = horizon ? *horizon : 6;
    if (!horizon && tol) {
        h = 0;
        for (std::size_t i = 0; i < ec.size(); ++i)
            h = std::max(h, ratl::horizon_for_tolerance(ec.env(i), *tol));
        h = std::max<std::size_t>(1, h);
    }
    ratl::SkillCurve curve =
        ratl::run_optimality_experiment(ec, true_id, steps, h, seed, common.mode());
    curve.provenance = {"cmd: " + cmdline, "seed: " + std::to_string(seed),
                        "version: " + std::string(kVersion)};

    if (format == "json") {
        nlohmann::json points = nlohmann::json::array();
        for (const auto& p : curve.points)
            points.push_back({{"step", p.step},
                              {"action", p.action},
                              {"percept", p.percept},
                              {"reward", p.reward},
                              {"W", p.w},
                              {"Delta", p.delta},
                              {"surviving_envs", p.surviving}});
        nlohmann::json doc = {
            {"provenance",
             {{"cmd", cmdline}, {"seed", seed}, {"version", kVersion}}},
            {"points", points}};
        write_or_print(out_path, doc.dump(2) + "\n");
    } else {
        std::ostringstream body;
        ratl::write_skill_csv(curve, body);
        write_or_print(out_path, body.str());
    }
    return 0;
}

int run_seqspace(double ratio, double tol) {
    using ratl::SummableBelief;
    using ratl::WeightedSequence;

    // belief p_k = (1 - ratio) * ratio^k paired with the all-ones sequence:
    // the pairing is exactly 1 and truncations approach it monotonically
    SummableBelief p = SummableBelief::geometric(1.0 - ratio, ratio);
    WeightedSequence ones({}, [](std::size_t) { return 1.0; }, 1.0, 1.0);

    ratl::BoundedValue full = ratl::dual_pair(p, ones);
    std::cout << "pairing: value " << format_double(full.value) << " error "
              << format_double(full.error) << "\n";
    for (std::size_t j : {1, 2, 4, 8}) {
        ratl::BoundedValue t = ratl::dual_pair(p, ratl::truncate(ones, j));
        std::cout << "truncated j=" << j << ": " << format_double(t.value) << "\n";
    }
    ratl::MonotoneResult mono = ratl::monotone_check(p, ones, tol);
    std::cout << "monotone: " << (mono.converged ? "converged" : "not converged")
              << " J " << mono.j_stable << "\n";

    // a contract engineered to sit on the decision boundary never stabilizes
    WeightedSequence knife({1.0 - 1.0 / (1.0 - ratio)}, [](std::size_t) { return 1.0; },
                           1.0, 1.0);
    ratl::MonotoneResult edge = ratl::monotone_check(p, knife, tol);
    std::cout << "boundary: " << (edge.converged ? "converged" : "not converged")
              << " probe " << edge.j_stable << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rational decision making over contracts, environments and mixtures"};
    app.require_subcommand(1);
    app.fallthrough();
    const std::string cmdline = join_args(argc, argv);

    CommonOpts common;
    app.add_option("--exec", common.exec, "execution mode")
        ->check(CLI::IsMember({"serial", "omp"}))
        ->capture_default_str();

    double tol = 1e-6;
    std::uint64_t seed = 1;
    std::size_t steps = 12;
    std::optional<std::size_t> horizon;
    std::optional<std::string> out_path;
    std::string format = "csv";

    // elicit
    auto* elicit = app.add_subcommand("elicit", "recover a belief from its own oracle");
    std::string belief_text_opt, belief_file, preset = "skewed";
    std::size_t alphabet = 4, samples = 2000;
    elicit->add_option("--belief", belief_text_opt, "belief as \"p1 p2 ...\"");
    elicit->add_option("--belief-file", belief_file, "file holding the belief text");
    elicit->add_option("--preset", preset, "built-in belief")
        ->check(CLI::IsMember({"skewed", "uniform", "decay"}));
    elicit->add_option("--alphabet", alphabet, "alphabet size for presets");
    elicit->add_option("--samples", samples, "cross-validation sample count");
    elicit->add_option("--tol", tol, "elicitation tolerance");
    elicit->add_option("--seed", seed, "random seed");
    elicit->add_option("--out", out_path, "write the report here instead of stdout");

    // axioms
    auto* axioms = app.add_subcommand("axioms", "probe a decision maker for axiom violations");
    std::string oracle = "belief";
    axioms->add_option("--oracle", oracle, "decision maker under test")
        ->check(CLI::IsMember({"belief", "affine", "always-accept", "sign-flipped"}));
    axioms->add_option("--belief", belief_text_opt, "belief as \"p1 p2 ...\"");
    axioms->add_option("--samples", samples, "number of sampled contracts");
    axioms->add_option("--tol", tol, "decision tolerance");
    axioms->add_option("--seed", seed, "random seed");

    // plan
    auto* plan = app.add_subcommand("plan", "optimal finite-horizon plan for one environment");
    std::string env_path;
    plan->add_option("--env", env_path, "environment file")->required();
    plan->add_option("--horizon", horizon, "planning depth (default 8)");
    auto* plan_tol =
        plan->add_option("--tol", tol, "derive the depth from this tail-bound tolerance");
    plan->add_option("--seed", seed, "random seed for the rollout");

    // mixture
    auto* mixture = app.add_subcommand("mixture", "run the posterior-reweighting agent");
    std::string cls_path, true_id;
    mixture->add_option("--class", cls_path, "class file")->required();
    mixture->add_option("--true", true_id, "id of the environment actually played")->required();
    mixture->add_option("--steps", steps, "interaction steps");
    mixture->add_option("--horizon", horizon, "planning depth (default 6)");
    auto* mixture_tol =
        mixture->add_option("--tol", tol, "derive the depth from this tail-bound tolerance");
    mixture->add_option("--seed", seed, "random seed");
    mixture->add_option("--out", out_path, "output file (default: stdout)");
    mixture->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    // seqspace
    auto* seqspace = app.add_subcommand("seqspace", "pairing and truncation demos");
    double ratio = 0.5;
    seqspace->add_option("--ratio", ratio, "geometric belief ratio");
    seqspace->add_option("--tol", tol, "decision tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ratl::set_default_exec_mode(common.mode());
        if (*elicit) {
            ratl::Belief b = !belief_text_opt.empty() ? parse_belief_text(belief_text_opt)
                             : !belief_file.empty()   ? load_belief_file(belief_file)
                             : [&] {
                                   if (preset == "uniform") return ratl::Belief::uniform(alphabet);
                                   if (preset == "decay") {
                                       std::vector<double> p(alphabet);
                                       double v = 1.0;
                                       for (double& e : p) { e = v; v /= 2.0; }
                                       return ratl::Belief(std::move(p));
                                   }
                                   return ratl::Belief({0.25, 0.75});
                               }();
            return run_elicit(b, tol, seed, samples, common, out_path);
        }
        if (*axioms) {
            ratl::Belief b = belief_text_opt.empty() ? ratl::Belief({0.25, 0.75})
                                                     : parse_belief_text(belief_text_opt);
            return run_axioms(oracle, b, samples, seed, tol, common);
        }
        if (*plan)
            return run_plan(env_path, horizon,
                            plan_tol->count() ? std::optional<double>(tol) : std::nullopt,
                            seed, common);
        if (*mixture)
            return run_mixture(cls_path, true_id, steps, horizon,
                               mixture_tol->count() ? std::optional<double>(tol)
                                                    : std::nullopt,
                               seed, format, out_path, common, cmdline);
        if (*seqspace) return run_seqspace(ratio, tol);
    } catch (const ratl::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ratl::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
