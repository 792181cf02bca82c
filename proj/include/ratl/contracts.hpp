#ifndef RATL_CONTRACTS_HPP
#define RATL_CONTRACTS_HPP

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "ratl/errors.hpp"
#include "ratl/exec.hpp"

namespace ratl {

// A bet over a finite outcome alphabet: payoffs[i] is the reward received
// when outcome i occurs and the contract was accepted.
class Contract {
public:
    Contract() = default;
    explicit Contract(std::vector<double> payoffs);
    Contract(std::initializer_list<double> payoffs);

    std::size_t size() const { return payoffs_.size(); }
    double operator[](std::size_t i) const { return payoffs_[i]; }
    const std::vector<double>& payoffs() const { return payoffs_; }

    Contract operator-() const;
    Contract& operator+=(const Contract& other);
    Contract& operator*=(double scale);
    friend Contract operator+(Contract a, const Contract& b) { return a += b; }
    friend Contract operator*(double s, Contract x) { return x *= s; }
    friend bool operator==(const Contract&, const Contract&) = default;

    std::string str() const;

private:
    std::vector<double> payoffs_;
};

enum class Decision { accept, reject, either };

const char* to_string(Decision d);

// The decision a rational maker must give for the negated contract:
// accept <-> reject, either <-> either.
Decision dual(Decision d);

// Non-negative outcome weights. A belief may be carried unnormalized (as
// elicitation ratios are) and normalized on demand.
class Belief {
public:
    Belief() = default;
    explicit Belief(std::vector<double> probs, bool normalize = true);
    Belief(std::initializer_list<double> probs);

    static Belief uniform(std::size_t alphabet_size);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const { return probs_; }
    bool normalized() const { return normalized_; }

    Belief normalize() const;

    std::string str() const;

private:
    std::vector<double> probs_;
    bool normalized_ = false;
};

// Opaque total decision rule over contracts of one alphabet.
using DecisionMaker = std::function<Decision(const Contract&)>;

// Sum_i p_i x_i. Throws dimension_error on length mismatch.
double expectation(const Belief& b, const Contract& x);

// Ternary decision with a tolerance band around the boundary hyperplane:
// accept when expectation > tol, reject when < -tol, either inside the band.
Decision decide(const Belief& b, const Contract& x, double tol = 1e-12);

// ---- ready-made oracles ----------------------------------------------------

// The decision maker induced by a belief; satisfies the axioms by
// construction.
DecisionMaker make_belief_oracle(Belief b, double tol = 1e-12);

// Accepts iff x[0] >= threshold. Violates conic closure (the accept set is a
// shifted half space, not a cone through the origin).
DecisionMaker make_affine_oracle(double threshold = -1.0);

// Accepts everything, including all-negative contracts.
DecisionMaker make_always_accept_oracle();

// decide() with the comparison reversed; rejects componentwise-positive
// contracts.
DecisionMaker make_sign_flipped_oracle(Belief b, double tol = 1e-12);

// ---- axiom checking --------------------------------------------------------

struct AxiomViolation {
    int axiom = 0;  // 1 completeness, 2 negation, 3 conic closure, 4 sign
    std::vector<Contract> witnesses;
    std::string detail;
};

struct AxiomReport {
    std::vector<AxiomViolation> violations;
    std::uint64_t queries = 0;

    bool ok() const { return violations.empty(); }
    bool has_violation(int axiom) const;
    std::string str() const;
};

struct AxiomCheckOptions {
    // lambda/gamma grid for the conic-closure probes
    std::vector<double> cone_grid = {0.0, 0.5, 1.0, 2.0, 10.0};
    // cap on sampled (x, y) pairs for the conic probe; pairs beyond the cap
    // are subsampled deterministically from the seed
    std::size_t max_pairs = 2000;
    ExecMode exec = default_exec_mode();
};

// Black-box test of the four rationality axioms on the given sample set
// (plus the all-ones and all-minus-ones probes). Returns every violation
// found with concrete witness contracts.
AxiomReport check_axioms(const DecisionMaker& dm,
                         const std::vector<Contract>& samples,
                         std::uint64_t seed,
                         const AxiomCheckOptions& options = {});

}  // namespace ratl

#endif
