#ifndef RATL_SEQSPACE_HPP
#define RATL_SEQSPACE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "ratl/errors.hpp"

namespace ratl {

// A scalar known up to a certified interval [value - error, value + error].
struct BoundedValue {
    double value = 0.0;
    double error = 0.0;
};

// Real sequence with an explicit head, an optional generated tail, and a
// declared geometric certificate: for k >= head_size(),
// |entry(k) * weight(k)| <= tail_scale * tail_ratio^(k - head_size()).
// The certificate is what makes weighted norms of an infinite object
// computable; the constructor spot-checks it on a window of the tail.
class WeightedSequence {
public:
    using Generator = std::function<double(std::size_t)>;

    WeightedSequence(std::vector<double> head, Generator tail, double tail_scale,
                     double tail_ratio, std::vector<double> head_weights = {},
                     Generator tail_weights = {}, double min_tail_weight = 1.0);

    // finitely supported sequence with unit weights
    static WeightedSequence finite(std::vector<double> head);

    double entry(std::size_t k) const;
    double weight(std::size_t k) const;
    std::size_t head_size() const { return head_.size(); }
    bool has_tail() const { return bool(tail_); }
    double tail_scale() const { return tail_scale_; }
    double tail_ratio() const { return tail_ratio_; }
    double min_tail_weight() const { return min_tail_weight_; }

    // certified bound on |entry(k) * weight(k)| for k >= head_size()
    double weighted_tail_bound(std::size_t k) const;

private:
    std::vector<double> head_;
    Generator tail_;
    double tail_scale_;
    double tail_ratio_;
    std::vector<double> head_weights_;
    Generator tail_weights_;
    double min_tail_weight_;
};

// Non-negative summable sequence (a belief over sequence indices): explicit
// head plus an optional tail dominated by tail_scale * tail_ratio^(k - n)
// with tail_ratio < 1, so the total mass is finite by construction.
class SummableBelief {
public:
    using Generator = std::function<double(std::size_t)>;

    SummableBelief(std::vector<double> head, Generator tail, double tail_scale,
                   double tail_ratio);

    static SummableBelief finite(std::vector<double> head);
    // p_k = first * ratio^k
    static SummableBelief geometric(double first, double ratio);

    double entry(std::size_t k) const;
    std::size_t head_size() const { return head_.size(); }
    bool has_tail() const { return bool(tail_); }
    double tail_scale() const { return tail_scale_; }
    double tail_ratio() const { return tail_ratio_; }

    // certified bound on sum_{k >= from} entry(k)
    double tail_sum_bound(std::size_t from) const;

private:
    std::vector<double> head_;
    Generator tail_;
    double tail_scale_;
    double tail_ratio_;
};

enum class NormKind { one, two, sup };

// Weighted norm of x: l1/l2/sup of the sequence entry(k) * weight(k), as a
// certified interval. Throws divergence_error when the declared tail admits
// an infinite l1/l2 norm.
BoundedValue norm(const WeightedSequence& x, NormKind p);

// sum_k p_k x_k as a certified interval; exact (error 0) when the sequences
// are finitely supported. Throws divergence_error when the product of the
// tail ratios reaches 1 and neither tail vanishes.
BoundedValue dual_pair(const SummableBelief& p, const WeightedSequence& x);

// Zero out entries k >= j, keeping weights.
WeightedSequence truncate(const WeightedSequence& x, std::size_t j);

struct MonotoneResult {
    bool converged = false;
    // smallest prefix length whose accept/reject decision provably agrees
    // with the full pairing (probe length when not converged)
    std::size_t j_stable = 0;
    BoundedValue full;
};

// Does the sign decision of sum_k p_k x_k (at tolerance tol) stabilize under
// truncation? Certifies a prefix length J such that every truncation x^j,
// j >= J, yields the same accept/reject decision as the full sequence.
MonotoneResult monotone_check(const SummableBelief& p, const WeightedSequence& x,
                              double tol);

}  // namespace ratl

#endif
