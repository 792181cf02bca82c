#include "ratl/seqspace.hpp"

#include <algorithm>
#include <cmath>

namespace ratl {

namespace {

// how far past the explicit heads generated tails are probed
constexpr std::size_t kProbe = 64;
constexpr std::size_t kSpotCheck = 32;
constexpr double kSlack = 1.0 + 1e-9;

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw precondition_error(std::string(what) + " must be finite");
}

}  // namespace

WeightedSequence::WeightedSequence(std::vector<double> head, Generator tail,
                                   double tail_scale, double tail_ratio,
                                   std::vector<double> head_weights,
                                   Generator tail_weights, double min_tail_weight)
    : head_(std::move(head)),
      tail_(std::move(tail)),
      tail_scale_(tail_scale),
      tail_ratio_(tail_ratio),
      head_weights_(std::move(head_weights)),
      tail_weights_(std::move(tail_weights)),
      min_tail_weight_(min_tail_weight) {
    check_finite(head_, "sequence entries");
    check_finite(head_weights_, "sequence weights");
    if (!head_weights_.empty() && head_weights_.size() != head_.size())
        throw dimension_error("need one weight per head entry (or none)");
    for (double w : head_weights_)
        if (!(w > 0.0)) throw precondition_error("weights must be positive");
    if (tail_) {
        if (!std::isfinite(tail_scale_) || tail_scale_ < 0.0)
            throw precondition_error("tail scale must be finite and non-negative");
        if (!(tail_ratio_ >= 0.0) || tail_ratio_ > 1.0)
            throw precondition_error("tail ratio must lie in [0, 1]");
        if (!(min_tail_weight_ > 0.0))
            throw precondition_error("minimum tail weight must be positive");
        // trust, but verify a window of the declared certificate
        for (std::size_t k = head_.size(); k < head_.size() + kSpotCheck; ++k) {
            const double w = weight(k);
            if (!(w > 0.0)) throw precondition_error("weights must be positive");
            if (k >= head_weights_.size() && w < min_tail_weight_ / kSlack)
                throw precondition_error("weight drops below the declared tail minimum");
            if (std::fabs(entry(k)) * w > weighted_tail_bound(k) * kSlack + 1e-300)
                throw precondition_error("declared tail bound does not cover the sequence");
        }
    } else {
        tail_scale_ = 0.0;
        tail_ratio_ = 0.0;
    }
}

WeightedSequence WeightedSequence::finite(std::vector<double> head) {
    return WeightedSequence(std::move(head), nullptr, 0.0, 0.0);
}

double WeightedSequence::entry(std::size_t k) const {
    if (k < head_.size()) return head_[k];
    return tail_ ? tail_(k) : 0.0;
}

double WeightedSequence::weight(std::size_t k) const {
    if (k < head_weights_.size()) return head_weights_[k];
    return tail_weights_ ? tail_weights_(k) : 1.0;
}

double WeightedSequence::weighted_tail_bound(std::size_t k) const {
    if (!tail_) return 0.0;
    return tail_scale_ * std::pow(tail_ratio_, double(k - head_.size()));
}

SummableBelief::SummableBelief(std::vector<double> head, Generator tail,
                               double tail_scale, double tail_ratio)
    : head_(std::move(head)),
      tail_(std::move(tail)),
      tail_scale_(tail_scale),
      tail_ratio_(tail_ratio) {
    check_finite(head_, "belief entries");
    for (double p : head_)
        if (p < 0.0) throw precondition_error("belief entries must be non-negative");
    if (tail_) {
        if (!std::isfinite(tail_scale_) || tail_scale_ < 0.0)
            throw precondition_error("tail scale must be finite and non-negative");
        if (!(tail_ratio_ >= 0.0) || tail_ratio_ >= 1.0) {
            if (tail_scale_ > 0.0)
                throw divergence_error("belief tail with ratio >= 1 is not summable");
            tail_ratio_ = 0.0;
        }
        for (std::size_t k = head_.size(); k < head_.size() + kSpotCheck; ++k) {
            const double p = entry(k);
            if (p < 0.0) throw precondition_error("belief entries must be non-negative");
            if (p > tail_scale_ * std::pow(tail_ratio_, double(k - head_.size())) * kSlack + 1e-300)
                throw precondition_error("declared tail bound does not cover the belief");
        }
    } else {
        tail_scale_ = 0.0;
        tail_ratio_ = 0.0;
    }
}

SummableBelief SummableBelief::finite(std::vector<double> head) {
    return SummableBelief(std::move(head), nullptr, 0.0, 0.0);
}

SummableBelief SummableBelief::geometric(double first, double ratio) {
    if (!(first >= 0.0) || !std::isfinite(first))
        throw precondition_error("geometric belief needs a non-negative first entry");
    if (!(ratio >= 0.0) || ratio >= 1.0)
        throw divergence_error("geometric belief needs a ratio in [0, 1)");
    return SummableBelief({}, [first, ratio](std::size_t k) {
        return first * std::pow(ratio, double(k));
    }, first, ratio);
}

double SummableBelief::entry(std::size_t k) const {
    if (k < head_.size()) return head_[k];
    return tail_ ? tail_(k) : 0.0;
}

double SummableBelief::tail_sum_bound(std::size_t from) const {
    double total = 0.0;
    for (std::size_t k = from; k < head_.size(); ++k) total += head_[k];
    if (!tail_ || tail_scale_ == 0.0) return total;
    const std::size_t start = std::max(from, head_.size());
    return total + tail_scale_ * std::pow(tail_ratio_, double(start - head_.size())) /
                       (1.0 - tail_ratio_);
}

BoundedValue norm(const WeightedSequence& x, NormKind p) {
    const std::size_t probe_end = x.head_size() + (x.has_tail() ? kProbe : 0);
    const bool open = x.has_tail() && x.tail_scale() > 0.0;
    switch (p) {
        case NormKind::sup: {
            double lo = 0.0;
            for (std::size_t k = 0; k < probe_end; ++k)
                lo = std::max(lo, std::fabs(x.entry(k)) * x.weight(k));
            const double rem = open ? x.weighted_tail_bound(probe_end) : 0.0;
            const double hi = std::max(lo, rem);
            return {(lo + hi) / 2.0, (hi - lo) / 2.0};
        }
        case NormKind::one: {
            double partial = 0.0;
            for (std::size_t k = 0; k < probe_end; ++k)
                partial += std::fabs(x.entry(k)) * x.weight(k);
            double rem = 0.0;
            if (open) {
                if (x.tail_ratio() >= 1.0)
                    throw divergence_error("weighted l1 norm: declared tail does not vanish");
                rem = x.weighted_tail_bound(probe_end) / (1.0 - x.tail_ratio());
            }
            return {partial + rem / 2.0, rem / 2.0};
        }
        case NormKind::two: {
            double partial2 = 0.0;
            for (std::size_t k = 0; k < probe_end; ++k) {
                const double v = x.entry(k) * x.weight(k);
                partial2 += v * v;
            }
            double rem2 = 0.0;
            if (open) {
                if (x.tail_ratio() >= 1.0)
                    throw divergence_error("weighted l2 norm: declared tail does not vanish");
                const double b = x.weighted_tail_bound(probe_end);
                rem2 = b * b / (1.0 - x.tail_ratio() * x.tail_ratio());
            }
            const double lo = std::sqrt(partial2);
            const double hi = std::sqrt(partial2 + rem2);
            return {(lo + hi) / 2.0, (hi - lo) / 2.0};
        }
    }
    throw precondition_error("unknown norm kind");
}

namespace {

struct PairProbe {
    std::vector<double> terms;  // p_k * x_k for k < terms.size()
    double rem = 0.0;           // certified bound on the omitted tail
};

PairProbe pair_probe(const SummableBelief& p, const WeightedSequence& x) {
    const bool any_tail = p.has_tail() || x.has_tail();
    const std::size_t probe_end =
        std::max(p.head_size(), x.head_size()) + (any_tail ? kProbe : 0);
    PairProbe out;
    out.terms.reserve(probe_end);
    for (std::size_t k = 0; k < probe_end; ++k)
        out.terms.push_back(p.entry(k) * x.entry(k));
    const double bp = p.has_tail() ? p.tail_scale() : 0.0;
    const double bx = x.has_tail() ? x.tail_scale() : 0.0;
    if (bp > 0.0 && bx > 0.0) {
        const double rr = p.tail_ratio() * x.tail_ratio();
        if (rr >= 1.0)
            throw divergence_error("pairing tail cannot be certified: ratios multiply to 1");
        const double first =
            bp * std::pow(p.tail_ratio(), double(probe_end - p.head_size())) *
            (bx * std::pow(x.tail_ratio(), double(probe_end - x.head_size())) /
             x.min_tail_weight());
        out.rem = first / (1.0 - rr);
    }
    return out;
}

enum class SignDecision { accept, reject, boundary };

SignDecision decide_scalar(double v, double tol) {
    if (v > tol) return SignDecision::accept;
    if (v < -tol) return SignDecision::reject;
    return SignDecision::boundary;
}

}  // namespace

BoundedValue dual_pair(const SummableBelief& p, const WeightedSequence& x) {
    PairProbe probe = pair_probe(p, x);
    double total = 0.0;
    for (double t : probe.terms) total += t;
    return {total, probe.rem};
}

WeightedSequence truncate(const WeightedSequence& x, std::size_t j) {
    std::vector<double> head(j), weights(j);
    for (std::size_t k = 0; k < j; ++k) {
        head[k] = x.entry(k);
        weights[k] = x.weight(k);
    }
    return WeightedSequence(std::move(head), nullptr, 0.0, 0.0, std::move(weights),
                            nullptr, x.min_tail_weight());
}

MonotoneResult monotone_check(const SummableBelief& p, const WeightedSequence& x,
                              double tol) {
    if (!(tol >= 0.0)) throw precondition_error("tolerance must be non-negative");
    PairProbe probe = pair_probe(p, x);
    const std::size_t pe = probe.terms.size();

    MonotoneResult res;
    double total = 0.0;
    for (double t : probe.terms) total += t;
    res.full = {total, probe.rem};
    res.j_stable = pe;

    const SignDecision d_full = res.full.value - res.full.error > tol
                                    ? SignDecision::accept
                                    : (res.full.value + res.full.error < -tol
                                           ? SignDecision::reject
                                           : SignDecision::boundary);
    if (d_full == SignDecision::boundary) return res;  // nothing to stabilize on

    // R(j) bounds |full - prefix_j|; it shrinks as j grows
    std::vector<double> suffix(pe + 1);
    suffix[pe] = probe.rem;
    for (std::size_t j = pe; j-- > 0;)
        suffix[j] = suffix[j + 1] + std::fabs(probe.terms[j]);

    const double margin = std::fabs(res.full.value) - res.full.error - tol;
    std::size_t j_cert = pe + 1;
    for (std::size_t j = 0; j <= pe; ++j)
        if (suffix[j] < margin) {
            j_cert = j;
            break;
        }
    if (j_cert > pe) return res;  // tail too heavy to certify within the probe

    // extend downward while the explicit prefix sums still agree
    std::vector<double> prefix(pe + 1, 0.0);
    for (std::size_t j = 0; j < pe; ++j) prefix[j + 1] = prefix[j] + probe.terms[j];
    std::size_t j = j_cert;
    while (j > 0 && decide_scalar(prefix[j - 1], tol) == d_full) --j;
    res.converged = true;
    res.j_stable = j;
    return res;
}

}  // namespace ratl
