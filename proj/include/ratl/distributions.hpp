#ifndef RATL_DISTRIBUTIONS_HPP
#define RATL_DISTRIBUTIONS_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ratl/contracts.hpp"

namespace ratl {

// Observed prefix of a symbol sequence.
struct History {
    std::vector<std::size_t> symbols;

    History() = default;
    History(std::initializer_list<std::size_t> s) : symbols(s) {}
    std::size_t length() const { return symbols.size(); }
};

// Dense joint distribution over a product alphabet, stored row-major (the
// last variable varies fastest). Probabilities are normalized on
// construction.
class JointDistribution {
public:
    // desk-scale cap on the dense table
    static constexpr std::size_t kMaxEntries = std::size_t{1} << 24;

    JointDistribution(std::vector<std::size_t> shape, std::vector<double> probs);

    std::size_t num_variables() const { return shape_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t table_size() const { return probs_.size(); }
    const std::vector<double>& probs() const { return probs_; }

    double at_flat(std::size_t flat) const { return probs_[flat]; }
    double at(const std::vector<std::size_t>& tuple) const;
    std::size_t flat_index(const std::vector<std::size_t>& tuple) const;

    // Belief over the flattened outcome tuples; contracts over the product
    // alphabet pair with this directly.
    Belief as_belief() const { return Belief(probs_); }

    void write(std::ostream& os) const;
    static JointDistribution read(std::istream& is);

private:
    std::vector<std::size_t> shape_;
    std::vector<double> probs_;
};

// Sums out every variable not in keep; keep indices must be strictly
// increasing.
JointDistribution marginalize(const JointDistribution& d,
                              const std::vector<std::size_t>& keep);

// Pr(. | var = value) over the remaining variables. Conditioning on a
// zero-probability value throws conditioning_error.
JointDistribution condition(const JointDistribution& d, std::size_t var,
                            std::size_t value);

// |Pr(i0) Pr(j0|i0) - Pr(j0) Pr(i0|j0)| for a two-variable joint, computed
// through both conditional routes.
double verify_bayes(const JointDistribution& d, std::size_t i0, std::size_t j0);

// Next-symbol belief after history h under a sequence distribution:
// condition on the past, marginalize the future, in one pass.
JointDistribution informed_posterior(const JointDistribution& d, const History& h);

}  // namespace ratl

#endif
