#include "ratl/distributions.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "textio.hpp"

namespace ratl {

JointDistribution::JointDistribution(std::vector<std::size_t> shape,
                                     std::vector<double> probs)
    : shape_(std::move(shape)), probs_(std::move(probs)) {
    if (shape_.empty()) throw precondition_error("joint: empty shape");
    std::size_t expected = 1;
    for (std::size_t s : shape_) {
        if (s == 0) throw precondition_error("joint: zero-size alphabet");
        if (expected > kMaxEntries / s) {
            throw precondition_error("joint: table exceeds the dense-storage cap");
        }
        expected *= s;
    }
    if (probs_.size() != expected) {
        throw dimension_error("joint: table size does not match shape");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) {
            throw precondition_error("joint: probabilities must be finite and >= 0");
        }
        sum += p;
    }
    if (sum <= 0.0) throw precondition_error("joint: total mass must be positive");
    for (double& p : probs_) p /= sum;
}

std::size_t JointDistribution::flat_index(const std::vector<std::size_t>& tuple) const {
    if (tuple.size() != shape_.size()) {
        throw dimension_error("joint: tuple arity does not match shape");
    }
    std::size_t flat = 0;
    for (std::size_t v = 0; v < shape_.size(); ++v) {
        if (tuple[v] >= shape_[v]) {
            throw precondition_error("joint: symbol out of range");
        }
        flat = flat * shape_[v] + tuple[v];
    }
    return flat;
}

double JointDistribution::at(const std::vector<std::size_t>& tuple) const {
    return probs_[flat_index(tuple)];
}

void JointDistribution::write(std::ostream& os) const {
    os << "shape:";
    for (std::size_t s : shape_) os << ' ' << s;
    os << '\n';
    for (double p : probs_) os << detail::format_double(p) << '\n';
}

JointDistribution JointDistribution::read(std::istream& is) {
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) throw parse_error("missing shape header", 1);
    ++lineno;
    std::istringstream header(line);
    std::string tag;
    header >> tag;
    if (tag != "shape:") throw parse_error("expected 'shape:' header", lineno);
    std::vector<std::size_t> shape;
    std::string tok;
    while (header >> tok) {
        long v = detail::parse_long(tok, lineno);
        if (v <= 0) throw parse_error("alphabet sizes must be positive", lineno);
        shape.push_back(static_cast<std::size_t>(v));
    }
    if (shape.empty()) throw parse_error("shape header lists no variables", lineno);

    std::size_t expected = 1;
    for (std::size_t s : shape) expected *= s;
    std::vector<double> probs;
    probs.reserve(expected);
    while (probs.size() < expected) {
        if (!std::getline(is, line)) {
            throw parse_error("table truncated: expected " + std::to_string(expected) +
                                  " probabilities",
                              lineno);
        }
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        while (row >> tok) probs.push_back(detail::parse_double(tok, lineno));
    }
    if (probs.size() != expected) {
        throw parse_error("table holds more probabilities than the shape admits",
                          lineno);
    }
    return JointDistribution(std::move(shape), std::move(probs));
}

JointDistribution marginalize(const JointDistribution& d,
                              const std::vector<std::size_t>& keep) {
    if (keep.empty()) throw precondition_error("marginalize: keep set is empty");
    const auto& shape = d.shape();
    for (std::size_t k = 0; k < keep.size(); ++k) {
        if (keep[k] >= shape.size()) {
            throw precondition_error("marginalize: variable index out of range");
        }
        if (k > 0 && keep[k] <= keep[k - 1]) {
            throw precondition_error("marginalize: keep indices must be increasing");
        }
    }

    std::vector<std::size_t> out_shape;
    for (std::size_t v : keep) out_shape.push_back(shape[v]);
    std::size_t out_size = 1;
    for (std::size_t s : out_shape) out_size *= s;

    std::vector<double> out(out_size, 0.0);
    std::vector<std::size_t> tuple(shape.size(), 0);
    for (std::size_t flat = 0; flat < d.table_size(); ++flat) {
        std::size_t out_flat = 0;
        for (std::size_t k = 0; k < keep.size(); ++k) {
            out_flat = out_flat * shape[keep[k]] + tuple[keep[k]];
        }
        out[out_flat] += d.at_flat(flat);

        for (std::size_t v = shape.size(); v-- > 0;) {
            if (++tuple[v] < shape[v]) break;
            tuple[v] = 0;
        }
    }
    return JointDistribution(std::move(out_shape), std::move(out));
}

JointDistribution condition(const JointDistribution& d, std::size_t var,
                            std::size_t value) {
    const auto& shape = d.shape();
    if (var >= shape.size()) {
        throw precondition_error("condition: variable index out of range");
    }
    if (value >= shape[var]) throw precondition_error("condition: symbol out of range");
    if (shape.size() < 2) {
        throw precondition_error("condition: no variables would remain");
    }

    std::vector<std::size_t> out_shape;
    for (std::size_t v = 0; v < shape.size(); ++v) {
        if (v != var) out_shape.push_back(shape[v]);
    }
    std::size_t out_size = 1;
    for (std::size_t s : out_shape) out_size *= s;

    std::vector<double> slice(out_size, 0.0);
    double mass = 0.0;
    std::vector<std::size_t> tuple(shape.size(), 0);
    for (std::size_t flat = 0; flat < d.table_size(); ++flat) {
        if (tuple[var] == value) {
            std::size_t out_flat = 0;
            for (std::size_t v = 0; v < shape.size(); ++v) {
                if (v != var) out_flat = out_flat * shape[v] + tuple[v];
            }
            slice[out_flat] = d.at_flat(flat);
            mass += d.at_flat(flat);
        }
        for (std::size_t v = shape.size(); v-- > 0;) {
            if (++tuple[v] < shape[v]) break;
            tuple[v] = 0;
        }
    }
    if (mass <= 0.0) {
        throw conditioning_error("condition: conditioning value has zero probability");
    }
    return JointDistribution(std::move(out_shape), std::move(slice));
}

double verify_bayes(const JointDistribution& d, std::size_t i0, std::size_t j0) {
    if (d.num_variables() != 2) {
        throw precondition_error("verify_bayes: needs a two-variable joint");
    }
    const std::size_t n_j = d.shape()[1];
    if (i0 >= d.shape()[0] || j0 >= n_j) {
        throw precondition_error("verify_bayes: symbol out of range");
    }

    double p_i0 = 0.0, p_j0 = 0.0;
    for (std::size_t j = 0; j < n_j; ++j) p_i0 += d.at_flat(i0 * n_j + j);
    for (std::size_t i = 0; i < d.shape()[0]; ++i) p_j0 += d.at_flat(i * n_j + j0);
    if (p_i0 <= 0.0 || p_j0 <= 0.0) {
        throw conditioning_error("verify_bayes: zero marginal");
    }

    const double p_joint = d.at_flat(i0 * n_j + j0);
    const double lhs = p_i0 * (p_joint / p_i0);
    const double rhs = p_j0 * (p_joint / p_j0);
    return std::abs(lhs - rhs);
}

JointDistribution informed_posterior(const JointDistribution& d, const History& h) {
    const auto& shape = d.shape();
    const std::size_t t = h.length();
    if (t >= shape.size()) {
        throw precondition_error("informed_posterior: no next position after history");
    }
    for (std::size_t k = 0; k < t; ++k) {
        if (h.symbols[k] >= shape[k]) {
            throw precondition_error("informed_posterior: history symbol out of range");
        }
    }

    std::vector<double> next(shape[t], 0.0);
    double mass = 0.0;
    std::vector<std::size_t> tuple(shape.size(), 0);
    for (std::size_t flat = 0; flat < d.table_size(); ++flat) {
        bool matches = true;
        for (std::size_t k = 0; k < t; ++k) {
            if (tuple[k] != h.symbols[k]) {
                matches = false;
                break;
            }
        }
        if (matches) {
            next[tuple[t]] += d.at_flat(flat);
            mass += d.at_flat(flat);
        }
        for (std::size_t v = shape.size(); v-- > 0;) {
            if (++tuple[v] < shape[v]) break;
            tuple[v] = 0;
        }
    }
    if (mass <= 0.0) {
        throw conditioning_error("informed_posterior: zero-probability history");
    }
    return JointDistribution({shape[t]}, std::move(next));
}

}  // namespace ratl
