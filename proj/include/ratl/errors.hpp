#ifndef RATL_ERRORS_HPP
#define RATL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ratl {

// Base class for everything thrown by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Vector lengths or alphabet sizes do not match.
class dimension_error : public error {
public:
    explicit dimension_error(const std::string& what) : error(what) {}
};

// An operation precondition was violated (bad tolerance, empty input, ...).
class precondition_error : public error {
public:
    explicit precondition_error(const std::string& what) : error(what) {}
};

// A decision-maker oracle contradicted the rationality axioms.
class irrationality_error : public error {
public:
    explicit irrationality_error(const std::string& what) : error(what) {}
};

// An oracle query budget was exhausted before convergence.
class budget_error : public error {
public:
    explicit budget_error(const std::string& what) : error(what) {}
};

// Conditioning on a zero-probability value or history.
class conditioning_error : public error {
public:
    explicit conditioning_error(const std::string& what) : error(what) {}
};

// Every environment in a class became inconsistent with the history.
class class_exhausted_error : public error {
public:
    explicit class_exhausted_error(const std::string& what) : error(what) {}
};

// A consistent environment offers zero optimal value, so relative skill
// is undefined.
class degenerate_environment_error : public error {
public:
    explicit degenerate_environment_error(const std::string& what) : error(what) {}
};

// A sequence tail bound admits divergence or cannot be certified.
class divergence_error : public error {
public:
    explicit divergence_error(const std::string& what) : error(what) {}
};

// Malformed input file; line is 1-based, 0 when unknown.
class parse_error : public error {
public:
    parse_error(const std::string& what, int line)
        : error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace ratl

#endif
