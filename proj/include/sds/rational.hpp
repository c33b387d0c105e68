#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sds {

using Rational = mpq_class;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when an exhaustive sweep or enumeration would exceed its budget.
class Refusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Accepts "p/q", "p" and decimal forms such as "1.25".
Rational parse_rational(std::string_view text);

// Canonical "p/q" form; integers print without a denominator.
std::string to_string(const Rational& q);

std::vector<Rational> parse_rational_list(std::string_view text, char sep = ',');

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

}  // namespace sds
