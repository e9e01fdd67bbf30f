#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tracelab {

/// Exact rational number. GMP keeps every result in lowest terms with a
/// positive denominator; values built from raw numerator/denominator pairs
/// go through make_rational, which canonicalizes.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);

/// Parses `INT` or `INT "/" POSINT`. Throws ParseError on anything else
/// ("1//2", "1/0", "0x3", " 1", ...).
Rational parse_rational(std::string_view text);

/// Lowest-terms "p/q" form, or "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Approximate decimal rendering for human consumption only.
double to_double(const Rational& r);

} // namespace tracelab
