#ifndef CPDCERT_RATIONAL_HPP
#define CPDCERT_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <type_traits>

namespace cpdcert {

/// Exact scalar backend. cpp_rational keeps every value in reduced form
/// with positive denominator, so equality tests are structural.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parse "p", "-p/q", "3.25" (decimal) into an exact rational.
Rat parse_rational(const std::string& text);

/// Exact conversion; every finite double is a dyadic rational.
Rat rational_from_double(double x);

std::string rational_to_string(const Rat& q);

double to_double(const Rat& q);

template <class S>
inline constexpr bool is_exact_scalar = std::is_same_v<S, Rat>;

} // namespace cpdcert

#endif
