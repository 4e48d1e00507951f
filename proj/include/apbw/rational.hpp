#ifndef APBW_RATIONAL_HPP
#define APBW_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace apbw {

// Exact arithmetic everywhere; no floating point anywhere in the library.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

// Canonical form "p" or "p/q" with q > 0 and gcd(p,q) = 1.
std::string rat_to_string(const Rat& r);

// Parses "p", "-p", "p/q". Throws Error(Structural) on malformed input.
Rat rat_from_string(const std::string& s);

} // namespace apbw

#endif
