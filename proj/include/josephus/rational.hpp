#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace josephus {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Exact value of a binary double; every finite double is a dyadic rational.
inline Rational exact_rational(double x) { return Rational(x); }

}  // namespace josephus
