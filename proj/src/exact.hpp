#pragma once

// Exact rational arithmetic over binary64 inputs. Every finite double is a
// dyadic rational, so conversions here are lossless.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace covshift::detail {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational to_rational(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("to_rational: non-finite value");
    if (x == 0.0) return Rational(0);
    int exponent = 0;
    const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    exponent -= 53;
    BigInt numerator(scaled);
    if (exponent >= 0) {
        numerator <<= exponent;
        return Rational(numerator);
    }
    BigInt denominator(1);
    denominator <<= -exponent;
    return Rational(numerator, denominator);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace covshift::detail
