#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace graphmix {

// Exact rational arithmetic for partition weights and coverage accounting.
// Coverage equality is checked exactly, never with a float tolerance.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational &r) { return r.convert_to<double>(); }

// Canonical "p/q" form ("p" when q == 1).
inline std::string to_fraction_string(const Rational &r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline Rational parse_fraction(const std::string &text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return Rational(BigInt(text));
        }
        const BigInt num(text.substr(0, slash));
        const BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception &) {
        throw std::invalid_argument("invalid rational literal: \"" + text + "\"");
    }
}

}  // namespace graphmix
