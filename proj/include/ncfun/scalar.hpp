#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include "ncfun/errors.hpp"

namespace ncfun {

/// Exact scalar kernel: arbitrary-precision rationals, always canonical
/// (reduced, positive denominator).
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q" or "p" (optionally signed). Denominator must be nonzero.
inline Rational parse_rational(const std::string& s) {
    auto bad = [&] { throw SchemaError("invalid rational literal '" + s + "'"); };
    if (s.empty()) bad();
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
        boost::multiprecision::cpp_int num(s.substr(0, slash));
        boost::multiprecision::cpp_int den(s.substr(slash + 1));
        if (den == 0) bad();
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        bad();
    }
    return Rational(0); // unreachable
}

inline std::string rational_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Formats a double with 17 significant digits (lossless round trip).
inline std::string double_to_string(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool is_exact = true;
    static constexpr bool is_complex = false;
    using Real = Rational;
    static Rational conj(const Rational& x) { return x; }
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
    static bool is_zero(const Rational& x) { return x == 0; }
    static double to_double(const Rational& x) { return static_cast<double>(x); }
    static std::string str(const Rational& x) { return rational_to_string(x); }
};

template <>
struct ScalarTraits<double> {
    static constexpr bool is_exact = false;
    static constexpr bool is_complex = false;
    using Real = double;
    static double conj(double x) { return x; }
    static double abs(double x) { return std::abs(x); }
    static bool is_zero(double x) { return x == 0.0; }
    static double to_double(double x) { return x; }
    static std::string str(double x) { return double_to_string(x); }
};

template <>
struct ScalarTraits<std::complex<double>> {
    static constexpr bool is_exact = false;
    static constexpr bool is_complex = true;
    using Real = double;
    static std::complex<double> conj(const std::complex<double>& x) { return std::conj(x); }
    static double abs(const std::complex<double>& x) { return std::abs(x); }
    static bool is_zero(const std::complex<double>& x) { return x == std::complex<double>(0.0); }
    static double to_double(const std::complex<double>& x) { return x.real(); }
    static std::string str(const std::complex<double>& x) {
        return "(" + double_to_string(x.real()) + "," + double_to_string(x.imag()) + ")";
    }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::is_exact; };

} // namespace ncfun
