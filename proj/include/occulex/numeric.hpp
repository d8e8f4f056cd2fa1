#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace occulex {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt binomial(long long n, long long k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (long long i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

inline BigInt factorial(long long n) {
    BigInt result = 1;
    for (long long i = 2; i <= n; ++i) result *= i;
    return result;
}

inline BigInt ipow(BigInt base, unsigned long long exp) {
    BigInt result = 1;
    while (exp) {
        if (exp & 1U) result *= base;
        base *= base;
        exp >>= 1U;
    }
    return result;
}

inline Rational rpow(const Rational& base, unsigned long long exp) {
    Rational result = 1;
    Rational b = base;
    while (exp) {
        if (exp & 1U) result *= b;
        b *= b;
        exp >>= 1U;
    }
    return result;
}

// Natural log of a positive big integer, safe beyond the double range.
inline double log_big(const BigInt& value) {
    if (value <= 0) throw invalid_argument("log_big: non-positive argument");
    const auto bits = static_cast<long>(boost::multiprecision::msb(value));
    if (bits < 1000) return std::log(value.convert_to<double>());
    const long shift = bits - 60;
    BigInt top = value >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

// Conversion that keeps ~60 significant bits even when numerator and
// denominator individually overflow a double.
inline double to_double(const Rational& q) {
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    if (num == 0) return 0.0;
    const bool negative = num < 0;
    if (negative) num = -num;
    const long shift = 64 - (static_cast<long>(boost::multiprecision::msb(num)) -
                             static_cast<long>(boost::multiprecision::msb(den)));
    BigInt scaled = shift >= 0 ? BigInt((num << shift) / den) : BigInt(num / (den << -shift));
    double out = std::ldexp(scaled.convert_to<double>(), static_cast<int>(-shift));
    return negative ? -out : out;
}

inline long double to_long_double(const Rational& q) {
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    if (num == 0) return 0.0L;
    const bool negative = num < 0;
    if (negative) num = -num;
    const long shift = 96 - (static_cast<long>(boost::multiprecision::msb(num)) -
                             static_cast<long>(boost::multiprecision::msb(den)));
    BigInt scaled = shift >= 0 ? BigInt((num << shift) / den) : BigInt(num / (den << -shift));
    long double out = std::ldexp(scaled.convert_to<long double>(), static_cast<int>(-shift));
    return negative ? -out : out;
}

// Accepts "p/q", "p", or a plain decimal such as "0.25".
inline Rational parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty()) throw invalid_argument("empty rational");
    auto parse_int = [](std::string_view s) {
        if (s.empty()) throw invalid_argument("malformed rational");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw invalid_argument("malformed rational");
        for (std::size_t j = i; j < s.size(); ++j)
            if (!std::isdigit(static_cast<unsigned char>(s[j])))
                throw invalid_argument("malformed rational: " + std::string(s));
        return BigInt(std::string(s));
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt p = parse_int(trim(text.substr(0, slash)));
        BigInt q = parse_int(trim(text.substr(slash + 1)));
        if (q == 0) throw invalid_argument("zero denominator");
        return Rational(p, q);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        std::string frac(text.substr(dot + 1));
        if (digits.empty() || digits == "-" || digits == "+") digits += "0";
        BigInt p = parse_int(digits + frac);
        if (!digits.empty() && digits[0] == '-' && p > 0) p = -p;
        return Rational(p, ipow(10, frac.size()));
    }
    return Rational(parse_int(text));
}

inline std::string to_string(const Rational& q) {
    if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

} // namespace occulex
