#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace mdx {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

namespace detail {

// Decimal-only integer parsing. The multiprecision constructor would read a
// leading zero as an octal prefix, so literals like "035" must be normalized.
inline Int parse_int(std::string s) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad integer literal: " + s);
    size_t first = s.find_first_not_of('0');
    s = first == std::string::npos ? "0" : s.substr(first);
    Int v(s);
    return neg ? Int(-v) : v;
}

}  // namespace detail

// Parses "p/q", an integer, or a decimal string ("0.35" -> 7/20).
// Exact conversion only; no floating point involved.
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num = detail::parse_int(s.substr(0, slash));
        Int den = detail::parse_int(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + s);
        return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(detail::parse_int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    Int num = detail::parse_int(digits);
    Int den = 1;
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rat(num, den);
}

inline std::string to_string(const Rat& r) {
    return r.str();
}

}  // namespace mdx
