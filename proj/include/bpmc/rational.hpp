#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "errors.hpp"

namespace bpmc {

// Arbitrary precision rational; always canonical (lowest terms, positive
// denominator). Canonicalisation is maintained by the backend.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

inline Integer rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string rat_str(const Rational& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

// Parses "p/q", "p", or a decimal like "0.31" (converted exactly, 31/100).
// Used by every text format that carries probabilities.
inline Rational parse_rational(const std::string& s, int line = 0, int col = 0) {
    if (s.empty()) throw ParseError("empty number", line, col);
    auto bad = [&]() { return ParseError("malformed number '" + s + "'", line, col); };
    std::size_t slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Integer num(s.substr(0, slash));
            Integer den(s.substr(slash + 1));
            if (den == 0) throw bad();
            return Rational(num, den);
        }
        std::size_t dot = s.find('.');
        if (dot == std::string::npos) return Rational(Integer(s));
        std::string head = s.substr(0, dot);
        std::string tail = s.substr(dot + 1);
        if (tail.empty()) throw bad();
        bool neg = !head.empty() && head[0] == '-';
        if (neg) head = head.substr(1);
        if (head.empty()) head = "0";
        Integer scale = 1;
        for (std::size_t i = 0; i < tail.size(); ++i) scale *= 10;
        Rational r = Rational(Integer(head)) + Rational(Integer(tail), scale);
        return neg ? Rational(-r) : r;
    } catch (const std::exception&) {
        throw bad();
    }
}

}  // namespace bpmc
