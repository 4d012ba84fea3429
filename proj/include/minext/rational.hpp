#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

namespace minext {

using Rational = mpq_class;

/// Canonical p/q; the two-integer mpq_class constructor does not reduce.
inline Rational ratio(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

/// Parses "p/q", integers and decimal / scientific literals exactly.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

/// Nearest multiple of 2^-bits.
Rational snap(const Rational& q, int bits);
Rational snap(double v, int bits);

/// Closest rational to v with denominator <= max_den (continued fractions).
Rational best_rational(double v, long max_den);

Rational abs(const Rational& q);

/// Largest r with r*r <= q, r a multiple of 2^-bits; exact root when q is a perfect square.
Rational sqrt_lower(const Rational& q, int bits = 60);

bool is_perfect_square(const Rational& q, Rational* root = nullptr);

/// Closed interval of doubles enclosing a real number; every operation rounds outward.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval point(double v) { return {v, v}; }
    static Interval of(const Rational& q);
    static Interval sqrt_of(const Rational& q);

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }

    Interval& operator+=(const Interval& o);
    friend Interval operator+(Interval a, const Interval& b) { return a += b; }
    friend Interval operator-(const Interval& a, const Interval& b);
    friend Interval operator*(const Interval& a, const Interval& b);
};

Interval sqrt(const Interval& x);

inline double down(double v) { return std::nextafter(v, -HUGE_VAL); }
inline double up(double v) { return std::nextafter(v, HUGE_VAL); }

} // namespace minext
