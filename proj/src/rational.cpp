#include "minext/rational.hpp"

#include "minext/errors.hpp"

#include <algorithm>
#include <cctype>

namespace minext {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::NotInjective: return "NotInjective";
    case ErrorKind::SelfIntersecting: return "SelfIntersecting";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::PointOutside: return "PointOutside";
    case ErrorKind::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorKind::NotDeltaLinearization: return "NotDeltaLinearization";
    case ErrorKind::ToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::DegenerateImage: return "DegenerateImage";
    case ErrorKind::InvalidMesh: return "InvalidMesh";
    case ErrorKind::NotOnSkeleton: return "NotOnSkeleton";
    case ErrorKind::NotSubSkeleton: return "NotSubSkeleton";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Internal: return "InternalError";
    }
    return "Error";
}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

mpz_class pow10(long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
    return r;
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    auto bad = [&]() -> Rational { fail(ErrorKind::Parse, "not a number: '" + std::string(text) + "'"); };
    if (s.empty()) return bad();

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    Rational result;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return bad();
        mpz_class d(std::string(den), 10);
        if (d == 0) fail(ErrorKind::Parse, "zero denominator in '" + std::string(text) + "'");
        result = Rational(mpz_class(std::string(num), 10), d);
        result.canonicalize();
    } else {
        long exponent = 0;
        if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
            auto es = s.substr(e + 1);
            bool eneg = false;
            if (!es.empty() && (es.front() == '+' || es.front() == '-')) {
                eneg = es.front() == '-';
                es.remove_prefix(1);
            }
            if (!all_digits(es) || es.size() > 6) return bad();
            exponent = std::stol(std::string(es));
            if (eneg) exponent = -exponent;
            s = s.substr(0, e);
        }
        std::string digits;
        long frac = 0;
        if (auto dot = s.find('.'); dot != std::string_view::npos) {
            auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
            if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
                return bad();
            digits = std::string(ip) + std::string(fp);
            frac = static_cast<long>(fp.size());
        } else {
            if (!all_digits(s)) return bad();
            digits = std::string(s);
        }
        if (digits.empty()) return bad();
        result = Rational(mpz_class(digits, 10));
        long shift = exponent - frac;
        if (shift > 0) result *= Rational(pow10(shift));
        if (shift < 0) result /= Rational(pow10(-shift));
        result.canonicalize();
    }
    return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

Rational snap(const Rational& q, int bits) {
    mpz_class scale = mpz_class(1) << bits;
    Rational scaled = q * Rational(scale) + Rational(1, 2);
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    Rational r(f, scale);
    r.canonicalize();
    return r;
}

Rational snap(double v, int bits) {
    if (!std::isfinite(v)) fail(ErrorKind::Internal, "snap of non-finite value");
    return snap(Rational(v), bits);
}

Rational best_rational(double v, long max_den) {
    if (!std::isfinite(v)) fail(ErrorKind::Internal, "best_rational of non-finite value");
    // Continued-fraction convergents; last admissible one.
    long double x = v;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int i = 0; i < 64; ++i) {
        long double a = std::floor(x);
        if (std::fabs(a) > 1e15L) break;
        long long ai = static_cast<long long>(a);
        long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        long double rest = x - a;
        if (rest < 1e-18L) break;
        x = 1.0L / rest;
    }
    if (q1 == 0) return Rational(static_cast<long>(std::llround(v)));
    Rational r(mpz_class(std::to_string(p1)), mpz_class(std::to_string(q1)));
    r.canonicalize();
    return r;
}

Rational abs(const Rational& q) { return sgn(q) < 0 ? Rational(-q) : q; }

bool is_perfect_square(const Rational& q, Rational* root) {
    if (sgn(q) < 0) return false;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return false;
    if (root) {
        mpz_class n, d;
        mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
        mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
        *root = Rational(n, d);
        root->canonicalize();
    }
    return true;
}

Rational sqrt_lower(const Rational& q, int bits) {
    if (sgn(q) <= 0) return Rational(0);
    Rational root;
    if (is_perfect_square(q, &root)) return root;
    mpz_class scale = mpz_class(1) << bits;
    Rational scaled = q * Rational(scale * scale);
    mpz_class f, s;
    mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    mpz_sqrt(s.get_mpz_t(), f.get_mpz_t());
    Rational r(s, scale);
    r.canonicalize();
    return r;
}

Interval Interval::of(const Rational& q) {
    double d = q.get_d();
    if (Rational(d) == q) return {d, d};
    return {down(d), up(d)};
}

Interval Interval::sqrt_of(const Rational& q) { return minext::sqrt(Interval::of(q)); }

Interval& Interval::operator+=(const Interval& o) {
    lo = down(lo + o.lo);
    hi = up(hi + o.hi);
    return *this;
}

Interval operator-(const Interval& a, const Interval& b) { return {down(a.lo - b.hi), up(a.hi - b.lo)}; }

Interval operator*(const Interval& a, const Interval& b) {
    double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {down(*std::min_element(p, p + 4)), up(*std::max_element(p, p + 4))};
}

Interval sqrt(const Interval& x) {
    double lo = x.lo <= 0.0 ? 0.0 : std::max(0.0, down(std::sqrt(x.lo)));
    double hi = x.hi <= 0.0 ? 0.0 : up(std::sqrt(x.hi));
    return {lo, hi};
}

} // namespace minext
