#pragma once

// Exact arithmetic in the real quadratic field Q(sqrt(3)).
//
// Every coordinate of the built-in surfaces lives here: unit equilateral
// triangles, regular hexagons and the integer shears all have entries of
// the form a + b*sqrt(3) with rational a, b.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace flatsys {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& m) : std::runtime_error(m) {}
};

inline int sign_of(const Rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

// a + b*sqrt(3), totally ordered by the real embedding.
class QScalar {
public:
    QScalar() : a_(0), b_(0) {}
    QScalar(int v) : a_(v), b_(0) {}           // NOLINT: implicit by design
    QScalar(long long v) : a_(v), b_(0) {}     // NOLINT
    explicit QScalar(Rational a, Rational b = 0) : a_(std::move(a)), b_(std::move(b)) {}

    static QScalar sqrt3() { return QScalar(0, 1); }
    static QScalar of(long long num, long long den) { return QScalar(Rational(num, den)); }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt3_part() const { return b_; }

    bool is_rational() const { return b_ == 0; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }

    QScalar operator-() const { return QScalar(-a_, -b_); }
    QScalar operator+(const QScalar& o) const { return QScalar(a_ + o.a_, b_ + o.b_); }
    QScalar operator-(const QScalar& o) const { return QScalar(a_ - o.a_, b_ - o.b_); }
    QScalar operator*(const QScalar& o) const {
        return QScalar(a_ * o.a_ + 3 * b_ * o.b_, a_ * o.b_ + b_ * o.a_);
    }
    QScalar operator/(const QScalar& o) const {
        // multiply by the conjugate; norm = a^2 - 3 b^2 vanishes only at 0
        Rational n = o.a_ * o.a_ - 3 * o.b_ * o.b_;
        if (n == 0) throw std::domain_error("QScalar: division by zero");
        QScalar num = *this * QScalar(o.a_, -o.b_);
        return QScalar(num.a_ / n, num.b_ / n);
    }

    QScalar& operator+=(const QScalar& o) { return *this = *this + o; }
    QScalar& operator-=(const QScalar& o) { return *this = *this - o; }
    QScalar& operator*=(const QScalar& o) { return *this = *this * o; }
    QScalar& operator/=(const QScalar& o) { return *this = *this / o; }

    // sign of a + b*sqrt(3), exactly
    int sign() const {
        int sa = sign_of(a_), sb = sign_of(b_);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // opposite signs: compare a^2 with 3 b^2; equality would force sqrt(3) rational
        Rational lhs = a_ * a_, rhs = 3 * b_ * b_;
        if (lhs == rhs) return 0;  // only when a = b = 0, unreachable here
        return (lhs > rhs) ? sa : sb;
    }

    bool operator==(const QScalar& o) const { return a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const QScalar& o) const { return !(*this == o); }
    bool operator<(const QScalar& o) const { return (*this - o).sign() < 0; }
    bool operator>(const QScalar& o) const { return (*this - o).sign() > 0; }
    bool operator<=(const QScalar& o) const { return (*this - o).sign() <= 0; }
    bool operator>=(const QScalar& o) const { return (*this - o).sign() >= 0; }

    double to_double() const {
        return a_.convert_to<double>() + b_.convert_to<double>() * 1.7320508075688772935;
    }

    // exact square root when it exists in the field, nullopt otherwise
    std::optional<QScalar> try_sqrt() const;

    std::string to_literal() const;

private:
    Rational a_, b_;
};

inline QScalar operator+(int l, const QScalar& r) { return QScalar(l) + r; }
inline QScalar operator-(int l, const QScalar& r) { return QScalar(l) - r; }
inline QScalar operator*(int l, const QScalar& r) { return QScalar(l) * r; }

namespace detail {

inline std::optional<Int> int_sqrt(const Int& n) {
    if (n < 0) return std::nullopt;
    Int r = boost::multiprecision::sqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

inline std::optional<Rational> rational_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    auto num = int_sqrt(boost::multiprecision::numerator(q));
    auto den = int_sqrt(boost::multiprecision::denominator(q));
    if (!num || !den) return std::nullopt;
    return Rational(*num, *den);
}

}  // namespace detail

inline std::optional<QScalar> QScalar::try_sqrt() const {
    if (sign() < 0) return std::nullopt;
    // want (c + d sqrt3)^2 = a + b sqrt3:  c^2 + 3 d^2 = a, 2 c d = b
    if (b_ == 0) {
        if (auto c = detail::rational_sqrt(a_)) return QScalar(*c);
        // pure multiple of sqrt(3): a = 3 d^2
        if (auto d = detail::rational_sqrt(a_ / 3)) return QScalar(0, *d);
        return std::nullopt;
    }
    // c^2 solves t^2 - a t + 3 (b/2)^2 = 0
    Rational disc = a_ * a_ - 3 * b_ * b_;
    auto root = detail::rational_sqrt(disc);
    if (!root) return std::nullopt;
    for (int pick = 0; pick < 2; ++pick) {
        Rational c2 = (pick == 0) ? Rational((a_ + *root) / 2) : Rational((a_ - *root) / 2);
        if (auto c = detail::rational_sqrt(c2)) {
            if (*c == 0) continue;
            Rational d = b_ / (2 * *c);
            QScalar cand(*c, d);
            if (cand.sign() < 0) cand = -cand;
            if (cand * cand == *this) return cand;
        }
    }
    return std::nullopt;
}

// --- coordinate literal grammar ---------------------------------------------
// COORD := RAT | RAT "r3" | RAT ("+"|"-") RAT "r3"
// RAT   := ["-"] digits ["/" digits]
// whitespace insignificant, e.g. "1/2", "1/2 r3", "3 - 1/2 r3"

namespace detail {

struct literal_cursor {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool try_consume(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    Int digits() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) throw parse_error("expected digits in coordinate literal: '" + s + "'");
        return Int(s.substr(start, pos - start));
    }

    Rational rat() {
        bool neg = try_consume('-');
        Int num = digits();
        Int den = 1;
        if (try_consume('/')) {
            den = digits();
            if (den == 0) throw parse_error("zero denominator in literal: '" + s + "'");
        }
        Rational r(num, den);
        return neg ? -r : r;
    }

    // "r3" marker
    bool try_r3() {
        skip_ws();
        if (pos + 1 < s.size() && s[pos] == 'r' && s[pos + 1] == '3') {
            pos += 2;
            return true;
        }
        return false;
    }
};

}  // namespace detail

inline QScalar parse_coord_literal(const std::string& text) {
    detail::literal_cursor c{text};
    Rational first = c.rat();
    if (c.eof()) return QScalar(first);
    if (c.try_r3()) {
        if (!c.eof()) throw parse_error("trailing characters in literal: '" + text + "'");
        return QScalar(0, first);
    }
    int sgn;
    if (c.try_consume('+')) sgn = 1;
    else if (c.try_consume('-')) sgn = -1;
    else throw parse_error("expected '+', '-' or 'r3' in literal: '" + text + "'");
    Rational second = c.rat();
    if (!c.try_r3()) throw parse_error("expected 'r3' after second term in literal: '" + text + "'");
    if (!c.eof()) throw parse_error("trailing characters in literal: '" + text + "'");
    return QScalar(first, sgn > 0 ? second : -second);
}

namespace detail {

inline std::string rat_str(const Rational& r) {
    std::string s = boost::multiprecision::numerator(r).str();
    if (boost::multiprecision::denominator(r) != 1)
        s += "/" + boost::multiprecision::denominator(r).str();
    return s;
}

}  // namespace detail

inline std::string QScalar::to_literal() const {
    if (b_ == 0) return detail::rat_str(a_);
    if (a_ == 0) return detail::rat_str(b_) + " r3";
    if (b_ > 0) return detail::rat_str(a_) + " + " + detail::rat_str(b_) + " r3";
    return detail::rat_str(a_) + " - " + detail::rat_str(-b_) + " r3";
}

inline std::ostream& operator<<(std::ostream& os, const QScalar& q) { return os << q.to_literal(); }

}  // namespace flatsys
