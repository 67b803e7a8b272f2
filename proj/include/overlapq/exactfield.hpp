#pragma once

// Exact arithmetic in Q and in real quadratic fields Q(sqrt(d)).
//
// Every piece of net-interval geometry (contraction ratio, translations,
// cut points, normalized offsets) lives in one of these fields, so that
// equality tests and orderings are decided exactly.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

#include <gmpxx.h>

namespace overlapq {

using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(long num, long den = 1);

/// Value a + b*sqrt(d) with a, b rational and d square-free.
///
/// d == 0 denotes the pure rational field. Elements with b == 0 are
/// compatible with any d; combining two irrational elements over different
/// radicands throws ValidationError.
class FieldElement {
public:
    FieldElement() = default;
    FieldElement(long value) : a_(value) {}  // NOLINT: integers embed naturally
    FieldElement(Rational a) : a_(std::move(a)) { a_.canonicalize(); }  // NOLINT
    FieldElement(Rational a, Rational b, long d);

    static FieldElement sqrt_of(long d);

    const Rational& rational_part() const noexcept { return a_; }
    const Rational& radical_part() const noexcept { return b_; }
    long radicand() const noexcept { return d_; }
    bool is_rational() const noexcept { return b_ == 0; }

    /// Exact sign in {-1, 0, +1}.
    int sign() const;
    FieldElement conjugate() const;
    FieldElement abs() const { return sign() < 0 ? -*this : *this; }

    FieldElement operator-() const;
    FieldElement& operator+=(const FieldElement& y);
    FieldElement& operator-=(const FieldElement& y);
    FieldElement& operator*=(const FieldElement& y);
    FieldElement& operator/=(const FieldElement& y);

    friend FieldElement operator+(FieldElement x, const FieldElement& y) { return x += y; }
    friend FieldElement operator-(FieldElement x, const FieldElement& y) { return x -= y; }
    friend FieldElement operator*(FieldElement x, const FieldElement& y) { return x *= y; }
    friend FieldElement operator/(FieldElement x, const FieldElement& y) { return x /= y; }

    friend bool operator==(const FieldElement& x, const FieldElement& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend std::strong_ordering operator<=>(const FieldElement& x, const FieldElement& y);

private:
    long combined_radicand(const FieldElement& y) const;

    Rational a_;
    Rational b_;
    long d_ = 0;
};

/// Cheap lexicographic order on (a, b); a valid strict weak order for
/// associative containers, unrelated to the numeric order.
struct FieldKeyLess {
    bool operator()(const FieldElement& x, const FieldElement& y) const {
        if (int c = cmp(x.rational_part(), y.rational_part()); c != 0) return c < 0;
        return cmp(x.radical_part(), y.radical_part()) < 0;
    }
};

FieldElement pow(FieldElement base, unsigned exponent);
FieldElement min(const FieldElement& x, const FieldElement& y);
FieldElement max(const FieldElement& x, const FieldElement& y);

struct RationalBounds {
    Rational lo;
    Rational hi;
};

/// Rational lo <= x <= hi with hi - lo <= width (width > 0).
RationalBounds enclose(const FieldElement& x, const Rational& width);

struct Approximation {
    double value;
    double error_bound;  // certified |value - x| <= error_bound
};

/// Floating approximation with certified absolute error.
///
/// The reported bound is at most the budget unless the budget is finer than
/// double resolution at |x|; the bound is always the one actually achieved.
Approximation to_float(const FieldElement& x, const Rational& error_budget);
double to_double(const FieldElement& x);

/// Grammar: "p", "p/q", "(p+q*sqrt(d))/s", "(p-q*sqrt(d))/s", "(p+sqrt(d))";
/// whitespace is ignored. Throws ValidationError on malformed text, on d not
/// square-free, and on d == 1.
FieldElement parse_field(std::string_view text);

/// Canonical text: "p" or "p/q" when rational, otherwise "(P+Q*sqrt(d))/S"
/// with integers P, Q, S and S > 0.
std::string format(const FieldElement& x);
std::string format(const Rational& x);

std::ostream& operator<<(std::ostream& os, const FieldElement& x);

bool is_square_free(long d);

}  // namespace overlapq
