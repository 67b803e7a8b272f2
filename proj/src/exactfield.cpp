#include "overlapq/exactfield.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>
#include <regex>

#include "overlapq/errors.hpp"

namespace overlapq {

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::validation: return 2;
        case ErrorKind::cap: return 3;
        case ErrorKind::oracle_mismatch: return 4;
        case ErrorKind::internal: return 5;
    }
    return 5;
}

Rational make_rational(long num, long den) {
    if (den == 0) throw ValidationError("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

bool is_square_free(long d) {
    if (d < 0) return false;
    if (d == 0) return true;
    for (long p = 2; p * p <= d; ++p) {
        if (d % (p * p) == 0) return false;
    }
    return true;
}

FieldElement::FieldElement(Rational a, Rational b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    a_.canonicalize();
    b_.canonicalize();
    if (d < 0 || !is_square_free(d)) throw ValidationError("radicand must be a non-negative square-free integer");
    if (d == 1) throw ValidationError("radicand 1 is redundant with the rational field");
    if (d == 0 && b_ != 0) throw ValidationError("irrational part requires a radicand");
}

FieldElement FieldElement::sqrt_of(long d) { return FieldElement(Rational(0), Rational(1), d); }

long FieldElement::combined_radicand(const FieldElement& y) const {
    const bool mine = b_ != 0;
    const bool theirs = y.b_ != 0;
    if (mine && theirs && d_ != y.d_) throw ValidationError("mismatched radicands in field arithmetic");
    if (mine) return d_;
    if (theirs) return y.d_;
    return d_ != 0 ? d_ : y.d_;
}

int FieldElement::sign() const {
    const int sa = sgn(a_);
    const int sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // opposite signs: compare a^2 against b^2 d; equality is impossible for
    // square-free d > 1 and b != 0
    Rational lhs = a_ * a_;
    Rational rhs = b_ * b_ * d_;
    return cmp(lhs, rhs) > 0 ? sa : sb;
}

FieldElement FieldElement::conjugate() const {
    FieldElement c = *this;
    c.b_ = -c.b_;
    return c;
}

FieldElement FieldElement::operator-() const {
    FieldElement c = *this;
    c.a_ = -c.a_;
    c.b_ = -c.b_;
    return c;
}

FieldElement& FieldElement::operator+=(const FieldElement& y) {
    d_ = combined_radicand(y);
    a_ += y.a_;
    b_ += y.b_;
    return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& y) {
    d_ = combined_radicand(y);
    a_ -= y.a_;
    b_ -= y.b_;
    return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& y) {
    const long d = combined_radicand(y);
    if (b_ == 0 && y.b_ == 0) {
        a_ *= y.a_;
    } else {
        Rational a = a_ * y.a_ + b_ * y.b_ * d;
        Rational b = a_ * y.b_ + b_ * y.a_;
        a_ = std::move(a);
        b_ = std::move(b);
    }
    d_ = d;
    return *this;
}

FieldElement& FieldElement::operator/=(const FieldElement& y) {
    if (y.a_ == 0 && y.b_ == 0) throw std::domain_error("division by zero in field arithmetic");
    const long d = combined_radicand(y);
    if (y.b_ == 0) {
        a_ /= y.a_;
        b_ /= y.a_;
    } else {
        Rational norm = y.a_ * y.a_ - y.b_ * y.b_ * d;
        Rational a = (a_ * y.a_ - b_ * y.b_ * d) / norm;
        Rational b = (b_ * y.a_ - a_ * y.b_) / norm;
        a_ = std::move(a);
        b_ = std::move(b);
    }
    d_ = d;
    return *this;
}

std::strong_ordering operator<=>(const FieldElement& x, const FieldElement& y) {
    const int s = (x - y).sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

FieldElement pow(FieldElement base, unsigned exponent) {
    FieldElement result(1);
    while (exponent != 0) {
        if (exponent & 1u) result *= base;
        exponent >>= 1u;
        if (exponent != 0) base *= base;
    }
    return result;
}

FieldElement min(const FieldElement& x, const FieldElement& y) { return y < x ? y : x; }
FieldElement max(const FieldElement& x, const FieldElement& y) { return x < y ? y : x; }

namespace {

// floor(sqrt(d) * 2^k) as an integer
Integer scaled_isqrt(long d, unsigned k) {
    Integer n(d);
    n <<= 2 * k;
    Integer root;
    mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
    return root;
}

Integer parse_integer(const std::string& digits) {
    if (!digits.empty() && digits.front() == '+') return Integer(digits.substr(1));
    return Integer(digits);
}

}  // namespace

RationalBounds enclose(const FieldElement& x, const Rational& width) {
    if (x.is_rational()) return {x.rational_part(), x.rational_part()};
    const Rational& b = x.radical_part();
    Rational absb = abs(b);
    // choose k with |b| / 2^k <= width
    unsigned k = 0;
    Rational step = absb;
    while (step > width) {
        step /= 2;
        ++k;
    }
    Integer root = scaled_isqrt(x.radicand(), k);
    Rational scale(Integer(1) << k, 1);
    scale.canonicalize();
    Rational s_lo(root);
    s_lo /= scale;
    Rational s_hi(root + 1);
    s_hi /= scale;
    Rational v1 = x.rational_part() + b * s_lo;
    Rational v2 = x.rational_part() + b * s_hi;
    if (v1 <= v2) return {v1, v2};
    return {v2, v1};
}

Approximation to_float(const FieldElement& x, const Rational& error_budget) {
    if (error_budget <= 0) throw ValidationError("error budget must be positive");
    if (x.sign() == 0) return {0.0, 0.0};
    RationalBounds b = enclose(x, error_budget);
    Rational mid = (b.lo + b.hi) / 2;
    const double value = mid.get_d();
    // get_d truncates toward zero: at most one ulp of |value|
    const double rounding = std::abs(value) * std::numeric_limits<double>::epsilon();
    const double half = Rational((b.hi - b.lo) / 2).get_d();
    return {value, half + rounding};
}

double to_double(const FieldElement& x) {
    if (x.is_rational()) return x.rational_part().get_d();
    return to_float(x, Rational(1, Integer(1) << 70)).value;
}

FieldElement parse_field(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    static const std::regex integer_re(R"(^([+-]?\d+)$)");
    static const std::regex fraction_re(R"(^([+-]?\d+)/(\d+)$)");
    static const std::regex quadratic_re(R"(^\(([+-]?\d+)([+-])(?:(\d+)\*)?sqrt\((\d+)\)\)(?:/(\d+))?$)");
    std::smatch m;
    try {
        if (std::regex_match(s, m, integer_re)) return FieldElement(Rational(parse_integer(m[1].str())));
        if (std::regex_match(s, m, fraction_re)) {
            Integer den(m[2].str());
            if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
            Rational q(parse_integer(m[1].str()), den);
            q.canonicalize();
            return FieldElement(q);
        }
        if (std::regex_match(s, m, quadratic_re)) {
            Integer p = parse_integer(m[1].str());
            Integer q = m[3].matched ? Integer(m[3].str()) : Integer(1);
            if (m[2].str() == "-") q = -q;
            const long d = std::stol(m[4].str());
            Integer den = m[5].matched ? Integer(m[5].str()) : Integer(1);
            if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
            Rational a(p, den);
            Rational b(q, den);
            a.canonicalize();
            b.canonicalize();
            if (b == 0) return FieldElement(a);
            return FieldElement(a, b, d);
        }
    } catch (const std::invalid_argument&) {
        // fall through to the malformed-text error
    } catch (const std::out_of_range&) {
    }
    throw ValidationError("malformed exact number '" + std::string(text) + "'");
}

std::string format(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string format(const FieldElement& x) {
    if (x.is_rational()) return format(x.rational_part());
    const Rational& a = x.rational_part();
    const Rational& b = x.radical_part();
    Integer s;
    mpz_lcm(s.get_mpz_t(), a.get_den().get_mpz_t(), b.get_den().get_mpz_t());
    Integer p = a.get_num() * (s / a.get_den());
    Integer q = b.get_num() * (s / b.get_den());
    std::string out = "(" + p.get_str();
    out += q < 0 ? "-" : "+";
    out += Integer(abs(q)).get_str() + "*sqrt(" + std::to_string(x.radicand()) + "))/" + s.get_str();
    return out;
}

std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << format(x); }

}  // namespace overlapq
