#include <doctest.h>

#include <cmath>
#include <random>

#include "overlapq/errors.hpp"
#include "overlapq/exactfield.hpp"

using namespace overlapq;

namespace {

const FieldElement golden = parse_field("(-1+1*sqrt(5))/2");

FieldElement random_element(std::mt19937_64& rng, long d) {
    std::uniform_int_distribution<long> num(-50, 50), den(1, 30);
    Rational a(num(rng), den(rng)), b(num(rng), den(rng));
    a.canonicalize();
    b.canonicalize();
    return d == 0 ? FieldElement(a) : FieldElement(a, b, d);
}

// a + b sqrt(d) evaluated in 512-bit binary floating point
int mpf_sign(const FieldElement& x) {
    mpf_class a(x.rational_part(), 512), b(x.radical_part(), 512), r(0, 512);
    if (x.radicand() > 0) r = sqrt(mpf_class(x.radicand(), 512));
    mpf_class v = a + b * r;
    return sgn(v);
}

}  // namespace

TEST_CASE("golden conjugates multiply to one") {
    const FieldElement other = parse_field("(1+sqrt(5))/2");
    CHECK(golden * other == FieldElement(1));
}

TEST_CASE("golden ratio squared is one minus itself") {
    CHECK(golden * golden == FieldElement(1) - golden);
    CHECK(format(golden * golden) == "(3-1*sqrt(5))/2");
}

TEST_CASE("rational sums stay reduced") {
    const FieldElement x = FieldElement(make_rational(1, 3)) + FieldElement(make_rational(1, 9));
    CHECK(x == FieldElement(make_rational(4, 9)));
    CHECK(x.rational_part().get_den() == 9);
}

TEST_CASE("sign cases") {
    CHECK(golden.sign() == 1);
    CHECK(FieldElement(0).sign() == 0);
    CHECK((FieldElement(2) - FieldElement::sqrt_of(5)).sign() == -1);
    CHECK((FieldElement(3) - FieldElement::sqrt_of(5)).sign() == 1);
    CHECK((FieldElement::sqrt_of(5) - FieldElement(3)).sign() == -1);
}

TEST_CASE("to_float carries a certified bound") {
    auto third = to_float(FieldElement(make_rational(1, 3)), Rational(1, 1000000000000));
    CHECK(std::abs(third.value - 1.0 / 3.0) <= 1e-12);
    CHECK(third.error_bound <= 1e-12);

    auto g = to_float(golden, Rational(1, 1000000000));
    CHECK(std::abs(g.value - 0.6180339887498949) <= 1e-9);
    CHECK(g.error_bound <= 1e-9);

    auto zero = to_float(FieldElement(0), Rational(1, 2));
    CHECK(zero.value == 0.0);
}

TEST_CASE("parse and format") {
    CHECK(parse_field("1/3") == FieldElement(make_rational(1, 3)));
    CHECK(parse_field("(-1+1*sqrt(5))/2").radicand() == 5);
    for (const char* text : {"1/3", "0", "-7/2", "5", "(-1+1*sqrt(5))/2", "(3-1*sqrt(5))/2", "(1+3*sqrt(2))/7"}) {
        CHECK(format(parse_field(text)) == text);
    }
}

TEST_CASE("malformed and unsupported input is rejected") {
    CHECK_THROWS_AS(parse_field("pi"), ValidationError);
    CHECK_THROWS_AS(parse_field("1/0"), ValidationError);
    CHECK_THROWS_AS(parse_field("(1+sqrt(1))/2"), ValidationError);
    CHECK_THROWS_AS(parse_field("(1+sqrt(8))/2"), ValidationError);
    CHECK_THROWS_AS(parse_field("1//3"), ValidationError);
}

TEST_CASE("division by zero and mixed radicands throw") {
    CHECK_THROWS(FieldElement(1) / FieldElement(0));
    CHECK_THROWS(FieldElement::sqrt_of(5) + FieldElement::sqrt_of(2));
}

TEST_CASE("distributive law on random samples") {
    std::mt19937_64 rng(7);
    for (long d : {0L, 2L, 5L, 13L}) {
        for (int i = 0; i < 300; ++i) {
            const auto x = random_element(rng, d), y = random_element(rng, d), z = random_element(rng, d);
            CHECK((x + y) * z == x * z + y * z);
            if (z.sign() != 0) CHECK((x * z) / z == x);
        }
    }
}

TEST_CASE("exact order agrees with a 512-bit evaluation on 10^4 pairs") {
    std::mt19937_64 rng(11);
    int disagreements = 0;
    for (int i = 0; i < 10000; ++i) {
        const long d = (i % 2 == 0) ? 5 : 3;
        const auto x = random_element(rng, d), y = random_element(rng, d);
        const FieldElement diff = x - y;
        if (diff.sign() != mpf_sign(diff)) ++disagreements;
        if ((x < y) != (diff.sign() < 0)) ++disagreements;
    }
    CHECK(disagreements == 0);
}

TEST_CASE("parse inverts format on random elements") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto x = random_element(rng, i % 3 == 0 ? 0 : 7);
        CHECK(parse_field(format(x)) == x);
    }
}
