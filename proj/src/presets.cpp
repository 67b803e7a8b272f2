#include "overlapq/presets.hpp"

#include <charconv>

#include "overlapq/errors.hpp"

namespace overlapq {

namespace {

std::vector<Rational> uniform(std::size_t n) { return std::vector<Rational>(n, make_rational(1, static_cast<long>(n))); }

IfsSpec lambda_cantor(unsigned m) {
    if (m == 0 || m > 30) throw ValidationError("lambda-cantor:m requires 1 <= m <= 30");
    const FieldElement third = make_rational(1, 3);
    const FieldElement lambda = FieldElement(1) - pow(third, m);
    return IfsSpec{third, {FieldElement(0), lambda * third, make_rational(2, 3)}, uniform(3)};
}

}  // namespace

IfsSpec preset(std::string_view name) {
    const FieldElement half = make_rational(1, 2);
    const FieldElement third = make_rational(1, 3);
    if (name == "erdos") {
        const FieldElement rho = (FieldElement(-1) + FieldElement::sqrt_of(5)) / FieldElement(2);
        return IfsSpec{rho, {FieldElement(0), FieldElement(1) - rho}, uniform(2)};
    }
    if (name == "cantor") return IfsSpec{third, {FieldElement(0), make_rational(2, 3)}, uniform(2)};
    if (name == "lebesgue") return IfsSpec{half, {FieldElement(0), half}, uniform(2)};
    if (name == "threefold") {
        std::vector<FieldElement> g;
        for (long i = 0; i < 4; ++i) g.emplace_back(make_rational(2 * i, 3));
        return rescale_to_unit_hull(third, g,
                                    {make_rational(1, 8), make_rational(3, 8), make_rational(3, 8), make_rational(1, 8)});
    }
    if (name == "counterexample") {
        return IfsSpec{third, {FieldElement(0), make_rational(1, 9), make_rational(2, 3)}, uniform(3)};
    }
    if (name == "roychowdhury") {
        return rescale_to_unit_hull(third, {FieldElement(0), FieldElement(1), FieldElement(3)}, uniform(3));
    }
    constexpr std::string_view lambda_prefix = "lambda-cantor:";
    if (name.substr(0, lambda_prefix.size()) == lambda_prefix) {
        std::string_view digits = name.substr(lambda_prefix.size());
        unsigned m = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), m);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) {
            throw ValidationError("malformed preset '" + std::string(name) + "'");
        }
        return lambda_cantor(m);
    }
    throw ValidationError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    return {"erdos", "cantor", "lebesgue", "threefold", "lambda-cantor:1", "counterexample", "roychowdhury"};
}

}  // namespace overlapq
