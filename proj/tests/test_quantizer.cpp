#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "overlapq/errors.hpp"
#include "overlapq/presets.hpp"
#include "overlapq/quantizer.hpp"

using namespace overlapq;

namespace {

std::vector<WeightedPoint> random_points(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> pos(0, 1), w(0.05, 1);
    std::set<double> xs;
    while (xs.size() < m) xs.insert(pos(rng));
    std::vector<WeightedPoint> out;
    double total = 0;
    for (double x : xs) {
        out.push_back({x, w(rng)});
        total += out.back().w;
    }
    for (auto& p : out) p.w /= total;
    return out;
}

struct Positive {
    Automaton a;
    EssentialClass e;
    WindowTable table;
    DerivedConstants c;
    explicit Positive(const std::string& name)
        : a(build_automaton(preset(name))),
          e(essential_class(a)),
          table(window_table(a, 16)),
          c(derived_constants(a, e, table, Rational(2))) {}
};

// Every infinite path below the root passes through exactly one word.
bool is_complete_antichain(const Automaton& a, const std::vector<SymbolicExpression>& words) {
    std::set<SymbolicExpression> set(words.begin(), words.end()), proper_prefixes;
    for (const auto& w : words) {
        for (std::size_t len = 1; len < w.size(); ++len) proper_prefixes.insert(SymbolicExpression(w.begin(), w.begin() + len));
    }
    for (const auto& w : words) {
        if (proper_prefixes.count(w)) return false;  // a word is a prefix of another
    }
    for (const auto& p : proper_prefixes) {
        for (const auto& slot : a.xi[p.back()]) {
            auto c = p;
            c.push_back(slot.type);
            if (!set.count(c) && !proper_prefixes.count(c)) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("fair coin") {
    const std::vector<WeightedPoint> coin{{0.0, 0.5}, {1.0, 0.5}};
    const auto one = optimal_quantizer_1d(coin, 1, Rational(2));
    CHECK(one.err_r == doctest::Approx(0.25).epsilon(1e-15));
    REQUIRE(one.codebook.size() == 1);
    CHECK(one.codebook[0] == doctest::Approx(0.5));
    CHECK(optimal_quantizer_1d(coin, 2, Rational(2)).err_r == 0.0);
    CHECK(optimal_quantizer_1d(coin, 1, Rational(1)).err_r == doctest::Approx(0.5));
}

TEST_CASE("dynamic program equals partition enumeration") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> msize(1, 12), ksize(1, 4);
    int worst_trial = -1;
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = random_points(rng, msize(rng));
        const std::size_t k = ksize(rng);
        const Rational r(1 + trial % 3);
        const double dp = optimal_quantizer_1d(pts, k, r).err_r;
        const double bf = brute_force_quantizer(pts, k, r).err_r;
        const double dev = bf == 0 ? std::abs(dp) : std::abs(dp - bf) / bf;
        if (dev > worst) {
            worst = dev;
            worst_trial = trial;
        }
    }
    CAPTURE(worst_trial);
    CHECK(worst <= 1e-12);
}

TEST_CASE("brute force edge cases") {
    std::mt19937_64 rng(1);
    const auto pts = random_points(rng, 4);
    CHECK(brute_force_quantizer(pts, 4, Rational(2)).err_r == 0.0);
    CHECK(brute_force_quantizer({{0.3, 1.0}}, 3, Rational(2)).err_r == 0.0);
    CHECK_THROWS_AS(brute_force_quantizer(random_points(rng, 13), 2, Rational(2)), CapExceeded);
    CHECK_THROWS_AS(brute_force_quantizer(pts, 5, Rational(2)), CapExceeded);
    CHECK_THROWS(optimal_quantizer_1d(pts, 0, Rational(2)));
}

TEST_CASE("fractional and large exponents match enumeration") {
    std::mt19937_64 rng(9);
    for (const Rational& r : {Rational(1, 2), Rational(3, 2), Rational(5)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto pts = random_points(rng, 10);
            const double dp = optimal_quantizer_1d(pts, 3, r).err_r;
            const double bf = brute_force_quantizer(pts, 3, r).err_r;
            CHECK(dp == doctest::Approx(bf).epsilon(1e-9));
        }
    }
}

TEST_CASE("uniform measure: e_k^2 = 1/(12 k^2)") {
    const auto curve = error_curve(preset("lebesgue"), Rational(2), 14, 32);
    for (const auto& res : curve) {
        const double exact = 1.0 / (12.0 * static_cast<double>(res.k * res.k));
        CAPTURE(res.k);
        CHECK(std::abs(res.err_r / exact - 1) <= 0.05);
        CHECK(res.mu_err_lo <= exact);
        CHECK(exact <= res.mu_err_hi);
    }
}

TEST_CASE("Cantor variance") {
    const auto curve = error_curve(preset("cantor"), Rational(2), 12, 1);
    CHECK(curve[0].mu_err_lo <= 0.125);
    CHECK(0.125 <= curve[0].mu_err_hi);
    // brackets tighten as the discretization refines
    double prev = INFINITY;
    for (std::size_t m : {6u, 8u, 10u, 12u}) {
        const auto c = error_curve(preset("cantor"), Rational(2), m, 4);
        const double width = c[3].mu_err_hi - c[3].mu_err_lo;
        CHECK(width < prev);
        prev = width;
    }
}

TEST_CASE("error curves are non-increasing and vanish past the atom count") {
    for (const auto& name : preset_names()) {
        const auto dm = discretize(preset(name), 4);
        const auto curve = error_curve(dm, Rational(2), dm.atoms.size() + 3);
        for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].err_r <= curve[i - 1].err_r);
        CHECK(curve.back().err_r == 0.0);
        CHECK(curve[dm.atoms.size() - 1].err_r == 0.0);
    }
}

TEST_CASE("coefficient bands") {
    const auto curve = error_curve(preset("lebesgue"), Rational(2), 14, 64);
    const auto band = coefficient_band(curve, 1.0, 4);
    REQUIRE(band.points.size() == 5);
    CHECK(band.points.front().k == 4);
    CHECK(band.points.back().k == 64);
    CHECK(band.ratio >= 1.0);
    CHECK(band.ratio <= 1.2);
    const auto control = coefficient_band(curve, 0.5, 4);
    CHECK(control.ratio >= 4 * band.ratio);

    const double s = std::log(2.0) / std::log(3.0);
    const auto cantor = coefficient_band(error_curve(preset("cantor"), Rational(2), 12, 64), s, 4);
    CHECK(std::isfinite(cantor.ratio));
    CHECK(cantor.ratio < 3.0);
}

TEST_CASE("Cantor threshold sets are whole generations") {
    Positive p("cantor");
    for (std::size_t k = 1; k <= 4; ++k) {
        const auto set = lambda_set(p.a, p.e, p.c, p.table, k);
        REQUIRE(set.phi() > 0);
        CHECK(set.unresolved.empty());
        const std::size_t len = set.words.front().size();
        for (const auto& w : set.words) CHECK(w.size() == len);
        // suffixes start at eta1, so len - 1 further generations
        CHECK(set.phi() == (std::size_t{1} << (len - 1)));
        // E(sigma) = 2^-n 3^-2n at the order n of sigma; check the threshold sits between
        const std::size_t n = p.e.n0 + len - 1;
        mpz_class eighteen_n = 1;
        for (std::size_t i = 0; i < n; ++i) eighteen_n *= 18;
        const Rational energy_n = Rational(1) / Rational(eighteen_n);
        const Rational energy_parent = energy_n * 18;
        CHECK(energy_n < set.threshold);
        CHECK(set.threshold <= energy_parent);
        CHECK(is_complete_antichain(p.a, set.words));
    }
}

TEST_CASE("threshold sets on overlapping systems") {
    for (const char* name : {"erdos", "lambda-cantor:1"}) {
        Positive p(name);
        std::vector<std::size_t> phi;
        for (std::size_t k = 1; k <= 2; ++k) {
            const auto set = lambda_set(p.a, p.e, p.c, p.table, k);
            CAPTURE(name);
            CAPTURE(k);
            CHECK_FALSE(set.flagged);
            CHECK(is_complete_antichain(p.a, set.words));
            for (const auto& e : set.energies) CHECK(e.hi < set.threshold);
            CHECK(set.esum.lo <= set.esum.hi);
            phi.push_back(set.phi());
        }
        CHECK(phi[0] >= 1);
        CHECK(phi[1] > phi[0]);
        CHECK(phi[1] < 100 * phi[0]);
    }
    LambdaOptions tight;
    tight.word_cap = 10;
    Positive e("erdos");
    CHECK_THROWS_AS(lambda_set(e.a, e.e, e.c, e.table, 2, tight), CapExceeded);
}

TEST_CASE("threshold sets need positivity") {
    const auto a = build_automaton(preset("counterexample"));
    const auto e = essential_class(a);
    const auto t = window_table(a, 12);
    const auto c = derived_constants(a, e, t, Rational(2));
    CHECK_THROWS_AS(lambda_set(a, e, c, t, 1), ValidationError);
}

TEST_CASE("quantization error tracks threshold-set energy") {
    Positive cantor("cantor");
    const auto report =
        ss1_band_check(cantor.a, cantor.e, cantor.c, cantor.table, discretize(preset("cantor"), 12), 1, 6);
    REQUIRE(report.rows.size() == 6);
    CHECK(report.band <= 10.0);
    for (const auto& row : report.rows) {
        CHECK(row.err_r > 0);
        if (!std::isnan(row.control_ratio)) CHECK(row.control_ratio < row.ratio);
    }

    Positive erdos("erdos");
    const auto er = ss1_band_check(erdos.a, erdos.e, erdos.c, erdos.table, discretize(preset("erdos"), 16), 1, 2);
    REQUIRE(er.rows.size() == 2);
    CHECK(std::isfinite(er.band));
    CHECK(er.band >= 1.0);
}
