#pragma once

// Optimal k-point quantization of discrete measures on the line, error
// curves of the discretized self-similar measure, quantization-coefficient
// bands, and the threshold antichains Lambda_{k,r}.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "overlapq/exactfield.hpp"
#include "overlapq/measure.hpp"
#include "overlapq/netauto.hpp"
#include "overlapq/transition.hpp"

namespace overlapq {

struct WeightedPoint {
    double x;
    double w;
};

/// Atoms of a discrete measure as floats, in increasing order.
std::vector<WeightedPoint> points_of(const DiscreteMeasure& measure);

/// min_c sum_l w_l |x_l - c|^r over the atoms [i, j) of a sorted list.
/// r = 2 and r = 1 use prefix sums; other r run golden-section search on
/// the convex cost (r >= 1) or scan the atoms (r < 1, where the optimum sits
/// on an atom).
class CellCost {
public:
    CellCost(const std::vector<WeightedPoint>& points, double r);

    double operator()(std::size_t i, std::size_t j) const { return evaluate(i, j, nullptr); }
    double center(std::size_t i, std::size_t j) const;
    std::size_t size() const noexcept { return points_.size(); }
    double r() const noexcept { return r_; }

private:
    double evaluate(std::size_t i, std::size_t j, double* center) const;
    double direct(std::size_t i, std::size_t j, double c) const;

    const std::vector<WeightedPoint>& points_;
    double r_;
    std::vector<long double> w_, s1_, s2_;  // prefix sums
};

struct QuantizerResult {
    std::size_t k = 0;
    Rational r;
    double err_r = 0.0;  // e^r_{k,r} of the discrete measure
    std::vector<double> codebook;
    double mu_err_lo = 0.0;  // certified bounds on e^r_{k,r}(mu)
    double mu_err_hi = 0.0;
};

/// The codebook is left empty when k (atoms + 1) exceeds 16M split entries.
QuantizerResult optimal_quantizer_1d(const std::vector<WeightedPoint>& points, std::size_t k, const Rational& r);
QuantizerResult optimal_quantizer_1d(const DiscreteMeasure& measure, std::size_t k, const Rational& r);

/// Enumerates every split into at most k contiguous blocks; at most 12 atoms
/// and k <= 4.
QuantizerResult brute_force_quantizer(const std::vector<WeightedPoint>& points, std::size_t k, const Rational& r);

/// Transport bracket: |e_k(mu)^(1/r) - e_k(mu_m)^(1/r)| <= radius.
void attach_transport_bounds(QuantizerResult& result, double radius);

/// k = 1..k_max. Codebooks are reconstructed only while the split table stays
/// below 16M entries; beyond that they are left empty.
std::vector<QuantizerResult> error_curve(const DiscreteMeasure& measure, const Rational& r, std::size_t k_max);
std::vector<QuantizerResult> error_curve(const IfsSpec& spec, const Rational& r, std::size_t depth, std::size_t k_max);

struct BandPoint {
    std::size_t k;
    double scaled;  // k^(r/s) err_r
};

struct CoefficientBand {
    double s = 0.0;
    std::vector<BandPoint> points;
    double band_lo = 0.0;
    double band_hi = 0.0;
    double ratio = 0.0;
};

/// Band of k^(r/s) err over k = k_min, 2 k_min, 4 k_min, ... <= k_max.
CoefficientBand coefficient_band(const std::vector<QuantizerResult>& curve, double s, std::size_t k_min = 4);

struct LambdaOptions {
    unsigned window_depth = 16;  // depth of the window table used
    std::size_t depth_cap = 64;  // longest word examined
    std::size_t word_cap = 2048;
    unsigned refinements = 2;    // extra measure passes on a straddling enclosure
};

/// Words sigma (starting at eta1) with E_r(sigma^flat) >= tau > E_r(sigma),
/// E_r(sigma) = mu(Delta_sigma) |Delta_sigma|^r and
/// tau = eta^k lo(mu(I0) |I0|^r) with eta the certified lower bound.
struct LambdaSet {
    std::size_t k = 0;
    Rational threshold;
    std::vector<SymbolicExpression> words;       // suffixes after theta0
    std::vector<SymbolicExpression> unresolved;  // enclosure still straddles tau
    std::vector<Enclosure> energies;             // E_r per word
    Enclosure esum{0, 0};
    bool flagged = false;  // unresolved share above 1%

    std::size_t phi() const noexcept { return words.size(); }
};

/// E_r(sigma) as a rational enclosure.
Enclosure energy(const Automaton& automaton, const WindowTable& table, const SymbolicExpression& expr,
                 const MassVector& masses, const Rational& r);

LambdaSet lambda_set(const Automaton& automaton, const EssentialClass& essential, const DerivedConstants& constants,
                     const WindowTable& table, std::size_t k, const LambdaOptions& options = {});

struct Ss1Row {
    std::size_t k;
    std::size_t phi;
    Enclosure esum;
    double err_r;          // e^r_{phi,r}(mu0) on the discretized mu0
    double ratio;          // err_r / mid(esum)
    double control_ratio;  // same with phi^2 codepoints (NaN when over the DP budget)
};

struct Ss1Report {
    std::vector<Ss1Row> rows;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double band = 0.0;  // ratio_max / ratio_min
    Rational dropped_mass;
    bool truncated = false;  // word cap or DP budget reached before the last k
};

/// mu0 = mu(. | I0) is approximated by the atoms of `measure` whose cylinder
/// lies inside I0, renormalized.
Ss1Report ss1_band_check(const Automaton& automaton, const EssentialClass& essential, const DerivedConstants& constants,
                         const WindowTable& table, const DiscreteMeasure& measure, std::size_t k_first,
                         std::size_t k_last, const LambdaOptions& options = {});

}  // namespace overlapq
