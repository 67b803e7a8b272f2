#pragma once

// Two-sided bounds for the pressure
//   Phi_r(t) = lim (1/n) log sum_{sigma in Omega^n} (rho^(r n) ||W_sigma||)^t
// over admissible essential paths, and the zero that yields s_r.
//
// ||.|| is the entry sum. Since every row of a W matrix sums to at most one,
// ||A W B|| <= ||A|| ||B||, which gives S_{m+n} <= S_m S_n and an upper
// bound from any single n. The lower bound comes from the min-row-sum and
// min-column-sum functionals, which are supermultiplicative: the matrix of
// their t-th power sums over k-step paths between endpoint types has a
// spectral radius whose k-th root bounds exp(Phi) from below.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "overlapq/exactfield.hpp"
#include "overlapq/netauto.hpp"
#include "overlapq/transition.hpp"

namespace overlapq {

/// One product W_sigma (or a group of identical ones) of an n-letter path.
struct PathRecord {
    std::size_t start;  // index into the essential states
    std::size_t end;
    double log_norm;    // log of the entry sum
    double log_minrow;  // log of the smallest row sum (-inf if a row vanishes)
    double log_mincol;
    std::size_t count;  // number of paths sharing this record
};

/// All n-letter admissible paths inside the essential class with nonzero
/// product, merged where identical.
struct PathCatalog {
    std::size_t letters = 0;
    std::size_t states = 0;  // card of the essential class
    double log_rho = 0.0;
    std::size_t paths = 0;   // before merging
    std::vector<PathRecord> records;
};

PathCatalog path_catalog(const Automaton& automaton, const EssentialClass& essential, std::size_t letters,
                         std::size_t path_cap = 4000000);

/// S_n(t) with a certified relative enclosure [lo, hi].
struct PathSum {
    double value;
    double lo;
    double hi;
};

PathSum path_sum(const PathCatalog& catalog, double t, double r);
PathSum path_sum(const Automaton& automaton, const EssentialClass& essential, double t, double r, std::size_t n);

struct SpectralBounds {
    double lo;
    double hi;
};

/// Collatz-Wielandt enclosure of the spectral radius of a small nonnegative
/// matrix, using a positive test vector from power iteration on M + I.
SpectralBounds spectral_radius_bounds(const std::vector<std::vector<double>>& m);

struct PressureBounds {
    double t = 0.0;
    double r = 0.0;
    std::size_t n = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double hi_fekete = 0.0;    // (1/n) log S_n
    double hi_spectral = 0.0;  // (1/k) log rho(G_k)
    double lo_rows = 0.0;      // min-row functional
    double lo_cols = 0.0;      // min-column functional
};

PressureBounds pressure_bounds(const PathCatalog& catalog, double t, double r);

struct DimensionEstimate {
    Rational r;
    std::size_t n = 0;
    double t_lo = 0.0;  // Phi > 0 certified at t_lo
    double t_hi = 1.0;  // Phi < 0 certified at t_hi
    double s_lo = 0.0;
    double s_hi = std::numeric_limits<double>::infinity();
    bool bracketed = false;  // both ends certified
    bool within_tol = false; // s_hi - s_lo <= tol
    std::size_t evaluations = 0;

    double s_center() const { return (s_lo + s_hi) / 2; }
};

/// Bisects the certified sign changes of lo and hi separately; the zero of
/// Phi_r lies in [t_lo, t_hi] and s = r t / (1 - t).
DimensionEstimate solve_s_r(const PathCatalog& catalog, const Rational& r, double tol);
DimensionEstimate solve_s_r(const Automaton& automaton, const EssentialClass& essential, const Rational& r,
                            double tol, std::size_t n);

/// Solves sum_i (p_i rho^r)^(s/(s+r)) = 1. Refuses (ValidationError) unless
/// first-order cylinders do not overlap.
double osc_dimension_oracle(const IfsSpec& spec, const Rational& r);

}  // namespace overlapq
