#pragma once

// Rigorous rational enclosures of the self-similar measure and the
// constants derived from them.

#include <cstddef>
#include <vector>

#include "overlapq/exactfield.hpp"
#include "overlapq/ifs.hpp"
#include "overlapq/netauto.hpp"
#include "overlapq/transition.hpp"

namespace overlapq {

struct Enclosure {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool intersects(const Enclosure& other) const { return lo <= other.hi && other.lo <= hi; }
    double mid() const { return Rational((lo + hi) / 2).get_d(); }
};

/// mu(I) by unfolding mu = sum_h p_h mu o f_h^{-1} for `depth` levels.
/// Pulled-back windows covering [0, 1] score their full weight, disjoint ones
/// score nothing, and those still partial at the last level score [0, weight].
Enclosure measure_enclosure(const IfsSpec& spec, const Segment& interval, unsigned depth);

/// Enclosures of mu([a_i, a_i + ell]) for every type and offset index.
class WindowTable {
public:
    WindowTable() = default;
    explicit WindowTable(std::vector<std::vector<Enclosure>> windows) : windows_(std::move(windows)) {}

    const Enclosure& at(TypeId type, std::size_t offset) const { return windows_.at(type).at(offset); }
    std::size_t types() const noexcept { return windows_.size(); }
    const std::vector<Enclosure>& of(TypeId type) const { return windows_.at(type); }

private:
    std::vector<std::vector<Enclosure>> windows_;
};

WindowTable window_table(const Automaton& automaton, unsigned depth);

/// mu(Delta) = sum_j m_j mu([a_j, a_j + ell]) for the net interval with this
/// expression.
Enclosure net_measure(const Automaton& automaton, const WindowTable& table, const SymbolicExpression& expr);
Enclosure net_measure(const Automaton& automaton, const WindowTable& table, const SymbolicExpression& expr,
                      const MassVector& masses);

struct DerivedConstants {
    FieldElement c2;    // min ell over the essential class; rho^n c2 <= |Delta| <= rho^n
    Rational c3_lower;  // lower bound for the row-sum constant of the normalized transitions
    Rational eta_lower; // lower bound for c3 * c2^(2r) * rho^r
    Rational r;
    bool enabled = false;  // false when positivity failed (c3_lower == 0)
};

DerivedConstants derived_constants(const Automaton& automaton, const EssentialClass& essential,
                                   const WindowTable& table, const Rational& r);

/// Rational lower/upper bounds for x^r with x > 0 in the field and r > 0.
/// Exact field powers for integer r; otherwise outward-rounded floating
/// evaluation.
RationalBounds power_bounds(const FieldElement& x, const Rational& r);

struct Atom {
    FieldElement position;  // f_s(0)
    Rational mass;          // sum of p_s over words with this origin
    double x = 0.0;
};

/// mu_m: the mass p_s of every cylinder of order m moved to its left
/// endpoint. Each point moves by at most rho^m, so the L_r transport
/// distance to mu is at most transport_radius.
struct DiscreteMeasure {
    std::vector<Atom> atoms;  // increasing positions, distinct
    std::size_t depth = 0;
    FieldElement cell;         // rho^m
    double transport_radius = 0.0;
    Rational dropped_mass = 0;  // boundary mass removed by restrict_to

    Rational total_mass() const;
};

DiscreteMeasure discretize(const IfsSpec& spec, std::size_t depth, std::size_t atom_cap = 2000000);

/// Atoms whose whole cylinder lies in `interval`, renormalized to mass 1.
/// The mass of straddling cylinders is recorded in dropped_mass.
DiscreteMeasure restrict_to(const DiscreteMeasure& measure, const Segment& interval);

}  // namespace overlapq
