#pragma once

// Net intervals and their characteristic vectors.
//
// A net interval of order n is a gap [h_i, h_{i+1}] between consecutive
// cylinder endpoints of order n whose interior meets the attractor E. Its
// type records the normalized length, the normalized offsets of the order-n
// cylinders whose E-image meets the interior, and the rank among equal
// siblings. Under the finite-type condition only finitely many types occur
// and the children of a net interval depend on its type alone, which turns
// the whole refinement tree into a finite automaton.

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "overlapq/exactfield.hpp"
#include "overlapq/ifs.hpp"

namespace overlapq {

using TypeId = std::size_t;

struct CharVector {
    FieldElement ell;                   // length / rho^n
    std::vector<FieldElement> offsets;  // (a - f_s(0)) / rho^n, increasing
    std::size_t pos_index = 1;          // 1-based rank among equal siblings

    friend bool operator==(const CharVector&, const CharVector&) = default;
};

/// Open window (lo, hi) in the normalized frame of a cylinder.
struct WindowState {
    FieldElement lo;
    FieldElement hi;
};

/// Decides E ∩ (lo, hi) != ∅ exactly, memoizing windows.
///
/// A window meets E as soon as one of the points f_h(0) = b_h,
/// f_h(1) = b_h + rho (all in E) lies strictly inside it. Otherwise E can
/// only enter through cylinders that contain the whole window, and the
/// question is pulled back through them; each pull-back stretches the
/// window by 1/rho, so the recursion is finite.
class AttractorOracle {
public:
    explicit AttractorOracle(const IfsSpec& spec, std::size_t state_cap = 100000);

    bool meets(const FieldElement& lo, const FieldElement& hi);
    std::size_t states() const noexcept { return memo_.size(); }

private:
    struct WindowLess {
        bool operator()(const std::pair<FieldElement, FieldElement>& x,
                        const std::pair<FieldElement, FieldElement>& y) const {
            FieldKeyLess less;
            if (less(x.first, y.first)) return true;
            if (less(y.first, x.first)) return false;
            return less(x.second, y.second);
        }
    };

    const IfsSpec& spec_;
    std::size_t state_cap_;
    std::vector<FieldElement> points_;  // b_h and b_h + rho
    std::map<std::pair<FieldElement, FieldElement>, bool, WindowLess> memo_;
};

bool meets_E(const IfsSpec& spec, const WindowState& window, std::size_t state_cap = 100000);

/// One retained pair (parent offset row j, letter h) feeding child column i.
struct Cover {
    std::size_t row;
    std::size_t letter;
    std::size_t column;
};

struct ChildGeometry {
    FieldElement left;   // cut points d_t, d_{t+1} in the parent's normalized frame
    FieldElement right;
    std::vector<Cover> covers;
};

struct ChildInfo {
    CharVector type;
    ChildGeometry geometry;
};

/// Sub-net-intervals of a net interval of type alpha, left to right.
std::vector<ChildInfo> children(const IfsSpec& spec, const CharVector& alpha, AttractorOracle& oracle);

struct ChildSlot {
    TypeId type;
    ChildGeometry geometry;
};

struct Automaton {
    IfsSpec spec;
    std::vector<CharVector> types;          // BFS discovery order; root first
    std::vector<std::vector<ChildSlot>> xi;  // xi[alpha] = children left to right
    std::vector<std::vector<std::uint8_t>> adjacency;
    TypeId root = 0;

    std::size_t size() const noexcept { return types.size(); }
    bool admissible(TypeId from, TypeId to) const { return adjacency.at(from).at(to) != 0; }
    /// Index of `to` within xi[from]; siblings always have distinct types.
    std::size_t slot_of(TypeId from, TypeId to) const;
};

struct AutomatonCaps {
    std::size_t type_cap = 10000;
    std::size_t state_cap = 100000;
};

/// Breadth-first closure from the root type (1, (0), 1). Throws CapExceeded
/// when the type count passes the cap (finite type not confirmed).
Automaton build_automaton(const IfsSpec& spec, const AutomatonCaps& caps = {});

/// gamma_0 gamma_1 ... gamma_n with gamma_0 the root type.
using SymbolicExpression = std::vector<TypeId>;

void require_admissible(const Automaton& automaton, const SymbolicExpression& expr);

/// The concrete net interval with the given symbolic expression.
Segment realize(const Automaton& automaton, const SymbolicExpression& expr);

/// All admissible expressions of depth n (n + 1 symbols), left to right.
std::vector<SymbolicExpression> expressions_of_depth(const Automaton& automaton, std::size_t n);

/// Distinct f_s(0) over words of length n, increasing.
std::vector<FieldElement> cylinder_origins(const IfsSpec& spec, std::size_t n, std::size_t cap = 2000000);

/// F_n by direct enumeration of cylinder endpoints; oracle use only.
std::vector<Segment> net_intervals_brute(const IfsSpec& spec, std::size_t n, std::size_t cap = 2000000);

struct BruteNetInterval {
    Segment interval;
    CharVector type;
};

/// F_n together with characteristic vectors computed from their definition
/// (rank among equal siblings inside the order n-1 parent); oracle use only.
std::vector<BruteNetInterval> characteristic_vectors_brute(const IfsSpec& spec, std::size_t n,
                                                           std::size_t cap = 2000000);

}  // namespace overlapq
