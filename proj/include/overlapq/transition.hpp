#pragma once

// Hereditary law of the measure along the automaton: the unnormalized
// transition matrices W, cylinder-mass vectors, the essential class and the
// row-positivity hypothesis.

#include <cstddef>
#include <vector>

#include "overlapq/exactfield.hpp"
#include "overlapq/netauto.hpp"

namespace overlapq {

/// rows = offsets of the parent type, columns = offsets of the child type.
/// Entry (j, i) is p_h for the unique letter h carrying parent cylinder j
/// onto child offset i, and 0 otherwise.
class WMatrix {
public:
    WMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const Rational& operator()(std::size_t j, std::size_t i) const { return entries_[j * cols_ + i]; }
    Rational& operator()(std::size_t j, std::size_t i) { return entries_[j * cols_ + i]; }
    Rational row_sum(std::size_t j) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Rational> entries_;
};

WMatrix w_matrix(const Automaton& automaton, TypeId alpha, std::size_t slot);

struct EssentialClass {
    std::vector<TypeId> states;  // increasing ids
    TypeId eta1 = 0;
    std::size_t n0 = 0;
    Segment i0;
    SymbolicExpression theta0;  // gamma_0 ... gamma_{n0-1}; the full expression of I0 is theta0 + eta1

    bool contains(TypeId t) const;
    SymbolicExpression i0_expression() const;
};

/// The unique closed strongly connected class of the type graph, with I0
/// selected. Throws ValidationError unless exactly one terminal class exists.
EssentialClass essential_class(const Automaton& automaton);

struct I0Selection {
    std::size_t n0;
    Segment i0;
    SymbolicExpression theta0;
};

/// Shallowest (order >= 1), then leftmost, net interval of type eta1.
I0Selection select_I0(const Automaton& automaton, TypeId eta1, std::size_t depth_cap = 64);

struct PositivityFailure {
    TypeId alpha;
    TypeId beta;
    std::size_t row;  // 0-based

    friend bool operator==(const PositivityFailure&, const PositivityFailure&) = default;
};

struct PositivityReport {
    bool pass = true;
    std::vector<PositivityFailure> failures;
};

/// Every row of W(alpha, beta) has a nonzero entry, for all admissible pairs
/// inside the essential class. Row positivity of the normalized transition
/// matrix is equivalent, its normalizers being positive.
PositivityReport positivity_check(const Automaton& automaton, const EssentialClass& essential);

using MassVector = std::vector<Rational>;

/// m(root) = (1), m(child) = m(parent) W(parent, slot).
MassVector mass_vector(const Automaton& automaton, const SymbolicExpression& expr);

struct OriginMass {
    FieldElement origin;
    Rational mass;
};

/// For every distinct f_s(0) over words s of length n, the total p_s, by
/// enumerating all N^n words; the direct counterpart of mass-vector entries.
std::vector<OriginMass> origin_masses_brute(const IfsSpec& spec, std::size_t n, std::size_t word_cap = 1u << 22);

}  // namespace overlapq
