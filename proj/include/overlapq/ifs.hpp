#pragma once

// Equi-contractive iterated function systems f_i(x) = rho*x + b_i on the
// line, normalized so that b_1 = 0 and b_N = 1 - rho (the attractor then
// spans [0, 1]).

#include <cstddef>
#include <string>
#include <vector>

#include "overlapq/exactfield.hpp"

namespace overlapq {

struct IfsSpec {
    FieldElement rho;
    std::vector<FieldElement> offsets;
    std::vector<Rational> probs;

    std::size_t size() const noexcept { return offsets.size(); }
};

/// Letters are 0-based indices into IfsSpec::offsets; the empty word is the
/// identity map.
using Word = std::vector<std::size_t>;

/// Closed interval with exact endpoints.
struct Segment {
    FieldElement lo;
    FieldElement hi;

    FieldElement length() const { return hi - lo; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Every violated invariant, one message each; empty when valid.
std::vector<std::string> validate(const IfsSpec& spec);

/// Throws ValidationError listing all violations.
void require_valid(const IfsSpec& spec);

/// f_w(x) = rho^n x + sum_i rho^(i-1) b_{w_i}.
FieldElement map_point(const IfsSpec& spec, const Word& word, const FieldElement& x);

/// [f_w(0), f_w(1)], of length rho^|w|.
Segment cylinder_interval(const IfsSpec& spec, const Word& word);

/// Conjugates x -> rho*x + c_i (c strictly increasing, arbitrary position)
/// by the affine map taking the attractor's convex hull onto [0, 1].
IfsSpec rescale_to_unit_hull(const FieldElement& rho, const std::vector<FieldElement>& translations,
                             std::vector<Rational> probs);

struct FtcProbe {
    /// levels[n] = Gamma_n = { rho^-n |f_s(0) - f_w(0)| <= 1 : |s| = |w| = n },
    /// sorted increasingly.
    std::vector<std::vector<FieldElement>> levels;
    bool saturated = false;
    std::size_t saturation_level = 0;
};

/// Tracks the normalized origin differences level by level. Once a level
/// repeats the set is fixed for all deeper levels, which confirms the
/// finite-type condition; hitting depth_cap first leaves it unconfirmed.
FtcProbe ftc_probe(const IfsSpec& spec, std::size_t depth_cap);

/// True when consecutive cylinders of order one do not overlap
/// (b_{i+1} - b_i >= rho).
bool satisfies_osc_geometrically(const IfsSpec& spec);

}  // namespace overlapq
