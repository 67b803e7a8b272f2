#include "overlapq/netauto.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "overlapq/errors.hpp"

namespace overlapq {

namespace {

void sort_unique(std::vector<FieldElement>& values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

struct ShapeLess {
    bool operator()(const CharVector& x, const CharVector& y) const {
        FieldKeyLess less;
        if (less(x.ell, y.ell)) return true;
        if (less(y.ell, x.ell)) return false;
        if (x.offsets.size() != y.offsets.size()) return x.offsets.size() < y.offsets.size();
        for (std::size_t i = 0; i < x.offsets.size(); ++i) {
            if (less(x.offsets[i], y.offsets[i])) return true;
            if (less(y.offsets[i], x.offsets[i])) return false;
        }
        return false;
    }
};

struct TypeLess {
    bool operator()(const CharVector& x, const CharVector& y) const {
        ShapeLess shape;
        if (shape(x, y)) return true;
        if (shape(y, x)) return false;
        return x.pos_index < y.pos_index;
    }
};

bool same_shape(const CharVector& x, const CharVector& y) { return x.ell == y.ell && x.offsets == y.offsets; }

// Assigns 1-based ranks among siblings of equal (ell, offsets).
void assign_positions(std::vector<CharVector*> siblings) {
    for (std::size_t i = 0; i < siblings.size(); ++i) {
        std::size_t rank = 1;
        for (std::size_t k = 0; k < i; ++k) {
            if (same_shape(*siblings[k], *siblings[i])) ++rank;
        }
        siblings[i]->pos_index = rank;
    }
}

}  // namespace

AttractorOracle::AttractorOracle(const IfsSpec& spec, std::size_t state_cap) : spec_(spec), state_cap_(state_cap) {
    for (const auto& b : spec.offsets) {
        points_.push_back(b);
        points_.push_back(b + spec.rho);
    }
    sort_unique(points_);
}

bool AttractorOracle::meets(const FieldElement& lo_in, const FieldElement& hi_in) {
    if (!(lo_in < hi_in)) return false;
    for (const auto& x : points_) {
        if (lo_in < x && x < hi_in) return true;
    }
    const FieldElement lo = max(lo_in, FieldElement(0));
    const FieldElement hi = min(hi_in, FieldElement(1));
    if (!(lo < hi)) return false;

    auto key = std::make_pair(lo, hi);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= state_cap_) {
        throw CapExceeded("attractor window cache exceeded " + std::to_string(state_cap_) + " states");
    }
    // no marked point inside: only cylinders containing the whole window matter
    bool result = false;
    for (const auto& b : spec_.offsets) {
        if (b <= lo && hi <= b + spec_.rho) {
            if (meets((lo - b) / spec_.rho, (hi - b) / spec_.rho)) {
                result = true;
                break;
            }
        }
    }
    memo_.emplace(std::move(key), result);
    return result;
}

bool meets_E(const IfsSpec& spec, const WindowState& window, std::size_t state_cap) {
    AttractorOracle oracle(spec, state_cap);
    return oracle.meets(window.lo, window.hi);
}

std::vector<ChildInfo> children(const IfsSpec& spec, const CharVector& alpha, AttractorOracle& oracle) {
    const FieldElement zero(0);
    const FieldElement& rho = spec.rho;

    // sub-cylinder origins b_h - a_j in the parent frame, per (j, h)
    struct Candidate {
        std::size_t row;
        std::size_t letter;
        FieldElement origin;
    };
    std::vector<Candidate> candidates;
    std::vector<FieldElement> cuts{zero, alpha.ell};
    for (std::size_t j = 0; j < alpha.offsets.size(); ++j) {
        for (std::size_t h = 0; h < spec.size(); ++h) {
            FieldElement origin = spec.offsets[h] - alpha.offsets[j];
            for (const FieldElement& x : {origin, origin + rho}) {
                if (zero <= x && x <= alpha.ell) cuts.push_back(x);
            }
            candidates.push_back({j, h, std::move(origin)});
        }
    }
    sort_unique(cuts);

    std::vector<ChildInfo> out;
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
        const FieldElement& left = cuts[t];
        const FieldElement& right = cuts[t + 1];
        const FieldElement child_ell = (right - left) / rho;

        struct Retained {
            std::size_t row;
            std::size_t letter;
            FieldElement offset;
        };
        std::vector<Retained> retained;
        for (const auto& c : candidates) {
            if (!(c.origin <= left && right <= c.origin + rho)) continue;
            FieldElement offset = (left - c.origin) / rho;
            if (oracle.meets(offset, offset + child_ell)) retained.push_back({c.row, c.letter, std::move(offset)});
        }
        if (retained.empty()) continue;

        ChildInfo child;
        child.type.ell = child_ell;
        for (const auto& r : retained) child.type.offsets.push_back(r.offset);
        sort_unique(child.type.offsets);
        child.geometry.left = left;
        child.geometry.right = right;
        for (const auto& r : retained) {
            auto pos = std::lower_bound(child.type.offsets.begin(), child.type.offsets.end(), r.offset);
            child.geometry.covers.push_back(
                {r.row, r.letter, static_cast<std::size_t>(pos - child.type.offsets.begin())});
        }
        out.push_back(std::move(child));
    }

    std::vector<CharVector*> siblings;
    for (auto& c : out) siblings.push_back(&c.type);
    assign_positions(siblings);
    return out;
}

std::size_t Automaton::slot_of(TypeId from, TypeId to) const {
    const auto& slots = xi.at(from);
    for (std::size_t s = 0; s < slots.size(); ++s) {
        if (slots[s].type == to) return s;
    }
    throw ValidationError("inadmissible step " + std::to_string(from + 1) + " -> " + std::to_string(to + 1));
}

Automaton build_automaton(const IfsSpec& spec, const AutomatonCaps& caps) {
    require_valid(spec);
    Automaton automaton;
    automaton.spec = spec;
    AttractorOracle oracle(automaton.spec, caps.state_cap);

    std::map<CharVector, TypeId, TypeLess> ids;
    std::map<CharVector, std::vector<ChildInfo>, ShapeLess> by_shape;

    CharVector root{FieldElement(1), {FieldElement(0)}, 1};
    ids.emplace(root, 0);
    automaton.types.push_back(root);
    std::deque<TypeId> queue{0};

    while (!queue.empty()) {
        const TypeId alpha = queue.front();
        queue.pop_front();
        auto cached = by_shape.find(automaton.types[alpha]);
        if (cached == by_shape.end()) {
            cached = by_shape.emplace(automaton.types[alpha], children(automaton.spec, automaton.types[alpha], oracle)).first;
        }
        std::vector<ChildSlot> slots;
        for (const auto& child : cached->second) {
            auto [it, inserted] = ids.emplace(child.type, automaton.types.size());
            if (inserted) {
                if (automaton.types.size() >= caps.type_cap) {
                    throw CapExceeded("finite type not confirmed within " + std::to_string(caps.type_cap) + " types");
                }
                automaton.types.push_back(child.type);
                queue.push_back(it->second);
            }
            slots.push_back({it->second, child.geometry});
        }
        if (automaton.xi.size() <= alpha) automaton.xi.resize(alpha + 1);
        automaton.xi[alpha] = std::move(slots);
    }
    automaton.xi.resize(automaton.types.size());

    const std::size_t n = automaton.types.size();
    automaton.adjacency.assign(n, std::vector<std::uint8_t>(n, 0));
    for (TypeId a = 0; a < n; ++a) {
        for (const auto& slot : automaton.xi[a]) automaton.adjacency[a][slot.type] = 1;
    }
    return automaton;
}

void require_admissible(const Automaton& automaton, const SymbolicExpression& expr) {
    if (expr.empty() || expr.front() != automaton.root) {
        throw ValidationError("symbolic expression must start at the root type");
    }
    for (std::size_t k = 0; k + 1 < expr.size(); ++k) {
        if (expr[k] >= automaton.size() || expr[k + 1] >= automaton.size() ||
            !automaton.admissible(expr[k], expr[k + 1])) {
            throw ValidationError("inadmissible symbolic expression at step " + std::to_string(k + 1));
        }
    }
}

Segment realize(const Automaton& automaton, const SymbolicExpression& expr) {
    require_admissible(automaton, expr);
    FieldElement left(0);
    FieldElement scale(1);
    for (std::size_t k = 0; k + 1 < expr.size(); ++k) {
        const auto& slot = automaton.xi[expr[k]][automaton.slot_of(expr[k], expr[k + 1])];
        left += scale * slot.geometry.left;
        scale *= automaton.spec.rho;
    }
    return {left, left + scale * automaton.types[expr.back()].ell};
}

std::vector<SymbolicExpression> expressions_of_depth(const Automaton& automaton, std::size_t n) {
    std::vector<SymbolicExpression> level{{automaton.root}};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<SymbolicExpression> next;
        for (const auto& expr : level) {
            for (const auto& slot : automaton.xi[expr.back()]) {
                next.push_back(expr);
                next.back().push_back(slot.type);
            }
        }
        level = std::move(next);
    }
    return level;
}

std::vector<FieldElement> cylinder_origins(const IfsSpec& spec, std::size_t n, std::size_t cap) {
    // f_{h s}(0) = b_h + rho f_s(0)
    std::set<FieldElement, FieldKeyLess> current{FieldElement(0)};
    for (std::size_t k = 0; k < n; ++k) {
        std::set<FieldElement, FieldKeyLess> next;
        for (const auto& x : current) {
            for (const auto& b : spec.offsets) next.insert(b + spec.rho * x);
        }
        if (next.size() > cap) throw CapExceeded("cylinder enumeration exceeded " + std::to_string(cap) + " origins");
        current = std::move(next);
    }
    std::vector<FieldElement> out(current.begin(), current.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Segment> net_intervals_brute(const IfsSpec& spec, std::size_t n, std::size_t cap) {
    require_valid(spec);
    const auto origins = cylinder_origins(spec, n, cap);
    const FieldElement scale = pow(spec.rho, static_cast<unsigned>(n));
    std::vector<FieldElement> points;
    for (const auto& o : origins) {
        points.push_back(o);
        points.push_back(o + scale);
    }
    sort_unique(points);
    AttractorOracle oracle(spec);
    std::vector<Segment> out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (oracle.meets(points[i], points[i + 1])) out.push_back({points[i], points[i + 1]});
    }
    return out;
}

std::vector<BruteNetInterval> characteristic_vectors_brute(const IfsSpec& spec, std::size_t n, std::size_t cap) {
    require_valid(spec);
    const FieldElement scale = pow(spec.rho, static_cast<unsigned>(n));
    const auto origins = cylinder_origins(spec, n, cap);
    AttractorOracle oracle(spec);

    std::vector<BruteNetInterval> out;
    for (const auto& interval : net_intervals_brute(spec, n, cap)) {
        BruteNetInterval item;
        item.interval = interval;
        item.type.ell = interval.length() / scale;
        for (const auto& o : origins) {
            if (!(o <= interval.lo && interval.hi <= o + scale)) continue;
            FieldElement lo = (interval.lo - o) / scale;
            FieldElement hi = (interval.hi - o) / scale;
            if (oracle.meets(lo, hi)) item.type.offsets.push_back(lo);
        }
        sort_unique(item.type.offsets);
        out.push_back(std::move(item));
    }

    if (n == 0) return out;
    const auto parents = net_intervals_brute(spec, n - 1, cap);
    for (const auto& parent : parents) {
        std::vector<CharVector*> siblings;
        for (auto& item : out) {
            if (parent.lo <= item.interval.lo && item.interval.hi <= parent.hi) siblings.push_back(&item.type);
        }
        assign_positions(siblings);
    }
    return out;
}

}  // namespace overlapq
