#include "overlapq/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "overlapq/errors.hpp"

namespace overlapq {

namespace {

struct WindowLess {
    bool operator()(const std::pair<FieldElement, FieldElement>& x,
                    const std::pair<FieldElement, FieldElement>& y) const {
        FieldKeyLess less;
        if (less(x.first, y.first)) return true;
        if (less(y.first, x.first)) return false;
        return less(x.second, y.second);
    }
};

using Frontier = std::map<std::pair<FieldElement, FieldElement>, Rational, WindowLess>;

}  // namespace

Enclosure measure_enclosure(const IfsSpec& spec, const Segment& interval, unsigned depth) {
    const FieldElement zero(0), one(1);
    Rational exact = 0;
    AttractorOracle oracle(spec, 1000000);

    // Routes weight w on window (lo, hi): full, empty or still partial.
    auto route = [&](Frontier& into, FieldElement lo, FieldElement hi, const Rational& w) {
        if (hi <= zero || lo >= one || !(lo < hi)) return;
        if (lo <= zero && hi >= one) {
            exact += w;
            return;
        }
        lo = max(lo, zero);
        hi = min(hi, one);
        if (!oracle.meets(lo, hi)) return;  // mu vanishes off E
        into[{std::move(lo), std::move(hi)}] += w;
    };

    Frontier frontier;
    route(frontier, interval.lo, interval.hi, Rational(1));
    for (unsigned level = 0; level < depth && !frontier.empty(); ++level) {
        Frontier next;
        for (const auto& [window, w] : frontier) {
            for (std::size_t h = 0; h < spec.size(); ++h) {
                const FieldElement& b = spec.offsets[h];
                route(next, (window.first - b) / spec.rho, (window.second - b) / spec.rho, w * spec.probs[h]);
            }
        }
        frontier = std::move(next);
    }
    Rational open = 0;
    for (const auto& entry : frontier) open += entry.second;
    return {exact, exact + open};
}

WindowTable window_table(const Automaton& automaton, unsigned depth) {
    std::vector<std::vector<Enclosure>> windows;
    // types sharing (ell, offsets) share windows
    std::map<std::pair<FieldElement, FieldElement>, Enclosure, WindowLess> cache;
    for (const auto& type : automaton.types) {
        std::vector<Enclosure> row;
        for (const auto& a : type.offsets) {
            auto key = std::make_pair(a, a + type.ell);
            auto it = cache.find(key);
            if (it == cache.end()) {
                it = cache.emplace(key, measure_enclosure(automaton.spec, {key.first, key.second}, depth)).first;
            }
            row.push_back(it->second);
        }
        windows.push_back(std::move(row));
    }
    return WindowTable(std::move(windows));
}

Enclosure net_measure(const Automaton& automaton, const WindowTable& table, const SymbolicExpression& expr) {
    return net_measure(automaton, table, expr, mass_vector(automaton, expr));
}

Enclosure net_measure(const Automaton&, const WindowTable& table, const SymbolicExpression& expr,
                      const MassVector& masses) {
    const auto& windows = table.of(expr.back());
    if (windows.size() != masses.size()) throw Error(ErrorKind::internal, "mass vector and window table disagree");
    Enclosure out{0, 0};
    for (std::size_t j = 0; j < masses.size(); ++j) {
        out.lo += masses[j] * windows[j].lo;
        out.hi += masses[j] * windows[j].hi;
    }
    if (out.hi > 1) out.hi = 1;
    return out;
}

RationalBounds power_bounds(const FieldElement& x, const Rational& r) {
    if (x.sign() <= 0 || r <= 0) throw ValidationError("power bounds need x > 0 and r > 0");
    if (r.get_den() == 1 && r.get_num().fits_ulong_p()) {
        const FieldElement value = pow(x, static_cast<unsigned>(r.get_num().get_ui()));
        if (value.is_rational()) return {value.rational_part(), value.rational_part()};
        // relative width about 2^-60
        Rational width(to_double(value) / 4);
        width /= Rational(Integer(1) << 60);
        return enclose(value, width);
    }
    const double v = std::pow(to_double(x), r.get_d());
    constexpr double margin = 1e-12;
    return {Rational(v * (1 - margin)), Rational(v * (1 + margin))};
}

DerivedConstants derived_constants(const Automaton& automaton, const EssentialClass& essential,
                                   const WindowTable& table, const Rational& r) {
    DerivedConstants out;
    out.r = r;
    bool first = true;
    for (TypeId t : essential.states) {
        if (first || automaton.types[t].ell < out.c2) out.c2 = automaton.types[t].ell;
        first = false;
    }

    bool any = false;
    for (TypeId alpha : essential.states) {
        for (std::size_t s = 0; s < automaton.xi[alpha].size(); ++s) {
            const TypeId beta = automaton.xi[alpha][s].type;
            if (!essential.contains(beta)) continue;
            const WMatrix w = w_matrix(automaton, alpha, s);
            for (std::size_t j = 0; j < w.rows(); ++j) {
                Rational num = 0;
                for (std::size_t i = 0; i < w.cols(); ++i) {
                    if (w(j, i) != 0) num += w(j, i) * table.at(beta, i).lo;
                }
                const Rational& den = table.at(alpha, j).hi;
                Rational ratio = den == 0 ? Rational(0) : Rational(num / den);
                if (!any || ratio < out.c3_lower) out.c3_lower = ratio;
                any = true;
            }
        }
    }
    if (!any) out.c3_lower = 0;
    out.enabled = out.c3_lower > 0;
    if (out.enabled) {
        const auto scale = power_bounds(out.c2 * out.c2 * automaton.spec.rho, r);
        out.eta_lower = out.c3_lower * scale.lo;
    } else {
        out.eta_lower = 0;
    }
    return out;
}

Rational DiscreteMeasure::total_mass() const {
    Rational total = 0;
    for (const auto& a : atoms) total += a.mass;
    return total;
}

DiscreteMeasure discretize(const IfsSpec& spec, std::size_t depth, std::size_t atom_cap) {
    require_valid(spec);
    // f_{h s}(0) = b_h + rho f_s(0), p_{h s} = p_h p_s. Positions are kept
    // as integer pairs (A, B) with x = (A + B sqrt(d)) / (L D^k), where D
    // clears rho and L clears the offsets; masses as integers over denom^k.
    // Neither accumulation then needs a gcd.
    long d = spec.rho.radicand();
    for (const auto& b : spec.offsets) d = std::max(d, b.radicand());
    mpz_class big_d = 1, big_l = 1;
    mpz_lcm(big_d.get_mpz_t(), spec.rho.rational_part().get_den_mpz_t(), spec.rho.radical_part().get_den_mpz_t());
    for (const auto& b : spec.offsets) {
        mpz_lcm(big_l.get_mpz_t(), big_l.get_mpz_t(), b.rational_part().get_den_mpz_t());
        mpz_lcm(big_l.get_mpz_t(), big_l.get_mpz_t(), b.radical_part().get_den_mpz_t());
    }
    const mpz_class rho_a(spec.rho.rational_part() * big_d);
    const mpz_class rho_b(spec.rho.radical_part() * big_d);
    std::vector<mpz_class> off_a, off_b;
    for (const auto& b : spec.offsets) {
        off_a.emplace_back(mpz_class(b.rational_part() * big_l));
        off_b.emplace_back(mpz_class(b.radical_part() * big_l));
    }
    mpz_class denom = 1;
    for (const auto& p : spec.probs) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), p.get_den_mpz_t());
    std::vector<mpz_class> weight;
    for (const auto& p : spec.probs) weight.emplace_back(p.get_num() * (denom / p.get_den()));

    using Key = std::pair<mpz_class, mpz_class>;
    std::map<Key, mpz_class> level{{Key{0, 0}, mpz_class(1)}};
    mpz_class d_power = 1;  // D^(k+1)
    for (std::size_t k = 0; k < depth; ++k) {
        d_power *= big_d;
        std::map<Key, mpz_class> next;
        for (const auto& [x, mass] : level) {
            const mpz_class ya = rho_a * x.first + rho_b * x.second * d;
            const mpz_class yb = rho_a * x.second + rho_b * x.first;
            for (std::size_t h = 0; h < spec.size(); ++h) {
                next[Key{ya + off_a[h] * d_power, yb + off_b[h] * d_power}] += mass * weight[h];
            }
        }
        if (next.size() > atom_cap) {
            throw CapExceeded("discretization exceeded " + std::to_string(atom_cap) + " atoms");
        }
        level = std::move(next);
    }

    DiscreteMeasure out;
    out.depth = depth;
    out.cell = pow(spec.rho, static_cast<unsigned>(depth));
    out.transport_radius = std::nextafter(to_double(out.cell) * (1 + 1e-15), 2.0);
    mpz_class total;
    mpz_pow_ui(total.get_mpz_t(), denom.get_mpz_t(), depth);
    const mpz_class scale = big_l * d_power;
    for (auto& [key, mass] : level) {
        Rational q(mass, total);
        q.canonicalize();
        FieldElement x(Rational(key.first, scale), Rational(key.second, scale), d);
        const double xf = to_double(x);
        out.atoms.push_back({std::move(x), std::move(q), xf});
    }
    // the float images decide unless they are within a few ulps
    std::sort(out.atoms.begin(), out.atoms.end(), [](const Atom& a, const Atom& b) {
        const double gap = 8 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a.x), std::abs(b.x));
        if (std::abs(a.x - b.x) > gap + std::numeric_limits<double>::min()) return a.x < b.x;
        return a.position < b.position;
    });
    return out;
}

DiscreteMeasure restrict_to(const DiscreteMeasure& measure, const Segment& interval) {
    DiscreteMeasure out;
    out.depth = measure.depth;
    out.cell = measure.cell;
    out.transport_radius = measure.transport_radius;
    Rational kept = 0;
    for (const auto& atom : measure.atoms) {
        const FieldElement right = atom.position + measure.cell;
        if (right <= interval.lo || atom.position >= interval.hi) continue;
        if (interval.lo <= atom.position && right <= interval.hi) {
            out.atoms.push_back(atom);
            kept += atom.mass;
        } else {
            out.dropped_mass += atom.mass;
        }
    }
    if (kept == 0) throw CapExceeded("no cylinder of this order fits inside the interval");
    for (auto& atom : out.atoms) atom.mass /= kept;
    return out;
}

}  // namespace overlapq
