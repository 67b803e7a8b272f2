// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "overlapq/measure.hpp"
#include "overlapq/netauto.hpp"
#include "overlapq/presets.hpp"
#include "overlapq/pressure.hpp"
#include "overlapq/quantizer.hpp"
#include "overlapq/transition.hpp"

using namespace overlapq;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

FieldElement q(long n, long d = 1) { return FieldElement(make_rational(n, d)); }

std::string str(const std::vector<Segment>& s) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << "[" << s[i].lo << "," << s[i].hi << "]";
    os << "}";
    return os.str();
}

// Whether E meets the open window (lo, hi), with 0 and 1 in E (hull [0, 1],
// rho > 0). E ∩ W is the union of f_h(E ∩ f_h^{-1}(W)), so pulling windows
// back either hits 0 or 1 strictly inside or closes up on a finite set.
// -1 when the set of windows grows past the cap.
int window_status(const IfsSpec& spec, const FieldElement& lo, const FieldElement& hi) {
    std::set<std::pair<FieldElement, FieldElement>, std::function<bool(const std::pair<FieldElement, FieldElement>&,
                                                                         const std::pair<FieldElement, FieldElement>&)>>
        seen([](const auto& x, const auto& y) {
            const FieldKeyLess less;
            if (less(x.first, y.first)) return true;
            if (less(y.first, x.first)) return false;
            return less(x.second, y.second);
        });
    std::vector<std::pair<FieldElement, FieldElement>> todo{{lo, hi}};
    while (!todo.empty()) {
        auto [a, b] = todo.back();
        todo.pop_back();
        if ((a < q(0) && q(0) < b) || (a < q(1) && q(1) < b)) return 1;
        if (!(q(0) < b) || !(a < q(1))) continue;
        a = max(a, q(0));
        b = min(b, q(1));
        if (!seen.insert({a, b}).second) continue;
        if (seen.size() > 100000) return -1;
        for (std::size_t h = 0; h < spec.size(); ++h) {
            todo.push_back({(a - spec.offsets[h]) / spec.rho, (b - spec.offsets[h]) / spec.rho});
        }
    }
    return 0;
}

Outcome criterion1() {
    const auto a = build_automaton(preset("counterexample"));
    const auto e = essential_class(a);
    std::ostringstream why;
    bool ok = a.size() == 7;
    const std::vector<CharVector> types{
        {q(1), {q(0)}, 1},          {q(1, 3), {q(0)}, 1},          {q(2, 3), {q(0), q(1, 3)}, 1},
        {q(1, 3), {q(2, 3)}, 1},    {q(1, 3), {q(0), q(2, 3)}, 1}, {q(1, 3), {q(0), q(2, 3)}, 2},
        {q(2, 3), {q(1, 3)}, 1}};
    const std::vector<std::vector<TypeId>> xi{{1, 2, 3, 0}, {1, 2}, {4, 2, 5, 6}, {0}, {1, 2}, {1, 2}, {3, 0}};
    for (std::size_t i = 0; ok && i < 7; ++i) {
        ok = a.types[i] == types[i] && a.xi[i].size() == xi[i].size();
        for (std::size_t s = 0; ok && s < xi[i].size(); ++s) ok = a.xi[i][s].type == xi[i][s];
    }
    why << "card=" << a.size() << (ok ? " types and xi exact" : " types/xi differ");
    const bool all_essential = e.states.size() == 7;
    why << ", essential=" << e.states.size();

    const auto report = positivity_check(a, e);
    std::set<std::tuple<TypeId, TypeId, std::size_t>> reported;
    for (const auto& f : report.failures) reported.insert({f.alpha, f.beta, f.row});
    const bool required = reported.count({2, 2, 1}) == 1;

    // Independent geometry: a parent row j is empty for a child when no
    // first-level piece of the parent's j-th cylinder meets the child's
    // interior.
    std::set<std::tuple<TypeId, TypeId, std::size_t>> observed;
    bool undecided = false;
    for (std::size_t n = 1; n <= 4; ++n) {
        const FieldElement scale_parent = pow(a.spec.rho, static_cast<unsigned>(n - 1));
        const FieldElement scale_child = scale_parent * a.spec.rho;
        for (const auto& expr : expressions_of_depth(a, n)) {
            const TypeId alpha = expr[expr.size() - 2], beta = expr.back();
            const Segment parent = realize(a, SymbolicExpression(expr.begin(), expr.end() - 1));
            const Segment child = realize(a, expr);
            const auto& rows = a.types[alpha].offsets;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                const FieldElement origin = parent.lo - scale_parent * rows[j];
                bool reaches = false;
                for (std::size_t h = 0; h < a.spec.size() && !reaches; ++h) {
                    const FieldElement o = origin + scale_parent * a.spec.offsets[h];
                    const int st = window_status(a.spec, (child.lo - o) / scale_child, (child.hi - o) / scale_child);
                    if (st < 0) undecided = true;
                    reaches = st != 0;
                }
                if (!reaches) observed.insert({alpha, beta, j});
            }
        }
    }
    why << ", failures (alpha,beta,row 1-based):";
    for (const auto& [x, y, r] : reported) why << " (" << x + 1 << "," << y + 1 << "," << r + 1 << ")";
    why << "; geometric oracle:";
    for (const auto& [x, y, r] : observed) why << " (" << x + 1 << "," << y + 1 << "," << r + 1 << ")";
    if (undecided) why << " [oracle undecided somewhere]";
    return {ok && all_essential && required && reported == observed && !undecided, why.str()};
}

Outcome criterion2() {
    const auto spec = preset("counterexample");
    const std::vector<Segment> expected{{q(0), q(1, 9)}, {q(1, 9), q(1, 3)}, {q(1, 3), q(4, 9)}, {q(2, 3), q(1)}};
    const auto brute = net_intervals_brute(spec, 1);
    const auto a = build_automaton(spec);
    std::vector<Segment> realized;
    for (const auto& e : expressions_of_depth(a, 1)) realized.push_back(realize(a, e));
    return {brute == expected && realized == expected, "brute " + str(brute) + ", automaton " + str(realized)};
}

Outcome criterion3() {
    const double target = std::log(2.0) / std::log(3.0);
    const auto a = build_automaton(preset("cantor"));
    const auto e = essential_class(a);
    const auto cat = path_catalog(a, e, 12);
    bool ok = true;
    std::ostringstream why;
    why.precision(12);
    for (int r : {1, 2}) {
        const auto d = solve_s_r(cat, Rational(r), 0.02);
        const double osc = osc_dimension_oracle(preset("cantor"), Rational(r));
        const bool here = d.s_lo <= target && target <= d.s_hi && d.s_hi - d.s_lo <= 0.02 &&
                          std::abs(osc - target) <= 1e-9 && std::abs(osc - d.s_center()) <= 1e-9;
        ok = ok && here;
        why << "r=" << r << " s in [" << d.s_lo << ", " << d.s_hi << "], oracle " << osc << "; ";
    }
    return {ok, why.str()};
}

Outcome criterion4() {
    const auto a = build_automaton(preset("lebesgue"));
    const auto e = essential_class(a);
    const auto cat = path_catalog(a, e, 12);
    bool ok = true;
    std::ostringstream why;
    for (int r : {1, 2}) {
        const auto d = solve_s_r(cat, Rational(r), 0.02);
        ok = ok && d.s_lo <= 1.0 && 1.0 <= d.s_hi && d.s_hi - d.s_lo <= 0.02;
        why << "r=" << r << " s in [" << d.s_lo << ", " << d.s_hi << "]; ";
    }
    const auto curve = error_curve(preset("lebesgue"), Rational(2), 14, 16);
    double worst = 0;
    for (std::size_t k : {1u, 2u, 4u, 8u, 16u}) {
        const double exact = 1.0 / (12.0 * static_cast<double>(k * k));
        worst = std::max(worst, std::abs(curve[k - 1].err_r / exact - 1));
    }
    ok = ok && worst <= 0.05;
    why << "max relative deviation from 1/(12k^2) = " << worst;
    return {ok, why.str()};
}

Outcome criterion5() {
    const auto dm = discretize(preset("cantor"), 12);
    const auto res = optimal_quantizer_1d(dm, 1, Rational(2));
    const double slack_cap = 2 * std::pow(3.0, -12);
    std::ostringstream why;
    why.precision(12);
    why << "e^2 in [" << res.mu_err_lo << ", " << res.mu_err_hi << "], transport radius " << dm.transport_radius
        << " <= " << slack_cap;
    return {res.mu_err_lo <= 0.125 && 0.125 <= res.mu_err_hi && dm.transport_radius <= slack_cap, why.str()};
}

Outcome criterion6() {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> msize(1, 12), ksize(1, 4);
    std::uniform_real_distribution<double> pos(0, 1), weight(0.01, 1);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = msize(rng);
        std::set<double> xs;
        while (xs.size() < m) xs.insert(pos(rng));
        std::vector<WeightedPoint> pts;
        double total = 0;
        for (double x : xs) {
            pts.push_back({x, weight(rng)});
            total += pts.back().w;
        }
        for (auto& p : pts) p.w /= total;
        const std::size_t k = ksize(rng);
        const Rational r(1 + trial % 3);
        const double dp = optimal_quantizer_1d(pts, k, r).err_r;
        const double bf = brute_force_quantizer(pts, k, r).err_r;
        worst = std::max(worst, bf == 0 ? std::abs(dp) : std::abs(dp - bf) / bf);
    }
    std::ostringstream why;
    why << "200 instances, max relative deviation " << worst;
    return {worst <= 1e-12, why.str()};
}

Outcome criterion7() {
    bool ok = true;
    std::ostringstream why;
    for (const auto& name : preset_names()) {
        const auto spec = preset(name);
        const auto a = build_automaton(spec);
        // word enumeration for the offset masses
        std::vector<std::pair<FieldElement, Rational>> words{{q(0), Rational(1)}};
        FieldElement scale = 1;
        for (std::size_t n = 0; n <= 6; ++n) {
            std::map<FieldElement, Rational, FieldKeyLess> masses;
            for (const auto& [x, p] : words) masses[x] += p;
            std::vector<Segment> realized;
            bool masses_ok = true;
            for (const auto& e : expressions_of_depth(a, n)) {
                const Segment s = realize(a, e);
                realized.push_back(s);
                const auto m = mass_vector(a, e);
                const auto& offsets = a.types[e.back()].offsets;
                for (std::size_t j = 0; j < offsets.size(); ++j) {
                    const auto it = masses.find(s.lo - scale * offsets[j]);
                    masses_ok = masses_ok && it != masses.end() && it->second == m[j];
                }
            }
            const bool nets_ok = realized == net_intervals_brute(spec, n);
            if (!nets_ok || !masses_ok) {
                ok = false;
                why << name << " n=" << n << (nets_ok ? "" : " F_n differs") << (masses_ok ? "" : " masses differ")
                    << "; ";
            }
            std::vector<std::pair<FieldElement, Rational>> next;
            for (const auto& [x, p] : words) {
                for (std::size_t h = 0; h < spec.size(); ++h) next.push_back({x + scale * spec.offsets[h], p * spec.probs[h]});
            }
            words = std::move(next);
            scale *= spec.rho;
        }
    }
    if (ok) why << preset_names().size() << " presets, n = 0..6, intervals and masses identical";
    return {ok, why.str()};
}

Outcome criterion8() {
    bool ok = true;
    std::ostringstream why;
    std::size_t checked = 0;
    for (const auto& name : preset_names()) {
        const auto a = build_automaton(preset(name));
        const auto e = essential_class(a);
        std::map<std::size_t, PathCatalog> cats;
        for (std::size_t n = 2; n <= 12; ++n) cats.emplace(n, path_catalog(a, e, n));
        for (double t : {0.2, 0.5, 0.8}) {
            for (std::size_t m = 2; m <= 6; ++m) {
                for (std::size_t n = 2; n <= 6; ++n) {
                    const auto whole = path_sum(cats.at(m + n), t, 2.0);
                    const auto bound = path_sum(cats.at(m), t, 2.0).hi * path_sum(cats.at(n), t, 2.0).hi;
                    ++checked;
                    if (!(whole.lo <= bound)) {
                        ok = false;
                        why << name << " t=" << t << " m=" << m << " n=" << n << " violates; ";
                    }
                }
            }
        }
    }
    why << checked << " submultiplicativity checks; ";
    for (const char* name : {"erdos", "lambda-cantor:1"}) {
        const auto a = build_automaton(preset(name));
        const auto e = essential_class(a);
        const auto cat = path_catalog(a, e, 12);
        const double hi1 = pressure_bounds(cat, 1.0, 2.0).hi;
        const double lo005 = pressure_bounds(cat, 0.05, 2.0).lo;
        ok = ok && hi1 < 0 && lo005 > 0;
        why << name << " hi(1)=" << hi1 << " lo(0.05)=" << lo005 << "; ";
    }
    return {ok, why.str()};
}

Outcome criterion9() {
    bool ok = true;
    std::ostringstream why;
    const std::vector<std::pair<std::string, std::size_t>> systems{{"erdos", 20}, {"lambda-cantor:1", 10}};
    for (const auto& [name, depth] : systems) {
        const auto a = build_automaton(preset(name));
        const auto e = essential_class(a);
        const auto d = solve_s_r(path_catalog(a, e, 12), Rational(2), 0.02);
        const double s = d.s_center();
        const auto curve = error_curve(discretize(preset(name), depth), Rational(2), 256);
        const auto band = coefficient_band(curve, s, 4);
        const auto control = coefficient_band(curve, s / 2, 4);
        const bool here = std::isfinite(band.ratio) && band.ratio <= 50 && band.points.back().k == 256 &&
                          control.ratio >= 4 * band.ratio;
        ok = ok && here;
        why << name << " (m=" << depth << ", s=" << s << ") ratio " << band.ratio << ", control " << control.ratio
            << "; ";
    }
    return {ok, why.str()};
}

Outcome criterion10() {
    bool ok = true;
    std::ostringstream why;
    for (const auto& name : preset_names()) {
        const auto a = build_automaton(preset(name));
        const auto e = essential_class(a);
        if (!positivity_check(a, e).pass) continue;
        const auto table = window_table(a, 16);
        const auto c = derived_constants(a, e, table, Rational(2));
        std::size_t checked = 0, bad = 0;
        // sigma runs over essential words eta1 sigma_2 ... of at most 8 letters
        std::function<void(const SymbolicExpression&, const MassVector&, const Enclosure&)> walk =
            [&](const SymbolicExpression& expr, const MassVector& masses, const Enclosure& parent) {
                if (expr.size() - e.theta0.size() >= 8) return;
                const TypeId last = expr.back();
                for (std::size_t slot = 0; slot < a.xi[last].size(); ++slot) {
                    SymbolicExpression child = expr;
                    child.push_back(a.xi[last][slot].type);
                    const WMatrix w = w_matrix(a, last, slot);
                    MassVector next(w.cols(), Rational(0));
                    for (std::size_t j = 0; j < w.rows(); ++j) {
                        for (std::size_t i = 0; i < w.cols(); ++i) next[i] += masses[j] * w(j, i);
                    }
                    const Enclosure mu = net_measure(a, table, child, next);
                    ++checked;
                    if (!(mu.hi >= c.c3_lower * parent.lo)) ++bad;
                    walk(child, next, mu);
                }
            };
        const auto root = e.i0_expression();
        const auto masses = mass_vector(a, root);
        walk(root, masses, net_measure(a, table, root, masses));
        ok = ok && bad == 0 && c.c3_lower > 0;
        why << name << " " << checked << " words";
        if (bad) why << " (" << bad << " violations)";
        why << "; ";
    }
    return {ok, why.str()};
}

Outcome criterion11() {
    auto capture = [](const std::string& args) {
        const std::string cmd = std::string(OVERLAPQ_CLI) + " " + args + " 2>/dev/null";
        FILE* pipe = popen(cmd.c_str(), "r");
        std::string out;
        if (pipe == nullptr) return std::pair<int, std::string>{-1, out};
        std::array<char, 65536> buf{};
        std::size_t got;
        while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
        const int status = pclose(pipe);
        return std::pair<int, std::string>{WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
    };
    bool ok = true;
    std::size_t runs = 0;
    std::ostringstream why;
    for (const auto& name : preset_names()) {
        for (const char* cmd : {"analyze", "dimension", "quantize", "verify"}) {
            const std::string args = std::string(cmd) + " --preset " + name;
            const auto first = capture(args);
            const auto second = capture(args);
            runs += 2;
            if (first.first != 0 || first != second || first.second.empty()) {
                ok = false;
                why << args << " differs or failed (exit " << first.first << "); ";
            }
        }
    }
    why << runs << " runs compared";
    return {ok, why.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"counterexample automaton and positivity", criterion1},
        {"first-order net intervals of the counterexample", criterion2},
        {"Cantor dimension", criterion3},
        {"uniform measure dimension and errors", criterion4},
        {"Cantor variance", criterion5},
        {"quantizer against enumeration", criterion6},
        {"net intervals and masses against enumeration", criterion7},
        {"pressure sandwich", criterion8},
        {"quantization coefficient band", criterion9},
        {"net measure row bound", criterion10},
        {"determinism", criterion11},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
                  << std::fixed;
        std::cout.precision(2);
        std::cout << secs << " s): ";
        std::cout.unsetf(std::ios::floatfield);
        std::cout.precision(6);
        std::cout << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
