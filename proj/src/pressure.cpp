#include "overlapq/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "overlapq/errors.hpp"

namespace overlapq {

namespace {

using Matrix = std::vector<std::vector<double>>;

// Relative slack covering rounding in products of at most a few hundred
// positive terms, exp and log.
constexpr double kSlack = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Matrix to_double(const WMatrix& w) {
    Matrix m(w.rows(), std::vector<double>(w.cols(), 0.0));
    for (std::size_t j = 0; j < w.rows(); ++j) {
        for (std::size_t i = 0; i < w.cols(); ++i) m[j][i] = w(j, i).get_d();
    }
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix c(a.size(), std::vector<double>(b.front().size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < c[i].size(); ++j) c[i][j] += a[i][k] * b[k][j];
        }
    }
    return c;
}

double safe_log(double x) { return x > 0 ? std::log(x) : kNegInf; }

struct Edge {
    std::size_t to;  // essential index
    Matrix w;
};

}  // namespace

PathCatalog path_catalog(const Automaton& automaton, const EssentialClass& essential, std::size_t letters,
                         std::size_t path_cap) {
    if (letters < 2) throw ValidationError("pressure paths need at least two letters");
    const auto& states = essential.states;
    auto index_of = [&](TypeId t) {
        return static_cast<std::size_t>(std::lower_bound(states.begin(), states.end(), t) - states.begin());
    };
    std::vector<std::vector<Edge>> edges(states.size());
    for (std::size_t a = 0; a < states.size(); ++a) {
        const TypeId alpha = states[a];
        for (std::size_t s = 0; s < automaton.xi[alpha].size(); ++s) {
            const TypeId beta = automaton.xi[alpha][s].type;
            if (essential.contains(beta)) edges[a].push_back({index_of(beta), to_double(w_matrix(automaton, alpha, s))});
        }
    }

    PathCatalog catalog;
    catalog.letters = letters;
    catalog.states = states.size();
    catalog.log_rho = std::log(overlapq::to_double(automaton.spec.rho));

    std::vector<PathRecord> raw;
    // iterative depth-first walk; one product per depth
    for (std::size_t a = 0; a < states.size(); ++a) {
        const std::size_t rows = automaton.types[states[a]].offsets.size();
        Matrix id(rows, std::vector<double>(rows, 0.0));
        for (std::size_t i = 0; i < rows; ++i) id[i][i] = 1.0;

        struct Frame {
            std::size_t state;
            Matrix product;
            std::size_t next_edge;
        };
        std::vector<Frame> stack{{a, id, 0}};
        while (!stack.empty()) {
            Frame& top = stack.back();
            if (stack.size() == letters) {
                double norm = 0, minrow = std::numeric_limits<double>::infinity();
                std::vector<double> cols(top.product.front().size(), 0.0);
                for (const auto& row : top.product) {
                    double sum = 0;
                    for (std::size_t j = 0; j < row.size(); ++j) {
                        sum += row[j];
                        cols[j] += row[j];
                    }
                    norm += sum;
                    minrow = std::min(minrow, sum);
                }
                const double mincol = *std::min_element(cols.begin(), cols.end());
                raw.push_back({a, top.state, safe_log(norm), safe_log(minrow), safe_log(mincol), 1});
                if (++catalog.paths > path_cap) {
                    throw CapExceeded("pressure path enumeration exceeded " + std::to_string(path_cap) + " paths");
                }
                stack.pop_back();
                continue;
            }
            if (top.next_edge == edges[top.state].size()) {
                stack.pop_back();
                continue;
            }
            const Edge& e = edges[top.state][top.next_edge++];
            Matrix product = multiply(top.product, e.w);
            bool nonzero = false;
            for (const auto& row : product) {
                for (double x : row) nonzero = nonzero || x > 0;
            }
            if (nonzero) stack.push_back({e.to, std::move(product), 0});
        }
    }

    auto key = [](const PathRecord& p) { return std::tie(p.start, p.end, p.log_norm, p.log_minrow, p.log_mincol); };
    std::sort(raw.begin(), raw.end(), [&](const PathRecord& x, const PathRecord& y) { return key(x) < key(y); });
    for (const auto& p : raw) {
        if (!catalog.records.empty() && key(catalog.records.back()) == key(p)) {
            catalog.records.back().count += p.count;
        } else {
            catalog.records.push_back(p);
        }
    }
    return catalog;
}

PathSum path_sum(const PathCatalog& catalog, double t, double r) {
    const double scale = r * static_cast<double>(catalog.letters) * catalog.log_rho;
    double sum = 0;
    for (const auto& p : catalog.records) {
        if (p.log_norm == kNegInf) continue;
        sum += static_cast<double>(p.count) * std::exp(t * (scale + p.log_norm));
    }
    return {sum, sum * (1 - kSlack), sum * (1 + kSlack)};
}

PathSum path_sum(const Automaton& automaton, const EssentialClass& essential, double t, double r, std::size_t n) {
    return path_sum(path_catalog(automaton, essential, n), t, r);
}

SpectralBounds spectral_radius_bounds(const Matrix& m) {
    const std::size_t n = m.size();
    double peak = 0;
    for (const auto& row : m) {
        for (double x : row) peak = std::max(peak, x);
    }
    if (peak == 0) return {0.0, 0.0};
    Matrix a = m;
    for (auto& row : a) {
        for (double& x : row) x /= peak;
    }

    auto apply = [&](const std::vector<double>& v) {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) out[i] += a[i][j] * v[j];
        }
        return out;
    };

    std::vector<double> v(n, 1.0);
    for (int iter = 0; iter < 2000; ++iter) {
        auto w = apply(v);
        double top = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] += v[i];
            top = std::max(top, w[i]);
        }
        for (auto& x : w) x /= top;
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(w[i] - v[i]));
        v = std::move(w);
        if (change < 1e-15) break;
    }

    const auto mv = apply(v);
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    double diag = 0, rows = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > 0) {
            lo = std::min(lo, mv[i] / v[i]);
            hi = std::max(hi, mv[i] / v[i]);
        } else {
            hi = std::numeric_limits<double>::infinity();
        }
        diag = std::max(diag, a[i][i]);
        double row = 0;
        for (double x : a[i]) row += x;
        rows = std::max(rows, row);
    }
    lo = std::max(lo, diag);
    hi = std::min(hi, rows);
    return {lo * (1 - kSlack) * peak, hi * (1 + kSlack) * peak};
}

PressureBounds pressure_bounds(const PathCatalog& catalog, double t, double r) {
    PressureBounds out;
    out.t = t;
    out.r = r;
    out.n = catalog.letters;
    const double k = static_cast<double>(catalog.letters - 1);
    const double scale = r * k * catalog.log_rho;

    const PathSum s = path_sum(catalog, t, r);
    out.hi_fekete = std::log(s.hi) / static_cast<double>(catalog.letters);

    const std::size_t q = catalog.states;
    Matrix g(q, std::vector<double>(q, 0.0)), u_rows = g, u_cols = g;
    for (const auto& p : catalog.records) {
        const double c = static_cast<double>(p.count);
        g[p.start][p.end] += c * std::exp(t * (scale + p.log_norm));
        if (p.log_minrow != kNegInf) u_rows[p.start][p.end] += c * std::exp(t * (scale + p.log_minrow));
        if (p.log_mincol != kNegInf) u_cols[p.start][p.end] += c * std::exp(t * (scale + p.log_mincol));
    }
    for (auto* m : {&g, &u_rows, &u_cols}) {
        for (auto& row : *m) {
            for (double& x : row) x *= (m == &g ? 1 + kSlack : 1 - kSlack);
        }
    }
    out.hi_spectral = std::log(spectral_radius_bounds(g).hi) / k;
    out.lo_rows = safe_log(spectral_radius_bounds(u_rows).lo) / k;
    out.lo_cols = safe_log(spectral_radius_bounds(u_cols).lo) / k;
    out.hi = std::min(out.hi_fekete, out.hi_spectral);
    out.lo = std::max(out.lo_rows, out.lo_cols);
    return out;
}

DimensionEstimate solve_s_r(const PathCatalog& catalog, const Rational& r, double tol) {
    DimensionEstimate est;
    est.r = r;
    est.n = catalog.letters;
    const double rd = r.get_d();
    auto lo_at = [&](double t) {
        ++est.evaluations;
        return pressure_bounds(catalog, t, rd).lo;
    };
    auto hi_at = [&](double t) {
        ++est.evaluations;
        return pressure_bounds(catalog, t, rd).hi;
    };
    auto s_of = [&](double t) { return t >= 1 ? std::numeric_limits<double>::infinity() : rd * t / (1 - t); };

    // left end: the largest t found with lo(t) > 0
    double a = 0, c = 1;
    constexpr double t_floor = 1e-9;
    const bool left_ok = lo_at(t_floor) > 0;
    if (left_ok) {
        a = t_floor;
        c = 1;
        for (int iter = 0; iter < 80 && c - a > 1e-13; ++iter) {
            const double mid = (a + c) / 2;
            (lo_at(mid) > 0 ? a : c) = mid;
        }
    }
    // right end: the smallest t found with hi(t) < 0
    double d = a, b = 1;
    const bool right_ok = hi_at(1.0) < 0;
    if (right_ok) {
        for (int iter = 0; iter < 80 && b - d > 1e-13; ++iter) {
            const double mid = (d + b) / 2;
            (hi_at(mid) < 0 ? b : d) = mid;
        }
    }
    est.t_lo = a;
    est.t_hi = b;
    est.s_lo = s_of(a);
    est.s_hi = right_ok ? s_of(b) : std::numeric_limits<double>::infinity();
    est.bracketed = left_ok && right_ok;
    est.within_tol = est.bracketed && est.s_hi - est.s_lo <= tol;
    return est;
}

DimensionEstimate solve_s_r(const Automaton& automaton, const EssentialClass& essential, const Rational& r,
                            double tol, std::size_t n) {
    return solve_s_r(path_catalog(automaton, essential, n), r, tol);
}

double osc_dimension_oracle(const IfsSpec& spec, const Rational& r) {
    if (!satisfies_osc_geometrically(spec)) throw ValidationError("first-order cylinders overlap; no closed form");
    const double rho_r = std::pow(overlapq::to_double(spec.rho), r.get_d());
    std::vector<double> base;
    for (const auto& p : spec.probs) base.push_back(p.get_d() * rho_r);
    auto f = [&](double q) {
        double sum = 0;
        for (double x : base) sum += std::pow(x, q);
        return sum - 1;
    };
    double lo = 0, hi = 1;  // f(0) = N - 1 > 0, f(1) < 0
    for (int iter = 0; iter < 200 && hi - lo > 0; ++iter) {
        const double mid = (lo + hi) / 2;
        if (mid == lo || mid == hi) break;
        (f(mid) > 0 ? lo : hi) = mid;
    }
    const double q = (lo + hi) / 2;
    return r.get_d() * q / (1 - q);
}

}  // namespace overlapq
