#include "overlapq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "overlapq/errors.hpp"

namespace overlapq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kSplitTableCap = 16u << 20;
// Largest codebook size times atom count handed to the layered DP from the
// ss1 check; beyond it a row (or its control) is not computed.
constexpr double kDpBudget = 2e7;

}  // namespace

std::vector<WeightedPoint> points_of(const DiscreteMeasure& measure) {
    std::vector<WeightedPoint> out;
    out.reserve(measure.atoms.size());
    for (const auto& a : measure.atoms) out.push_back({a.x, a.mass.get_d()});
    return out;
}

CellCost::CellCost(const std::vector<WeightedPoint>& points, double r) : points_(points), r_(r) {
    if (!(r > 0)) throw ValidationError("quantization order r must be positive");
    w_.assign(points.size() + 1, 0);
    s1_ = s2_ = w_;
    for (std::size_t l = 0; l < points.size(); ++l) {
        const long double x = points[l].x, w = points[l].w;
        w_[l + 1] = w_[l] + w;
        s1_[l + 1] = s1_[l] + w * x;
        s2_[l + 1] = s2_[l] + w * x * x;
    }
}

double CellCost::direct(std::size_t i, std::size_t j, double c) const {
    double sum = 0;
    for (std::size_t l = i; l < j; ++l) sum += points_[l].w * std::pow(std::abs(points_[l].x - c), r_);
    return sum;
}

double CellCost::center(std::size_t i, std::size_t j) const {
    double c = 0;
    evaluate(i, j, &c);
    return c;
}

double CellCost::evaluate(std::size_t i, std::size_t j, double* center) const {
    if (j <= i) throw Error(ErrorKind::internal, "empty quantizer cell");
    if (j - i == 1) {
        if (center) *center = points_[i].x;
        return 0.0;
    }
    const long double w = w_[j] - w_[i];
    if (r_ == 2) {
        if (j - i <= 32) {
            // short cells: two passes, no cancellation
            long double mean = 0;
            for (std::size_t l = i; l < j; ++l) mean += static_cast<long double>(points_[l].w) * points_[l].x;
            mean /= w;
            long double sum = 0;
            for (std::size_t l = i; l < j; ++l) {
                const long double d = points_[l].x - mean;
                sum += points_[l].w * d * d;
            }
            if (center) *center = static_cast<double>(mean);
            return static_cast<double>(sum);
        }
        const long double s1 = s1_[j] - s1_[i];
        const long double s2 = s2_[j] - s2_[i];
        if (center) *center = static_cast<double>(s1 / w);
        return static_cast<double>(std::max<long double>(0, s2 - s1 * s1 / w));
    }
    if (r_ == 1) {
        const long double half = w_[i] + w / 2;
        // smallest t with cumulative weight >= half
        auto it = std::lower_bound(w_.begin() + static_cast<std::ptrdiff_t>(i + 1), w_.begin() + static_cast<std::ptrdiff_t>(j + 1), half);
        std::size_t t = static_cast<std::size_t>(it - w_.begin()) - 1;
        t = std::min(std::max(t, i), j - 1);
        const long double c = points_[t].x;
        const long double wl = w_[t + 1] - w_[i], sl = s1_[t + 1] - s1_[i];
        const long double wr = w_[j] - w_[t + 1], sr = s1_[j] - s1_[t + 1];
        if (center) *center = static_cast<double>(c);
        return static_cast<double>(std::max<long double>(0, c * wl - sl + sr - c * wr));
    }
    if (r_ < 1) {
        // concave between atoms: the optimum is an atom
        double best = kInf, arg = points_[i].x;
        for (std::size_t l = i; l < j; ++l) {
            const double v = direct(i, j, points_[l].x);
            if (v < best) {
                best = v;
                arg = points_[l].x;
            }
        }
        if (center) *center = arg;
        return best;
    }
    // convex: golden-section search
    const double invphi = (std::sqrt(5.0) - 1) / 2;
    double a = points_[i].x, b = points_[j - 1].x;
    const double tol = 1e-12 * std::max(b - a, 1e-300);
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = direct(i, j, c), fd = direct(i, j, d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = direct(i, j, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = direct(i, j, d);
        }
    }
    const double x = (a + b) / 2;
    if (center) *center = x;
    return direct(i, j, x);
}

namespace {

struct DpOutput {
    std::vector<double> err;                    // err[q], q = 1..K
    std::vector<std::vector<std::uint32_t>> split;  // split[q][j]: start of the last cell
};

// best_q(j) = min_i best_{q-1}(i) + cost(i, j) over prefixes of j atoms.
DpOutput run_dp(const CellCost& cost, std::size_t layers, bool keep_splits) {
    const std::size_t m = cost.size();
    DpOutput out;
    out.err.assign(layers + 1, kInf);
    if (keep_splits) out.split.assign(layers + 1, {});

    std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
    for (std::size_t j = 1; j <= m; ++j) prev[j] = cost(0, j);
    out.err[1] = prev[m];
    if (keep_splits) out.split[1].assign(m + 1, 0);

    const bool monotone = cost.r() >= 1;
    for (std::size_t q = 2; q <= layers; ++q) {
        std::fill(cur.begin(), cur.end(), kInf);
        std::vector<std::uint32_t> split(m + 1, 0);

        auto best_for = [&](std::size_t j, std::size_t lo, std::size_t hi) {
            double best = kInf;
            std::size_t arg = lo;
            for (std::size_t i = lo; i <= hi; ++i) {
                const double v = prev[i] + cost(i, j);
                if (v < best) {
                    best = v;
                    arg = i;
                }
            }
            cur[j] = best;
            split[j] = static_cast<std::uint32_t>(arg);
            return arg;
        };

        if (monotone) {
            // optimal splits are nondecreasing in j; divide and conquer
            struct Task {
                std::size_t jlo, jhi, olo, ohi;
            };
            std::vector<Task> tasks{{q, m, q - 1, m - 1}};
            while (!tasks.empty()) {
                const Task task = tasks.back();
                tasks.pop_back();
                if (task.jlo > task.jhi) continue;
                const std::size_t j = task.jlo + (task.jhi - task.jlo) / 2;
                const std::size_t lo = std::max(task.olo, q - 1);
                const std::size_t hi = std::min(task.ohi, j - 1);
                const std::size_t arg = best_for(j, lo, hi);
                if (j > task.jlo) tasks.push_back({task.jlo, j - 1, task.olo, arg});
                tasks.push_back({j + 1, task.jhi, arg, task.ohi});
            }
        } else {
            for (std::size_t j = q; j <= m; ++j) best_for(j, q - 1, j - 1);
        }
        out.err[q] = cur[m];
        if (keep_splits) out.split[q] = std::move(split);
        std::swap(prev, cur);
    }
    return out;
}

std::vector<double> codebook_from(const CellCost& cost, const DpOutput& dp, std::size_t k) {
    std::vector<double> centers;
    std::size_t j = cost.size();
    for (std::size_t q = k; q >= 2; --q) {
        const std::size_t i = dp.split[q][j];
        centers.push_back(cost.center(i, j));
        j = i;
    }
    centers.push_back(cost.center(0, j));
    std::reverse(centers.begin(), centers.end());
    return centers;
}

void require_points(const std::vector<WeightedPoint>& points, std::size_t k) {
    if (k < 1) throw ValidationError("quantizer needs k >= 1");
    if (points.empty()) throw ValidationError("quantizer needs at least one atom");
    for (std::size_t l = 1; l < points.size(); ++l) {
        if (!(points[l - 1].x < points[l].x)) throw ValidationError("quantizer atoms must be strictly increasing");
    }
}

void pad(std::vector<double>& codebook, std::size_t k) {
    while (codebook.size() < k) codebook.push_back(codebook.back());
}

}  // namespace

QuantizerResult optimal_quantizer_1d(const std::vector<WeightedPoint>& points, std::size_t k, const Rational& r) {
    require_points(points, k);
    QuantizerResult out;
    out.k = k;
    out.r = r;
    if (k >= points.size()) {
        for (const auto& p : points) out.codebook.push_back(p.x);
        pad(out.codebook, k);
        return out;
    }
    const CellCost cost(points, r.get_d());
    const bool keep = k * (points.size() + 1) <= kSplitTableCap;
    const DpOutput dp = run_dp(cost, k, keep);
    out.err_r = dp.err[k];
    if (keep) out.codebook = codebook_from(cost, dp, k);
    return out;
}

QuantizerResult optimal_quantizer_1d(const DiscreteMeasure& measure, std::size_t k, const Rational& r) {
    auto out = optimal_quantizer_1d(points_of(measure), k, r);
    attach_transport_bounds(out, measure.transport_radius);
    return out;
}

QuantizerResult brute_force_quantizer(const std::vector<WeightedPoint>& points, std::size_t k, const Rational& r) {
    require_points(points, k);
    const std::size_t m = points.size();
    if (m > 12 || k > 4) throw CapExceeded("brute-force quantizer limited to 12 atoms and k <= 4");
    const CellCost cost(points, r.get_d());

    QuantizerResult out;
    out.k = k;
    out.r = r;
    out.err_r = kInf;
    // bit l set: a cell boundary between atoms l and l + 1
    for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) + 1 > k) continue;
        double total = 0;
        std::vector<double> centers;
        std::size_t start = 0;
        for (std::size_t l = 0; l < m; ++l) {
            if (l + 1 == m || (mask >> l) & 1u) {
                total += cost(start, l + 1);
                centers.push_back(cost.center(start, l + 1));
                start = l + 1;
            }
        }
        if (total < out.err_r) {
            out.err_r = total;
            out.codebook = std::move(centers);
        }
    }
    pad(out.codebook, k);
    return out;
}

void attach_transport_bounds(QuantizerResult& result, double radius) {
    const double r = result.r.get_d();
    const double root = std::pow(result.err_r, 1 / r);
    constexpr double margin = 1e-9;  // float error of the discrete optimum
    result.mu_err_lo = std::pow(std::max(0.0, root * (1 - margin) - radius), r);
    result.mu_err_hi = std::pow(root * (1 + margin) + radius, r);
}

std::vector<QuantizerResult> error_curve(const DiscreteMeasure& measure, const Rational& r, std::size_t k_max) {
    const auto points = points_of(measure);
    require_points(points, k_max);
    const CellCost cost(points, r.get_d());
    const std::size_t layers = std::min(k_max, points.size());
    const bool keep = layers * (points.size() + 1) <= kSplitTableCap;
    const DpOutput dp = run_dp(cost, layers, keep);

    std::vector<QuantizerResult> curve;
    for (std::size_t k = 1; k <= k_max; ++k) {
        QuantizerResult res;
        res.k = k;
        res.r = r;
        res.err_r = k >= points.size() ? 0.0 : dp.err[k];
        if (!curve.empty()) res.err_r = std::min(res.err_r, curve.back().err_r);
        if (keep) {
            res.codebook = codebook_from(cost, dp, std::min(k, layers));
            pad(res.codebook, k);
        }
        attach_transport_bounds(res, measure.transport_radius);
        curve.push_back(std::move(res));
    }
    return curve;
}

std::vector<QuantizerResult> error_curve(const IfsSpec& spec, const Rational& r, std::size_t depth,
                                         std::size_t k_max) {
    return error_curve(discretize(spec, depth), r, k_max);
}

CoefficientBand coefficient_band(const std::vector<QuantizerResult>& curve, double s, std::size_t k_min) {
    if (!(s > 0)) throw ValidationError("coefficient band needs s > 0");
    if (k_min < 1) throw ValidationError("coefficient band needs k_min >= 1");
    CoefficientBand band;
    band.s = s;
    for (std::size_t k = k_min; k <= curve.size(); k *= 2) {
        const auto& res = curve[k - 1];
        const double scaled = std::pow(static_cast<double>(k), res.r.get_d() / s) * res.err_r;
        band.points.push_back({k, scaled});
    }
    if (band.points.empty()) return band;
    band.band_lo = band.band_hi = band.points.front().scaled;
    for (const auto& p : band.points) {
        band.band_lo = std::min(band.band_lo, p.scaled);
        band.band_hi = std::max(band.band_hi, p.scaled);
    }
    band.ratio = band.band_lo > 0 ? band.band_hi / band.band_lo : kInf;
    return band;
}

Enclosure energy(const Automaton& automaton, const WindowTable& table, const SymbolicExpression& expr,
                 const MassVector& masses, const Rational& r) {
    const Enclosure mu = net_measure(automaton, table, expr, masses);
    const FieldElement length =
        pow(automaton.spec.rho, static_cast<unsigned>(expr.size() - 1)) * automaton.types[expr.back()].ell;
    const RationalBounds len = power_bounds(length, r);
    return {mu.lo * len.lo, mu.hi * len.hi};
}

namespace {

MassVector step_masses(const Automaton& automaton, const MassVector& m, TypeId from, std::size_t slot) {
    const WMatrix w = w_matrix(automaton, from, slot);
    MassVector next(w.cols(), Rational(0));
    for (std::size_t j = 0; j < w.rows(); ++j) {
        if (m[j] == 0) continue;
        for (std::size_t i = 0; i < w.cols(); ++i) {
            if (w(j, i) != 0) next[i] += m[j] * w(j, i);
        }
    }
    return next;
}

}  // namespace

LambdaSet lambda_set(const Automaton& automaton, const EssentialClass& essential, const DerivedConstants& constants,
                     const WindowTable& table, std::size_t k, const LambdaOptions& options) {
    if (!constants.enabled) throw ValidationError("threshold sets need positive row sums (positivity failed)");
    const Rational& r = constants.r;

    LambdaSet out;
    out.k = k;
    const SymbolicExpression root = essential.i0_expression();
    const MassVector root_masses = mass_vector(automaton, root);
    Rational eta_k = 1;
    for (std::size_t i = 0; i < k; ++i) eta_k *= constants.eta_lower;
    out.threshold = eta_k * energy(automaton, table, root, root_masses, r).lo;
    const Rational& tau = out.threshold;
    const std::size_t prefix = essential.theta0.size();

    struct Node {
        SymbolicExpression expr;
        MassVector masses;
    };
    std::vector<Node> stack{{root, root_masses}};
    auto suffix = [&](const SymbolicExpression& e) { return SymbolicExpression(e.begin() + static_cast<std::ptrdiff_t>(prefix), e.end()); };

    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        Enclosure e = energy(automaton, table, node.expr, node.masses, r);

        // straddling: tighten mu(Delta) by a deeper direct unfolding
        for (unsigned pass = 1; pass <= options.refinements && e.lo < tau && tau <= e.hi; ++pass) {
            const unsigned depth = static_cast<unsigned>(node.expr.size()) + options.window_depth + 8 * pass;
            const Enclosure direct = measure_enclosure(automaton.spec, realize(automaton, node.expr), depth);
            const Enclosure mu = net_measure(automaton, table, node.expr, node.masses);
            const Enclosure tight{std::max<Rational>(mu.lo, direct.lo), std::min<Rational>(mu.hi, direct.hi)};
            const FieldElement length = pow(automaton.spec.rho, static_cast<unsigned>(node.expr.size() - 1)) *
                                        automaton.types[node.expr.back()].ell;
            const RationalBounds len = power_bounds(length, r);
            e = {tight.lo * len.lo, tight.hi * len.hi};
        }

        if (e.hi < tau) {
            out.words.push_back(suffix(node.expr));
            out.energies.push_back(e);
            out.esum.lo += e.lo;
            out.esum.hi += e.hi;
        } else if (e.lo >= tau && node.expr.size() - prefix < options.depth_cap) {
            const TypeId last = node.expr.back();
            for (std::size_t s = automaton.xi[last].size(); s-- > 0;) {
                Node child{node.expr, step_masses(automaton, node.masses, last, s)};
                child.expr.push_back(automaton.xi[last][s].type);
                stack.push_back(std::move(child));
            }
        } else {
            out.unresolved.push_back(suffix(node.expr));
        }
        if (out.words.size() + out.unresolved.size() > options.word_cap) {
            throw CapExceeded("threshold set exceeded " + std::to_string(options.word_cap) + " words");
        }
    }
    const std::size_t total = out.words.size() + out.unresolved.size();
    out.flagged = total > 0 && 100 * out.unresolved.size() > total;
    return out;
}

Ss1Report ss1_band_check(const Automaton& automaton, const EssentialClass& essential, const DerivedConstants& constants,
                         const WindowTable& table, const DiscreteMeasure& measure, std::size_t k_first,
                         std::size_t k_last, const LambdaOptions& options) {
    const DiscreteMeasure mu0 = restrict_to(measure, essential.i0);
    const auto points = points_of(mu0);
    Ss1Report report;
    report.dropped_mass = mu0.dropped_mass;
    for (std::size_t k = k_first; k <= k_last; ++k) {
        LambdaSet set;
        try {
            set = lambda_set(automaton, essential, constants, table, k, options);
        } catch (const CapExceeded&) {
            report.truncated = true;
            break;
        }
        if (static_cast<double>(set.phi()) * static_cast<double>(points.size()) > kDpBudget) {
            report.truncated = true;
            break;
        }
        Ss1Row row;
        row.k = k;
        row.phi = set.phi();
        row.esum = set.esum;
        row.err_r = optimal_quantizer_1d(points, std::max<std::size_t>(row.phi, 1), constants.r).err_r;
        const std::size_t control_k = std::max<std::size_t>(row.phi * row.phi, 1);
        double control = std::nan("");
        if (control_k >= points.size()) {
            control = 0.0;
        } else if (static_cast<double>(control_k) * static_cast<double>(points.size()) <= kDpBudget) {
            control = optimal_quantizer_1d(points, control_k, constants.r).err_r;
        }
        const double mid = set.esum.mid();
        row.ratio = mid > 0 ? row.err_r / mid : kInf;
        row.control_ratio = mid > 0 ? control / mid : kInf;
        report.rows.push_back(row);
    }
    if (!report.rows.empty()) {
        report.ratio_min = report.ratio_max = report.rows.front().ratio;
        for (const auto& row : report.rows) {
            report.ratio_min = std::min(report.ratio_min, row.ratio);
            report.ratio_max = std::max(report.ratio_max, row.ratio);
        }
        report.band = report.ratio_min > 0 ? report.ratio_max / report.ratio_min : kInf;
    }
    return report;
}

}  // namespace overlapq
