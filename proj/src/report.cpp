#include "overlapq/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "overlapq/errors.hpp"
#include "overlapq/measure.hpp"
#include "overlapq/netauto.hpp"
#include "overlapq/presets.hpp"
#include "overlapq/pressure.hpp"
#include "overlapq/quantizer.hpp"
#include "overlapq/transition.hpp"

namespace overlapq {

using nlohmann::ordered_json;

namespace {

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON has no infinities; they become null.
ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

std::size_t label(TypeId t) { return t + 1; }

ordered_json labels(const std::vector<TypeId>& ids) {
    ordered_json out = ordered_json::array();
    for (auto t : ids) out.push_back(label(t));
    return out;
}

ordered_json system_json(const RunConfig& config) {
    ordered_json sys;
    sys["preset"] = config.preset.empty() ? ordered_json(nullptr) : ordered_json(config.preset);
    sys["rho"] = format(config.spec.rho);
    sys["offsets"] = ordered_json::array();
    for (const auto& b : config.spec.offsets) sys["offsets"].push_back(format(b));
    sys["probs"] = ordered_json::array();
    for (const auto& p : config.spec.probs) sys["probs"].push_back(format(p));
    return sys;
}

ordered_json header(const char* command, const RunConfig& config) {
    ordered_json body;
    body["schema"] = 1;
    body["command"] = command;
    body["system"] = system_json(config);
    body["depths"] = {{"window", config.depths.window},
                      {"measure", config.depths.measure},
                      {"discretize", config.depths.discretize},
                      {"pressure", config.depths.pressure},
                      {"verify", config.depths.verify}};
    return body;
}

Automaton build(const RunConfig& config) {
    AutomatonCaps caps;
    caps.type_cap = config.type_cap;
    caps.state_cap = config.state_cap;
    return build_automaton(config.spec, caps);
}

ordered_json enclosure_json(const Enclosure& e) { return {format(e.lo), format(e.hi)}; }

Rational parse_rational(const std::string& text, const std::string& what) {
    const FieldElement x = parse_field(text);
    if (!x.is_rational()) throw ValidationError(what + " must be rational");
    return x.rational_part();
}

Rational rational_from(const ordered_json& v, const std::string& what) {
    if (v.is_string()) return parse_rational(v.get<std::string>(), what);
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw ValidationError(what + " must be an exact number string or an integer");
}

}  // namespace

RunConfig preset_config(const std::string& name) {
    RunConfig config;
    config.preset = name;
    config.spec = preset(name);
    return config;
}

RunConfig parse_config(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");

    RunConfig config;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "preset") {
                config = [&] {
                    RunConfig fresh = preset_config(value.get<std::string>());
                    fresh.r = config.r;
                    fresh.depths = config.depths;
                    fresh.k_max = config.k_max;
                    fresh.lambda_k = config.lambda_k;
                    fresh.tolerance = config.tolerance;
                    fresh.type_cap = config.type_cap;
                    fresh.state_cap = config.state_cap;
                    fresh.format = config.format;
                    return fresh;
                }();
            } else if (key == "ifs") {
                if (doc.contains("preset")) throw ValidationError("give either preset or ifs, not both");
                const FieldElement rho = parse_field(value.at("rho").get<std::string>());
                std::vector<Rational> probs;
                for (const auto& p : value.at("probs")) probs.push_back(rational_from(p, "probability"));
                std::vector<FieldElement> points;
                const bool rescale = value.contains("translations");
                for (const auto& b : value.at(rescale ? "translations" : "offsets")) {
                    points.push_back(parse_field(b.get<std::string>()));
                }
                if (rescale) {
                    config.spec = rescale_to_unit_hull(rho, points, probs);
                } else {
                    config.spec = IfsSpec{rho, points, probs};
                }
            } else if (key == "r") {
                config.r.clear();
                const auto list = value.is_array() ? value : ordered_json::array({value});
                for (const auto& x : list) config.r.push_back(rational_from(x, "r"));
            } else if (key == "k_max") {
                config.k_max = value.get<std::size_t>();
            } else if (key == "lambda_k") {
                config.lambda_k = value.get<std::size_t>();
            } else if (key == "tolerance") {
                config.tolerance = value.get<double>();
            } else if (key == "format") {
                config.format = value.get<std::string>();
            } else if (key == "caps") {
                if (value.contains("types")) config.type_cap = value.at("types").get<std::size_t>();
                if (value.contains("states")) config.state_cap = value.at("states").get<std::size_t>();
            } else if (key == "depths") {
                for (const auto& [dk, dv] : value.items()) {
                    if (dk == "window") config.depths.window = dv.get<unsigned>();
                    else if (dk == "measure") config.depths.measure = dv.get<unsigned>();
                    else if (dk == "discretize") config.depths.discretize = dv.get<std::size_t>();
                    else if (dk == "pressure") config.depths.pressure = dv.get<std::size_t>();
                    else if (dk == "verify") config.depths.verify = dv.get<std::size_t>();
                    else throw ValidationError("unknown depth '" + dk + "'");
                }
            } else {
                throw ValidationError("unknown config key '" + key + "'");
            }
        }
    } catch (const ordered_json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    if (config.spec.offsets.empty()) throw ValidationError("config names no system (preset or ifs)");
    return config;
}

std::string render(const Report& report, const std::string& format) {
    if (format == "json") return report.body.dump(2) + "\n";
    if (format != "csv") throw ValidationError("unknown format '" + format + "'");
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(report.csv_header);
    for (const auto& row : report.csv_rows) line(row);
    return out;
}

namespace {

void validate_config(const RunConfig& config) {
    require_valid(config.spec);
    if (config.r.empty()) throw ValidationError("at least one r is required");
    for (const auto& r : config.r) {
        if (r <= 0) throw ValidationError("r must be positive");
    }
    if (config.k_max < 1) throw ValidationError("k_max must be at least 1");
    if (config.depths.pressure < 2) throw ValidationError("pressure depth must be at least 2");
    if (!(config.tolerance > 0)) throw ValidationError("tolerance must be positive");
    if (config.format != "json" && config.format != "csv") throw ValidationError("format must be json or csv");
}

}  // namespace

Report run_analyze(const RunConfig& config) {
    validate_config(config);
    const Automaton a = build(config);
    const EssentialClass essential = essential_class(a);
    const PositivityReport positivity = positivity_check(a, essential);
    const WindowTable table = window_table(a, config.depths.window);

    Report report;
    auto& body = report.body;
    body = header("analyze", config);

    ordered_json types = ordered_json::array();
    for (TypeId t = 0; t < a.size(); ++t) {
        ordered_json offsets = ordered_json::array();
        for (const auto& x : a.types[t].offsets) offsets.push_back(format(x));
        ordered_json windows = ordered_json::array();
        for (const auto& w : table.of(t)) windows.push_back(enclosure_json(w));
        types.push_back({{"id", label(t)},
                         {"ell", format(a.types[t].ell)},
                         {"offsets", offsets},
                         {"pos_index", a.types[t].pos_index},
                         {"window_measures", windows}});
    }
    ordered_json xi = ordered_json::array();
    ordered_json adjacency = ordered_json::array();
    for (TypeId t = 0; t < a.size(); ++t) {
        std::vector<TypeId> kids;
        for (const auto& slot : a.xi[t]) kids.push_back(slot.type);
        xi.push_back({{"type", label(t)}, {"children", labels(kids)}});
        std::string row;
        for (TypeId u = 0; u < a.size(); ++u) row += a.admissible(t, u) ? '1' : '0';
        adjacency.push_back(row);
    }
    body["automaton"] = {{"type_count", a.size()}, {"types", types}, {"xi", xi}, {"adjacency", adjacency}};

    ordered_json transitions = ordered_json::array();
    for (TypeId t = 0; t < a.size(); ++t) {
        for (std::size_t s = 0; s < a.xi[t].size(); ++s) {
            const WMatrix w = w_matrix(a, t, s);
            ordered_json rows = ordered_json::array();
            for (std::size_t j = 0; j < w.rows(); ++j) {
                ordered_json row = ordered_json::array();
                for (std::size_t i = 0; i < w.cols(); ++i) row.push_back(format(w(j, i)));
                rows.push_back(row);
            }
            transitions.push_back({{"alpha", label(t)}, {"beta", label(a.xi[t][s].type)}, {"w", rows}});
        }
    }
    body["transitions"] = transitions;

    body["essential"] = {{"states", labels(essential.states)},
                         {"eta1", label(essential.eta1)},
                         {"n0", essential.n0},
                         {"i0", {format(essential.i0.lo), format(essential.i0.hi)}},
                         {"theta0", labels(essential.theta0)}};
    ordered_json failures = ordered_json::array();
    for (const auto& f : positivity.failures) {
        failures.push_back({{"alpha", label(f.alpha)}, {"beta", label(f.beta)}, {"row", f.row + 1}});
    }
    body["positivity"] = {{"pass", positivity.pass}, {"failures", failures}};

    ordered_json constants = ordered_json::array();
    for (const auto& r : config.r) {
        const DerivedConstants c = derived_constants(a, essential, table, r);
        constants.push_back({{"r", format(r)},
                             {"c2", format(c.c2)},
                             {"c3_lower", format(c.c3_lower)},
                             {"eta_lower", format(c.eta_lower)},
                             {"eta_lower_float", c.eta_lower.get_d()},
                             {"threshold_features", c.enabled ? "enabled" : "disabled: positivity failed"}});
    }
    body["constants"] = constants;

    report.csv_header = {"id", "ell", "offsets", "pos_index", "children"};
    for (TypeId t = 0; t < a.size(); ++t) {
        std::string offsets, kids;
        for (const auto& x : a.types[t].offsets) offsets += (offsets.empty() ? "" : " ") + format(x);
        for (const auto& slot : a.xi[t]) kids += (kids.empty() ? "" : " ") + std::to_string(label(slot.type));
        report.csv_rows.push_back(
            {std::to_string(label(t)), format(a.types[t].ell), offsets, std::to_string(a.types[t].pos_index), kids});
    }
    return report;
}

namespace {

ordered_json dimension_json(const DimensionEstimate& est, double tol) {
    return {{"r", format(est.r)},
            {"n", est.n},
            {"t", {jnum(est.t_lo), jnum(est.t_hi)}},
            {"s", {jnum(est.s_lo), jnum(est.s_hi)}},
            {"center", jnum(est.s_center())},
            {"bracketed", est.bracketed},
            {"within_tolerance", est.within_tol},
            {"tolerance", tol},
            {"evaluations", est.evaluations}};
}

}  // namespace

Report run_dimension(const RunConfig& config) {
    validate_config(config);
    const Automaton a = build(config);
    const EssentialClass essential = essential_class(a);
    const PathCatalog catalog = path_catalog(a, essential, config.depths.pressure);

    Report report;
    auto& body = report.body;
    body = header("dimension", config);
    body["paths"] = {{"letters", catalog.letters},
                     {"count", catalog.paths},
                     {"distinct_products", catalog.records.size()},
                     {"start_types", "all essential"},
                     {"upper_bound", "min of Fekete and endpoint spectral bound"},
                     {"lower_bound", "min-row and min-column endpoint spectral bound"}};
    const bool osc = satisfies_osc_geometrically(config.spec);
    ordered_json results = ordered_json::array();
    report.csv_header = {"r", "n", "t_lo", "t_hi", "s_lo", "s_hi", "center"};
    for (const auto& r : config.r) {
        const DimensionEstimate est = solve_s_r(catalog, r, config.tolerance);
        ordered_json entry = dimension_json(est, config.tolerance);
        const PressureBounds at_one = pressure_bounds(catalog, 1.0, r.get_d());
        entry["pressure_at_1"] = {jnum(at_one.lo), jnum(at_one.hi)};
        entry["osc_closed_form"] = osc ? jnum(osc_dimension_oracle(config.spec, r)) : ordered_json(nullptr);
        results.push_back(entry);
        report.csv_rows.push_back({format(r), std::to_string(est.n), num(est.t_lo), num(est.t_hi), num(est.s_lo),
                                   num(est.s_hi), num(est.s_center())});
    }
    body["results"] = results;
    return report;
}

namespace {

ordered_json band_json(const CoefficientBand& band) {
    ordered_json points = ordered_json::array();
    for (const auto& p : band.points) points.push_back({{"k", p.k}, {"scaled", jnum(p.scaled)}});
    return {{"s", jnum(band.s)},
            {"points", points},
            {"band_lo", jnum(band.band_lo)},
            {"band_hi", jnum(band.band_hi)},
            {"ratio", jnum(band.ratio)}};
}

}  // namespace

Report run_quantize(const RunConfig& config) {
    validate_config(config);
    const Automaton a = build(config);
    const EssentialClass essential = essential_class(a);
    const PositivityReport positivity = positivity_check(a, essential);
    const WindowTable table = window_table(a, config.depths.window);
    const PathCatalog catalog = path_catalog(a, essential, config.depths.pressure);
    const DiscreteMeasure measure = discretize(config.spec, config.depths.discretize);

    Report report;
    auto& body = report.body;
    body = header("quantize", config);
    body["discrete_measure"] = {{"atoms", measure.atoms.size()},
                                {"transport_radius", measure.transport_radius},
                                {"cell", format(measure.cell)}};
    body["positivity"] = positivity.pass;

    ordered_json results = ordered_json::array();
    report.csv_header = {"k", "err_r", "lo", "hi", "scaled"};
    for (const auto& r : config.r) {
        const DimensionEstimate est = solve_s_r(catalog, r, config.tolerance);
        const double s = est.s_center();
        const auto curve = error_curve(measure, r, config.k_max);

        ordered_json entry;
        entry["r"] = format(r);
        entry["s"] = {{"lo", jnum(est.s_lo)}, {"hi", jnum(est.s_hi)}, {"center", jnum(s)}};
        ordered_json points = ordered_json::array();
        const bool usable_s = std::isfinite(s) && s > 0;
        for (const auto& res : curve) {
            const double scaled = usable_s ? std::pow(static_cast<double>(res.k), r.get_d() / s) * res.err_r
                                           : std::nan("");
            points.push_back({{"k", res.k},
                              {"err_r", res.err_r},
                              {"lo", res.mu_err_lo},
                              {"hi", res.mu_err_hi},
                              {"scaled", jnum(scaled)}});
            if (&r == &config.r.front()) {
                report.csv_rows.push_back(
                    {std::to_string(res.k), num(res.err_r), num(res.mu_err_lo), num(res.mu_err_hi), num(scaled)});
            }
        }
        entry["curve"] = points;
        if (usable_s) {
            entry["band"] = band_json(coefficient_band(curve, s, 4));
            entry["negative_control"] = band_json(coefficient_band(curve, s / 2, 4));
        } else {
            entry["band"] = "disabled: no finite dimension estimate";
        }

        const DerivedConstants constants = derived_constants(a, essential, table, r);
        if (!constants.enabled) {
            entry["lambda"] = "disabled: positivity failed";
            entry["ss1"] = "disabled: positivity failed";
        } else {
            LambdaOptions options;
            options.window_depth = config.depths.window;
            ordered_json sets = ordered_json::array();
            for (std::size_t k = 1; k <= config.lambda_k; ++k) {
                try {
                    const LambdaSet set = lambda_set(a, essential, constants, table, k, options);
                    sets.push_back({{"k", k},
                                    {"phi", set.phi()},
                                    {"unresolved", set.unresolved.size()},
                                    {"flagged", set.flagged},
                                    {"esum", enclosure_json(set.esum)},
                                    {"threshold", format(set.threshold)}});
                } catch (const CapExceeded& e) {
                    sets.push_back({{"k", k}, {"capped", e.what()}});
                    break;
                }
            }
            entry["lambda"] = {{"threshold_form", "eta^k * mu(I0) * |I0|^r"}, {"sets", sets}};
            const Ss1Report ss1 = ss1_band_check(a, essential, constants, table, measure, 1, config.lambda_k, options);
            ordered_json rows = ordered_json::array();
            for (const auto& row : ss1.rows) {
                rows.push_back({{"k", row.k},
                                {"phi", row.phi},
                                {"err_r", row.err_r},
                                {"ratio", jnum(row.ratio)},
                                {"control_ratio", jnum(row.control_ratio)}});
            }
            entry["ss1"] = {{"rows", rows},
                            {"band", jnum(ss1.band)},
                            {"truncated", ss1.truncated},
                            {"dropped_mass", format(ss1.dropped_mass)}};
        }
        results.push_back(entry);
    }
    body["results"] = results;
    return report;
}

namespace {

struct CheckLog {
    ordered_json checks = ordered_json::array();
    bool all = true;

    void add(const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
        all = all && pass;
    }
};

}  // namespace

Report run_verify(const RunConfig& config, const VerifyHooks& hooks) {
    validate_config(config);
    const auto brute_net = hooks.brute_net_intervals
                               ? hooks.brute_net_intervals
                               : [](const IfsSpec& s, std::size_t n) { return net_intervals_brute(s, n); };
    const IfsSpec& spec = config.spec;
    const Automaton a = build(config);
    const EssentialClass essential = essential_class(a);
    CheckLog log;

    // net intervals, types and masses against direct enumeration
    std::size_t words = 1;
    for (std::size_t n = 0; n <= config.depths.verify; ++n) {
        const auto exprs = expressions_of_depth(a, n);
        std::vector<Segment> realized;
        for (const auto& e : exprs) realized.push_back(realize(a, e));
        const auto brute = brute_net(spec, n);
        log.add("net_intervals n=" + std::to_string(n), realized == brute,
                std::to_string(realized.size()) + " automaton vs " + std::to_string(brute.size()) + " direct");

        const auto cvs = characteristic_vectors_brute(spec, n);
        bool types_ok = cvs.size() == exprs.size();
        for (std::size_t i = 0; types_ok && i < exprs.size(); ++i) {
            types_ok = cvs[i].interval == realized[i] && cvs[i].type == a.types[exprs[i].back()];
        }
        log.add("characteristic_vectors n=" + std::to_string(n), types_ok, std::to_string(cvs.size()) + " intervals");

        if (n > 0) words *= spec.size();
        if (words <= (1u << 20)) {
            std::map<FieldElement, Rational, FieldKeyLess> masses;
            for (auto& om : origin_masses_brute(spec, n)) masses.emplace(om.origin, om.mass);
            const FieldElement scale = pow(spec.rho, static_cast<unsigned>(n));
            bool mass_ok = true;
            for (std::size_t i = 0; mass_ok && i < exprs.size(); ++i) {
                const MassVector m = mass_vector(a, exprs[i]);
                const auto& offsets = a.types[exprs[i].back()].offsets;
                for (std::size_t j = 0; mass_ok && j < offsets.size(); ++j) {
                    const auto it = masses.find(realized[i].lo - scale * offsets[j]);
                    mass_ok = it != masses.end() && it->second == m[j];
                }
            }
            log.add("mass_vectors n=" + std::to_string(n), mass_ok, "against summed word probabilities");
        }
    }

    // two independent measure computations must overlap
    const WindowTable table = window_table(a, config.depths.window);
    for (std::size_t n = 1; n <= std::min<std::size_t>(config.depths.verify, 3); ++n) {
        bool overlap = true;
        Enclosure total{0, 0};
        for (const auto& e : expressions_of_depth(a, n)) {
            const Enclosure via_types = net_measure(a, table, e);
            const Enclosure direct = measure_enclosure(spec, realize(a, e), config.depths.measure);
            overlap = overlap && via_types.intersects(direct);
            total.lo += via_types.lo;
            total.hi += via_types.hi;
        }
        log.add("net_measure_vs_direct n=" + std::to_string(n), overlap, "enclosures intersect");
        log.add("partition_of_unity n=" + std::to_string(n), total.contains(Rational(1)),
                "sum in [" + num(total.lo.get_d()) + ", " + num(total.hi.get_d()) + "]");
    }
    {
        const Enclosure coarse = measure_enclosure(spec, essential.i0, config.depths.measure / 2);
        const Enclosure fine = measure_enclosure(spec, essential.i0, config.depths.measure);
        log.add("enclosure_nesting", coarse.lo <= fine.lo && fine.hi <= coarse.hi, "mu(I0) at two depths");
    }

    // pressure
    {
        std::map<std::size_t, PathCatalog> catalogs;
        for (std::size_t n = 2; n <= 6; ++n) catalogs.emplace(n, path_catalog(a, essential, n));
        bool sub = true;
        for (double t : {0.2, 0.5, 0.8}) {
            for (std::size_t m = 2; m <= 4; ++m) {
                for (std::size_t n = 2; m + n <= 6; ++n) {
                    const PathSum joint = path_sum(catalogs.at(m + n), t, config.r.front().get_d());
                    const PathSum left = path_sum(catalogs.at(m), t, config.r.front().get_d());
                    const PathSum right = path_sum(catalogs.at(n), t, config.r.front().get_d());
                    sub = sub && joint.hi <= left.lo * right.lo;
                }
            }
        }
        log.add("pressure_submultiplicative", sub, "S_(m+n) <= S_m S_n");
        const PathCatalog catalog = path_catalog(a, essential, config.depths.pressure);
        const PressureBounds half = pressure_bounds(catalog, 0.5, config.r.front().get_d());
        log.add("pressure_sandwich", half.lo <= half.hi, "lo <= hi at t = 1/2");
    }

    // quantizer against partition enumeration, fixed seed
    {
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0;
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t m = 1 + rng() % 12;
            std::vector<double> xs;
            while (xs.size() < m) {
                xs.push_back(unit(rng));
                std::sort(xs.begin(), xs.end());
                xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            }
            std::vector<WeightedPoint> pts;
            double total = 0;
            for (double x : xs) {
                pts.push_back({x, 0.05 + unit(rng)});
                total += pts.back().w;
            }
            for (auto& p : pts) p.w /= total;
            const std::size_t k = 1 + rng() % 4;
            const Rational r(static_cast<long>(1 + rng() % 3));
            const double dp = optimal_quantizer_1d(pts, k, r).err_r;
            const double bf = brute_force_quantizer(pts, k, r).err_r;
            const double dev = bf == 0 ? std::abs(dp) : std::abs(dp - bf) / bf;
            worst = std::max(worst, dev);
        }
        log.add("quantizer_dp_vs_enumeration", worst <= 1e-12, "worst relative deviation " + num(worst));
    }

    Report report;
    report.body = header("verify", config);
    report.body["checks"] = log.checks;
    report.body["pass"] = log.all;
    report.failed = !log.all;
    report.csv_header = {"check", "pass", "detail"};
    for (const auto& c : log.checks) {
        report.csv_rows.push_back({c["name"].get<std::string>(), c["pass"].get<bool>() ? "true" : "false",
                                   "\"" + c["detail"].get<std::string>() + "\""});
    }
    return report;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const VerifyHooks& hooks) {
    CLI::App app{"Quantization of self-similar measures with overlaps"};
    app.name("overlapq");
    std::string command, preset_name, config_file, out_file, format_opt;
    std::vector<std::string> r_values;
    std::size_t k_max = 0, lambda_k = 0, type_cap = 0, state_cap = 0;
    std::size_t d_window = 0, d_measure = 0, d_discretize = 0, d_pressure = 0, d_verify = 0;
    double tol = 0;

    app.add_option("command", command, "analyze | dimension | quantize | verify")
        ->required()
        ->check(CLI::IsMember({"analyze", "dimension", "quantize", "verify"}));
    auto* o_preset = app.add_option("--preset", preset_name, "named system");
    auto* o_config = app.add_option("--config", config_file, "JSON configuration file");
    o_preset->excludes(o_config);
    auto* o_r = app.add_option("--r", r_values, "quantization orders (exact numbers)")->delimiter(',');
    auto* o_kmax = app.add_option("--kmax", k_max, "largest k on the error curve");
    auto* o_lambda = app.add_option("--lambda-k", lambda_k, "threshold sets for k = 1..K");
    auto* o_window = app.add_option("--depth-window", d_window, "window table depth");
    auto* o_measure = app.add_option("--depth-measure", d_measure, "direct measure enclosure depth");
    auto* o_disc = app.add_option("--depth-discretize", d_discretize, "discretization depth");
    auto* o_press = app.add_option("--depth-pressure", d_pressure, "letters per pressure path");
    auto* o_verify = app.add_option("--depth-verify", d_verify, "oracle comparison order");
    auto* o_types = app.add_option("--type-cap", type_cap, "largest automaton");
    auto* o_states = app.add_option("--state-cap", state_cap, "attractor window cache size");
    auto* o_tol = app.add_option("--tol", tol, "target width of the dimension interval");
    auto* o_format = app.add_option("--format", format_opt, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", out_file, "write the report here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(ErrorKind::validation);
    }

    try {
        RunConfig config;
        if (o_preset->count()) {
            config = preset_config(preset_name);
        } else if (o_config->count()) {
            std::ifstream in(config_file);
            if (!in) throw ValidationError("cannot read config file " + config_file);
            std::stringstream buf;
            buf << in.rdbuf();
            config = parse_config(buf.str());
        } else {
            throw ValidationError("one of --preset or --config is required");
        }
        if (o_r->count()) {
            config.r.clear();
            for (const auto& s : r_values) config.r.push_back(parse_rational(s, "r"));
        }
        if (o_kmax->count()) config.k_max = k_max;
        if (o_lambda->count()) config.lambda_k = lambda_k;
        if (o_window->count()) config.depths.window = static_cast<unsigned>(d_window);
        if (o_measure->count()) config.depths.measure = static_cast<unsigned>(d_measure);
        if (o_disc->count()) config.depths.discretize = d_discretize;
        if (o_press->count()) config.depths.pressure = d_pressure;
        if (o_verify->count()) config.depths.verify = d_verify;
        if (o_types->count()) config.type_cap = type_cap;
        if (o_states->count()) config.state_cap = state_cap;
        if (o_tol->count()) config.tolerance = tol;
        if (o_format->count()) config.format = format_opt;
        validate_config(config);

        Report report;
        if (command == "analyze") report = run_analyze(config);
        else if (command == "dimension") report = run_dimension(config);
        else if (command == "quantize") report = run_quantize(config);
        else report = run_verify(config, hooks);

        const std::string text = render(report, config.format);
        if (out_file.empty()) {
            out << text;
        } else {
            std::ofstream file(out_file, std::ios::binary);
            if (!file) throw ValidationError("cannot write " + out_file);
            file << text;
        }
        if (report.failed) {
            err << "error: oracle comparison failed\n";
            return exit_code(ErrorKind::oracle_mismatch);
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_code(ErrorKind::internal);
    }
}

}  // namespace overlapq
