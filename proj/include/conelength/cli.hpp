#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "document.hpp"
#include "errors.hpp"
#include "inversion.hpp"
#include "pants.hpp"
#include "surface.hpp"
#include "teich.hpp"
#include "xpiece.hpp"

namespace conelength::cli {

using doc::Json;
using WideReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

enum class Format { table, csv, json };

struct RunConfig {
    double tolerance = 1e-10;
    int maxTwistIndex = 20;
    Format format = Format::table;
    int parallelism = 1;
    bool hexFloats = false;
    // 0 computes in binary64; otherwise MPFR with this many decimal digits.
    int digits = 0;
    std::string input;
    std::string output = "-";

    doc::NumberFormat number_format() const { return {hexFloats, digits}; }
};

struct Options {
    int genus = -1;
    int boundaries = -1;
    std::vector<std::string> lambda;
    std::string other;
    std::optional<int> curve;
    std::vector<std::string> tValues;
    std::string waist, l0, l1, l2;
    bool torus = false;
};

struct Section {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
};

struct Report {
    Json summary = Json::object();
    std::vector<Section> sections;
    std::optional<Json> document;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"eval",          "pants-info",     "family-lengths", "invert-twist",
                                            "invert-boundary", "invert-surface", "compare",        "dist",
                                            "limit",         "budget"};
    return c;
}

namespace detail_cli {

inline std::string cell_text(const Json& v) {
    if (v.is_null()) return "-";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return doc::format_double(v.get<double>(), false);
    return v.dump();
}

inline std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    std::string s = cell_text(v);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline void render_table(std::ostream& os, const Report& r) {
    if (r.sections.empty() && r.summary.size() == 1) {
        os << cell_text(r.summary.begin().value()) << "\n";
        return;
    }
    std::size_t w = 0;
    for (auto it = r.summary.begin(); it != r.summary.end(); ++it) w = std::max(w, it.key().size());
    for (auto it = r.summary.begin(); it != r.summary.end(); ++it)
        os << std::left << std::setw(static_cast<int>(w)) << it.key() << "  " << cell_text(it.value()) << "\n";
    for (const auto& s : r.sections) {
        if (!r.summary.empty() || &s != &r.sections.front()) os << "\n";
        os << "# " << s.title << "\n";
        std::vector<std::size_t> widths(s.columns.size());
        for (std::size_t c = 0; c < s.columns.size(); ++c) widths[c] = s.columns[c].size();
        for (const auto& row : s.rows)
            for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], cell_text(row[c]).size());
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c) os << "  ";
                if (c + 1 == cells.size()) os << cells[c];
                else os << std::left << std::setw(static_cast<int>(widths[c])) << cells[c];
            }
            os << "\n";
        };
        line(s.columns);
        for (const auto& row : s.rows) {
            std::vector<std::string> cells;
            for (const auto& v : row) cells.push_back(cell_text(v));
            line(cells);
        }
    }
}

inline void render_csv(std::ostream& os, const Report& r) {
    if (r.sections.empty()) {
        os << "key,value\n";
        for (auto it = r.summary.begin(); it != r.summary.end(); ++it) os << it.key() << "," << csv_cell(it.value()) << "\n";
        return;
    }
    const bool tagged = r.sections.size() > 1;
    for (const auto& s : r.sections) {
        if (&s != &r.sections.front()) os << "\n";
        if (tagged) os << "section,";
        for (std::size_t c = 0; c < s.columns.size(); ++c) os << (c ? "," : "") << s.columns[c];
        os << "\n";
        for (const auto& row : s.rows) {
            if (tagged) os << s.title << ",";
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_cell(row[c]);
            os << "\n";
        }
    }
}

inline Json report_json(const Report& r) {
    Json rep = r.summary;
    for (const auto& s : r.sections) {
        Json rows = Json::array();
        for (const auto& row : s.rows) {
            Json o = Json::object();
            for (std::size_t c = 0; c < row.size(); ++c) o[s.columns[c]] = row[c];
            rows.push_back(o);
        }
        rep[s.title] = rows;
    }
    if (!r.document) return rep;
    Json d = *r.document;
    d["report"] = rep;
    return d;
}

inline std::string cuff_label(const Cuff& c) { return (c.is_curve() ? "c" : "b") + std::to_string(c.index); }

template <class Real>
Real parse_scalar(const std::string& text, const char* name) {
    auto v = doc::json_to_real<Real>(Json(text));
    if (!v || !detail::is_finite(*v)) throw DomainError(std::string("--") + name + ": expected a finite real");
    return *v;
}

template <class Real>
doc::SurfaceDocument<Real> input_document(const RunConfig& cfg, const char* command) {
    if (cfg.input.empty()) throw SchemaError({std::string("--input: required by ") + command});
    return doc::load_document<Real>(cfg.input);
}

template <class Real>
int family_index(const doc::SurfaceDocument<Real>& d, const Options& o) {
    const int j = o.curve.value_or(d.selected_families().empty() ? 0 : d.selected_families().front());
    if (j < 0 || j >= d.topology.curve_count()) throw DomainError("--curve: index out of range");
    return j;
}

template <class Real>
Report eval(const RunConfig& cfg, const Options&, spdlog::logger& log) {
    const auto f = cfg.number_format();
    auto d = input_document<Real>(cfg, "eval");
    const auto X = d.surface("eval");
    std::vector<CurveId> ids;
    if (d.has_spectrum) {
        for (const auto& e : d.spectrum) ids.push_back(e.id);
    } else {
        try {
            ids = curve_manifest(X.topology()).curves;
        } catch (const DomainError& e) {
            log.info("no recovery manifest ({}); using the standard curve set", e.what());
            ids = teich::standard_curve_set(X.topology(), cfg.maxTwistIndex);
        }
    }
    const auto values = CurveEvaluator<Real>(X).lengths(ids, cfg.parallelism);
    Report r;
    r.summary["curves"] = ids.size();
    Section s{"spectrum", {"family", "n", "length"}, {}};
    d.spectrum.clear();
    d.has_spectrum = true;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        s.rows.push_back({ids[i].family(), ids[i].n, doc::real_to_json(values[i], f)});
        d.spectrum.push_back({ids[i], values[i]});
    }
    r.sections.push_back(std::move(s));
    r.document = doc::to_json(d, f);
    return r;
}

template <class Real>
Report pants_info(const RunConfig& cfg, const Options&, spdlog::logger&) {
    const auto f = cfg.number_format();
    const auto d = input_document<Real>(cfg, "pants-info");
    const auto X = d.surface("pants-info");
    auto J = [&](const Real& x) { return doc::real_to_json(x, f); };
    auto attempt = [&](auto fn) -> Json {
        try {
            return J(fn());
        } catch (const DomainError&) {
            return nullptr;
        }
    };
    Report r;
    Section p{"pants",
              {"pants", "cuffs", "lambda1", "lambda2", "lambda3", "trace1", "trace2", "trace3", "perp12", "perp13",
               "perp23", "self_one1", "self_one2", "self_one3", "self_two1", "self_two2", "self_two3"},
              {}};
    for (std::size_t i = 0; i < X.topology().pants.size(); ++i) {
        const auto& rec = X.topology().pants[i];
        std::array<GeneralizedLength<Real>, 3> c{X.cuff_value(rec[0]), X.cuff_value(rec[1]), X.cuff_value(rec[2])};
        std::vector<Json> row{static_cast<int>(i),
                              cuff_label(rec[0]) + " " + cuff_label(rec[1]) + " " + cuff_label(rec[2])};
        for (const auto& l : c) row.push_back(J(l.value()));
        for (const auto& l : c) row.push_back(J(pants::trace(l)));
        row.push_back(attempt([&] { return pants::perp_between(c[0], c[1], c[2]); }));
        row.push_back(attempt([&] { return pants::perp_between(c[0], c[2], c[1]); }));
        row.push_back(attempt([&] { return pants::perp_between(c[1], c[2], c[0]); }));
        for (int k = 0; k < 3; ++k)
            row.push_back(attempt([&] { return pants::self_perp_one(c[k], c[(k + 1) % 3], c[(k + 2) % 3]); }));
        for (int k = 0; k < 3; ++k)
            row.push_back(attempt([&] { return pants::self_perp_two(c[k], c[(k + 1) % 3], c[(k + 2) % 3]); }));
        p.rows.push_back(std::move(row));
    }
    Section fam{"families",
                {"curve", "kind", "waist", "twist", "UA", "VA", "UB", "VB", "A", "B", "height", "limit_constant",
                 "offset"},
                {}};
    for (int j : d.selected_families()) {
        const auto fj = embedded_family(X.topology(), j);
        std::vector<Json> row{j, fj.kind == FamilyKind::torus ? "torus" : "xpiece", J(X.lengths()[j]),
                              J(X.twists()[j])};
        if (fj.kind == FamilyKind::xpiece) {
            const auto spec = xpiece_spec(X, fj);
            const auto a = pants::coefficients(spec.pantsA.target, spec.pantsA.companion, spec.waist);
            const auto b = pants::coefficients(spec.pantsB.target, spec.pantsB.companion, spec.waist);
            const auto c = xpiece::family_coefficients(spec);
            for (const auto& v : {a.U, a.V, b.U, b.V, c.A, c.B}) row.push_back(J(v));
            row.push_back(nullptr);
            row.push_back(J(xpiece::asymptotic_constant(spec)));
            row.push_back(J(xpiece::asymptotic_offset(spec)));
        } else {
            using std::cosh;
            using std::exp;
            const auto spec = torus_spec(X, fj);
            for (int k = 0; k < 6; ++k) row.push_back(nullptr);
            const Real h0 = xpiece::torus_height(spec);
            row.push_back(J(h0));
            row.push_back(J(Real(exp(spec.twist * spec.waist / Real(2)) * cosh(h0 / Real(2)))));
            row.push_back(J(xpiece::torus_asymptotic_offset(spec)));
        }
        fam.rows.push_back(std::move(row));
    }
    r.summary["pants"] = X.topology().pants.size();
    r.summary["families"] = fam.rows.size();
    r.sections.push_back(std::move(p));
    r.sections.push_back(std::move(fam));
    return r;
}

template <class Real>
Report family_lengths(const RunConfig& cfg, const Options& o, spdlog::logger&) {
    const auto f = cfg.number_format();
    auto d = input_document<Real>(cfg, "family-lengths");
    const auto X = d.surface("family-lengths");
    std::vector<int> fams = o.curve ? std::vector<int>{family_index(d, o)} : d.selected_families();
    std::vector<CurveId> ids;
    for (int j : fams) {
        ids.push_back(CurveId::pants_curve(j));
        for (long n = -cfg.maxTwistIndex; n <= cfg.maxTwistIndex; ++n) ids.push_back(CurveId::twist(j, n));
    }
    const auto values = CurveEvaluator<Real>(X).lengths(ids, cfg.parallelism);
    Report r;
    r.summary["families"] = fams.size();
    r.summary["max_twist"] = cfg.maxTwistIndex;
    Section s{"lengths", {"family", "n", "length"}, {}};
    d.spectrum.clear();
    d.has_spectrum = true;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        s.rows.push_back({ids[i].family(), ids[i].n, doc::real_to_json(values[i], f)});
        d.spectrum.push_back({ids[i], values[i]});
    }
    r.sections.push_back(std::move(s));
    r.document = doc::to_json(d, f);
    return r;
}

template <class Real>
Report invert_twist(const RunConfig& cfg, const Options& o, spdlog::logger& log) {
    const auto f = cfg.number_format();
    Report r;
    if (!o.l0.empty() || !o.l1.empty() || !o.l2.empty() || !o.waist.empty()) {
        if (o.l0.empty() || o.l1.empty() || o.l2.empty() || o.waist.empty())
            throw DomainError("--waist, --l0, --l1 and --l2 must be given together");
        const Real w = parse_scalar<Real>(o.waist, "waist"), a = parse_scalar<Real>(o.l0, "l0"),
                   b = parse_scalar<Real>(o.l1, "l1"), c = parse_scalar<Real>(o.l2, "l2");
        const Real t = o.torus ? inversion::solve_torus_twist(a, b, c, w) : inversion::solve_twist(a, b, c, w);
        const Real res = inversion::twist_equation_residual(a, b, c, w, t, o.torus);
        if (res > Real(cfg.tolerance)) throw InconsistentSpectrum("twist equation residual exceeds the tolerance");
        r.summary["twist"] = doc::real_to_json(t, f);
        r.summary["residual"] = doc::real_to_json(res, f);
        return r;
    }
    const auto d = input_document<Real>(cfg, "invert-twist");
    const auto spec = d.length_spectrum("invert-twist");
    Section s{"twists", {"curve", "kind", "waist", "twist", "residual"}, {}};
    for (int j : o.curve ? std::vector<int>{family_index(d, o)} : d.selected_families()) {
        const CurveId t0 = CurveId::twist(j, 0), t1 = CurveId::twist(j, 1), t2 = CurveId::twist(j, 2);
        if (!spec.contains(t0) || !spec.contains(t1) || !spec.contains(t2)) continue;
        std::optional<Real> w;
        if (spec.contains(CurveId::pants_curve(j))) w = spec.at(CurveId::pants_curve(j));
        else if (d.lengths) w = (*d.lengths)[j];
        if (!w) continue;
        const bool torus = embedded_family(d.topology, j).kind == FamilyKind::torus;
        const Real t = torus ? inversion::solve_torus_twist(spec.at(t0), spec.at(t1), spec.at(t2), *w)
                             : inversion::solve_twist(spec.at(t0), spec.at(t1), spec.at(t2), *w);
        const Real res = inversion::twist_equation_residual(spec.at(t0), spec.at(t1), spec.at(t2), *w, t, torus);
        log.debug("curve {}: residual {}", j, detail::to_double(res));
        if (res > Real(cfg.tolerance))
            throw InconsistentSpectrum("curve " + std::to_string(j) + ": twist equation residual exceeds the tolerance");
        s.rows.push_back({j, torus ? "torus" : "xpiece", doc::real_to_json(*w, f), doc::real_to_json(t, f),
                          doc::real_to_json(res, f)});
    }
    if (s.rows.empty())
        throw MissingCurves({"no family with L[0] and T[0], T[1], T[2] in the spectrum"});
    r.summary["families"] = s.rows.size();
    r.sections.push_back(std::move(s));
    return r;
}

template <class Real>
inversion::SurfaceRecovery<Real> recover(const RunConfig& cfg, const doc::SurfaceDocument<Real>& d, const char* command,
                                         spdlog::logger& log) {
    const auto spec = d.length_spectrum(command);
    auto rec = inversion::recover_surface_detailed(d.topology, spec, Real(cfg.tolerance));
    log.info("recovered surface from {} curves (resimulation error {})", rec.curves_used,
             detail::to_double(rec.resimulation_error));
    return rec;
}

template <class Real>
void add_recovery(Report& r, const inversion::SurfaceRecovery<Real>& rec, const Topology& topo,
                  const doc::NumberFormat& f) {
    r.summary["curves_used"] = rec.curves_used;
    r.summary["curve_budget"] = inversion::curve_budget(topo.genus, topo.boundary_count);
    r.summary["resimulation_error"] = doc::real_to_json(rec.resimulation_error, f);
    Json amb = Json::array();
    for (const auto& [a, b] : rec.ambiguous) amb.push_back(Json::array({a, b}));
    r.summary["ambiguous_pairs"] = amb.dump();
    Section s{"boundaries", {"boundary", "lambda", "kind", "route", "anchor", "side", "condition", "ambiguous"}, {}};
    for (const auto& b : rec.boundaries) {
        const bool torus = b.plan.route == BoundaryRoute::torus;
        s.rows.push_back({b.plan.boundary, doc::real_to_json(b.value.value(), f), to_string(b.value.kind()),
                          torus ? "torus" : "xpiece", b.plan.anchor, torus ? Json(nullptr) : Json(b.plan.onSideA ? "A" : "B"),
                          torus ? Json(nullptr) : doc::real_to_json(b.condition, f), b.labeling_ambiguous});
    }
    r.sections.push_back(std::move(s));
}

template <class Real>
Report invert_boundary(const RunConfig& cfg, const Options&, spdlog::logger& log) {
    const auto d = input_document<Real>(cfg, "invert-boundary");
    const auto rec = recover(cfg, d, "invert-boundary", log);
    Report r;
    add_recovery(r, rec, d.topology, cfg.number_format());
    return r;
}

template <class Real>
Report invert_surface(const RunConfig& cfg, const Options&, spdlog::logger& log) {
    const auto f = cfg.number_format();
    const auto d = input_document<Real>(cfg, "invert-surface");
    const auto rec = recover(cfg, d, "invert-surface", log);
    Report r;
    add_recovery(r, rec, d.topology, f);
    Section s{"curves", {"curve", "length", "twist"}, {}};
    for (int j = 0; j < d.topology.curve_count(); ++j)
        s.rows.push_back({j, doc::real_to_json(rec.surface.lengths()[j], f), doc::real_to_json(rec.surface.twists()[j], f)});
    r.sections.push_back(std::move(s));
    r.document = doc::to_json(doc::document_from(rec.surface), f);
    return r;
}

// Genus-one surface with one boundary per value, used when compare has no input.
template <class Real>
SurfaceFN<Real> default_surface(const std::vector<GeneralizedLength<Real>>& Lambda) {
    std::mt19937_64 rng(0);
    auto topo = teich::random_topology(1, static_cast<int>(Lambda.size()), rng);
    const auto nc = static_cast<std::size_t>(topo.curve_count());
    return SurfaceFN<Real>(topo, Lambda, std::vector<Real>(nc, Real(1)), std::vector<Real>(nc, Real(0.25)));
}

template <class Real>
Report compare(const RunConfig& cfg, const Options& o, spdlog::logger&) {
    const auto f = cfg.number_format();
    std::vector<GeneralizedLength<Real>> lambda;
    for (const auto& s : o.lambda) lambda.emplace_back(parse_scalar<Real>(s, "lambda"));
    std::optional<SurfaceFN<Real>> X;
    std::vector<int> fams;
    if (!cfg.input.empty()) {
        const auto d = doc::load_document<Real>(cfg.input);
        X = d.surface("compare");
        fams = d.selected_families();
        if (!lambda.empty()) {
            const auto n = X->boundaries().size();
            if (lambda.size() == 1) lambda.assign(n, lambda.front());
            if (lambda.size() != n) throw DomainError("--lambda: expected 1 or " + std::to_string(n) + " values");
            X = X->with_boundaries(lambda);
        }
    } else {
        if (lambda.empty()) throw SchemaError({"--input or --lambda: required by compare"});
        X = default_surface(lambda);
        for (int j = 0; j < X->topology().curve_count(); ++j) fams.push_back(j);
    }
    const auto all = embedded_families(X->topology());
    std::vector<EmbeddedFamily> chosen;
    for (int j : fams) chosen.push_back(all[j]);
    const auto rep = teich::verify_length_bounds(*X, chosen, cfg.maxTwistIndex);
    const auto k = teich::comparison_constants(X->boundaries());
    auto J = [&](const Real& x) { return doc::real_to_json(x, f); };
    Report r;
    r.summary["C"] = J(k.C);
    r.summary["D"] = J(k.D);
    r.summary["KA"] = J(k.KA);
    r.summary["KB"] = J(k.KB);
    r.summary["KC"] = J(k.KC);
    r.summary["KD"] = J(k.KD);
    r.summary["KEF"] = J(k.KEF);
    r.summary["checks"] = rep.checks;
    r.summary["violations"] = rep.violations;
    r.summary["worst_additive_gap"] = J(rep.worst_additive_gap);
    r.summary["worst_additive_slack"] = J(rep.worst_additive_slack);
    r.summary["worst_log_ratio"] = J(rep.worst_log_ratio);
    r.summary["worst_ratio_slack"] = J(rep.worst_ratio_slack);
    Section s{"families", {"curve", "kind", "intersection", "bound", "worst_gap", "worst_log_ratio", "violations"}, {}};
    for (const auto& fam : chosen) {
        const auto one = teich::verify_length_bounds(*X, {fam}, cfg.maxTwistIndex);
        s.rows.push_back({fam.curve, fam.kind == FamilyKind::torus ? "torus" : "xpiece", fam.intersection_with_waist(),
                          J(Real(k.D * Real(fam.intersection_with_waist()))), J(one.worst_additive_gap),
                          J(one.worst_log_ratio), one.violations});
    }
    r.sections.push_back(std::move(s));
    return r;
}

template <class Real>
Report dist(const RunConfig& cfg, const Options& o, spdlog::logger&) {
    using std::log;
    const auto f = cfg.number_format();
    if (o.other.empty()) throw SchemaError({"--other: required by dist"});
    const auto X1 = input_document<Real>(cfg, "dist").surface("dist");
    const auto X2 = doc::load_document<Real>(o.other).surface("dist");
    const auto d12 = teich::thurston_distance_lb(X1, X2, cfg.maxTwistIndex, cfg.parallelism);
    const auto d21 = teich::thurston_distance_lb(X2, X1, cfg.maxTwistIndex, cfg.parallelism);
    Report r;
    r.summary["forward"] = doc::real_to_json(d12.value, f);
    r.summary["forward_witness"] = d12.witness.str();
    r.summary["backward"] = doc::real_to_json(d21.value, f);
    r.summary["backward_witness"] = d21.witness.str();
    r.summary["curves"] = d12.curves.size();
    if (X1.boundaries() == X2.boundaries()) {
        r.summary["almost_isometry_gap"] =
            doc::real_to_json(teich::almost_isometry_gap(X1, X2, cfg.maxTwistIndex, cfg.parallelism), f);
        r.summary["gap_bound"] =
            doc::real_to_json(Real(Real(2) * log(teich::comparison_constants(X1.boundaries()).C)), f);
    } else {
        r.summary["almost_isometry_gap"] = nullptr;
        r.summary["gap_bound"] = nullptr;
    }
    return r;
}

template <class Real>
Report limit(const RunConfig& cfg, const Options& o, spdlog::logger&) {
    using std::cosh;
    using std::exp;
    const auto f = cfg.number_format();
    const auto d = input_document<Real>(cfg, "limit");
    const auto X = d.surface("limit");
    const int j = family_index(d, o);
    std::vector<Real> ts;
    for (const auto& s : o.tValues) ts.push_back(parse_scalar<Real>(s, "t"));
    if (ts.empty())
        for (int t = 10; t <= 50; t += 10) ts.push_back(Real(t));
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i] > ts[i - 1])) throw DomainError("--t: values must increase");
    const auto fam = embedded_family(X.topology(), j);
    const auto diag = teich::boundary_convergence(X, j, ts, cfg.maxTwistIndex);
    auto J = [&](const Real& x) { return doc::real_to_json(x, f); };
    Report r;
    r.summary["curve"] = j;
    r.summary["kind"] = fam.kind == FamilyKind::torus ? "torus" : "xpiece";
    const Real w = X.lengths()[j];
    Real constant, offset;
    std::function<Real(long)> ratio;
    if (fam.kind == FamilyKind::xpiece) {
        const auto spec = xpiece_spec(X, fam);
        constant = xpiece::asymptotic_constant(spec);
        offset = xpiece::asymptotic_offset(spec);
        ratio = [=](long n) {
            return Real(exp(xpiece::family_length(spec, n) / Real(2) - Real(n) * w) / constant - Real(1));
        };
    } else {
        const auto spec = torus_spec(X, fam);
        constant = exp(spec.twist * w / Real(2)) * cosh(xpiece::torus_height(spec) / Real(2));
        offset = xpiece::torus_asymptotic_offset(spec);
        ratio = [=](long n) {
            return Real(exp(xpiece::torus_family_length(spec, n) / Real(2) - Real(n) * w / Real(2)) / constant -
                        Real(1));
        };
    }
    r.summary["constant"] = J(constant);
    r.summary["offset"] = J(offset);
    Section idx{"index", {"n", "relative_deviation"}, {}};
    for (long n = 10; n <= cfg.maxTwistIndex; n += 10) idx.rows.push_back({n, J(ratio(n))});
    if (cfg.maxTwistIndex % 10 != 0) idx.rows.push_back({cfg.maxTwistIndex, J(ratio(cfg.maxTwistIndex))});
    Section tw{"twist", {"t", "profile_deviation", "secant_deviation", "constant_deviation"}, {}};
    for (const auto& s : diag.samples)
        tw.rows.push_back({J(s.t), J(s.profile_deviation), J(s.secant_deviation), J(s.constant_deviation)});
    r.sections.push_back(std::move(idx));
    r.sections.push_back(std::move(tw));
    return r;
}

inline Report budget(const Options& o) {
    Report r;
    r.summary["budget"] = inversion::curve_budget(o.genus, o.boundaries);
    return r;
}

template <class Real>
Report dispatch(const std::string& command, const RunConfig& cfg, const Options& o, spdlog::logger& log) {
    if (command == "eval") return eval<Real>(cfg, o, log);
    if (command == "pants-info") return pants_info<Real>(cfg, o, log);
    if (command == "family-lengths") return family_lengths<Real>(cfg, o, log);
    if (command == "invert-twist") return invert_twist<Real>(cfg, o, log);
    if (command == "invert-boundary") return invert_boundary<Real>(cfg, o, log);
    if (command == "invert-surface") return invert_surface<Real>(cfg, o, log);
    if (command == "compare") return compare<Real>(cfg, o, log);
    if (command == "dist") return dist<Real>(cfg, o, log);
    if (command == "limit") return limit<Real>(cfg, o, log);
    return budget(o);
}

inline Json error_record(const std::string& kind, const std::string& category, const std::string& message,
                         const std::vector<std::string>& details = {}) {
    Json e{{"kind", kind}, {"category", category}, {"message", message}};
    if (!details.empty()) e["details"] = details;
    return Json{{"error", e}};
}

inline spdlog::level::level_enum log_level() {
    const char* v = std::getenv("CONELENGTH_LOG");
    if (!v) return spdlog::level::off;
    const std::string s(v);
    if (s == "info") return spdlog::level::info;
    if (s == "debug") return spdlog::level::debug;
    return spdlog::level::off;
}

} // namespace detail_cli

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using namespace detail_cli;
    RunConfig cfg;
    Options o;
    std::string format = "table";
    int curve = -1;

    CLI::App app{"Length spectra, inversion and comparison for hyperbolic cone surfaces", "conelength"};
    app.require_subcommand(1);
    app.add_option("--input", cfg.input, "Surface document (JSON)");
    app.add_option("--output", cfg.output, "Output path, or - for stdout");
    app.add_option("--format", format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
    app.add_option("--tolerance", cfg.tolerance, "Verification tolerance in (0, 1e-4]")
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
                double v = 0;
                try {
                    v = std::stod(s);
                } catch (const std::exception&) {
                    return "not a number";
                }
                return v > 0 && v <= 1e-4 ? std::string() : std::string("must lie in (0, 1e-4]");
            },
            "(0, 1e-4]"));
    app.add_option("--max-twist", cfg.maxTwistIndex, "Largest twist index")->check(CLI::Range(1, 200));
    app.add_flag("--hex-floats", cfg.hexFloats, "Write binary64 values as hex floats");
    app.add_option("--parallelism", cfg.parallelism, "Worker threads for curve evaluation")->check(CLI::Range(1, 256));
    app.add_option("--digits", cfg.digits, "Working precision in decimal digits (0 = binary64)")
        ->check(CLI::Range(0, 2000));

    std::map<std::string, CLI::App*> subs;
    for (const auto& c : commands()) {
        auto* s = app.add_subcommand(c);
        s->fallthrough();
        subs[c] = s;
    }
    subs["eval"]->description("Evaluate the lengths of the spectrum curves or the recovery manifest");
    subs["pants-info"]->description("Trace data, perpendiculars and family coefficients");
    subs["family-lengths"]->description("Twist family lengths for |n| <= --max-twist");
    subs["family-lengths"]->add_option("--curve", curve, "Internal curve index");
    subs["invert-twist"]->description("Recover twists from three family lengths");
    subs["invert-twist"]->add_option("--curve", curve, "Internal curve index");
    subs["invert-twist"]->add_option("--waist", o.waist, "Waist length");
    subs["invert-twist"]->add_option("--l0", o.l0, "Length at n = 0");
    subs["invert-twist"]->add_option("--l1", o.l1, "Length at n = 1");
    subs["invert-twist"]->add_option("--l2", o.l2, "Length at n = 2");
    subs["invert-twist"]->add_flag("--torus", o.torus, "Family of a one-holed torus");
    subs["invert-boundary"]->description("Recover boundary data from a spectrum");
    subs["invert-surface"]->description("Recover the full coordinates from a spectrum");
    subs["compare"]->description("Comparison constants and length bounds against the cusped surface");
    subs["compare"]->add_option("--lambda", o.lambda, "Boundary values overriding the input")->allow_extra_args();
    subs["dist"]->description("Thurston distance lower bounds over the standard curve set");
    subs["dist"]->add_option("--other", o.other, "Second surface document");
    subs["limit"]->description("Large-twist asymptotics of one family");
    subs["limit"]->add_option("--curve", curve, "Internal curve index");
    subs["limit"]->add_option("--t", o.tValues, "Increasing twist samples")->allow_extra_args();
    subs["budget"]->description("Curve budget for a surface type");
    subs["budget"]->add_option("--genus", o.genus, "Genus")->required();
    subs["budget"]->add_option("--boundaries", o.boundaries, "Number of boundary components")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << doc::dump(error_record("UsageError", "usage", e.what()));
        err << app.help();
        return 64;
    }

    cfg.format = format == "csv" ? Format::csv : format == "json" ? Format::json : Format::table;
    if (curve >= 0) o.curve = curve;
    std::string command;
    for (const auto& [name, s] : subs)
        if (s->parsed()) command = name;

    auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
    spdlog::logger log("conelength", sink);
    log.set_level(log_level());
    log.set_pattern("[%l] %v");
    log.info("command {} (digits {}, parallelism {})", command, cfg.digits, cfg.parallelism);

    Report report;
    try {
        if (command == "budget") {
            report = budget(o);
        } else if (cfg.digits > 0) {
            WideReal::default_precision(static_cast<unsigned>(cfg.digits));
            report = dispatch<WideReal>(command, cfg, o, log);
        } else {
            report = dispatch<double>(command, cfg, o, log);
        }
    } catch (const SchemaError& e) {
        err << doc::dump(error_record(e.kind(), "validation", "schema violations", e.violations()));
        return 2;
    } catch (const MissingCurves& e) {
        err << doc::dump(error_record(e.kind(), "validation", e.what(), e.curves()));
        return 2;
    } catch (const AmbiguousRecovery& e) {
        err << doc::dump(error_record(e.kind(), "solver", e.what(), e.candidates()));
        return 3;
    } catch (const Error& e) {
        const bool solver = e.category() == ErrorCategory::solver;
        err << doc::dump(error_record(e.kind(), solver ? "solver" : "validation", e.what()));
        return solver ? 3 : 2;
    } catch (const std::exception& e) {
        err << doc::dump(error_record("InternalError", "validation", e.what()));
        return 2;
    }

    std::ostringstream text;
    switch (cfg.format) {
    case Format::table: render_table(text, report); break;
    case Format::csv: render_csv(text, report); break;
    case Format::json: text << doc::dump(report_json(report)); break;
    }
    if (cfg.output.empty() || cfg.output == "-") {
        out << text.str();
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) {
            err << doc::dump(error_record("ParseError", "validation", "cannot write " + cfg.output));
            return 2;
        }
        file << text.str();
    }
    return 0;
}

} // namespace conelength::cli
