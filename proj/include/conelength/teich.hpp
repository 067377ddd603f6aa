#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "errors.hpp"
#include "hyptrig.hpp"
#include "numeric.hpp"
#include "pants.hpp"
#include "surface.hpp"
#include "xpiece.hpp"

namespace conelength::teich {

template <class Real>
SurfaceFN<Real> forget_map(const SurfaceFN<Real>& X) {
    return X.with_boundaries(std::vector<GeneralizedLength<Real>>(X.boundaries().size()));
}

template <class Real>
struct ComparisonConstants {
    Real C = Real(1);
    Real D = Real(0);
    // Per-case factors: perpendicular between two geodesic cuffs (cone / geodesic
    // third cuff), arc from a cuff back to itself (cone / geodesic), and the
    // implicit two-cuff case.
    Real KA = Real(1), KB = Real(1), KC = Real(1), KD = Real(1), KEF = Real(1);
};

template <class Real>
ComparisonConstants<Real> comparison_constants(const std::vector<GeneralizedLength<Real>>& Lambda) {
    using std::max;
    ComparisonConstants<Real> k;
    for (const auto& l : Lambda) {
        const Real m = pants::trace(l);
        if (l.kind() == BoundaryKind::cone) {
            k.KA = max(k.KA, Real(Real(2) / (Real(1) + m)));
            k.KC = max(k.KC, Real(Real(1) / (m * m)));
        } else if (l.kind() == BoundaryKind::geodesic) {
            k.KB = max(k.KB, Real((Real(1) + m) / Real(2)));
            k.KD = max(k.KD, Real(m * m));
        }
        // The implicit case compares a pair of traces with the cusp reference 1.
        const Real hi = max(m, Real(1)), lo = std::min(m, Real(1));
        k.KEF = max(k.KEF, Real((hi / lo) * (hi / lo)));
    }
    k.C = max({k.KA, k.KB, k.KC, k.KD, k.KEF});
    k.D = hyptrig::stable_arccosh(k.C);
    return k;
}

template <class Real>
struct LengthBoundReport {
    Real C = Real(1);
    Real D = Real(0);
    std::size_t checks = 0;
    std::size_t violations = 0;
    Real worst_additive_gap = Real(0);
    Real worst_additive_slack = std::numeric_limits<Real>::infinity();
    Real worst_log_ratio = Real(0);
    Real worst_ratio_slack = std::numeric_limits<Real>::infinity();
};

template <class Real>
LengthBoundReport<Real> verify_length_bounds(const SurfaceFN<Real>& X, const std::vector<EmbeddedFamily>& families,
                                             long maxIndex) {
    using std::abs;
    using std::log;
    using std::min;
    using std::max;
    const auto k = comparison_constants(X.boundaries());
    LengthBoundReport<Real> r;
    r.C = k.C;
    r.D = k.D;
    const CurveEvaluator<Real> ex(X), ef(forget_map(X));
    const Real logC = log(k.C);
    for (const auto& f : families) {
        const Real bound = k.D * Real(f.intersection_with_waist());
        for (long n = -maxIndex; n <= maxIndex; ++n) {
            const Real a = ex.family_length(f.curve, n), b = ef.family_length(f.curve, n);
            const Real gap = abs(a - b), lr = abs(log(a / b));
            // Bounds are compared with a relative allowance for rounding in the two lengths.
            const Real fuzz = Real(64) * detail::epsilon<Real>() * max(a, b);
            ++r.checks;
            if (gap > bound + fuzz || lr > logC + fuzz) ++r.violations;
            r.worst_additive_gap = max(r.worst_additive_gap, gap);
            r.worst_additive_slack = min(r.worst_additive_slack, Real(bound - gap));
            r.worst_log_ratio = max(r.worst_log_ratio, lr);
            r.worst_ratio_slack = min(r.worst_ratio_slack, Real(logC - lr));
        }
    }
    return r;
}

// Pants curves plus every embedded-family curve with |n| <= N.
inline std::vector<CurveId> standard_curve_set(const Topology& topo, long N) {
    std::vector<CurveId> ids;
    for (int j = 0; j < topo.curve_count(); ++j) ids.push_back(CurveId::pants_curve(j));
    for (int j = 0; j < topo.curve_count(); ++j)
        for (long n = -N; n <= N; ++n) ids.push_back(CurveId::twist(j, n));
    std::sort(ids.begin(), ids.end());
    return ids;
}

template <class Real>
struct DistanceEstimate {
    Real value = Real(0);
    CurveId witness;
    std::vector<CurveId> curves;
};

template <class Real>
void require_same_shape(const SurfaceFN<Real>& X1, const SurfaceFN<Real>& X2) {
    if (!(X1.topology() == X2.topology())) throw TopologyMismatch("surfaces have different pants graphs");
    if (!(X1.boundaries() == X2.boundaries())) throw TopologyMismatch("surfaces have different boundary data");
}

// log max l_X2 / l_X1 over a finite curve set: a lower bound for the Thurston distance.
template <class Real>
DistanceEstimate<Real> thurston_distance_lb(const SurfaceFN<Real>& X1, const SurfaceFN<Real>& X2, long N,
                                            int workers = 1) {
    using std::log;
    if (!(X1.topology() == X2.topology())) throw TopologyMismatch("surfaces have different pants graphs");
    DistanceEstimate<Real> d;
    d.curves = standard_curve_set(X1.topology(), N);
    const auto a = CurveEvaluator<Real>(X1).lengths(d.curves, workers);
    const auto b = CurveEvaluator<Real>(X2).lengths(d.curves, workers);
    bool first = true;
    for (std::size_t i = 0; i < d.curves.size(); ++i) {
        const Real v = log(b[i] / a[i]);
        if (first || v > d.value) {
            d.value = v;
            d.witness = d.curves[i];
            first = false;
        }
    }
    return d;
}

template <class Real>
Real almost_isometry_gap(const SurfaceFN<Real>& X1, const SurfaceFN<Real>& X2, long N, int workers = 1) {
    using std::abs;
    require_same_shape(X1, X2);
    const Real d = thurston_distance_lb(X1, X2, N, workers).value;
    const Real df = thurston_distance_lb(forget_map(X1), forget_map(X2), N, workers).value;
    return abs(d - df);
}

template <class Real>
struct ConvergenceSample {
    Real t;
    std::vector<Real> normalized;
    // max |normalized - profile|
    Real profile_deviation;
    // Same comparison for the normalized increment between t and the next sample.
    Real secant_deviation;
    // exp(l(n = 0)/2 - t waist) / limit - 1 for X-piece families; the torus analogue otherwise.
    Real constant_deviation;
};

template <class Real>
struct ConvergenceDiagnostics {
    std::vector<CurveId> curves;
    std::vector<Real> profile;
    std::vector<ConvergenceSample<Real>> samples;
};

// Twists X along curve j by each t in tSequence and follows the projectivized
// length vector of the standard curve set toward the intersection profile
// i(., curve j) normalized by its max.
template <class Real>
ConvergenceDiagnostics<Real> boundary_convergence(const SurfaceFN<Real>& X, int j, const std::vector<Real>& tSequence,
                                                  long N) {
    using std::abs;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::max;
    if (j < 0 || j >= X.topology().curve_count()) throw DomainError("family curve index out of range");
    ConvergenceDiagnostics<Real> out;
    out.curves = standard_curve_set(X.topology(), N);
    const auto family = embedded_family(X.topology(), j);
    for (const auto& id : out.curves)
        out.profile.push_back(id.role == CurveRole::twist && id.curve == j ? Real(1) : Real(0));

    auto lengths_at = [&](const Real& t) { return CurveEvaluator<Real>(X.with_twist(j, t)).lengths(out.curves); };
    auto normalize = [](std::vector<Real> v) {
        Real m = 0;
        for (const auto& x : v) m = max(m, Real(abs(x)));
        for (auto& x : v) x /= m;
        return v;
    };
    auto deviation = [&](const std::vector<Real>& v) {
        Real worst = 0;
        for (std::size_t i = 0; i < v.size(); ++i) worst = max(worst, Real(abs(v[i] - out.profile[i])));
        return worst;
    };

    std::vector<std::vector<Real>> raw;
    for (const auto& t : tSequence) raw.push_back(lengths_at(t));
    for (std::size_t s = 0; s < tSequence.size(); ++s) {
        ConvergenceSample<Real> c;
        c.t = tSequence[s];
        c.normalized = normalize(raw[s]);
        c.profile_deviation = deviation(c.normalized);
        if (s + 1 < tSequence.size()) {
            std::vector<Real> inc(raw[s].size());
            for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = raw[s + 1][i] - raw[s][i];
            c.secant_deviation = deviation(normalize(inc));
        } else {
            c.secant_deviation = std::numeric_limits<Real>::quiet_NaN();
        }
        const Real w = X.lengths()[j];
        const auto Xt = X.with_twist(j, c.t);
        if (family.kind == FamilyKind::xpiece) {
            auto spec = xpiece_spec(Xt, family);
            const Real observed = exp(xpiece::family_length(spec, 0) / Real(2) - c.t * w);
            spec.twist = Real(0);
            c.constant_deviation = observed / xpiece::asymptotic_constant(spec) - Real(1);
        } else {
            const auto spec = torus_spec(Xt, family);
            const Real observed = exp(xpiece::torus_family_length(spec, 0) / Real(2) - c.t * w / Real(2));
            c.constant_deviation = observed / cosh(xpiece::torus_height(spec) / Real(2)) - Real(1);
        }
        out.samples.push_back(std::move(c));
    }
    return out;
}

// Chain of 2g - 2 + n pants; the free cuffs carry the n boundaries (at most one
// per pants when g >= 1) and are otherwise paired at random.
template <class Rng>
Topology random_topology(int genus, int boundaries, Rng& rng) {
    if (genus < 0 || boundaries < 0 || is_exceptional(genus, boundaries))
        throw ExceptionalSurface("cannot build an exceptional or negative surface type");
    Topology topo;
    topo.genus = genus;
    topo.boundary_count = boundaries;
    const int np = topo.pants_count();
    topo.pants.assign(np, PantsRecord{});
    std::vector<std::vector<int>> free(np);
    int next_curve = 0;
    for (int p = 0; p < np; ++p) {
        std::vector<int> slots{0, 1, 2};
        int used = 0;
        if (p > 0) topo.pants[p][used++] = Cuff::curve(next_curve - 1);
        if (p + 1 < np) topo.pants[p][used++] = Cuff::curve(next_curve++);
        for (int s = used; s < 3; ++s) free[p].push_back(s);
    }
    std::vector<int> order(np);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<int, int>> open;
    int placed = 0;
    if (genus >= 1) {
        for (int p : order) {
            if (placed == boundaries) break;
            std::uniform_int_distribution<std::size_t> pick(0, free[p].size() - 1);
            const std::size_t k = pick(rng);
            topo.pants[p][free[p][k]] = Cuff::boundary(placed++);
            free[p].erase(free[p].begin() + static_cast<long>(k));
        }
    }
    for (int p = 0; p < np; ++p)
        for (int s : free[p]) open.emplace_back(p, s);
    std::shuffle(open.begin(), open.end(), rng);
    while (placed < boundaries) {
        const auto [p, s] = open.back();
        open.pop_back();
        topo.pants[p][s] = Cuff::boundary(placed++);
    }
    for (std::size_t i = 0; i + 1 < open.size(); i += 2) {
        topo.pants[open[i].first][open[i].second] = Cuff::curve(next_curve);
        topo.pants[open[i + 1].first][open[i + 1].second] = Cuff::curve(next_curve++);
    }
    topo.validate();
    return topo;
}

struct SampleRanges {
    double coneMin = -3.1;
    double coneMax = -0.01;
    double geodesicMin = 0.01;
    double geodesicMax = 3.0;
    double lengthMin = 0.1;
    double lengthMax = 5.0;
    double twistMin = -3.0;
    double twistMax = 3.0;
};

// Boundary data drawn as cone, cusp or geodesic with equal odds.
template <class Real, class Rng>
GeneralizedLength<Real> random_boundary(Rng& rng, const SampleRanges& r = {}) {
    std::uniform_int_distribution<int> kind(0, 2);
    switch (kind(rng)) {
    case 0: return GeneralizedLength<Real>(Real(std::uniform_real_distribution<double>(r.coneMin, r.coneMax)(rng)));
    case 1: return GeneralizedLength<Real>();
    default:
        return GeneralizedLength<Real>(Real(std::uniform_real_distribution<double>(r.geodesicMin, r.geodesicMax)(rng)));
    }
}

template <class Real, class Rng>
SurfaceFN<Real> random_surface(const Topology& topo, Rng& rng, const SampleRanges& r = {}) {
    std::vector<GeneralizedLength<Real>> b;
    for (int i = 0; i < topo.boundary_count; ++i) b.push_back(random_boundary<Real>(rng, r));
    std::uniform_real_distribution<double> len(r.lengthMin, r.lengthMax), tw(r.twistMin, r.twistMax);
    std::vector<Real> L, T;
    for (int j = 0; j < topo.curve_count(); ++j) {
        L.push_back(Real(len(rng)));
        T.push_back(Real(tw(rng)));
    }
    return SurfaceFN<Real>(topo, std::move(b), std::move(L), std::move(T));
}

} // namespace conelength::teich
