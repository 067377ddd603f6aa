#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hyptrig.hpp"
#include "numeric.hpp"
#include "pants.hpp"
#include "surface.hpp"
#include "xpiece.hpp"

namespace conelength::inversion {

inline int curve_budget(int genus, int boundaries) {
    if (genus < 0 || boundaries < 0) throw DomainError("genus and boundary count must be >= 0");
    if (is_exceptional(genus, boundaries))
        throw ExceptionalSurface("surface type (" + std::to_string(genus) + ", " + std::to_string(boundaries) +
                                 ") is exceptional");
    return 12 * genus - 12 + 32 * boundaries;
}

namespace detail_inv {

// cosh(a) - cosh(b) without cancellation.
template <class Real>
Real cosh_difference(const Real& a, const Real& b) {
    using std::sinh;
    return Real(2) * sinh((a + b) / Real(2)) * sinh((a - b) / Real(2));
}

// Solves sinh(u + step) / sinh(u) = R for u.
template <class Real>
Real solve_ratio(const Real& R, const Real& step) {
    using std::abs;
    using std::exp;
    using std::log;
    using std::sinh;
    const Real lo = exp(-step), hi = exp(step);
    if (!(R < lo || R > hi)) throw InconsistentSpectrum("twist ratio outside the attainable range");
    // coth u = (R - cosh step) / sinh step, i.e. u = log((R - e^-step) / (R - e^step)) / 2.
    Real u = log((R - lo) / (R - hi)) / Real(2);
    auto residual = [&](const Real& v) { return sinh(v + step) - R * sinh(v); };
    auto scale = [&](const Real& v) { return abs(sinh(v + step)) + abs(R * sinh(v)); };
    if (abs(residual(u)) <= Real(1e-10) * scale(u)) return u;
    // The ratio decreases in u on each branch u > 0 and u < 0; bisect around the estimate.
    const bool positive = R > hi;
    auto above = [&](const Real& v) { return sinh(v + step) / sinh(v) > R; };
    Real w = abs(u) * Real(1e-6) + detail::epsilon<Real>();
    Real a = u - w, b = u + w;
    for (int it = 0; it < 200; ++it) {
        if (positive && a <= Real(0)) a = u / Real(2);
        if (!positive && b >= Real(0)) b = u / Real(2);
        const bool ok_a = above(a), ok_b = !above(b);
        if (ok_a && ok_b) break;
        w *= Real(2);
        if (!ok_a) a = u - w;
        if (!ok_b) b = u + w;
    }
    for (int it = 0; it < 4000 && b - a > Real(4) * detail::epsilon<Real>() * abs(u); ++it) {
        const Real mid = (a + b) / Real(2);
        if (above(mid)) a = mid;
        else b = mid;
    }
    return (a + b) / Real(2);
}

template <class Real>
Real solve_family_twist(const Real& l0, const Real& l1, const Real& l2, const Real& step) {
    using std::abs;
    using std::max;
    detail::require_positive(l0, "l0");
    detail::require_positive(l1, "l1");
    detail::require_positive(l2, "l2");
    if (abs(l1 - l0) <= Real(64) * detail::epsilon<Real>() * max(l0, l1))
        throw DegenerateInput("l0 equals l1: the family is centered between indices 0 and 1");
    const Real d1 = cosh_difference(Real(l1 / Real(2)), Real(l0 / Real(2)));
    const Real d2 = cosh_difference(Real(l2 / Real(2)), Real(l1 / Real(2)));
    return solve_ratio(Real(d2 / d1), step);
}

} // namespace detail_inv

// (cosh(l2/2) - cosh(l1/2)) / (cosh(l1/2) - cosh(l0/2)) = sinh(u + w) / sinh(u), u = t w + w/2.
template <class Real>
Real solve_twist(const Real& l0, const Real& l1, const Real& l2, const Real& waist) {
    detail::require_positive(waist, "waist");
    const Real u = detail_inv::solve_family_twist(l0, l1, l2, waist);
    return (u - waist / Real(2)) / waist;
}

// Same ratio with step w/2 and u = (2t + 1) w / 4.
template <class Real>
Real solve_torus_twist(const Real& l0, const Real& l1, const Real& l2, const Real& waist) {
    detail::require_positive(waist, "waist");
    const Real u = detail_inv::solve_family_twist(l0, l1, l2, Real(waist / Real(2)));
    return (Real(4) * u / waist - Real(1)) / Real(2);
}

// Relative residual of the three-term ratio identity at twist t.
template <class Real>
Real twist_equation_residual(const Real& l0, const Real& l1, const Real& l2, const Real& waist, const Real& t,
                             bool torus = false) {
    using std::abs;
    using std::sinh;
    const Real step = torus ? Real(waist / Real(2)) : waist;
    const Real u = torus ? Real((Real(2) * t + Real(1)) * waist / Real(4)) : Real(t * waist + waist / Real(2));
    const Real d1 = detail_inv::cosh_difference(Real(l1 / Real(2)), Real(l0 / Real(2)));
    const Real d2 = detail_inv::cosh_difference(Real(l2 / Real(2)), Real(l1 / Real(2)));
    const Real observed = d2 / d1;
    return abs(sinh(u + step) / sinh(u) - observed) / abs(observed);
}

template <class Real>
GeneralizedLength<Real> recover_torus_angle(const Real& lgamma, const Real& lbeta0, const Real& t) {
    using std::cosh;
    using std::sinh;
    detail::require_positive(lgamma, "waist");
    detail::require_positive(lbeta0, "beta length");
    detail::require_finite(t, "twist");
    const Real half = lgamma / Real(2);
    const Real c = cosh(lbeta0 / Real(2)) / cosh(t * lgamma / Real(2));
    const Real s = sinh(half);
    // m = sinh^2(w/2) cosh h0 - cosh^2(w/2) with cosh h0 = 2c^2 - 1.
    const Real m = Real(2) * s * s * (c * c - Real(1)) - Real(1);
    if (!(m > Real(0))) throw InconsistentSpectrum("torus boundary trace is not positive");
    return pants::from_trace(m);
}

template <class Real>
struct BCObservation {
    Real waist;
    Real twist;
    Real l0;
    Real l1;
};

template <class Real>
struct BCUnknowns {
    Real S;
    Real T;
    Real Q;
    Real P;
};

template <class Real>
struct BCSolution {
    BCUnknowns<Real> unknowns;
    Real condition;
    Real residual;
    // Estimated absolute error of the unknowns given rounding in the inputs.
    Real error_bound;
};

namespace detail_inv {

template <class Real>
using Mat4 = std::array<std::array<Real, 4>, 4>;

// Left side of the observation identity: A^2 sinh^4(w/2) with A from two family lengths.
template <class Real>
Real bc_lhs(const BCObservation<Real>& r) {
    using std::sinh;
    const Real dc = cosh_difference(Real(r.l1 / Real(2)), Real(r.l0 / Real(2)));
    const Real s = sinh(r.waist / Real(2));
    const Real d = sinh(r.twist * r.waist + r.waist / Real(2));
    const Real a = dc * s / (Real(2) * d);
    return a * a;
}

template <class Real>
std::optional<std::array<Real, 4>> lu_solve(Mat4<Real> A, std::array<Real, 4> b) {
    using std::abs;
    for (int c = 0; c < 4; ++c) {
        int p = c;
        for (int r = c + 1; r < 4; ++r)
            if (abs(A[r][c]) > abs(A[p][c])) p = r;
        if (A[p][c] == Real(0)) return std::nullopt;
        std::swap(A[p], A[c]);
        std::swap(b[p], b[c]);
        for (int r = c + 1; r < 4; ++r) {
            const Real f = A[r][c] / A[c][c];
            for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::array<Real, 4> x{};
    for (int r = 3; r >= 0; --r) {
        Real acc = b[r];
        for (int k = r + 1; k < 4; ++k) acc -= A[r][k] * x[k];
        x[r] = acc / A[r][r];
    }
    return x;
}

// Infinity-norm condition number after scaling every column to unit max.
template <class Real>
Real condition_number(const Mat4<Real>& A) {
    using std::abs;
    using std::max;
    Mat4<Real> B = A;
    for (int c = 0; c < 4; ++c) {
        Real m = 0;
        for (int r = 0; r < 4; ++r) m = max(m, Real(abs(B[r][c])));
        if (m == Real(0)) return std::numeric_limits<Real>::infinity();
        for (int r = 0; r < 4; ++r) B[r][c] /= m;
    }
    Real norm = 0, inv_norm = 0;
    Mat4<Real> inv{};
    for (int c = 0; c < 4; ++c) {
        std::array<Real, 4> e{};
        e[c] = Real(1);
        auto col = lu_solve(B, e);
        if (!col) return std::numeric_limits<Real>::infinity();
        for (int r = 0; r < 4; ++r) inv[r][c] = (*col)[r];
    }
    for (int r = 0; r < 4; ++r) {
        Real s = 0, si = 0;
        for (int c = 0; c < 4; ++c) {
            s += abs(B[r][c]);
            si += abs(inv[r][c]);
        }
        norm = max(norm, s);
        inv_norm = max(inv_norm, si);
    }
    return norm * inv_norm;
}

template <class Real>
Mat4<Real> bc_matrix(const std::array<BCObservation<Real>, 4>& rows) {
    using std::cosh;
    Mat4<Real> A{};
    for (int r = 0; r < 4; ++r) {
        const Real x = cosh(rows[r].waist / Real(2));
        A[r] = {x * x * x, x * x, x, Real(1)};
    }
    return A;
}


// Relative error of one row's left side. The row twist comes out of
// solve_twist, whose error grows like eps * exp(2|u|) with u = t w + w/2.
template <class Real>
Real row_relative_error(const BCObservation<Real>& r) {
    using std::abs;
    using std::exp;
    const Real u = r.twist * r.waist + r.waist / Real(2);
    return detail::epsilon<Real>() * (Real(4) + r.l0 + r.l1 + exp(Real(2) * abs(u)) / -detail::expm1(Real(-2) * r.waist));
}

// Estimated absolute error of the unknowns: max_i sum_k |inv(A)_ik| err_k,
// where err_k covers the row's own error and the cancellation in LHS - x^4.
template <class Real>
Real bc_error_bound(const std::array<BCObservation<Real>, 4>& rows) {
    using std::abs;
    using std::cosh;
    const auto A = bc_matrix(rows);
    std::array<Real, 4> err{};
    for (int r = 0; r < 4; ++r) {
        const Real x = cosh(rows[r].waist / Real(2));
        err[r] = bc_lhs(rows[r]) * row_relative_error(rows[r]) + detail::epsilon<Real>() * x * x * x * x;
    }
    std::array<Real, 4> acc{};
    for (int c = 0; c < 4; ++c) {
        std::array<Real, 4> e{};
        e[c] = Real(1);
        auto col = lu_solve(A, e);
        if (!col) return std::numeric_limits<Real>::infinity();
        for (int r = 0; r < 4; ++r) acc[r] += abs((*col)[r]) * err[c];
    }
    return *std::max_element(acc.begin(), acc.end());
}

} // namespace detail_inv

// Largest acceptable condition number: 1e12 in double, scaled by the precision gained.
template <class Real>
Real singular_threshold() {
    return Real(1e12) * Real(std::numeric_limits<double>::epsilon()) / detail::epsilon<Real>();
}

template <class Real>
Real bc_condition(const std::array<BCObservation<Real>, 4>& rows) {
    return detail_inv::condition_number(detail_inv::bc_matrix(rows));
}

template <class Real>
BCSolution<Real> solve_bc_system(const std::array<BCObservation<Real>, 4>& rows) {
    using std::abs;
    using std::cosh;
    using std::max;
    for (const auto& r : rows) {
        detail::require_positive(r.waist, "row waist");
        detail::require_finite(r.twist, "row twist");
        detail::require_positive(r.l0, "row l0");
        detail::require_positive(r.l1, "row l1");
    }
    const auto A = detail_inv::bc_matrix(rows);
    const Real cond = detail_inv::condition_number(A);
    if (!(cond <= singular_threshold<Real>()))
        throw SingularSystem("observation nodes too close (condition number " +
                             std::to_string(detail::to_double(cond)) + ")");
    std::array<Real, 4> rhs{};
    for (int r = 0; r < 4; ++r) {
        const Real x = cosh(rows[r].waist / Real(2));
        rhs[r] = detail_inv::bc_lhs(rows[r]) - x * x * x * x;
    }
    auto sol = detail_inv::lu_solve(A, rhs);
    if (!sol) throw SingularSystem("observation matrix is singular");
    Real worst = 0;
    for (int r = 0; r < 4; ++r) {
        Real acc = 0, mag = abs(rhs[r]);
        for (int c = 0; c < 4; ++c) {
            acc += A[r][c] * (*sol)[c];
            mag += abs(A[r][c] * (*sol)[c]);
        }
        worst = max(worst, Real(abs(acc - rhs[r]) / mag));
    }
    if (worst > Real(1e-8)) throw InconsistentSpectrum("observation system residual too large");
    return {{(*sol)[0], (*sol)[1], (*sol)[2], (*sol)[3]}, cond, worst, detail_inv::bc_error_bound(rows)};
}

// Symmetric functions predicted by a labeled trace pair (u beside m3, up beside m3p).
template <class Real>
BCUnknowns<Real> bc_unknowns(const Real& u, const Real& up, const Real& m3, const Real& m3p) {
    const Real B = Real(2) * u * m3, Bp = Real(2) * up * m3p;
    const Real C = u * u + m3 * m3 - Real(1), Cp = up * up + m3p * m3p - Real(1);
    return {B + Bp, C + Cp + B * Bp, B * Cp + Bp * C, C * Cp};
}

namespace detail_inv {

template <class Real>
Real poly_eval(const std::vector<Real>& c, const Real& x) {
    Real acc = 0;
    for (const auto& a : c) acc = acc * x + a;
    return acc;
}

template <class Real>
Real poly_magnitude(const std::vector<Real>& c, const Real& x) {
    using std::abs;
    Real acc = 0;
    for (const auto& a : c) acc = acc * abs(x) + abs(a);
    return acc;
}

template <class Real>
std::vector<Real> derivative(const std::vector<Real>& c) {
    std::vector<Real> d;
    const int deg = static_cast<int>(c.size()) - 1;
    for (int i = 0; i < deg; ++i) d.push_back(c[i] * Real(deg - i));
    return d;
}

// Real roots of a polynomial (leading coefficient first), found by bracketing
// between critical points; a critical point where the value vanishes to
// rounding counts as a multiple root.
template <class Real>
std::vector<Real> real_roots(std::vector<Real> c) {
    using std::abs;
    using std::max;
    while (!c.empty() && c.front() == Real(0)) c.erase(c.begin());
    std::vector<Real> roots;
    if (c.size() <= 1) return roots;
    if (c.size() == 2) return {-c[1] / c[0]};
    Real bound = 0;
    for (std::size_t i = 1; i < c.size(); ++i) bound = max(bound, Real(abs(c[i] / c[0])));
    bound += Real(1);
    std::vector<Real> pts{-bound};
    for (const auto& r : real_roots(derivative(c)))
        if (r > -bound && r < bound) pts.push_back(r);
    pts.push_back(bound);
    std::sort(pts.begin(), pts.end());
    const Real tol = Real(64) * detail::epsilon<Real>();
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
        if (abs(poly_eval(c, pts[i])) <= tol * poly_magnitude(c, pts[i])) roots.push_back(pts[i]);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Real a = pts[i], b = pts[i + 1];
        Real fa = poly_eval(c, a), fb = poly_eval(c, b);
        if (fa == Real(0) || fb == Real(0) || (fa < Real(0)) == (fb < Real(0))) continue;
        for (int it = 0; it < 4000 && b - a > Real(2) * detail::epsilon<Real>() * max(Real(abs(a)), Real(abs(b)));
             ++it) {
            const Real mid = (a + b) / Real(2);
            const Real fm = poly_eval(c, mid);
            if (fm == Real(0)) {
                a = b = mid;
                break;
            }
            if ((fm < Real(0)) == (fa < Real(0))) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push_back((a + b) / Real(2));
    }
    std::sort(roots.begin(), roots.end());
    std::vector<Real> unique;
    for (const auto& r : roots)
        if (unique.empty() || abs(r - unique.back()) > Real(1e3) * detail::epsilon<Real>() * max(Real(1), Real(abs(r))))
            unique.push_back(r);
    return unique;
}

template <class Real>
Real relative_gap(const Real& a, const Real& b) {
    using std::abs;
    using std::max;
    return abs(a - b) / max(Real(1), Real(max(abs(a), abs(b))));
}

} // namespace detail_inv

template <class Real>
struct ConePair {
    // Canonical order: first <= second.
    GeneralizedLength<Real> first;
    GeneralizedLength<Real> second;
    // (beside m3, beside m3p) when the data fix the labeling.
    std::optional<std::pair<GeneralizedLength<Real>, GeneralizedLength<Real>>> labeled;
    // Every labeled trace pair (u, up) consistent with the data.
    std::vector<std::pair<Real, Real>> candidates;
};

inline constexpr double cone_pair_tolerance = 1e-6;

template <class Real>
ConePair<Real> recover_cone_pair(const BCUnknowns<Real>& k, const Real& m3, const Real& m3p) {
    detail::require_finite(m3, "m3");
    detail::require_finite(m3p, "m3p");
    if (!(m3 > Real(1)) || !(m3p > Real(1))) throw DomainError("m3, m3p: traces of geodesic boundaries must exceed 1");
    using std::abs;
    const Real a = m3 / m3p, b = k.S / (Real(2) * m3p);
    const Real c = m3 * m3 - Real(1), cp = m3p * m3p - Real(1);
    // (u^2 + c)((b - a u)^2 + cp) = P with up = b - a u.
    const std::vector<Real> quartic{a * a, Real(-2) * a * b, b * b + cp + a * a * c, Real(-2) * a * b * c,
                                    c * (b * b + cp) - k.P};
    const Real tol = Real(cone_pair_tolerance);
    ConePair<Real> out;
    // Critical points stand in for double roots that noise in P pushed off the axis.
    auto trial = detail_inv::real_roots(quartic);
    for (const auto& u : detail_inv::real_roots(detail_inv::derivative(quartic)))
        if (abs(detail_inv::poly_eval(quartic, u)) <= tol * detail_inv::poly_magnitude(quartic, u)) trial.push_back(u);
    // Near a double root the residual grows only quadratically, so candidates
    // closer than sqrt(tol) to a better one are the same root.
    std::vector<std::pair<Real, std::pair<Real, Real>>> ranked;
    for (const auto& u : trial) {
        const Real up = b - a * u;
        if (!(u > Real(0)) || !(up > Real(0))) continue;
        const auto pred = bc_unknowns(u, up, m3, m3p);
        const Real r = std::max(detail_inv::relative_gap(pred.T, k.T), detail_inv::relative_gap(pred.Q, k.Q));
        if (r <= tol) ranked.push_back({r, {u, up}});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    using std::sqrt;
    const Real spread = sqrt(tol);
    auto same = [&](const std::pair<Real, Real>& x, const std::pair<Real, Real>& y) {
        return detail_inv::relative_gap(x.first, y.first) <= spread && detail_inv::relative_gap(x.second, y.second) <= spread;
    };
    for (const auto& [r, e] : ranked) {
        bool dup = false;
        for (const auto& c : out.candidates) dup = dup || same(c, e);
        if (!dup) out.candidates.push_back(e);
    }
    if (out.candidates.empty()) throw InconsistentSpectrum("no trace pair matches all four symmetric functions");
    auto sorted = [](std::pair<Real, Real> p) {
        if (p.second < p.first) std::swap(p.first, p.second);
        return p;
    };
    const auto base = sorted(out.candidates.front());
    for (const auto& e : out.candidates) {
        if (!same(sorted(e), base)) {
            std::vector<std::string> desc;
            for (const auto& f : out.candidates) {
                std::ostringstream os;
                os.precision(17);
                os << "(" << detail::to_double(f.first) << ", " << detail::to_double(f.second) << ")";
                desc.push_back(os.str());
            }
            throw AmbiguousRecovery(desc);
        }
    }
    out.first = pants::from_trace(base.first);
    out.second = pants::from_trace(base.second);
    if (out.candidates.size() == 1)
        out.labeled.emplace(pants::from_trace(out.candidates[0].first), pants::from_trace(out.candidates[0].second));
    return out;
}

template <class Real>
struct BoundaryRecovery {
    BoundaryPlan plan;
    GeneralizedLength<Real> value;
    Real condition = Real(0);
    bool labeling_ambiguous = false;
};

template <class Real>
struct SurfaceRecovery {
    SurfaceFN<Real> surface;
    std::vector<BoundaryRecovery<Real>> boundaries;
    Real resimulation_error;
    std::size_t curves_used;
    // Boundary pairs whose values are determined only up to exchange.
    std::vector<std::pair<int, int>> ambiguous;
};

inline constexpr double resimulation_tolerance = 1e-6;

namespace detail_inv {

template <class Real>
void require_manifest(const CurveManifest& m, const LengthSpectrum<Real>& spectrum) {
    std::vector<std::string> missing;
    for (const auto& id : m.curves)
        if (!spectrum.contains(id)) missing.push_back(id.str());
    if (!missing.empty()) throw MissingCurves(std::move(missing));
}

template <class Real>
Real twist_from_family(const EmbeddedFamily& f, const LengthSpectrum<Real>& s, const Real& waist) {
    const Real l0 = s.at(CurveId::twist(f.curve, 0));
    const Real l1 = s.at(CurveId::twist(f.curve, 1));
    const Real l2 = s.at(CurveId::twist(f.curve, 2));
    return f.kind == FamilyKind::torus ? solve_torus_twist(l0, l1, l2, waist) : solve_twist(l0, l1, l2, waist);
}

// Picks the 4 of the available rows with the smallest error bound.
template <class Real>
std::array<BCObservation<Real>, 4> best_rows(const std::vector<BCObservation<Real>>& rows) {
    if (rows.size() < 4) throw SingularSystem("fewer than four usable observations");
    std::array<BCObservation<Real>, 4> best{};
    Real best_cond = std::numeric_limits<Real>::infinity();
    bool found = false;
    const std::size_t n = rows.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t d = c + 1; d < n; ++d) {
                    const std::array<BCObservation<Real>, 4> pick{rows[a], rows[b], rows[c], rows[d]};
                    const Real cond = bc_error_bound(pick);
                    if (!found || cond < best_cond) {
                        best = pick;
                        best_cond = cond;
                        found = true;
                    }
                }
    return best;
}

} // namespace detail_inv

// Recovers (Lambda, L, T) from the lengths listed by curve_manifest(topology).
template <class Real>
SurfaceRecovery<Real> recover_surface_detailed(const Topology& topo, const LengthSpectrum<Real>& spectrum,
                                               const Real& tolerance = Real(resimulation_tolerance)) {
    using std::abs;
    using std::max;
    const CurveManifest manifest = curve_manifest(topo);
    detail_inv::require_manifest(manifest, spectrum);
    const auto families = embedded_families(topo);
    const int nc = topo.curve_count();

    std::vector<Real> L(nc), T(nc);
    for (int j = 0; j < nc; ++j) L[j] = spectrum.at(CurveId::pants_curve(j));
    for (int j = 0; j < nc; ++j) T[j] = detail_inv::twist_from_family(families[j], spectrum, L[j]);

    std::vector<std::optional<GeneralizedLength<Real>>> Lambda(topo.boundary_count);
    std::vector<BoundaryRecovery<Real>> reports;
    std::vector<std::pair<int, int>> ambiguous;
    auto cuff_trace = [&](const Cuff& c) -> std::optional<Real> {
        if (c.is_curve()) return pants::trace(GeneralizedLength<Real>(L[c.index]));
        if (Lambda[c.index]) return pants::trace(*Lambda[c.index]);
        return std::nullopt;
    };

    for (const auto& plan : manifest.plans) {
        BoundaryRecovery<Real> rep{plan, {}, Real(0), false};
        const auto& f = families[plan.anchor];
        const int j = plan.anchor;
        if (plan.route == BoundaryRoute::torus) {
            rep.value = recover_torus_angle(L[j], spectrum.at(CurveId::twist(j, 0)), T[j]);
            Lambda[plan.boundary] = rep.value;
            reports.push_back(rep);
            continue;
        }
        if (Lambda[plan.boundary]) {
            rep.value = *Lambda[plan.boundary];
            reports.push_back(rep);
            continue;
        }
        std::vector<BCObservation<Real>> rows;
        const Real d0 = spectrum.at(CurveId::twist(j, 0));
        for (long k = -retwist_reach; k <= retwist_reach; ++k) {
            const Real wk = k == 0 ? L[j] : spectrum.at(CurveId::retwisted_waist(j, k));
            const Real d1 = spectrum.at(k == 0 ? CurveId::twist(j, 1) : CurveId::retwisted_family(j, k, 1));
            const Real d2 = spectrum.at(k == 0 ? CurveId::twist(j, 2) : CurveId::retwisted_family(j, k, 2));
            try {
                const Real tk = k == 0 ? T[j] : solve_twist(d0, d1, d2, wk);
                rows.push_back({wk, tk, d0, d1});
            } catch (const Error&) {
            }
        }
        const auto chosen = detail_inv::best_rows(rows);
        const auto bc = solve_bc_system(chosen);
        rep.condition = bc.condition;
        if (bc.error_bound > Real(cone_pair_tolerance) * Real(1e-1))
            throw SingularSystem("boundary " + std::to_string(plan.boundary) +
                                 ": observations cannot resolve the boundary pair at this working precision "
                                 "(estimated error " + std::to_string(detail::to_double(bc.error_bound)) + ")");
        const Real m3 = pants::trace(GeneralizedLength<Real>(L[f.targetA.index]));
        const Real m3p = pants::trace(GeneralizedLength<Real>(L[f.targetB.index]));
        const auto pair = recover_cone_pair(bc.unknowns, m3, m3p);

        // A known companion on the far side fixes the labeling. Without one, the
        // two labelings differ by a symmetry of the X-piece that fixes every curve
        // in it, so the data cannot choose; the lower boundary index then takes
        // the smaller value and the pair is flagged.
        const Cuff other = plan.onSideA ? f.companionB : f.companionA;
        const auto other_trace = cuff_trace(other);
        std::pair<Real, Real> pick = pair.candidates.front();
        if (pair.candidates.size() > 1 && other_trace) {
            Real best = std::numeric_limits<Real>::infinity();
            for (const auto& cand : pair.candidates) {
                const Real gap = abs((plan.onSideA ? cand.second : cand.first) - *other_trace);
                if (gap < best) {
                    best = gap;
                    pick = cand;
                }
            }
        } else if (pair.candidates.size() > 1) {
            const bool mine_first = plan.boundary < other.index;
            for (const auto& cand : pair.candidates) {
                const Real mine_u = plan.onSideA ? cand.first : cand.second;
                const Real other_u = plan.onSideA ? cand.second : cand.first;
                if ((mine_u <= other_u) == mine_first) pick = cand;
            }
            rep.labeling_ambiguous = true;
            ambiguous.emplace_back(std::min(plan.boundary, other.index), std::max(plan.boundary, other.index));
        }
        const auto mine = pants::from_trace(plan.onSideA ? pick.first : pick.second);
        rep.value = mine;
        Lambda[plan.boundary] = mine;
        if (!other.is_curve() && !Lambda[other.index])
            Lambda[other.index] = pants::from_trace(plan.onSideA ? pick.second : pick.first);
        reports.push_back(rep);
    }

    std::vector<GeneralizedLength<Real>> boundaries;
    for (const auto& v : Lambda) boundaries.push_back(*v);
    SurfaceFN<Real> X(topo, std::move(boundaries), std::move(L), std::move(T));

    const auto again = forward_spectrum(X, manifest.curves);
    Real worst = 0;
    for (const auto& id : manifest.curves)
        worst = max(worst, Real(abs(again.at(id) - spectrum.at(id)) / spectrum.at(id)));
    if (worst > tolerance)
        throw InconsistentSpectrum("re-simulated spectrum deviates by " + std::to_string(detail::to_double(worst)));
    return {std::move(X), std::move(reports), worst, manifest.curves.size(), std::move(ambiguous)};
}

template <class Real>
SurfaceFN<Real> recover_surface(const Topology& topo, const LengthSpectrum<Real>& spectrum,
                                const Real& tolerance = Real(resimulation_tolerance)) {
    return recover_surface_detailed(topo, spectrum, tolerance).surface;
}

} // namespace conelength::inversion
