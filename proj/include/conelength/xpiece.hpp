#pragma once

#include <cmath>

#include "errors.hpp"
#include "hyptrig.hpp"
#include "numeric.hpp"
#include "pants.hpp"

namespace conelength::xpiece {

// One half of an X-piece: the cuff the family curve turns around (target) and
// the remaining cuff (companion).
template <class Real>
struct PantsHalf {
    GeneralizedLength<Real> target;
    GeneralizedLength<Real> companion;
};

template <class Real>
struct XPieceSpec {
    PantsHalf<Real> pantsA;
    PantsHalf<Real> pantsB;
    Real waist = Real(1);
    Real twist = Real(0);

    void validate() const {
        detail::require_positive(waist, "waist");
        detail::require_finite(twist, "twist");
    }
};

template <class Real>
struct TorusSpec {
    Real waist = Real(1);
    GeneralizedLength<Real> boundary;
    Real twist = Real(0);

    void validate() const {
        detail::require_positive(waist, "waist");
        detail::require_finite(twist, "twist");
    }
};

// cosh(l/2) = A cosh((t + n) waist) + B
template <class Real>
struct FamilyCoefficients {
    Real A;
    Real B;
};

// Orientation of the dual twist relative to the original one (see dual_spec).
inline constexpr int dual_orientation = -1;

inline constexpr double log_domain_threshold = 300.0;

namespace detail_x {

template <class Real>
Real half_length(const Real& A, const Real& B, const Real& x) {
    using std::abs;
    using std::cosh;
    using std::exp;
    using std::log;
    const Real ax = abs(x);
    if (ax <= Real(log_domain_threshold)) {
        const Real y = A * cosh(ax) + B;
        if (y < Real(1) - Real(detail::clamp_window))
            throw DomainError("family length: cosh argument below 1");
        return hyptrig::stable_arccosh(y);
    }
    const Real e = exp(-ax);
    const Real log_y = log(A) + ax - log(Real(2)) + detail::log1p(Real(e * e + Real(2) * (B / A) * e));
    return hyptrig::arccosh_from_log(log_y);
}

// |x| solving A cosh x + B = cosh(h).
template <class Real>
Real solve_shift(const Real& A, const Real& B, const Real& h) {
    using std::cosh;
    using std::exp;
    using std::log;
    if (h <= Real(log_domain_threshold)) {
        const Real excess = (cosh(h) - B - A) / A;
        if (excess < Real(0)) {
            if (excess < -Real(1e-9)) throw DomainError("waist shorter than the dual family minimum");
            return Real(0);
        }
        return hyptrig::arccosh1p(excess);
    }
    const Real lc = detail::log_cosh(h);
    const Real log_arg = lc + detail::log1p(Real(-B * exp(-lc))) - log(A);
    return hyptrig::arccosh_from_log(log_arg);
}

} // namespace detail_x

template <class Real>
FamilyCoefficients<Real> family_coefficients(const XPieceSpec<Real>& spec) {
    const auto a = pants::coefficients(spec.pantsA.target, spec.pantsA.companion, spec.waist);
    const auto b = pants::coefficients(spec.pantsB.target, spec.pantsB.companion, spec.waist);
    return {a.U * b.U, a.V * b.V - a.m * b.m};
}

// Length of the family curve at twist t + shift; shift need not be an integer.
template <class Real>
Real family_length_shifted(const XPieceSpec<Real>& spec, const Real& shift) {
    spec.validate();
    const auto c = family_coefficients(spec);
    return Real(2) * detail_x::half_length(c.A, c.B, Real((spec.twist + shift) * spec.waist));
}

template <class Real>
Real family_length(const XPieceSpec<Real>& spec, long n) {
    return family_length_shifted(spec, Real(n));
}

template <class Real>
Real asymptotic_constant(const XPieceSpec<Real>& spec) {
    using std::exp;
    spec.validate();
    return family_coefficients(spec).A * exp(spec.twist * spec.waist);
}

// Limit of family_length(spec, n) - 2 n waist.
template <class Real>
Real asymptotic_offset(const XPieceSpec<Real>& spec) {
    using std::log;
    spec.validate();
    return Real(2) * spec.twist * spec.waist + Real(2) * log(family_coefficients(spec).A);
}

template <class Real>
Real torus_height(const TorusSpec<Real>& spec) {
    using std::sinh;
    spec.validate();
    const Real s = sinh(spec.waist / Real(2));
    // cosh h0 = (m + cosh^2(w/2)) / sinh^2(w/2), so cosh h0 - 1 = (m + 1) / sinh^2(w/2).
    return hyptrig::arccosh1p(Real((pants::trace(spec.boundary) + Real(1)) / (s * s)));
}

template <class Real>
Real torus_family_length_shifted(const TorusSpec<Real>& spec, const Real& shift) {
    using std::abs;
    using std::cosh;
    using std::log;
    const Real h0 = torus_height(spec);
    const Real y = (spec.twist + shift) * spec.waist / Real(2);
    if (abs(y) <= Real(log_domain_threshold))
        return Real(2) * hyptrig::stable_arccosh(Real(cosh(y) * cosh(h0 / Real(2))));
    return Real(2) * hyptrig::arccosh_from_log(Real(detail::log_cosh(y) + log(cosh(h0 / Real(2)))));
}

template <class Real>
Real torus_family_length(const TorusSpec<Real>& spec, long n) {
    return torus_family_length_shifted(spec, Real(n));
}

// Limit of torus_family_length(spec, n) - n waist.
template <class Real>
Real torus_asymptotic_offset(const TorusSpec<Real>& spec) {
    using std::cosh;
    using std::log;
    return spec.twist * spec.waist + Real(2) * log(cosh(torus_height(spec) / Real(2)));
}

template <class Real>
XPieceSpec<Real> shifted(XPieceSpec<Real> spec, const Real& by) {
    spec.twist += by;
    return spec;
}

// The same X-piece described with the n = 0 family curve as waist. The old
// waist becomes the n = 0 family curve of the new description, so
// dual_spec(dual_spec(s)) == s up to rounding.
template <class Real>
XPieceSpec<Real> dual_spec(const XPieceSpec<Real>& spec) {
    XPieceSpec<Real> d;
    d.waist = family_length_shifted(spec, Real(0));
    d.pantsA = {spec.pantsA.target, spec.pantsB.target};
    d.pantsB = {spec.pantsA.companion, spec.pantsB.companion};
    const auto c = family_coefficients(d);
    const Real x = detail_x::solve_shift(c.A, c.B, Real(spec.waist / Real(2)));
    d.twist = Real(dual_orientation) * detail::sign(spec.twist) * x / d.waist;
    return d;
}

// The X-piece described with waist Tw^k(waist) along the dual family.
template <class Real>
XPieceSpec<Real> retwisted_spec(const XPieceSpec<Real>& spec, long k) {
    if (k == 0) return spec;
    return dual_spec(shifted(dual_spec(spec), Real(k)));
}

} // namespace conelength::xpiece
