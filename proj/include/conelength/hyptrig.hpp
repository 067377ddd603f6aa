#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "numeric.hpp"

namespace conelength::hyptrig {

template <class Real>
struct ArcConfiguration {
    Real base;
    Real dispA;
    Real dispB;
};

// arccosh(1 + e) for e >= 0, accurate when e is small.
template <class Real>
Real arccosh1p(const Real& e) {
    using std::sqrt;
    if (e < Real(0)) {
        if (e < -Real(detail::clamp_window)) throw DomainError("arccosh argument below 1");
        return Real(0);
    }
    return detail::log1p(e + sqrt(e * (Real(2) + e)));
}

template <class Real>
Real stable_arccosh(const Real& x) {
    using std::log;
    using std::sqrt;
    detail::require_finite(x, "arccosh argument");
    if (x < Real(1)) {
        if (x < Real(1) - Real(detail::clamp_window)) throw DomainError("arccosh argument below 1");
        return Real(0);
    }
    static const Real asymptotic_from = Real(1) / sqrt(detail::epsilon<Real>());
    if (x > asymptotic_from) return log(Real(2) * x) - Real(1) / (Real(4) * x * x);
    if (x < Real(2)) return arccosh1p(x - Real(1));
    return log(x + sqrt((x - Real(1)) * (x + Real(1))));
}

// arccosh(y) given log y > 0; used where y itself would overflow.
template <class Real>
Real arccosh_from_log(const Real& log_y) {
    using std::exp;
    using std::sqrt;
    if (log_y < Real(20)) return stable_arccosh(exp(log_y));
    return log_y + detail::log1p(sqrt(Real(1) - exp(Real(-2) * log_y)));
}

template <class Real>
Real stable_arcsinh(const Real& x) {
    using std::abs;
    using std::sqrt;
    const Real a = abs(x);
    const Real r = detail::log1p(a + a * a / (Real(1) + sqrt(Real(1) + a * a)));
    return x < Real(0) ? -r : r;
}

// arccos that clamps roundoff within the window and rejects anything beyond it.
template <class Real>
Real clamped_arccos(const Real& x) {
    using std::acos;
    if (x > Real(1)) {
        if (x > Real(1) + Real(detail::clamp_window)) throw DomainError("arccos argument above 1");
        return Real(0);
    }
    if (x < Real(-1)) {
        if (x < Real(-1) - Real(detail::clamp_window)) throw DomainError("arccos argument below -1");
        return detail::pi<Real>();
    }
    return acos(x);
}

namespace detail_ht {

template <class Real>
void require_angle(const Real& a, const char* name) {
    detail::require_finite(a, name);
    if (!(a > Real(0) && a < detail::pi<Real>()))
        throw DomainError(std::string(name) + " must lie in (0, pi)");
}

template <class Real>
Real strict_arccos(const Real& rhs, const char* what) {
    using std::abs;
    using std::acos;
    if (!(abs(rhs) < Real(1))) throw DegenerateConfiguration(std::string(what) + ": |cos| >= 1");
    return acos(rhs);
}

template <class Real>
Real strict_arccosh(const Real& rhs, const char* what) {
    if (!(rhs > Real(1))) throw DegenerateConfiguration(std::string(what) + ": cosh argument <= 1");
    return stable_arccosh(rhs);
}

} // namespace detail_ht

template <class Real>
Real trirectangle_angle(const Real& a, const Real& b) {
    using std::acos;
    using std::sinh;
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
    const Real p = sinh(a) * sinh(b);
    if (!(p < Real(1))) throw DegenerateConfiguration("tri-rectangle: sinh a sinh b >= 1");
    return acos(p);
}

template <class Real>
Real pentagon_opposite(const Real& alpha, const Real& beta, const Real& theta) {
    using std::cos;
    using std::cosh;
    using std::sinh;
    detail::require_positive(alpha, "alpha");
    detail::require_positive(beta, "beta");
    detail_ht::require_angle(theta, "theta");
    const Real rhs = -cosh(alpha) * cosh(beta) * cos(theta) + sinh(alpha) * sinh(beta);
    return detail_ht::strict_arccosh(rhs, "pentagon");
}

template <class Real>
Real pentagon_angle(const Real& a, const Real& b, const Real& c) {
    using std::cosh;
    using std::sinh;
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
    detail::require_positive(c, "c");
    const Real rhs = sinh(a) * sinh(b) * cosh(c) - cosh(a) * cosh(b);
    return detail_ht::strict_arccos(rhs, "pentagon");
}

template <class Real>
Real hexagon_side(const Real& a, const Real& b, const Real& gamma) {
    using std::cosh;
    using std::sinh;
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
    detail::require_positive(gamma, "gamma");
    const Real rhs = sinh(a) * sinh(b) * cosh(gamma) - cosh(a) * cosh(b);
    return detail_ht::strict_arccosh(rhs, "hexagon");
}

// cosh d = cosh r1 cosh r2 cosh c - sinh r1 sinh r2, rewritten as
// 1 + 2 sinh^2((r1 - r2)/2) + 2 sinh^2(c/2) cosh r1 cosh r2 to avoid cancellation.
template <class Real>
Real quad_diagonal(const ArcConfiguration<Real>& cfg) {
    using std::cosh;
    using std::sinh;
    detail::require_positive(cfg.base, "base");
    detail::require_finite(cfg.dispA, "dispA");
    detail::require_finite(cfg.dispB, "dispB");
    const Real sd = sinh((cfg.dispA - cfg.dispB) / Real(2));
    const Real sc = sinh(cfg.base / Real(2));
    return arccosh1p(Real(2) * sd * sd + Real(2) * sc * sc * cosh(cfg.dispA) * cosh(cfg.dispB));
}

template <class Real>
Real quad_angle(const Real& beta, const Real& c, const Real& rho2) {
    using std::abs;
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    detail_ht::require_angle(beta, "beta");
    detail::require_positive(c, "c");
    detail::require_finite(rho2, "rho2");
    const Real rhs = -cos(beta) * cosh(c) + sin(beta) * sinh(c) * sinh(abs(rho2));
    return detail_ht::strict_arccos(rhs, "quadrilateral angle");
}

template <class Real>
Real quad_base(const Real& alpha, const Real& beta, const Real& d) {
    using std::cos;
    using std::cosh;
    using std::sin;
    detail_ht::require_angle(alpha, "alpha");
    detail_ht::require_angle(beta, "beta");
    detail::require_positive(d, "d");
    const Real rhs = -cos(alpha) * cos(beta) + sin(alpha) * sin(beta) * cosh(d);
    return detail_ht::strict_arccosh(rhs, "quadrilateral base");
}

template <class Real>
Real pentagon4_side(const Real& alpha, const Real& a, const Real& bprime) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    detail_ht::require_angle(alpha, "alpha");
    detail::require_positive(a, "a");
    detail::require_positive(bprime, "bprime");
    const Real rhs = sin(alpha) * sinh(a) * sinh(bprime) - cos(alpha) * cosh(a);
    return detail_ht::strict_arccosh(rhs, "four-right-angle pentagon");
}

enum class SelfPentagonReading { sin_alpha };

// The printed identity multiplies the angle alpha by a hyperbolic sine; this
// implementation reads that factor as sin(alpha).
inline constexpr SelfPentagonReading self_pentagon_reading = SelfPentagonReading::sin_alpha;

template <class Real>
Real selfpentagon_side(const Real& alpha, const Real& a, const Real& b, const Real& cprime) {
    using std::cosh;
    using std::sin;
    using std::sinh;
    detail_ht::require_angle(alpha, "alpha");
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
    detail::require_positive(cprime, "cprime");
    return stable_arcsinh(sin(alpha) * cosh(b) * cosh(cprime) + cosh(a) * sinh(b));
}

} // namespace conelength::hyptrig
