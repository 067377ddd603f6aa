#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "hyptrig.hpp"
#include "numeric.hpp"

namespace conelength {

enum class BoundaryKind { cone, cusp, geodesic };

inline const char* to_string(BoundaryKind k) {
    switch (k) {
    case BoundaryKind::cone: return "cone";
    case BoundaryKind::cusp: return "cusp";
    case BoundaryKind::geodesic: return "geodesic";
    }
    return "?";
}

// Signed boundary datum: -theta for a cone point of angle theta, 0 for a cusp,
// the length for a geodesic boundary.
template <class Real>
class GeneralizedLength {
public:
    GeneralizedLength() = default;

    explicit GeneralizedLength(Real lambda) : lambda_(std::move(lambda)) {
        detail::require_finite(lambda_, "generalized length");
        if (!(lambda_ > -detail::pi<Real>()))
            throw DomainError("generalized length must exceed -pi");
    }

    static GeneralizedLength cone(const Real& angle) { return GeneralizedLength(-angle); }
    static GeneralizedLength cusp() { return GeneralizedLength(); }
    static GeneralizedLength geodesic(const Real& length) {
        detail::require_positive(length, "geodesic length");
        return GeneralizedLength(length);
    }

    const Real& value() const noexcept { return lambda_; }

    BoundaryKind kind() const noexcept {
        if (lambda_ < Real(0)) return BoundaryKind::cone;
        if (lambda_ > Real(0)) return BoundaryKind::geodesic;
        return BoundaryKind::cusp;
    }

    bool is_geodesic() const noexcept { return kind() == BoundaryKind::geodesic; }

    Real cone_angle() const { return lambda_ < Real(0) ? Real(-lambda_) : Real(0); }

    friend bool operator==(const GeneralizedLength& a, const GeneralizedLength& b) {
        return a.lambda_ == b.lambda_;
    }

private:
    Real lambda_ = Real(0);
};

namespace pants {

template <class Real>
Real trace(const GeneralizedLength<Real>& lambda) {
    using std::abs;
    using std::cos;
    using std::cosh;
    const Real& l = lambda.value();
    return l > Real(0) ? Real(cosh(l / Real(2))) : Real(cos(abs(l) / Real(2)));
}

template <class Real>
Real sine_trace(const GeneralizedLength<Real>& lambda) {
    using std::abs;
    using std::sin;
    using std::sinh;
    const Real& l = lambda.value();
    return l > Real(0) ? Real(sinh(l / Real(2))) : Real(sin(abs(l) / Real(2)));
}

// Inverse of trace: u in (0, 1) is a cone, u = 1 a cusp, u > 1 a geodesic.
template <class Real>
GeneralizedLength<Real> from_trace(const Real& u) {
    using std::acos;
    detail::require_positive(u, "trace");
    if (u > Real(1)) return GeneralizedLength<Real>(Real(2) * hyptrig::arccosh1p(Real(u - Real(1))));
    if (u < Real(1)) return GeneralizedLength<Real>(Real(-2) * acos(u));
    return GeneralizedLength<Real>();
}

template <class Real>
struct PantsSpec {
    std::array<GeneralizedLength<Real>, 3> cuffs;
};

template <class Real>
struct PantsCoefficients {
    Real m;
    Real s;
    Real U;
    Real V;
};

template <class Real>
PantsCoefficients<Real> coefficients(const GeneralizedLength<Real>& target,
                                     const GeneralizedLength<Real>& companion,
                                     const Real& waist) {
    using std::cosh;
    using std::sinh;
    using std::sqrt;
    detail::require_positive(waist, "waist");
    const Real m = trace(target);
    const Real mc = trace(companion);
    const Real half = waist / Real(2);
    const Real V = (m * cosh(half) + mc) / sinh(half);
    const Real U = sqrt((V - m) * (V + m) + Real(1));
    return {m, sine_trace(target), U, V};
}

template <class Real>
Real perp_between(const GeneralizedLength<Real>& lambda1,
                  const GeneralizedLength<Real>& lambda2,
                  const GeneralizedLength<Real>& lambda3) {
    if (!lambda1.is_geodesic() || !lambda2.is_geodesic())
        throw DomainError("perp_between needs two geodesic cuffs");
    const Real m3 = trace(lambda3);
    const Real s1 = sine_trace(lambda1), s2 = sine_trace(lambda2);
    // cosh h - 1 = (m1 m2 + m3 - s1 s2) / (s1 s2), and m1 m2 - s1 s2 = cosh((l1 - l2)/2).
    using std::cosh;
    const Real num = cosh((lambda1.value() - lambda2.value()) / Real(2)) + m3;
    return hyptrig::arccosh1p(Real(num / (s1 * s2)));
}

template <class Real>
Real self_perp_one(const GeneralizedLength<Real>& lambda1,
                   const GeneralizedLength<Real>& lambda2,
                   const GeneralizedLength<Real>& lambda3) {
    if (!lambda1.is_geodesic()) throw DomainError("self_perp_one needs a geodesic first cuff");
    const Real m1 = trace(lambda1), m2 = trace(lambda2), m3 = trace(lambda3);
    const Real s1 = sine_trace(lambda1);
    return hyptrig::arccosh1p(Real(Real(2) * (m2 * m2 + Real(2) * m1 * m2 * m3 + m3 * m3) / (s1 * s1)));
}

namespace detail_pants {

// Right side minus left side of the implicit equation for l = 1/sinh(h/2);
// strictly increasing in l.
template <class Real>
Real self_perp_residual(const Real& l, const Real& sh1, const Real& m2, const Real& m3) {
    using std::sqrt;
    return l * m2 * sqrt(Real(1) + l * l * m3 * m3) + l * m3 * sqrt(Real(1) + l * l * m2 * m2) - sh1;
}

} // namespace detail_pants

template <class Real>
Real self_perp_two(const GeneralizedLength<Real>& lambda1,
                   const GeneralizedLength<Real>& lambda2,
                   const GeneralizedLength<Real>& lambda3) {
    using std::abs;
    using std::sinh;
    if (!lambda1.is_geodesic()) throw DomainError("self_perp_two needs a geodesic first cuff");
    const Real m2 = trace(lambda2), m3 = trace(lambda3);
    const Real sh1 = sinh(lambda1.value() / Real(2));
    const Real quarter = sinh(lambda1.value() / Real(4));
    const Real k = std::min(m2, m3), K = std::max(m2, m3);
    Real lo = quarter / K, hi = quarter / k;
    if (lo == hi) return Real(2) * hyptrig::stable_arcsinh(Real(Real(1) / lo));
    const Real tol = Real(64) * detail::epsilon<Real>() * hi;
    for (int it = 0; it < 1000 && hi - lo > tol; ++it) {
        const Real mid = (lo + hi) / Real(2);
        if (detail_pants::self_perp_residual(mid, sh1, m2, m3) > Real(0)) hi = mid;
        else lo = mid;
    }
    const Real l = (lo + hi) / Real(2);
    return Real(2) * hyptrig::stable_arcsinh(Real(Real(1) / l));
}

template <class Real>
Real arc_with_displacement(const Real& h, const Real& rhoM, const Real& rhoN) {
    return hyptrig::quad_diagonal(hyptrig::ArcConfiguration<Real>{h, rhoM, rhoN});
}

} // namespace pants
} // namespace conelength
