#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

#include "errors.hpp"

namespace conelength::detail {

template <class Real>
Real pi() {
    if constexpr (std::is_floating_point_v<Real>) {
        return std::numbers::pi_v<Real>;
    } else {
        using std::acos;
        static const Real value = acos(Real(-1));
        return value;
    }
}

template <class Real>
Real epsilon() {
    return std::numeric_limits<Real>::epsilon();
}

template <class Real>
bool is_finite(const Real& x) {
    using std::isfinite;
    return static_cast<bool>(isfinite(x));
}

template <class Real>
Real log1p(const Real& x) {
    if constexpr (std::is_floating_point_v<Real>) {
        return std::log1p(x);
    } else {
        using std::log;
        const Real u = Real(1) + x;
        if (u == Real(1)) return x;
        return log(u) * x / (u - Real(1));
    }
}

template <class Real>
Real expm1(const Real& x) {
    if constexpr (std::is_floating_point_v<Real>) {
        return std::expm1(x);
    } else {
        using std::exp;
        using std::log;
        const Real u = exp(x);
        if (u == Real(1)) return x;
        const Real um1 = u - Real(1);
        if (um1 == Real(-1)) return Real(-1);
        return um1 * x / log(u);
    }
}

template <class Real>
Real sign(const Real& x) {
    return x < Real(0) ? Real(-1) : Real(1);
}

// log(cosh x) without overflow.
template <class Real>
Real log_cosh(const Real& x) {
    using std::abs;
    using std::exp;
    using std::log;
    const Real a = abs(x);
    return a + log1p(exp(-2 * a)) - log(Real(2));
}

inline double to_double(double x) { return x; }

template <class Real>
double to_double(const Real& x) {
    return static_cast<double>(x);
}

template <class Real>
void require_finite(const Real& x, const char* name) {
    if (!is_finite(x)) throw DomainError(std::string(name) + " must be finite");
}

template <class Real>
void require_positive(const Real& x, const char* name) {
    require_finite(x, name);
    if (!(x > Real(0))) throw DomainError(std::string(name) + " must be > 0");
}

constexpr double clamp_window = 1e-12;

} // namespace conelength::detail
