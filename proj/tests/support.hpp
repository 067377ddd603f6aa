#pragma once

#include <cmath>
#include <random>
#include <string>

#include <boost/multiprecision/mpfr.hpp>
#include <gtest/gtest.h>

namespace support {

using Mp = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<100>,
                                         boost::multiprecision::et_off>;

inline double rel(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline ::testing::AssertionResult near_rel(double got, double want, double tol) {
    if (rel(got, want) <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "got " << got << " want " << want << " relative error "
                                         << rel(got, want) << " > " << tol;
}

inline ::testing::AssertionResult near_rel(const Mp& got, const std::string& want, double tol) {
    const Mp w(want);
    const Mp e = abs(got - w) / abs(w);
    if (e <= Mp(tol)) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "got " << got.str(45) << " want " << want << " relative error "
                                         << e.str(5);
}

inline std::mt19937_64 rng(unsigned seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(g);
}

} // namespace support
