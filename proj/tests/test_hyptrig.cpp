#include <cmath>
#include <numbers>

#include <conelength/hyptrig.hpp>

#include "oracle.hpp"
#include "support.hpp"

using namespace conelength;
using namespace conelength::hyptrig;
using support::Mp;
using support::near_rel;

namespace {

constexpr double pi = std::numbers::pi;

// Reference values from tests/oracle.hpp at 60 digits.
struct Frozen {
    const char* trirect = "0.6782070579566869595975268797137008797309";
    const char* penopp = "1.50914670455464412589163043219118784205";
    const char* penang = "2.120561877457053699455727442429952623569";
    const char* hex1 = "2.440738047573126965028977773232085366832";
    const char* hex2 = "2.50324542887041251777500746647661384025";
    const char* qdiag = "1.942361700209511411301971499362690650192";
    const char* qang1 = "1.851081949119219858226495347149020342885";
    const char* qang2 = "0.5491213742106370809754152728950646740688";
    const char* qbase1 = "1.475214396032679183069394093858264793775";
    const char* qbase2 = "1.667564175959016686668728713272732151955";
    const char* p4a = "0.9004321664371169518596407182754301964422";
    const char* p4b = "1.298666919223422317296245910699223738545";
    const char* sp1 = "1.425362938202564311811650841950080583759";
    const char* sp2 = "1.644494717163197243528613730753525545179";
    const char* acosh37 = "1.982696944681203303873443591070053376718";
} const ref;

double d(const char* s) { return std::stod(s); }

} // namespace

TEST(Trirectangle, Values) {
    EXPECT_NEAR(trirectangle_angle(1e-8, 1.0), pi / 2, 1e-6);
    EXPECT_NEAR(trirectangle_angle(std::asinh(0.5), std::asinh(1.0)), pi / 3, 1e-14);
    EXPECT_TRUE(near_rel(trirectangle_angle(0.7, 0.9), d(ref.trirect), 1e-12));
    EXPECT_TRUE(near_rel(trirectangle_angle(Mp("0.7"), Mp("0.9")), ref.trirect, 1e-35));
}

TEST(Trirectangle, Degenerate) {
    EXPECT_THROW(trirectangle_angle(1.0, 1.0), DegenerateConfiguration);
    EXPECT_THROW(trirectangle_angle(-1.0, 0.5), DomainError);
    EXPECT_THROW(trirectangle_angle(std::nan(""), 0.5), DomainError);
}

TEST(Pentagon, Opposite) {
    const double a = 1.3, b = 1.1;
    EXPECT_NEAR(pentagon_opposite(a, b, pi / 2), std::acosh(std::sinh(a) * std::sinh(b)), 1e-14);
    EXPECT_TRUE(near_rel(pentagon_opposite(1.0, 1.0, 2.0), d(ref.penopp), 1e-12));
    EXPECT_TRUE(near_rel(pentagon_opposite(Mp(1), Mp(1), Mp(2)), ref.penopp, 1e-35));
    EXPECT_THROW(pentagon_opposite(0.3, 0.3, 0.5), DegenerateConfiguration);
    EXPECT_THROW(pentagon_opposite(1.0, 1.0, pi), DomainError);
}

TEST(Pentagon, Angle) {
    EXPECT_NEAR(pentagon_angle(0.8, 0.8, 1e-7), pi, 1e-6);
    EXPECT_THROW(pentagon_angle(0.8, 0.8, 1e-9), DegenerateConfiguration);
    EXPECT_TRUE(near_rel(pentagon_angle(1.2, 0.9, 0.8), d(ref.penang), 1e-12));
    EXPECT_TRUE(near_rel(pentagon_angle(Mp("1.2"), Mp("0.9"), Mp("0.8")), ref.penang, 1e-35));
    EXPECT_THROW(pentagon_angle(3.0, 3.0, 3.0), DegenerateConfiguration);
}

TEST(Pentagon, InversePair) {
    auto g = support::rng(11);
    int checked = 0;
    while (checked < 500) {
        const double al = support::uniform(g, 0.2, 3.0), be = support::uniform(g, 0.2, 3.0);
        const double th = support::uniform(g, 0.05, pi - 0.05);
        const double rhs = -std::cosh(al) * std::cosh(be) * std::cos(th) + std::sinh(al) * std::sinh(be);
        if (rhs < 1.01) continue;
        const auto p = oracle::pentagon_sides(oracle::R(al), oracle::R(be), oracle::R(th));
        const double c = pentagon_opposite(al, be, th);
        ASSERT_TRUE(near_rel(c, static_cast<double>(p.c), 1e-10));
        EXPECT_NEAR(pentagon_angle(static_cast<double>(p.a), static_cast<double>(p.b), c), th, 1e-10);
        ++checked;
    }
}

TEST(Hexagon, Values) {
    EXPECT_TRUE(near_rel(hexagon_side(1.0, 1.5, 2.0), d(ref.hex1), 1e-12));
    EXPECT_TRUE(near_rel(hexagon_side(0.8, 0.8, 3.0), d(ref.hex2), 1e-12));
    EXPECT_TRUE(near_rel(hexagon_side(Mp("0.8"), Mp("0.8"), Mp(3)), ref.hex2, 1e-35));
    EXPECT_THROW(hexagon_side(0.5, 0.5, 0.5), DegenerateConfiguration);
}

TEST(Hexagon, MonotoneInGamma) {
    double prev = 0;
    for (double gam = 2.0; gam < 40.0; gam += 0.5) {
        const double c = hexagon_side(1.2, 1.2, gam);
        EXPECT_GT(c, prev);
        prev = c;
    }
    EXPECT_NEAR(hexagon_side(1.2, 1.2, 40.0), 40.0 + 2 * std::log(std::sinh(1.2)), 1e-9);
}

TEST(QuadDiagonal, Values) {
    EXPECT_DOUBLE_EQ(quad_diagonal(ArcConfiguration<double>{1.7, 0, 0}), 1.7);
    EXPECT_NEAR(quad_diagonal(ArcConfiguration<double>{1e-9, 0.6, 0.6}), 0, 1e-8);
    EXPECT_TRUE(near_rel(quad_diagonal(ArcConfiguration<double>{1.5, 0.3, -0.8}), d(ref.qdiag), 1e-12));
    EXPECT_TRUE(near_rel(quad_diagonal(ArcConfiguration<Mp>{Mp("1.5"), Mp("0.3"), Mp("-0.8")}), ref.qdiag, 1e-35));
    EXPECT_THROW(quad_diagonal(ArcConfiguration<double>{0, 1, 1}), DomainError);
}

TEST(QuadDiagonal, IncreasingInDisplacement) {
    double prev = quad_diagonal(ArcConfiguration<double>{0.9, 0, 0});
    for (double r = 0.1; r < 5; r += 0.1) {
        const double up = quad_diagonal(ArcConfiguration<double>{0.9, r, 0});
        const double down = quad_diagonal(ArcConfiguration<double>{0.9, -r, 0});
        EXPECT_GT(up, prev);
        EXPECT_DOUBLE_EQ(up, down);
        prev = up;
    }
}

TEST(QuadAngle, Values) {
    EXPECT_NEAR(quad_angle(pi / 2, 0.8, 0.0), pi / 2, 1e-15);
    EXPECT_TRUE(near_rel(quad_angle(1.0, 0.5, 0.7), d(ref.qang1), 1e-12));
    EXPECT_TRUE(near_rel(quad_angle(2.0, 0.3, -1.2), d(ref.qang2), 1e-12));
    EXPECT_TRUE(near_rel(quad_angle(Mp(2), Mp("0.3"), Mp("-1.2")), ref.qang2, 1e-35));
    EXPECT_THROW(quad_angle(1.0, 3.0, 3.0), DegenerateConfiguration);
}

TEST(QuadBase, Values) {
    EXPECT_NEAR(quad_base(pi / 2, pi / 2, 1.3), 1.3, 1e-14);
    EXPECT_TRUE(near_rel(quad_base(1.4, 1.5, 1.5), d(ref.qbase1), 1e-12));
    EXPECT_TRUE(near_rel(quad_base(2.0, 0.8, 2.0), d(ref.qbase2), 1e-12));
    EXPECT_TRUE(near_rel(quad_base(Mp("1.4"), Mp("1.5"), Mp("1.5")), ref.qbase1, 1e-35));
    EXPECT_THROW(quad_base(0.2, 0.2, 0.1), DegenerateConfiguration);
}

TEST(QuadBase, ConsistentWithQuadAngle) {
    // Symmetric quadrilateral with base c and equal legs rho: both summit angles
    // equal beta, so the angle identity has beta as a fixed point, and the base
    // identity must return c from (beta, beta, d).
    for (double c : {0.3, 0.9, 1.7}) {
        for (double rho : {0.2, 0.8, 1.5}) {
            const double d = quad_diagonal(ArcConfiguration<double>{c, rho, rho});
            const double beta = std::atan2(1.0, std::sinh(rho) * std::tanh(c / 2));
            EXPECT_NEAR(quad_angle(beta, c, rho), beta, 1e-12);
            EXPECT_NEAR(quad_base(beta, beta, d), c, 1e-10);
        }
    }
}

TEST(Pentagon4, Values) {
    const double a = 1.1, bp = 1.4;
    EXPECT_NEAR(pentagon4_side(pi / 2, a, bp), pentagon_opposite(a, bp, pi / 2), 1e-14);
    EXPECT_TRUE(near_rel(pentagon4_side(1.0, 1.5, 1.2), d(ref.p4a), 1e-12));
    EXPECT_TRUE(near_rel(pentagon4_side(2.5, 0.9, 1.1), d(ref.p4b), 1e-12));
    EXPECT_TRUE(near_rel(pentagon4_side(Mp("2.5"), Mp("0.9"), Mp("1.1")), ref.p4b, 1e-35));
    EXPECT_THROW(pentagon4_side(0.3, 0.2, 0.2), DegenerateConfiguration);
}

TEST(SelfPentagon, SinAlphaReading) {
    EXPECT_EQ(self_pentagon_reading, SelfPentagonReading::sin_alpha);
    const double al = 0.9, cp = 0.6;
    EXPECT_NEAR(selfpentagon_side(al, 0.5, 1e-12, cp), std::asinh(std::sin(al) * std::cosh(cp)), 1e-11);
    EXPECT_TRUE(near_rel(selfpentagon_side(1.0, 0.5, 0.7, 0.3), d(ref.sp1), 1e-12));
    EXPECT_TRUE(near_rel(selfpentagon_side(2.0, 1.0, 0.2, 1.5), d(ref.sp2), 1e-12));
    EXPECT_TRUE(near_rel(selfpentagon_side(Mp(1), Mp("0.5"), Mp("0.7"), Mp("0.3")), ref.sp1, 1e-35));
}

TEST(StableArccosh, Values) {
    EXPECT_EQ(stable_arccosh(1.0), 0.0);
    EXPECT_TRUE(near_rel(stable_arccosh(1e10), std::log(2e10), 1e-14));
    EXPECT_TRUE(near_rel(stable_arccosh(1e300), std::log(2.0) + 300 * std::log(10.0), 1e-14));
    EXPECT_TRUE(near_rel(stable_arccosh(3.7), d(ref.acosh37), 1e-14));
    EXPECT_TRUE(near_rel(stable_arccosh(Mp("3.7")), ref.acosh37, 1e-35));
    EXPECT_EQ(stable_arccosh(1.0 - 1e-13), 0.0);
    EXPECT_THROW(stable_arccosh(1.0 - 1e-9), DomainError);
}

TEST(StableArccosh, RelativeAccuracySweep) {
    for (double e = -15; e < 300; e += 0.37) {
        const double x = 1 + std::pow(10.0, e);
        const double exact = static_cast<double>(oracle::acosh(oracle::R(x)));
        EXPECT_TRUE(near_rel(stable_arccosh(x), exact, 1e-14)) << "x = " << x;
    }
}

TEST(Comparisons, QuadDiagonalUnderBaseChange) {
    // For (cosh c - 1)/(cosh c' - 1) in [1/C, C]: the diagonals differ by at most
    // arccosh C and their ratio lies in [1/C, C].
    auto g = support::rng(5);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const double c = support::uniform(g, 0.01, 4), cp = support::uniform(g, 0.01, 4);
        const double r1 = support::uniform(g, -4, 4), r2 = support::uniform(g, -4, 4);
        const double q = (std::cosh(c) - 1) / (std::cosh(cp) - 1);
        const double C = std::max(q, 1 / q) * (1 + 1e-12);
        const double d1 = quad_diagonal(ArcConfiguration<double>{c, r1, r2});
        const double d2 = quad_diagonal(ArcConfiguration<double>{cp, r1, r2});
        if (std::abs(d1 - d2) > std::acosh(C) + 1e-12) ++violations;
        if (d1 / d2 > C || d2 / d1 > C) ++violations;
    }
    EXPECT_EQ(violations, 0);
}

TEST(Comparisons, CoshAndSinhRatios) {
    auto g = support::rng(6);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const double x = support::uniform(g, 1e-3, 8), y = support::uniform(g, 1e-3, 8);
        const double qc = std::cosh(x) / std::cosh(y), qs = std::sinh(x) / std::sinh(y);
        const double Cc = std::max(qc, 1 / qc) * (1 + 1e-12), Cs = std::max(qs, 1 / qs) * (1 + 1e-12);
        if (std::abs(x - y) > std::acosh(Cc) + 1e-12) ++violations;
        if (x / y > Cs || y / x > Cs) ++violations;
    }
    EXPECT_EQ(violations, 0);
}

TEST(Comparisons, MonotoneInBase) {
    auto g = support::rng(7);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        double c = support::uniform(g, 0.01, 4), cp = support::uniform(g, 0.01, 4);
        if (c > cp) std::swap(c, cp);
        const double r1 = support::uniform(g, -4, 4), r2 = support::uniform(g, -4, 4);
        auto f = [&](double base) {
            return std::cosh(r1) * std::cosh(r2) * std::cosh(base) - std::sinh(r1) * std::sinh(r2);
        };
        const double q = (std::cosh(c) - 1) / (std::cosh(cp) - 1);
        if (f(c) / f(cp) < q * (1 - 1e-12)) ++violations;
        if ((f(c) * f(c) - 1) / (f(cp) * f(cp) - 1) < q * q * (1 - 1e-10)) ++violations;
    }
    EXPECT_EQ(violations, 0);
}
