#include <algorithm>
#include <cmath>

#include <conelength/inversion.hpp>
#include <conelength/teich.hpp>

#include "bc_data.hpp"
#include "support.hpp"

using namespace conelength;
using namespace conelength::inversion;
using support::Mp;
using support::near_rel;

namespace {

using GL = GeneralizedLength<double>;
using Spec = xpiece::XPieceSpec<double>;
using Torus = xpiece::TorusSpec<double>;

Spec make(double ta, double ca, double tb, double cb, double w, double t) {
    return {{GL(ta), GL(ca)}, {GL(tb), GL(cb)}, w, t};
}

double family_ratio(const Spec& s) {
    const double l0 = xpiece::family_length(s, 0), l1 = xpiece::family_length(s, 1), l2 = xpiece::family_length(s, 2);
    return (std::cosh(l2 / 2) - std::cosh(l1 / 2)) / (std::cosh(l1 / 2) - std::cosh(l0 / 2));
}

} // namespace

TEST(CurveBudget, Formula) {
    EXPECT_EQ(curve_budget(1, 1), 32);
    EXPECT_EQ(curve_budget(2, 0), 12);
    for (int g = 0; g <= 6; ++g)
        for (int n = 0; n <= 8; ++n)
            if (!is_exceptional(g, n)) {
                EXPECT_EQ(curve_budget(g, n), 12 * g - 12 + 32 * n);
            }
    for (auto [g, n] : {std::pair{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 0}})
        EXPECT_THROW(curve_budget(g, n), ExceptionalSurface) << g << "," << n;
    EXPECT_THROW(curve_budget(-1, 3), DomainError);
}

TEST(SolveTwist, RoundTrip) {
    const Spec s = make(0.9, -1.1, 1.4, 0.0, 1.2, 0.7);
    const double t = solve_twist(xpiece::family_length(s, 0), xpiece::family_length(s, 1), xpiece::family_length(s, 2), 1.2);
    EXPECT_NEAR(t, 0.7, 1e-9);
    EXPECT_LE(twist_equation_residual(xpiece::family_length(s, 0), xpiece::family_length(s, 1),
                                      xpiece::family_length(s, 2), 1.2, t),
              1e-10);
}

TEST(SolveTwist, SymmetricAndDegenerate) {
    const Spec sym = make(0.9, -1.1, 1.4, 0.0, 1.2, -1.0);
    const double l0 = xpiece::family_length(sym, 0), l1 = xpiece::family_length(sym, 1), l2 = xpiece::family_length(sym, 2);
    EXPECT_NEAR(l0, l2, 1e-13);
    EXPECT_NEAR(solve_twist(l0, l1, l2, 1.2), -1.0, 1e-9);
    const Spec half = make(0.9, -1.1, 1.4, 0.0, 1.2, -0.5);
    EXPECT_THROW(solve_twist(xpiece::family_length(half, 0), xpiece::family_length(half, 1),
                             xpiece::family_length(half, 2), 1.2),
                 DegenerateInput);
    EXPECT_THROW(solve_twist(3.0, 4.0, 2 * std::acosh(2 * std::cosh(2.0) - std::cosh(1.5)), 1.0), InconsistentSpectrum);
    EXPECT_THROW(solve_twist(3.0, 4.0, 5.0, -1.0), DomainError);
}

TEST(SolveTwist, RandomRoundTrips) {
    auto g = support::rng(51);
    for (int i = 0; i < 500; ++i) {
        const double w = support::uniform(g, 0.1, 5), t = support::uniform(g, -3, 3);
        if (std::abs(t + 0.5) < 1e-3) continue;
        const Spec s = make(support::uniform(g, -3, 3), support::uniform(g, -3, 3), support::uniform(g, -3, 3),
                            support::uniform(g, -3, 3), w, t);
        const double l0 = xpiece::family_length(s, 0), l1 = xpiece::family_length(s, 1), l2 = xpiece::family_length(s, 2);
        const double u = t * w + w / 2, r = std::sinh(u + w) / std::sinh(u);
        const double kappa = std::cosh(std::max(l0, l2) / 2) / std::abs(std::cosh(l1 / 2) - std::cosh(l0 / 2));
        const double tol = 1e-13 + 1e-14 * kappa * std::abs(r) * std::sinh(u) * std::sinh(u) / (w * std::sinh(w));
        const double got = solve_twist(l0, l1, l2, w);
        EXPECT_NEAR(got, t, tol) << "w " << w << " t " << t;
        EXPECT_LE(twist_equation_residual(l0, l1, l2, w, got), 1e-9);
    }
}

TEST(SolveTwist, RatioMonotoneOnEachBranch) {
    for (double w : {0.2, 1.0, 3.5}) {
        double prev = 0;
        bool first = true;
        for (double t = -0.49; t < 3; t += 0.01) {
            const double r = family_ratio(make(1, -1, 0.5, 0, w, t));
            if (!first) {
                EXPECT_LT(r, prev) << w << " " << t;
            }
            prev = r;
            first = false;
        }
        first = true;
        for (double t = -3; t < -0.51; t += 0.01) {
            const double r = family_ratio(make(1, -1, 0.5, 0, w, t));
            if (!first) {
                EXPECT_LT(r, prev) << w << " " << t;
            }
            prev = r;
            first = false;
        }
    }
}

TEST(SolveTorusTwist, RoundTripSymmetricDegenerate) {
    const Torus s{1.1, GL(-2.0), -0.3};
    const double l0 = xpiece::torus_family_length(s, 0), l1 = xpiece::torus_family_length(s, 1),
                 l2 = xpiece::torus_family_length(s, 2);
    EXPECT_NEAR(solve_torus_twist(l0, l1, l2, 1.1), -0.3, 1e-9);
    EXPECT_LE(twist_equation_residual(l0, l1, l2, 1.1, -0.3, true), 1e-10);
    const Torus sym{1.1, GL(-2.0), -1.0};
    EXPECT_NEAR(solve_torus_twist(xpiece::torus_family_length(sym, 0), xpiece::torus_family_length(sym, 1),
                                  xpiece::torus_family_length(sym, 2), 1.1),
                -1.0, 1e-9);
    const Torus half{1.1, GL(-2.0), -0.5};
    EXPECT_THROW(solve_torus_twist(xpiece::torus_family_length(half, 0), xpiece::torus_family_length(half, 1),
                                   xpiece::torus_family_length(half, 2), 1.1),
                 DegenerateInput);
}

TEST(RecoverTorusAngle, RoundTrips) {
    for (double lambda : {-2.0, 0.0, 1.5, -0.3, 2.9}) {
        const Torus s{0.9, GL(lambda), 0.4};
        const auto got = recover_torus_angle(0.9, xpiece::torus_family_length(s, 0), 0.4);
        EXPECT_NEAR(got.value(), lambda, 1e-7) << lambda;
    }
    const Torus cusp{0.9, GL(), 0.0};
    EXPECT_NEAR(recover_torus_angle(0.9, xpiece::torus_family_length(cusp, 0), 0.0).value(), 0.0, 1e-6);
    EXPECT_THROW(recover_torus_angle(0.9, 0.2, 0.0), InconsistentSpectrum);
}

TEST(BCSystem, SyntheticRecovery) {
    using oracle::R;
    const R u = cos(R("0.6")), up = cos(R("0.2")), m3 = cosh(R("0.65")), m3p = cosh(R("0.4"));
    const auto rows = bc_data::synthetic_rows<double>(u, up, m3, m3p, {0.6, 1.4, 2.3, 3.2}, {0.3, -1.2, 0.8, 0.1});
    const auto sol = solve_bc_system(rows);
    const auto k = oracle::bc_unknowns(u, up, m3, m3p);
    EXPECT_TRUE(near_rel(sol.unknowns.S, static_cast<double>(k.S), 1e-6));
    EXPECT_TRUE(near_rel(sol.unknowns.T, static_cast<double>(k.T), 1e-6));
    EXPECT_TRUE(near_rel(sol.unknowns.Q, static_cast<double>(k.Q), 1e-6));
    EXPECT_TRUE(near_rel(sol.unknowns.P, static_cast<double>(k.P), 1e-6));
    EXPECT_GT(sol.condition, 1.0);
    EXPECT_LE(sol.residual, 1e-8);

    const auto pair = recover_cone_pair(sol.unknowns, static_cast<double>(m3), static_cast<double>(m3p));
    EXPECT_NEAR(pair.first.value(), -1.2, 1e-6);
    EXPECT_NEAR(pair.second.value(), -0.4, 1e-6);
    ASSERT_TRUE(pair.labeled.has_value());
    EXPECT_NEAR(pair.labeled->first.value(), -1.2, 1e-6);
}

TEST(BCSystem, RepeatedNodeIsSingular) {
    using oracle::R;
    const auto rows = bc_data::synthetic_rows<double>(R("0.5"), R("0.9"), R(2), R(3), {0.6, 1.4, 1.4, 3.2}, {0.3, 0.2, 0.5, 0.1});
    EXPECT_THROW(solve_bc_system(rows), SingularSystem);
}

TEST(ConePair, FromExactUnknowns) {
    const auto k = bc_unknowns(std::cos(0.6), std::cos(0.2), std::cosh(0.7), std::cosh(1.1));
    const auto p = recover_cone_pair(k, std::cosh(0.7), std::cosh(1.1));
    EXPECT_NEAR(p.first.value(), -1.2, 1e-9);
    EXPECT_NEAR(p.second.value(), -0.4, 1e-9);
    EXPECT_LE(p.first.value(), p.second.value());
}

TEST(ConePair, SwapInvariance) {
    auto g = support::rng(52);
    for (int i = 0; i < 200; ++i) {
        const double u = support::uniform(g, 0.05, 3), up = support::uniform(g, 0.05, 3);
        const double m3 = support::uniform(g, 1.01, 4), m3p = support::uniform(g, 1.01, 4);
        const auto a = recover_cone_pair(bc_unknowns(u, up, m3, m3p), m3, m3p);
        const auto b = recover_cone_pair(bc_unknowns(up, u, m3p, m3), m3p, m3);
        EXPECT_NEAR(a.first.value(), b.first.value(), 1e-9);
        EXPECT_NEAR(a.second.value(), b.second.value(), 1e-9);
        EXPECT_NEAR(a.first.value(), pants::from_trace(std::min(u, up)).value(), 1e-6);
    }
}

TEST(ConePair, EqualAndCuspPairs) {
    const Mp m3 = cosh(Mp("0.9"));
    const Mp u = cos(Mp("0.45"));
    const auto eq = recover_cone_pair(bc_unknowns(u, u, m3, m3), m3, m3);
    EXPECT_LE(abs(eq.first.value() + Mp("0.9")), Mp(1e-6));
    EXPECT_LE(abs(eq.second.value() + Mp("0.9")), Mp(1e-6));
    const Mp m3p = cosh(Mp("1.3"));
    const auto cusp = recover_cone_pair(bc_unknowns(Mp(1), Mp(1), m3, m3p), m3, m3p);
    EXPECT_LE(abs(cusp.first.value()), Mp(1e-6));
    EXPECT_LE(abs(cusp.second.value()), Mp(1e-6));
    EXPECT_EQ(cusp.candidates.size(), 1u);
}

TEST(ConePair, InconsistentUnknowns) {
    auto k = bc_unknowns(std::cos(0.6), std::cos(0.2), std::cosh(0.7), std::cosh(1.1));
    k.T *= 1.1;
    EXPECT_THROW(recover_cone_pair(k, std::cosh(0.7), std::cosh(1.1)), InconsistentSpectrum);
}

TEST(BCSystem, ForwardGeneratedXPiece) {
    const xpiece::XPieceSpec<Mp> s{{GeneralizedLength<Mp>(Mp("1.3")), GeneralizedLength<Mp>(Mp("-1.2"))},
                                   {GeneralizedLength<Mp>(Mp("0.8")), GeneralizedLength<Mp>(Mp("-0.4"))},
                                   Mp("1.0"),
                                   Mp("0.3")};
    const auto rows = bc_data::forward_rows(s);
    ASSERT_GE(rows.size(), 4u);
    const auto sol = solve_bc_system(detail_inv::best_rows(rows));
    const auto pair = recover_cone_pair(sol.unknowns, pants::trace(s.pantsA.target), pants::trace(s.pantsB.target));
    EXPECT_LE(abs(pair.first.value() + Mp("1.2")), Mp(1e-6));
    EXPECT_LE(abs(pair.second.value() + Mp("0.4")), Mp(1e-6));
}

TEST(RecoverSurface, OneHoledTorus) {
    Topology topo;
    topo.genus = 1;
    topo.boundary_count = 1;
    topo.pants = {{Cuff::curve(0), Cuff::curve(0), Cuff::boundary(0)}};
    for (double lambda : {-2.0, 0.0, 1.2}) {
        const SurfaceFN<double> X(topo, {GL(lambda)}, {1.3}, {0.45});
        const auto spec = forward_spectrum(X);
        const auto rec = recover_surface_detailed(topo, spec);
        EXPECT_NEAR(rec.surface.boundaries()[0].value(), lambda, 1e-6);
        EXPECT_NEAR(rec.surface.lengths()[0], 1.3, 1e-12);
        EXPECT_NEAR(rec.surface.twists()[0], 0.45, 1e-9);
        EXPECT_LE(static_cast<int>(rec.curves_used), curve_budget(1, 1));
    }
}

TEST(RecoverSurface, GenusTwoOneBoundary) {
    auto g = support::rng(53);
    const auto topo = teich::random_topology(2, 1, g);
    teich::SampleRanges r;
    r.lengthMin = 0.5;
    r.lengthMax = 2.0;
    r.twistMin = -1.0;
    r.twistMax = 1.0;
    const auto X = teich::random_surface<Mp>(topo, g, r);
    const auto rec = recover_surface_detailed(topo, forward_spectrum(X));
    EXPECT_LE(abs(rec.surface.boundaries()[0].value() - X.boundaries()[0].value()), Mp(1e-6));
    for (int j = 0; j < topo.curve_count(); ++j) {
        EXPECT_LE(abs(rec.surface.lengths()[j] - X.lengths()[j]), Mp(1e-6));
        EXPECT_LE(abs(rec.surface.twists()[j] - X.twists()[j]), Mp(1e-9));
    }
    EXPECT_LE(static_cast<int>(rec.curves_used), curve_budget(2, 1));
}

TEST(RecoverSurface, MissingCurvesAreNamed) {
    Topology topo;
    topo.genus = 1;
    topo.boundary_count = 1;
    topo.pants = {{Cuff::curve(0), Cuff::curve(0), Cuff::boundary(0)}};
    const SurfaceFN<double> X(topo, {GL(-1.0)}, {1.3}, {0.45});
    auto full = forward_spectrum(X);
    LengthSpectrum<double> partial;
    for (const auto& [id, l] : full.entries())
        if (!(id == CurveId::twist(0, 2))) partial.insert(id, l);
    try {
        recover_surface(topo, partial);
        FAIL() << "expected MissingCurves";
    } catch (const MissingCurves& e) {
        ASSERT_EQ(e.curves().size(), 1u);
        EXPECT_EQ(e.curves()[0], "T0[2]");
    }
}

TEST(RecoverSurface, DistinctSurfacesHaveDistinctSpectra) {
    auto g = support::rng(54);
    for (int i = 0; i < 50; ++i) {
        const auto topo = teich::random_topology(1 + i % 2, 1 + i % 3, g);
        const auto a = teich::random_surface<double>(topo, g), b = teich::random_surface<double>(topo, g);
        const auto sa = forward_spectrum(a), sb = forward_spectrum(b);
        double worst = 0;
        for (const auto& [id, l] : sa.entries()) worst = std::max(worst, std::abs(l - sb.at(id)) / l);
        EXPECT_GT(worst, 1e-8);
    }
}

TEST(ConePair, TargetsMustBeGeodesic) {
    const auto k = bc_unknowns(0.8, 0.9, 1.0, std::cosh(0.5));
    EXPECT_THROW(recover_cone_pair(k, 1.0, std::cosh(0.5)), DomainError);
    EXPECT_THROW(recover_cone_pair(k, std::cosh(0.5), 0.7), DomainError);
}

TEST(ConePair, CuspCompanionNearDoubleRoot) {
    using oracle::R;
    const R m3 = cosh(R("0.087259") / 2), m3p = cosh(R("0.0891542") / 2);
    const auto rows = bc_data::synthetic_rows<Mp>(R(1), R(1), m3, m3p, {0.6, 1.5, 2.5, 3.6}, {0.4, -1.1, 2.0, -2.5});
    const auto sol = solve_bc_system(rows);
    const auto p = recover_cone_pair(sol.unknowns, bc_data::from_oracle<Mp>(m3), bc_data::from_oracle<Mp>(m3p));
    EXPECT_LE(abs(p.first.value()), Mp(1e-6));
    EXPECT_LE(abs(p.second.value()), Mp(1e-6));
}

TEST(RecoverSurface, TwiceHoledTorusLabelsAreExchangeable) {
    auto g = support::rng(55);
    const auto topo = teich::random_topology(1, 2, g);
    const auto X = teich::random_surface<double>(topo, g);
    auto b = X.boundaries();
    std::swap(b[0], b[1]);
    const auto Y = X.with_boundaries(b);
    const auto ids = teich::standard_curve_set(topo, 10);
    const auto a = CurveEvaluator<double>(X).lengths(ids), c = CurveEvaluator<double>(Y).lengths(ids);
    for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_NEAR(a[i], c[i], 1e-12 * a[i]) << ids[i].str();

    const auto rec = recover_surface_detailed(topo, forward_spectrum(teich::random_surface<Mp>(topo, g)));
    ASSERT_EQ(rec.ambiguous.size(), 1u);
    EXPECT_EQ(rec.ambiguous[0], std::make_pair(0, 1));
}
