#include <doctest.h>

#include "haj/invariants.hpp"

using namespace haj;

namespace {

const EllipticCurve cm20(Rational(20), Rational(0), "cm20");

struct CmSetup {
    PrecisionCtx ctx;
    WorkingPrecision wp;
    PeriodLatticeData lat;
    CutSystem cuts, shifted;
    BigComplex xi;
    explicit CmSetup(int digits)
        : ctx(digits), wp(ctx), lat(compute_periods(cm20, ctx)), cuts(CutSystem::standard(lat)),
          // the log of (-1, 4) sits on the standard cut, as does the identity map at a crossing
          shifted(CutSystem::standard(lat, lat.omega_alpha * Real("0.0731") + lat.omega_beta * Real("0.0417"))),
          xi(elliptic_log(CurvePoint::exact(Rational(-1), Rational(4)), cm20, lat, ctx)) {}

    BoxSpreadCycle spread(SpreadMap second) const {
        return BoxSpreadCycle{cm20, lat, {SpreadMap::identity(cm20, cuts), std::move(second)}};
    }
};

}  // namespace

TEST_CASE("chi2 of the main CM example") {
    CmSetup s(64);
    const BigComplex& Om = s.lat.omega_alpha;
    auto v = chi2_box(s.spread(SpreadMap::affine(cm20, s.cuts, 1, -s.xi)), Chi2Method::Both, s.ctx);
    REQUIRE(v.method_gap);
    CHECK(*v.method_gap < pow10(-32));
    CHECK(abs(v.value_alpha - (Om * Om / Real(2) - s.xi * Om)) < pow10(-45));
    const BigComplex& Ob = s.lat.omega_beta;
    CHECK(abs(v.value_beta - (Ob * Ob / Real(2) - s.xi * Ob)) < pow10(-45));
    CHECK(v.crossings > 0);
    auto r = chi2_reduce(v, Rational(1), Integer(1000), Integer(10000), s.ctx);
    CHECK(r.verdict == LatticeMembership::Verdict::NoRelationUpTo);
}

TEST_CASE("chi2 vanishing control 2 B(p, p)") {
    CmSetup s(64);
    auto v = chi2_box(s.spread(SpreadMap::identity(cm20, s.shifted)), Chi2Method::Both, s.ctx);
    auto r = chi2_reduce(v, Rational(2), Integer(1000), Integer(10000), s.ctx);
    REQUIRE(r.member());
    for (auto& c : r.coefficients) CHECK(denominator(c) <= 2);
    // B(p, p) alone is half a lattice vector, still zero rationally
    CHECK(chi2_reduce(v, Rational(1), Integer(1000), Integer(10000), s.ctx).member());
}

TEST_CASE("chi2 with a constant second map is the period-weighted log") {
    CmSetup s(64);
    auto v = chi2_box(s.spread(SpreadMap::constant(cm20, s.shifted, s.xi)), Chi2Method::Both, s.ctx);
    CHECK(abs(v.value_alpha - s.lat.omega_alpha * s.xi) < pow10(-45));
    CHECK(abs(v.value_beta - s.lat.omega_beta * s.xi) < pow10(-45));
    auto z = chi2_box(s.spread(SpreadMap::constant(cm20, s.cuts, BigComplex(0))), Chi2Method::Both, s.ctx);
    CHECK(abs(z.value_alpha) < pow10(-45));
    CHECK(abs(z.value_beta) < pow10(-45));
}

TEST_CASE("lattice generators follow the fixed order") {
    CmSetup s(48);
    auto v = chi2_box(s.spread(SpreadMap::constant(cm20, s.cuts, s.xi)), Chi2Method::ClosedForm, s.ctx);
    REQUIRE(v.lattice_gens.size() == 8);
    const BigComplex &a = s.lat.omega_alpha, &b = s.lat.omega_beta;
    std::array<BigComplex, 4> want{a * a, a * b, b * a, b * b};
    for (int k = 0; k < 4; ++k) {
        CHECK(v.lattice_gens[k][0].re == 0);
        CHECK(v.lattice_gens[k][0].im == 0);
        CHECK(abs(v.lattice_gens[k][1] - want[k]) == 0);
        CHECK(abs(v.lattice_gens[4 + k][0] - want[k]) == 0);
        CHECK(v.lattice_gens[4 + k][1].re == 0);
    }
}

TEST_CASE("degenerate square-lattice example is a lattice member") {
    PrecisionCtx ctx(64);
    WorkingPrecision wp(ctx);
    EllipticCurve e2(Rational(8), Rational(1), "e2");
    auto l1 = compute_periods(cm20, ctx), l2 = compute_periods(e2, ctx);
    BigComplex xi = times_i(l2.omega_alpha);
    BoxSpreadCycle sp{cm20, l1,
                      {SpreadMap::identity(cm20, CutSystem::standard(l1)),
                       SpreadMap::constant(e2, CutSystem::standard(l2), xi)}};
    auto v = chi2_box(sp, Chi2Method::Both, ctx);
    CHECK(abs(v.value_alpha - l1.omega_beta * l2.omega_alpha) < pow10(-45));
    CHECK(abs(v.value_beta + l1.omega_alpha * l2.omega_alpha) < pow10(-45));
    auto r = chi2_reduce(v, Rational(1), Integer(1000), Integer(10000), ctx);
    REQUIRE(r.member());
    std::vector<Rational> want(8, Rational(0));
    want[6] = 1;
    want[0] = -1;
    CHECK(r.coefficients == want);
}

TEST_CASE("chi2 raw values move by the lattice under basepoint changes") {
    CmSetup s(48);
    auto sp = s.spread(SpreadMap::affine(cm20, s.cuts, 1, -s.xi));
    const BigComplex &a = s.lat.omega_alpha, &b = s.lat.omega_beta;
    auto v0 = chi2_box(sp, Chi2Method::PathIntegral, s.ctx);
    for (auto [x, y] : {std::pair{"0.31", "0.27"}, {"-0.41", "0.05"}, {"0.77", "-0.62"}, {"1.43", "2.11"}}) {
        Chi2Options o;
        o.basepoint = a * Real(x) + b * Real(y);
        auto v = chi2_box(sp, Chi2Method::PathIntegral, s.ctx, o);
        CHECK(abs(v.value_alpha - v0.value_alpha) < s.ctx.tol() * 1000);
        auto d = lattice_membership({v.raw_alpha - v0.raw_alpha, v.raw_beta - v0.raw_beta}, v.lattice_gens,
                                    Integer(1000), Integer(10000), s.ctx);
        CHECK(d.member());
        BigComplex ra = v.value_alpha, rb = v.value_beta;
        for (int k = 0; k < 8; ++k) {
            ra += v.lattice_gens[k][0] * from_integer(v.correction[k]);
            rb += v.lattice_gens[k][1] * from_integer(v.correction[k]);
        }
        CHECK(abs(ra - v.raw_alpha) < s.ctx.tol() * 1000);
        CHECK(abs(rb - v.raw_beta) < s.ctx.tol() * 1000);
    }
}

TEST_CASE("chi2 is additive over constant second maps") {
    CmSetup s(48);
    CurvePoint q = CurvePoint::exact(Rational(-1), Rational(4));
    CurvePoint q2 = point_mul(Integer(2), q, cm20), q3 = point_mul(Integer(3), q, cm20);
    BigComplex x1 = s.xi, x2 = elliptic_log(q2, cm20, s.lat, s.ctx), x3 = elliptic_log(q3, cm20, s.lat, s.ctx);
    auto path = [&](const BigComplex& c) {
        return chi2_box(s.spread(SpreadMap::constant(cm20, s.shifted, c)), Chi2Method::PathIntegral, s.ctx);
    };
    auto a = path(x1), b = path(x2), c = path(x3);
    // (q) + (2q) - 2(o) ~ (3q) - (o) on the curve
    auto d = lattice_membership({a.raw_alpha + b.raw_alpha - c.raw_alpha, a.raw_beta + b.raw_beta - c.raw_beta},
                                a.lattice_gens, Integer(1000), Integer(10000), s.ctx);
    CHECK(d.member());
    auto e = lattice_membership({a.raw_alpha + a.raw_alpha - b.raw_alpha, a.raw_beta + a.raw_beta - b.raw_beta},
                                a.lattice_gens, Integer(1000), Integer(10000), s.ctx);
    CHECK(e.member());
}

TEST_CASE("Gaussian multipliers on the square lattice") {
    CmSetup s(48);
    auto v = chi2_box(s.spread(SpreadMap::affine(cm20, s.cuts, GaussianInteger(0, 1), s.xi)), Chi2Method::Both,
                      s.ctx);
    const BigComplex& Om = s.lat.omega_alpha;
    BigComplex want = times_i(Om * Om) / Real(2) + s.xi * Om;
    CHECK(abs(v.value_alpha - want) < pow10(-30));
    EllipticCurve e2(Rational(8), Rational(1));
    auto l2 = compute_periods(e2, s.ctx);
    BoxSpreadCycle bad{e2, l2,
                       {SpreadMap::identity(e2, CutSystem::standard(l2)),
                        SpreadMap::affine(e2, CutSystem::standard(l2), GaussianInteger(1, 1), BigComplex(0))}};
    CHECK_THROWS_AS(chi2_box(bad, Chi2Method::PathIntegral, s.ctx), Error);
}

TEST_CASE("chi2 error paths") {
    CmSetup s(48);
    auto sp = s.spread(SpreadMap::affine(cm20, s.cuts, 1, -s.xi));
    sp.maps[0] = SpreadMap::affine(cm20, s.cuts, 2, BigComplex(0));
    try {
        chi2_box(sp, Chi2Method::ClosedForm, s.ctx);
        FAIL("expected MethodUnsupported");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MethodUnsupported);
    }
    // a constant second map on its own cut is ambiguous at every crossing
    auto on_cut = s.spread(SpreadMap::constant(cm20, s.cuts, s.lat.omega_alpha / Real(2)));
    try {
        chi2_box(on_cut, Chi2Method::PathIntegral, s.ctx);
        FAIL("expected CutGrazing");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CutGrazing);
    }
    // a path running along a cut
    Chi2Options o;
    o.basepoint = s.lat.omega_beta / Real(2) + s.lat.omega_alpha * Real("0.1");
    try {
        chi2_box(s.spread(SpreadMap::identity(cm20, s.cuts)), Chi2Method::PathIntegral, s.ctx, o);
        FAIL("expected CutGrazing");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CutGrazing);
    }
}

TEST_CASE("period products of the square lattice span Q<Om^2, i Om^2>") {
    CmSetup s(64);
    auto p = period_products(s.lat, s.lat);
    BigComplex O2 = s.lat.omega_alpha * s.lat.omega_alpha;
    for (auto& x : p) {
        auto m = lattice_membership({x}, {{O2}, {times_i(O2)}}, Integer(10), Integer(100), s.ctx);
        CHECK(m.member());
    }
}

TEST_CASE("classifier cases") {
    PrecisionCtx ctx(64);
    WorkingPrecision wp(ctx);
    auto curve = [](int a, int b) { return EllipticCurve(Rational(a), Rational(b)); };
    auto run = [&](const EllipticCurve& a, const EllipticCurve& b) {
        return classify_case(a, compute_periods(a, ctx), b, compute_periods(b, ctx), Integer(1000), ctx);
    };
    auto sq = run(cm20, cm20);
    CHECK(sq.verdict == ClassifierCase::RankFourCM_Unconditional);
    REQUIRE(sq.cm[0]);
    REQUIRE(sq.isogeny);
    auto hex = run(cm20, curve(0, 4));
    CHECK(hex.verdict == ClassifierCase::OneFactorCM_Unconditional);
    CHECK(hex.cm[1]);
    CHECK_FALSE(hex.isogeny);
    auto mixed = run(cm20, curve(8, 1));
    CHECK(mixed.verdict == ClassifierCase::OneFactorCM_Unconditional);
    CHECK_FALSE(mixed.cm[1]);
    auto generic = run(curve(8, 1), curve(12, 5));
    CHECK(generic.verdict == ClassifierCase::NonIsogenousNonCM_Conditional);
    CHECK_FALSE(generic.cm[0]);
    CHECK_FALSE(generic.cm[1]);
    CHECK_FALSE(generic.isogeny);
    // (g2, g3) -> (16 g2, 64 g3) halves the lattice
    auto iso = run(curve(8, 1), curve(128, 64));
    CHECK(iso.verdict == ClassifierCase::IsogenousNonCM_Unconditional);
    CHECK(iso.isogeny);
}

TEST_CASE("psi2 decision") {
    PrecisionCtx ctx(64);
    CurveRef E = CurveRef::of(cm20);
    PointSymbol p = PointSymbol::named(CurveRef::of(cm20, "E1"), "p");
    PointSymbol o = PointSymbol::base(E);
    auto cyc = [&](const CurvePoint& pt, Rational c) {
        ZeroCycle W({E});
        W.add({PointSymbol::named(E, "q", pt)}, c);
        W.add({o}, -c);
        return W;
    };
    auto nt = psi2_nonvanishing(p, cyc(CurvePoint::exact(Rational(-1), Rational(4)), 1), 16, ctx);
    CHECK(nt.kind == Psi2Verdict::Kind::Nontrivial);
    CHECK(nt.certificate.find("infinite order") != std::string::npos);
    auto tz = psi2_nonvanishing(p, cyc(CurvePoint::exact(Rational(0), Rational(0)), 1), 16, ctx);
    CHECK(tz.kind == Psi2Verdict::Kind::ZeroClass);
    CHECK(tz.torsion->order == 2);
    CHECK(psi2_nonvanishing(p, ZeroCycle({E}), 16, ctx).kind == Psi2Verdict::Kind::ZeroClass);
    auto half = psi2_nonvanishing(p, cyc(CurvePoint::exact(Rational(-1), Rational(4)), Rational(1, 2)), 16, ctx);
    CHECK(half.kind == Psi2Verdict::Kind::Nontrivial);
    CHECK(half.multiple == 2);
}
