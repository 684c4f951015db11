// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include "haj/invariants.hpp"
#include "haj/milnor.hpp"
#include "haj/relations.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace haj;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const Error& e) {
        o = {false, std::string("error ") + to_string(e.kind()) + ": " + e.what()};
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(const Real& x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x.convert_to<double>();
    if (x != 0 && x.convert_to<double>() == 0) {
        // below double range
        std::ostringstream big;
        big.precision(3);
        big << std::scientific << x;
        return big.str();
    }
    return os.str();
}

const EllipticCurve cm20(Rational(20), Rational(0), "cm20");
const EllipticCurve e81(Rational(8), Rational(1), "e81");
const EllipticCurve e125(Rational(12), Rational(5), "e125");

struct CmSetup {
    PrecisionCtx ctx;
    WorkingPrecision wp;
    PeriodLatticeData lat;
    CutSystem cuts, shifted;
    BigComplex xi;
    explicit CmSetup(int digits)
        : ctx(digits), wp(ctx), lat(compute_periods(cm20, ctx)), cuts(CutSystem::standard(lat)),
          shifted(CutSystem::standard(lat, lat.omega_alpha * Real("0.0731") + lat.omega_beta * Real("0.0417"))),
          xi(elliptic_log(CurvePoint::exact(Rational(-1), Rational(4)), cm20, lat, ctx)) {}

    BoxSpreadCycle spread(SpreadMap second) const {
        return BoxSpreadCycle{cm20, lat, {SpreadMap::identity(cm20, cuts), std::move(second)}};
    }
};

std::string coeffs(const std::vector<Rational>& c) {
    std::string s = "[";
    for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + c[k].str();
    return s + "]";
}

const Poly t = Poly::x();

RationalFunc random_func(std::mt19937& rng, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg), coef(-5, 5);
    auto poly = [&] {
        int d = deg(rng);
        std::vector<Rational> c;
        for (int k = 0; k <= d; ++k) c.push_back(coef(rng));
        if (c.back() == 0) c.back() = 1;
        return Poly(c);
    };
    for (;;) {
        Poly n = poly(), d = poly();
        if (!n.is_zero() && !d.is_zero()) return RationalFunc(n, d);
    }
}

// property-suite pieces; each returns an empty string on success
using Suite = std::function<std::string()>;

std::string eisenstein_suite() {
    PrecisionCtx ctx(64);
    WorkingPrecision wp(ctx);
    const int data[10][2] = {{20, 0}, {0, 4}, {8, 1}, {12, 5}, {1, -1}, {-3, 7}, {5, 2}, {-11, -6}, {30, 3}, {2, 9}};
    for (auto& g : data) {
        EllipticCurve E{Rational(g[0]), Rational(g[1])};
        auto chk = eisenstein_reconstruct(compute_periods(E, ctx), E, ctx);
        if (!(chk.error < pow10(-ctx.digits / 2))) return "eisenstein error " + sci(chk.error) + " on (" + E.g2.str() + ", " + E.g3.str() + ")";
    }
    return "";
}

std::vector<CurvePoint> point_pool(int range) {
    CurvePoint p = CurvePoint::exact(Rational(-1), Rational(4));
    CurvePoint t2 = CurvePoint::exact(Rational(0), Rational(0));
    std::vector<CurvePoint> pool;
    for (int k = -range; k <= range; ++k) {
        if (k == 0 && range < 4) continue;
        CurvePoint m = point_mul(Integer(k), p, cm20);
        pool.push_back(m);
        pool.push_back(point_add(m, t2, cm20));
    }
    return pool;
}

std::string associativity_suite() {
    auto pool = point_pool(4);
    std::mt19937 rng(17);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int trial = 0; trial < 200; ++trial) {
        const CurvePoint &a = pool[pick(rng)], &b = pool[pick(rng)], &c = pool[pick(rng)];
        if (point_add(point_add(a, b, cm20), c, cm20) != point_add(a, point_add(b, c, cm20), cm20))
            return "associativity fails at trial " + std::to_string(trial);
    }
    return "";
}

std::string homomorphism_suite() {
    PrecisionCtx ctx(48);
    WorkingPrecision wp(ctx);
    auto lat = compute_periods(cm20, ctx);
    auto pool = point_pool(3);
    std::mt19937 rng(23);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int trial = 0; trial < 12; ++trial) {
        const CurvePoint &a = pool[pick(rng)], &b = pool[pick(rng)];
        CurvePoint s = point_add(a, b, cm20);
        BigComplex lhs = s.is_infinity() ? BigComplex(0) : elliptic_log(s, cm20, lat, ctx);
        BigComplex rhs = elliptic_log(a, cm20, lat, ctx) + elliptic_log(b, cm20, lat, ctx);
        if (!(abs(lat.reduce(lhs - rhs)) < ctx.tol() * 100)) return "ellog homomorphism fails";
    }
    return "";
}

bool relation_is(const std::optional<IntegerRelation>& r, std::vector<long> want) {
    if (!r || r->height > 10) return false;
    std::vector<long> got;
    for (auto& x : r->coeffs) got.push_back(x.convert_to<long>());
    for (long x : got)
        if (x != 0) {
            if (x < 0)
                for (auto& y : got) y = -y;
            break;
        }
    return got == want;
}

std::string pslq_suite() {
    PrecisionCtx ctx(64);
    WorkingPrecision wp(ctx);
    Real s2 = sqrt(Real(2)), phi = (1 + sqrt(Real(5))) / 2;
    if (!relation_is(pslq({Real(1), s2, s2 * s2}, Integer(10), ctx), {2, 0, -1})) return "sqrt 2 minimal polynomial";
    if (!relation_is(pslq({Real(1), phi, phi * phi}, Integer(10), ctx), {1, 1, -1})) return "golden ratio minimal polynomial";
    return "";
}

std::string lattice_suite() {
    PrecisionCtx ctx(64);
    WorkingPrecision wp(ctx);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-2, 2);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<BigComplex>> gens;
        for (int i = 0; i < 4; ++i) {
            Real a = sqrt(Real(2 + i + trial)) * Real(d(rng)), b = log(Real(3 + i * 2 + trial)) * Real(d(rng));
            Real c = cbrt(Real(5 + i + trial)) * Real(d(rng)), e = exp(Real(i + 1) / 3) * Real(d(rng));
            gens.push_back({BigComplex(a, b), BigComplex(c, e)});
        }
        std::vector<Rational> want{Rational(1, 2), Rational(-3, 5), Rational(0), Rational(7, 4)};
        std::vector<BigComplex> v(2);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < 4; ++i) v[c] += gens[i][c] * from_rational(want[i]);
        auto base = lattice_membership(v, gens, Integer(1000), Integer(10000), ctx);
        if (!base.member() || base.coefficients != want) return "membership coefficients";
        std::vector<int> perm{2, 0, 3, 1};
        std::vector<std::vector<BigComplex>> pg;
        for (int p : perm) pg.push_back(gens[p]);
        auto permuted = lattice_membership(v, pg, Integer(1000), Integer(10000), ctx);
        if (!permuted.member()) return "permuted membership";
        for (int i = 0; i < 4; ++i)
            if (permuted.coefficients[i] != want[perm[i]]) return "permutation invariance";
        auto doubled = gens;
        for (auto& z : doubled[3]) z = z * Real(2);
        auto dm = lattice_membership(v, doubled, Integer(1000), Integer(10000), ctx);
        if (!dm.member() || dm.coefficients[3] != want[3] / 2 || dm.coefficients[0] != want[0]) return "scaling invariance";
    }
    return "";
}

std::string basepoint_suite() {
    CmSetup s(48);
    auto sp = s.spread(SpreadMap::affine(cm20, s.cuts, 1, -s.xi));
    const BigComplex &a = s.lat.omega_alpha, &b = s.lat.omega_beta;
    auto v0 = chi2_box(sp, Chi2Method::PathIntegral, s.ctx);
    for (auto [x, y] : {std::pair{"0.31", "0.27"}, {"-0.41", "0.05"}, {"0.77", "-0.62"}, {"1.43", "2.11"}}) {
        Chi2Options o;
        o.basepoint = a * Real(x) + b * Real(y);
        auto v = chi2_box(sp, Chi2Method::PathIntegral, s.ctx, o);
        auto d = lattice_membership({v.raw_alpha - v0.raw_alpha, v.raw_beta - v0.raw_beta}, v.lattice_gens,
                                    Integer(1000), Integer(10000), s.ctx);
        if (!d.member()) return std::string("basepoint change not in the lattice at ") + x + "," + y;
        if (!(abs(v.value_alpha - v0.value_alpha) < s.ctx.tol() * 1000)) return "normalized value moved";
    }
    return "";
}

std::string steinberg_suite() {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int trial = 0; trial < 40; ++trial) {
        MilnorSymbolSum s(2);
        for (int k = 0; k < 3; ++k) s.add({random_func(rng, 2), random_func(rng, 2)}, coef(rng));
        MilnorSymbolSum once = steinberg_normalize(s);
        if (!(steinberg_normalize(once) == once)) return "steinberg normal form not idempotent";
    }
    return "";
}

std::string chi3_suite() {
    int digits = 48;
    PrecisionCtx ctx(digits);
    WorkingPrecision wp(ctx);
    struct Src {
        EllipticCurve E;
        PeriodLatticeData lat;
        CutSystem cuts;
        BigComplex at(const char* u, const char* v) const { return lat.omega_alpha * Real(u) + lat.omega_beta * Real(v); }
        BiSpreadMap map(GaussianInteger a, GaussianInteger b, const BigComplex& c) const { return {a, b, c, E, cuts}; }
    };
    auto source = [&](const EllipticCurve& E) {
        auto lat = compute_periods(E, ctx);
        return Src{E, lat, CutSystem::standard(lat, lat.omega_alpha * Real("0.0613") + lat.omega_beta * Real("0.0291"))};
    };
    Src s = source(cm20), n = source(e81);
    CurvePoint q = CurvePoint::exact(Rational(-1), Rational(4));
    BigComplex xi = elliptic_log(q, cm20, s.lat, ctx);
    BigComplex eta = elliptic_log(point_mul(Integer(2), q, cm20), cm20, s.lat, ctx);

    Chi3Spread z{cm20, s.lat, {s.map(0, 0, s.at("0.3", "0.1")), s.map(0, 0, s.at("0.2", "0.2")), s.map(0, 0, s.at("0.1", "0.4"))}};
    auto zv = chi3_box(z, ctx);
    if (abs(zv.values[0]) != 0 || abs(zv.values[1]) != 0) return "chi3 nonzero on constant maps";

    std::vector<Chi3Spread> configs{
        {cm20, s.lat, {s.map(1, 0, xi), s.map(0, 1, s.at("0.31", "0.12")), s.map(1, 1, eta)}},
        {cm20, s.lat, {s.map(1, GaussianInteger(0, 1), s.at("0.2", "0.1")), s.map(1, -1, xi), s.map(0, 2, eta)}},
        {e81, n.lat, {n.map(1, 2, n.at("0.17", "0.41")), n.map(-1, 1, n.at("0.05", "0.33")), n.map(1, 0, n.at("0.4", "0.2"))}}};
    Real worst = 0;
    for (const auto& sp : configs) {
        const PeriodLatticeData& S = sp.source_lattice;
        std::array<BigComplex, 2> b{S.omega_alpha * Real("0.13271") + S.omega_beta * Real("0.07139"),
                                    S.omega_alpha * Real("0.22913") + S.omega_beta * Real("0.17191")};
        for (const BigComplex& P1 : {S.omega_alpha, S.omega_beta})
            for (const BigComplex& P2 : {S.omega_alpha, S.omega_beta}) {
                BigComplex cur = chi3_pairing(sp, P1, P2, b, ctx).current;
                BigComplex ora = chi3_stokes_oracle(sp, P1, P2, b, ctx);
                Real rel = abs(cur - ora) / (1 + abs(ora));
                if (rel > worst) worst = rel;
            }
    }
    if (!(worst < pow10(-digits / 3))) return "chi3 oracle gap " + sci(worst);
    return "";
}

}  // namespace

int main() {
    criterion(1, "CM period ratio", [] {
        auto t0 = std::chrono::steady_clock::now();
        PrecisionCtx ctx(64);
        WorkingPrecision wp(ctx);
        auto lat = compute_periods(cm20, ctx);
        double el = seconds_since(t0);
        Real d = abs(lat.tau - BigComplex(Real(0), Real(1)));
        return Outcome{d < pow10(-50) && el < 1.0, "|tau - i| = " + sci(d) + " < 1e-50, runtime < 1 s"};
    });

    criterion(2, "main CM computation at 128 digits", [] {
        auto t0 = std::chrono::steady_clock::now();
        CmSetup s(128);
        const BigComplex &Oa = s.lat.omega_alpha, &Ob = s.lat.omega_beta;
        auto v = chi2_box(s.spread(SpreadMap::affine(cm20, s.cuts, 1, -s.xi)), Chi2Method::Both, s.ctx);
        Real gap = v.method_gap ? *v.method_gap : Real(1);
        Real ea = abs(v.value_alpha - (Oa * Oa / Real(2) - s.xi * Oa));
        Real eb = abs(v.value_beta - (Ob * Ob / Real(2) - s.xi * Ob));
        auto r = chi2_reduce(v, Rational(1), Integer(1000), Integer(10000), s.ctx);
        double el = seconds_since(t0);
        Real tol = pow10(-64);
        bool ok = gap < tol && ea < tol && eb < tol && r.verdict == LatticeMembership::Verdict::NoRelationUpTo && el < 30;
        return Outcome{ok, "method gap " + sci(gap) + ", alpha err " + sci(ea) + ", beta err " + sci(eb) + " (tol 1e-64), reduce " +
                               to_string(r.verdict) + ", runtime < 30 s"};
    });

    criterion(3, "vanishing control 2 B(p, p)", [] {
        CmSetup s(128);
        auto v = chi2_box(s.spread(SpreadMap::identity(cm20, s.shifted)), Chi2Method::Both, s.ctx);
        auto r = chi2_reduce(v, Rational(2), Integer(1000), Integer(10000), s.ctx);
        bool ok = r.member();
        for (auto& c : r.coefficients) ok = ok && denominator(c) <= 2;
        return Outcome{ok, std::string(to_string(r.verdict)) + " coefficients " + coeffs(r.coefficients) + ", denominators <= 2"};
    });

    criterion(4, "constant second map closed form and generators", [] {
        CmSetup s(128);
        auto v = chi2_box(s.spread(SpreadMap::constant(cm20, s.shifted, s.xi)), Chi2Method::Both, s.ctx);
        const BigComplex &a = s.lat.omega_alpha, &b = s.lat.omega_beta;
        Real ea = abs(v.value_alpha - a * s.xi), eb = abs(v.value_beta - b * s.xi);
        bool gens = v.lattice_gens.size() == 8;
        std::array<BigComplex, 4> want{a * a, a * b, b * a, b * b};
        for (int k = 0; gens && k < 4; ++k) {
            gens = abs(v.lattice_gens[k][0]) == 0 && abs(v.lattice_gens[k][1] - want[k]) == 0 &&
                   abs(v.lattice_gens[4 + k][0] - want[k]) == 0 && abs(v.lattice_gens[4 + k][1]) == 0;
        }
        bool ok = ea < pow10(-64) && eb < pow10(-64) && gens;
        return Outcome{ok, "alpha err " + sci(ea) + ", beta err " + sci(eb) + " (tol 1e-64), eight generators " +
                               (gens ? "exact" : "mismatch")};
    });

    criterion(5, "degenerate square-lattice example", [] {
        PrecisionCtx ctx(128);
        WorkingPrecision wp(ctx);
        auto l1 = compute_periods(cm20, ctx), l2 = compute_periods(e81, ctx);
        BigComplex xi = times_i(l2.omega_alpha);
        BoxSpreadCycle sp{cm20, l1,
                          {SpreadMap::identity(cm20, CutSystem::standard(l1)),
                           SpreadMap::constant(e81, CutSystem::standard(l2), xi)}};
        auto v = chi2_box(sp, Chi2Method::Both, ctx);
        auto r = chi2_reduce(v, Rational(1), Integer(1000), Integer(10000), ctx);
        std::vector<Rational> want(8, Rational(0));
        want[6] = 1;
        want[0] = -1;
        bool ok = r.member() && r.coefficients == want;
        return Outcome{ok, std::string(to_string(r.verdict)) + " coefficients " + coeffs(r.coefficients) +
                               " = (Ob1 Oa2, -Oa1 Oa2)"};
    });

    criterion(6, "classifier", [] {
        PrecisionCtx ctx(64);
        WorkingPrecision wp(ctx);
        auto run = [&](const EllipticCurve& a, const EllipticCurve& b) {
            return classify_case(a, compute_periods(a, ctx), b, compute_periods(b, ctx), Integer(1000), ctx);
        };
        auto sq = run(cm20, cm20), one = run(cm20, e81), gen = run(e81, e125);
        bool ok = sq.verdict == ClassifierCase::RankFourCM_Unconditional && sq.cm[0] && sq.cm[1] && sq.isogeny;
        // a negative search is evidenced by the height bound and precision it ran at
        auto searched = [](const ClassifierVerdict& v) { return v.max_height == 1000 && v.precision == 64; };
        ok = ok && one.verdict == ClassifierCase::OneFactorCM_Unconditional && one.cm[0] && !one.cm[1] && searched(one);
        ok = ok && gen.verdict == ClassifierCase::NonIsogenousNonCM_Conditional && !gen.cm[0] && !gen.cm[1] && !gen.isogeny &&
             searched(gen);
        return Outcome{ok, std::string(to_string(sq.verdict)) + ", " + to_string(one.verdict) + ", " + to_string(gen.verdict) +
                               ", evidence attached"};
    });

    criterion(7, "psi2 decision", [] {
        PrecisionCtx ctx(64);
        CurveRef E = CurveRef::of(cm20);
        PointSymbol p = PointSymbol::named(CurveRef::of(cm20, "E1"), "p");
        auto cyc = [&](const CurvePoint& pt) {
            ZeroCycle W({E});
            W.add({PointSymbol::named(E, "q", pt)}, 1);
            W.add({PointSymbol::base(E)}, -1);
            return W;
        };
        auto nt = psi2_nonvanishing(p, cyc(CurvePoint::exact(Rational(-1), Rational(4))), 16, ctx);
        auto tz = psi2_nonvanishing(p, cyc(CurvePoint::exact(Rational(0), Rational(0))), 16, ctx);
        bool ok = nt.kind == Psi2Verdict::Kind::Nontrivial && tz.kind == Psi2Verdict::Kind::ZeroClass;
        return Outcome{ok, std::string("(-1,4) - inf: ") + to_string(nt.kind) + ", (0,0) - inf: " + to_string(tz.kind)};
    });

    criterion(8, "Kummer push-pull identity", [] {
        CurveRef E1 = CurveRef::of(cm20, "E1"), E2 = CurveRef::of(e81, "E2");
        PointSymbol p = PointSymbol::named(E1, "p"), xi = PointSymbol::named(E2, "xi");
        std::vector<PointSymbol> o{PointSymbol::base(E1), PointSymbol::base(E2)};
        ZeroCycle B = box_cycle({p, xi}, o);
        ZeroCycle want = B + box_cycle({-p, -xi}, o);
        bool ok = kummer_pushpull(B) == want;
        return Outcome{ok, "pushpull B(p, xi) == B(p, xi) + B(-p, -xi), exact"};
    });

    criterion(9, "Weil reciprocity", [] {
        auto t0 = std::chrono::steady_clock::now();
        std::mt19937 rng(2024);
        int holds = 0;
        for (int trial = 0; trial < 100; ++trial) {
            RationalFunc f = random_func(rng, 4), g = random_func(rng, 4);
            holds += weil_reciprocity_check(f, g).holds;
        }
        double el = seconds_since(t0);
        return Outcome{holds == 100 && el < 10, std::to_string(holds) + "/100 random degree <= 4 pairs hold exactly, runtime < 10 s"};
    });

    criterion(10, "regulator shrink-loop law", [] {
        PrecisionCtx ctx(40);
        WorkingPrecision wp(ctx);
        RationalFunc f(((t - 1) * (t + 3))), g(t * t + 2, t + 4);
        BigComplex x0(Real(1));
        BigComplex want = -(BigComplex(Real(0), 2 * real_pi()) * log(g(x0)));
        std::vector<Real> d;
        for (const char* r : {"0.1", "0.01", "0.001"}) {
            ParamPath loop{CircleAround{x0, Real(r)}, 1};
            d.push_back(distance_mod_two_pi_i_squared(regulator_eval(f, g, loop, ctx).value - want));
        }
        bool mono = d[1] <= d[0] + ctx.tol() && d[2] <= d[1] + ctx.tol();
        bool strict = d[1] < d[0] && d[2] < d[1];
        bool ok = d[1] < Real("1e-3") && mono;
        return Outcome{ok, "defects " + sci(d[0]) + ", " + sci(d[1]) + ", " + sci(d[2]) +
                               " at r = 0.1, 0.01, 0.001; r = 0.01 < 1e-3; non-increasing within tol " + sci(ctx.tol()) +
                               (strict ? "; strictly decreasing" : "; not strictly decreasing (defects at the precision floor)")};
    });

    criterion(11, "property suites", [] {
        std::vector<std::pair<const char*, Suite>> suites{
            {"eisenstein", eisenstein_suite}, {"associativity", associativity_suite}, {"ellog", homomorphism_suite},
            {"pslq", pslq_suite},             {"lattice", lattice_suite},             {"basepoint", basepoint_suite},
            {"steinberg", steinberg_suite},   {"chi3", chi3_suite}};
        std::string failed, passed;
        for (auto& [name, run] : suites) {
            std::string why;
            try {
                why = run();
            } catch (const std::exception& e) {
                why = e.what();
            }
            if (why.empty())
                passed += std::string(passed.empty() ? "" : " ") + name;
            else
                failed += std::string(failed.empty() ? "" : "; ") + name + ": " + why;
        }
        return Outcome{failed.empty(), failed.empty() ? "green: " + passed : failed};
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
