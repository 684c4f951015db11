#include "haj/invariants.hpp"

#include <algorithm>
#include <sstream>

namespace haj {

namespace {

// distance from x to 1/2 + Z
Real off_half(const Real& x) {
    Real h = Real(1) / 2;
    Real f = x - h;
    return abs(f - round(f));
}

Real graze_margin(const PrecisionCtx& ctx) { return sqrt(ctx.tol()); }

std::array<Integer, 2> integral_coords(const BigComplex& z, const PeriodLatticeData& lat, const PrecisionCtx& ctx,
                                       const char* what) {
    LatticeCoords c = lat.coords(z);
    Integer m = round_to_integer(c.u), n = round_to_integer(c.v);
    Real err = abs(c.u - from_integer(m)) + abs(c.v - from_integer(n));
    if (err > ctx.tol() * 1000)
        throw Error(ErrorKind::InvalidInput, std::string(what) + " is not a lattice vector of the target",
                    "the multiplier must carry the source lattice into the target lattice");
    return {m, n};
}

void check_map(const GaussianInteger& m, const PeriodLatticeData& src, const PeriodLatticeData& tgt,
               const PrecisionCtx& ctx) {
    if (m.is_gaussian() && abs(src.tau - BigComplex(Real(0), Real(1))) > ctx.tol() * 1000)
        throw Error(ErrorKind::InvalidInput, "Gaussian multiplier " + m.to_string() + " on a source with tau != i");
    integral_coords(m.value() * src.omega_alpha, tgt, ctx, "multiplier * source alpha period");
    integral_coords(m.value() * src.omega_beta, tgt, ctx, "multiplier * source beta period");
}

LatticeCoords offset_coords(const BigComplex& z, const CutSystem& cs) {
    return cs.lattice.coords(z - cs.basepoint_offset);
}

struct Hit {
    Real t;
    int orientation;
    int cut;  // index into CutSystem::cuts
};

struct PathResult {
    BigComplex raw, value;
    std::array<Integer, 4> correction;
    std::size_t crossings = 0;
};

// One generator path t -> b + t P of the source.
PathResult chi2_path(const SpreadMap& f, const SpreadMap& g, const BigComplex& b, const BigComplex& P,
                     const PeriodProducts& prod, const PrecisionCtx& ctx, int samples) {
    const BigComplex dG = g.multiplier.value() * P;
    ParamFn F1 = [&](const Real& t) { return f.apply(b + P * t); };
    auto F2 = [&](const Real& t) { return g.apply(b + P * t); };
    const Real near = graze_margin(ctx);

    std::vector<Hit> hits;
    LatticeCoords c0 = offset_coords(F1(Real(0)), f.cuts), c1 = offset_coords(F1(Real(1)), f.cuts);
    for (int k = 0; k < 2; ++k) {
        bool alpha = f.cuts.cuts[k].edge == CutEdge::Alpha;
        const Real &s0 = alpha ? c0.u : c0.v, &s1 = alpha ? c1.u : c1.v;
        if (abs(s1 - s0) < near) {
            if (off_half(s0) < near)
                throw Error(ErrorKind::CutGrazing, "generator path runs along a cut", "perturb the basepoint offset");
            continue;
        }
        for (const Crossing& x : detect_crossings(F1, f.cuts.geometry(f.cuts.cuts[k].edge), ctx, samples))
            hits.push_back({x.t, x.orientation, k});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });

    PathResult r;
    r.crossings = hits.size();
    std::vector<Real> splits;
    BigComplex delta;
    std::array<Integer, 4> corr{0, 0, 0, 0};
    for (const Hit& h : hits) {
        if (h.t < near || 1 - h.t < near)
            throw Error(ErrorKind::CutGrazing, "generator path starts on a cut", "perturb the basepoint offset");
        LatticeCoords at = offset_coords(F1(h.t), f.cuts);
        bool alpha = f.cuts.cuts[h.cut].edge == CutEdge::Alpha;
        if (off_half(alpha ? at.v : at.u) < near)
            throw Error(ErrorKind::CutGrazing, "generator path passes through a corner of the fundamental domain",
                        "perturb the basepoint offset");
        BigComplex G = F2(h.t);
        LatticeCoords gc = offset_coords(G, g.cuts);
        if (off_half(gc.u) < near || off_half(gc.v) < near)
            throw Error(ErrorKind::CutGrazing, "second map lands on its cut at a crossing",
                        "perturb the basepoint offset or the second cut offset");
        const BigComplex& omega = f.cuts.cuts[h.cut].coefficient;
        delta += omega * g.cuts.reduce(G) * Real(h.orientation);
        splits.push_back(h.t);

        auto w = integral_coords(omega, f.cuts.lattice, ctx, "cut coefficient");
        auto l2 = g.cuts.lattice.lattice_part(G, g.cuts.basepoint_offset);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) corr[2 * i + j] -= w[i] * l2[j] * h.orientation;
    }
    Quadrature quad(ctx);
    BigComplex I = quad.integrate_split([&](const Real& t) { return f.cuts.reduce(F1(t)) * dG; }, Real(0), Real(1),
                                        splits);
    r.raw = delta - I;

    auto l1 = f.cuts.lattice.lattice_part(F1(Real(0)), f.cuts.basepoint_offset);
    auto mp = integral_coords(dG, g.cuts.lattice, ctx, "second multiplier * period");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) corr[2 * i + j] += l1[i] * mp[j];
    r.value = r.raw;
    for (int k = 0; k < 4; ++k) r.value -= prod[k] * from_integer(corr[k]);
    r.correction = corr;
    return r;
}

}  // namespace

BigComplex GaussianInteger::value() const { return {from_integer(re), from_integer(im)}; }

std::string GaussianInteger::to_string() const {
    if (im == 0) return re.str();
    std::string s = re == 0 ? "" : re.str();
    std::string i = im == 1 ? "i" : im == -1 ? "-i" : im.str() + "i";
    if (!s.empty() && im > 0) s += "+";
    return s + i;
}

SpreadMap SpreadMap::identity(const EllipticCurve& E, const CutSystem& cuts) {
    return SpreadMap{GaussianInteger(1), BigComplex(0), E, cuts};
}

SpreadMap SpreadMap::constant(const EllipticCurve& E, const CutSystem& cuts, const BigComplex& value) {
    return SpreadMap{GaussianInteger(0), value, E, cuts};
}

SpreadMap SpreadMap::affine(const EllipticCurve& E, const CutSystem& cuts, GaussianInteger m, const BigComplex& c) {
    return SpreadMap{std::move(m), c, E, cuts};
}

bool SpreadMap::is_identity_on(const EllipticCurve& source) const {
    return multiplier == GaussianInteger(1) && translation.re == 0 && translation.im == 0 && target == source;
}

void BoxSpreadCycle::validate(const PrecisionCtx& ctx) const {
    if (maps.size() != 2 && maps.size() != 3)
        throw Error(ErrorKind::InvalidInput, "a box spread needs 2 or 3 maps, got " + std::to_string(maps.size()));
    WorkingPrecision wp(ctx);
    for (auto& m : maps) check_map(m.multiplier, source_lattice, m.cuts.lattice, ctx);
}

void Chi3Spread::validate(const PrecisionCtx& ctx) const {
    WorkingPrecision wp(ctx);
    for (auto& m : maps) {
        check_map(m.m1, source_lattice, m.cuts.lattice, ctx);
        check_map(m.m2, source_lattice, m.cuts.lattice, ctx);
    }
}

const char* to_string(Chi2Method m) {
    switch (m) {
        case Chi2Method::PathIntegral: return "PathIntegral";
        case Chi2Method::ClosedForm: return "ClosedForm";
        case Chi2Method::Both: return "Both";
    }
    return "?";
}

PeriodProducts period_products(const PeriodLatticeData& l1, const PeriodLatticeData& l2) {
    return {l1.omega_alpha * l2.omega_alpha, l1.omega_alpha * l2.omega_beta, l1.omega_beta * l2.omega_alpha,
            l1.omega_beta * l2.omega_beta};
}

std::vector<std::vector<BigComplex>> chi2_lattice_generators(const PeriodProducts& p) {
    std::vector<std::vector<BigComplex>> g;
    for (auto& x : p) g.push_back({BigComplex(0), x});
    for (auto& x : p) g.push_back({x, BigComplex(0)});
    return g;
}

Chi2Value chi2_box(const BoxSpreadCycle& spread, Chi2Method method, const PrecisionCtx& ctx, const Chi2Options& opts) {
    if (spread.maps.size() != 2) throw Error(ErrorKind::InvalidInput, "chi2 needs exactly two spread maps");
    spread.validate(ctx);
    WorkingPrecision wp(ctx);
    const SpreadMap &f = spread.maps[0], &g = spread.maps[1];
    const PeriodLatticeData& S = spread.source_lattice;

    Chi2Value out;
    out.method = method;
    out.products = period_products(f.cuts.lattice, g.cuts.lattice);
    out.lattice_gens = chi2_lattice_generators(out.products);
    out.correction.assign(8, Integer(0));

    bool want_closed = method != Chi2Method::PathIntegral;
    BigComplex closed_a, closed_b;
    if (want_closed) {
        if (!f.is_identity_on(spread.source))
            throw Error(ErrorKind::MethodUnsupported, "closed form needs the first map to be the identity",
                        "use --method path");
        auto closed = [&](const BigComplex& P) {
            BigComplex m2 = g.multiplier.value();
            return m2 * P * P / Real(2) + g.translation * P;
        };
        closed_a = closed(S.omega_alpha);
        closed_b = closed(S.omega_beta);
        if (method == Chi2Method::ClosedForm) {
            out.value_alpha = closed_a;
            out.value_beta = closed_b;
            return out;
        }
    }

    out.basepoint = opts.basepoint ? lift(*opts.basepoint)
                                   : S.omega_alpha * Real("0.19173") + S.omega_beta * Real("0.13712");
    PathResult a = chi2_path(f, g, out.basepoint, S.omega_alpha, out.products, ctx, opts.crossing_samples);
    PathResult b = chi2_path(f, g, out.basepoint, S.omega_beta, out.products, ctx, opts.crossing_samples);
    out.value_alpha = a.value;
    out.value_beta = b.value;
    out.raw_alpha = a.raw;
    out.raw_beta = b.raw;
    out.crossings = a.crossings + b.crossings;
    for (int k = 0; k < 4; ++k) {
        out.correction[4 + k] = a.correction[k];
        out.correction[k] = b.correction[k];
    }
    if (method == Chi2Method::Both) {
        Real ga = abs(a.value - closed_a), gb = abs(b.value - closed_b);
        Real gap = ga > gb ? ga : gb;
        out.method_gap = gap;
        if (gap > pow10(-ctx.digits / 2))
            throw Error(ErrorKind::NonConvergence, "path integral and closed form disagree by " + to_string(gap, 6),
                        "increase --digits or perturb the basepoint offset");
    }
    return out;
}

LatticeMembership chi2_reduce(const Chi2Value& v, const Rational& scale, const Integer& maxDen,
                              const Integer& maxHeight, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    Real s = from_rational(scale);
    return lattice_membership({v.value_alpha * s, v.value_beta * s}, v.lattice_gens, maxDen, maxHeight, ctx);
}

const char* to_string(ClassifierCase c) {
    switch (c) {
        case ClassifierCase::RankFourCM_Unconditional: return "RankFourCM_Unconditional";
        case ClassifierCase::OneFactorCM_Unconditional: return "OneFactorCM_Unconditional";
        case ClassifierCase::IsogenousNonCM_Unconditional: return "IsogenousNonCM_Unconditional";
        case ClassifierCase::NonIsogenousNonCM_Conditional: return "NonIsogenousNonCM_Conditional";
    }
    return "?";
}

const char* case_statement(ClassifierCase c) {
    switch (c) {
        case ClassifierCase::RankFourCM_Unconditional:
            return "isogenous CM factors: Neron-Severi rank 4, so chi2 = 0 forces AJ(W) = 0 unconditionally";
        case ClassifierCase::OneFactorCM_Unconditional:
            return "a CM factor: chi2 = 0 forces AJ(W) = 0 by Schneider's theorem";
        case ClassifierCase::IsogenousNonCM_Unconditional:
            return "isogenous non-CM factors: chi2 = 0 forces AJ(W) = 0 from the tau relation alone";
        case ClassifierCase::NonIsogenousNonCM_Conditional:
            return "non-isogenous non-CM factors: chi2 = 0 forces AJ(W) = 0 assuming Waldschmidt's conjecture";
    }
    return "?";
}

ClassifierVerdict classify_case(const EllipticCurve& E1, const PeriodLatticeData& l1, const EllipticCurve& E2,
                                const PeriodLatticeData& l2, const Integer& maxHeight, const PrecisionCtx& ctx) {
    if (l1.digits && l1.digits < ctx.digits)
        throw Error(ErrorKind::InvalidInput, "periods of " + E1.label + " were computed at lower precision");
    if (l2.digits && l2.digits < ctx.digits)
        throw Error(ErrorKind::InvalidInput, "periods of " + E2.label + " were computed at lower precision");
    WorkingPrecision wp(ctx);
    ClassifierVerdict v;
    v.tau = {l1.tau, l2.tau};
    v.max_height = maxHeight;
    v.precision = ctx.digits;
    for (int j = 0; j < 2; ++j) {
        const BigComplex& t = v.tau[j];
        try {
            auto r = complex_relation({BigComplex(1), t, t * t}, maxHeight, ctx);
            if (r && r->coeffs[2] != 0) v.cm[j] = r;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PrecisionExhausted) throw;
            v.cm_undetected_at_precision[j] = true;
        }
    }
    try {
        v.isogeny = detect_tau_relation(v.tau[0], v.tau[1], maxHeight, ctx);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
        v.isogeny_undetected_at_precision = true;
    }
    bool cm1 = v.cm[0].has_value(), cm2 = v.cm[1].has_value(), iso = v.isogeny.has_value();
    if (cm1 && cm2 && iso) v.verdict = ClassifierCase::RankFourCM_Unconditional;
    else if (cm1 || cm2) v.verdict = ClassifierCase::OneFactorCM_Unconditional;
    else if (iso) v.verdict = ClassifierCase::IsogenousNonCM_Unconditional;
    else v.verdict = ClassifierCase::NonIsogenousNonCM_Conditional;
    return v;
}

const char* to_string(Psi2Verdict::Kind k) {
    switch (k) {
        case Psi2Verdict::Kind::Nontrivial: return "Nontrivial";
        case Psi2Verdict::Kind::ZeroClass: return "ZeroClass";
        case Psi2Verdict::Kind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Psi2Verdict psi2_nonvanishing(const PointSymbol& generic_p, const ZeroCycle& W, int bound, const PrecisionCtx& ctx) {
    if (W.n() != 1 || !W.factors()[0].elliptic)
        throw Error(ErrorKind::InvalidInput, "W must be a cycle on one elliptic curve");
    if (W.degree() != 0) throw Error(ErrorKind::InvalidInput, "W must have degree 0");
    if (generic_p.kind() != PointSymbol::Kind::Named || generic_p.coordinates())
        throw Error(ErrorKind::InvalidInput, "p must be a very general point without coordinates");
    const EllipticCurve& E = *W.factors()[0].elliptic;

    Psi2Verdict v;
    v.multiple = 1;
    for (auto& [t, c] : W.terms()) v.multiple = lcm(v.multiple, denominator(c));
    v.reduced = CurvePoint::infinity();
    for (auto& [t, c] : W.terms()) {
        auto pt = t[0].coordinates();
        if (!pt || pt->kind == CurvePoint::Kind::Numeric)
            throw Error(ErrorKind::InvalidInput, "point " + t[0].to_string() + " needs exact rational coordinates");
        Integer k = numerator(c) * (v.multiple / denominator(c));
        v.reduced = point_add(v.reduced, point_mul(k, *pt, E), E);
    }
    std::ostringstream cert;
    cert << v.multiple << "*W ~ (q) - (o)";
    if (v.reduced.is_infinity()) {
        v.kind = Psi2Verdict::Kind::ZeroClass;
        cert << " with q = o; AJ(W) = 0 in the rational Jacobian, so Psi2 of B(" << generic_p.to_string()
             << ", W) vanishes";
        v.certificate = cert.str();
        return v;
    }
    WorkingPrecision wp(ctx);
    PeriodLatticeData lat = compute_periods(E, ctx);
    v.torsion = is_torsion(v.reduced, E, bound, ctx, &lat);
    const TorsionResult& tr = *v.torsion;
    cert << " with q = (" << rational_to_string(v.reduced.x) << ", " << rational_to_string(v.reduced.y) << ")";
    if (tr.torsion()) {
        v.kind = Psi2Verdict::Kind::ZeroClass;
        cert << " of order " << tr.order << "; torsion classes vanish after tensoring with Q, so AJ(W) = 0";
    } else if (tr.infinite_order_proven || (tr.log_evidence && !tr.log_evidence->member())) {
        v.kind = Psi2Verdict::Kind::Nontrivial;
        cert << " of infinite order (" << (tr.infinite_order_proven ? tr.proof : "elliptic log outside Q<periods>")
             << "); AJ(W) != 0, and for very general " << generic_p.to_string() << " Psi2 is nontrivial";
    } else {
        v.kind = Psi2Verdict::Kind::Inconclusive;
        cert << " with no torsion up to order " << tr.bound << " and no proof of infinite order";
    }
    v.certificate = cert.str();
    return v;
}

}  // namespace haj
