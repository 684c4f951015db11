#include "haj/elliptic.hpp"

#include <algorithm>
#include <cctype>

namespace haj {

std::string rational_to_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

Rational parse_rational(const std::string& s0) {
    std::string s;
    for (char c : s0)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    auto slash = s.find('/');
    auto digits_ok = [](const std::string& t) {
        std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i >= t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    std::string num = s.substr(0, slash), den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!digits_ok(num) || !digits_ok(den) || den.find('-') != std::string::npos)
        throw Error(ErrorKind::InvalidInput, "not an exact rational 'num/den': '" + s0 + "'");
    if (num[0] == '+') num = num.substr(1);
    if (den[0] == '+') den = den.substr(1);
    Integer d(den);
    if (d == 0) throw Error(ErrorKind::InvalidInput, "zero denominator in '" + s0 + "'");
    return Rational(Integer(num), d);
}

EllipticCurve::EllipticCurve(Rational a, Rational b, std::string l) : g2(std::move(a)), g3(std::move(b)), label(std::move(l)) {
    if (discriminant() == 0)
        throw Error(ErrorKind::InvalidInput, "singular curve: g2^3 - 27 g3^2 = 0");
    if (label.empty()) label = "g2=" + rational_to_string(g2) + ",g3=" + rational_to_string(g3);
}

EllipticCurve EllipticCurve::from_short(const Rational& a, const Rational& b, std::string label) {
    return EllipticCurve(Rational(-4 * a), Rational(-4 * b), std::move(label));
}

Rational EllipticCurve::discriminant() const { return g2 * g2 * g2 - 27 * g3 * g3; }

Rational EllipticCurve::j_invariant() const { return 1728 * g2 * g2 * g2 / discriminant(); }

LatticeCoords PeriodLatticeData::coords(const BigComplex& z) const {
    return lattice_coords(z, omega_alpha, omega_beta);
}

std::array<Integer, 2> PeriodLatticeData::lattice_part(const BigComplex& z, const BigComplex& center) const {
    LatticeCoords c = coords(z - center);
    Real half = Real(1) / 2;
    return {round_to_integer(floor(c.u + half)), round_to_integer(floor(c.v + half))};
}

BigComplex PeriodLatticeData::vector(const Integer& m, const Integer& n) const {
    return omega_alpha * from_integer(m) + omega_beta * from_integer(n);
}

BigComplex PeriodLatticeData::reduce(const BigComplex& z, const BigComplex& center) const {
    auto mn = lattice_part(z, center);
    return z - vector(mn[0], mn[1]);
}

CutSystem CutSystem::standard(const PeriodLatticeData& lat, const BigComplex& offset) {
    CutSystem cs;
    cs.lattice = lat;
    cs.basepoint_offset = offset;
    cs.cuts = {CutSpec{CutEdge::Alpha, lat.omega_alpha}, CutSpec{CutEdge::Beta, lat.omega_beta}};
    return cs;
}

LatticeCut CutSystem::geometry(CutEdge edge) const {
    return LatticeCut{lattice.omega_alpha, lattice.omega_beta, edge, basepoint_offset};
}

CurvePoint CurvePoint::exact(const Rational& x, const Rational& y) {
    CurvePoint p;
    p.kind = Kind::Exact;
    p.x = x;
    p.y = y;
    return p;
}

CurvePoint CurvePoint::numeric(const BigComplex& x, const BigComplex& y) {
    CurvePoint p;
    p.kind = Kind::Numeric;
    p.nx = x;
    p.ny = y;
    return p;
}

BigComplex CurvePoint::complex_x() const {
    return kind == Kind::Exact ? BigComplex(from_rational(x)) : lift(nx);
}

BigComplex CurvePoint::complex_y() const {
    return kind == Kind::Exact ? BigComplex(from_rational(y)) : lift(ny);
}

bool CurvePoint::operator==(const CurvePoint& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Infinity) return true;
    if (kind == Kind::Exact) return x == o.x && y == o.y;
    return nx.re == o.nx.re && nx.im == o.nx.im && ny.re == o.ny.re && ny.im == o.ny.im;
}

bool on_curve(const CurvePoint& p, const EllipticCurve& E, const PrecisionCtx* ctx) {
    if (p.is_infinity()) return true;
    if (p.kind == CurvePoint::Kind::Exact) return p.y * p.y == 4 * p.x * p.x * p.x - E.g2 * p.x - E.g3;
    PrecisionCtx local = ctx ? *ctx : PrecisionCtx(32);
    WorkingPrecision wp(local);
    BigComplex x = p.complex_x(), y = p.complex_y();
    BigComplex r = y * y - (x * x * x * Real(4) - x * from_rational(E.g2) - BigComplex(from_rational(E.g3)));
    return abs(r) <= local.tol() * (1 + abs(x * x * x));
}

std::array<BigComplex, 3> weierstrass_roots(const EllipticCurve& E, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    // monic x^3 + c1 x + c0
    BigComplex c1(-from_rational(E.g2) / 4), c0(-from_rational(E.g3) / 4);
    auto f = [&](const BigComplex& x) { return x * x * x + c1 * x + c0; };
    Real R = 1 + std::max(abs(c1), abs(c0));
    BigComplex seed(Real("0.4"), Real("0.9"));
    std::array<BigComplex, 3> z{seed * R, seed * seed * R, seed * seed * seed * R};
    Real eps = pow10(-long(ctx.working_digits()) + 4) * R;
    for (int it = 0; it < 2000; ++it) {
        Real change(0);
        for (int k = 0; k < 3; ++k) {
            BigComplex den(1);
            for (int j = 0; j < 3; ++j)
                if (j != k) den = den * (z[k] - z[j]);
            BigComplex dz = f(z[k]) / den;
            z[k] -= dz;
            change = std::max(change, abs(dz));
        }
        if (change < eps) break;
    }
    // real coefficients: snap conjugate structure
    Rational disc = E.discriminant();
    if (disc > 0) {
        for (auto& r : z) r.im = 0;
        std::sort(z.begin(), z.end(), [](const BigComplex& a, const BigComplex& b) { return a.re > b.re; });
    } else {
        std::sort(z.begin(), z.end(), [](const BigComplex& a, const BigComplex& b) { return abs(a.im) < abs(b.im); });
        z[0].im = 0;
        if (z[1].im < 0) std::swap(z[1], z[2]);
        z[2] = conj(z[1]);
    }
    return z;
}

EisensteinCheck eisenstein_reconstruct(const PeriodLatticeData& lat, const EllipticCurve& E, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    BigComplex w1 = lift(lat.omega_alpha), tau = lift(lat.tau);
    Real pi = real_pi();
    BigComplex q = exp(times_i(tau) * (2 * pi));
    Real eps = pow10(-long(ctx.working_digits()));
    BigComplex s3, s5, qn = q;
    for (int n = 1; n < 100000; ++n) {
        BigComplex lam = qn / (BigComplex(1) - qn);
        Real n3 = Real(n) * n * n;
        BigComplex t3 = lam * n3, t5 = lam * (n3 * n * n);
        s3 += t3;
        s5 += t5;
        if (abs(t5) < eps * (1 + abs(s5)) && abs(t3) < eps * (1 + abs(s3))) break;
        qn = qn * q;
    }
    BigComplex k = BigComplex(2 * pi) / w1;
    BigComplex k2 = k * k, k4 = k2 * k2;
    EisensteinCheck out;
    out.g2 = k4 / Real(12) * (BigComplex(1) + s3 * Real(240));
    out.g3 = k4 * k2 / Real(216) * (BigComplex(1) - s5 * Real(504));
    Real g2 = from_rational(E.g2), g3 = from_rational(E.g3);
    Real e2 = abs(out.g2 - BigComplex(g2)) / std::max(Real(1), Real(abs(g2)));
    Real e3 = abs(out.g3 - BigComplex(g3)) / std::max(Real(1), Real(abs(g3)));
    out.error = std::max(e2, e3);
    return out;
}

namespace {

void gauss_reduce(BigComplex& w1, BigComplex& w2) {
    for (int it = 0; it < 1000; ++it) {
        if (norm2(w2) < norm2(w1)) std::swap(w1, w2);
        BigComplex r = w2 / w1;
        Real k = round(r.re);
        if (k == 0) break;
        w2 -= w1 * k;
    }
    if (norm2(w2) < norm2(w1)) std::swap(w1, w2);
}

// Integer x, y with a*x + b*y = gcd(a, b)
long ext_gcd(long a, long b, long& x, long& y) {
    if (b == 0) {
        x = a >= 0 ? 1 : -1;
        y = 0;
        return a >= 0 ? a : -a;
    }
    long x1, y1;
    long g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// Smallest positive real lattice vector as Omega_alpha, then Omega_beta with
// Im(tau) > 0 and Re(tau) in (-1/2, 1/2].
bool normalize_real(BigComplex w1, BigComplex w2, const PrecisionCtx& ctx, PeriodLatticeData& out) {
    Real tol = ctx.tol();
    gauss_reduce(w1, w2);
    Real scale = abs(w1);
    bool found = false;
    long bm = 0, bn = 0;
    BigComplex best;
    for (long m = -3; m <= 3; ++m)
        for (long n = -3; n <= 3; ++n) {
            if (m == 0 && n == 0) continue;
            BigComplex w = w1 * Real(m) + w2 * Real(n);
            if (abs(w.im) > tol * scale * 100 || !(w.re > 0)) continue;
            if (!found || w.re < best.re - tol * scale) {
                found = true;
                best = w;
                bm = m;
                bn = n;
            }
        }
    if (!found) return false;
    long p, q;
    if (ext_gcd(bm, bn, q, p) != 1) return false;
    // bm*q + bn*p = 1  ->  the pair (bm, bn), (-p, q) is unimodular
    BigComplex beta = w1 * Real(-p) + w2 * Real(q);
    BigComplex alpha(best.re, Real(0));
    BigComplex tau = beta / alpha;
    if (tau.im < 0) {
        beta = -beta;
        tau = -tau;
    }
    Real half = Real(1) / 2;
    Real k = ceil(tau.re - half - tol);
    tau.re -= k;
    if (abs(tau.re) < tol) tau.re = 0;
    if (abs(tau.re - half) < tol) tau.re = half;
    out.omega_alpha = alpha;
    out.tau = tau;
    out.omega_beta = alpha * tau;
    out.digits = ctx.digits;
    return true;
}

}  // namespace

PeriodLatticeData compute_periods(const EllipticCurve& E, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    auto roots = weierstrass_roots(E, ctx);
    Real pi = real_pi();
    Real accept = pow10(-ctx.digits / 2);
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (auto& pm : perms) {
        const BigComplex &e1 = roots[pm[0]], &e2 = roots[pm[1]], &e3 = roots[pm[2]];
        BigComplex a = sqrt(e1 - e3), b = sqrt(e1 - e2), c = sqrt(e2 - e3);
        BigComplex w1 = BigComplex(pi) / agm(a, b, ctx);
        BigComplex w2 = BigComplex(pi) / agm(c, times_i(b), ctx);
        BigComplex r = w2 / w1;
        if (abs(r.im) < pow10(-10)) continue;
        PeriodLatticeData lat;
        if (!normalize_real(w1, w2, ctx, lat)) continue;
        if (eisenstein_reconstruct(lat, E, ctx).error < accept) return lat;
    }
    throw Error(ErrorKind::NonConvergence, "no root ordering produced a lattice matching g2, g3",
                "increase --digits");
}

WpValue weierstrass_p(const BigComplex& z0, const PeriodLatticeData& lat, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    BigComplex w1 = lift(lat.omega_alpha), tau = lift(lat.tau);
    BigComplex z = lat.reduce(lift(z0));
    if (abs(z) < ctx.tol() * abs(w1))
        throw Error(ErrorKind::PoleAtInput, "weierstrass_p evaluated at a lattice point");
    WpValue out;
    Real eps = pow10(-long(ctx.working_digits()));
    wp_qseries(z, w1, tau, eps, out.p, out.dp);
    return out;
}

namespace {

Complex<double> seed_log(const Complex<double>& x, const PeriodLatticeData& lat) {
    using C = Complex<double>;
    C w1 = to_double(lat.omega_alpha), w2 = to_double(lat.omega_beta), tau = to_double(lat.tau);
    auto wpd = [&](const C& z, C& p, C& dp) { wp_qseries(z, w1, tau, 1e-17, p, dp); };
    C best;
    double bestv = -1;
    const int N = 24;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double s = -0.5 + (i + 0.5) / N, t = -0.5 + (j + 0.5) / N;
            C z = w1 * s + w2 * t, p, dp;
            wpd(z, p, dp);
            double v = abs(p - x);
            if (bestv < 0 || v < bestv) {
                bestv = v;
                best = z;
            }
        }
    if (abs(x) > 1e4) {
        C z = C(1.0) / sqrt(x), p, dp;
        wpd(z, p, dp);
        if (abs(p - x) < bestv) best = z;
    }
    for (int it = 0; it < 60; ++it) {
        C p, dp;
        wpd(best, p, dp);
        if (abs(dp) == 0) break;
        C step = (p - x) / dp;
        if (abs(step) > 0.25 * abs(w1)) step = step * (0.25 * abs(w1) / abs(step));
        best -= step;
        if (abs(step) < 1e-14 * abs(w1)) break;
    }
    return best;
}

}  // namespace

BigComplex elliptic_log(const CurvePoint& p, const EllipticCurve& E, const PeriodLatticeData& lat,
                        const PrecisionCtx& ctx) {
    if (p.is_infinity()) return BigComplex(0);
    if (!on_curve(p, E, &ctx)) throw Error(ErrorKind::InvalidInput, "point is not on the curve");
    WorkingPrecision wp(ctx);
    Real tol = ctx.tol();
    BigComplex X = p.complex_x(), Y = p.complex_y();
    BigComplex wa = lift(lat.omega_alpha), wb = lift(lat.omega_beta);
    Real scale = abs(wa);

    bool two_torsion = p.kind == CurvePoint::Kind::Exact ? p.y == 0 : abs(Y) < tol * (1 + abs(X));
    if (two_torsion) {
        std::array<BigComplex, 3> halves{wa / Real(2), wb / Real(2), (wa + wb) / Real(2)};
        BigComplex best;
        Real bestv(-1);
        for (auto& h : halves) {
            Real v = abs(weierstrass_p(h, lat, ctx).p - X);
            if (bestv < 0 || v < bestv) {
                bestv = v;
                best = h;
            }
        }
        if (bestv > sqrt(tol) * (1 + abs(X)))
            throw Error(ErrorKind::InversionMismatch, "no half period matches the 2-torsion point");
        return lat.reduce(best);
    }

    BigComplex z = from_double(seed_log(to_double(X), lat));
    z = lift(z);
    bool converged = false;
    for (int it = 0; it < 400; ++it) {
        WpValue v = weierstrass_p(z, lat, ctx);
        BigComplex dz = (v.p - X) / v.dp;
        z -= dz;
        if (abs(dz) < tol * scale) {
            WpValue w = weierstrass_p(z, lat, ctx);
            z -= (w.p - X) / w.dp;
            converged = true;
            break;
        }
    }
    if (!converged) throw Error(ErrorKind::NonConvergence, "Newton inversion of weierstrass_p did not converge",
                                "increase --digits");
    WpValue v = weierstrass_p(z, lat, ctx);
    Real thr = sqrt(tol) * (1 + abs(Y));
    if (abs(v.dp - Y) <= thr) return lat.reduce(z);
    if (abs(v.dp + Y) <= thr) return lat.reduce(-z);
    throw Error(ErrorKind::InversionMismatch, "neither sign of the logarithm reproduces y");
}

CurvePoint point_neg(const CurvePoint& p) {
    if (p.kind == CurvePoint::Kind::Infinity) return p;
    if (p.kind == CurvePoint::Kind::Exact) return CurvePoint::exact(p.x, -p.y);
    return CurvePoint::numeric(p.nx, -p.ny);
}

CurvePoint point_add(const CurvePoint& p, const CurvePoint& q, const EllipticCurve& E) {
    if (p.is_infinity()) return q;
    if (q.is_infinity()) return p;
    if (p.kind != CurvePoint::Kind::Exact || q.kind != CurvePoint::Kind::Exact)
        throw Error(ErrorKind::InvalidInput, "exact group law needs rational coordinates");
    Rational lam;
    if (p.x == q.x) {
        if (p.y + q.y == 0) return CurvePoint::infinity();
        lam = (12 * p.x * p.x - E.g2) / (2 * p.y);
    } else {
        lam = (q.y - p.y) / (q.x - p.x);
    }
    Rational x3 = lam * lam / 4 - p.x - q.x;
    Rational y3 = -(p.y + lam * (x3 - p.x));
    return CurvePoint::exact(x3, y3);
}

CurvePoint point_mul(const Integer& n0, const CurvePoint& p, const EllipticCurve& E) {
    Integer n = n0;
    CurvePoint base = p;
    if (n < 0) {
        n = -n;
        base = point_neg(p);
    }
    CurvePoint acc = CurvePoint::infinity();
    while (n > 0) {
        if ((n & 1) != 0) acc = point_add(acc, base, E);
        base = point_add(base, base, E);
        n >>= 1;
    }
    return acc;
}

TorsionResult is_torsion(const CurvePoint& p, const EllipticCurve& E, int bound, const PrecisionCtx& ctx,
                         const PeriodLatticeData* lat, const Integer& maxHeight) {
    TorsionResult out;
    out.bound = bound;
    if (p.is_infinity()) {
        out.verdict = TorsionResult::Verdict::Torsion;
        out.order = 1;
        return out;
    }
    if (p.kind != CurvePoint::Kind::Exact)
        throw Error(ErrorKind::InvalidInput, "is_torsion needs rational coordinates");
    if (!on_curve(p, E)) throw Error(ErrorKind::InvalidInput, "point is not on the curve");

    // integral model Y^2 = X^3 + A X + B with A = -u^4 g2/4, B = -u^6 g3/4, (X, Y) = (u^2 x, u^3 y/2)
    Rational A = -E.g2 / 4, B = -E.g3 / 4;
    Integer u = denominator(A) * denominator(B);
    Rational u2 = Rational(u * u), u3 = Rational(u * u * u);

    CurvePoint q = p;
    for (int n = 1; n <= bound; ++n) {
        if (q.is_infinity()) {
            out.verdict = TorsionResult::Verdict::Torsion;
            out.order = n;
            return out;
        }
        Rational X = u2 * q.x, Y = u3 * q.y / 2;
        if (denominator(X) != 1 || denominator(Y) != 1) {
            out.infinite_order_proven = true;
            out.proof = std::to_string(n) + "*P = (" + rational_to_string(q.x) + ", " + rational_to_string(q.y) +
                        ") is non-integral on the integral model (scale u = " + u.str() + ")";
            break;
        }
        q = point_add(q, p, E);
    }
    out.verdict = TorsionResult::Verdict::NotTorsionUpTo;
    if (lat) {
        BigComplex xi = elliptic_log(p, E, *lat, ctx);
        out.log_evidence = lattice_membership({xi}, {{lat->omega_alpha}, {lat->omega_beta}},
                                              Integer(std::max(bound, 1)), maxHeight, ctx);
    }
    return out;
}

}  // namespace haj
