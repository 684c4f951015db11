#include "haj/numkernel.hpp"

#include <algorithm>
#include <sstream>

namespace haj {

const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::QuadratureStall: return "QuadratureStall";
    case ErrorKind::TangencySuspected: return "TangencySuspected";
    case ErrorKind::PoleAtInput: return "PoleAtInput";
    case ErrorKind::InversionMismatch: return "InversionMismatch";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::FactorMismatch: return "FactorMismatch";
    case ErrorKind::BadIndexSet: return "BadIndexSet";
    case ErrorKind::MissingCoordinates: return "MissingCoordinates";
    case ErrorKind::CutGrazing: return "CutGrazing";
    case ErrorKind::MethodUnsupported: return "MethodUnsupported";
    case ErrorKind::StratificationOverflow: return "StratificationOverflow";
    case ErrorKind::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorKind::ZeroEntry: return "ZeroEntry";
    case ErrorKind::Cancelled: return "Cancelled";
    }
    return "Unknown";
}

PrecisionCtx::PrecisionCtx(int d, std::stop_token s) : digits(d), stop(std::move(s)) {
    if (d < 32) throw Error(ErrorKind::InvalidInput, "digits must be at least 32", "use --digits 32 or more");
}

Real PrecisionCtx::tol() const {
    WorkingPrecision wp(*this);
    return pow10(-(long(digits) * 4) / 5);
}

Real PrecisionCtx::accept() const {
    WorkingPrecision wp(*this);
    return pow10(-(long(digits) * 3) / 5);
}

void PrecisionCtx::check_cancel() const {
    if (stop.stop_requested()) throw Error(ErrorKind::Cancelled, "computation cancelled");
}

WorkingPrecision::WorkingPrecision(const PrecisionCtx& ctx) : WorkingPrecision(ctx.working_digits()) {}

WorkingPrecision::WorkingPrecision(unsigned digits10) : saved_(Real::default_precision()) {
    Real::default_precision(digits10);
}

WorkingPrecision::~WorkingPrecision() { Real::default_precision(saved_); }

Real lift(const Real& x) { return Real(x, Real::default_precision()); }

BigComplex lift(const BigComplex& z) { return {lift(z.re), lift(z.im)}; }

Real real_pi() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

Real pow10(long e) {
    Real r(10);
    mpfr_pow_si(r.backend().data(), r.backend().data(), e, MPFR_RNDN);
    return r;
}

Real from_rational(const Rational& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
    return r;
}

Real from_integer(const Integer& z) {
    Real r;
    mpfr_set_z(r.backend().data(), z.backend().data(), MPFR_RNDN);
    return r;
}

Integer round_to_integer(const Real& r) {
    Integer z;
    mpfr_get_z(z.backend().data(), r.backend().data(), MPFR_RNDN);
    return z;
}

Complex<double> to_double(const BigComplex& z) { return {z.re.convert_to<double>(), z.im.convert_to<double>()}; }

BigComplex from_double(const Complex<double>& z) { return {Real(z.re), Real(z.im)}; }

std::string to_string(const Real& x, int digits) {
    if (x == 0) return "0";
    return x.str(digits, std::ios_base::scientific);
}

std::string to_string(const BigComplex& z, int digits) {
    std::string im = to_string(z.im, digits);
    if (im[0] != '-') im = "+" + im;
    return to_string(z.re, digits) + im + "i";
}

Real parse_real(const std::string& s) {
    try {
        return Real(s);
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidInput, "not a real number: '" + s + "'");
    }
}

BigComplex parse_complex(const std::string& s) {
    std::string t = s;
    t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
    if (t.empty()) throw Error(ErrorKind::InvalidInput, "empty complex literal");
    if (t.back() != 'i') return {parse_real(t), Real(0)};
    t.pop_back();
    // split at the last sign that is not an exponent sign
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            std::string im = t.substr(k);
            if (im == "+" || im == "-") im += "1";
            return {parse_real(t.substr(0, k)), parse_real(im)};
        }
    }
    if (t.empty() || t == "+") return {Real(0), Real(1)};
    if (t == "-") return {Real(0), Real(-1)};
    return {Real(0), parse_real(t)};
}

LatticeCoords lattice_coords(const BigComplex& z, const BigComplex& wa, const BigComplex& wb) {
    // u*wa + v*wb = z, solved with Im(conj(.)*.) cross products
    Real det = wa.re * wb.im - wa.im * wb.re;
    Real u = (z.re * wb.im - z.im * wb.re) / det;
    Real v = (wa.re * z.im - wa.im * z.re) / det;
    return {u, v};
}

BigComplex agm(const BigComplex& a0, const BigComplex& b0, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    BigComplex a = lift(a0), b = lift(b0);
    if (norm2(a) == 0 || norm2(b) == 0) throw Error(ErrorKind::InvalidInput, "agm argument is zero");
    Real t = pow10(-long(ctx.working_digits()) + 2);
    return agm_iterate(a, b, t, 8 * ctx.digits);
}

void ParamPath::validate() const {
    if (orientation != 1 && orientation != -1)
        throw Error(ErrorKind::InvalidInput, "path orientation must be +1 or -1");
    if (auto* c = std::get_if<CircleAround>(&kind)) {
        if (!(c->radius > 0)) throw Error(ErrorKind::InvalidInput, "circle radius must be positive");
    } else if (auto* s = std::get_if<LatticeSegment>(&kind)) {
        if (norm2(s->direction) == 0) throw Error(ErrorKind::InvalidInput, "segment direction is zero");
    } else if (std::get<Polyline>(kind).vertices.size() < 2) {
        throw Error(ErrorKind::InvalidInput, "polyline needs at least two vertices");
    }
}

BigComplex ParamPath::point(const Real& t0) const {
    Real t = orientation > 0 ? t0 : Real(1 - t0);
    if (auto* c = std::get_if<CircleAround>(&kind)) {
        Real th = 2 * real_pi() * t;
        return c->center + BigComplex(cos(th), sin(th)) * c->radius;
    }
    if (auto* s = std::get_if<LatticeSegment>(&kind)) return s->start + s->direction * t;
    const auto& v = std::get<Polyline>(kind).vertices;
    std::size_t n = v.size() - 1;
    Real x = t * Real(n);
    std::size_t k = std::min<std::size_t>(n - 1, std::size_t(floor(x).convert_to<long>()));
    Real f = x - Real(k);
    return v[k] + (v[k + 1] - v[k]) * f;
}

BigComplex ParamPath::velocity(const Real& t0) const {
    Real t = orientation > 0 ? t0 : Real(1 - t0);
    Real sgn(orientation);
    if (auto* c = std::get_if<CircleAround>(&kind)) {
        Real tp = 2 * real_pi();
        Real th = tp * t;
        return BigComplex(-sin(th), cos(th)) * (c->radius * tp * sgn);
    }
    if (auto* s = std::get_if<LatticeSegment>(&kind)) return s->direction * sgn;
    const auto& v = std::get<Polyline>(kind).vertices;
    std::size_t n = v.size() - 1;
    Real x = t * Real(n);
    std::size_t k = std::min<std::size_t>(n - 1, std::size_t(floor(x).convert_to<long>()));
    return (v[k + 1] - v[k]) * (Real(n) * sgn);
}

std::vector<Real> ParamPath::breakpoints() const {
    std::vector<Real> out;
    if (auto* p = std::get_if<Polyline>(&kind)) {
        std::size_t n = p->vertices.size() - 1;
        for (std::size_t k = 1; k < n; ++k) out.push_back(Real(k) / Real(n));
    }
    return out;
}

GaussRule gauss_legendre(unsigned n) {
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    Real pi = real_pi();
    Real eps = pow10(-long(Real::default_precision()) + 3);
    for (unsigned i = 0; i < (n + 1) / 2; ++i) {
        Real x = cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
        Real dp;
        for (int it = 0; it < 100; ++it) {
            Real p0(1), p1 = x;
            for (unsigned k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Real(k);
                p0 = p1;
                p1 = p2;
            }
            dp = Real(n) * (x * p1 - p0) / (x * x - 1);
            Real dx = p1 / dp;
            x -= dx;
            if (abs(dx) < eps) break;
        }
        Real p0(1), p1 = x;
        for (unsigned k = 2; k <= n; ++k) {
            Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Real(k);
            p0 = p1;
            p1 = p2;
        }
        dp = Real(n) * (x * p1 - p0) / (x * x - 1);
        Real w = 2 / ((1 - x * x) * dp * dp);
        g.nodes[i] = x;
        g.weights[i] = w;
        g.nodes[n - 1 - i] = -x;
        g.weights[n - 1 - i] = w;
    }
    return g;
}

Quadrature::Quadrature(const PrecisionCtx& ctx, int max_depth) : ctx_(ctx), max_depth_(max_depth) {
    WorkingPrecision wp(ctx_);
    rule_ = gauss_legendre(unsigned(ctx_.digits / 2 + 12));
    tol_ = ctx_.tol();
}

BigComplex Quadrature::rule(const ParamFn& h, const Real& a, const Real& b) const {
    Real half = (b - a) / 2, mid = (a + b) / 2;
    BigComplex s;
    for (std::size_t k = 0; k < rule_.nodes.size(); ++k) s += h(mid + half * rule_.nodes[k]) * rule_.weights[k];
    return s * half;
}

BigComplex Quadrature::adapt(const ParamFn& h, const Real& a, const Real& b, const BigComplex& whole,
                             int depth) const {
    ctx_.check_cancel();
    Real m = (a + b) / 2;
    BigComplex l = rule(h, a, m), r = rule(h, m, b);
    BigComplex both = l + r;
    if (abs(both - whole) <= tol_ * (1 + abs(both))) return both;
    if (depth >= max_depth_)
        throw Error(ErrorKind::QuadratureStall, "quadrature subdivision exceeded its depth budget",
                    "the integrand is likely singular on the path; split at the singular parameter");
    return adapt(h, a, m, l, depth + 1) + adapt(h, m, b, r, depth + 1);
}

BigComplex Quadrature::integrate(const ParamFn& h, const Real& a0, const Real& b0) const {
    WorkingPrecision wp(ctx_);
    Real a = lift(a0), b = lift(b0);
    if (a == b) return {};
    return adapt(h, a, b, rule(h, a, b), 0);
}

BigComplex Quadrature::integrate_split(const ParamFn& h, const Real& a0, const Real& b0,
                                       std::vector<Real> splits) const {
    WorkingPrecision wp(ctx_);
    Real a = lift(a0), b = lift(b0);
    std::vector<Real> pts{a};
    std::sort(splits.begin(), splits.end());
    for (auto& s : splits)
        if (s > a && s < b) pts.push_back(lift(s));
    pts.push_back(b);
    BigComplex total;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) total += integrate(h, pts[k], pts[k + 1]);
    return total;
}

BigComplex integrate_interval(const ParamFn& h, const Real& a, const Real& b, const PrecisionCtx& ctx) {
    return Quadrature(ctx).integrate(h, a, b);
}

BigComplex integrate_path(const FormFn& form, const ParamPath& path, const PrecisionCtx& ctx,
                          std::vector<Real> splits) {
    path.validate();
    WorkingPrecision wp(ctx);
    Quadrature q(ctx);
    for (auto& b : path.breakpoints()) splits.push_back(path.orientation > 0 ? b : Real(1 - b));
    ParamFn h = [&](const Real& t) { return form(path.point(t)) * path.velocity(t); };
    return q.integrate_split(h, Real(0), Real(1), splits);
}

namespace {

Real bisect(const std::function<Real(const Real&)>& g, Real lo, Real hi, const Real& tol) {
    Real glo = g(lo);
    for (int it = 0; it < 4000 && hi - lo > tol; ++it) {
        Real m = (lo + hi) / 2;
        Real gm = g(m);
        if ((gm < 0) == (glo < 0)) {
            lo = m;
            glo = gm;
        } else {
            hi = m;
        }
    }
    return (lo + hi) / 2;
}

}  // namespace

std::vector<Crossing> detect_crossings(const ParamFn& trace, const Cut& cut, const PrecisionCtx& ctx,
                                       int samples) {
    WorkingPrecision wp(ctx);
    Real tol = ctx.tol();
    std::vector<Real> ts(samples + 1);
    std::vector<BigComplex> zs(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        ts[i] = Real(i) / Real(samples);
        zs[i] = trace(ts[i]);
    }
    std::vector<Crossing> out;
    const Real probe = pow10(-long(ctx.digits) / 4);

    if (std::holds_alternative<NegativeRealAxis>(cut)) {
        auto g = [&](const Real& t) { return trace(t).im; };
        Real near = Real(1) / Real(samples * 8);
        for (int i = 0; i < samples; ++i) {
            const BigComplex &a = zs[i], &b = zs[i + 1];
            bool sa = a.im < 0, sb = b.im < 0;
            if (sa == sb) {
                // near-touch of the negative axis without a sign change
                if (i > 0 && a.re < 0 && abs(a.im) < near * (1 + abs(a)) && abs(a.im) < abs(zs[i - 1].im) &&
                    abs(a.im) < abs(b.im) && (zs[i - 1].im < 0) == sa && abs(a.im) < probe)
                    throw Error(ErrorKind::TangencySuspected, "trace touches the negative real axis tangentially",
                                "perturb the path");
                continue;
            }
            Real t = bisect(g, ts[i], ts[i + 1], tol);
            BigComplex z = trace(t);
            if (abs(z) < sqrt(tol))
                throw Error(ErrorKind::TangencySuspected, "trace passes through the cut endpoint 0",
                            "perturb the path away from the zero");
            if (z.re >= 0) continue;
            out.push_back({t, sa ? -1 : +1});
        }
        return out;
    }

    const auto& lc = std::get<LatticeCut>(cut);
    BigComplex wa = lift(lc.omega_alpha), wb = lift(lc.omega_beta), off = lift(lc.offset);
    auto coord = [&](const Real& t) {
        LatticeCoords c = lattice_coords(trace(t) - off, wa, wb);
        return lc.edge == CutEdge::Alpha ? c.u : c.v;
    };
    std::vector<Real> us(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        LatticeCoords c = lattice_coords(zs[i] - off, wa, wb);
        us[i] = lc.edge == CutEdge::Alpha ? c.u : c.v;
    }
    Real half = Real(1) / 2;
    for (int i = 0; i < samples; ++i) {
        long na = floor(us[i] + half).convert_to<long>();
        long nb = floor(us[i + 1] + half).convert_to<long>();
        if (na == nb) {
            if (i > 0) {
                Real d = us[i] + half - Real(na);
                Real dist = d < half ? d : Real(1 - d);
                Real prev = us[i - 1], next = us[i + 1];
                bool extremum = (us[i] - prev) * (next - us[i]) < 0;
                if (extremum && dist < probe)
                    throw Error(ErrorKind::TangencySuspected, "trace touches a lattice cut tangentially",
                                "perturb the basepoint offset");
            }
            continue;
        }
        int sgn = nb > na ? 1 : -1;
        std::vector<Crossing> local;
        for (long k = na; k != nb; k += sgn) {
            long level_k = sgn > 0 ? k : k - 1;
            Real level = Real(level_k) + half;
            auto g = [&](const Real& t) { return coord(t) - level; };
            Real t = bisect(g, ts[i], ts[i + 1], tol);
            local.push_back({t, sgn});
        }
        for (auto& c : local) {
            Real h = probe;
            Real d = (coord(c.t + h) - coord(c.t - h)) / (2 * h);
            if (abs(d) < probe)
                throw Error(ErrorKind::TangencySuspected, "crossing of a lattice cut is not transverse",
                            "perturb the basepoint offset");
        }
        out.insert(out.end(), local.begin(), local.end());
    }
    std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    return out;
}

}  // namespace haj
