#include "haj/milnor.hpp"

#include <algorithm>
#include <sstream>

namespace haj {

void MilnorSymbolSum::add(const SymbolEntries& entries, const Rational& coeff) {
    if (entries.size() != n_)
        throw Error(ErrorKind::InvalidInput,
                    "symbol of length " + std::to_string(entries.size()) + " added to a sum of length " + std::to_string(n_));
    for (const auto& e : entries)
        if (e.is_zero()) throw Error(ErrorKind::ZeroEntry, "symbol entry is the zero function");
    if (coeff == 0) return;
    for (const auto& e : entries)
        if (e.is_one()) return;
    Rational& c = terms_[entries];
    c += coeff;
    if (c == 0) terms_.erase(entries);
}

MilnorSymbolSum& MilnorSymbolSum::operator+=(const MilnorSymbolSum& o) {
    if (o.n_ != n_) throw Error(ErrorKind::InvalidInput, "symbol sums of different lengths");
    for (const auto& [e, c] : o.terms_) add(e, c);
    return *this;
}

MilnorSymbolSum operator*(const Rational& c, const MilnorSymbolSum& s) {
    MilnorSymbolSum r(s.n_);
    for (const auto& [e, k] : s.terms_) r.add(e, c * k);
    return r;
}

std::string MilnorSymbolSum::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        bool neg = c < 0;
        Rational m = neg ? Rational(-c) : c;
        os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
        first = false;
        if (m != 1) os << m.str() << "*";
        os << "{";
        for (std::size_t k = 0; k < e.size(); ++k) os << (k ? ", " : "") << e[k].to_string();
        os << "}";
    }
    return os.str();
}

MilnorSymbolSum symbol(const SymbolEntries& entries, const Rational& coeff) {
    MilnorSymbolSum s(entries.size());
    s.add(entries, coeff);
    return s;
}

namespace {

bool steinberg_trivial(const SymbolEntries& e) {
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            if (e[j] == RationalFunc(1) - e[i]) return true;
            if (e[j] == -e[i]) return true;
        }
    return false;
}

using Factors = std::vector<std::pair<RationalFunc, int>>;

void factor_integer(Integer n, int sign, std::map<Integer, int>& out) {
    static const Integer limit = 100000;
    for (Integer p = 2; p <= limit && p * p <= n; ++p) {
        while (n % p == 0) {
            out[p] += sign;
            n /= p;
        }
    }
    if (n > 1) out[n] += sign;
}

Factors factor_constant(const Rational& c) {
    Factors f;
    if (c < 0) f.emplace_back(RationalFunc(-1), 1);
    std::map<Integer, int> e;
    Integer a = abs(numerator(c)), b = denominator(c);
    factor_integer(a, 1, e);
    factor_integer(b, -1, e);
    for (auto& [p, k] : e)
        if (k != 0) f.emplace_back(RationalFunc(Rational(p)), k);
    return f;
}

Factors factor_entry(const RationalFunc& x, const std::vector<Poly>& basis) {
    Factors f = factor_constant(x.num().lead() / x.den().lead());
    for (const Poly& b : basis) {
        int m = x.order_at(b);
        if (m != 0) f.emplace_back(RationalFunc(b), m);
    }
    return f;
}

const RationalFunc& minus_one() {
    static const RationalFunc m(-1);
    return m;
}

// Sorts with the permutation sign and rewrites {.., a, a, ..} as {.., a, -1, ..}.
int canonicalize(SymbolEntries& e) {
    int sign = 1;
    for (;;) {
        for (std::size_t i = 1; i < e.size(); ++i)
            for (std::size_t j = i; j > 0 && e[j] < e[j - 1]; --j) {
                std::swap(e[j], e[j - 1]);
                sign = -sign;
            }
        bool changed = false;
        for (std::size_t i = 1; i < e.size(); ++i)
            if (e[i] == e[i - 1] && !(e[i] == minus_one())) {
                e[i] = minus_one();
                changed = true;
                break;
            }
        if (!changed) return sign;
    }
}

}  // namespace

MilnorSymbolSum steinberg_normalize(const MilnorSymbolSum& s) {
    std::vector<std::pair<SymbolEntries, Rational>> live;
    std::vector<Poly> polys;
    for (const auto& [e, c] : s.terms()) {
        if (steinberg_trivial(e)) continue;
        live.emplace_back(e, c);
        for (const auto& x : e) {
            if (x.num().degree() > 0) polys.push_back(x.num());
            if (x.den().degree() > 0) polys.push_back(x.den());
        }
    }
    std::vector<Poly> basis = coprime_basis(polys);

    std::map<SymbolEntries, Rational> acc;
    for (const auto& [e, c] : live) {
        std::vector<Factors> fs;
        for (const auto& x : e) fs.push_back(factor_entry(x, basis));
        std::vector<std::size_t> idx(e.size(), 0);
        bool empty = std::any_of(fs.begin(), fs.end(), [](const Factors& f) { return f.empty(); });
        while (!empty) {
            SymbolEntries g;
            Rational k = c;
            for (std::size_t i = 0; i < e.size(); ++i) {
                g.push_back(fs[i][idx[i]].first);
                k *= fs[i][idx[i]].second;
            }
            k *= canonicalize(g);
            Rational& slot = acc[g];
            slot += k;
            if (slot == 0) acc.erase(g);
            std::size_t i = 0;
            while (i < e.size() && ++idx[i] == fs[i].size()) idx[i++] = 0;
            if (i == e.size()) break;
        }
    }

    MilnorSymbolSum out(s.n());
    for (const auto& [g, k] : acc)
        if (!steinberg_trivial(g)) out.add(g, k);
    return out;
}

Place Place::rational(const Rational& a) { return {false, Poly({-a, Rational(1)}), BigComplex(from_rational(a))}; }

Place Place::algebraic(Poly minpoly, std::optional<BigComplex> approx) {
    if (minpoly.degree() < 1) throw Error(ErrorKind::InvalidInput, "place polynomial must be nonconstant");
    Poly m = minpoly.monic();
    if (gcd(m, m.derivative()).degree() > 0) throw Error(ErrorKind::InvalidInput, "place polynomial is not squarefree");
    return {false, m, std::move(approx)};
}

std::string Place::to_string() const {
    if (infinity) return "infinity";
    if (minpoly.degree() == 1) return "t = " + Rational(-minpoly.coeff(0)).str();
    return minpoly.to_string() + " = 0";
}

std::string TameValue::to_string() const {
    if (rational) return rational->str();
    return residue.to_string() + " mod (" + minpoly.to_string() + ")";
}

namespace {

Rational rpow(Rational b, int e) {
    if (e < 0) {
        b = Rational(1) / b;
        e = -e;
    }
    Rational r = 1;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

Rational leading_ratio(const RationalFunc& f) { return f.num().lead() / f.den().lead(); }

void check_place(const Poly& m, const RationalFunc& f) {
    for (const Poly* p : {&f.num(), &f.den()}) {
        if (p->degree() < 1) continue;
        Poly h = gcd(m, *p);
        if (h.degree() > 0 && h.degree() < m.degree())
            throw Error(ErrorKind::InvalidInput, "place polynomial " + m.to_string() + " splits the divisor of " + f.to_string(),
                        "pass an irreducible factor as the place");
    }
}

Rational function_norm(const Poly& m, const RationalFunc& u) { return root_norm(m, u.num()) / root_norm(m, u.den()); }

}  // namespace

TameValue tame_symbol(const RationalFunc& f, const RationalFunc& g, const Place& place) {
    if (f.is_zero() || g.is_zero()) throw Error(ErrorKind::ZeroEntry, "tame symbol of the zero function");
    TameValue out;
    if (place.infinity) {
        int a = f.order_at_infinity(), b = g.order_at_infinity();
        Rational v = rpow(leading_ratio(f), b) / rpow(leading_ratio(g), a);
        if ((a * b) % 2) v = -v;
        out.residue = Poly(v);
        out.ord_f = a;
        out.ord_g = b;
        out.rational = v;
        out.numeric = BigComplex(from_rational(v));
        return out;
    }
    const Poly& m = place.minpoly;
    check_place(m, f);
    check_place(m, g);
    int a = f.order_at(m), b = g.order_at(m);
    RationalFunc pa = pow(RationalFunc(m), a), pb = pow(RationalFunc(m), b);
    RationalFunc w = pow(f / pa, b) / pow(g / pb, a);
    ExtGcd e = ext_gcd(w.den() % m, m);
    if (e.g.degree() != 0) throw Error(ErrorKind::InvalidInput, "tame symbol residue is not a unit at the place");
    Poly r = (w.num() * e.s) % m;
    if ((a * b) % 2) r = -r;
    out.residue = r;
    out.minpoly = m;
    out.ord_f = a;
    out.ord_g = b;
    if (m.degree() == 1) {
        out.rational = r.coeff(0);
        out.numeric = BigComplex(from_rational(r.coeff(0)));
    } else if (place.approx) {
        out.numeric = r(*place.approx);
    }
    return out;
}

WeilCheck weil_reciprocity_check(const RationalFunc& f, const RationalFunc& g, int max_degree) {
    if (f.is_zero() || g.is_zero()) throw Error(ErrorKind::ZeroEntry, "reciprocity check of the zero function");
    for (const Poly* p : {&f.num(), &f.den(), &g.num(), &g.den()})
        if (p->degree() > max_degree)
            throw Error(ErrorKind::DegreeTooHigh,
                        "degree " + std::to_string(p->degree()) + " exceeds the supported " + std::to_string(max_degree),
                        "raise --max-degree");
    WeilCheck out;
    out.product = 1;
    for (const Poly& m : coprime_basis({f.num(), f.den(), g.num(), g.den()})) {
        int a = f.order_at(m), b = g.order_at(m);
        if (a == 0 && b == 0) continue;
        RationalFunc u = f / pow(RationalFunc(m), a), v = g / pow(RationalFunc(m), b);
        Rational nv = rpow(function_norm(m, u), b) / rpow(function_norm(m, v), a);
        if ((a * b * m.degree()) % 2) nv = -nv;
        out.places.push_back({Place{false, m, std::nullopt}, m.degree(), a, b, nv});
        out.product *= nv;
    }
    TameValue inf = tame_symbol(f, g, Place::at_infinity());
    out.places.push_back({Place::at_infinity(), 1, inf.ord_f, inf.ord_g, *inf.rational});
    out.product *= *inf.rational;
    out.holds = out.product == 1;
    return out;
}

namespace {

BigComplex two_pi_i_squared() { return BigComplex(Real(-4) * real_pi() * real_pi()); }

}  // namespace

Real distance_mod_two_pi_i_squared(const BigComplex& z) {
    BigComplex w = two_pi_i_squared();
    Integer k = round_to_integer(z.re / w.re);
    return abs(z - w * from_integer(k));
}

RegulatorReport regulator_eval(const RationalFunc& f, const RationalFunc& g, const ParamPath& loop,
                               const PrecisionCtx& ctx, const Integer& maxDen, const Integer& maxHeight) {
    WorkingPrecision wp(ctx);
    loop.validate();
    if (f.is_zero() || g.is_zero()) throw Error(ErrorKind::ZeroEntry, "regulator of the zero function");
    Real near = sqrt(ctx.tol());

    // the loop must keep away from the zeros and poles of f and g
    const int samples = 256;
    for (int k = 0; k <= samples; ++k) {
        BigComplex z = loop.point(Real(k) / samples);
        for (const Poly* p : {&f.num(), &f.den(), &g.num(), &g.den()})
            if (p->degree() > 0 && abs((*p)(z)) < near)
                throw Error(ErrorKind::CutGrazing, "loop passes through a zero or pole of f or g",
                            "move the loop away from the divisors");
    }

    RegulatorReport out;
    // on a closed loop, detect crossings from a start point off f^{-1}(R^-)
    Real shift = 0;
    bool closed = std::holds_alternative<CircleAround>(loop.kind);
    if (auto* pl = std::get_if<Polyline>(&loop.kind))
        closed = pl->vertices.size() > 2 && abs(pl->vertices.front() - pl->vertices.back()) == 0;
    if (closed)
        for (const char* s : {"0", "0.381966", "0.618034", "0.236068"}) {
            shift = Real(s);
            BigComplex w = f(loop.point(shift));
            if (!(w.re < 0 && abs(w.im) < abs(w) / 1000)) break;
        }
    auto wrap = [&](const Real& t) {
        Real u = t + shift;
        return u >= 1 ? Real(u - 1) : u;
    };
    std::vector<Crossing> cr;
    if (!f.is_constant())
        for (Crossing c : detect_crossings([&](const Real& t) { return f(loop.point(wrap(t))); }, NegativeRealAxis{}, ctx)) {
            c.t = wrap(c.t);
            cr.push_back(c);
        }
    BigComplex two_pi_i(Real(0), 2 * real_pi());
    std::vector<Real> splits;
    for (const Crossing& c : cr) {
        BigComplex x = loop.point(c.t);
        BigComplex gx = g(x);
        if (gx.re < 0 && abs(gx.im) < near)
            throw Error(ErrorKind::CutGrazing, "g lies on its branch cut at a crossing of f^{-1}(R^-)",
                        "perturb the loop");
        out.delta -= two_pi_i * log(gx) * Real(c.orientation);
        splits.push_back(c.t);
    }
    out.crossings = cr.size();
    if (!g.is_constant()) {
        out.integral = integrate_path([&](const BigComplex& z) { return log(f(z)) * g.log_derivative(z); }, loop, ctx,
                                      splits);
    }
    out.value = out.integral + out.delta;
    BigComplex w = two_pi_i_squared();
    out.reduced = out.value - w * from_integer(round_to_integer(out.value.re / w.re));
    out.evidence = lattice_membership({out.value}, {{w}}, maxDen, maxHeight, ctx);
    return out;
}

ZeroCycle symbol_to_box(const MilnorSymbolSum& s) {
    CurveRef P1 = CurveRef::projective_line("P1");
    std::vector<CurveRef> factors(s.n(), P1);
    ZeroCycle out(factors);
    auto label = [](const Rational& a) { return a < 0 ? "(" + a.str() + ")" : a.str(); };
    PointSymbol one = PointSymbol::named(P1, "1");
    for (const auto& [e, c] : s.terms()) {
        std::vector<PointSymbol> pts, bases(s.n(), one);
        for (const auto& x : e) {
            if (x.is_zero()) throw Error(ErrorKind::ZeroEntry, "symbol entry 0 has no box cycle");
            if (!x.is_constant())
                throw Error(ErrorKind::InvalidInput, "symbol_to_box needs constant entries, got " + x.to_string());
            pts.push_back(PointSymbol::named(P1, label(x.constant())));
        }
        out += box_cycle(pts, bases) * c;
    }
    return out;
}

}  // namespace haj
