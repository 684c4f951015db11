#include "haj/cycles.hpp"

#include <sstream>

namespace haj {

CurveRef CurveRef::of(const EllipticCurve& E, std::string id) {
    CurveRef c;
    c.id = id.empty() ? (E.label.empty() ? "g2=" + rational_to_string(E.g2) + ",g3=" + rational_to_string(E.g3) : E.label)
                      : std::move(id);
    c.base_is_identity = true;
    c.elliptic = std::make_shared<EllipticCurve>(E);
    return c;
}

CurveRef CurveRef::projective_line(std::string id) {
    CurveRef c;
    c.id = std::move(id);
    c.base_is_identity = false;
    return c;
}

PointSymbol PointSymbol::base(const CurveRef& c) {
    PointSymbol p;
    p.curve_ = c;
    p.kind_ = Kind::Base;
    p.id_ = "o";
    return p;
}

PointSymbol PointSymbol::named(const CurveRef& c, std::string id, std::optional<CurvePoint> coords) {
    if (id.empty() || id == "o" || id.front() == '-')
        throw Error(ErrorKind::InvalidInput, "point id '" + id + "' is reserved or empty");
    if (coords) {
        if (!c.elliptic) throw Error(ErrorKind::InvalidInput, "coordinates given on a non-elliptic factor " + c.id);
        if (!on_curve(*coords, *c.elliptic))
            throw Error(ErrorKind::InvalidInput, "point " + id + " is not on curve " + c.id);
    }
    PointSymbol p;
    p.curve_ = c;
    p.kind_ = Kind::Named;
    p.id_ = std::move(id);
    p.coords_ = std::move(coords);
    return p;
}

std::optional<CurvePoint> PointSymbol::coordinates() const {
    if (kind_ == Kind::Base) {
        if (curve_.elliptic && curve_.base_is_identity) return CurvePoint::infinity();
        return std::nullopt;
    }
    if (!coords_) return std::nullopt;
    return negated_ ? point_neg(*coords_) : *coords_;
}

PointSymbol PointSymbol::neg() const {
    PointSymbol p = *this;
    if (kind_ == Kind::Base && curve_.base_is_identity) return p;
    p.negated_ = !negated_;
    return p;
}

PointSymbol operator-(const PointSymbol& p) { return p.neg(); }

std::string PointSymbol::to_string() const { return (negated_ ? "-" : "") + id_; }

ZeroCycle::ZeroCycle(std::vector<CurveRef> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw Error(ErrorKind::InvalidInput, "a cycle needs at least one factor");
}

void ZeroCycle::add(const PointTuple& tuple, const Rational& coeff) {
    if (tuple.size() != factors_.size())
        throw Error(ErrorKind::FactorMismatch, "tuple of length " + std::to_string(tuple.size()) + " on " +
                                                   std::to_string(factors_.size()) + " factors");
    for (std::size_t j = 0; j < tuple.size(); ++j)
        if (!(tuple[j].curve() == factors_[j]))
            throw Error(ErrorKind::FactorMismatch,
                        "point " + tuple[j].to_string() + " lives on " + tuple[j].curve().id + ", factor " +
                            std::to_string(j + 1) + " is " + factors_[j].id);
    if (coeff == 0) return;
    auto [it, fresh] = terms_.emplace(tuple, coeff);
    if (!fresh) {
        it->second += coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

Rational ZeroCycle::degree() const {
    Rational d = 0;
    for (auto& [t, c] : terms_) d += c;
    return d;
}

void ZeroCycle::check_factors(const ZeroCycle& o) const {
    if (!(factors_ == o.factors_)) throw Error(ErrorKind::FactorMismatch, "cycles live on different products");
}

ZeroCycle& ZeroCycle::operator+=(const ZeroCycle& o) {
    check_factors(o);
    for (auto& [t, c] : o.terms_) add(t, c);
    return *this;
}

ZeroCycle operator*(const ZeroCycle& a, const Rational& s) {
    ZeroCycle r(a.factors_);
    if (s == 0) return r;
    for (auto& [t, c] : a.terms_) r.terms_.emplace(t, c * s);
    return r;
}

std::string ZeroCycle::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [t, c] : terms_) {
        Rational a = c;
        if (!first) os << (a < 0 ? " - " : " + ");
        else if (a < 0) os << "-";
        if (a < 0) a = -a;
        if (a != 1) os << rational_to_string(a) << "*";
        os << "(";
        for (std::size_t j = 0; j < t.size(); ++j) os << (j ? "," : "") << t[j].to_string();
        os << ")";
        first = false;
    }
    return os.str();
}

ZeroCycle box_cycle(const std::vector<PointSymbol>& points, const std::vector<PointSymbol>& bases) {
    if (points.empty() || points.size() != bases.size())
        throw Error(ErrorKind::FactorMismatch, "box cycle needs equally many points and bases, at least one");
    std::vector<CurveRef> factors;
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (!(points[j].curve() == bases[j].curve()))
            throw Error(ErrorKind::FactorMismatch, "point and base of factor " + std::to_string(j + 1) +
                                                       " are on different curves");
        factors.push_back(points[j].curve());
    }
    ZeroCycle Z(factors);
    for (std::size_t j = 0; j < points.size(); ++j)
        if (points[j] == bases[j]) return Z;
    const std::size_t n = points.size();
    for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
        PointTuple t(n, points[0]);
        int nb = 0;
        for (std::size_t j = 0; j < n; ++j) {
            bool b = (mask >> j) & 1;
            t[j] = b ? bases[j] : points[j];
            nb += b;
        }
        Z.add(t, Rational(nb % 2 ? -1 : 1));
    }
    return Z;
}

ZeroCycle face_projection(const ZeroCycle& Z, const std::vector<int>& sigma) {
    if (sigma.empty()) throw Error(ErrorKind::BadIndexSet, "empty index set");
    std::vector<CurveRef> factors;
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        if (sigma[k] < 1 || std::size_t(sigma[k]) > Z.n())
            throw Error(ErrorKind::BadIndexSet, "index " + std::to_string(sigma[k]) + " outside 1.." +
                                                    std::to_string(Z.n()));
        if (k && sigma[k] <= sigma[k - 1]) throw Error(ErrorKind::BadIndexSet, "indices must strictly increase");
        factors.push_back(Z.factors()[sigma[k] - 1]);
    }
    ZeroCycle out(factors);
    for (auto& [t, c] : Z.terms()) {
        PointTuple s;
        for (int i : sigma) s.push_back(t[i - 1]);
        out.add(s, c);
    }
    return out;
}

AJValue aj_on_elliptic(const ZeroCycle& Z, const PrecisionCtx& ctx, const PeriodLatticeData* lat) {
    if (Z.n() != 1) throw Error(ErrorKind::InvalidInput, "AJ needs a cycle on one curve");
    const CurveRef& c = Z.factors()[0];
    if (!c.elliptic) throw Error(ErrorKind::InvalidInput, "factor " + c.id + " is not elliptic");
    if (Z.degree() != 0) throw Error(ErrorKind::InvalidInput, "AJ needs a degree-0 cycle");
    WorkingPrecision wp(ctx);
    AJValue out{BigComplex(0), lat ? *lat : compute_periods(*c.elliptic, ctx)};
    for (auto& [t, coeff] : Z.terms()) {
        auto pt = t[0].coordinates();
        if (!pt)
            throw Error(ErrorKind::MissingCoordinates, "point " + t[0].to_string() + " has no coordinates",
                        "very general points are handled by spread maps");
        if (pt->is_infinity()) continue;
        out.value += elliptic_log(*pt, *c.elliptic, out.lattice, ctx) * from_rational(coeff);
    }
    out.value = out.lattice.reduce(out.value);
    return out;
}

FiltrationVerdict filtration_check(const ZeroCycle& Z, int level, const Integer& maxDen, const Integer& maxHeight,
                                   const PrecisionCtx& ctx) {
    if (level != 1 && level != 2) throw Error(ErrorKind::InvalidInput, "filtration level must be 1 or 2");
    FiltrationVerdict v;
    if (Z.degree() != 0) {
        v.pass = false;
        return v;
    }
    if (level == 1) return v;
    for (int j = 1; j <= int(Z.n()); ++j) {
        ZeroCycle P = face_projection(Z, {j});
        if (P.degree() != 0) {
            v.pass = false;
            v.witness = {j};
            return v;
        }
        if (P.is_zero()) continue;
        WorkingPrecision wp(ctx);
        AJValue aj = aj_on_elliptic(P, ctx);
        auto m = lattice_membership({aj.value}, {{aj.lattice.omega_alpha}, {aj.lattice.omega_beta}}, maxDen,
                                    maxHeight, ctx);
        v.certificates.push_back(m);
        if (!m.member()) {
            v.pass = false;
            v.witness = {j};
            return v;
        }
    }
    return v;
}

ZeroCycle negate_points(const ZeroCycle& Z) {
    ZeroCycle out(Z.factors());
    for (auto& [t, c] : Z.terms()) {
        PointTuple s;
        for (auto& p : t) s.push_back(p.neg());
        out.add(s, c);
    }
    return out;
}

ZeroCycle kummer_pushpull(const ZeroCycle& Z) {
    if (Z.n() != 2) throw Error(ErrorKind::InvalidInput, "the Kummer identity lives on a product of two curves");
    return Z + negate_points(Z);
}

}  // namespace haj
