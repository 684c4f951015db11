#pragma once

#include "haj/elliptic.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace haj {

// A factor curve.  Elliptic factors carry the curve; P^1 factors (from Milnor symbols) do not.
struct CurveRef {
    std::string id;
    bool base_is_identity = true;
    std::shared_ptr<const EllipticCurve> elliptic;

    static CurveRef of(const EllipticCurve& E, std::string id = {});
    static CurveRef projective_line(std::string id = "P1");
    bool operator==(const CurveRef& o) const { return id == o.id; }
};

class PointSymbol {
public:
    enum class Kind { Base, Named };

    static PointSymbol base(const CurveRef& c);
    static PointSymbol named(const CurveRef& c, std::string id, std::optional<CurvePoint> coords = std::nullopt);

    Kind kind() const { return kind_; }
    bool is_base() const { return kind_ == Kind::Base; }
    bool negated() const { return negated_; }
    const std::string& id() const { return id_; }
    const CurveRef& curve() const { return curve_; }
    // coordinates after applying the negation flag; Base on an elliptic factor is the identity
    std::optional<CurvePoint> coordinates() const;

    PointSymbol neg() const;
    std::string to_string() const;

    friend bool operator==(const PointSymbol& a, const PointSymbol& b) { return a.key() == b.key(); }
    friend bool operator<(const PointSymbol& a, const PointSymbol& b) { return a.key() < b.key(); }

private:
    std::tuple<std::string, int, bool, std::string> key() const { return {curve_.id, int(kind_), negated_, id_}; }

    CurveRef curve_;
    Kind kind_ = Kind::Base;
    bool negated_ = false;
    std::string id_;
    std::optional<CurvePoint> coords_;
};

PointSymbol operator-(const PointSymbol& p);

using PointTuple = std::vector<PointSymbol>;

class ZeroCycle {
public:
    explicit ZeroCycle(std::vector<CurveRef> factors);

    std::size_t n() const { return factors_.size(); }
    const std::vector<CurveRef>& factors() const { return factors_; }
    const std::map<PointTuple, Rational>& terms() const { return terms_; }

    void add(const PointTuple& tuple, const Rational& coeff);
    Rational degree() const;
    bool is_zero() const { return terms_.empty(); }

    ZeroCycle& operator+=(const ZeroCycle& o);
    friend ZeroCycle operator+(ZeroCycle a, const ZeroCycle& b) { return a += b; }
    friend ZeroCycle operator-(ZeroCycle a, const ZeroCycle& b) { return a += b * Rational(-1); }
    friend ZeroCycle operator*(const ZeroCycle& a, const Rational& s);
    friend bool operator==(const ZeroCycle& a, const ZeroCycle& b) {
        return a.factors_ == b.factors_ && a.terms_ == b.terms_;
    }

    std::string to_string() const;

private:
    void check_factors(const ZeroCycle& o) const;

    std::vector<CurveRef> factors_;
    std::map<PointTuple, Rational> terms_;
};

// ((p_1) - (o_1)) x ... x ((p_n) - (o_n))
ZeroCycle box_cycle(const std::vector<PointSymbol>& points, const std::vector<PointSymbol>& bases);

// sigma is 1-based and strictly increasing
ZeroCycle face_projection(const ZeroCycle& Z, const std::vector<int>& sigma);

struct AJValue {
    BigComplex value;  // reduced representative
    PeriodLatticeData lattice;
};

AJValue aj_on_elliptic(const ZeroCycle& Z, const PrecisionCtx& ctx, const PeriodLatticeData* lat = nullptr);

struct FiltrationVerdict {
    bool pass = true;
    std::vector<int> witness;  // violating sigma on failure
    std::vector<LatticeMembership> certificates;
};

FiltrationVerdict filtration_check(const ZeroCycle& Z, int level, const Integer& maxDen, const Integer& maxHeight,
                                   const PrecisionCtx& ctx);

// every point symbol in every tuple negated
ZeroCycle negate_points(const ZeroCycle& Z);
// Z + (-1,-1)_* Z
ZeroCycle kummer_pushpull(const ZeroCycle& Z);

}  // namespace haj
