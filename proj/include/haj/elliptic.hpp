#pragma once

#include "haj/numkernel.hpp"
#include "haj/relations.hpp"

#include <array>
#include <optional>
#include <string>

namespace haj {

// y^2 = 4x^3 - g2 x - g3 over Q
struct EllipticCurve {
    Rational g2, g3;
    std::string label;

    EllipticCurve(Rational g2, Rational g3, std::string label = {});
    // y^2 = x^3 + a x + b, converted by (x, y) -> (x, 2y)
    static EllipticCurve from_short(const Rational& a, const Rational& b, std::string label = {});

    Rational discriminant() const;  // g2^3 - 27 g3^2
    Rational j_invariant() const;
    bool operator==(const EllipticCurve& o) const { return g2 == o.g2 && g3 == o.g3; }
};

struct PeriodLatticeData {
    BigComplex omega_alpha, omega_beta, tau;
    int digits = 0;

    LatticeCoords coords(const BigComplex& z) const;
    // representative with lattice coordinates in [-1/2, 1/2) around `center`
    BigComplex reduce(const BigComplex& z, const BigComplex& center = BigComplex(0)) const;
    // integer lattice coordinates of the nearest lattice vector subtracted by reduce()
    std::array<Integer, 2> lattice_part(const BigComplex& z, const BigComplex& center = BigComplex(0)) const;
    BigComplex vector(const Integer& m, const Integer& n) const;
};

struct CutSpec {
    CutEdge edge;
    BigComplex coefficient;  // the period attached to crossing this cut
};

struct CutSystem {
    PeriodLatticeData lattice;
    BigComplex basepoint_offset;
    std::array<CutSpec, 2> cuts;

    static CutSystem standard(const PeriodLatticeData& lat, const BigComplex& offset = BigComplex(0));
    BigComplex reduce(const BigComplex& z) const { return lattice.reduce(z, basepoint_offset); }
    LatticeCut geometry(CutEdge edge) const;
};

struct CurvePoint {
    enum class Kind { Infinity, Exact, Numeric };
    Kind kind = Kind::Infinity;
    Rational x, y;
    BigComplex nx, ny;

    static CurvePoint infinity() { return {}; }
    static CurvePoint exact(const Rational& x, const Rational& y);
    static CurvePoint numeric(const BigComplex& x, const BigComplex& y);
    bool is_infinity() const { return kind == Kind::Infinity; }
    BigComplex complex_x() const;
    BigComplex complex_y() const;
    bool operator==(const CurvePoint& o) const;
};

bool on_curve(const CurvePoint& p, const EllipticCurve& E, const PrecisionCtx* ctx = nullptr);

struct EisensteinCheck {
    BigComplex g2, g3;
    Real error;  // max relative deviation from the curve's g2, g3
};

// g2, g3 of the lattice from the q-expansions of the Eisenstein series.
EisensteinCheck eisenstein_reconstruct(const PeriodLatticeData& lat, const EllipticCurve& E, const PrecisionCtx& ctx);

PeriodLatticeData compute_periods(const EllipticCurve& E, const PrecisionCtx& ctx);

// Roots of 4x^3 - g2 x - g3 at working precision.
std::array<BigComplex, 3> weierstrass_roots(const EllipticCurve& E, const PrecisionCtx& ctx);

struct WpValue {
    BigComplex p, dp;
};

WpValue weierstrass_p(const BigComplex& z, const PeriodLatticeData& lat, const PrecisionCtx& ctx);

// q-series core shared by the double seed and the multiprecision evaluation.
// z must already be reduced; w1 = omega_alpha.
template <class T>
void wp_qseries(const Complex<T>& z, const Complex<T>& w1, const Complex<T>& tau, const T& eps, Complex<T>& p,
                Complex<T>& dp) {
    const T pi = detail::pi_value<T>();
    Complex<T> u = z * pi / w1;
    Complex<T> q = exp(times_i(tau) * (2 * pi));
    Complex<T> s = sin(u), c = cos(u);
    Complex<T> w = exp(times_i(u) * T(2));  // e^{2iu}
    Complex<T> winv = Complex<T>(T(1)) / w;
    Complex<T> qn = q, wn = w, wninv = winv;
    Complex<T> e2sum, psum, dsum;
    for (int n = 1; n < 100000; ++n) {
        Complex<T> lam = qn / (Complex<T>(T(1)) - qn);
        Complex<T> cs = (wn + wninv) / T(2);
        Complex<T> sn = (wn - wninv) / Complex<T>(T(0), T(2));
        Complex<T> tp = lam * cs * T(n);
        Complex<T> td = lam * sn * T(n) * T(n);
        e2sum += lam * T(n);
        psum += tp;
        dsum += td;
        if (abs(tp) <= eps * (1 + abs(psum)) && abs(td) <= eps * (1 + abs(dsum)) && abs(qn) <= eps) break;
        qn = qn * q;
        wn = wn * w;
        wninv = wninv * winv;
    }
    Complex<T> E2 = Complex<T>(T(1)) - e2sum * T(24);
    Complex<T> k = Complex<T>(pi) / w1;
    Complex<T> k2 = k * k;
    Complex<T> s2 = s * s;
    p = k2 * (-(E2 / T(3)) + Complex<T>(T(1)) / s2 - psum * T(8));
    dp = k2 * k * (-(c * T(2)) / (s2 * s) + dsum * T(16));
}

BigComplex elliptic_log(const CurvePoint& p, const EllipticCurve& E, const PeriodLatticeData& lat,
                        const PrecisionCtx& ctx);

CurvePoint point_neg(const CurvePoint& p);
CurvePoint point_add(const CurvePoint& p, const CurvePoint& q, const EllipticCurve& E);
CurvePoint point_mul(const Integer& n, const CurvePoint& p, const EllipticCurve& E);

struct TorsionResult {
    enum class Verdict { Torsion, NotTorsionUpTo };
    Verdict verdict = Verdict::NotTorsionUpTo;
    int order = 0;  // Torsion only
    int bound = 0;
    // a multiple with non-integral coordinates on an integral model proves infinite order
    bool infinite_order_proven = false;
    std::string proof;
    // elliptic-log evidence that xi is not a rational combination of the periods
    std::optional<LatticeMembership> log_evidence;
    bool torsion() const { return verdict == Verdict::Torsion; }
};

TorsionResult is_torsion(const CurvePoint& p, const EllipticCurve& E, int bound, const PrecisionCtx& ctx,
                         const PeriodLatticeData* lat = nullptr, const Integer& maxHeight = Integer(10000));

std::string rational_to_string(const Rational& q);
Rational parse_rational(const std::string& s);

}  // namespace haj
