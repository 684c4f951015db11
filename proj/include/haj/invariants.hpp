#pragma once

#include "haj/cycles.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace haj {

struct GaussianInteger {
    Integer re, im;

    GaussianInteger(long r = 0, long i = 0) : re(r), im(i) {}
    GaussianInteger(Integer r, Integer i) : re(std::move(r)), im(std::move(i)) {}
    BigComplex value() const;
    bool is_zero() const { return re == 0 && im == 0; }
    bool is_gaussian() const { return im != 0; }
    std::string to_string() const;
    bool operator==(const GaussianInteger&) const = default;
};

// t -> multiplier * t + translation on universal covers, landing on `target`.
struct SpreadMap {
    GaussianInteger multiplier;
    BigComplex translation;
    EllipticCurve target;
    CutSystem cuts;  // cuts.lattice holds the target periods

    static SpreadMap identity(const EllipticCurve& E, const CutSystem& cuts);
    static SpreadMap constant(const EllipticCurve& E, const CutSystem& cuts, const BigComplex& value);
    static SpreadMap affine(const EllipticCurve& E, const CutSystem& cuts, GaussianInteger m, const BigComplex& c);

    BigComplex apply(const BigComplex& t) const { return multiplier.value() * t + translation; }
    bool is_identity_on(const EllipticCurve& source) const;
    bool is_constant() const { return multiplier.is_zero(); }
};

struct BoxSpreadCycle {
    EllipticCurve source;
    PeriodLatticeData source_lattice;
    std::vector<SpreadMap> maps;

    // multipliers carry the source lattice into each target lattice; Gaussian ones need tau = i
    void validate(const PrecisionCtx& ctx) const;
};

enum class Chi2Method { PathIntegral, ClosedForm, Both };
const char* to_string(Chi2Method m);

// Products of the two factors' periods, ordered (aa, ab, ba, bb).
using PeriodProducts = std::array<BigComplex, 4>;
PeriodProducts period_products(const PeriodLatticeData& l1, const PeriodLatticeData& l2);
// The eight generators of the Q-lattice in C^2: four (0, P_k) then four (P_k, 0).
std::vector<std::vector<BigComplex>> chi2_lattice_generators(const PeriodProducts& p);

struct Chi2Options {
    // start of both generator paths in the source plane; a generic default is used when unset
    std::optional<BigComplex> basepoint;
    int crossing_samples = 64;
};

struct Chi2Value {
    BigComplex value_alpha, value_beta;
    PeriodProducts products;
    std::vector<std::vector<BigComplex>> lattice_gens;
    Chi2Method method = Chi2Method::PathIntegral;

    // path-integral route only: the integral before the lattice bookkeeping is removed,
    // raw = value + sum correction[k] * lattice_gens[k]
    BigComplex raw_alpha, raw_beta;
    std::vector<Integer> correction;
    BigComplex basepoint;
    std::size_t crossings = 0;
    std::optional<Real> method_gap;  // Both only
};

Chi2Value chi2_box(const BoxSpreadCycle& spread, Chi2Method method, const PrecisionCtx& ctx,
                   const Chi2Options& opts = {});

LatticeMembership chi2_reduce(const Chi2Value& v, const Rational& scale, const Integer& maxDen,
                              const Integer& maxHeight, const PrecisionCtx& ctx);

// chi3 source: two independent parameters s1, s2 on the same curve.
struct BiSpreadMap {
    GaussianInteger m1, m2;
    BigComplex translation;
    EllipticCurve target;
    CutSystem cuts;

    BigComplex apply(const BigComplex& s1, const BigComplex& s2) const {
        return m1.value() * s1 + m2.value() * s2 + translation;
    }
};

struct Chi3Spread {
    EllipticCurve source;
    PeriodLatticeData source_lattice;
    std::array<BiSpreadMap, 3> maps;

    void validate(const PrecisionCtx& ctx) const;
};

struct Chi3Options {
    std::optional<std::array<BigComplex, 2>> basepoint;
    std::size_t max_double_cuts = 4096;
};

// Evaluation of the 2-current on the product cycle (P1 in s1) x (P2 in s2) of the source.
struct Chi3Pairing {
    BigComplex current;  // bulk - single-cut + double-cut terms
    BigComplex bulk, single_cut, double_cut;
    std::size_t lines = 0, double_points = 0;
};

struct Chi3Value {
    // on alpha x alpha - beta x beta, then alpha x beta + beta x alpha
    std::array<BigComplex, 2> values;
    std::array<Chi3Pairing, 4> pairings;  // (aa, ab, ba, bb)
    std::array<BigComplex, 8> products;   // triple period products, index bits (j1 j2 j3), 0 = alpha
    std::vector<std::vector<BigComplex>> lattice_gens;
};

Chi3Value chi3_box(const Chi3Spread& spread, const PrecisionCtx& ctx, const Chi3Options& opts = {});
Chi3Pairing chi3_pairing(const Chi3Spread& spread, const BigComplex& P1, const BigComplex& P2,
                         const std::array<BigComplex, 2>& basepoint, const PrecisionCtx& ctx,
                         std::size_t max_double_cuts = 4096);

// Independent evaluation of the same pairing after moving every lattice jump to the boundary
// of the parameter square; uses exact segment integrals and direct line intersections.
BigComplex chi3_stokes_oracle(const Chi3Spread& spread, const BigComplex& P1, const BigComplex& P2,
                              const std::array<BigComplex, 2>& basepoint, const PrecisionCtx& ctx);

enum class ClassifierCase {
    RankFourCM_Unconditional,
    OneFactorCM_Unconditional,
    IsogenousNonCM_Unconditional,
    NonIsogenousNonCM_Conditional,
};
const char* to_string(ClassifierCase c);
// what the case means for nonvanishing of chi2, in words
const char* case_statement(ClassifierCase c);

struct ClassifierVerdict {
    ClassifierCase verdict = ClassifierCase::NonIsogenousNonCM_Conditional;
    std::array<std::optional<IntegerRelation>, 2> cm;  // relation among 1, tau, tau^2
    std::optional<TauRelation> isogeny;
    std::array<bool, 2> cm_undetected_at_precision{false, false};
    bool isogeny_undetected_at_precision = false;
    std::array<BigComplex, 2> tau;
    Integer max_height;
    int precision = 0;
};

ClassifierVerdict classify_case(const EllipticCurve& E1, const PeriodLatticeData& l1, const EllipticCurve& E2,
                                const PeriodLatticeData& l2, const Integer& maxHeight, const PrecisionCtx& ctx);

struct Psi2Verdict {
    enum class Kind { Nontrivial, ZeroClass, Inconclusive };
    Kind kind = Kind::Inconclusive;
    CurvePoint reduced;  // the point q with N*W ~ (q) - (o)
    Integer multiple;    // N clearing the coefficient denominators
    std::optional<TorsionResult> torsion;
    std::string certificate;
};
const char* to_string(Psi2Verdict::Kind k);

Psi2Verdict psi2_nonvanishing(const PointSymbol& generic_p, const ZeroCycle& W, int bound, const PrecisionCtx& ctx);

}  // namespace haj
