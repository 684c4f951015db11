#pragma once

#include "haj/numkernel.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace haj {

using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<Integer, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<Integer, Eigen::Dynamic, 1>;

struct IntegerRelation {
    std::vector<Integer> coeffs;
    Real residual;
    Integer height;
};

// PSLQ on real inputs.  Returns nullopt when the norm bound excludes every relation of
// height <= maxHeight; throws PrecisionExhausted when precision runs out first.
std::optional<IntegerRelation> pslq(const std::vector<Real>& xs, const Integer& maxHeight, const PrecisionCtx& ctx);

// Integral LLL (delta = 99/100) on the rows of `basis`, which must be independent.
void lll_reduce(IntMatrix& basis, const PrecisionCtx* ctx = nullptr);

// Simultaneous integer relation among complex numbers (real and imaginary parts jointly),
// via one LLL reduction.  Same return/throw contract as pslq.
std::optional<IntegerRelation> complex_relation(const std::vector<BigComplex>& xs, const Integer& maxHeight,
                                                const PrecisionCtx& ctx);

// All relations found by the reduction, as a basis of the detected relation lattice.
std::vector<IntegerRelation> complex_relation_basis(const std::vector<BigComplex>& xs, const Integer& maxHeight,
                                                    const PrecisionCtx& ctx);

struct LatticeMembership {
    enum class Verdict { Member, NoRelationUpTo };
    Verdict verdict = Verdict::NoRelationUpTo;
    std::vector<Rational> coefficients;  // per generator, Member only
    Real residual;                       // witness residual of the recombination
    Integer max_height;
    Integer max_den;
    int precision = 0;
    std::size_t kernel_rank = 0;  // independent integer relations among the generators
    bool member() const { return verdict == Verdict::Member; }
};

const char* to_string(LatticeMembership::Verdict v);

// Decides n0*v = sum n_i gens_i with 0 < n0 <= maxDen, |n_i| <= maxHeight, componentwise
// in all 2k real coordinates.  gens[i] has length k.
LatticeMembership lattice_membership(const std::vector<BigComplex>& v, const std::vector<std::vector<BigComplex>>& gens,
                                     const Integer& maxDen, const Integer& maxHeight, const PrecisionCtx& ctx);

struct MembershipData {
    std::vector<BigComplex> v;
    std::vector<std::vector<BigComplex>> gens;
};
using MembershipProducer = std::function<MembershipData(const PrecisionCtx&)>;

struct AmplificationCheck {
    Real residual_low, residual_high;
    bool passed = false;
};

Real recombination_residual(const MembershipData& data, const std::vector<Rational>& coeffs);

// Recomputes the inputs at twice the precision and demands the residual shrink by
// 10^(digits/4), or fall under the doubled tolerance.
AmplificationCheck verify_amplified(const std::vector<Rational>& coeffs, const MembershipProducer& producer,
                                    const PrecisionCtx& ctx);

struct TauRelation {
    Integer A, B, C, D;
    Real residual;
};

// A + B*tau1 - C*tau2 - D*tau1*tau2 = 0, i.e. tau2 = (A + B tau1) / (C + D tau1).
std::optional<TauRelation> detect_tau_relation(const BigComplex& tau1, const BigComplex& tau2,
                                               const Integer& maxHeight, const PrecisionCtx& ctx);

}  // namespace haj
