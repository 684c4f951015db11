#pragma once

#include "haj/cycles.hpp"
#include "haj/poly.hpp"
#include "haj/relations.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace haj {

using SymbolEntries = std::vector<RationalFunc>;

// Formal Q-combination of Milnor symbols {f_1, ..., f_n} over Q(t).
class MilnorSymbolSum {
public:
    explicit MilnorSymbolSum(std::size_t n = 2) : n_(n) {}

    std::size_t n() const { return n_; }
    const std::map<SymbolEntries, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // drops zero coefficients, zero-free entries are required, entries equal to 1 vanish
    void add(const SymbolEntries& entries, const Rational& coeff = Rational(1));

    MilnorSymbolSum& operator+=(const MilnorSymbolSum& o);
    friend MilnorSymbolSum operator+(MilnorSymbolSum a, const MilnorSymbolSum& b) { return a += b; }
    friend MilnorSymbolSum operator*(const Rational& c, const MilnorSymbolSum& s);
    friend bool operator==(const MilnorSymbolSum& a, const MilnorSymbolSum& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

    std::string to_string() const;

private:
    std::size_t n_;
    std::map<SymbolEntries, Rational> terms_;
};

MilnorSymbolSum symbol(const SymbolEntries& entries, const Rational& coeff = Rational(1));

// Normal form for: Steinberg deletion, multilinear expansion over a common coprime
// basis and the primes of the constants, sorting with sign, {a, a} -> {a, -1}.
MilnorSymbolSum steinberg_normalize(const MilnorSymbolSum& s);

struct Place {
    bool infinity = false;
    Poly minpoly;                        // finite places: squarefree, one orbit of roots
    std::optional<BigComplex> approx;    // a chosen root, for a numeric image
    static Place at_infinity() { return {true, Poly(), std::nullopt}; }
    static Place rational(const Rational& a);
    static Place algebraic(Poly minpoly, std::optional<BigComplex> approx = std::nullopt);
    std::string to_string() const;
};

struct TameValue {
    Poly residue;  // element of Q[t]/(minpoly); a constant for rational places and infinity
    Poly minpoly;
    int ord_f = 0, ord_g = 0;
    std::optional<Rational> rational;  // set when the residue field is Q
    std::optional<BigComplex> numeric;
    std::string to_string() const;
};

// (-1)^{ab} f^b / g^a at the place, a = ord f, b = ord g.
TameValue tame_symbol(const RationalFunc& f, const RationalFunc& g, const Place& place);

struct PlaceSymbol {
    Place place;
    int degree = 1;
    int ord_f = 0, ord_g = 0;
    Rational norm;  // norm of the tame symbol down to Q
};

struct WeilCheck {
    bool holds = false;
    Rational product;
    std::vector<PlaceSymbol> places;
};

// Product over all places of the normed tame symbols, exact.  Throws DegreeTooHigh if a
// numerator or denominator has degree above max_degree.
WeilCheck weil_reciprocity_check(const RationalFunc& f, const RationalFunc& g, int max_degree = 6);

struct RegulatorReport {
    BigComplex value;
    BigComplex reduced;   // value minus the nearest integer multiple of (2 pi i)^2
    BigComplex integral;  // the log f dlog g part
    BigComplex delta;     // the -2 pi i sum log g part
    std::size_t crossings = 0;
    LatticeMembership evidence;  // value against {(2 pi i)^2}
};

// int_loop log f dlog g - 2 pi i sum_{loop meets f^{-1}(R^-)} eps log g, principal branches.
RegulatorReport regulator_eval(const RationalFunc& f, const RationalFunc& g, const ParamPath& loop,
                               const PrecisionCtx& ctx, const Integer& maxDen = Integer(1000),
                               const Integer& maxHeight = Integer(10000));

// Distance from z to the nearest integer multiple of (2 pi i)^2.
Real distance_mod_two_pi_i_squared(const BigComplex& z);

// Box cycle on (P^1)^n with base point 1 for a sum of symbols with constant entries.
ZeroCycle symbol_to_box(const MilnorSymbolSum& s);

}  // namespace haj
