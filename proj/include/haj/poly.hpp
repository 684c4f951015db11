#pragma once

#include "haj/numkernel.hpp"

#include <string>
#include <utility>
#include <vector>

namespace haj {

// Dense polynomial over Q, coefficients from degree 0 upward, no trailing zeros.
class Poly {
public:
    Poly() = default;
    Poly(const Rational& c);
    Poly(int c) : Poly(Rational(c)) {}
    explicit Poly(std::vector<Rational> coeffs);
    static Poly monomial(const Rational& c, int degree);
    static Poly x() { return monomial(Rational(1), 1); }

    int degree() const { return int(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(int k) const { return k >= 0 && k < int(c_.size()) ? c_[k] : Rational(0); }
    Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

    Poly monic() const;
    Poly derivative() const;
    Rational operator()(const Rational& t) const;
    BigComplex operator()(const BigComplex& z) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator<(const Poly& a, const Poly& b);

    std::string to_string(const std::string& var = "t") const;

private:
    void trim();
    std::vector<Rational> c_;
};

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly operator/(const Poly& a, const Poly& b);  // exact quotient part
Poly operator%(const Poly& a, const Poly& b);
Poly pow(const Poly& a, unsigned e);
// monic gcd; gcd(0, 0) = 0
Poly gcd(const Poly& a, const Poly& b);
// s a + t b = gcd(a, b)
struct ExtGcd {
    Poly g, s, t;
};
ExtGcd ext_gcd(const Poly& a, const Poly& b);
Rational resultant(const Poly& a, const Poly& b);
// product of u over the roots of p, with multiplicity: res(p, u) / lead(p)^deg(u)
Rational root_norm(const Poly& p, const Poly& u);
// monic squarefree factors s_k with a = c * prod s_k^k (Yun)
std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& a);
// pairwise coprime monic squarefree polynomials generating every input multiplicatively
std::vector<Poly> coprime_basis(const std::vector<Poly>& inputs);
// largest e with p^e | a, for nonconstant p and nonzero a
int multiplicity(const Poly& a, const Poly& p);
std::vector<Rational> rational_roots(const Poly& a);

class RationalFunc {
public:
    RationalFunc() : num_(0), den_(1) {}
    RationalFunc(const Rational& c) : num_(c), den_(1) {}
    RationalFunc(int c) : RationalFunc(Rational(c)) {}
    RationalFunc(Poly num, Poly den = Poly(1));

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_one() const { return is_constant() && num_.coeff(0) == 1; }
    Rational constant() const { return num_.coeff(0); }
    // order of vanishing at the place of the monic irreducible-or-coprime p
    int order_at(const Poly& p) const { return multiplicity(num_, p) - multiplicity(den_, p); }
    int order_at_infinity() const { return den_.degree() - num_.degree(); }

    Rational operator()(const Rational& t) const;
    BigComplex operator()(const BigComplex& z) const;
    BigComplex log_derivative(const BigComplex& z) const;

    friend RationalFunc operator*(const RationalFunc& a, const RationalFunc& b);
    friend RationalFunc operator/(const RationalFunc& a, const RationalFunc& b);
    friend RationalFunc operator+(const RationalFunc& a, const RationalFunc& b);
    friend RationalFunc operator-(const RationalFunc& a, const RationalFunc& b);
    friend RationalFunc operator-(const RationalFunc& a) { return RationalFunc(-a.num_, a.den_); }
    friend bool operator==(const RationalFunc& a, const RationalFunc& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator<(const RationalFunc& a, const RationalFunc& b) {
        return a.num_ < b.num_ || (a.num_ == b.num_ && a.den_ < b.den_);
    }

    std::string to_string(const std::string& var = "t") const;

private:
    Poly num_, den_;
};

RationalFunc pow(const RationalFunc& f, int e);

}  // namespace haj
