#include "haj/poly.hpp"

#include <algorithm>
#include <sstream>

namespace haj {

Poly::Poly(const Rational& c) {
    if (c != 0) c_.push_back(c);
}

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly Poly::monomial(const Rational& c, int degree) {
    std::vector<Rational> v(std::size_t(degree) + 1, Rational(0));
    v.back() = c;
    return Poly(std::move(v));
}

void Poly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    Poly r = *this;
    Rational l = lead();
    for (auto& c : r.c_) c /= l;
    return r;
}

Poly Poly::derivative() const {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * Rational(int(k)));
    return Poly(std::move(d));
}

Rational Poly::operator()(const Rational& t) const {
    Rational r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * t + *it;
    return r;
}

BigComplex Poly::operator()(const BigComplex& z) const {
    BigComplex r(Real(0));
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * z + BigComplex(from_rational(*it));
    return r;
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t k = 0; k < a.c_.size(); ++k) v[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) v[k] += b.c_[k];
    return Poly(std::move(v));
}

Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& c : r.c_) c = -c;
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(v));
}

bool operator<(const Poly& a, const Poly& b) {
    if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
    for (std::size_t k = a.c_.size(); k-- > 0;)
        if (a.c_[k] != b.c_[k]) return a.c_[k] < b.c_[k];
    return false;
}

std::string Poly::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        Rational c = c_[k];
        if (c == 0) continue;
        bool neg = c < 0;
        Rational m = neg ? Rational(-c) : c;
        os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
        first = false;
        if (k == 0 || m != 1) os << m.str();
        if (k > 0 && m != 1) os << "*";
        if (k > 0) os << var;
        if (k > 1) os << "^" << k;
    }
    return os.str();
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw Error(ErrorKind::InvalidInput, "polynomial division by zero");
    std::vector<Rational> r = a.coeffs();
    int db = b.degree();
    Rational lb = b.lead();
    std::vector<Rational> q(std::max(0, a.degree() - db + 1), Rational(0));
    for (int k = a.degree(); k >= db; --k) {
        Rational c = r[k] / lb;
        if (c == 0) continue;
        q[k - db] = c;
        for (int j = 0; j <= db; ++j) r[k - db + j] -= c * b.coeffs()[j];
    }
    r.resize(std::size_t(std::max(0, std::min(int(r.size()), db))));
    return {Poly(std::move(q)), Poly(std::move(r))};
}

Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }
Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

Poly pow(const Poly& a, unsigned e) {
    Poly r(1), b = a;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

Poly gcd(const Poly& a, const Poly& b) {
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = x % y;
        x = std::move(y);
        y = std::move(r);
    }
    return x.monic();
}

ExtGcd ext_gcd(const Poly& a, const Poly& b) {
    Poly r0 = a, r1 = b, s0(1), s1, t0, t1(1);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        Poly s = s0 - q * s1, t = t0 - q * t1;
        s0 = std::move(s1);
        s1 = std::move(s);
        t0 = std::move(t1);
        t1 = std::move(t);
    }
    if (r0.is_zero()) return {r0, s0, t0};
    Rational l = r0.lead();
    Poly inv(Rational(1) / l);
    return {r0 * inv, s0 * inv, t0 * inv};
}

namespace {
Rational rpow(Rational b, int e) {
    Rational r = 1;
    if (e < 0) {
        b = Rational(1) / b;
        e = -e;
    }
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}
}  // namespace

Rational resultant(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return 0;
    int m = a.degree(), n = b.degree();
    if (n == 0) return rpow(b.lead(), m);
    if (m == 0) return rpow(a.lead(), n);
    if (m < n) {
        Rational r = resultant(b, a);
        return (m * n) % 2 ? Rational(-r) : r;
    }
    Poly r = a % b;
    if (r.is_zero()) return 0;
    Rational s = rpow(b.lead(), m - r.degree()) * resultant(b, r);
    return (m * n) % 2 ? Rational(-s) : s;
}

Rational root_norm(const Poly& p, const Poly& u) {
    return resultant(p, u) / rpow(p.lead(), std::max(0, u.degree()));
}

std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& a) {
    std::vector<std::pair<Poly, int>> out;
    if (a.degree() < 1) return out;
    Poly f = a.monic();
    Poly d = f.derivative();
    Poly g = gcd(f, d);
    Poly b = f / g, c = d / g - b.derivative();
    for (int k = 1; b.degree() > 0; ++k) {
        Poly h = gcd(b, c);
        if (h.degree() > 0) out.emplace_back(h, k);
        b = b / h;
        c = c / h - b.derivative();
    }
    return out;
}

std::vector<Poly> coprime_basis(const std::vector<Poly>& inputs) {
    std::vector<Poly> work;
    for (const Poly& p : inputs)
        for (auto& [s, k] : squarefree_decomposition(p)) work.push_back(s);
    std::vector<Poly> basis;
    while (!work.empty()) {
        Poly p = work.back();
        work.pop_back();
        if (p.degree() < 1) continue;
        bool split = false;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (basis[i] == p) {
                split = true;
                break;
            }
            Poly g = gcd(basis[i], p);
            if (g.degree() < 1) continue;
            Poly b = basis[i];
            basis.erase(basis.begin() + long(i));
            work.push_back(g);
            work.push_back((b / g).monic());
            work.push_back((p / g).monic());
            split = true;
            break;
        }
        if (!split) basis.push_back(p);
    }
    std::sort(basis.begin(), basis.end());
    return basis;
}

int multiplicity(const Poly& a, const Poly& p) {
    if (a.is_zero() || p.degree() < 1) throw Error(ErrorKind::InvalidInput, "multiplicity needs nonzero a and nonconstant p");
    int e = 0;
    Poly x = a;
    for (;;) {
        auto [q, r] = divmod(x, p);
        if (!r.is_zero()) return e;
        x = std::move(q);
        ++e;
    }
}

namespace {
std::vector<Integer> divisors(Integer n) {
    if (n < 0) n = -n;
    std::vector<Integer> d;
    for (Integer k = 1; k * k <= n; ++k)
        if (n % k == 0) {
            d.push_back(k);
            if (k * k != n) d.push_back(n / k);
        }
    return d;
}
}  // namespace

std::vector<Rational> rational_roots(const Poly& a) {
    std::vector<Rational> roots;
    if (a.degree() < 1) return roots;
    Poly p = a;
    int low = 0;
    while (p.coeff(low) == 0) ++low;
    if (low > 0) roots.push_back(0);
    std::vector<Rational> c(p.coeffs().begin() + low, p.coeffs().end());
    Integer l = 1;
    for (auto& x : c) l = lcm(l, denominator(x));
    std::vector<Integer> z;
    for (auto& x : c) z.push_back(numerator(x * Rational(l)));
    if (z.size() < 2) return roots;
    Poly q(std::move(c));
    for (const Integer& u : divisors(z.front()))
        for (const Integer& v : divisors(z.back()))
            for (int s : {1, -1}) {
                Rational r(u, v);
                if (s < 0) r = -r;
                if (q(r) == 0 && std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
            }
    std::sort(roots.begin(), roots.end());
    return roots;
}

RationalFunc::RationalFunc(Poly num, Poly den) {
    if (den.is_zero()) throw Error(ErrorKind::InvalidInput, "rational function with zero denominator");
    if (num.is_zero()) {
        num_ = Poly();
        den_ = Poly(1);
        return;
    }
    Poly g = gcd(num, den);
    num = num / g;
    den = den / g;
    Poly s(Rational(1) / den.lead());
    num_ = num * s;
    den_ = den * s;
}

Rational RationalFunc::operator()(const Rational& t) const {
    Rational d = den_(t);
    if (d == 0) throw Error(ErrorKind::PoleAtInput, "rational function evaluated at a pole");
    return num_(t) / d;
}

BigComplex RationalFunc::operator()(const BigComplex& z) const { return num_(z) / den_(z); }

BigComplex RationalFunc::log_derivative(const BigComplex& z) const {
    BigComplex r(Real(0));
    if (num_.degree() > 0) r += num_.derivative()(z) / num_(z);
    if (den_.degree() > 0) r -= den_.derivative()(z) / den_(z);
    return r;
}

RationalFunc operator*(const RationalFunc& a, const RationalFunc& b) {
    return RationalFunc(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunc operator/(const RationalFunc& a, const RationalFunc& b) {
    if (b.is_zero()) throw Error(ErrorKind::InvalidInput, "division by the zero function");
    return RationalFunc(a.num_ * b.den_, a.den_ * b.num_);
}

RationalFunc operator+(const RationalFunc& a, const RationalFunc& b) {
    return RationalFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunc operator-(const RationalFunc& a, const RationalFunc& b) { return a + (-b); }

RationalFunc pow(const RationalFunc& f, int e) {
    if (e >= 0) return RationalFunc(pow(f.num(), unsigned(e)), pow(f.den(), unsigned(e)));
    return RationalFunc(pow(f.den(), unsigned(-e)), pow(f.num(), unsigned(-e)));
}

std::string RationalFunc::to_string(const std::string& var) const {
    if (den_ == Poly(1)) return num_.to_string(var);
    auto wrap = [&](const Poly& p) {
        std::string s = p.to_string(var);
        return p.degree() > 0 && p.coeffs().size() > 1 ? "(" + s + ")" : s;
    };
    return wrap(num_) + "/" + wrap(den_);
}

}  // namespace haj
