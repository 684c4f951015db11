#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <variant>
#include <vector>

namespace haj {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

enum class ErrorKind {
    InvalidInput,
    NonConvergence,
    QuadratureStall,
    TangencySuspected,
    PoleAtInput,
    InversionMismatch,
    PrecisionExhausted,
    FactorMismatch,
    BadIndexSet,
    MissingCoordinates,
    CutGrazing,
    MethodUnsupported,
    StratificationOverflow,
    DegreeTooHigh,
    ZeroEntry,
    Cancelled,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::string hint = {})
        : std::runtime_error(what), kind_(kind), hint_(std::move(hint)) {}
    ErrorKind kind() const { return kind_; }
    const std::string& hint() const { return hint_; }

private:
    ErrorKind kind_;
    std::string hint_;
};

struct PrecisionCtx {
    int digits = 128;
    std::stop_token stop;

    explicit PrecisionCtx(int d = 128, std::stop_token s = {});

    unsigned working_digits() const { return unsigned(digits) + 20; }
    // 10^(-digits*4/5)
    Real tol() const;
    // 10^(-digits*3/5), the relation acceptance threshold
    Real accept() const;
    PrecisionCtx scaled(int factor) const { return PrecisionCtx(digits * factor, stop); }
    void check_cancel() const;
};

// Sets the mpfr default precision for the lifetime of the guard.
class WorkingPrecision {
public:
    explicit WorkingPrecision(const PrecisionCtx& ctx);
    explicit WorkingPrecision(unsigned digits10);
    ~WorkingPrecision();
    WorkingPrecision(const WorkingPrecision&) = delete;
    WorkingPrecision& operator=(const WorkingPrecision&) = delete;

private:
    unsigned saved_;
};

// Copy at the current default precision.
Real lift(const Real& x);
Real real_pi();
Real pow10(long e);
Real from_rational(const Rational& q);
Real from_integer(const Integer& z);
// nearest integer, ties to even
Integer round_to_integer(const Real& r);

namespace detail {
template <class T> T pi_value();
template <> inline double pi_value<double>() { return 3.14159265358979323846; }
template <> inline Real pi_value<Real>() { return real_pi(); }
}  // namespace detail

template <class T>
struct Complex {
    T re{}, im{};

    Complex() : re(0), im(0) {}
    Complex(const T& r) : re(r), im(0) {}
    Complex(const T& r, const T& i) : re(r), im(i) {}
    Complex(int r) : re(r), im(0) {}

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o) { *this = *this * o; return *this; }
    Complex& operator/=(const Complex& o) { *this = *this / o; return *this; }

    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator*(const Complex& a, const T& s) { return {a.re * s, a.im * s}; }
    friend Complex operator*(const T& s, const Complex& a) { return {a.re * s, a.im * s}; }
    friend Complex operator/(const Complex& a, const T& s) { return {a.re / s, a.im / s}; }
    friend Complex operator/(const Complex& a, const Complex& b) {
        T d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
};

using BigComplex = Complex<Real>;

template <class T> Complex<T> conj(const Complex<T>& z) { return {z.re, -z.im}; }
template <class T> T norm2(const Complex<T>& z) { return z.re * z.re + z.im * z.im; }
template <class T> T abs(const Complex<T>& z) {
    using std::sqrt;
    return sqrt(norm2(z));
}
template <class T> T arg(const Complex<T>& z) {
    using std::atan2;
    return atan2(z.im, z.re);
}
template <class T> Complex<T> exp(const Complex<T>& z) {
    using std::cos;
    using std::exp;
    using std::sin;
    T m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}
// principal branch, argument in (-pi, pi]
template <class T> Complex<T> log(const Complex<T>& z) {
    using std::log;
    return {log(abs(z)), arg(z)};
}
template <class T> Complex<T> sqrt(const Complex<T>& z) {
    using std::sqrt;
    T r = abs(z);
    if (r == 0) return {T(0), T(0)};
    if (z.re >= 0) {
        T s = sqrt((r + z.re) / 2);
        return {s, z.im / (2 * s)};
    }
    T t = sqrt((r - z.re) / 2);
    T re = z.im < 0 ? T(-z.im / (2 * t)) : T(z.im / (2 * t));
    return {re, z.im < 0 ? T(-t) : t};
}
template <class T> Complex<T> sin(const Complex<T>& z) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return {sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im)};
}
template <class T> Complex<T> cos(const Complex<T>& z) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return {cos(z.re) * cosh(z.im), -(sin(z.re) * sinh(z.im))};
}
template <class T> Complex<T> ipow(Complex<T> z, unsigned n) {
    Complex<T> r(T(1), T(0));
    while (n) {
        if (n & 1) r = r * z;
        z = z * z;
        n >>= 1;
    }
    return r;
}
template <class T> Complex<T> times_i(const Complex<T>& z) { return {-z.im, z.re}; }

BigComplex lift(const BigComplex& z);
Complex<double> to_double(const BigComplex& z);
BigComplex from_double(const Complex<double>& z);

// Scientific notation with `digits` significant digits; complex as "a+bi".
std::string to_string(const Real& x, int digits);
std::string to_string(const BigComplex& z, int digits);
Real parse_real(const std::string& s);
BigComplex parse_complex(const std::string& s);

// Lattice coordinates: z = u*wa + v*wb with real u, v.
struct LatticeCoords {
    Real u, v;
};
LatticeCoords lattice_coords(const BigComplex& z, const BigComplex& wa, const BigComplex& wb);

// Arithmetic-geometric mean with the right choice of square root.
BigComplex agm(const BigComplex& a, const BigComplex& b, const PrecisionCtx& ctx);

template <class T>
Complex<T> agm_iterate(Complex<T> a, Complex<T> b, const T& tol, int max_steps) {
    for (int k = 0; k < max_steps; ++k) {
        if (abs(a - b) <= tol * abs(a)) {
            Complex<T> an = (a + b) / T(2);
            return an;
        }
        Complex<T> an = (a + b) / T(2);
        Complex<T> bn = sqrt(a * b);
        if (abs(an - bn) > abs(an + bn)) bn = -bn;
        a = an;
        b = bn;
    }
    throw Error(ErrorKind::NonConvergence, "agm did not contract", "check the input branch data");
}

struct CircleAround {
    BigComplex center;
    Real radius;
};
struct LatticeSegment {
    BigComplex start;
    BigComplex direction;
};
struct Polyline {
    std::vector<BigComplex> vertices;
};

// Parameter t runs over [0, 1]; orientation -1 traverses the same trace backwards.
struct ParamPath {
    std::variant<CircleAround, LatticeSegment, Polyline> kind;
    int orientation = 1;

    void validate() const;
    BigComplex point(const Real& t) const;
    BigComplex velocity(const Real& t) const;
    std::vector<Real> breakpoints() const;
};

using ParamFn = std::function<BigComplex(const Real&)>;
using FormFn = std::function<BigComplex(const BigComplex&)>;

struct GaussRule {
    std::vector<Real> nodes, weights;  // on [-1, 1]
};
GaussRule gauss_legendre(unsigned n);

// Adaptive Gauss-Legendre with halving comparison.
class Quadrature {
public:
    explicit Quadrature(const PrecisionCtx& ctx, int max_depth = 48);
    BigComplex integrate(const ParamFn& h, const Real& a, const Real& b) const;
    // integral over [a, b] split at the given interior parameters
    BigComplex integrate_split(const ParamFn& h, const Real& a, const Real& b,
                               std::vector<Real> splits) const;
    const PrecisionCtx& ctx() const { return ctx_; }

private:
    BigComplex rule(const ParamFn& h, const Real& a, const Real& b) const;
    BigComplex adapt(const ParamFn& h, const Real& a, const Real& b, const BigComplex& whole,
                     int depth) const;

    PrecisionCtx ctx_;
    int max_depth_;
    GaussRule rule_;
    Real tol_;
};

BigComplex integrate_interval(const ParamFn& h, const Real& a, const Real& b, const PrecisionCtx& ctx);

// Integral of form(z) dz along the path, split at the given crossing parameters.
BigComplex integrate_path(const FormFn& form, const ParamPath& path, const PrecisionCtx& ctx,
                          std::vector<Real> splits = {});

struct NegativeRealAxis {};
enum class CutEdge { Alpha, Beta };
// The translates of the fundamental-domain edge where the chosen lattice coordinate
// of (z - offset) equals 1/2 + k.
struct LatticeCut {
    BigComplex omega_alpha, omega_beta;
    CutEdge edge = CutEdge::Alpha;
    BigComplex offset;
};
using Cut = std::variant<NegativeRealAxis, LatticeCut>;

struct Crossing {
    Real t;
    int orientation;
};

// Crossings of trace(t), t in [0, 1], with the cut.  NegativeRealAxis: +1 when Im goes
// from + to -.  LatticeCut: +1 when the lattice coordinate increases.
std::vector<Crossing> detect_crossings(const ParamFn& trace, const Cut& cut, const PrecisionCtx& ctx,
                                       int samples = 128);

}  // namespace haj
