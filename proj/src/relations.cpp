#include "haj/relations.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <tuple>

namespace haj {

namespace {

Real to_real(const Integer& z) { return from_integer(z); }

Integer abs_int(const Integer& z) { return z < 0 ? Integer(-z) : z; }

Integer height_of(const std::vector<Integer>& c) {
    Integer h = 0;
    for (auto& x : c) h = std::max(h, abs_int(x));
    return h;
}

// Integer rounding of a/b to the nearest integer, ties away from zero.
Integer round_div(const Integer& a, const Integer& b) {
    Integer num = 2 * a + (((a < 0) != (b < 0)) ? -b : b);
    Integer den = 2 * b;
    Integer q = num / den;  // truncates toward zero
    return q;
}

}  // namespace

std::optional<IntegerRelation> pslq(const std::vector<Real>& xs_in, const Integer& maxHeight, const PrecisionCtx& ctx) {
    const std::size_t n = xs_in.size();
    if (n < 2) throw Error(ErrorKind::InvalidInput, "pslq needs at least two numbers");
    WorkingPrecision wp(ctx);
    std::vector<Real> orig(n);
    for (std::size_t i = 0; i < n; ++i) orig[i] = lift(xs_in[i]);
    Real scale(0);
    for (auto& x : orig) scale = std::max(scale, Real(abs(x)));
    if (scale == 0) throw Error(ErrorKind::InvalidInput, "pslq input is the zero vector");
    for (std::size_t i = 0; i < n; ++i) {
        if (orig[i] == 0) {
            std::vector<Integer> c(n, 0);
            c[i] = 1;
            return IntegerRelation{c, Real(0), Integer(1)};
        }
    }

    const Real tol = ctx.tol();
    const Real accept = ctx.accept() * scale;
    const Real gam = sqrt(Real(4) / 3) + Real(1) / 100;
    const Real height_cap = pow10(ctx.digits / 2);
    const Real sqrt_n = sqrt(Real(n));

    RealVector x(n);
    Real nrm(0);
    for (std::size_t i = 0; i < n; ++i) nrm += orig[i] * orig[i];
    nrm = sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) x(i) = orig[i] / nrm;

    std::vector<Real> s(n);
    for (std::size_t k = 0; k < n; ++k) {
        Real acc(0);
        for (std::size_t j = k; j < n; ++j) acc += x(j) * x(j);
        s[k] = sqrt(acc);
    }
    RealVector y = x / s[0];
    for (std::size_t k = 0; k < n; ++k) s[k] /= s[0];

    RealMatrix H = RealMatrix::Zero(n, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n - 1 && j <= i; ++j) {
            if (i == j)
                H(i, j) = s[j + 1] / s[j];
            else
                H(i, j) = -y(i) * y(j) / (s[j] * s[j + 1]);
        }
    }
    RealMatrix A = RealMatrix::Identity(n, n);
    RealMatrix B = RealMatrix::Identity(n, n);

    auto reduce_row = [&](std::size_t i, std::size_t jmax) {
        for (std::size_t jj = jmax + 1; jj-- > 0;) {
            if (H(jj, jj) == 0) continue;
            Real t = round(H(i, jj) / H(jj, jj));
            if (t == 0) continue;
            y(jj) += t * y(i);
            for (std::size_t k = 0; k <= jj; ++k) H(i, k) -= t * H(jj, k);
            A.row(i) -= t * A.row(jj);
            B.col(jj) += t * B.col(i);
        }
    };
    for (std::size_t i = 1; i < n; ++i) reduce_row(i, std::min(i - 1, n - 2));

    auto try_relation = [&](std::size_t col) -> std::optional<IntegerRelation> {
        std::vector<Integer> c(n);
        Real res(0);
        for (std::size_t j = 0; j < n; ++j) {
            c[j] = round_to_integer(B(j, col));
            res += to_real(c[j]) * orig[j];
        }
        res = abs(res);
        Integer h = height_of(c);
        if (h == 0 || res > accept) return std::nullopt;
        return IntegerRelation{c, res, h};
    };

    const long max_iter = 200L * long(n) * ctx.digits;
    for (long iter = 0; iter < max_iter; ++iter) {
        ctx.check_cancel();
        std::size_t m = 0;
        Real best(-1), g(1);
        for (std::size_t i = 0; i < n - 1; ++i) {
            g *= gam;
            Real v = g * abs(H(i, i));
            if (v > best) {
                best = v;
                m = i;
            }
        }
        std::swap(y(m), y(m + 1));
        H.row(m).swap(H.row(m + 1));
        A.row(m).swap(A.row(m + 1));
        B.col(m).swap(B.col(m + 1));
        if (m + 2 < n) {
            Real t0 = sqrt(H(m, m) * H(m, m) + H(m, m + 1) * H(m, m + 1));
            if (t0 == 0) break;
            Real t1 = H(m, m) / t0, t2 = H(m, m + 1) / t0;
            for (std::size_t i = m; i < n; ++i) {
                Real t3 = H(i, m), t4 = H(i, m + 1);
                H(i, m) = t1 * t3 + t2 * t4;
                H(i, m + 1) = -t2 * t3 + t1 * t4;
            }
        }
        for (std::size_t i = m + 1; i < n; ++i) reduce_row(i, std::min(i - 1, m + 1));

        Real ymin = abs(y(0));
        std::size_t jmin = 0;
        for (std::size_t j = 1; j < n; ++j)
            if (abs(y(j)) < ymin) {
                ymin = abs(y(j));
                jmin = j;
            }
        if (ymin < tol) {
            auto rel = try_relation(jmin);
            if (rel) {
                if (rel->height > maxHeight) return std::nullopt;
                return rel;
            }
        }
        Real hmax(0);
        for (std::size_t j = 0; j < n - 1; ++j) hmax = std::max(hmax, Real(abs(H(j, j))));
        if (hmax == 0) break;
        Real bound = 1 / hmax;
        if (bound / sqrt_n > to_real(maxHeight)) return std::nullopt;
        if (B.cwiseAbs().maxCoeff() > height_cap || A.cwiseAbs().maxCoeff() > height_cap)
            throw Error(ErrorKind::PrecisionExhausted,
                        "pslq exhausted the working precision before excluding relations up to the height bound",
                        "increase --digits");
    }
    throw Error(ErrorKind::PrecisionExhausted, "pslq iteration budget exhausted", "increase --digits");
}

void lll_reduce(IntMatrix& b, const PrecisionCtx* ctx) {
    const Eigen::Index n = b.rows();
    if (n <= 1) return;
    std::vector<Integer> d(n + 1);
    std::vector<std::vector<Integer>> lam(n, std::vector<Integer>(n));
    auto dot = [&](Eigen::Index i, Eigen::Index j) {
        Integer s = 0;
        for (Eigen::Index c = 0; c < b.cols(); ++c) s += b(i, c) * b(j, c);
        return s;
    };
    // d[i+1] corresponds to d_i of the 1-based description; d[0] = 1.
    d[0] = 1;
    d[1] = dot(0, 0);
    if (d[1] == 0) throw Error(ErrorKind::InvalidInput, "lll basis vectors are dependent");
    Eigen::Index k = 1, kmax = 0;

    auto redi = [&](Eigen::Index k, Eigen::Index l) {
        if (abs_int(2 * lam[k][l]) > d[l + 1]) {
            Integer q = round_div(lam[k][l], d[l + 1]);
            b.row(k) -= q * b.row(l);
            lam[k][l] -= q * d[l + 1];
            for (Eigen::Index i = 0; i < l; ++i) lam[k][i] -= q * lam[l][i];
        }
    };
    auto swapi = [&](Eigen::Index k) {
        b.row(k).swap(b.row(k - 1));
        for (Eigen::Index j = 0; j < k - 1; ++j) std::swap(lam[k][j], lam[k - 1][j]);
        Integer l = lam[k][k - 1];
        Integer B = (d[k - 1] * d[k + 1] + l * l) / d[k];
        for (Eigen::Index i = k + 1; i <= kmax; ++i) {
            Integer t = lam[i][k];
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - l * t) / d[k];
            lam[i][k - 1] = (B * t + l * lam[i][k]) / d[k + 1];
        }
        d[k] = B;
    };

    while (k < n) {
        if (ctx) ctx->check_cancel();
        if (k > kmax) {
            kmax = k;
            for (Eigen::Index j = 0; j <= k; ++j) {
                Integer u = dot(k, j);
                for (Eigen::Index i = 0; i < j; ++i) u = (d[i + 1] * u - lam[k][i] * lam[j][i]) / d[i];
                if (j < k)
                    lam[k][j] = u;
                else {
                    d[k + 1] = u;
                    if (u == 0) throw Error(ErrorKind::InvalidInput, "lll basis vectors are dependent");
                }
            }
        }
        redi(k, k - 1);
        // Lovasz condition with delta = 99/100
        if (100 * d[k + 1] * d[k - 1] < 99 * d[k] * d[k] - 100 * lam[k][k - 1] * lam[k][k - 1]) {
            swapi(k);
            k = std::max<Eigen::Index>(1, k - 1);
        } else {
            for (Eigen::Index l = k - 2; l >= 0; --l) redi(k, l);
            ++k;
        }
    }
}

const char* to_string(LatticeMembership::Verdict v) {
    return v == LatticeMembership::Verdict::Member ? "Member" : "NoRelationUpTo";
}

namespace {

struct Embedding {
    std::vector<RealVector> xs;  // m+1 points of R^N
    Real scale;                   // max |coordinate|
};

struct Reduction {
    IntMatrix coeffs;              // reduced rows, coefficient part
    std::vector<bool> relation;    // row is a verified relation
    std::vector<Real> residuals;
    Real min_free_gs;              // smallest Gram-Schmidt norm beyond the relation span
    bool any_free = false;
};

Real inf_norm(const RealVector& v) {
    Real m(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, Real(abs(v(i))));
    return m;
}

Reduction reduce_embedding(const Embedding& e, const Integer& coeff_cap, const PrecisionCtx& ctx) {
    const Eigen::Index m1 = Eigen::Index(e.xs.size());
    const Eigen::Index N = e.xs.front().size();
    const Real C = pow10(ctx.digits);
    IntMatrix basis = IntMatrix::Zero(m1, m1 + N);
    for (Eigen::Index i = 0; i < m1; ++i) {
        basis(i, i) = 1;
        for (Eigen::Index c = 0; c < N; ++c) basis(i, m1 + c) = round_to_integer(C * e.xs[i](c));
    }
    lll_reduce(basis, &ctx);

    Reduction r;
    r.coeffs = basis.leftCols(m1);
    r.relation.assign(m1, false);
    r.residuals.assign(m1, Real(0));
    const Real thr = ctx.accept() * std::max(Real(1), e.scale);
    for (Eigen::Index i = 0; i < m1; ++i) {
        RealVector acc = RealVector::Zero(N);
        Integer h = 0;
        for (Eigen::Index j = 0; j < m1; ++j) {
            if (r.coeffs(i, j) == 0) continue;
            acc += to_real(r.coeffs(i, j)) * e.xs[j];
            h = std::max(h, abs_int(r.coeffs(i, j)));
        }
        r.residuals[i] = inf_norm(acc);
        r.relation[i] = h > 0 && h <= coeff_cap && r.residuals[i] <= thr;
    }

    // Gram-Schmidt with the relation rows first
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < m1; ++i)
        if (r.relation[i]) order.push_back(i);
    const std::size_t nrel = order.size();
    for (Eigen::Index i = 0; i < m1; ++i)
        if (!r.relation[i]) order.push_back(i);
    std::vector<RealVector> gs;
    for (std::size_t a = 0; a < order.size(); ++a) {
        RealVector v(m1 + N);
        for (Eigen::Index c = 0; c < m1 + N; ++c) v(c) = to_real(basis(order[a], c));
        for (auto& u : gs) v -= (v.dot(u) / u.dot(u)) * u;
        if (a >= nrel) {
            Real nv = sqrt(v.dot(v));
            if (!r.any_free || nv < r.min_free_gs) r.min_free_gs = nv;
            r.any_free = true;
        }
        gs.push_back(v);
    }
    return r;
}

// Unimodular elimination on column 0: returns (member row or empty, kernel rows).
std::pair<std::optional<IntVector>, std::vector<IntVector>> split_relations(std::vector<IntVector> rows) {
    std::vector<IntVector> kernel;
    std::vector<IntVector> active;
    for (auto& r : rows) (r(0) == 0 ? kernel : active).push_back(r);
    while (active.size() > 1) {
        std::sort(active.begin(), active.end(),
                  [](const IntVector& a, const IntVector& b) { return abs_int(a(0)) < abs_int(b(0)); });
        IntVector& piv = active.front();
        std::vector<IntVector> next{piv};
        for (std::size_t i = 1; i < active.size(); ++i) {
            Integer q = active[i](0) / piv(0);
            IntVector r = active[i] - q * piv;
            (r(0) == 0 ? kernel : next).push_back(r);
        }
        active = next;
    }
    if (active.empty()) return {std::nullopt, kernel};
    IntVector m = active.front();
    if (m(0) < 0) m = -m;
    return {m, kernel};
}

// Babai nearest-plane reduction of w against the (LLL-reduced) kernel rows.
IntVector babai(IntVector w, std::vector<IntVector> kernel) {
    if (kernel.empty()) return w;
    IntMatrix K(Eigen::Index(kernel.size()), w.size());
    for (std::size_t i = 0; i < kernel.size(); ++i) K.row(Eigen::Index(i)) = kernel[i].transpose();
    lll_reduce(K);
    const Eigen::Index r = K.rows(), n = K.cols();
    std::vector<RealVector> gs;
    for (Eigen::Index i = 0; i < r; ++i) {
        RealVector v(n);
        for (Eigen::Index c = 0; c < n; ++c) v(c) = to_real(K(i, c));
        for (auto& u : gs) v -= (v.dot(u) / u.dot(u)) * u;
        gs.push_back(v);
    }
    for (Eigen::Index i = r; i-- > 0;) {
        RealVector wr(n);
        for (Eigen::Index c = 0; c < n; ++c) wr(c) = to_real(w(c));
        Integer q = round_to_integer(wr.dot(gs[i]) / gs[i].dot(gs[i]));
        if (q != 0) w -= q * K.row(i).transpose();
    }
    return w;
}

Embedding embed(const std::vector<BigComplex>& v, const std::vector<std::vector<BigComplex>>& gens) {
    const std::size_t k = v.size();
    Embedding e;
    e.scale = Real(0);
    auto push = [&](const std::vector<BigComplex>& z) {
        RealVector x(2 * k);
        for (std::size_t c = 0; c < k; ++c) {
            x(2 * c) = lift(z[c].re);
            x(2 * c + 1) = lift(z[c].im);
        }
        e.scale = std::max(e.scale, inf_norm(x));
        e.xs.push_back(x);
    };
    push(v);
    for (auto& g : gens) push(g);
    return e;
}

Real certification_bound(std::size_t m, std::size_t N, const Integer& maxDen, const Integer& maxHeight) {
    Real den = to_real(maxDen), h = to_real(maxHeight);
    Real coeff = sqrt(den * den + Real(m) * h * h);
    Real tail = sqrt(Real(N)) * (1 + den + Real(m) * h);
    return coeff + tail;
}

}  // namespace

LatticeMembership lattice_membership(const std::vector<BigComplex>& v, const std::vector<std::vector<BigComplex>>& gens,
                                     const Integer& maxDen, const Integer& maxHeight, const PrecisionCtx& ctx) {
    if (gens.empty()) throw Error(ErrorKind::InvalidInput, "lattice_membership needs generators");
    if (v.empty()) throw Error(ErrorKind::InvalidInput, "lattice_membership needs a nonempty vector");
    for (auto& g : gens)
        if (g.size() != v.size()) throw Error(ErrorKind::InvalidInput, "generator length differs from target length");
    if (maxDen < 1 || maxHeight < 1) throw Error(ErrorKind::InvalidInput, "bounds must be positive");
    WorkingPrecision wp(ctx);
    const std::size_t m = gens.size();
    Embedding e = embed(v, gens);
    Integer cap = std::max(maxDen, maxHeight) * Integer(m + 1);
    Reduction red = reduce_embedding(e, cap, ctx);

    LatticeMembership out;
    out.max_den = maxDen;
    out.max_height = maxHeight;
    out.precision = ctx.digits;

    std::vector<IntVector> rels;
    for (Eigen::Index i = 0; i < red.coeffs.rows(); ++i)
        if (red.relation[i]) rels.push_back(red.coeffs.row(i).transpose());
    auto [member, kernel] = split_relations(rels);
    out.kernel_rank = kernel.size();

    if (member) {
        IntVector w = babai(*member, kernel);
        Integer n0 = w(0);
        Integer h = 0;
        for (Eigen::Index i = 1; i < w.size(); ++i) h = std::max(h, abs_int(w(i)));
        if (n0 <= maxDen && h <= maxHeight) {
            out.verdict = LatticeMembership::Verdict::Member;
            out.coefficients.resize(m);
            for (std::size_t i = 0; i < m; ++i) out.coefficients[i] = Rational(Integer(-w(Eigen::Index(i) + 1)), n0);
            MembershipData d{v, gens};
            out.residual = recombination_residual(d, out.coefficients);
            return out;
        }
    }
    if (red.any_free && red.min_free_gs <= certification_bound(m, 2 * v.size(), maxDen, maxHeight))
        throw Error(ErrorKind::PrecisionExhausted,
                    "lattice reduction cannot exclude relations up to the requested bounds at this precision",
                    "increase --digits or lower --max-height/--max-den");
    out.verdict = LatticeMembership::Verdict::NoRelationUpTo;
    Real best(-1);
    for (Eigen::Index i = 0; i < red.coeffs.rows(); ++i)
        if (!red.relation[i] && (best < 0 || red.residuals[i] < best)) best = red.residuals[i];
    out.residual = best < 0 ? Real(0) : best;
    return out;
}

Real recombination_residual(const MembershipData& d, const std::vector<Rational>& coeffs) {
    Real worst(0);
    for (std::size_t c = 0; c < d.v.size(); ++c) {
        BigComplex acc = lift(d.v[c]);
        for (std::size_t i = 0; i < d.gens.size(); ++i) {
            if (coeffs[i] == 0) continue;
            acc -= lift(d.gens[i][c]) * from_rational(coeffs[i]);
        }
        worst = std::max(worst, abs(acc));
    }
    return worst;
}

AmplificationCheck verify_amplified(const std::vector<Rational>& coeffs, const MembershipProducer& producer,
                                    const PrecisionCtx& ctx) {
    AmplificationCheck a;
    {
        WorkingPrecision wp(ctx);
        a.residual_low = recombination_residual(producer(ctx), coeffs);
    }
    PrecisionCtx hi = ctx.scaled(2);
    WorkingPrecision wp(hi);
    a.residual_high = recombination_residual(producer(hi), coeffs);
    Real shrink = lift(a.residual_low) * pow10(-ctx.digits / 4);
    a.passed = a.residual_high <= shrink || a.residual_high <= hi.tol();
    return a;
}

std::vector<IntegerRelation> complex_relation_basis(const std::vector<BigComplex>& xs, const Integer& maxHeight,
                                                    const PrecisionCtx& ctx) {
    if (xs.size() < 2) throw Error(ErrorKind::InvalidInput, "relation search needs at least two numbers");
    WorkingPrecision wp(ctx);
    Embedding e;
    e.scale = Real(0);
    for (auto& z : xs) {
        RealVector x(2);
        x(0) = lift(z.re);
        x(1) = lift(z.im);
        e.scale = std::max(e.scale, inf_norm(x));
        e.xs.push_back(x);
    }
    Reduction red = reduce_embedding(e, maxHeight, ctx);
    std::vector<IntegerRelation> out;
    for (Eigen::Index i = 0; i < red.coeffs.rows(); ++i) {
        if (!red.relation[i]) continue;
        IntegerRelation r;
        for (Eigen::Index j = 0; j < red.coeffs.cols(); ++j) r.coeffs.push_back(red.coeffs(i, j));
        r.height = height_of(r.coeffs);
        r.residual = red.residuals[i];
        out.push_back(r);
    }
    if (out.empty() && red.any_free &&
        red.min_free_gs <= certification_bound(xs.size() - 1, 2, maxHeight, maxHeight))
        throw Error(ErrorKind::PrecisionExhausted,
                    "lattice reduction cannot exclude relations up to the height bound at this precision",
                    "increase --digits");
    return out;
}

std::optional<IntegerRelation> complex_relation(const std::vector<BigComplex>& xs, const Integer& maxHeight,
                                                const PrecisionCtx& ctx) {
    auto basis = complex_relation_basis(xs, maxHeight, ctx);
    if (basis.empty()) return std::nullopt;
    auto best = std::min_element(basis.begin(), basis.end(),
                                 [](const IntegerRelation& a, const IntegerRelation& b) { return a.height < b.height; });
    IntegerRelation r = *best;
    for (auto& c : r.coeffs)
        if (c != 0) {
            if (c < 0)
                for (auto& d : r.coeffs) d = -d;
            break;
        }
    return r;
}

std::optional<TauRelation> detect_tau_relation(const BigComplex& tau1, const BigComplex& tau2, const Integer& maxHeight,
                                               const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    BigComplex t1 = lift(tau1), t2 = lift(tau2);
    if (!(t1.im > 0) || !(t2.im > 0)) throw Error(ErrorKind::InvalidInput, "tau must lie in the upper half plane");
    std::vector<BigComplex> xs{BigComplex(1), t1, -t2, -(t1 * t2)};
    auto basis = complex_relation_basis(xs, maxHeight, ctx);
    if (basis.empty()) return std::nullopt;

    // small combinations of the relation basis, ranked by (height, l1, |D|, |A|)
    const std::size_t r = basis.size();
    std::vector<int> c(r, -2);
    std::optional<std::array<Integer, 4>> best;
    auto key = [](const std::array<Integer, 4>& v) {
        Integer h = 0, l1 = 0;
        for (auto& x : v) {
            h = std::max(h, abs_int(x));
            l1 += abs_int(x);
        }
        return std::make_tuple(h, l1, abs_int(v[3]), abs_int(v[0]));
    };
    while (true) {
        std::array<Integer, 4> v{0, 0, 0, 0};
        for (std::size_t i = 0; i < r; ++i)
            for (int j = 0; j < 4; ++j) v[j] += c[i] * basis[i].coeffs[j];
        Integer g = 0;
        for (auto& x : v) g = gcd(g, abs_int(x));
        if (g != 0) {
            for (auto& x : v) x /= g;
            for (auto& x : v)
                if (x != 0) {
                    if (x < 0)
                        for (auto& y : v) y = -y;
                    break;
                }
            // tau2 = (B tau1 + A) / (D tau1 + C) needs B*C - A*D != 0
            bool nondeg = v[1] * v[2] - v[0] * v[3] != 0;
            if (nondeg && (!best || key(v) < key(*best))) {
                Integer h = std::get<0>(key(v));
                if (h <= maxHeight) best = v;
            }
        }
        std::size_t i = 0;
        while (i < r && c[i] == 2) c[i++] = -2;
        if (i == r) break;
        ++c[i];
    }
    if (!best) return std::nullopt;
    auto& v = *best;
    BigComplex res = BigComplex(to_real(v[0])) + t1 * to_real(v[1]) - t2 * to_real(v[2]) - t1 * t2 * to_real(v[3]);
    return TauRelation{v[0], v[1], v[2], v[3], abs(res)};
}

}  // namespace haj
