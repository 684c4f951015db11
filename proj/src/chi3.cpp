#include "haj/invariants.hpp"

#include <algorithm>

namespace haj {

namespace {

// F(t1, t2) = A t1 + B t2 + C on the unit parameter square
struct Affine {
    BigComplex A, B, C;
    BigComplex at(const Real& t1, const Real& t2) const { return A * t1 + B * t2 + C; }
};

Affine affine_of(const BiSpreadMap& m, const BigComplex& P1, const BigComplex& P2,
                 const std::array<BigComplex, 2>& b) {
    BigComplex a = m.m1.value(), c = m.m2.value();
    return {a * P1, c * P2, a * b[0] + c * b[1] + m.translation};
}

struct RealAffine {
    Real g0, g1, g2;
    Real at(const Real& t1, const Real& t2) const { return g0 + g1 * t1 + g2 * t2; }
};

RealAffine coordinate(const Affine& F, const CutSystem& cs, CutEdge e) {
    const PeriodLatticeData& L = cs.lattice;
    LatticeCoords c0 = L.coords(F.C - cs.basepoint_offset), ca = L.coords(F.A), cb = L.coords(F.B);
    if (e == CutEdge::Alpha) return {c0.u, ca.u, cb.u};
    return {c0.v, ca.v, cb.v};
}

Real off_half(const Real& x) {
    Real f = x - Real(1) / 2;
    return abs(f - round(f));
}

using Pt = std::array<Real, 2>;

// Preimage of one cut translate: the segment {g = level} inside the square, oriented so the
// side where g grows lies on the right.  Crossing it rightwards raises the lattice part by `jump`.
struct CutLine {
    RealAffine g;
    Real level;
    Pt p, q;
    BigComplex jump;
};

std::vector<CutLine> cut_lines(const Affine& F, const CutSystem& cs, const Real& near, std::size_t budget) {
    std::vector<CutLine> out;
    for (const CutSpec& spec : cs.cuts) {
        RealAffine g = coordinate(F, cs, spec.edge);
        Real gn = abs(g.g1) + abs(g.g2);
        if (gn < near) {
            if (off_half(g.g0) < near)
                throw Error(ErrorKind::CutGrazing, "a constant map sits on its cut", "perturb the translation");
            continue;
        }
        std::array<Real, 4> vals{g.at(Real(0), Real(0)), g.at(Real(1), Real(0)), g.at(Real(0), Real(1)),
                                 g.at(Real(1), Real(1))};
        Real lo = *std::min_element(vals.begin(), vals.end()), hi = *std::max_element(vals.begin(), vals.end());
        for (Real level = ceil(lo - Real(1) / 2) + Real(1) / 2; level <= hi; level += 1) {
            for (auto& v : vals)
                if (abs(v - level) < near * gn)
                    throw Error(ErrorKind::CutGrazing, "a cut preimage passes through a corner of the parameter square",
                                "perturb the basepoint offset");
            std::vector<Pt> ends;
            if (g.g2 != 0) {
                for (int e = 0; e < 2; ++e) {
                    Real t2 = (level - g.g0 - g.g1 * e) / g.g2;
                    if (t2 > 0 && t2 < 1) ends.push_back({Real(e), t2});
                }
            }
            if (g.g1 != 0) {
                for (int e = 0; e < 2; ++e) {
                    Real t1 = (level - g.g0 - g.g2 * e) / g.g1;
                    if (t1 > 0 && t1 < 1) ends.push_back({t1, Real(e)});
                }
            }
            if (ends.size() != 2) continue;
            CutLine l{g, level, ends[0], ends[1], spec.coefficient};
            // direction (-g2, g1)
            Real s0 = -g.g2 * l.p[0] + g.g1 * l.p[1], s1 = -g.g2 * l.q[0] + g.g1 * l.q[1];
            if (s1 < s0) std::swap(l.p, l.q);
            out.push_back(l);
            if (out.size() > budget)
                throw Error(ErrorKind::StratificationOverflow, "too many cut preimages in the parameter square",
                            "reduce the multipliers or raise the subdivision budget");
        }
    }
    return out;
}

Pt along(const CutLine& l, const Real& s) { return {l.p[0] + (l.q[0] - l.p[0]) * s, l.p[1] + (l.q[1] - l.p[1]) * s}; }

BigComplex lattice_vector(const CutSystem& cs, const BigComplex& z) {
    auto mn = cs.lattice.lattice_part(z, cs.basepoint_offset);
    return cs.lattice.vector(mn[0], mn[1]);
}

struct Setup {
    std::array<Affine, 3> F;
    std::array<const CutSystem*, 3> cuts;
    BigComplex K23;
    std::vector<CutLine> lines1;
    Real near;
};

Setup prepare(const Chi3Spread& sp, const BigComplex& P1, const BigComplex& P2, const std::array<BigComplex, 2>& b,
              const PrecisionCtx& ctx, std::size_t budget) {
    Setup s;
    for (int j = 0; j < 3; ++j) {
        s.F[j] = affine_of(sp.maps[j], P1, P2, b);
        s.cuts[j] = &sp.maps[j].cuts;
    }
    s.K23 = s.F[1].A * s.F[2].B - s.F[2].A * s.F[1].B;
    s.near = sqrt(ctx.tol());
    s.lines1 = cut_lines(s.F[0], *s.cuts[0], s.near, budget);
    return s;
}

}  // namespace

Chi3Pairing chi3_pairing(const Chi3Spread& spread, const BigComplex& P1, const BigComplex& P2,
                         const std::array<BigComplex, 2>& basepoint, const PrecisionCtx& ctx,
                         std::size_t max_double_cuts) {
    WorkingPrecision wp(ctx);
    Setup s = prepare(spread, P1, P2, {lift(basepoint[0]), lift(basepoint[1])}, ctx, max_double_cuts);
    Quadrature quad(ctx);
    Chi3Pairing out;
    out.lines = s.lines1.size();

    // bulk: K23 times the iterated integral of f1, broken where cut preimages of map 1 cross
    if (s.K23.re != 0 || s.K23.im != 0) {
        std::vector<Real> outer;
        for (auto& l : s.lines1)
            for (const Pt* e : {&l.p, &l.q})
                if ((*e)[0] > 0 && (*e)[0] < 1) outer.push_back((*e)[0]);
        ParamFn slice = [&](const Real& t1) {
            std::vector<Real> inner;
            for (auto& l : s.lines1) {
                if (l.g.g2 == 0) continue;
                Real t2 = (l.level - l.g.g0 - l.g.g1 * t1) / l.g.g2;
                if (t2 > 0 && t2 < 1) inner.push_back(t2);
            }
            return quad.integrate_split([&](const Real& t2) { return s.cuts[0]->reduce(s.F[0].at(t1, t2)); },
                                        Real(0), Real(1), inner);
        };
        out.bulk = s.K23 * quad.integrate_split(slice, Real(0), Real(1), outer);
    }

    // single-cut terms along each preimage line, split where map 2 crosses its own cuts
    for (auto& l : s.lines1) {
        Pt d{l.q[0] - l.p[0], l.q[1] - l.p[1]};
        BigComplex dF3 = s.F[2].A * d[0] + s.F[2].B * d[1];
        ParamFn trace = [&](const Real& u) {
            Pt t = along(l, u);
            return s.F[1].at(t[0], t[1]);
        };
        std::vector<Real> splits;
        for (const CutSpec& spec : s.cuts[1]->cuts) {
            RealAffine h = coordinate(s.F[1], *s.cuts[1], spec.edge);
            Real rate = h.g1 * d[0] + h.g2 * d[1];
            if (abs(rate) < s.near) {
                if (off_half(h.at(l.p[0], l.p[1])) < s.near)
                    throw Error(ErrorKind::CutGrazing, "cut preimages of two maps overlap",
                                "perturb a translation or the basepoint offset");
                continue;
            }
            for (const Crossing& x : detect_crossings(trace, s.cuts[1]->geometry(spec.edge), ctx)) {
                if (x.t < s.near || 1 - x.t < s.near)
                    throw Error(ErrorKind::CutGrazing, "double cut point on the boundary of the parameter square",
                                "perturb the basepoint offset");
                Pt t = along(l, x.t);
                BigComplex F3 = s.F[2].at(t[0], t[1]);
                LatticeCoords c3 = s.cuts[2]->lattice.coords(F3 - s.cuts[2]->basepoint_offset);
                if (off_half(c3.u) < s.near || off_half(c3.v) < s.near)
                    throw Error(ErrorKind::CutGrazing, "third map lands on its cut at a double cut point",
                                "perturb a translation");
                out.double_cut += l.jump * spec.coefficient * s.cuts[2]->reduce(F3) * Real(x.orientation);
                splits.push_back(x.t);
                if (++out.double_points > max_double_cuts)
                    throw Error(ErrorKind::StratificationOverflow, "double cut budget exceeded",
                                "raise the subdivision budget");
            }
        }
        std::sort(splits.begin(), splits.end());
        BigComplex line = quad.integrate_split([&](const Real& u) { return s.cuts[1]->reduce(trace(u)) * dF3; },
                                               Real(0), Real(1), splits);
        out.single_cut += l.jump * line;
    }
    out.current = out.bulk - out.single_cut + out.double_cut;
    return out;
}

BigComplex chi3_stokes_oracle(const Chi3Spread& spread, const BigComplex& P1, const BigComplex& P2,
                              const std::array<BigComplex, 2>& basepoint, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    Setup s = prepare(spread, P1, P2, {lift(basepoint[0]), lift(basepoint[1])}, ctx, 1u << 20);
    const Affine &F1 = s.F[0], &F2 = s.F[1], &F3 = s.F[2];
    const Real half = Real(1) / 2;
    BigComplex total = s.K23 * F1.at(half, half);

    // boundary of the square, counterclockwise, with L1 constant between line endpoints
    const std::array<Pt, 5> corner{Pt{Real(0), Real(0)}, Pt{Real(1), Real(0)}, Pt{Real(1), Real(1)},
                                   Pt{Real(0), Real(1)}, Pt{Real(0), Real(0)}};
    auto segment = [&](const Pt& a, const Pt& b) {
        BigComplex f2a = F2.at(a[0], a[1]), f2b = F2.at(b[0], b[1]);
        return (F3.at(b[0], b[1]) - F3.at(a[0], a[1])) * (f2a + f2b) / Real(2);
    };
    BigComplex boundary;
    for (int e = 0; e < 4; ++e) {
        const Pt &a = corner[e], &b = corner[e + 1];
        std::vector<Real> cuts{Real(0), Real(1)};
        for (auto& l : s.lines1) {
            Real ga = l.g.at(a[0], a[1]), gb = l.g.at(b[0], b[1]);
            if (ga == gb) continue;
            Real u = (l.level - ga) / (gb - ga);
            if (u > 0 && u < 1) cuts.push_back(u);
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            Pt x{a[0] + (b[0] - a[0]) * cuts[k], a[1] + (b[1] - a[1]) * cuts[k]};
            Pt y{a[0] + (b[0] - a[0]) * cuts[k + 1], a[1] + (b[1] - a[1]) * cuts[k + 1]};
            Pt m{(x[0] + y[0]) / 2, (x[1] + y[1]) / 2};
            boundary += lattice_vector(*s.cuts[0], F1.at(m[0], m[1])) * segment(x, y);
        }
    }
    total -= boundary;

    // line endpoints and direct intersections with the preimages of map 2's cuts
    std::vector<CutLine> lines2 = cut_lines(F2, *s.cuts[1], s.near, 1u << 20);
    for (auto& l : s.lines1) {
        auto L2F3 = [&](const Pt& t) {
            return lattice_vector(*s.cuts[1], F2.at(t[0], t[1])) * F3.at(t[0], t[1]);
        };
        total += l.jump * (L2F3(l.q) - L2F3(l.p));
        for (auto& m : lines2) {
            Real det = l.g.g1 * m.g.g2 - l.g.g2 * m.g.g1;
            if (abs(det) < s.near) continue;
            Real r1 = l.level - l.g.g0, r2 = m.level - m.g.g0;
            Pt x{(r1 * m.g.g2 - r2 * l.g.g2) / det, (l.g.g1 * r2 - m.g.g1 * r1) / det};
            if (!(x[0] > 0 && x[0] < 1 && x[1] > 0 && x[1] < 1)) continue;
            BigComplex dL2 = det > 0 ? m.jump : -m.jump;
            total -= l.jump * dL2 * lattice_vector(*s.cuts[2], F3.at(x[0], x[1]));
        }
    }
    return total;
}

Chi3Value chi3_box(const Chi3Spread& spread, const PrecisionCtx& ctx, const Chi3Options& opts) {
    spread.validate(ctx);
    WorkingPrecision wp(ctx);
    const PeriodLatticeData& S = spread.source_lattice;
    std::array<BigComplex, 2> b = opts.basepoint
                                      ? *opts.basepoint
                                      : std::array<BigComplex, 2>{S.omega_alpha * Real("0.13271") +
                                                                      S.omega_beta * Real("0.07139"),
                                                                  S.omega_alpha * Real("0.22913") +
                                                                      S.omega_beta * Real("0.17191")};
    const std::array<BigComplex, 2> per{S.omega_alpha, S.omega_beta};
    Chi3Value v;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            v.pairings[2 * i + j] = chi3_pairing(spread, per[i], per[j], b, ctx, opts.max_double_cuts);
    v.values[0] = v.pairings[0].current - v.pairings[3].current;
    v.values[1] = v.pairings[1].current + v.pairings[2].current;
    for (int k = 0; k < 8; ++k) {
        auto pick = [&](int j, int bit) {
            const PeriodLatticeData& L = spread.maps[j].cuts.lattice;
            return bit ? L.omega_beta : L.omega_alpha;
        };
        v.products[k] = pick(0, (k >> 2) & 1) * pick(1, (k >> 1) & 1) * pick(2, k & 1);
    }
    for (auto& x : v.products) v.lattice_gens.push_back({BigComplex(0), x});
    for (auto& x : v.products) v.lattice_gens.push_back({x, BigComplex(0)});
    return v;
}

}  // namespace haj
