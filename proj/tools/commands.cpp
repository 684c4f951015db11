#include "commands.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <random>
#include <thread>

#ifndef HAJ_PRESET_DIR
#define HAJ_PRESET_DIR "presets"
#endif

namespace haj::cli {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (digits < 32) throw Error(ErrorKind::InvalidInput, "config.digits: must be at least 32", "pass --digits 32 or more");
    if (max_height <= 0) throw Error(ErrorKind::InvalidInput, "config.max_height: must be positive");
    if (max_den <= 0) throw Error(ErrorKind::InvalidInput, "config.max_den: must be positive");
    if (torsion_bound <= 0) throw Error(ErrorKind::InvalidInput, "config.torsion_bound: must be positive");
    if (format != "json" && format != "text") throw Error(ErrorKind::InvalidInput, "config.format: json or text");
}

json RunConfig::to_json() const {
    return json{{"digits", digits},
                {"max_height", max_height.str()},
                {"max_den", max_den.str()},
                {"torsion_bound", torsion_bound}};
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::InvalidInput, path + ": " + what, "see `haj <command> --help` for the input schema");
}

const json* opt(const json& a, const char* key) { return a.contains(key) ? &a.at(key) : nullptr; }

EllipticCurve source_curve(const json& a, const char* key = "curve") {
    if (auto* c = opt(a, key)) return read_curve(*c, std::string("args.") + key);
    if (a.contains("g2") || a.contains("g3"))
        return EllipticCurve(read_rational(require(a, "g2", "args"), "args.g2"), read_rational(require(a, "g3", "args"), "args.g3"));
    bad(std::string("args.") + key, "missing (or pass --g2 and --g3)");
}

int digits_out(const Session& s) { return s.config.digits; }

BigComplex lattice_point(const json& j, const std::string& path, const PeriodLatticeData& lat) {
    if (!j.is_array() || j.size() != 2) bad(path, "expected lattice coordinates [u, v]");
    return lat.omega_alpha * read_real(j[0], path + "[0]") + lat.omega_beta * read_real(j[1], path + "[1]");
}

// A translation: a complex literal, or an object summing scale*log(point), periods and value,
// optionally multiplied by i.
BigComplex read_shift(const json& j, const std::string& path, const EllipticCurve& T, const PeriodLatticeData& tl,
                      Session& s) {
    if (j.is_null()) return BigComplex(0);
    if (!j.is_object()) return read_complex(j, path);
    BigComplex z(0);
    if (auto* p = opt(j, "point")) {
        CurvePoint pt = read_point(*p, path + ".point");
        if (!on_curve(pt, T)) bad(path + ".point", "not on the target curve");
        Rational k = j.contains("scale") ? read_rational(j.at("scale"), path + ".scale") : Rational(1);
        z += elliptic_log(pt, T, tl, s.ctx) * from_rational(k);
    }
    if (auto* p = opt(j, "periods")) {
        if (!p->is_array() || p->size() != 2) bad(path + ".periods", "expected [u, v]");
        z += tl.omega_alpha * from_rational(read_rational((*p)[0], path + ".periods[0]")) +
             tl.omega_beta * from_rational(read_rational((*p)[1], path + ".periods[1]"));
    }
    if (auto* v = opt(j, "value")) z += read_complex(*v, path + ".value");
    if (j.value("times_i", false)) z = times_i(z);
    return z;
}

struct Target {
    EllipticCurve curve;
    PeriodLatticeData lattice;
};

Target read_target(const json& m, const std::string& path, const EllipticCurve& source, const PeriodLatticeData& sl,
                   Session& s) {
    if (auto* t = opt(m, "target")) {
        EllipticCurve T = read_curve(*t, path + ".target");
        if (T == source) return {source, sl};
        return {T, s.periods(T)};
    }
    return {source, sl};
}

const std::vector<std::array<const char*, 2>> kOffsets = {
    {"0", "0"}, {"0.0731", "0.0417"}, {"0.0613", "0.0291"}, {"-0.0519", "0.0383"}};

// Map k gets its target cut system moved by k times the offset, so coincident maps separate.
template <class Attempt>
auto with_cut_offsets(const json& a, const std::string& flag, Attempt attempt) {
    if (auto* o = opt(a, flag.c_str())) {
        if (!o->is_array() || o->size() != 2) bad("args." + flag, "expected lattice coordinates [u, v]");
        return attempt(read_real((*o)[0], "args." + flag + "[0]"), read_real((*o)[1], "args." + flag + "[1]"));
    }
    for (std::size_t k = 0;; ++k) {
        try {
            return attempt(Real(kOffsets[k][0]), Real(kOffsets[k][1]));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CutGrazing || k + 1 == kOffsets.size()) throw;
        }
    }
}

json membership_block(const LatticeMembership& m, int d) { return to_json(m, d); }

json cmd_periods(const json& a, Session& s) {
    EllipticCurve E = source_curve(a);
    PeriodLatticeData lat = s.periods(E);
    EisensteinCheck chk = eisenstein_reconstruct(lat, E, s.ctx);
    int d = digits_out(s);
    return json{{"curve", {{"g2", E.g2.str()}, {"g3", E.g3.str()}}},
                {"j_invariant", E.j_invariant().str()},
                {"periods", to_json(lat, d)},
                {"paper_case", "period lattice of y^2 = 4x^3 - g2 x - g3 with tau in the upper half plane"},
                {"certificate",
                 {{"eisenstein_g2", to_json(chk.g2, 30)},
                  {"eisenstein_g3", to_json(chk.g3, 30)},
                  {"relative_error", to_json(chk.error, 6)}}}};
}

json cmd_ellog(const json& a, Session& s) {
    EllipticCurve E = source_curve(a);
    PeriodLatticeData lat = s.periods(E);
    CurvePoint p = read_point(require(a, "point", "args"), "args.point");
    if (!on_curve(p, E)) bad("args.point", "not on the curve");
    BigComplex xi = elliptic_log(p, E, lat, s.ctx);
    LatticeCoords c = lat.coords(xi);
    int d = digits_out(s);
    return json{{"point", to_json(p, d)},
                {"log", to_json(xi, d)},
                {"lattice_coordinates", {to_json(c.u, d), to_json(c.v, d)}},
                {"paper_case", "elliptic logarithm, reduced to the fundamental parallelogram"}};
}

json cmd_torsion(const json& a, Session& s) {
    EllipticCurve E = source_curve(a);
    PeriodLatticeData lat = s.periods(E);
    CurvePoint p = read_point(require(a, "point", "args"), "args.point");
    int bound = a.contains("bound") ? std::stoi(a.at("bound").is_string() ? a.at("bound").get<std::string>() : a.at("bound").dump())
                                    : s.config.torsion_bound;
    TorsionResult t = is_torsion(p, E, bound, s.ctx, &lat, s.config.max_height);
    json j = to_json(t, digits_out(s));
    return json{{"point", to_json(p, digits_out(s))},
                {"verdict", j["verdict"]},
                {"paper_case", "torsion test for a point of E(Q)"},
                {"certificate", j}};
}

Chi2Method read_method(const json& a) {
    std::string m = a.value("method", "both");
    if (m == "path") return Chi2Method::PathIntegral;
    if (m == "closed") return Chi2Method::ClosedForm;
    if (m == "both") return Chi2Method::Both;
    bad("args.method", "one of path, closed, both");
}

json products_json(const PeriodProducts& p, int d) {
    json j = json::array();
    for (const auto& z : p) j.push_back(to_json(z, d));
    return j;
}

json gens_json(const std::vector<std::vector<BigComplex>>& g, int d) {
    json j = json::array();
    for (const auto& v : g) {
        json row = json::array();
        for (const auto& z : v) row.push_back(to_json(z, d));
        j.push_back(row);
    }
    return j;
}

json cmd_chi2(const json& a, Session& s) {
    EllipticCurve E = source_curve(a);
    PeriodLatticeData lat = s.periods(E);
    const json& maps = require(a, "map", "args");
    if (!maps.is_array() || maps.size() != 2) bad("args.map", "expected two spread maps");
    std::vector<Target> targets;
    std::vector<GaussianInteger> mult;
    std::vector<BigComplex> shift;
    for (std::size_t k = 0; k < 2; ++k) {
        std::string path = "args.map[" + std::to_string(k) + "]";
        const json& m = maps[k];
        if (!m.is_object()) bad(path, "expected {\"mult\": .., \"shift\": .., \"target\": ..}");
        targets.push_back(read_target(m, path, E, lat, s));
        mult.push_back(m.contains("mult") ? read_gaussian(m.at("mult"), path + ".mult") : GaussianInteger(1));
        shift.push_back(read_shift(m.contains("shift") ? m.at("shift") : json(), path + ".shift", targets[k].curve,
                                   targets[k].lattice, s));
    }
    Chi2Method method = read_method(a);
    Rational scale = a.contains("scale") ? read_rational(a.at("scale"), "args.scale") : Rational(1);
    Chi2Options o;
    if (auto* b = opt(a, "basepoint")) o.basepoint = lattice_point(*b, "args.basepoint", lat);

    json offset_used;
    Chi2Value v = with_cut_offsets(a, "cut-offset", [&](const Real& u, const Real& w) {
        std::vector<SpreadMap> sm;
        for (std::size_t k = 0; k < 2; ++k) {
            const auto& tl = targets[k].lattice;
            CutSystem cuts = CutSystem::standard(tl, (tl.omega_alpha * u + tl.omega_beta * w) * Real(int(k)));
            sm.push_back(SpreadMap::affine(targets[k].curve, cuts, mult[k], shift[k]));
        }
        BoxSpreadCycle sp{E, lat, sm};
        Chi2Value r = chi2_box(sp, method, s.ctx, o);
        offset_used = json::array({to_string(u, 6), to_string(w, 6)});
        return r;
    });
    LatticeMembership m = chi2_reduce(v, scale, s.config.max_den, s.config.max_height, s.ctx);
    int d = digits_out(s);
    json out{{"verdict", to_string(m.verdict)},
             {"paper_case", "chi2 of the box cycle B(p, q) spread over a curve, modulo the lattice of period products"},
             {"method", to_string(v.method)},
             {"value", {{"alpha", to_json(v.value_alpha, d)}, {"beta", to_json(v.value_beta, d)}}},
             {"scale", scale.str()}};
    if (v.method_gap) out["method_gap"] = to_json(*v.method_gap, 6);
    out["period_products"] = products_json(v.products, d);
    out["lattice_generators"] = gens_json(v.lattice_gens, d);
    if (!v.correction.empty()) {
        json corr = json::array();
        for (const auto& c : v.correction) corr.push_back(c.str());
        out["path"] = {{"raw_alpha", to_json(v.raw_alpha, d)},
                       {"raw_beta", to_json(v.raw_beta, d)},
                       {"correction", corr},
                       {"basepoint", to_json(v.basepoint, d)},
                       {"crossings", v.crossings},
                       {"cut_offset", offset_used}};
    }
    out["certificate"] = membership_block(m, d);
    return out;
}

json cmd_chi3(const json& a, Session& s) {
    EllipticCurve E = source_curve(a);
    PeriodLatticeData lat = s.periods(E);
    const json& maps = require(a, "map", "args");
    if (!maps.is_array() || maps.size() != 3) bad("args.map", "expected three spread maps");
    std::vector<Target> targets;
    std::vector<std::array<GaussianInteger, 2>> mult;
    std::vector<BigComplex> shift;
    for (std::size_t k = 0; k < 3; ++k) {
        std::string path = "args.map[" + std::to_string(k) + "]";
        const json& m = maps[k];
        if (!m.is_object()) bad(path, "expected {\"m1\": .., \"m2\": .., \"shift\": ..}");
        targets.push_back(read_target(m, path, E, lat, s));
        mult.push_back({m.contains("m1") ? read_gaussian(m.at("m1"), path + ".m1") : GaussianInteger(0),
                        m.contains("m2") ? read_gaussian(m.at("m2"), path + ".m2") : GaussianInteger(0)});
        shift.push_back(read_shift(m.contains("shift") ? m.at("shift") : json(), path + ".shift", targets[k].curve,
                                   targets[k].lattice, s));
    }
    Chi3Options o;
    if (auto* b = opt(a, "basepoint")) {
        if (!b->is_array() || b->size() != 2) bad("args.basepoint", "expected two lattice points [[u, v], [u, v]]");
        o.basepoint = std::array<BigComplex, 2>{lattice_point((*b)[0], "args.basepoint[0]", lat),
                                                lattice_point((*b)[1], "args.basepoint[1]", lat)};
    }
    if (auto* c = opt(a, "max-double-cuts")) o.max_double_cuts = std::stoul(c->is_string() ? c->get<std::string>() : c->dump());

    json offset_used;
    Chi3Value v = with_cut_offsets(a, "cut-offset", [&](const Real& u, const Real& w) {
        auto map = [&](std::size_t k) {
            const auto& tl = targets[k].lattice;
            return BiSpreadMap{mult[k][0], mult[k][1], shift[k], targets[k].curve,
                               CutSystem::standard(tl, (tl.omega_alpha * u + tl.omega_beta * w) * Real(int(k)))};
        };
        Chi3Value r = chi3_box(Chi3Spread{E, lat, {map(0), map(1), map(2)}}, s.ctx, o);
        offset_used = json::array({to_string(u, 6), to_string(w, 6)});
        return r;
    });
    LatticeMembership m = lattice_membership({v.values[0], v.values[1]}, v.lattice_gens, s.config.max_den,
                                             s.config.max_height, s.ctx);
    int d = digits_out(s);
    json pairings = json::array();
    for (const auto& p : v.pairings)
        pairings.push_back({{"current", to_json(p.current, d)},
                            {"bulk", to_json(p.bulk, d)},
                            {"single_cut", to_json(p.single_cut, d)},
                            {"double_cut", to_json(p.double_cut, d)},
                            {"lines", p.lines},
                            {"double_points", p.double_points}});
    json prods = json::array();
    for (const auto& z : v.products) prods.push_back(to_json(z, d));
    return json{{"verdict", to_string(m.verdict)},
                {"paper_case", "chi3 of a triple box cycle spread over a surface, modulo triple period products"},
                {"values", {to_json(v.values[0], d), to_json(v.values[1], d)}},
                {"pairings", pairings},
                {"triple_products", prods},
                {"cut_offset", offset_used},
                {"certificate", membership_block(m, d)}};
}

json classify_one(const EllipticCurve& E1, const EllipticCurve& E2, Session& s) {
    PeriodLatticeData l1 = s.periods(E1), l2 = s.periods(E2);
    ClassifierVerdict v = classify_case(E1, l1, E2, l2, s.config.max_height, s.ctx);
    int d = digits_out(s);
    json cm = json::array();
    for (int j = 0; j < 2; ++j) {
        json c{{"tau", to_json(v.tau[j], d)}};
        if (v.cm[j]) c["relation"] = to_json(*v.cm[j], 6);
        c["cm"] = bool(v.cm[j]);
        c["undetected_at_precision"] = v.cm_undetected_at_precision[j];
        cm.push_back(c);
    }
    json iso{{"isogenous", bool(v.isogeny)}, {"undetected_at_precision", v.isogeny_undetected_at_precision}};
    if (v.isogeny)
        iso["relation"] = {{"A", v.isogeny->A.str()},
                           {"B", v.isogeny->B.str()},
                           {"C", v.isogeny->C.str()},
                           {"D", v.isogeny->D.str()},
                           {"residual", to_json(v.isogeny->residual, 6)}};
    return json{{"curves", {{{"g2", E1.g2.str()}, {"g3", E1.g3.str()}}, {{"g2", E2.g2.str()}, {"g3", E2.g3.str()}}}},
                {"verdict", to_string(v.verdict)},
                {"paper_case", case_statement(v.verdict)},
                {"certificate",
                 {{"cm", cm}, {"isogeny", iso}, {"max_height", v.max_height.str()}, {"precision", v.precision}}}};
}

json cmd_classify(const json& a, Session& s) {
    if (auto* pairs = opt(a, "pairs")) {
        if (!pairs->is_array()) bad("args.pairs", "expected [[curve1, curve2], ..]");
        std::vector<std::pair<EllipticCurve, EllipticCurve>> in;
        for (std::size_t k = 0; k < pairs->size(); ++k) {
            std::string path = "args.pairs[" + std::to_string(k) + "]";
            const json& p = (*pairs)[k];
            if (!p.is_array() || p.size() != 2) bad(path, "expected [curve1, curve2]");
            in.emplace_back(read_curve(p[0], path + "[0]"), read_curve(p[1], path + "[1]"));
        }
        std::vector<json> out(in.size());
        parallel_for(in.size(), [&](std::size_t k) {
            WorkingPrecision wp(s.ctx);
            out[k] = classify_one(in[k].first, in[k].second, s);
        });
        return json{{"results", out}};
    }
    EllipticCurve E1 = source_curve(a, "curve1");
    EllipticCurve E2 = a.contains("curve2") ? read_curve(a.at("curve2"), "args.curve2") : E1;
    return classify_one(E1, E2, s);
}

json cmd_psi2(const json& a, Session& s) {
    EllipticCurve E = source_curve(a);
    CurveRef C = CurveRef::of(E, "E");
    const json& cyc = require(a, "cycle", "args");
    if (!cyc.is_array()) bad("args.cycle", "expected [{\"coeff\": .., \"point\": ..}, ..]");
    ZeroCycle W({C});
    for (std::size_t k = 0; k < cyc.size(); ++k) {
        std::string path = "args.cycle[" + std::to_string(k) + "]";
        Rational c = read_rational(require(cyc[k], "coeff", path), path + ".coeff");
        CurvePoint p = read_point(require(cyc[k], "point", path), path + ".point");
        if (p.is_infinity())
            W.add({PointSymbol::base(C)}, c);
        else
            W.add({PointSymbol::named(C, "(" + p.x.str() + "," + p.y.str() + ")", p)}, c);
    }
    PointSymbol gp = PointSymbol::named(CurveRef::of(E, "E1"), a.value("generic", "p"));
    Psi2Verdict v = psi2_nonvanishing(gp, W, s.config.torsion_bound, s.ctx);
    int d = digits_out(s);
    json cert{{"text", v.certificate}, {"multiple", v.multiple.str()}, {"reduced_point", to_json(v.reduced, d)}};
    if (v.torsion) cert["torsion"] = to_json(*v.torsion, d);
    return json{{"cycle", W.to_string()},
                {"verdict", to_string(v.kind)},
                {"paper_case", "Psi2 of B(p, W) for generic p: nontrivial exactly when AJ(W) is non-torsion"},
                {"certificate", cert}};
}

ParamPath read_loop(const json& j, const std::string& path) {
    if (!j.is_object()) bad(path, "expected {\"circle\": ..} or {\"polyline\": [..]}");
    ParamPath p;
    p.orientation = j.value("orientation", 1);
    if (auto* c = opt(j, "circle"))
        p.kind = CircleAround{read_complex(require(*c, "center", path + ".circle"), path + ".circle.center"),
                              read_real(require(*c, "radius", path + ".circle"), path + ".circle.radius")};
    else if (auto* l = opt(j, "polyline")) {
        Polyline pl;
        for (std::size_t k = 0; k < l->size(); ++k)
            pl.vertices.push_back(read_complex((*l)[k], path + ".polyline[" + std::to_string(k) + "]"));
        p.kind = pl;
    } else if (auto* g = opt(j, "segment"))
        p.kind = LatticeSegment{read_complex(require(*g, "start", path + ".segment"), path + ".segment.start"),
                                read_complex(require(*g, "direction", path + ".segment"), path + ".segment.direction")};
    else
        bad(path, "expected one of circle, polyline, segment");
    return p;
}

json cmd_milnor_reg(const json& a, Session& s) {
    RationalFunc f = read_function(require(a, "f", "args"), "args.f");
    RationalFunc g = read_function(require(a, "g", "args"), "args.g");
    const json& loops = require(a, "loop", "args");
    std::vector<ParamPath> paths;
    if (loops.is_array())
        for (std::size_t k = 0; k < loops.size(); ++k) paths.push_back(read_loop(loops[k], "args.loop[" + std::to_string(k) + "]"));
    else
        paths.push_back(read_loop(loops, "args.loop"));
    std::optional<BigComplex> oracle;
    if (auto* z = opt(a, "zero")) {
        Rational x0 = read_rational(*z, "args.zero");
        int ord = f.order_at(Poly::x() - Poly(x0));
        if (ord == 0) bad("args.zero", "f does not vanish there");
        oracle = -(BigComplex(Real(0), 2 * real_pi()) * log(g(BigComplex(from_rational(x0)))) * Real(ord));
    }
    std::vector<RegulatorReport> reps(paths.size());
    parallel_for(paths.size(), [&](std::size_t k) {
        reps[k] = regulator_eval(f, g, paths[k], s.ctx, s.config.max_den, s.config.max_height);
    });
    int d = digits_out(s);
    json out = json::array();
    std::optional<Real> last;
    bool monotone = true;
    for (const auto& r : reps) {
        json j{{"value", to_json(r.value, d)},
               {"reduced", to_json(r.reduced, d)},
               {"integral", to_json(r.integral, d)},
               {"delta", to_json(r.delta, d)},
               {"crossings", r.crossings},
               {"certificate", to_json(r.evidence, d)}};
        if (oracle) {
            Real defect = distance_mod_two_pi_i_squared(r.value - *oracle);
            j["defect"] = to_json(defect, 6);
            if (last && defect > *last + s.ctx.tol()) monotone = false;
            last = defect;
        }
        out.push_back(j);
    }
    json res{{"f", to_json(f)},
             {"g", to_json(g)},
             {"paper_case", "regulator current of {f, g} on loops; Steinberg symbols land in (2 pi i)^2 Q"},
             {"loops", out}};
    if (oracle) {
        res["shrink_oracle"] = to_json(*oracle, d);
        res["defects_non_increasing"] = monotone;
    }
    return res;
}

Place read_place(const json& j, const std::string& path) {
    if (j.is_string() && (j == "inf" || j == "infinity")) return Place::at_infinity();
    if (j.is_object()) {
        Poly m = read_poly(require(j, "minpoly", path), path + ".minpoly");
        std::optional<BigComplex> approx;
        if (j.contains("approx")) approx = read_complex(j.at("approx"), path + ".approx");
        return Place::algebraic(m, approx);
    }
    return Place::rational(read_rational(j, path));
}

json cmd_tame(const json& a, Session& s) {
    RationalFunc f = read_function(require(a, "f", "args"), "args.f");
    RationalFunc g = read_function(require(a, "g", "args"), "args.g");
    Place place = read_place(require(a, "place", "args"), "args.place");
    TameValue v = tame_symbol(f, g, place);
    json j{{"f", to_json(f)},
           {"g", to_json(g)},
           {"place", place.to_string()},
           {"ord_f", v.ord_f},
           {"ord_g", v.ord_g},
           {"value", v.to_string()},
           {"paper_case", "tame symbol (-1)^{ab} f^b / g^a at a place of Q(t)"}};
    if (v.numeric) j["numeric"] = to_json(*v.numeric, digits_out(s));
    return j;
}

json weil_json(const WeilCheck& w) {
    json places = json::array();
    for (const auto& p : w.places)
        places.push_back({{"place", p.place.to_string()},
                          {"degree", p.degree},
                          {"ord_f", p.ord_f},
                          {"ord_g", p.ord_g},
                          {"norm", p.norm.str()}});
    return json{{"verdict", w.holds ? "Holds" : "Violated"}, {"product", w.product.str()}, {"places", places}};
}

Poly random_poly(std::mt19937& rng, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg), coef(-5, 5);
    int d = deg(rng);
    std::vector<Rational> c;
    for (int k = 0; k <= d; ++k) c.push_back(coef(rng));
    if (c.back() == 0) c.back() = 1;
    return Poly(c);
}

RationalFunc random_func(std::mt19937& rng, int max_deg) {
    for (;;) {
        Poly n = random_poly(rng, max_deg), d = random_poly(rng, max_deg);
        if (!n.is_zero() && !d.is_zero()) return RationalFunc(n, d);
    }
}

int read_int(const json& a, const char* key, int dflt) {
    if (!a.contains(key)) return dflt;
    const json& j = a.at(key);
    if (j.is_number_integer()) return j.get<int>();
    try {
        return std::stoi(j.get<std::string>());
    } catch (...) {
        bad(std::string("args.") + key, "expected an integer");
    }
}

json cmd_weil(const json& a, Session&) {
    int max_degree = read_int(a, "max-degree", 6);
    if (a.contains("random")) {
        int n = read_int(a, "random", 100);
        std::mt19937 rng(unsigned(read_int(a, "seed", 1)));
        int deg = std::min(4, max_degree);
        std::vector<std::pair<RationalFunc, RationalFunc>> pairs;
        for (int k = 0; k < n; ++k) {
            RationalFunc f = random_func(rng, deg);
            pairs.emplace_back(f, random_func(rng, deg));
        }
        std::vector<WeilCheck> res(pairs.size());
        parallel_for(pairs.size(), [&](std::size_t k) { res[k] = weil_reciprocity_check(pairs[k].first, pairs[k].second, max_degree); });
        json violated = json::array();
        std::size_t holds = 0;
        for (std::size_t k = 0; k < res.size(); ++k) {
            if (res[k].holds) {
                ++holds;
                continue;
            }
            json v = weil_json(res[k]);
            v["f"] = to_json(pairs[k].first);
            v["g"] = to_json(pairs[k].second);
            violated.push_back(v);
        }
        return json{{"verdict", holds == res.size() ? "Holds" : "Violated"},
                    {"paper_case", "Weil reciprocity over Q(t): product of normed tame symbols is 1"},
                    {"trials", res.size()},
                    {"holds", holds},
                    {"violations", violated}};
    }
    RationalFunc f = read_function(require(a, "f", "args"), "args.f");
    RationalFunc g = read_function(require(a, "g", "args"), "args.g");
    WeilCheck w = weil_reciprocity_check(f, g, max_degree);
    json j = weil_json(w);
    json out{{"f", to_json(f)},
             {"g", to_json(g)},
             {"verdict", j["verdict"]},
             {"paper_case", "Weil reciprocity over Q(t): product of normed tame symbols is 1"},
             {"certificate", j}};
    return out;
}

json cmd_kummer(const json& a, Session&) {
    EllipticCurve E1 = a.contains("curve1") ? read_curve(a.at("curve1"), "args.curve1") : EllipticCurve(Rational(20), Rational(0));
    EllipticCurve E2 = a.contains("curve2") ? read_curve(a.at("curve2"), "args.curve2") : E1;
    CurveRef c1 = CurveRef::of(E1, "E1"), c2 = CurveRef::of(E2, "E2");
    PointSymbol p = PointSymbol::named(c1, a.value("p", "p")), xi = PointSymbol::named(c2, a.value("xi", "xi"));
    std::vector<PointSymbol> bases{PointSymbol::base(c1), PointSymbol::base(c2)};
    ZeroCycle Z = box_cycle({p, xi}, bases);
    ZeroCycle lhs = kummer_pushpull(Z);
    ZeroCycle rhs = Z + box_cycle({-p, -xi}, bases);
    bool holds = lhs == rhs;
    return json{{"cycle", Z.to_string()},
                {"verdict", holds ? "Holds" : "Fails"},
                {"paper_case", "pull-back of the push-forward along the Kummer quotient: B(p, xi) + B(-p, -xi)"},
                {"certificate",
                 {{"pushpull", lhs.to_string()}, {"expected", rhs.to_string()}, {"exact", true}, {"terms", lhs.terms().size()}}}};
}

json cmd_relation(const json& a, Session& s) {
    const json& vals = require(a, "values", "args");
    if (!vals.is_array() || vals.empty()) bad("args.values", "expected a nonempty list of numbers");
    std::vector<BigComplex> xs;
    bool complex = a.value("complex", false);
    for (std::size_t k = 0; k < vals.size(); ++k) {
        xs.push_back(read_complex(vals[k], "args.values[" + std::to_string(k) + "]"));
        if (xs.back().im != 0) complex = true;
    }
    std::optional<IntegerRelation> r;
    if (complex) {
        r = complex_relation(xs, s.config.max_height, s.ctx);
    } else {
        std::vector<Real> re;
        for (const auto& z : xs) re.push_back(z.re);
        r = pslq(re, s.config.max_height, s.ctx);
    }
    json out{{"verdict", r ? "Relation" : "NoRelationUpTo"},
             {"paper_case", complex ? "simultaneous integer relation via LLL" : "integer relation via PSLQ"}};
    json cert{{"max_height", s.config.max_height.str()}, {"precision", s.ctx.digits}};
    if (r) cert["relation"] = to_json(*r, 6);
    out["certificate"] = cert;
    return out;
}

}  // namespace

const std::vector<CommandInfo>& commands() {
    static const std::vector<CommandInfo> table = {
        {"periods", "period lattice and tau of y^2 = 4x^3 - g2 x - g3", {"g2", "g3", "curve"}, cmd_periods},
        {"ellog", "elliptic logarithm of a rational point", {"g2", "g3", "curve", "point"}, cmd_ellog},
        {"torsion", "torsion test with certificate", {"g2", "g3", "curve", "point", "bound"}, cmd_torsion},
        {"chi2", "chi2 of a box cycle from two spread maps",
         {"g2", "g3", "curve", "map*", "method", "scale", "basepoint", "cut-offset"}, cmd_chi2},
        {"chi3", "chi3 of a triple box cycle from three spread maps",
         {"g2", "g3", "curve", "map*", "basepoint", "cut-offset", "max-double-cuts"}, cmd_chi3},
        {"classify", "transcendence case of a pair of curves", {"curve1", "curve2", "pairs"}, cmd_classify},
        {"psi2", "nonvanishing of Psi2 for B(p, W)", {"g2", "g3", "curve", "cycle", "generic"}, cmd_psi2},
        {"milnor-reg", "regulator current of {f, g} on loops", {"f", "g", "loop*", "zero"}, cmd_milnor_reg},
        {"tame", "tame symbol at a place", {"f", "g", "place"}, cmd_tame},
        {"weil", "Weil reciprocity check", {"f", "g", "random", "seed", "max-degree"}, cmd_weil},
        {"kummer-check", "Kummer push-pull identity on B(p, xi)", {"curve1", "curve2", "p", "xi"}, cmd_kummer},
        {"relation", "integer relation among numbers", {"values", "complex"}, cmd_relation},
    };
    return table;
}

const CommandInfo* find_command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

json execute(const std::string& name, const json& args, Session& s) {
    const CommandInfo* c = find_command(name);
    if (!c) throw Error(ErrorKind::InvalidInput, "unknown command '" + name + "'", "run `haj --help`");
    if (!args.is_object()) throw Error(ErrorKind::InvalidInput, "args: expected an object");
    for (auto it = args.begin(); it != args.end(); ++it) {
        bool known = false;
        for (const auto& f : c->flags) known |= f == it.key() || f == it.key() + "*";
        if (!known) throw Error(ErrorKind::InvalidInput, "args." + it.key() + ": not an input of " + name);
    }
    s.config.validate();
    WorkingPrecision wp(s.ctx);
    json result = c->run(args, s);
    return json{{"schema", kSchema}, {"command", name}, {"config", s.config.to_json()}, {"result", result}};
}

fs::path preset_path(const std::string& name) {
    if (name.find('/') != std::string::npos || (name.size() > 5 && name.substr(name.size() - 5) == ".json")) return name;
    return fs::path(HAJ_PRESET_DIR) / (name + ".json");
}

json load_preset(const std::string& name) {
    fs::path p = preset_path(name);
    std::ifstream in(p);
    if (!in) throw Error(ErrorKind::InvalidInput, "preset '" + name + "' not found at " + p.string(), "list presets in " HAJ_PRESET_DIR);
    try {
        json j = json::parse(in);
        if (j.value("schema", "") != kSchema) throw Error(ErrorKind::InvalidInput, "preset " + name + ": schema must be haj/1");
        return j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidInput, "preset " + name + ": " + e.what());
    }
}

}  // namespace haj::cli
