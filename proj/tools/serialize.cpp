#include "serialize.hpp"

#include <sstream>

namespace haj::cli {

json to_json(const Real& x, int digits) { return to_string(x, digits); }

json to_json(const BigComplex& z, int digits) {
    return json{{"re", to_string(z.re, digits)}, {"im", to_string(z.im, digits)}};
}

json to_json(const Rational& q) { return q.str(); }
json to_json(const Integer& z) { return z.str(); }

json to_json(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& q : v) a.push_back(q.str());
    return a;
}

json to_json(const IntegerRelation& r, int digits) {
    json c = json::array();
    for (const auto& z : r.coeffs) c.push_back(z.str());
    return json{{"coefficients", c}, {"height", r.height.str()}, {"residual", to_json(r.residual, digits)}};
}

json to_json(const LatticeMembership& m, int digits) {
    json j{{"verdict", to_string(m.verdict)}};
    if (m.member()) j["coefficients"] = to_json(m.coefficients);
    j["residual"] = to_json(m.residual, digits);
    j["max_height"] = m.max_height.str();
    j["max_den"] = m.max_den.str();
    j["precision"] = m.precision;
    j["generator_relations"] = m.kernel_rank;
    return j;
}

json to_json(const TorsionResult& t, int digits) {
    json j{{"verdict", t.torsion() ? "Torsion" : "NotTorsionUpTo"}, {"bound", t.bound}};
    if (t.torsion()) j["order"] = t.order;
    j["infinite_order_proven"] = t.infinite_order_proven;
    if (!t.proof.empty()) j["proof"] = t.proof;
    if (t.log_evidence) j["log_evidence"] = to_json(*t.log_evidence, digits);
    return j;
}

json to_json(const PeriodLatticeData& lat, int digits) {
    return json{{"omega_alpha", to_json(lat.omega_alpha, digits)},
                {"omega_beta", to_json(lat.omega_beta, digits)},
                {"tau", to_json(lat.tau, digits)},
                {"digits", lat.digits}};
}

json to_json(const CurvePoint& p, int digits) {
    switch (p.kind) {
        case CurvePoint::Kind::Infinity: return "inf";
        case CurvePoint::Kind::Exact: return json::array({p.x.str(), p.y.str()});
        case CurvePoint::Kind::Numeric: return json::array({to_json(p.nx, digits), to_json(p.ny, digits)});
    }
    return nullptr;
}

json to_json(const Poly& p) { return to_json(p.coeffs()); }

json to_json(const RationalFunc& f) {
    return json{{"num", to_json(f.num())}, {"den", to_json(f.den())}, {"text", f.to_string()}};
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::InvalidInput, path + ": " + what, "see `haj <command> --help` for the input schema");
}

std::string scalar_text(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << j.get<double>();
        return os.str();
    }
    bad(path, "expected a number or numeric string");
}

}  // namespace

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) bad(path + "." + key, "missing");
    return j.at(key);
}

Rational read_rational(const json& j, const std::string& path) {
    if (j.is_number_float()) bad(path, "expected an exact rational, write it as a string \"p/q\"");
    try {
        return parse_rational(scalar_text(j, path));
    } catch (const Error& e) {
        bad(path, e.what());
    }
}

Real read_real(const json& j, const std::string& path) {
    try {
        return parse_real(scalar_text(j, path));
    } catch (const Error& e) {
        bad(path, e.what());
    }
}

BigComplex read_complex(const json& j, const std::string& path) {
    if (j.is_array()) {
        if (j.size() != 2) bad(path, "expected [re, im]");
        return {read_real(j[0], path + "[0]"), read_real(j[1], path + "[1]")};
    }
    if (j.is_object()) return {read_real(require(j, "re", path), path + ".re"), read_real(require(j, "im", path), path + ".im")};
    try {
        return parse_complex(scalar_text(j, path));
    } catch (const Error& e) {
        bad(path, e.what());
    }
}

GaussianInteger read_gaussian(const json& j, const std::string& path) {
    if (j.is_array()) {
        if (j.size() != 2) bad(path, "expected [re, im]");
        Rational a = read_rational(j[0], path + "[0]"), b = read_rational(j[1], path + "[1]");
        if (denominator(a) != 1 || denominator(b) != 1) bad(path, "Gaussian integer parts must be integers");
        return {numerator(a), numerator(b)};
    }
    BigComplex z = read_complex(j, path);
    Integer a = round_to_integer(z.re), b = round_to_integer(z.im);
    if (z.re != from_integer(a) || z.im != from_integer(b)) bad(path, "not a Gaussian integer");
    return {a, b};
}

CurvePoint read_point(const json& j, const std::string& path) {
    if (j.is_string() && (j == "inf" || j == "o")) return CurvePoint::infinity();
    if (!j.is_array() || j.size() != 2) bad(path, "expected [x, y] or \"inf\"");
    return CurvePoint::exact(read_rational(j[0], path + "[0]"), read_rational(j[1], path + "[1]"));
}

EllipticCurve read_curve(const json& j, const std::string& path) {
    if (j.is_array() && j.size() == 2) return EllipticCurve(read_rational(j[0], path + "[0]"), read_rational(j[1], path + "[1]"));
    if (j.is_object())
        return EllipticCurve(read_rational(require(j, "g2", path), path + ".g2"),
                             read_rational(require(j, "g3", path), path + ".g3"));
    bad(path, "expected [g2, g3] or {\"g2\": .., \"g3\": ..}");
}

Poly read_poly(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected a coefficient list, constant term first");
    std::vector<Rational> c;
    for (std::size_t k = 0; k < j.size(); ++k) c.push_back(read_rational(j[k], path + "[" + std::to_string(k) + "]"));
    return Poly(std::move(c));
}

RationalFunc read_function(const json& j, const std::string& path) {
    if (j.is_array()) return RationalFunc(read_poly(j, path));
    if (j.is_string() || j.is_number_integer()) return RationalFunc(read_rational(j, path));
    if (!j.is_object()) bad(path, "expected {\"num\": [..], \"den\": [..]}, a coefficient list or a rational constant");
    Poly num = read_poly(require(j, "num", path), path + ".num");
    Poly den = j.contains("den") ? read_poly(j.at("den"), path + ".den") : Poly(1);
    if (den.is_zero()) bad(path + ".den", "zero denominator");
    return RationalFunc(num, den);
}

PeriodLatticeData read_lattice(const json& j, const std::string& path) {
    PeriodLatticeData lat;
    lat.omega_alpha = read_complex(require(j, "omega_alpha", path), path + ".omega_alpha");
    lat.omega_beta = read_complex(require(j, "omega_beta", path), path + ".omega_beta");
    lat.tau = read_complex(require(j, "tau", path), path + ".tau");
    lat.digits = require(j, "digits", path).get<int>();
    return lat;
}

std::string default_hint(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonConvergence:
        case ErrorKind::QuadratureStall:
        case ErrorKind::PrecisionExhausted:
        case ErrorKind::InversionMismatch: return "increase --digits";
        case ErrorKind::TangencySuspected: return "perturb the path or increase --digits";
        case ErrorKind::CutGrazing: return "pass --cut-offset or --basepoint to move the cut system";
        case ErrorKind::StratificationOverflow: return "raise --max-double-cuts";
        case ErrorKind::DegreeTooHigh: return "raise --max-degree";
        case ErrorKind::MethodUnsupported: return "use --method path";
        case ErrorKind::MissingCoordinates: return "give exact coordinates for every point";
        case ErrorKind::PoleAtInput: return "move the input off the pole";
        default: return "check the input against `haj <command> --help`";
    }
}

json error_json(const Error& e, const std::string& command) {
    return json{{"schema", kSchema},
                {"command", command},
                {"error",
                 {{"kind", to_string(e.kind())},
                  {"message", e.what()},
                  {"hint", e.hint().empty() ? default_hint(e.kind()) : e.hint()}}}};
}

namespace {
void flatten(const json& j, const std::string& prefix, std::ostringstream& os) {
    if (j.is_object()) {
        if (j.size() == 2 && j.contains("re") && j.contains("im") && j["re"].is_string()) {
            std::string im = j["im"].get<std::string>();
            os << prefix << ": " << j["re"].get<std::string>() << (im[0] == '-' ? " - " : " + ")
               << (im[0] == '-' ? im.substr(1) : im) << "i\n";
            return;
        }
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (j.is_array()) {
        bool scalars = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
        if (scalars) {
            os << prefix << ": [";
            for (std::size_t k = 0; k < j.size(); ++k)
                os << (k ? ", " : "") << (j[k].is_string() ? j[k].get<std::string>() : j[k].dump());
            os << "]\n";
            return;
        }
        for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", os);
    } else {
        os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}
}  // namespace

std::string render_text(const json& j) {
    std::ostringstream os;
    flatten(j, "", os);
    return os.str();
}

}  // namespace haj::cli
