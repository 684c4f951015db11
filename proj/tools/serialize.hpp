#pragma once

#include "haj/invariants.hpp"
#include "haj/milnor.hpp"

#include <json.hpp>

#include <string>

namespace haj::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "haj/1";

// Numbers travel as strings so no precision is lost in transit.
json to_json(const Real& x, int digits);
json to_json(const BigComplex& z, int digits);
json to_json(const Rational& q);
json to_json(const Integer& z);
json to_json(const std::vector<Rational>& v);
json to_json(const IntegerRelation& r, int digits);
json to_json(const LatticeMembership& m, int digits);
json to_json(const TorsionResult& t, int digits);
json to_json(const PeriodLatticeData& lat, int digits);
json to_json(const CurvePoint& p, int digits);
json to_json(const RationalFunc& f);
json to_json(const Poly& p);

// Field-path aware readers; errors name the offending path.
Rational read_rational(const json& j, const std::string& path);
Real read_real(const json& j, const std::string& path);
BigComplex read_complex(const json& j, const std::string& path);
GaussianInteger read_gaussian(const json& j, const std::string& path);
CurvePoint read_point(const json& j, const std::string& path);
EllipticCurve read_curve(const json& j, const std::string& path);
Poly read_poly(const json& j, const std::string& path);
RationalFunc read_function(const json& j, const std::string& path);
PeriodLatticeData read_lattice(const json& j, const std::string& path);
const json& require(const json& j, const char* key, const std::string& path);

// The hint printed with an error when the module gave none.
std::string default_hint(ErrorKind k);
json error_json(const Error& e, const std::string& command);

// Flattened "key: value" rendering for --format text.
std::string render_text(const json& j);

}  // namespace haj::cli
