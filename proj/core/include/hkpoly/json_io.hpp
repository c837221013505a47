#ifndef HKPOLY_JSON_IO_HPP
#define HKPOLY_JSON_IO_HPP

// Value-level JSON conversions, kept out of the type headers so json.hpp is
// only pulled in where documents are actually composed.

#include <json.hpp>

#include "hkpoly/polynomial.hpp"
#include "hkpoly/radical.hpp"

namespace hkpoly {

nlohmann::ordered_json to_json_value(const SparsePolynomial& p);
SparsePolynomial polynomial_from_json_value(const nlohmann::json& v);

nlohmann::ordered_json to_json_value(const RadicalFamily& f);
RadicalFamily family_from_json_value(const nlohmann::json& v);

nlohmann::ordered_json to_json_value(const StructureReport& r);

}  // namespace hkpoly

#endif
