#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "torsflow/bott_pipeline.hpp"
#include "torsflow/cw_complex.hpp"

namespace torsflow::cli {

/// Malformed document: bad JSON, missing fields, wrong types.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// Reads a file as JSON; ParseError when unreadable or not JSON.
Json read_document(const std::string& path);

Json to_json(Complex z);
Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j, const std::string& where);

Representation parse_representation(const Json& j);
Json to_json(const Representation& rep);

BottModel parse_model(const Json& doc);
Json to_json(const BottModel& model);

CWComplex parse_cw(const Json& j);
Json to_json(const CWComplex& k);

/// Report rendering. Text ends with the total modulus line.
std::string text_report(const TorsionReport& report);
Json json_report(const TorsionReport& report, double tolerance);

std::string text_oracle(const CWComplex& k, const CWTorsion& t);
Json json_oracle(const CWComplex& k, const CWTorsion& t, double tolerance);

/// Fixed 12-decimal rendering used by every text report.
std::string fixed(double x);

}  // namespace torsflow::cli
