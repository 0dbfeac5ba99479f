#pragma once

#include <string>

#include <json.hpp>

#include "nmq/analysis.hpp"
#include "nmq/model.hpp"
#include "nmq/realizability.hpp"
#include "nmq/reduction.hpp"

namespace nmq::io {

using Json = nlohmann::ordered_json;

/// {"rows": r, "cols": c, "data": [row-major entries]}.
Json matrix_to_json(const RealMatrix& m);
RealMatrix matrix_from_json(const Json& j, const std::string& field);
/// Complex entries are [re, im] pairs.
Json complex_matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& field);

/// Parses a document; syntax errors carry line and column.
Json parse(const std::string& text, const std::string& origin);
/// Two-space indented document with a trailing newline.
std::string dump(const Json& j);

Json params_to_json(const PhysicalParams& p);
/// Field-level diagnostics are raised as ParseError(field path, message).
PhysicalParams params_from_json(const Json& j);
PhysicalParams load_params(const std::string& path);

/// dims {m, n_or_r, n_in, m_out}, matrices A, B, C, D and a provenance block.
Json model_to_json(const QuadratureModel& m);
QuadratureModel model_from_json(const Json& j);
QuadratureModel load_model(const std::string& path);

Json report_to_json(const RealizabilityReport& r);
Json h2_to_json(const H2Result& h);
Json result_to_json(const ReductionResult& r, const ReductionSpec& spec);

std::string read_file(const std::string& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace nmq::io
