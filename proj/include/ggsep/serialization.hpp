#pragma once

// JSON and CSV formats.
//
//   matrix:    {"p": <int>, "entries": [<p*p reals, row-major>]}
//   edge set:  {"p": <int>, "edges": [[i, j], ...]}
//   candidate collection: [<edge set>, ...]
//
// Doubles are written in shortest round-trip form, so a written matrix
// re-parses to identical bits.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ggsep/core.hpp"
#include "ggsep/divergence.hpp"
#include "ggsep/projection.hpp"
#include "ggsep/selection.hpp"
#include "ggsep/simulation.hpp"

namespace ggsep::io {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
/// Throws ParseError for malformed documents.
Matrix matrix_from_json(const Json& j);

PrecisionMatrix precision_from_json(const Json& j);
CovarianceMatrix covariance_from_json(const Json& j);

Json edge_set_to_json(const EdgeSet& g);
EdgeSet edge_set_from_json(const Json& j);

CandidateCollection candidates_from_json(const Json& j);

Json to_json(const BoundReport& r);
Json to_json(const FitResult& r);
Json to_json(const SelectionResult& r);
Json to_json(const ExperimentReport& r);

/// Missing keys keep their defaults.
ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

/// One row per grid point:
/// n,p,s,trials,success_rate,ci_low,ci_high,mean_gap,mean_kl,min_slack
void write_grid_csv(std::ostream& os, const ExperimentReport& r);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ggsep::io
