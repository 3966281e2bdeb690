#include "ggsep/serialization.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ggsep::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

int read_order(const Json& j) {
  if (!j.is_object() || !j.contains("p") || !j["p"].is_number_integer()) {
    parse_error("document needs an integer field \"p\"");
  }
  const auto p = j["p"].get<long long>();
  if (p < 1 || p > 100000) parse_error("field \"p\" out of range");
  return static_cast<int>(p);
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["p"] = m.rows();
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(m(r, c));
  j["entries"] = std::move(entries);
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const int p = read_order(j);
  if (!j.contains("entries") || !j["entries"].is_array()) parse_error("matrix needs an \"entries\" array");
  const Json& e = j["entries"];
  if (e.size() != static_cast<std::size_t>(p) * static_cast<std::size_t>(p)) {
    parse_error("matrix \"entries\" must hold p*p values");
  }
  Matrix m(p, p);
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) {
      const Json& v = e[static_cast<std::size_t>(r) * p + c];
      if (!v.is_number()) parse_error("matrix entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

PrecisionMatrix precision_from_json(const Json& j) { return PrecisionMatrix(matrix_from_json(j)); }
CovarianceMatrix covariance_from_json(const Json& j) { return CovarianceMatrix(matrix_from_json(j)); }

Json edge_set_to_json(const EdgeSet& g) {
  Json j;
  j["p"] = g.vertex_count();
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.i, e.j});
  j["edges"] = std::move(edges);
  return j;
}

EdgeSet edge_set_from_json(const Json& j) {
  const int p = read_order(j);
  if (!j.contains("edges") || !j["edges"].is_array()) parse_error("edge set needs an \"edges\" array");
  EdgeSet g(p);
  for (const Json& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      parse_error("edges must be [i, j] integer pairs");
    }
    const int a = e[0].get<int>();
    const int b = e[1].get<int>();
    if (a == b || a < 0 || b < 0 || a >= p || b >= p) parse_error("edge endpoints invalid for p");
    g.insert(Edge(a, b));
  }
  return g;
}

CandidateCollection candidates_from_json(const Json& j) {
  const Json& list = (j.is_object() && j.contains("candidates")) ? j["candidates"] : j;
  if (!list.is_array() || list.empty()) parse_error("candidates must be a nonempty array of edge sets");
  std::vector<EdgeSet> graphs;
  for (const Json& g : list) graphs.push_back(edge_set_from_json(g));
  const int p = graphs.front().vertex_count();
  for (const EdgeSet& g : graphs)
    if (g.vertex_count() != p) parse_error("candidates differ in vertex count");
  return CandidateCollection(std::move(graphs));
}

Json to_json(const BoundReport& r) {
  Json j;
  j["kl"] = r.kl_value;
  j["bound"] = r.lower_bound;
  j["slack"] = r.slack;
  j["witness_edge"] = r.witness_edge ? Json{r.witness_edge->i, r.witness_edge->j} : Json(nullptr);
  j["condition_number"] = number_or_null(r.condition_number);
  return j;
}

Json to_json(const FitResult& r) {
  Json j;
  j["theta_hat"] = matrix_to_json(r.theta_hat.matrix());
  j["objective"] = r.objective;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["projected_gradient_norm"] = r.projected_gradient_norm;
  return j;
}

Json to_json(const SelectionResult& r) {
  Json j;
  j["selected_index"] = r.selected_index;
  Json scores = Json::array();
  for (double s : r.scores) scores.push_back(number_or_null(s));
  j["scores"] = std::move(scores);
  Json fits = Json::array();
  for (const auto& f : r.fit_results) fits.push_back(f ? to_json(*f) : Json(nullptr));
  j["fit_results"] = std::move(fits);
  return j;
}

Json to_json(const ExperimentReport& r) {
  Json j;
  j["kind"] = r.kind;
  Json agg;
  agg["success_rate"] = r.success_rate;
  agg["min_slack"] = r.min_slack;
  agg["mean_kl"] = r.mean_kl;
  for (const auto& [k, v] : r.extras) agg[k] = number_or_null(v);
  j["aggregates"] = std::move(agg);

  Json grid = Json::array();
  for (const GridSummary& g : r.grid) {
    grid.push_back(Json{{"n", g.n},
                        {"p", g.p},
                        {"s", g.s},
                        {"trials", g.trials},
                        {"success_rate", g.success_rate},
                        {"ci_low", g.ci_low},
                        {"ci_high", g.ci_high},
                        {"mean_gap", number_or_null(g.mean_gap)},
                        {"mean_kl", g.mean_kl},
                        {"min_slack", g.min_slack}});
  }
  j["grid"] = std::move(grid);

  Json records = Json::array();
  for (const TrialRecord& t : r.records) {
    Json rec{{"grid_index", t.grid_index}, {"trial", t.trial}, {"seed", t.seed},
             {"p", t.p},                   {"n", t.n},         {"success", t.success}};
    Json values;
    for (const auto& [k, v] : t.values) values[k] = number_or_null(v);
    rec["values"] = std::move(values);
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) parse_error("experiment config must be a JSON object");
  ExperimentConfig c;
  read_if(j, "base_seed", c.base_seed);
  read_if(j, "trials", c.trials);
  read_if(j, "dimensions", c.dimensions);
  read_if(j, "sample_sizes", c.sample_sizes);
  read_if(j, "d_values", c.d_values);
  if (j.contains("gamma") && j["gamma"].is_null()) {
    c.gamma = kNoBall;  // written as null when the ball is disabled
  } else {
    read_if(j, "gamma", c.gamma);
  }
  read_if(j, "chain_diagonal", c.chain_diagonal);
  read_if(j, "chain_off_diagonal", c.chain_off_diagonal);
  read_if(j, "use_corrected_covariance", c.use_corrected_covariance);
  read_if(j, "population", c.population);
  read_if(j, "perturb", c.perturb);
  read_if(j, "slack_tolerance", c.slack_tolerance);
  read_if(j, "kl_tolerance", c.kl_tolerance);
  read_if(j, "threads", c.threads);
  if (j.contains("random_precision")) {
    const Json& rp = j["random_precision"];
    read_if(rp, "edge_probability", c.random_precision.edge_probability);
    read_if(rp, "min_magnitude", c.random_precision.min_magnitude);
    read_if(rp, "max_magnitude", c.random_precision.max_magnitude);
    read_if(rp, "min_margin", c.random_precision.min_margin);
    read_if(rp, "max_margin", c.random_precision.max_margin);
  }
  if (j.contains("fit")) {
    const Json& f = j["fit"];
    read_if(f, "max_iterations", c.fit.max_iterations);
    read_if(f, "gradient_tolerance", c.fit.gradient_tolerance);
    read_if(f, "initial_step", c.fit.initial_step);
    read_if(f, "backtracking_ratio", c.fit.backtracking_ratio);
    read_if(f, "armijo_constant", c.fit.armijo_constant);
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["base_seed"] = c.base_seed;
  j["trials"] = c.trials;
  j["dimensions"] = c.dimensions;
  j["sample_sizes"] = c.sample_sizes;
  j["d_values"] = c.d_values;
  j["gamma"] = number_or_null(c.gamma);
  j["chain_diagonal"] = c.chain_diagonal;
  j["chain_off_diagonal"] = c.chain_off_diagonal;
  j["use_corrected_covariance"] = c.use_corrected_covariance;
  j["population"] = c.population;
  j["perturb"] = c.perturb;
  j["slack_tolerance"] = c.slack_tolerance;
  j["kl_tolerance"] = c.kl_tolerance;
  j["random_precision"] = Json{{"edge_probability", c.random_precision.edge_probability},
                               {"min_magnitude", c.random_precision.min_magnitude},
                               {"max_magnitude", c.random_precision.max_magnitude},
                               {"min_margin", c.random_precision.min_margin},
                               {"max_margin", c.random_precision.max_margin}};
  j["fit"] = Json{{"max_iterations", c.fit.max_iterations},
                  {"gradient_tolerance", c.fit.gradient_tolerance},
                  {"initial_step", c.fit.initial_step},
                  {"backtracking_ratio", c.fit.backtracking_ratio},
                  {"armijo_constant", c.fit.armijo_constant}};
  return j;
}

void write_grid_csv(std::ostream& os, const ExperimentReport& r) {
  os << "n,p,s,trials,success_rate,ci_low,ci_high,mean_gap,mean_kl,min_slack\n";
  os << std::setprecision(17);
  for (const GridSummary& g : r.grid) {
    os << g.n << ',' << g.p << ',' << g.s << ',' << g.trials << ',' << g.success_rate << ',' << g.ci_low
       << ',' << g.ci_high << ',' << g.mean_gap << ',' << g.mean_kl << ',' << g.min_slack << '\n';
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    parse_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) parse_error("cannot write " + path);
  out << text;
  if (!out) parse_error("failed writing " + path);
}

}  // namespace ggsep::io
