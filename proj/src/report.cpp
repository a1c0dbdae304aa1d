// SPDX-License-Identifier: Apache-2.0
#include "ogsbi/report.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "ogsbi/matrix_io.hpp"

namespace ogsbi {
namespace {

using nlohmann::json;

json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double get_num(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  if (!j.is_number()) throw std::runtime_error("expected a number");
  return j.get<double>();
}

json num_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_num_array(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x));
  return v;
}

json trial_json(const TrialResult& t, bool timing) {
  json j{{"index", t.index},
         {"attempts", t.attempts},
         {"failed", t.failed},
         {"error", t.error},
         {"true_doas_rad", num_array(t.true_doas)},
         {"estimated_doas_rad", num_array(t.estimated_doas)},
         {"squared_errors_rad2", num_array(t.squared_errors)},
         {"iterations", t.iterations},
         {"converged", t.converged}};
  if (timing) j["seconds"] = num(t.seconds);
  if (t.ks_statistic) j["ks_statistic"] = num(*t.ks_statistic);
  if (t.ks_pass) j["ks_pass"] = *t.ks_pass;
  return j;
}

TrialResult trial_from(const json& j) {
  TrialResult t;
  t.index = j.at("index").get<int>();
  t.attempts = j.at("attempts").get<int>();
  t.failed = j.at("failed").get<bool>();
  t.error = j.at("error").get<std::string>();
  t.true_doas = get_num_array(j.at("true_doas_rad"));
  t.estimated_doas = get_num_array(j.at("estimated_doas_rad"));
  t.squared_errors = get_num_array(j.at("squared_errors_rad2"));
  t.iterations = j.at("iterations").get<int>();
  t.converged = j.at("converged").get<bool>();
  if (j.contains("seconds")) t.seconds = get_num(j["seconds"]);
  if (j.contains("ks_statistic")) t.ks_statistic = get_num(j["ks_statistic"]);
  if (j.contains("ks_pass")) t.ks_pass = j["ks_pass"].get<bool>();
  return t;
}

json cell_json(const CellReport& c, bool timing) {
  json j{{"snr_db", num(c.snr_db)},
         {"r_deg", num(c.r_deg)},
         {"mse_rad2", num(c.mse_rad2)},
         {"mse_db", num(c.mse_db)},
         {"lower_bound_rad2", num(c.lower_bound_rad2)}};
  if (timing) j["mean_time_s"] = num(c.mean_time_s);
  j["convergence_rate"] = num(c.convergence_rate);
  if (c.kappa) j["kappa"] = num(*c.kappa);
  if (c.ks_pass_rate) j["ks_pass_rate"] = num(*c.ks_pass_rate);
  j["failures"] = c.failures;
  j["degraded"] = c.degraded;
  json trials = json::array();
  for (const auto& t : c.trials) trials.push_back(trial_json(t, timing));
  j["trials"] = std::move(trials);
  return j;
}

CellReport cell_from(const json& j) {
  CellReport c;
  c.snr_db = get_num(j.at("snr_db"));
  c.r_deg = get_num(j.at("r_deg"));
  c.mse_rad2 = get_num(j.at("mse_rad2"));
  c.mse_db = get_num(j.at("mse_db"));
  c.lower_bound_rad2 = get_num(j.at("lower_bound_rad2"));
  if (j.contains("mean_time_s")) c.mean_time_s = get_num(j["mean_time_s"]);
  c.convergence_rate = get_num(j.at("convergence_rate"));
  if (j.contains("kappa")) c.kappa = get_num(j["kappa"]);
  if (j.contains("ks_pass_rate")) c.ks_pass_rate = get_num(j["ks_pass_rate"]);
  c.failures = j.value("failures", 0);
  c.degraded = j.value("degraded", false);
  if (j.contains("trials"))
    for (const auto& t : j["trials"]) c.trials.push_back(trial_from(t));
  return c;
}

std::string source_model_name(SourceModel m) { return m == SourceModel::unit_modulus ? "unit_modulus" : "gaussian"; }

SourceModel parse_source_model(const std::string& s) {
  if (s == "gaussian") return SourceModel::gaussian;
  if (s == "unit_modulus") return SourceModel::unit_modulus;
  throw std::invalid_argument("unknown source model: " + s);
}

std::vector<std::pair<double, double>> get_intervals(const json& j) {
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2) throw std::invalid_argument("intervals_deg entries must be [lo, hi]");
    out.emplace_back(get_num(iv[0]), get_num(iv[1]));
  }
  return out;
}

// Scenario fields shared by spec files and scenario files.
void read_scenario_fields(const json& j, ScenarioTemplate& s) {
  if (j.contains("M")) s.sensors = j["M"].get<Index>();
  if (j.contains("T")) s.snapshots = j["T"].get<Index>();
  if (j.contains("doas_deg")) {
    s.doas_deg = get_num_array(j["doas_deg"]);
    s.intervals_deg.clear();
  }
  if (j.contains("intervals_deg")) {
    s.intervals_deg = get_intervals(j["intervals_deg"]);
    if (!j.contains("doas_deg")) s.doas_deg.clear();
  }
  if (j.contains("source_model")) s.source_model = parse_source_model(j["source_model"].get<std::string>());
  if (j.contains("K") && j["K"].get<Index>() != s.sources())
    throw std::invalid_argument("K does not match the number of DOAs or intervals");
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown format: " + s);
}

void write_report_csv(const AggregateReport& report, std::ostream& os) {
  bool kappa = false, ks = false;
  for (const auto& c : report.cells) {
    kappa = kappa || c.kappa.has_value();
    ks = ks || c.ks_pass_rate.has_value();
  }
  os << "snr_db,r_deg,mse_rad2,mse_db,lower_bound_rad2,mean_time_s,convergence_rate";
  if (kappa) os << ",kappa";
  if (ks) os << ",ks_pass_rate";
  os << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : report.cells) {
    os << format_double(c.snr_db) << ',' << format_double(c.r_deg) << ',' << format_double(c.mse_rad2) << ','
       << format_double(c.mse_db) << ',' << format_double(c.lower_bound_rad2) << ',' << format_double(c.mean_time_s)
       << ',' << format_double(c.convergence_rate);
    if (kappa) os << ',' << format_double(c.kappa.value_or(nan));
    if (ks) os << ',' << format_double(c.ks_pass_rate.value_or(nan));
    os << '\n';
  }
}

std::string report_to_json(const AggregateReport& report, bool include_timing) {
  json cells = json::array();
  for (const auto& c : report.cells) cells.push_back(cell_json(c, include_timing));
  json j{{"kind", to_string(report.kind)}, {"cells", std::move(cells)}};
  return j.dump(2);
}

AggregateReport report_from_json(const std::string& text) {
  const json j = parse_json(text);
  AggregateReport r;
  try {
    r.kind = parse_kind(j.at("kind").get<std::string>());
    for (const auto& c : j.at("cells")) r.cells.push_back(cell_from(c));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad report JSON: ") + e.what());
  }
  return r;
}

void write_report(const AggregateReport& report, const std::string& path, ReportFormat format) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == ReportFormat::csv)
    write_report_csv(report, os);
  else
    os << report_to_json(report) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

AggregateReport read_report_json(const std::string& path) { return report_from_json(read_text_file(path)); }

ExperimentSpec spec_from_json(const std::string& text) {
  const json j = parse_json(text);
  try {
    ExperimentSpec s = default_spec(parse_kind(j.value("kind", std::string("mmv_sweep"))));
    if (j.contains("grid_deg")) s.grid_deg = get_num_array(j["grid_deg"]);
    if (j.contains("snr_db")) s.snr_db = get_num_array(j["snr_db"]);
    if (j.contains("kappas")) s.kappas = get_num_array(j["kappas"]);
    if (j.contains("outlier_count")) s.outlier_count = j["outlier_count"].get<Index>();
    if (j.contains("trials")) s.trials = j["trials"].get<int>();
    if (j.contains("algo")) s.algo = parse_algorithm(j["algo"].get<std::string>());
    if (j.contains("base_seed")) s.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("threads")) s.threads = j["threads"].get<unsigned>();
    if (j.contains("scenario")) read_scenario_fields(j["scenario"], s.scenario);
    if (j.contains("inference")) {
      const json& c = j["inference"];
      InferenceConfig& cfg = s.inference;
      if (c.contains("rho")) cfg.rho = get_num(c["rho"]);
      if (c.contains("c")) cfg.c = get_num(c["c"]);
      if (c.contains("d")) cfg.d = get_num(c["d"]);
      if (c.contains("tol")) cfg.tol = get_num(c["tol"]);
      if (c.contains("max_iter")) cfg.max_iter = c["max_iter"].get<int>();
    }
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad spec JSON: ") + e.what());
  }
}

std::string spec_to_json(const ExperimentSpec& s) {
  json sc{{"M", s.scenario.sensors}, {"T", s.scenario.snapshots}, {"source_model", source_model_name(s.scenario.source_model)}};
  if (s.scenario.doas_deg.empty()) {
    json iv = json::array();
    for (const auto& [lo, hi] : s.scenario.intervals_deg) iv.push_back({lo, hi});
    sc["intervals_deg"] = iv;
  } else {
    sc["doas_deg"] = num_array(s.scenario.doas_deg);
  }
  const InferenceConfig& c = s.inference;
  json j{{"kind", to_string(s.kind)},
         {"grid_deg", num_array(s.grid_deg)},
         {"snr_db", num_array(s.snr_db)},
         {"kappas", num_array(s.kappas)},
         {"outlier_count", s.outlier_count},
         {"trials", s.trials},
         {"algo", to_string(s.algo)},
         {"base_seed", s.base_seed},
         {"threads", s.threads},
         {"scenario", sc},
         {"inference", {{"rho", c.rho}, {"c", c.c}, {"d", c.d}, {"tol", c.tol}, {"max_iter", c.max_iter}}}};
  return j.dump(2);
}

ScenarioFile scenario_from_json(const std::string& text) {
  const json j = parse_json(text);
  ScenarioFile f;
  try {
    read_scenario_fields(j, f.scenario);
    if (j.contains("snr_db")) f.snr_db = get_num(j["snr_db"]);
    if (j.contains("seed")) f.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad scenario JSON: ") + e.what());
  }
  if (f.scenario.doas_deg.empty() == f.scenario.intervals_deg.empty())
    throw std::invalid_argument("scenario needs exactly one of doas_deg and intervals_deg");
  return f;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ogsbi
