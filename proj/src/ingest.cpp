#include "benchpred/ingest.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "benchpred/error.hpp"
#include "benchpred/harness.hpp"

namespace benchpred {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_score(const std::string& cell, int line_no) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const char* last = end;
  while (last > begin && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, last, value);
  if (ec != std::errc() || ptr != last || begin == last) {
    throw data_error("malformed-csv",
                     "line " + std::to_string(line_no) + ": bad numeric cell '" + cell + "'");
  }
  return value;
}

std::string format_score(double v) {
  char buf[32];
  if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

std::string format_fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

}  // namespace

BenchmarkBundle load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("io-error", "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw data_error("malformed-csv", "line 1: empty file");
  line = strip_cr(line);
  const std::vector<std::string> header = split_line(line);
  if (header.empty() || header[0] != "model_id") {
    throw data_error("malformed-csv", "line 1: header must start with 'model_id'");
  }
  if (header.size() < 2) {
    throw data_error("malformed-csv", "line 1: no data-point columns");
  }

  BenchmarkBundle bundle;
  ScoreMatrix& matrix = bundle.matrix;
  matrix.datapoint_ids.assign(header.begin() + 1, header.end());
  const std::size_t n_cols = matrix.datapoint_ids.size();

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != n_cols + 1) {
      throw data_error("malformed-csv",
                       "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(n_cols + 1) + " cells, got " +
                           std::to_string(cells.size()));
    }
    matrix.model_ids.push_back(cells[0]);
    std::vector<double> row(n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) row[j] = parse_score(cells[j + 1], line_no);
    rows.push_back(std::move(row));
  }

  matrix.scores.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n_cols; ++j) {
      matrix.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  matrix.binary_flag = matrix.scores.size() > 0 && all_binary(matrix.scores);

  const ValidationReport issues = validate(matrix);
  if (!issues.empty()) {
    std::string detail = issues.front().kind + " (" + issues.front().detail + ")";
    if (issues.size() > 1) {
      detail += " and " + std::to_string(issues.size() - 1) + " more";
    }
    throw data_error("invalid-scores", path + ": " + detail);
  }

  bundle.name = path;
  bundle.provenance = "loaded from " + path;
  return bundle;
}

void save_csv(const BenchmarkBundle& bundle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("io-error", "cannot write " + path);
  out << "model_id";
  for (const auto& id : bundle.matrix.datapoint_ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < bundle.matrix.models(); ++i) {
    out << bundle.matrix.model_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < bundle.matrix.datapoints(); ++j) {
      out << ',' << format_score(bundle.matrix.scores(i, j));
    }
    out << '\n';
  }
  if (!out) throw data_error("io-error", "failed writing " + path);
}

namespace {

json trial_to_json(const TrialReport& t) {
  json j;
  j["benchmark"] = t.benchmark;
  j["method"] = method_name(t.method);
  j["trial"] = t.trial;
  j["seed"] = t.seed;
  j["n"] = t.n;
  j["status"] = t.status;
  j["core_set"] = t.core_set;
  json targets = json::array();
  for (const TargetRecord& r : t.targets) {
    json e;
    e["model"] = r.model;
    e["true_mean"] = r.true_mean;
    e["estimate"] = r.estimate;
    e["gap"] = r.gap;
    e["sigma"] = r.sigma;
    if (r.normalized_defined) {
      e["normalized_gap"] = r.normalized_gap;
    } else {
      e["normalized_gap"] = nullptr;
    }
    if (r.similarity_defined) {
      e["similarity"] = r.similarity;
      e["similarity_degenerate"] = r.similarity_degenerate;
    } else {
      e["similarity"] = nullptr;
    }
    targets.push_back(std::move(e));
  }
  j["estimates"] = std::move(targets);
  j["gap"] = t.trial_eg;
  return j;
}

TrialReport trial_from_json(const json& j) {
  TrialReport t;
  t.benchmark = j.at("benchmark").get<std::string>();
  t.method = method_from_name(j.at("method").get<std::string>());
  t.trial = j.at("trial").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.n = j.at("n").get<int>();
  t.status = j.at("status").get<std::string>();
  t.core_set = j.at("core_set").get<std::vector<int>>();
  for (const json& e : j.at("estimates")) {
    TargetRecord r;
    r.model = e.at("model").get<std::string>();
    r.true_mean = e.at("true_mean").get<double>();
    r.estimate = e.at("estimate").get<double>();
    r.gap = e.at("gap").get<double>();
    r.sigma = e.at("sigma").get<double>();
    if (!e.at("normalized_gap").is_null()) {
      r.normalized_gap = e.at("normalized_gap").get<double>();
      r.normalized_defined = true;
    }
    if (e.contains("similarity") && !e.at("similarity").is_null()) {
      r.similarity = e.at("similarity").get<double>();
      r.similarity_defined = true;
      r.similarity_degenerate = e.value("similarity_degenerate", false);
    }
    t.targets.push_back(std::move(r));
  }
  t.trial_eg = j.at("gap").get<double>();
  return t;
}

json summary_to_json(const ExperimentSummary& summary) {
  json cells = json::array();
  for (const CellSummary& c : summary.cells) {
    json j;
    j["benchmark"] = c.benchmark;
    j["method"] = method_name(c.method);
    j["status"] = c.status;
    j["trials"] = c.trials;
    j["eg"] = c.eg_mean;
    j["eg_sem"] = c.eg_sem;
    j["egr"] = c.egr_defined ? json(c.egr) : json(nullptr);
    j["similarity_gap_correlation"] =
        c.correlation_defined ? json(c.similarity_gap_correlation) : json(nullptr);
    cells.push_back(std::move(j));
  }
  json methods = json::array();
  for (const MethodSummary& m : summary.methods) {
    json j;
    j["method"] = method_name(m.method);
    j["benchmarks"] = m.benchmarks;
    j["eg"] = m.eg_mean;
    j["egr"] = m.egr_defined ? json(m.egr_mean) : json(nullptr);
    methods.push_back(std::move(j));
  }
  json out;
  out["cells"] = std::move(cells);
  out["methods"] = std::move(methods);
  return out;
}

void save_report_json(const RunReport& report, const std::string& path) {
  json root;
  root["schema"] = "benchpred-report-v1";
  if (!report.config_json.empty()) {
    root["config"] = json::parse(report.config_json);
  } else {
    root["config"] = nullptr;
  }
  json trials = json::array();
  for (const TrialReport& t : report.trials) trials.push_back(trial_to_json(t));
  root["trials"] = std::move(trials);
  root["summary"] = summary_to_json(report.summary);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("io-error", "cannot write " + path);
  out << root.dump(1, ' ') << '\n';
  if (!out) throw data_error("io-error", "failed writing " + path);
}

constexpr const char* kCsvHeader =
    "benchmark,method,trial,seed,n,status,model,true_mean,estimate,gap,sigma,"
    "normalized_gap,similarity";

void save_report_csv(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("io-error", "cannot write " + path);
  out << kCsvHeader << '\n';
  for (const TrialReport& t : report.trials) {
    const std::string prefix = t.benchmark + "," + method_name(t.method) + "," +
                               std::to_string(t.trial) + "," + std::to_string(t.seed) + "," +
                               std::to_string(t.n) + "," + t.status;
    if (t.targets.empty()) {
      out << prefix << ",,,,,,,\n";
      continue;
    }
    for (const TargetRecord& r : t.targets) {
      out << prefix << ',' << r.model << ',' << format_fixed9(r.true_mean) << ','
          << format_fixed9(r.estimate) << ',' << format_fixed9(r.gap) << ','
          << format_fixed9(r.sigma) << ','
          << (r.normalized_defined ? format_fixed9(r.normalized_gap) : std::string()) << ','
          << (r.similarity_defined ? format_fixed9(r.similarity) : std::string()) << '\n';
    }
  }
  if (!out) throw data_error("io-error", "failed writing " + path);
}

RunReport load_report_csv(std::ifstream& in) {
  RunReport report;
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kCsvHeader) {
    throw data_error("malformed-csv", "line 1: unexpected report header");
  }
  TrialReport* current = nullptr;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != 13) {
      throw data_error("malformed-csv", "line " + std::to_string(line_no));
    }
    const int trial = static_cast<int>(parse_score(cells[2], line_no));
    const MethodId method = method_from_name(cells[1]);
    if (current == nullptr || current->benchmark != cells[0] || current->method != method ||
        current->trial != trial) {
      report.trials.emplace_back();
      current = &report.trials.back();
      current->benchmark = cells[0];
      current->method = method;
      current->trial = trial;
      current->seed = std::stoull(cells[3]);
      current->n = static_cast<int>(parse_score(cells[4], line_no));
      current->status = cells[5];
    }
    if (cells[6].empty()) continue;  // not-applicable marker row
    TargetRecord r;
    r.model = cells[6];
    r.true_mean = parse_score(cells[7], line_no);
    r.estimate = parse_score(cells[8], line_no);
    r.gap = parse_score(cells[9], line_no);
    r.sigma = parse_score(cells[10], line_no);
    if (!cells[11].empty()) {
      r.normalized_gap = parse_score(cells[11], line_no);
      r.normalized_defined = true;
    }
    if (!cells[12].empty()) {
      r.similarity = parse_score(cells[12], line_no);
      r.similarity_defined = true;
    }
    current->targets.push_back(std::move(r));
  }
  for (TrialReport& t : report.trials) {
    if (!t.targets.empty()) {
      double sum = 0.0;
      for (const TargetRecord& r : t.targets) sum += r.gap;
      t.trial_eg = sum / static_cast<double>(t.targets.size());
    }
  }
  report.summary = aggregate(report.trials);
  return report;
}

}  // namespace

void save_report(const RunReport& report, const std::string& path, ReportFormat format) {
  if (report.trials.empty()) throw Error("empty-report", "nothing to save");
  if (format == ReportFormat::json) {
    save_report_json(report, path);
  } else {
    save_report_csv(report, path);
  }
}

RunReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("io-error", "cannot open " + path);
  const int first = in.peek();
  if (first == '{') {
    json root;
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      throw data_error("malformed-report", std::string("JSON parse failure: ") + e.what());
    }
    RunReport report;
    if (root.contains("config") && !root.at("config").is_null()) {
      report.config_json = root.at("config").dump();
    }
    for (const json& t : root.at("trials")) report.trials.push_back(trial_from_json(t));
    report.summary = aggregate(report.trials);
    return report;
  }
  return load_report_csv(in);
}

}  // namespace benchpred
