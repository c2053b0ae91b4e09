#pragma once

#include <string>

#include "benchpred/report.hpp"
#include "benchpred/score_matrix.hpp"

namespace benchpred {

/// A named, validated score matrix plus free-text provenance.
struct BenchmarkBundle {
  std::string name;
  ScoreMatrix matrix;
  std::string provenance;
};

/// Reads a score CSV: header `model_id,<dp1>,<dp2>,...`, one row per model.
/// Parsing is locale-independent (dot decimal separator). Throws
/// "malformed-csv" with the offending line number, or "invalid-scores" when
/// the parsed matrix fails validation.
BenchmarkBundle load_csv(const std::string& path);

/// Writes a bundle back out in the same CSV layout, full double precision.
void save_csv(const BenchmarkBundle& bundle, const std::string& path);

enum class ReportFormat { json, csv };

/// Persists a run report. JSON round-trips every numeric field bit-exactly;
/// CSV keeps 9 decimal places with one row per (method, target model, trial).
/// Cell wall times are diagnostics and are never serialized.
void save_report(const RunReport& report, const std::string& path, ReportFormat format);

/// Reads a report back; format inferred from the leading byte. CSV input
/// yields trials only (summary is recomputed, config is absent).
RunReport load_report(const std::string& path);

}  // namespace benchpred
