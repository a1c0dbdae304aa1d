// SPDX-License-Identifier: Apache-2.0
//
// Report and spec serialization. CSV carries the per-cell summary; JSON
// carries the summary plus every trial and reads back to an equal report.
// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
#pragma once

#include <iosfwd>
#include <string>

#include "ogsbi/bench.hpp"

namespace ogsbi {

enum class ReportFormat { csv, json };

ReportFormat parse_format(const std::string& s);

/// Header plus one line per cell. kappa and ks_pass_rate columns are
/// appended when any cell carries them.
void write_report_csv(const AggregateReport& report, std::ostream& os);

/// With include_timing = false the measured wall-clock fields are dropped,
/// leaving a dump that is a pure function of the spec.
std::string report_to_json(const AggregateReport& report, bool include_timing = true);
AggregateReport report_from_json(const std::string& text);

/// Throws std::runtime_error on I/O failure.
void write_report(const AggregateReport& report, const std::string& path, ReportFormat format);
AggregateReport read_report_json(const std::string& path);

/// Spec files use the ExperimentSpec field names with angles in degrees;
/// absent fields keep the defaults of the given kind.
ExperimentSpec spec_from_json(const std::string& text);
std::string spec_to_json(const ExperimentSpec& spec);

/// Scenario file: {K, doas_deg | intervals_deg, T, snr_db, seed} plus the
/// optional M and source_model.
struct ScenarioFile {
  ScenarioTemplate scenario;
  double snr_db = 10.0;
  std::uint64_t seed = 0;
};

ScenarioFile scenario_from_json(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace ogsbi
