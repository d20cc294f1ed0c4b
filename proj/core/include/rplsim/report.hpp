#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rplsim/expctl.hpp"

namespace rplsim {

/// Metric column names, in the fixed runs.csv order.
const std::vector<std::string>& report_metric_names();

/// runs.csv: header `cell,rep,seed,metric,value`, one row per
/// replication x cell x metric, missing values left empty. Formatting is
/// deterministic so identical results are byte-identical.
void write_runs_csv(std::ostream& out, const MatrixResult& result);

/// summary.csv: `cell,metric,mean,ci95,reps`; ci95 empty below 2 samples,
/// mean empty when every replication was missing.
void write_summary_csv(std::ostream& out, const MatrixResult& result);

/// Per-figure data files in `dir`: `<metric>_<static|mobile>.dat`, one line
/// per replay interval, one (mean, ci) column pair per series in the order
/// rpl, underattack, limsd, secrpl. Missing cells appear as `-` gaps.
void write_figure_files(const std::string& dir, const MatrixResult& result);

/// Human-readable comparison table grouping PDR/AE2ED/APC/PLR per replay
/// interval and FPR per defense.
std::string comparison_table(const MatrixResult& result);

/// Writes runs.csv, summary.csv, figure files, and comparison.txt into `dir`.
void write_all(const std::string& dir, const MatrixResult& result);

/// Rebuilds a MatrixResult (rows only) from a runs.csv previously written by
/// write_runs_csv. The full RunMetrics are not recoverable from the CSV.
MatrixResult load_runs_csv(const std::string& path);

}  // namespace rplsim
