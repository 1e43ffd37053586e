#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fresco/config.hpp"
#include "fresco/report.hpp"

namespace fresco {

// Output tree layout, all paths under cfg.out_dir:
//   resolved_config.json
//   data/household_<id>_day_<d>.csv, data/manifest.json
//   train/<mode>/rounds.csv
//   train/<mode>/checkpoints/{initial.params, round_<r>_client_<id>.params,
//                             final_client_<id>.params, final.params}
//   baseline/solutions/h<id>_day<d>.csv, baseline/reports.csv
//   eval/<arm>/reports.csv (+ traces/ when write_traces)
//   report/{comparison.csv, comparison.txt, deltas.csv}
namespace paths {

std::string resolved_config(const RunConfig& cfg);
std::string data_dir(const RunConfig& cfg);
std::string manifest(const RunConfig& cfg);
std::string day_csv(const RunConfig& cfg, int household_id, int day);
std::string train_dir(const RunConfig& cfg, const std::string& mode);
std::string rounds_csv(const RunConfig& cfg, const std::string& mode);
std::string checkpoint_dir(const RunConfig& cfg, const std::string& mode);
std::string initial_params(const RunConfig& cfg, const std::string& mode);
std::string round_params(const RunConfig& cfg, const std::string& mode, int round, int client_id);
std::string final_client_params(const RunConfig& cfg, const std::string& mode, int client_id);
std::string final_params(const RunConfig& cfg, const std::string& mode);
std::string baseline_dir(const RunConfig& cfg);
std::string solution_csv(const RunConfig& cfg, int household_id, int day);
std::string baseline_reports(const RunConfig& cfg);
std::string eval_dir(const RunConfig& cfg, const std::string& arm);
std::string eval_reports(const RunConfig& cfg, const std::string& arm);
std::string eval_trace(const RunConfig& cfg, const std::string& arm, int household_id, int day);
std::string report_dir(const RunConfig& cfg);
std::string comparison_csv(const RunConfig& cfg);
std::string comparison_txt(const RunConfig& cfg);
std::string deltas_csv(const RunConfig& cfg);

}  // namespace paths

inline constexpr const char* kArmOracle = "oracle";
inline constexpr const char* kArmBase = "base";
inline constexpr const char* kArmIsolated = "a2c_isolated";
inline constexpr const char* kArmFederated = "fedavg";

// The evaluation day for (household, day_index). Derived from the
// master seed only, so every arm scores the identical realization.
DayData eval_day(const RunConfig& cfg, const HouseholdSpec& h, int day_index);

// One row of an arm's reports.csv; trace omitted (day_index identifies
// the trace file when traces were requested).
struct ReportRow {
    std::string arm;
    std::string split;  // "train" or "test"
    int day_index = 0;
    EpisodeReport report;
};

std::string report_rows_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> report_rows_from_csv(const std::string& text);

// Commands return 0 on success and print one diagnostic line per error
// to err. They create their output directories as needed.
int cmd_generate(const RunConfig& cfg, int days, std::ostream& err);
int cmd_train(const RunConfig& cfg, const std::string& mode, std::ostream& err);
int cmd_baseline(const RunConfig& cfg, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, std::ostream& err);
int cmd_report(const RunConfig& cfg, std::ostream& err);

}  // namespace fresco
