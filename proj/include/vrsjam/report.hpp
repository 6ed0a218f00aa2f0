#pragma once

// Text and static-file renderings of evaluation results: confusion tables,
// the per-case summary CSV and an SVG bar chart.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vrsjam/dataset.hpp"
#include "vrsjam/ml.hpp"

namespace vrsjam::report {

/// 3x3 table, predicted classes as rows, plus "accuracy: xx.xx%".
std::string format_confusion(const ml::Evaluation& eval);

struct Collected {
    std::vector<dataset::ResultSummary> results;  // in the canonical case order
    std::vector<std::string> missing;             // canonical cases without a results file
};

/// Reads every *.result file in `dir`; files sharing a case name are averaged. Throws std::runtime_error when none exist.
Collected collect_results(const std::filesystem::path& dir);

inline constexpr const char* kSummaryHeader = "case,classifier,use_vrs,train_speed,test_speed,accuracy";

void write_summary_csv(const std::vector<dataset::ResultSummary>& results, std::ostream& out);
/// One bar per result, accuracy in percent.
void write_svg_chart(const std::vector<dataset::ResultSummary>& results, std::ostream& out);

}  // namespace vrsjam::report
