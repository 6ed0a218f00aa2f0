#pragma once

// Observation CSV persistence, the experiment-case matrix and the per-case
// train/evaluate driver.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrsjam/ml.hpp"
#include "vrsjam/scenario.hpp"
#include "vrsjam/types.hpp"

namespace vrsjam::dataset {

inline constexpr const char* kCsvHeader = "t,rssi_dbm,sinr_db,pdr,delta_u_mps,own_speed_mps,vrs,class";

/// Throws std::invalid_argument for empty records, std::runtime_error if unwritable.
void write_observations(std::span<const ObservationRecord> records, const std::filesystem::path& path);
void write_observations(std::span<const ObservationRecord> records, std::ostream& out);

/// Throws std::runtime_error on a bad header or malformed row.
std::vector<ObservationRecord> read_observations(const std::filesystem::path& path);
std::vector<ObservationRecord> read_observations(std::istream& in);

enum class Classifier { KNN, RF };

std::string_view to_string(Classifier c);

struct ExperimentCase {
    std::string name;
    Classifier classifier = Classifier::KNN;
    bool use_vrs = true;
    bool normalize = false;
    double train_speed = 15.0;
    double test_speed = 15.0;
};

/// The twelve Same_/Different_/Norm_ cases, in table order.
const std::vector<ExperimentCase>& table_cases();
/// The four High_ cases: trained and tested on 25 m/s data.
const std::vector<ExperimentCase>& high_speed_cases();
std::optional<ExperimentCase> find_case(std::string_view name);

/// Config of one scenario run inside the (speed, seed) dataset.
scenario::ScenarioConfig run_config(const scenario::ScenarioConfig& base, double speed, ScenarioKind kind,
                                    std::uint64_t seed);

/// Smart, Interference, Constant runs concatenated with t offset by one duration each.
std::vector<ObservationRecord> full_run(const scenario::ScenarioConfig& base, double speed, std::uint64_t seed);

/// Name of the CSV holding the full run for (speed, seed), e.g. "obs_v15_s1.csv".
std::string run_file_name(double speed, std::uint64_t seed);

/// Caches full runs per (speed, seed). With a directory, runs are read from or
/// written to CSV there and listed in a manifest; a <name>.cfg stamp beside each
/// CSV records its config, and a CSV whose stamp differs is regenerated. Thread-safe.
class DatasetStore {
public:
    explicit DatasetStore(scenario::ScenarioConfig base = {},
                          std::optional<std::filesystem::path> dir = std::nullopt);

    const std::vector<ObservationRecord>& get(double speed, std::uint64_t seed);
    const scenario::ScenarioConfig& base() const { return base_; }

private:
    scenario::ScenarioConfig base_;
    std::optional<std::filesystem::path> dir_;
    std::mutex mu_;
    std::map<std::pair<long, std::uint64_t>, std::vector<ObservationRecord>> cache_;
};

/// Appends the run's configs to <dir>/manifest.txt in key = value blocks.
void append_manifest(const std::filesystem::path& dir, const scenario::ScenarioConfig& base, double speed,
                     std::uint64_t seed);

struct CaseData {
    ml::FeatureMatrix train;
    ml::FeatureMatrix test;
};

/// Applies the case's speed selection, feature set, split and normalization.
/// Train rows come from the train part of the train-speed run; test rows from
/// the test part of the test-speed run, so the two never share a row.
CaseData build_case_dataset(const ExperimentCase& c, DatasetStore& store, std::uint64_t seed,
                            double train_fraction = 0.3);

struct ModelParams {
    int k = 5;
    ml::ForestParams forest;
    double train_fraction = 0.3;
};

struct CaseResult {
    ExperimentCase exp;
    std::uint64_t seed = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    ml::Evaluation eval;
};

CaseResult run_case(const ExperimentCase& c, DatasetStore& store, std::uint64_t seed, const ModelParams& params);

/// key = value results file for one case.
void write_result(const CaseResult& r, std::ostream& out);
void write_result(const CaseResult& r, const std::filesystem::path& path);

struct ResultSummary {
    std::string name;
    Classifier classifier = Classifier::KNN;
    bool use_vrs = false;
    double train_speed = 0.0;
    double test_speed = 0.0;
    double accuracy = 0.0;  // fraction
};

/// Throws ConfigError on unknown or missing keys.
ResultSummary read_result(std::istream& in);
ResultSummary read_result(const std::filesystem::path& path);

}  // namespace vrsjam::dataset
