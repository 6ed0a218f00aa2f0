// vrsjam: simulate scenario runs, evaluate classifier cases, summarize results.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vrsjam/dataset.hpp"
#include "vrsjam/report.hpp"
#include "vrsjam/scenario.hpp"
#include "vrsjam/simulation.hpp"

namespace fs = std::filesystem;
using namespace vrsjam;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

scenario::ScenarioConfig base_config(const std::string& path) {
    if (path.empty()) return {};
    if (!fs::exists(path)) throw UsageError("config file not found: " + path);
    return scenario::load_config(path);
}

void write_sinr_series(const simulation::RunTrace& run, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,sinr_db,rssi_dbm,emitter_dist_m,true_delta_u_mps,jammed_fraction,delivered\n";
    char line[256];
    for (std::size_t i = 0; i < run.records.size(); ++i) {
        const auto& r = run.records[i];
        const auto& g = run.truth[i];
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", r.t, r.sinr, r.rssi, g.emitter_dist,
                      g.true_delta_u, g.jammed_fraction, g.delivered ? 1 : 0);
        out << line;
    }
}

struct SimulateOpts {
    std::string config;
    double speed = 15.0;
    std::string scenario = "all";
    std::uint64_t seed = 1;
    std::string out = "out";
};

int cmd_simulate(const SimulateOpts& o) {
    const auto base = base_config(o.config);
    std::vector<ScenarioKind> kinds;
    if (o.scenario == "all") {
        kinds.assign(kAllKinds.begin(), kAllKinds.end());
    } else {
        try {
            kinds.push_back(parse_kind(o.scenario));
        } catch (const std::exception&) {
            throw UsageError("unknown scenario '" + o.scenario + "'");
        }
    }
    fs::create_directories(o.out);
    const std::string stem = fs::path(dataset::run_file_name(o.speed, o.seed)).stem().string();
    for (auto kind : kinds) {
        const auto cfg = dataset::run_config(base, o.speed, kind, o.seed);
        const auto run = simulation::simulate_run(cfg);
        const std::string name = std::string(to_string(kind)) + "_" + stem.substr(4);
        const fs::path obs = fs::path(o.out) / (name + ".csv");
        dataset::write_observations(run.records, obs);
        write_sinr_series(run, fs::path(o.out) / (name + "_sinr.csv"));
        std::cout << obs.string() << ": " << run.records.size() << " rows\n";
    }
    dataset::append_manifest(o.out, base, o.speed, o.seed);
    return 0;
}

struct EvaluateOpts {
    std::string config;
    std::string case_name = "all";
    std::uint64_t seed = 1;
    int repeat = 1;
    int k = 5;
    int trees = 100;
    int threads = 0;
    std::string data = "data";
    std::string out = "results";
};

int cmd_evaluate(const EvaluateOpts& o) {
    std::vector<dataset::ExperimentCase> cases;
    if (o.case_name == "all") {
        cases = dataset::table_cases();
    } else if (o.case_name == "high") {
        cases = dataset::high_speed_cases();
    } else if (auto c = dataset::find_case(o.case_name)) {
        cases.push_back(*c);
    } else {
        throw ConfigError("case", "unknown case '" + o.case_name + "'");
    }

    dataset::DatasetStore store(base_config(o.config), fs::path(o.data));
    dataset::ModelParams params;
    params.k = o.k;
    params.forest.n_trees = o.trees;
    params.forest.threads = o.threads;
    fs::create_directories(o.out);

    std::vector<double> means;
    for (const auto& c : cases) {
        double sum = 0.0;
        for (int r = 0; r < o.repeat; ++r) {
            const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(r);
            const auto res = dataset::run_case(c, store, seed, params);
            dataset::write_result(res, fs::path(o.out) / (c.name + "_s" + std::to_string(seed) + ".result"));
            std::cout << "== " << c.name << " (seed " << seed << ", train " << res.n_train << ", test "
                      << res.n_test << ")\n"
                      << report::format_confusion(res.eval);
            sum += res.eval.accuracy;
        }
        if (o.repeat > 1) std::printf("%s mean accuracy: %.2f%%\n", c.name.c_str(), 100.0 * sum / o.repeat);
        means.push_back(sum / o.repeat);
    }
    if (cases.size() > 1) {
        std::printf("\n%-22s %-4s %-4s %6s %6s %9s\n", "case", "clf", "vrs", "train", "test", "accuracy");
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& c = cases[i];
            std::printf("%-22s %-4s %-4s %6g %6g %8.2f%%\n", c.name.c_str(),
                        std::string(dataset::to_string(c.classifier)).c_str(), c.use_vrs ? "yes" : "no",
                        c.train_speed, c.test_speed, 100.0 * means[i]);
        }
    }
    return 0;
}

struct ReportOpts {
    std::string results = "results";
    std::string out;
};

int cmd_report(const ReportOpts& o) {
    const auto collected = report::collect_results(o.results);
    for (const auto& m : collected.missing) std::cerr << "warning: no results for case " << m << '\n';
    const fs::path dir = o.out.empty() ? fs::path(o.results) : fs::path(o.out);
    fs::create_directories(dir);
    {
        std::ofstream csv(dir / "summary.csv");
        if (!csv) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
        report::write_summary_csv(collected.results, csv);
    }
    {
        std::ofstream svg(dir / "summary.svg");
        if (!svg) throw std::runtime_error("cannot write " + (dir / "summary.svg").string());
        report::write_svg_chart(collected.results, svg);
    }
    for (const auto& r : collected.results) std::printf("%-24s %6.2f%%\n", r.name.c_str(), 100.0 * r.accuracy);
    std::cout << "wrote " << (dir / "summary.csv").string() << " and " << (dir / "summary.svg").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VRS-assisted jamming detection: simulation and classifier evaluation"};
    app.require_subcommand(1);

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "Run scenarios and write observation and SINR CSVs");
    sim->add_option("config", so.config, "key = value scenario config (defaults if omitted)");
    sim->add_option("--speed", so.speed, "Tx/Rx base speed, m/s")->check(CLI::PositiveNumber);
    sim->add_option("--scenario", so.scenario, "all, Interference, SmartAttack or ConstantAttack");
    sim->add_option("--seed", so.seed, "Dataset seed");
    sim->add_option("--out", so.out, "Output directory");

    EvaluateOpts eo;
    auto* ev = app.add_subcommand("evaluate", "Train and test classifier cases");
    ev->add_option("--case", eo.case_name, "Case name, 'all' (12 table cases) or 'high' (25 m/s cases)");
    ev->add_option("--config", eo.config, "key = value scenario config");
    ev->add_option("--seed", eo.seed, "First seed");
    ev->add_option("--repeat", eo.repeat, "Number of consecutive seeds")->check(CLI::PositiveNumber);
    ev->add_option("--k", eo.k, "KNN neighbours")->check(CLI::PositiveNumber);
    ev->add_option("--trees", eo.trees, "Random forest size")->check(CLI::PositiveNumber);
    ev->add_option("--threads", eo.threads, "Forest training threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    ev->add_option("--data", eo.data, "Observation cache directory (generated when missing)");
    ev->add_option("--out", eo.out, "Results directory");

    ReportOpts ro;
    auto* rep = app.add_subcommand("report", "Summarize results files into CSV and SVG");
    rep->add_option("--results", ro.results, "Directory of .result files");
    rep->add_option("--out", ro.out, "Output directory (defaults to the results directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sim) return cmd_simulate(so);
        if (*ev) return cmd_evaluate(eo);
        if (*rep) return cmd_report(ro);
    } catch (const ConfigError& e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
