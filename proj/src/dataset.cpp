#include "vrsjam/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "vrsjam/seed.hpp"
#include "vrsjam/simulation.hpp"

namespace vrsjam::dataset {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_field(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

long speed_tag(double speed) { return std::lround(speed * 1000.0); }

}  // namespace

void write_observations(std::span<const ObservationRecord> records, std::ostream& out) {
    if (records.empty()) throw std::invalid_argument("write_observations: no records");
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << fixed6(r.t) << ',' << fixed6(r.rssi) << ',' << fixed6(r.sinr) << ',' << fixed6(r.pdr) << ','
            << fixed6(r.delta_u) << ',' << fixed6(r.own_speed) << ',' << fixed6(r.vrs) << ','
            << vrsjam::to_string(r.class_label) << '\n';
    }
}

void write_observations(std::span<const ObservationRecord> records, const std::filesystem::path& path) {
    if (records.empty()) throw std::invalid_argument("write_observations: no records");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_observations(records, out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ObservationRecord> read_observations(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("observation CSV: bad header");
    std::vector<ObservationRecord> out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest = line;
        for (;;) {
            const auto c = rest.find(',');
            f.push_back(rest.substr(0, c));
            if (c == std::string_view::npos) break;
            rest.remove_prefix(c + 1);
        }
        if (f.size() != 8) throw std::runtime_error("line " + std::to_string(n) + ": expected 8 fields");
        ObservationRecord r;
        r.t = parse_field(f[0], n);
        r.rssi = parse_field(f[1], n);
        r.sinr = parse_field(f[2], n);
        r.pdr = parse_field(f[3], n);
        r.delta_u = parse_field(f[4], n);
        r.own_speed = parse_field(f[5], n);
        r.vrs = parse_field(f[6], n);
        r.class_label = parse_kind(f[7]);
        out.push_back(r);
    }
    return out;
}

std::vector<ObservationRecord> read_observations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return read_observations(in);
}

std::string_view to_string(Classifier c) { return c == Classifier::KNN ? "KNN" : "RF"; }

const std::vector<ExperimentCase>& table_cases() {
    static const std::vector<ExperimentCase> cases = [] {
        std::vector<ExperimentCase> v;
        struct Group {
            const char* prefix;
            bool normalize;
            double test_speed;
        };
        for (const Group g : {Group{"Same_", false, 15.0}, Group{"Different_", false, 25.0}, Group{"Norm_", true, 15.0}}) {
            const std::pair<Classifier, bool> order[] = {
                {Classifier::KNN, true}, {Classifier::RF, true}, {Classifier::KNN, false}, {Classifier::RF, false}};
            for (const auto& [c, vrs] : order) {
                std::string name = std::string(g.prefix) + std::string(to_string(c)) + (vrs ? "-VRS" : "");
                v.push_back({name, c, vrs, g.normalize, 15.0, g.test_speed});
            }
        }
        return v;
    }();
    return cases;
}

const std::vector<ExperimentCase>& high_speed_cases() {
    static const std::vector<ExperimentCase> cases = {
        {"High_KNN-VRS", Classifier::KNN, true, false, 25.0, 25.0},
        {"High_RF-VRS", Classifier::RF, true, false, 25.0, 25.0},
        {"High_KNN", Classifier::KNN, false, false, 25.0, 25.0},
        {"High_RF", Classifier::RF, false, false, 25.0, 25.0},
    };
    return cases;
}

std::optional<ExperimentCase> find_case(std::string_view name) {
    for (const auto* list : {&table_cases(), &high_speed_cases()}) {
        for (const auto& c : *list) {
            if (c.name == name) return c;
        }
    }
    return std::nullopt;
}

scenario::ScenarioConfig run_config(const scenario::ScenarioConfig& base, double speed, ScenarioKind kind,
                                    std::uint64_t seed) {
    scenario::ScenarioConfig cfg = base;
    cfg.kind = kind;
    cfg.base_speed = speed;
    const auto tag = static_cast<std::uint64_t>(speed_tag(speed));
    cfg.seed = derive_seed(seed, {tag, static_cast<std::uint64_t>(kind)});
    // The three scenarios replay the same drive: one speed profile per (speed, seed).
    cfg.route_seed = derive_seed(seed, {tag, 0x7007eULL});
    return cfg;
}

std::vector<ObservationRecord> full_run(const scenario::ScenarioConfig& base, double speed, std::uint64_t seed) {
    std::vector<ObservationRecord> out;
    const ScenarioKind order[] = {ScenarioKind::SmartAttack, ScenarioKind::Interference, ScenarioKind::ConstantAttack};
    double offset = 0.0;
    for (const auto kind : order) {
        const auto cfg = run_config(base, speed, kind, seed);
        auto trace = simulation::simulate_run(cfg);
        for (auto& r : trace.records) {
            r.t += offset;
            out.push_back(r);
        }
        offset += cfg.duration;
    }
    return out;
}

std::string run_file_name(double speed, std::uint64_t seed) {
    std::ostringstream s;
    const long tag = speed_tag(speed);
    s << "obs_v" << tag / 1000;
    if (tag % 1000 != 0) s << 'p' << tag % 1000;
    s << "_s" << seed << ".csv";
    return s.str();
}

void append_manifest(const std::filesystem::path& dir, const scenario::ScenarioConfig& base, double speed,
                     std::uint64_t seed) {
    std::ofstream out(dir / "manifest.txt", std::ios::app);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << "# run " << run_file_name(speed, seed) << '\n';
    for (const auto kind : {ScenarioKind::SmartAttack, ScenarioKind::Interference, ScenarioKind::ConstantAttack}) {
        out << "[" << vrsjam::to_string(kind) << "]\n";
        scenario::write_kv(out, scenario::to_kv(run_config(base, speed, kind, seed)));
    }
    out << '\n';
}

DatasetStore::DatasetStore(scenario::ScenarioConfig base, std::optional<std::filesystem::path> dir)
    : base_(std::move(base)), dir_(std::move(dir)) {
    base_.validate();
}

namespace {

// Full config of the run set, written next to each cached CSV.
std::string config_stamp(const scenario::ScenarioConfig& base, double speed, std::uint64_t seed) {
    std::ostringstream out;
    scenario::write_kv(out, scenario::to_kv(run_config(base, speed, ScenarioKind::SmartAttack, seed)));
    return out.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

const std::vector<ObservationRecord>& DatasetStore::get(double speed, std::uint64_t seed) {
    const auto key = std::make_pair(speed_tag(speed), seed);
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    std::vector<ObservationRecord> rows;
    std::filesystem::path file;
    std::filesystem::path stamp_file;
    const std::string stamp = config_stamp(base_, speed, seed);
    if (dir_) {
        file = *dir_ / run_file_name(speed, seed);
        stamp_file = std::filesystem::path(file).replace_extension(".cfg");
        // a CSV made under another config is stale
        if (std::filesystem::exists(file) && std::filesystem::exists(stamp_file) && slurp(stamp_file) == stamp) {
            rows = read_observations(file);
        }
    }
    if (rows.empty()) {
        rows = full_run(base_, speed, seed);
        if (dir_) {
            std::lock_guard lock(mu_);
            std::filesystem::create_directories(*dir_);
            write_observations(rows, file);
            std::ofstream(stamp_file) << stamp;
            append_manifest(*dir_, base_, speed, seed);
        }
    }
    std::lock_guard lock(mu_);
    return cache_.emplace(key, std::move(rows)).first->second;
}

CaseData build_case_dataset(const ExperimentCase& c, DatasetStore& store, std::uint64_t seed,
                            double train_fraction) {
    const auto set = c.use_vrs ? ml::FeatureSet::WithVrs : ml::FeatureSet::WithoutVrs;
    auto split = [&](double speed) {
        const auto m = ml::make_feature_matrix(store.get(speed, seed), set);
        ml::SplitSpec spec;
        spec.train_fraction = train_fraction;
        spec.seed = derive_seed(seed, {0x5b117ULL, static_cast<std::uint64_t>(speed_tag(speed))});
        return std::make_pair(m, ml::split_indices(m.labels, spec));
    };

    CaseData d;
    const auto [train_m, train_s] = split(c.train_speed);
    d.train = ml::subset(train_m, train_s.train);
    if (c.test_speed == c.train_speed) {
        d.test = ml::subset(train_m, train_s.test);
    } else {
        const auto [test_m, test_s] = split(c.test_speed);
        d.test = ml::subset(test_m, test_s.test);
    }
    if (c.normalize) {
        auto n = ml::normalize_minmax(d.train, d.test);
        d.train = std::move(n.train);
        d.test = std::move(n.test);
    }
    return d;
}

CaseResult run_case(const ExperimentCase& c, DatasetStore& store, std::uint64_t seed, const ModelParams& params) {
    const auto data = build_case_dataset(c, store, seed, params.train_fraction);
    std::vector<ScenarioKind> pred;
    if (c.classifier == Classifier::KNN) {
        pred = ml::knn_classify_all(data.train, data.test, params.k);
    } else {
        ml::ForestParams fp = params.forest;
        fp.seed = derive_seed(seed, {0xf0e57ULL, fp.seed});
        pred = ml::rf_classify_all(ml::rf_train(data.train, fp), data.test);
    }
    CaseResult r;
    r.exp = c;
    r.seed = seed;
    r.n_train = data.train.size();
    r.n_test = data.test.size();
    r.eval = ml::evaluate(pred, data.test.labels);
    return r;
}

void write_result(const CaseResult& r, std::ostream& out) {
    out << "case = " << r.exp.name << '\n'
        << "classifier = " << to_string(r.exp.classifier) << '\n'
        << "use_vrs = " << (r.exp.use_vrs ? 1 : 0) << '\n'
        << "normalize = " << (r.exp.normalize ? 1 : 0) << '\n'
        << "train_speed = " << fmt_g(r.exp.train_speed) << '\n'
        << "test_speed = " << fmt_g(r.exp.test_speed) << '\n'
        << "seed = " << r.seed << '\n'
        << "n_train = " << r.n_train << '\n'
        << "n_test = " << r.n_test << '\n'
        << "accuracy = " << fmt_g(r.eval.accuracy) << '\n';
    for (int p = 0; p < kNumClasses; ++p) {
        for (int a = 0; a < kNumClasses; ++a) {
            out << "confusion_" << p << a << " = " << r.eval.matrix.counts[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)]
                << '\n';
        }
    }
}

void write_result(const CaseResult& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_result(r, out);
}

ResultSummary read_result(std::istream& in) {
    const auto kv = scenario::parse_kv(in);
    std::set<std::string> known = {"case", "classifier", "use_vrs", "normalize", "train_speed", "test_speed",
                                   "seed", "n_train", "n_test", "accuracy"};
    for (int p = 0; p < kNumClasses; ++p) {
        for (int a = 0; a < kNumClasses; ++a) known.insert("confusion_" + std::to_string(p) + std::to_string(a));
    }
    for (const auto& [k, v] : kv) {
        if (!known.count(k)) throw ConfigError(k, "unknown results key '" + k + "'");
    }
    auto need = [&](const std::string& k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError(k, "missing results key '" + k + "'");
        return it->second;
    };
    auto num = [&](const std::string& k) {
        const auto& s = need(k);
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(k, "bad value for '" + k + "': " + s);
        }
    };
    ResultSummary r;
    r.name = need("case");
    const auto& cls = need("classifier");
    if (cls == "KNN") {
        r.classifier = Classifier::KNN;
    } else if (cls == "RF") {
        r.classifier = Classifier::RF;
    } else {
        throw ConfigError("classifier", "unknown classifier '" + cls + "'");
    }
    r.use_vrs = num("use_vrs") != 0.0;
    r.train_speed = num("train_speed");
    r.test_speed = num("test_speed");
    r.accuracy = num("accuracy");
    return r;
}

ResultSummary read_result(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return read_result(in);
}

}  // namespace vrsjam::dataset
