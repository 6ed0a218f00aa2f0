#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "vrsjam/dataset.hpp"

using namespace vrsjam;
using namespace vrsjam::dataset;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
    const fs::path p = fs::path(VRSJAM_TEST_TMP) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("csv round trip") {
    std::vector<ObservationRecord> recs;
    for (int i = 0; i < 5; ++i) {
        recs.push_back({0.1 * i, -60.123456 + i, 10.5 - i, 0.9, 3.25, 15.0 + i, i % 2 ? 100.0 : 0.0,
                        static_cast<ScenarioKind>(i % 3)});
    }
    std::stringstream s;
    write_observations(recs, s);
    std::string header;
    std::getline(s, header);
    CHECK(header == kCsvHeader);
    s.seekg(0);
    const auto back = read_observations(s);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].t == doctest::Approx(recs[i].t).epsilon(1e-6));
        CHECK(back[i].rssi == doctest::Approx(recs[i].rssi).epsilon(1e-6));
        CHECK(back[i].vrs == recs[i].vrs);
        CHECK(back[i].class_label == recs[i].class_label);
    }
    CHECK_THROWS_AS(write_observations(std::vector<ObservationRecord>{}, s), std::invalid_argument);

    std::istringstream bad("t,rssi\n1,2\n");
    CHECK_THROWS_AS(read_observations(bad), std::runtime_error);
    std::istringstream bad_row(std::string(kCsvHeader) + "\n0.1,x,1,1,1,1,0,Interference\n");
    CHECK_THROWS_AS(read_observations(bad_row), std::runtime_error);
}

TEST_CASE("full run layout and file") {
    const scenario::ScenarioConfig base;
    const auto recs = full_run(base, 15.0, 1);
    REQUIRE(recs.size() == 3000);
    CHECK(recs[0].class_label == ScenarioKind::SmartAttack);
    CHECK(recs[1000].class_label == ScenarioKind::Interference);
    CHECK(recs[2000].class_label == ScenarioKind::ConstantAttack);
    CHECK(recs[1000].t == doctest::Approx(100.0));
    CHECK(recs[2999].t == doctest::Approx(299.9));
    for (const auto& r : recs) {
        if (r.class_label == ScenarioKind::Interference) CHECK(r.delta_u == r.own_speed);
    }

    const auto dir = tmp_dir("full");
    const auto path = dir / run_file_name(15.0, 1);
    write_observations(recs, path);
    std::ifstream in(path);
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == 3001);
    CHECK(run_file_name(15.0, 1) == "obs_v15_s1.csv");
    CHECK(run_file_name(12.5, 3) != run_file_name(12.0, 3));
}

TEST_CASE("case matrix") {
    const auto& cases = table_cases();
    REQUIRE(cases.size() == 12);
    std::set<std::string> names;
    for (const auto& c : cases) {
        names.insert(c.name);
        if (c.name.rfind("Same_", 0) == 0 || c.name.rfind("Norm_", 0) == 0) {
            CHECK(c.train_speed == 15.0);
            CHECK(c.test_speed == 15.0);
        }
        if (c.name.rfind("Different_", 0) == 0) {
            CHECK(c.train_speed == 15.0);
            CHECK(c.test_speed == 25.0);
        }
        CHECK(c.normalize == (c.name.rfind("Norm_", 0) == 0));
        CHECK(c.use_vrs == (c.name.find("-VRS") != std::string::npos));
    }
    CHECK(names.size() == 12);
    for (const auto& c : high_speed_cases()) {
        CHECK(c.train_speed == 25.0);
        CHECK(c.test_speed == 25.0);
    }
    CHECK(find_case("Different_RF"));
    CHECK_FALSE(find_case("Sideways_KNN"));
}

TEST_CASE("case datasets") {
    DatasetStore store;
    SUBCASE("Same_KNN-VRS: 15 m/s, 5 features, disjoint") {
        const auto d = build_case_dataset(*find_case("Same_KNN-VRS"), store, 1);
        CHECK(d.train.width() == 5);
        CHECK(d.test.width() == 5);
        CHECK(d.train.size() == 900);
        CHECK(d.test.size() == 2100);
        std::set<std::vector<double>> tr(d.train.rows.begin(), d.train.rows.end());
        int shared = 0;
        for (const auto& r : d.test.rows) shared += tr.count(r) > 0;
        CHECK(shared == 0);
    }
    SUBCASE("Different_RF: 4 features, test rows at 25 m/s") {
        const auto d = build_case_dataset(*find_case("Different_RF"), store, 1);
        CHECK(d.train.width() == 4);
        CHECK(d.test.size() == 2100);
        // Interference delta_u is the own speed, which centres on the run speed.
        double mean = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < d.test.size(); ++i) {
            if (d.test.labels[i] != ScenarioKind::Interference) continue;
            mean += d.test.rows[i][3];
            ++n;
        }
        CHECK(mean / n > 20.0);
    }
    SUBCASE("Norm_KNN-VRS: scaler fit on train") {
        const auto d = build_case_dataset(*find_case("Norm_KNN-VRS"), store, 1);
        CHECK(d.train.width() == 5);
        for (std::size_t j = 0; j < d.train.width(); ++j) {
            double lo = 1e9;
            double hi = -1e9;
            for (const auto& r : d.train.rows) {
                lo = std::min(lo, r[j]);
                hi = std::max(hi, r[j]);
            }
            CHECK(lo >= 0.0);
            CHECK(hi <= 1.0);
        }
        for (const auto& r : d.test.rows) {
            for (double v : r) {
                CHECK(v >= -0.1);
                CHECK(v <= 1.1);
            }
        }
    }
}

TEST_CASE("store caches on disk and reproduces") {
    const auto dir = tmp_dir("store");
    std::vector<ObservationRecord> first;
    {
        DatasetStore s(scenario::ScenarioConfig{}, dir);
        first = s.get(15.0, 2);
    }
    CHECK(fs::exists(dir / run_file_name(15.0, 2)));
    CHECK(fs::exists(dir / "manifest.txt"));
    DatasetStore again(scenario::ScenarioConfig{}, dir);
    const auto& second = again.get(15.0, 2);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); i += 97) {
        CHECK(second[i].sinr == doctest::Approx(first[i].sinr).epsilon(1e-6));
    }
    std::ifstream m(dir / "manifest.txt");
    std::stringstream ss;
    ss << m.rdbuf();
    CHECK(ss.str().find("[SmartAttack]") != std::string::npos);

    // a different config must not reuse the cached CSV
    scenario::ScenarioConfig other;
    other.radio.jam_power_p2 = 20.0;
    DatasetStore changed(other, dir);
    const auto& third = changed.get(15.0, 2);
    REQUIRE(third.size() == first.size());
    int differs = 0;
    for (std::size_t i = 0; i < first.size(); ++i) differs += third[i].sinr != doctest::Approx(first[i].sinr).epsilon(1e-6);
    CHECK(differs > 100);
}

TEST_CASE("results file round trip") {
    DatasetStore store;
    ModelParams p;
    p.forest.n_trees = 10;
    const auto r = run_case(*find_case("Same_RF"), store, 1, p);
    CHECK(r.n_train + r.n_test == 3000);
    CHECK(r.eval.matrix.total() == static_cast<long>(r.n_test));
    std::stringstream s;
    write_result(r, s);
    const auto back = read_result(s);
    CHECK(back.name == "Same_RF");
    CHECK(back.classifier == Classifier::RF);
    CHECK_FALSE(back.use_vrs);
    CHECK(back.accuracy == r.eval.accuracy);

    std::istringstream junk("case = X\nwhatever = 1\n");
    CHECK_THROWS_AS(read_result(junk), ConfigError);
}
