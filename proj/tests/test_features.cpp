#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vrsjam/channel.hpp"
#include "vrsjam/features.hpp"
#include "vrsjam/simulation.hpp"

using namespace vrsjam;
using namespace vrsjam::features;

namespace {

// Composite Simpson on [x, x + 12] of the standard normal density.
double q_oracle(double x) {
    const int n = 20000;
    const double a = x;
    const double b = x + 12.0;
    const double h = (b - a) / n;
    auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi); };
    double s = phi(a) + phi(b);
    for (int i = 1; i < n; ++i) s += phi(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

scenario::ScenarioConfig run_cfg(ScenarioKind kind) {
    scenario::ScenarioConfig c;
    c.kind = kind;
    c.seed = 5;
    return c;
}

}  // namespace

TEST_CASE("sinr and rssi") {
    CHECK(compute_sinr(1.0, 0.0, 0.01) == doctest::Approx(20.0));
    CHECK(compute_sinr(2.0, 1.5, 0.5) == doctest::Approx(0.0));
    CHECK(compute_sinr(0.0, 1.0, 1.0) == kSinrFloorDb);
    CHECK(compute_sinr(1.0, 0.0, 1e-12) == kSinrCapDb);
    CHECK(compute_sinr(1e-9, 1.0, 1e-3) == kSinrFloorDb);
    CHECK(compute_rssi(100.0, 0.0, 0.0) == doctest::Approx(20.0));
    CHECK(compute_rssi(1.0, 1.0, 0.0) == doctest::Approx(3.0103).epsilon(1e-4));
}

TEST_CASE("q function against numeric integration") {
    for (double x = -3.0; x <= 6.0; x += 0.25) {
        const double ref = q_oracle(x);
        CHECK(std::abs(q_function(x) - ref) <= 1e-7 * ref + 1e-14);
    }
    CHECK(q_function(0.0) == doctest::Approx(0.5));
}

TEST_CASE("packet delivery probabilities") {
    CHECK(bpsk_ber(0.0) == doctest::Approx(0.5));
    CHECK(packet_success_probability(0.0, 500) < 1e-100);
    CHECK(packet_success_probability(1e6, 500) == doctest::Approx(1.0));
    // ber = Q(sqrt(18.18)) ~ 1.0e-5 at 9.09 linear
    const double ber = q_function(std::sqrt(2.0 * 9.09));
    const double p = packet_success_probability(9.09, 500);
    CHECK(p == doctest::Approx(std::pow(1.0 - ber, 500)).epsilon(1e-9));
    CHECK(p > 0.99);
    CHECK(p < 1.0);

    // Monte-Carlo delivery rate within 1 point of the closed form.
    for (double sinr : {2.0, 3.0, 9.09}) {
        std::mt19937_64 rng(3);
        const int n = 20000;
        int ok = 0;
        for (int i = 0; i < n; ++i) ok += packet_delivered(sinr, 500, rng);
        CHECK(std::abs(static_cast<double>(ok) / n - packet_success_probability(sinr, 500)) < 0.01);
    }

    // A jammed prefix only ever hurts.
    CHECK(packet_success_probability(100.0, 500, 0.01, 84) < packet_success_probability(100.0, 500));
    CHECK(packet_success_probability(100.0, 500, 0.01, 0) == packet_success_probability(100.0, 500));
}

TEST_CASE("pdr") {
    bool all[10];
    bool none[10];
    bool eight[10];
    for (int i = 0; i < 10; ++i) {
        all[i] = true;
        none[i] = false;
        eight[i] = i != 2 && i != 7;
    }
    CHECK(compute_pdr(all) == 1.0);
    CHECK(compute_pdr(none) == 0.0);
    CHECK(compute_pdr(eight) == doctest::Approx(0.8));
    CHECK_THROWS_AS(compute_pdr(std::span<const bool>{}), std::invalid_argument);

    PdrWindow w(10);
    CHECK_THROWS(w.ratio());
    for (int i = 0; i < 10; ++i) w.push(true);
    w.push(false);
    w.push(false);
    CHECK(w.size() == 10);
    CHECK(w.ratio() == doctest::Approx(0.8));
}

TEST_CASE("pdr falls with jammer power") {
    channel::RadioConfig radio;
    const double sig = radio.tx_power_p1 * std::pow(channel::path_gain(35.0), 2);
    auto mean_pdr = [&](double p2) {
        std::mt19937_64 rng(9);
        const double jam = p2 * std::pow(channel::path_gain(30.0), 2);
        const double sinr = std::pow(10.0, compute_sinr(sig, jam, radio.noise_power) / 10.0);
        int ok = 0;
        for (int i = 0; i < 1000; ++i) ok += packet_delivered(sinr, 500, rng);
        return ok / 1000.0;
    };
    CHECK(mean_pdr(100.0) < mean_pdr(1.0));
}

TEST_CASE("observation assembly") {
    const ChannelState st{1e-6, 1e-7, 1e-9};
    estimator::SpeedEstimate est;
    est.delta_u_hat = 4.0;
    auto r = assemble_observation(0.3, st, est, 0.9, 15.0, ScenarioKind::SmartAttack);
    CHECK(r.delta_u == 4.0);
    CHECK(r.class_label == ScenarioKind::SmartAttack);
    CHECK(r.rssi == doctest::Approx(compute_rssi(1e-6, 1e-7, 1e-9)));
    r = assemble_observation(0.3, st, std::nullopt, 0.9, 15.0, ScenarioKind::Interference);
    CHECK(r.delta_u == 15.0);  // no emitter signal: relative speed is the vehicle's own
}

TEST_CASE("simulated runs: record properties") {
    for (auto kind : kAllKinds) {
        CAPTURE(to_string(kind));
        const auto run = simulation::simulate_run(run_cfg(kind));
        REQUIRE(run.records.size() == 1000);
        REQUIRE(run.truth.size() == 1000);
        for (std::size_t i = 0; i < run.records.size(); ++i) {
            const auto& r = run.records[i];
            CHECK(r.class_label == kind);
            CHECK(std::pow(10.0, r.rssi / 10.0) >= run.truth[i].signal_mw);
            CHECK(r.sinr >= kSinrFloorDb);
            CHECK(r.sinr <= kSinrCapDb);
            CHECK(r.pdr >= 0.0);
            CHECK(r.pdr <= 1.0);
            CHECK(r.t == doctest::Approx(0.1 * static_cast<double>(i)));
        }
    }
}

TEST_CASE("simulated runs: relative speed semantics") {
    const auto inter = simulation::simulate_run(run_cfg(ScenarioKind::Interference));
    for (const auto& r : inter.records) CHECK(r.delta_u == r.own_speed);

    const auto cons = simulation::simulate_run(run_cfg(ScenarioKind::ConstantAttack));
    int post = 0;
    for (std::size_t i = 0; i < cons.records.size(); ++i) {
        if (cons.truth[i].true_delta_u != 0.0) continue;
        ++post;
        CHECK(std::abs(cons.records[i].delta_u) < 0.05);
    }
    CHECK(post > 300);
}

TEST_CASE("interference sinr has a single mid-run trough") {
    auto c = run_cfg(ScenarioKind::Interference);
    c.speed_variation = 0.0;
    const auto run = simulation::simulate_run(c);
    auto mean_sinr = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) s += run.records[i].sinr;
        return s / static_cast<double>(b - a);
    };
    const double head = mean_sinr(0, 100);
    const double mid = mean_sinr(450, 550);
    const double tail = mean_sinr(900, 1000);
    CHECK(mid < head - 10.0);
    CHECK(mid < tail - 10.0);
}

TEST_CASE("simulation is deterministic in the seed") {
    const auto a = simulation::simulate_run(run_cfg(ScenarioKind::SmartAttack));
    const auto b = simulation::simulate_run(run_cfg(ScenarioKind::SmartAttack));
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].sinr == b.records[i].sinr);
        CHECK(a.records[i].delta_u == b.records[i].delta_u);
    }
}
