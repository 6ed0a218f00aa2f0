#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "support.hpp"
#include "vrsjam/estimator.hpp"

using namespace vrsjam;
using namespace vrsjam::estimator;

namespace {

std::vector<double> bpsk(int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution c(0.5);
    std::vector<double> p(static_cast<std::size_t>(k));
    for (auto& v : p) v = c(rng) ? 1.0 : -1.0;
    return p;
}

std::vector<cplx> convolve(const std::vector<double>& p, const std::vector<cplx>& h) {
    std::vector<cplx> y(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        for (std::size_t l = 0; l < h.size() && l <= k; ++l) y[k] += h[l] * p[k - l];
    }
    return y;
}

// Normal equations, solved from scratch with Gaussian elimination on complex numbers.
std::vector<cplx> ls_oracle(const std::vector<double>& p, const std::vector<cplx>& y, int n) {
    const auto x = design_matrix(p, n);
    std::vector<std::vector<cplx>> a(static_cast<std::size_t>(n), std::vector<cplx>(static_cast<std::size_t>(n + 1)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (std::size_t r = 0; r < x.size(); ++r) a[i][j] += x[r][i] * x[r][j];
        }
        for (std::size_t r = 0; r < x.size(); ++r) a[i][n] += x[r][i] * y[r];
    }
    for (int c = 0; c < n; ++c) {
        for (int r = c + 1; r < n; ++r) {
            const cplx f = a[r][c] / a[c][c];
            for (int j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        cplx s = a[r][n];
        for (int j = r + 1; j < n; ++j) s -= a[r][j] * z[j];
        z[r] = s / a[r][r];
    }
    return z;
}

}  // namespace

TEST_CASE("design matrix") {
    const std::vector<double> p{1, -1, 1, 1};
    const auto x = design_matrix(p, 2);
    REQUIRE(x.size() == 4);
    CHECK(x[0] == std::vector<double>{1, 0});
    CHECK(x[1] == std::vector<double>{-1, 1});
    CHECK(x[3] == std::vector<double>{1, 1});
}

TEST_CASE("noiseless single tap recovered exactly") {
    PilotBlock b;
    b.pilots = bpsk(8, 1);
    b.n_rays = 1;
    b.received = convolve(b.pilots, {cplx{0.3, -0.4}});
    const auto z = mmse_estimate_combined(b);
    CHECK(std::abs(z.taps[0] - cplx{0.3, -0.4}) < 1e-9);
    CHECK(z.tap0_sigma < 1e-12);
}

TEST_CASE("zero received vector gives zero taps") {
    PilotBlock b;
    b.pilots = bpsk(16, 2);
    b.received.assign(16, cplx{0.0, 0.0});
    const auto z = mmse_estimate_combined(b);
    for (auto t : z.taps) CHECK(std::abs(t) == 0.0);
}

TEST_CASE("least squares matches normal-equations oracle") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int n : {1, 2, 3}) {
        PilotBlock b;
        b.pilots = bpsk(24, 10 + n);
        b.n_rays = n;
        std::vector<cplx> h(static_cast<std::size_t>(n));
        for (auto& v : h) v = {g(rng), g(rng)};
        b.received = convolve(b.pilots, h);
        for (auto& y : b.received) y += cplx{0.1 * g(rng), 0.1 * g(rng)};
        const auto oracle = ls_oracle(b.pilots, b.received, n);
        const auto ls = mmse_estimate_combined(b);
        // Tiny noise variance with a prior converges to the LS answer.
        b.noise_cov = 1e-14;
        b.prior_var = 1.0;
        const auto mmse = mmse_estimate_combined(b);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(ls.taps[i] - oracle[i]) < 1e-10);
            CHECK(std::abs(mmse.taps[i] - oracle[i]) < 1e-9);
        }
    }
}

TEST_CASE("estimator errors") {
    PilotBlock b;
    b.pilots = bpsk(4, 3);
    b.received.assign(4, cplx{});
    b.n_rays = 2;
    CHECK_THROWS_AS(mmse_estimate_combined(b), UnderdeterminedError);
    b.pilots.assign(12, 1.0);  // all-ones still has full rank thanks to the silent guard
    b.received.assign(12, cplx{});
    b.n_rays = 2;
    CHECK_NOTHROW(mmse_estimate_combined(b));
    b.pilots.assign(12, 0.0);
    CHECK_THROWS_AS(mmse_estimate_combined(b), ConditioningError);
}

TEST_CASE("mse falls with pilot length") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    auto mse = [&](int k) {
        double acc = 0.0;
        for (int t = 0; t < 1000; ++t) {
            PilotBlock b;
            b.pilots = bpsk(k, 1000 + t);
            b.n_rays = 2;
            std::vector<cplx> h{{g(rng), g(rng)}, {g(rng), g(rng)}};
            b.received = convolve(b.pilots, h);
            for (auto& y : b.received) y += cplx{0.3 * g(rng), 0.3 * g(rng)};
            b.noise_cov = 0.18;
            b.prior_var = 2.0;
            const auto z = mmse_estimate_combined(b);
            acc += std::norm(z.taps[0] - h[0]) + std::norm(z.taps[1] - h[1]);
        }
        return acc / 1000.0;
    };
    CHECK(mse(128) < mse(8));
}

TEST_CASE("jammer separation") {
    const std::vector<cplx> z{cplx{0.7, -0.1}, cplx{0.2, 0.2}};
    const cplx h1{0.05, 0.01};
    CHECK(std::abs(separate_jammer_los(z, h1, 100.0) - (z[0] - h1 * 10.0)) < 1e-15);
    // Jammer off: the combined LOS tap is the Tx alone.
    const std::vector<cplx> only_tx{h1 * 10.0, cplx{}};
    CHECK(std::abs(separate_jammer_los(only_tx, h1, 100.0)) < 1e-15);
}

TEST_CASE("speed from synthetic rotation") {
    const double dt = 0.5e-3;
    auto seq = [&](double f) {
        std::vector<cplx> s;
        for (int b = 0; b < 8; ++b) s.push_back(std::polar(0.01, 2.0 * kPi * f * b * dt + 0.4));
        return s;
    };
    auto e = estimate_relative_speed(seq(0.0), dt, 5.9e9);
    REQUIRE(e);
    CHECK(e->delta_u_hat == doctest::Approx(0.0));
    e = estimate_relative_speed(seq(655.5), dt, 5.9e9);
    REQUIRE(e);
    CHECK(e->delta_u_hat == doctest::Approx(33.33).epsilon(0.01));
    e = estimate_relative_speed(seq(98.33), dt, 5.9e9);
    REQUIRE(e);
    CHECK(e->delta_u_hat == doctest::Approx(5.0).epsilon(0.01));
    CHECK(e->quality < 1e-9);

    CHECK_FALSE(estimate_relative_speed(std::vector<cplx>(8, cplx{}), dt, 5.9e9));
    CHECK_FALSE(estimate_relative_speed(seq(100.0), dt, 5.9e9, 1.0));
    CHECK_THROWS(estimate_relative_speed(std::vector<cplx>(1, cplx{1.0, 0.0}), dt, 5.9e9));
}

TEST_CASE("channel round trip") {
    for (double du : {0.0, 5.0, 10.0, 18.33, 33.33}) {
        CAPTURE(du);
        const auto e = testing::roundtrip_speed(du);
        REQUIRE(e);
        if (du == 0.0) {
            CHECK(e->delta_u_hat < 0.1);
        } else {
            CHECK(e->delta_u_hat == doctest::Approx(du).epsilon(0.02));
        }
    }
}
