#include "vrsjam/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vrsjam::channel {

RayGeometry make_geometry(RayKind kind, double dist, double aod_cos) {
    if (!(dist > 0.0)) {
        throw std::domain_error("ray distance must be positive, got " + std::to_string(dist));
    }
    if (!(std::abs(aod_cos) <= 1.0)) {
        throw std::domain_error("aod_cos outside [-1, 1]");
    }
    return RayGeometry{kind, dist, aod_cos, dist / kSpeedOfLight};
}

double nlos_distance(double reflector_dist, double los_dist) {
    return std::max(2.0 * reflector_dist - los_dist, los_dist);
}

void RadioConfig::validate() const {
    if (!(f_c > 0.0)) throw std::invalid_argument("f_c must be positive");
    if (tx_power_p1 < 0.0 || jam_power_p2 < 0.0 || noise_power < 0.0) {
        throw std::invalid_argument("powers must be non-negative");
    }
    if (n_rays < 1) throw std::invalid_argument("n_rays must be >= 1");
    if (rayleigh_variance < 0.0) throw std::invalid_argument("rayleigh_variance must be >= 0");
    if (!(symbol_period > 0.0)) throw std::invalid_argument("symbol_period must be positive");
}

double doppler_shift(double delta_u, double aod_cos, double f_c) {
    return f_c * delta_u * aod_cos / kSpeedOfLight;
}

double path_gain(double dist) {
    if (!(dist > 0.0)) {
        throw std::domain_error("path_gain: degenerate geometry, dist = " + std::to_string(dist));
    }
    return 1.0 / (dist * dist);
}

ChannelTap make_tap(const RayGeometry& geometry, cplx rayleigh, const RadioConfig& radio,
                    double delta_u) {
    ChannelTap tap;
    tap.rayleigh = rayleigh;
    tap.geometry = geometry;
    tap.gamma = rayleigh + path_gain(geometry.dist);
    const double f_d = doppler_shift(delta_u, geometry.aod_cos, radio.f_c);
    // Reduce the carrier phase modulo 2*pi before adding the small Doppler term
    // so the large f_c * tau product keeps full precision.
    const double cycles = geometry.dist * radio.f_c / kSpeedOfLight;
    const double carrier = 2.0 * kPi * (cycles - std::floor(cycles));
    const double phase = carrier + 2.0 * kPi * f_d * geometry.excess_delay;
    tap.value = tap.gamma * std::polar(1.0, phase);
    return tap;
}

cplx draw_rayleigh(double dist, const RadioConfig& radio, std::mt19937_64& rng) {
    const double g = path_gain(dist);
    const double sd = std::sqrt(radio.rayleigh_variance) * g;
    if (sd == 0.0) return {0.0, 0.0};
    std::normal_distribution<double> n(0.0, sd);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

cplx draw_noise(double variance, std::mt19937_64& rng) {
    if (variance <= 0.0) return {0.0, 0.0};
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

cplx received_sample(std::span<const ChannelTap> taps_tx, std::span<const ChannelTap> taps_jam,
                     std::span<const double> pilot_window, std::span<const double> jam_window,
                     const RadioConfig& radio, cplx noise) {
    const auto n = static_cast<std::size_t>(radio.n_rays);
    if (taps_tx.size() != n || taps_jam.size() != n || pilot_window.size() != n ||
        jam_window.size() != n) {
        throw std::invalid_argument("received_sample: taps and symbol windows must have n_rays entries");
    }
    const double a1 = std::sqrt(radio.tx_power_p1);
    const double a2 = std::sqrt(radio.jam_power_p2);
    cplx y = noise;
    for (std::size_t i = 0; i < n; ++i) {
        y += taps_tx[i].value * (pilot_window[n - 1 - i] * a1);
        y += taps_jam[i].value * (jam_window[n - 1 - i] * a2);
    }
    return y;
}

cplx received_sample(std::span<const ChannelTap> taps_tx, std::span<const ChannelTap> taps_jam,
                     std::span<const double> pilot_window, std::span<const double> jam_window,
                     const RadioConfig& radio, std::mt19937_64& rng) {
    return received_sample(taps_tx, taps_jam, pilot_window, jam_window, radio,
                           draw_noise(radio.noise_power, rng));
}

double link_power(std::span<const ChannelTap> taps, double power_mw) {
    double s = 0.0;
    for (const auto& t : taps) s += std::norm(t.value);
    return s * power_mw;
}

}  // namespace vrsjam::channel
