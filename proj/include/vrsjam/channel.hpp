#pragma once

// Complex-baseband Rician fading links (Tx->Rx and Jx->Rx) with inverse-square
// amplitude loss and a Doppler-bearing phase rotation.

#include <random>
#include <span>
#include <vector>

#include "vrsjam/types.hpp"

namespace vrsjam::channel {

enum class RayKind { LOS, NLOS };

struct RayGeometry {
    RayKind ray_kind = RayKind::LOS;
    double dist = 1.0;          // m
    double aod_cos = 1.0;       // cosine of angle of departure vs. source velocity
    double excess_delay = 0.0;  // s, dist / c
};

/// Validated constructor; throws std::domain_error on dist <= 0 or |aod_cos| > 1.
RayGeometry make_geometry(RayKind kind, double dist, double aod_cos);

/// NLOS path length for a reflector at `reflector_dist` from the source when the
/// LOS length is `los_dist`: 2*d - r, never shorter than the LOS path.
double nlos_distance(double reflector_dist, double los_dist);

struct ChannelTap {
    cplx rayleigh{};      // scattered component
    RayGeometry geometry;
    cplx gamma{};         // rayleigh + 1/dist^2, known at the receiver
    cplx value{};         // gamma rotated by the carrier/Doppler phase
};

struct RadioConfig {
    double f_c = 5.9e9;            // Hz
    double tx_power_p1 = 100.0;    // mW
    double jam_power_p2 = 100.0;   // mW
    double noise_power = 3.1622776601683795e-10;  // mW (-95 dBm)
    int n_rays = 2;                 // one LOS + (n_rays - 1) NLOS
    double rayleigh_variance = 0.5; // per complex dimension, relative to path_gain^2
    double symbol_period = 1e-6;    // s

    void validate() const;
};

double doppler_shift(double delta_u, double aod_cos, double f_c);

/// Inverse-square amplitude gain; throws std::domain_error for dist <= 0.
double path_gain(double dist);

ChannelTap make_tap(const RayGeometry& geometry, cplx rayleigh, const RadioConfig& radio,
                    double delta_u);

/// Draws the scattered component for a ray at `dist`:
/// circular Gaussian with per-dimension variance rayleigh_variance * path_gain(dist)^2.
cplx draw_rayleigh(double dist, const RadioConfig& radio, std::mt19937_64& rng);

/// Circular complex Gaussian with total variance `variance`.
cplx draw_noise(double variance, std::mt19937_64& rng);

/// One received baseband sample:
///   sum_n taps_tx[n].value * pilot[N-1-n] * sqrt(P1) + taps_jam[n].value * jam[N-1-n] * sqrt(P2) + noise
/// Symbol windows are chronological (oldest first) and hold exactly N symbols.
/// Throws std::invalid_argument on any length mismatch with radio.n_rays.
cplx received_sample(std::span<const ChannelTap> taps_tx, std::span<const ChannelTap> taps_jam,
                     std::span<const double> pilot_window, std::span<const double> jam_window,
                     const RadioConfig& radio, cplx noise);

cplx received_sample(std::span<const ChannelTap> taps_tx, std::span<const ChannelTap> taps_jam,
                     std::span<const double> pilot_window, std::span<const double> jam_window,
                     const RadioConfig& radio, std::mt19937_64& rng);

/// Total received power of a link, P * sum_n |h_n|^2 (mW).
double link_power(std::span<const ChannelTap> taps, double power_mw);

}  // namespace vrsjam::channel
