#pragma once

// Noiseless deterministic (scatter-free) two-ray link used by the estimator
// round-trip checks: a Tx 35 m ahead of the receiver and a jammer closing in
// from behind at delta_u, replaying the pilot sequence.

#include <cmath>
#include <optional>
#include <vector>

#include "vrsjam/channel.hpp"
#include "vrsjam/estimator.hpp"
#include "vrsjam/simulation.hpp"

namespace vrsjam::testing {

inline std::vector<channel::ChannelTap> two_ray(double src_x, double rx_x, const channel::RadioConfig& radio,
                                                double delta_u) {
    using channel::RayKind;
    const double los = std::abs(src_x - rx_x);
    const double refl_x = 0.5 * (src_x + rx_x);
    const double refl_y = -60.0;
    const double d_ref = std::hypot(refl_x - src_x, refl_y);
    const double dir = rx_x > src_x ? 1.0 : -1.0;
    std::vector<channel::ChannelTap> t;
    t.push_back(channel::make_tap(channel::make_geometry(RayKind::LOS, los, dir), {0.0, 0.0}, radio, delta_u));
    t.push_back(channel::make_tap(channel::make_geometry(RayKind::NLOS, channel::nlos_distance(d_ref, los),
                                                          (refl_x - src_x) / d_ref),
                                  {0.0, 0.0}, radio, delta_u));
    return t;
}

inline std::optional<estimator::SpeedEstimate> roundtrip_speed(double delta_u, int k_pilots = 32, int blocks = 8,
                                                               double dt_block = 0.5e-3) {
    channel::RadioConfig radio;
    radio.noise_power = 0.0;
    const double u = 15.0;
    const auto pilots = simulation::pilot_sequence(k_pilots);
    std::vector<cplx> h2;
    for (int b = 0; b < blocks; ++b) {
        const double tau = b * dt_block;
        const double rx = u * tau;
        const double tx = 35.0 + u * tau;
        const double jam = -40.0 + (u + delta_u) * tau;
        const auto t_tx = two_ray(tx, rx, radio, 0.0);
        const auto t_jam = two_ray(jam, rx, radio, delta_u);
        estimator::PilotBlock blk;
        blk.pilots = pilots;
        blk.n_rays = 2;
        for (int s = 0; s < k_pilots; ++s) {
            std::vector<double> w{s >= 1 ? pilots[static_cast<std::size_t>(s - 1)] : 0.0,
                                  pilots[static_cast<std::size_t>(s)]};
            blk.received.push_back(channel::received_sample(t_tx, t_jam, w, w, radio, cplx{0.0, 0.0}));
        }
        const auto est = estimator::mmse_estimate_combined(blk);
        h2.push_back(estimator::separate_jammer_los(est.taps, t_tx[0].value, radio.tx_power_p1));
    }
    return estimator::estimate_relative_speed(h2, dt_block, radio.f_c);
}

}  // namespace vrsjam::testing
