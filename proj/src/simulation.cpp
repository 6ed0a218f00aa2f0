#include "vrsjam/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vrsjam/channel.hpp"
#include "vrsjam/estimator.hpp"
#include "vrsjam/features.hpp"
#include "vrsjam/seed.hpp"
#include "vrsjam/vrs.hpp"

namespace vrsjam::simulation {

namespace {

using channel::ChannelTap;
using channel::RayGeometry;
using channel::RayKind;
using scenario::ScenarioConfig;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Reflector j (1-based) of the static scattering environment.
Point reflector(const ScenarioConfig& cfg, double x_mid, int j) {
    return {x_mid + 50.0 * (j - 1), -cfg.reflector_offset * j};
}

std::vector<RayGeometry> rays(const ScenarioConfig& cfg, Point src, Point rx, double x_mid) {
    std::vector<RayGeometry> out;
    const double los = std::max(dist(src, rx), 1e-3);
    const double los_cos = std::clamp((rx.x - src.x) / los, -1.0, 1.0);
    out.push_back(channel::make_geometry(RayKind::LOS, los, los_cos));
    for (int j = 1; j < cfg.radio.n_rays; ++j) {
        const Point r = reflector(cfg, x_mid, j);
        const double d_ref = std::max(dist(src, r), 1e-3);
        const double c = std::clamp((r.x - src.x) / d_ref, -1.0, 1.0);
        out.push_back(channel::make_geometry(RayKind::NLOS, channel::nlos_distance(d_ref, los), c));
    }
    return out;
}

std::vector<cplx> draw_scatter(const std::vector<RayGeometry>& g, const channel::RadioConfig& radio,
                               std::mt19937_64& rng) {
    std::vector<cplx> out;
    out.reserve(g.size());
    for (const auto& r : g) out.push_back(channel::draw_rayleigh(r.dist, radio, rng));
    return out;
}

std::vector<ChannelTap> taps(const std::vector<RayGeometry>& g, const std::vector<cplx>& scatter,
                             const channel::RadioConfig& radio, double delta_u) {
    std::vector<ChannelTap> out;
    out.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.push_back(channel::make_tap(g[i], scatter[i], radio, delta_u));
    return out;
}

// N-symbol chronological window ending at sample m; symbols before the block are silent.
std::vector<double> window(const std::vector<double>& seq, int m, int n, int lead = 0) {
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const int at = m - (n - 1) + i + lead;
        if (at >= 0 && at < static_cast<int>(seq.size())) w[static_cast<std::size_t>(i)] = seq[static_cast<std::size_t>(at)];
    }
    return w;
}

}  // namespace

std::vector<double> pilot_sequence(int k) {
    std::mt19937_64 rng(0x9111075eedULL);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> p(static_cast<std::size_t>(std::max(k, 0)));
    for (auto& v : p) v = coin(rng) ? 1.0 : -1.0;
    if (k >= 2) {
        p[0] = 1.0;
        p[1] = -1.0;
    }
    return p;
}

RunTrace simulate_run(const ScenarioConfig& cfg) {
    cfg.validate();
    const int m = cfg.observations();
    const int n = cfg.radio.n_rays;
    const int k_pilots = cfg.pilot_length;
    const double dt = cfg.sample_period;

    const auto kind_tag = static_cast<std::uint64_t>(cfg.kind);
    std::mt19937_64 fade_rng(derive_seed(cfg.seed, {kind_tag, 1}));
    std::mt19937_64 noise_rng(derive_seed(cfg.seed, {kind_tag, 2}));
    std::mt19937_64 packet_rng(derive_seed(cfg.seed, {kind_tag, 3}));
    std::mt19937_64 symbol_rng(derive_seed(cfg.seed, {kind_tag, 4}));

    const auto u = scenario::own_speed_profile(cfg);
    const auto xr = scenario::receiver_positions(cfg, u);
    const double x_mid = xr.empty() ? 0.0 : xr[xr.size() / 2];

    std::vector<scenario::JammerTick> jammer;
    std::vector<scenario::InterferenceTick> interferer;
    switch (cfg.kind) {
        case ScenarioKind::SmartAttack: jammer = scenario::smart_jammer_trajectory(cfg, u); break;
        case ScenarioKind::ConstantAttack: jammer = scenario::constant_jammer_trajectory(cfg, u); break;
        case ScenarioKind::Interference: interferer = scenario::interference_trajectory(cfg, u); break;
    }
    const bool smart = cfg.kind == ScenarioKind::SmartAttack;
    const bool interference = cfg.kind == ScenarioKind::Interference;

    const auto pilots = pilot_sequence(k_pilots);
    const double noise = cfg.radio.noise_power;
    const double p1 = cfg.radio.tx_power_p1;
    const double prior = p1 * 2.0 * std::pow(channel::path_gain(cfg.dist_tx_rx), 2.0);

    RunTrace trace;
    trace.cfg = cfg;
    trace.records.reserve(static_cast<std::size_t>(m));
    trace.truth.reserve(static_cast<std::size_t>(m));
    features::PdrWindow pdr(cfg.pdr_window);

    for (int k = 0; k < m; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double t = k * dt;
        const double uk = u[ku];

        Point src;
        double src_speed = 0.0;
        double power = 0.0;
        double true_du = 0.0;
        if (interference) {
            src = {interferer[ku].source_x, interferer[ku].source_y};
            power = interferer[ku].power_mw;
            true_du = interferer[ku].rel_speed;
        } else {
            src = {jammer[ku].pos, 0.0};
            src_speed = jammer[ku].speed;
            power = jammer[ku].power_mw;
            true_du = jammer[ku].rel_speed;
        }

        const Point rx0{xr[ku], 0.0};
        const Point tx0{xr[ku] + cfg.dist_tx_rx, 0.0};
        const auto g_tx0 = rays(cfg, tx0, rx0, x_mid);
        const auto g_em0 = rays(cfg, src, rx0, x_mid);
        // Block fading: scattered components are held for the whole tick.
        const auto s_tx = draw_scatter(g_tx0, cfg.radio, fade_rng);
        const auto s_em = draw_scatter(g_em0, cfg.radio, fade_rng);

        // Reactive jammer senses the Tx over the Tx -> jammer path.
        std::vector<bool> pilot_mask(static_cast<std::size_t>(k_pilots), true);
        std::vector<bool> packet_mask(static_cast<std::size_t>(cfg.packet_bits), true);
        if (smart) {
            const double d_tj = std::max(dist(tx0, src), 1e-3);
            const double sensed = scenario::mw_to_dbm(p1 * std::pow(channel::path_gain(d_tj), 2.0));
            pilot_mask = scenario::reactive_burst_mask(cfg, sensed, k_pilots);
            packet_mask = scenario::reactive_burst_mask(cfg, sensed, cfg.packet_bits);
        }

        channel::RadioConfig radio = cfg.radio;
        radio.jam_power_p2 = power;

        std::vector<cplx> h2;
        std::vector<double> sigmas;
        h2.reserve(static_cast<std::size_t>(cfg.pilot_blocks));
        std::vector<ChannelTap> tx_taps0;
        std::vector<ChannelTap> em_taps0;
        for (int b = 0; b < cfg.pilot_blocks; ++b) {
            const double tau = b * cfg.dt_block;
            const Point rx{rx0.x + uk * tau, 0.0};
            const Point tx{tx0.x + uk * tau, 0.0};
            const Point em{src.x + src_speed * tau, src.y};
            const auto tx_taps = taps(rays(cfg, tx, rx, x_mid), s_tx, radio, 0.0);
            const auto em_taps = taps(rays(cfg, em, rx, x_mid), s_em, radio, src_speed - uk);
            if (b == 0) {
                tx_taps0 = tx_taps;
                em_taps0 = em_taps;
            }

            std::vector<double> jam(static_cast<std::size_t>(k_pilots + n - 1), 0.0);
            if (interference) {
                std::bernoulli_distribution coin(0.5);
                for (auto& s : jam) s = coin(symbol_rng) ? 1.0 : -1.0;
            } else {
                for (int i = 0; i < k_pilots; ++i) {
                    const auto iu = static_cast<std::size_t>(i);
                    jam[iu + static_cast<std::size_t>(n - 1)] = pilot_mask[iu] ? pilots[iu] : 0.0;
                }
            }

            estimator::PilotBlock block;
            block.pilots = pilots;
            block.noise_cov = noise;
            block.n_rays = n;
            block.prior_var = prior;
            block.received.reserve(static_cast<std::size_t>(k_pilots));
            for (int s = 0; s < k_pilots; ++s) {
                const auto pw = window(pilots, s, n);
                const auto jw = window(jam, s, n, n - 1);
                block.received.push_back(channel::received_sample(tx_taps, em_taps, pw, jw, radio, noise_rng));
            }
            const auto est = estimator::mmse_estimate_combined(block);
            h2.push_back(estimator::separate_jammer_los(est.taps, tx_taps[0].value, p1));
            sigmas.push_back(est.tap0_sigma);
        }

        double sig2 = 0.0;
        for (double s : sigmas) sig2 += s * s;
        const double floor = 3.0 * std::sqrt(sig2 / static_cast<double>(sigmas.size()));
        const auto speed = estimator::estimate_relative_speed(h2, cfg.dt_block, cfg.radio.f_c, floor);

        const double signal = channel::link_power(tx_taps0, p1);
        const double emitted = channel::link_power(em_taps0, power);
        const auto jammed_bits = static_cast<int>(std::count(packet_mask.begin(), packet_mask.end(), true));
        const double frac = interference ? 1.0 : static_cast<double>(jammed_bits) / cfg.packet_bits;

        bool ok = false;
        if (scenario::mw_to_dbm(signal) >= cfg.rx_sensitivity_dbm) {
            if (interference) {
                ok = features::packet_delivered(signal / (noise + emitted), cfg.packet_bits, packet_rng);
            } else {
                ok = features::packet_delivered(signal / noise, cfg.packet_bits, signal / (noise + emitted),
                                                jammed_bits, packet_rng);
            }
        }
        pdr.push(ok);

        const features::ChannelState state{signal, emitted * frac, noise};
        trace.records.push_back(features::assemble_observation(t, state, speed, pdr.ratio(), uk, cfg.kind));

        TickTruth tt;
        tt.t = t;
        tt.own_speed = uk;
        tt.true_delta_u = true_du;
        tt.emitter_dist = g_em0[0].dist;
        tt.emitter_power = power;
        tt.signal_mw = signal;
        tt.jam_mw = emitted;
        tt.jammed_fraction = frac;
        tt.detected = speed.has_value();
        tt.delivered = ok;
        trace.truth.push_back(tt);
    }

    if (m >= 2) {
        std::vector<double> du(static_cast<std::size_t>(m));
        std::vector<double> own(static_cast<std::size_t>(m));
        for (std::size_t i = 0; i < du.size(); ++i) {
            du[i] = trace.records[i].delta_u;
            own[i] = trace.records[i].own_speed;
        }
        const auto v = vrs::vrs_labels({du, own, cfg.vrs_epsilon}, cfg.vrs_num_na, cfg.vrs_num_a);
        for (std::size_t i = 0; i < du.size(); ++i) trace.records[i].vrs = v.encoded[i];
    }
    return trace;
}

}  // namespace vrsjam::simulation
