#include "vrsjam/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace vrsjam {

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Interference: return "Interference";
        case ScenarioKind::SmartAttack: return "SmartAttack";
        case ScenarioKind::ConstantAttack: return "ConstantAttack";
    }
    return "Unknown";
}

ScenarioKind parse_kind(std::string_view name) {
    if (name == "Interference" || name == "interference") return ScenarioKind::Interference;
    if (name == "SmartAttack" || name == "smart") return ScenarioKind::SmartAttack;
    if (name == "ConstantAttack" || name == "constant") return ScenarioKind::ConstantAttack;
    throw std::invalid_argument("unknown scenario kind '" + std::string(name) + "'");
}

}  // namespace vrsjam

namespace vrsjam::scenario {

namespace {

constexpr double kEps = 1e-9;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError(key, "invalid numeric value for key '" + key + "': '" + s + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& s) {
    Int v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError(key, "invalid integer value for key '" + key + "': '" + s + "'");
    }
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::function<std::string(const ScenarioConfig&)> get;
    std::function<void(ScenarioConfig&, const std::string& key, const std::string&)> set;
};

template <typename M>
Field dbl(M member) {
    return {[member](const ScenarioConfig& c) { return format_double(std::invoke(member, c)); },
            [member](ScenarioConfig& c, const std::string& k, const std::string& v) {
                std::invoke(member, c) = parse_double(k, v);
            }};
}

template <typename M>
Field integer(M member) {
    return {[member](const ScenarioConfig& c) { return std::to_string(std::invoke(member, c)); },
            [member](ScenarioConfig& c, const std::string& k, const std::string& v) {
                auto& ref = std::invoke(member, c);
                ref = parse_int<std::remove_reference_t<decltype(ref)>>(k, v);
            }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> f;
        f["kind"] = {[](const ScenarioConfig& c) { return std::string(to_string(c.kind)); },
                     [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                         try {
                             c.kind = parse_kind(v);
                         } catch (const std::invalid_argument&) {
                             throw ConfigError(k, "invalid value for key 'kind': '" + v + "'");
                         }
                     }};
        f["base_speed"] = dbl(&ScenarioConfig::base_speed);
        f["dist_initial"] = dbl(&ScenarioConfig::dist_initial);
        f["duration"] = dbl(&ScenarioConfig::duration);
        f["sample_period"] = dbl(&ScenarioConfig::sample_period);
        f["seed"] = integer(&ScenarioConfig::seed);
        f["route_seed"] = integer(&ScenarioConfig::route_seed);
        f["f_c"] = dbl([](auto& c) -> auto& { return c.radio.f_c; });
        f["tx_power_p1"] = dbl([](auto& c) -> auto& { return c.radio.tx_power_p1; });
        f["jam_power_p2"] = dbl([](auto& c) -> auto& { return c.radio.jam_power_p2; });
        f["noise_power"] = dbl([](auto& c) -> auto& { return c.radio.noise_power; });
        f["n_rays"] = integer([](auto& c) -> auto& { return c.radio.n_rays; });
        f["rayleigh_variance"] = dbl([](auto& c) -> auto& { return c.radio.rayleigh_variance; });
        f["symbol_period"] = dbl([](auto& c) -> auto& { return c.radio.symbol_period; });
        f["dist_tx_rx"] = dbl(&ScenarioConfig::dist_tx_rx);
        f["pursuit_speed_ratio"] = dbl(&ScenarioConfig::pursuit_speed_ratio);
        f["approach_distance"] = dbl(&ScenarioConfig::approach_distance);
        f["safe_distance"] = dbl(&ScenarioConfig::safe_distance);
        f["retreat_speed"] = dbl(&ScenarioConfig::retreat_speed);
        f["follow_distance"] = dbl(&ScenarioConfig::follow_distance);
        f["p_min"] = dbl(&ScenarioConfig::p_min);
        f["interferer_power"] = dbl(&ScenarioConfig::interferer_power);
        f["interferer_offset"] = dbl(&ScenarioConfig::interferer_offset);
        f["reflector_offset"] = dbl(&ScenarioConfig::reflector_offset);
        f["speed_variation"] = dbl(&ScenarioConfig::speed_variation);
        f["pursuit_jitter"] = dbl(&ScenarioConfig::pursuit_jitter);
        f["speed_correlation_time"] = dbl(&ScenarioConfig::speed_correlation_time);
        f["sense_threshold_dbm"] = dbl(&ScenarioConfig::sense_threshold_dbm);
        f["t_detection"] = dbl(&ScenarioConfig::t_detection);
        f["t_duration"] = dbl(&ScenarioConfig::t_duration);
        f["rx_sensitivity_dbm"] = dbl(&ScenarioConfig::rx_sensitivity_dbm);
        f["pilot_length"] = integer(&ScenarioConfig::pilot_length);
        f["pilot_blocks"] = integer(&ScenarioConfig::pilot_blocks);
        f["dt_block"] = dbl(&ScenarioConfig::dt_block);
        f["packet_bits"] = integer(&ScenarioConfig::packet_bits);
        f["pdr_window"] = integer(&ScenarioConfig::pdr_window);
        f["vrs_epsilon"] = dbl(&ScenarioConfig::vrs_epsilon);
        f["vrs_num_na"] = dbl(&ScenarioConfig::vrs_num_na);
        f["vrs_num_a"] = dbl(&ScenarioConfig::vrs_num_a);
        return f;
    }();
    return table;
}

}  // namespace

int ScenarioConfig::observations() const {
    return static_cast<int>(std::llround(duration / sample_period));
}

void ScenarioConfig::validate() const {
    radio.validate();
    auto require = [](bool ok, const char* key, const char* msg) {
        if (!ok) throw ConfigError(key, std::string(key) + ": " + msg);
    };
    require(base_speed >= 0.0, "base_speed", "must be >= 0");
    require(dist_initial > approach_distance, "dist_initial", "must exceed approach_distance");
    require(duration > 0.0, "duration", "must be positive");
    require(sample_period > 0.0 && sample_period <= duration, "sample_period", "must be in (0, duration]");
    require(dist_tx_rx > 0.0, "dist_tx_rx", "must be positive");
    require(pursuit_speed_ratio > 0.0, "pursuit_speed_ratio", "must be positive");
    require(approach_distance > 0.0, "approach_distance", "must be positive");
    require(safe_distance >= approach_distance, "safe_distance", "must be >= approach_distance");
    require(retreat_speed > 0.0, "retreat_speed", "must be positive");
    require(follow_distance > 0.0, "follow_distance", "must be positive");
    require(p_min >= 0.0, "p_min", "must be >= 0");
    require(interferer_power >= 0.0, "interferer_power", "must be >= 0");
    require(interferer_offset > 0.0, "interferer_offset", "must be positive");
    require(reflector_offset > 0.0, "reflector_offset", "must be positive");
    require(speed_variation >= 0.0, "speed_variation", "must be >= 0");
    require(pursuit_jitter >= 0.0, "pursuit_jitter", "must be >= 0");
    require(speed_correlation_time > 0.0, "speed_correlation_time", "must be positive");
    require(t_detection > 0.0, "t_detection", "must be positive");
    require(t_duration > 0.0, "t_duration", "must be positive");
    require(pilot_length > 2 * radio.n_rays, "pilot_length", "must exceed 2 * n_rays");
    require(pilot_blocks >= 2, "pilot_blocks", "must be >= 2");
    require(dt_block > 0.0, "dt_block", "must be positive");
    require(packet_bits >= 1, "packet_bits", "must be >= 1");
    require(pdr_window >= 1, "pdr_window", "must be >= 1");
    require(vrs_epsilon > 0.0, "vrs_epsilon", "must be positive");
    require(vrs_num_na != vrs_num_a, "vrs_num_a", "must differ from vrs_num_na");
}

std::map<std::string, std::string> to_kv(const ScenarioConfig& cfg) {
    std::map<std::string, std::string> kv;
    for (const auto& [key, field] : fields()) kv[key] = field.get(cfg);
    return kv;
}

ScenarioConfig from_kv(const std::map<std::string, std::string>& kv, ScenarioConfig base) {
    const auto& table = fields();
    for (const auto& [key, value] : kv) {
        auto it = table.find(key);
        if (it == table.end()) throw ConfigError(key, "unknown config key '" + key + "'");
        it->second.set(base, key, value);
    }
    return base;
}

std::map<std::string, std::string> parse_kv(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                                        line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

void write_kv(std::ostream& out, const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return from_kv(parse_kv(in), std::move(base));
}

std::vector<VehicleState> step_kinematics(std::vector<VehicleState> states, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_kinematics: dt must be positive");
    for (auto& s : states) s.pos += s.speed * dt;
    return states;
}

std::vector<double> own_speed_profile(const ScenarioConfig& cfg) {
    const int m = cfg.observations();
    std::vector<double> u(static_cast<std::size_t>(m), cfg.base_speed);
    if (cfg.speed_variation <= 0.0 || cfg.base_speed <= 0.0) return u;
    // Independent stream from the channel draws: mix the seed with a constant tag.
    std::mt19937_64 rng((cfg.route_seed != 0 ? cfg.route_seed : cfg.seed) ^ 0x5eed5eed5eedULL);
    std::normal_distribution<double> n01(0.0, 1.0);
    const double rho = std::exp(-cfg.sample_period / cfg.speed_correlation_time);
    const double innov = cfg.speed_variation * std::sqrt(1.0 - rho * rho);
    double x = cfg.speed_variation * n01(rng);
    for (int k = 0; k < m; ++k) {
        const double ratio = std::clamp(1.0 + x, 0.2, 1.8);
        u[static_cast<std::size_t>(k)] = cfg.base_speed * ratio;
        x = rho * x + innov * n01(rng);
    }
    return u;
}

std::vector<double> receiver_positions(const ScenarioConfig& cfg, const std::vector<double>& own_speed) {
    std::vector<double> x(own_speed.size(), 0.0);
    for (std::size_t k = 1; k < x.size(); ++k) x[k] = x[k - 1] + own_speed[k - 1] * cfg.sample_period;
    return x;
}

namespace {

std::vector<JammerTick> pursuing_jammer(const ScenarioConfig& cfg, const std::vector<double>& u,
                                        bool smart) {
    const double dt = cfg.sample_period;
    const auto xr = receiver_positions(cfg, u);
    std::vector<JammerTick> out(u.size());
    double jpos = -cfg.dist_initial;
    JammerPhase phase = JammerPhase::Pursue;
    const double reach = smart ? cfg.approach_distance : cfg.follow_distance;
    // The pursuer's own driving: a mean-reverting wobble on its closing speed.
    std::mt19937_64 rng((cfg.route_seed != 0 ? cfg.route_seed : cfg.seed) ^ 0x7a3e7a3e7a3eULL);
    std::normal_distribution<double> n01(0.0, 1.0);
    const double rho = std::exp(-dt / cfg.speed_correlation_time);
    const double innov = cfg.pursuit_jitter * std::sqrt(1.0 - rho * rho);
    double wobble = cfg.pursuit_jitter > 0.0 ? cfg.pursuit_jitter * n01(rng) : 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double gap = xr[k] - jpos;
        JammerPhase next = phase;
        double v = u[k];
        switch (phase) {
            case JammerPhase::Pursue:
                // Closes at pursuit_speed - base_speed on top of the target's speed.
                v = u[k] + (cfg.pursuit_speed() - cfg.base_speed) * std::clamp(1.0 + wobble, 0.2, 1.8);
                if (gap - (v - u[k]) * dt <= reach + kEps) {
                    v = u[k] + (gap - reach) / dt;
                    next = smart ? JammerPhase::Retreat : JammerPhase::Follow;
                }
                break;
            case JammerPhase::Retreat:
                v = u[k] - cfg.retreat_speed;
                if (gap + cfg.retreat_speed * dt >= cfg.safe_distance - kEps) {
                    v = u[k] - (cfg.safe_distance - gap) / dt;
                    next = JammerPhase::Follow;
                }
                break;
            case JammerPhase::Follow:
                v = u[k];
                break;
        }
        JammerTick& t = out[k];
        t.pos = jpos;
        t.speed = v;
        t.gap = gap;
        t.rel_speed = (phase == JammerPhase::Follow) ? 0.0 : std::abs(v - u[k]);
        t.phase = phase;
        if (smart) {
            t.power_mw = cfg.radio.jam_power_p2;
        } else {
            t.power_mw = (phase == JammerPhase::Follow) ? cfg.radio.jam_power_p2 : cfg.p_min;
        }
        jpos += v * dt;
        phase = next;
        if (cfg.pursuit_jitter > 0.0) wobble = rho * wobble + innov * n01(rng);
    }
    return out;
}

}  // namespace

std::vector<JammerTick> smart_jammer_trajectory(const ScenarioConfig& cfg, const std::vector<double>& own_speed) {
    return pursuing_jammer(cfg, own_speed, true);
}

std::vector<JammerTick> smart_jammer_trajectory(const ScenarioConfig& cfg) {
    return smart_jammer_trajectory(cfg, own_speed_profile(cfg));
}

std::vector<JammerTick> constant_jammer_trajectory(const ScenarioConfig& cfg, const std::vector<double>& own_speed) {
    return pursuing_jammer(cfg, own_speed, false);
}

std::vector<JammerTick> constant_jammer_trajectory(const ScenarioConfig& cfg) {
    return constant_jammer_trajectory(cfg, own_speed_profile(cfg));
}

std::vector<InterferenceTick> interference_trajectory(const ScenarioConfig& cfg,
                                                      const std::vector<double>& own_speed) {
    const auto xr = receiver_positions(cfg, own_speed);
    const double mid = xr.empty() ? 0.0 : xr[xr.size() / 2];
    std::vector<InterferenceTick> out(own_speed.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = InterferenceTick{mid, cfg.interferer_offset, cfg.interferer_power, own_speed[k]};
    }
    return out;
}

std::vector<InterferenceTick> interference_trajectory(const ScenarioConfig& cfg) {
    return interference_trajectory(cfg, own_speed_profile(cfg));
}

JammerDecision smart_jammer_decision(SmartJammerState state, double sensed_dbm, double dt) {
    constexpr double tol = 1e-12;
    if (state.tx_timer > tol) {
        state.tx_timer -= dt;
        if (state.tx_timer <= tol) {
            state.tx_timer = 0.0;
            state.awaiting_idle = true;
            state.energy_timer = 0.0;
        }
        return {state, true};
    }
    if (!(sensed_dbm > state.sense_threshold)) {
        state.energy_timer = 0.0;
        state.awaiting_idle = false;
        return {state, false};
    }
    if (state.awaiting_idle) return {state, false};
    state.energy_timer += dt;
    if (state.energy_timer >= state.t_detection - tol) {
        state.energy_timer = 0.0;
        state.tx_timer = state.t_duration;
    }
    return {state, false};
}

std::vector<bool> reactive_burst_mask(const ScenarioConfig& cfg, double sensed_dbm, int frame_len) {
    SmartJammerState st;
    st.sense_threshold = cfg.sense_threshold_dbm;
    st.t_detection = cfg.t_detection;
    st.t_duration = cfg.t_duration;
    std::vector<bool> mask(static_cast<std::size_t>(std::max(frame_len, 0)), false);
    for (auto&& m : mask) {
        auto d = smart_jammer_decision(st, sensed_dbm, cfg.radio.symbol_period);
        st = d.state;
        m = d.transmitting;
    }
    return mask;
}

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

}  // namespace vrsjam::scenario
