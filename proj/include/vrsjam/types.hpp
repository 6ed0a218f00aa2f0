#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vrsjam {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s, rounded as in the usual link-budget tables
inline constexpr double kPi = 3.14159265358979323846;

enum class ScenarioKind : int { Interference = 0, SmartAttack = 1, ConstantAttack = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::array<ScenarioKind, kNumClasses> kAllKinds = {
    ScenarioKind::Interference, ScenarioKind::SmartAttack, ScenarioKind::ConstantAttack};

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_kind(std::string_view name);

/// Thrown for malformed configuration input. `key()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// One 0.1 s feature row.
struct ObservationRecord {
    double t = 0.0;          // s
    double rssi = 0.0;       // dBm
    double sinr = 0.0;       // dB
    double pdr = 1.0;        // [0, 1]
    double delta_u = 0.0;    // m/s, estimated
    double own_speed = 0.0;  // m/s
    double vrs = 0.0;        // encoded VRS label
    ScenarioKind class_label = ScenarioKind::Interference;
};

}  // namespace vrsjam
