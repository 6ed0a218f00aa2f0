#pragma once

// Variations-of-Relative-Speed labelling: scans the estimated relative speed
// against the vehicle's own speed and marks each observation as attack (A) or
// no attack (NA), carrying a trigger bit between observations.

#include <span>
#include <vector>

namespace vrsjam::vrs {

enum class VrsLabel { NA, A };

struct VrsInput {
    std::span<const double> delta_u;    // m/s, length M
    std::span<const double> own_speed;  // m/s, length M
    double epsilon = 0.5;               // m/s, equality tolerance
};

struct VrsOutput {
    std::vector<VrsLabel> labels;
    int final_trigger = 0;
    std::vector<double> encoded;
};

inline constexpr double kNumNA = 0.0;
inline constexpr double kNumA = 100.0;

/// Throws std::invalid_argument when M < 2, lengths differ or epsilon <= 0.
VrsOutput vrs_labels(const VrsInput& input, double num_na = kNumNA, double num_a = kNumA);

std::vector<double> encode_labels(std::span<const VrsLabel> labels, double num_na = kNumNA,
                                  double num_a = kNumA);

}  // namespace vrsjam::vrs
