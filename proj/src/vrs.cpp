#include "vrsjam/vrs.hpp"

#include <cmath>
#include <stdexcept>

namespace vrsjam::vrs {

VrsOutput vrs_labels(const VrsInput& input, double num_na, double num_a) {
    const auto& du = input.delta_u;
    const auto& u = input.own_speed;
    const std::size_t m = du.size();
    if (m < 2) throw std::invalid_argument("vrs_labels: need at least two observations");
    if (u.size() != m) throw std::invalid_argument("vrs_labels: delta_u and own_speed lengths differ");
    if (!(input.epsilon > 0.0)) throw std::invalid_argument("vrs_labels: epsilon must be positive");

    const double eps = input.epsilon;
    auto eq = [eps](double a, double b) { return std::abs(a - b) <= eps; };

    VrsOutput out;
    out.labels.resize(m);
    int trigger = 0;
    auto mark = [&](std::size_t k, bool attack) {
        out.labels[k] = attack ? VrsLabel::A : VrsLabel::NA;
        trigger = attack ? 1 : 0;
    };

    // The first observation only looks ahead; u[0] is never consulted.
    mark(0, !eq(du[0], du[1]));

    for (std::size_t k = 1; k < m; ++k) {
        const bool has_next = k + 1 < m;
        if (!eq(du[k], 0.0)) {
            if (!eq(du[k], du[k - 1])) {
                mark(k, !eq(du[k], u[k]));
            } else if (!eq(du[k], u[k])) {
                mark(k, true);
            } else if (has_next) {
                mark(k, !(eq(du[k - 1], u[k - 1]) && eq(du[k + 1], u[k + 1])));
            } else {
                mark(k, trigger != 0);
            }
        } else {
            if (!eq(u[k], 0.0)) {
                mark(k, true);
            } else if (eq(du[k - 1], u[k - 1])) {
                mark(k, trigger != 0);
            } else {
                mark(k, true);
            }
        }
    }

    out.final_trigger = trigger;
    out.encoded = encode_labels(out.labels, num_na, num_a);
    return out;
}

std::vector<double> encode_labels(std::span<const VrsLabel> labels, double num_na, double num_a) {
    std::vector<double> enc;
    enc.reserve(labels.size());
    for (auto l : labels) enc.push_back(l == VrsLabel::A ? num_a : num_na);
    return enc;
}

}  // namespace vrsjam::vrs
