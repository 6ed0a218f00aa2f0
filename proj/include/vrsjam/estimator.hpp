#pragma once

// Pilot-based linear MMSE estimation of the combined Tx+Jx tap vector and
// Doppler-based recovery of the jammer/receiver relative speed.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vrsjam/types.hpp"

namespace vrsjam::estimator {

class UnderdeterminedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConditioningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// K received samples of a known BPSK pilot run through an N-tap channel.
/// Symbols before the block are silent (guard interval), so sample k sees
/// pilots[k - l] for l <= k only.
struct PilotBlock {
    std::vector<double> pilots;
    std::vector<cplx> received;
    double noise_cov = 0.0;  // per-sample noise variance; 0 = noiseless
    int n_rays = 2;
    double prior_var = 0.0;  // per-tap prior variance; <= 0 = non-informative
};

struct CombinedEstimate {
    std::vector<cplx> taps;   // length N
    double tap0_sigma = 0.0;  // std of the LOS-tap estimation error, from the fit residual
};

/// K x N convolution matrix of the pilot sequence.
std::vector<std::vector<double>> design_matrix(std::span<const double> pilots, int n_rays);

/// Linear MMSE estimate of the combined taps; exact least squares when noise_cov == 0
/// or no prior is given. Throws UnderdeterminedError when K <= 2N and
/// ConditioningError for a rank-deficient pilot design.
CombinedEstimate mmse_estimate_combined(const PilotBlock& block);

/// Removes the receiver-known Tx->Rx LOS term from the LOS component of z_hat.
/// `tx_los` is the Tx LOS tap value, `p_1` the Tx power in mW.
cplx separate_jammer_los(std::span<const cplx> z_hat, cplx tx_los, double p_1);

struct SpeedEstimate {
    double delta_u_hat = 0.0;  // m/s, >= 0
    double f_d_hat = 0.0;      // Hz
    double quality = 0.0;      // normalized one-step prediction residual
};

/// Doppler from the mean block-to-block phase rotation of the jammer LOS samples.
/// Returns nullopt ("no jammer signal") when the RMS magnitude is below `floor`
/// or the sequence is identically zero. Throws std::invalid_argument for fewer
/// than two samples or non-positive dt_block / f_c.
std::optional<SpeedEstimate> estimate_relative_speed(std::span<const cplx> h2_los_seq, double dt_block,
                                                     double f_c, double floor = 0.0);

}  // namespace vrsjam::estimator
