#include "vrsjam/estimator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace vrsjam::estimator {

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

CMat build_design(std::span<const double> pilots, int n) {
    const auto k = static_cast<Eigen::Index>(pilots.size());
    CMat x = CMat::Zero(k, n);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index l = 0; l < n && l <= r; ++l) x(r, l) = pilots[static_cast<std::size_t>(r - l)];
    }
    return x;
}

}  // namespace

std::vector<std::vector<double>> design_matrix(std::span<const double> pilots, int n_rays) {
    std::vector<std::vector<double>> x(pilots.size(), std::vector<double>(static_cast<std::size_t>(n_rays), 0.0));
    for (std::size_t r = 0; r < pilots.size(); ++r) {
        for (std::size_t l = 0; l < x[r].size() && l <= r; ++l) x[r][l] = pilots[r - l];
    }
    return x;
}

CombinedEstimate mmse_estimate_combined(const PilotBlock& block) {
    const int n = block.n_rays;
    const auto k = block.pilots.size();
    if (n < 1) throw std::invalid_argument("n_rays must be >= 1");
    if (block.received.size() != k) {
        throw std::invalid_argument("pilot and received lengths differ");
    }
    if (static_cast<long>(k) <= 2L * n) {
        throw UnderdeterminedError("pilot block of length " + std::to_string(k) +
                                   " cannot resolve 2N = " + std::to_string(2 * n) + " unknowns");
    }
    if (block.noise_cov < 0.0) throw std::invalid_argument("noise_cov must be >= 0");

    const CMat x = build_design(block.pilots, n);
    Eigen::JacobiSVD<CMat> svd(x);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
        throw ConditioningError("pilot design matrix is rank deficient (cond > 1e10)");
    }

    CVec y(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) y(static_cast<Eigen::Index>(i)) = block.received[i];

    const CMat gram = x.adjoint() * x;
    const CVec rhs = x.adjoint() * y;
    const CVec z_ls = gram.ldlt().solve(rhs);

    CVec z = z_ls;
    if (block.noise_cov > 0.0 && block.prior_var > 0.0) {
        CMat reg = gram;
        reg.diagonal().array() += block.noise_cov / block.prior_var;
        z = reg.ldlt().solve(rhs);
    }

    CombinedEstimate out;
    out.taps.assign(z.data(), z.data() + z.size());
    const double dof = static_cast<double>(k) - n;
    const double res_var = (y - x * z_ls).squaredNorm() / dof;
    const CMat gram_inv = gram.inverse();
    out.tap0_sigma = std::sqrt(res_var * gram_inv(0, 0).real());
    return out;
}

cplx separate_jammer_los(std::span<const cplx> z_hat, cplx tx_los, double p_1) {
    if (z_hat.empty()) throw std::invalid_argument("separate_jammer_los: empty tap vector");
    return z_hat[0] - tx_los * std::sqrt(p_1);
}

std::optional<SpeedEstimate> estimate_relative_speed(std::span<const cplx> h2_los_seq, double dt_block,
                                                     double f_c, double floor) {
    if (h2_los_seq.size() < 2) throw std::invalid_argument("need at least two block estimates");
    if (!(dt_block > 0.0)) throw std::invalid_argument("dt_block must be positive");
    if (!(f_c > 0.0)) throw std::invalid_argument("f_c must be positive");

    double energy = 0.0;
    for (const auto& h : h2_los_seq) energy += std::norm(h);
    const double rms = std::sqrt(energy / static_cast<double>(h2_los_seq.size()));
    if (rms == 0.0 || rms < floor) return std::nullopt;

    cplx lag{0.0, 0.0};
    for (std::size_t i = 1; i < h2_los_seq.size(); ++i) lag += h2_los_seq[i] * std::conj(h2_los_seq[i - 1]);
    const double dphi = std::arg(lag);

    SpeedEstimate est;
    est.f_d_hat = dphi / (2.0 * kPi * dt_block);
    est.delta_u_hat = std::abs(est.f_d_hat) * kSpeedOfLight / f_c;

    const cplx rot = std::polar(1.0, dphi);
    double resid = 0.0;
    double ref = 0.0;
    for (std::size_t i = 1; i < h2_los_seq.size(); ++i) {
        resid += std::norm(h2_los_seq[i] - h2_los_seq[i - 1] * rot);
        ref += std::norm(h2_los_seq[i - 1]);
    }
    est.quality = ref > 0.0 ? std::sqrt(resid / ref) : 0.0;
    return est;
}

}  // namespace vrsjam::estimator
