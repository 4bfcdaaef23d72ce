#pragma once

#include "cvtrans/phase_space.hpp"

#include <cstdint>
#include <utility>

namespace cvtrans {

// One configuration of the teleportation-based transduction protocol.
//   eta      transduction-device beamsplitter ratio, in (0, 1)
//   gain     linear squeezing gain G >= 1
//   kappa_h  combined device + homodyne efficiency, in (0, 1]
//   kappa_s  squeezing-generation efficiency, in (0, 1]
struct ProtocolParams {
    double eta = 0.5;
    double gain = 1.0;
    double kappa_h = 1.0;
    double kappa_s = 1.0;
};

// Throws std::invalid_argument on domain violations.
void validate(const ProtocolParams& params);

// Quadrature variances of an additive Gaussian noise channel.
struct AdditiveNoiseSpec {
    double var_q = 0.0;
    double var_p = 0.0;
};

// One stochastic run of the protocol: the two homodyne records and the
// corrected output mode.
struct TrajectoryRecord {
    double q_tilde = 0.0;
    double p_tilde = 0.0;
    GaussianState output;
};

// Entangled resource state (modes A, B). Two single-mode squeezed vacua,
// squeezed along orthogonal axes and attenuated by kappa_s, are mixed as
//   A = sqrt(1-eta) in1 + sqrt(eta) in2,  B = sqrt(1-eta) in2 - sqrt(eta) in1,
// which squeezes the combinations sqrt(1-eta) q_A - sqrt(eta) q_B and
// sqrt(eta) p_A + sqrt(1-eta) p_B down to kappa_s/G + (1 - kappa_s).
GaussianState make_generalized_epr(double eta, double gain, double kappa_s);

// Variances of the squeezed EPR combinations above: (var q_-, var p_+).
std::pair<double, double> epr_variances(const GaussianState& state, double eta);

// Variances of the orthogonal, anti-squeezed combinations
// sqrt(eta) q_A + sqrt(1-eta) q_B and sqrt(1-eta) p_A - sqrt(eta) p_B.
std::pair<double, double> epr_anti_variances(const GaussianState& state, double eta);

// Effective channel of the protocol: unit-gain additive Gaussian noise with
//   var_q = [kh ks / G + (1 - kh ks)] / (eta kh)
//   var_p = [kh ks / G + (1 - kh ks)] / ((1 - eta) kh)
AdditiveNoiseSpec teleport_channel(const ProtocolParams& params);

// Runs the full protocol once on a single-mode input: resource preparation,
// loss kappa_h on signal and arm A, the device beamsplitter, homodyne of p on
// S' and q on A', and the corrective displacement
//   q_B -> q_B - q~ / sqrt(kh eta),  p_B -> p_B + p~ / sqrt(kh (1 - eta)).
TrajectoryRecord teleport_trajectory(const ProtocolParams& params,
                                     const GaussianState& input, Rng& rng);

// Exact moments of the measurement-averaged output. The designated mode of
// `input` is sent through the protocol; all other modes ride along untouched.
// The returned state keeps the input's mode order with the corrected output
// in the signal slot. Computed by linear-map algebra on the joint state, not
// from the closed-form channel.
GaussianState teleport_unconditional(const ProtocolParams& params,
                                     const GaussianState& input, int signal_mode = 0);

// Monte Carlo channel estimate from trajectories on coherent probes at
// (0,0), (2,0) and (0,2), n_samples trajectories each.
struct ChannelEstimate {
    Eigen::Vector2d mean_gain;     // linear map of the mean; identity -> (1, 1)
    Eigen::Vector2d mean_gain_se;
    Eigen::Matrix2d noise_cov;     // unconditional added-noise covariance
    Eigen::Matrix2d noise_cov_se;
    std::int64_t samples_per_probe = 0;
};

// Samples are processed in fixed-size chunks with seeds derived from
// (seed, probe, chunk), so the result does not depend on the thread count.
// threads = 0 picks the hardware concurrency.
ChannelEstimate estimate_channel_mc(const ProtocolParams& params,
                                    std::int64_t n_samples, std::uint64_t seed,
                                    int threads = 0);

// Swaps entanglement through the protocol: a balanced two-mode squeezed
// vacuum of gain gain_in is prepared between an idler I and the signal S, S
// is teleported, and the joint (I, output) state is returned together with
// its balanced EPR variances var((q_I - q_out)/sqrt 2), var((p_I + p_out)/sqrt 2).
struct SwapResult {
    GaussianState state;  // modes (I, B')
    double var_q_minus = 0.0;
    double var_p_plus = 0.0;
};

SwapResult entanglement_swap(const ProtocolParams& params, double gain_in);

}  // namespace cvtrans
