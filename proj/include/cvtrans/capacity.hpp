#pragma once

#include "cvtrans/protocol.hpp"

namespace cvtrans {

// Quantum-information rate window in bits per channel use.
struct CapacityBounds {
    double lower = 0.0;
    double upper = 0.0;
};

enum class ThresholdTarget { positive_rate, advantage_over_direct };
enum class BoundKind { lower, upper };

// One squeezing-threshold question: at device efficiency eta, how much gain
// is needed before the chosen capacity bound clears the chosen target.
struct ThresholdQuery {
    double eta = 0.5;
    ThresholdTarget target = ThresholdTarget::positive_rate;
    BoundKind bound = BoundKind::lower;
};

double db_from_gain(double gain);  // 10 log10 G
double gain_from_db(double db);

// Exact quantum capacity of the pure-loss channel with transmissivity eta:
// max[log2(eta / (1 - eta)), 0]. Returns +infinity at eta = 1.
double pure_loss_capacity(double eta);

// Symmetric variance with the same capacity as the asymmetric additive-noise
// channel: the geometric mean sqrt(var_q * var_p).
double sym_variance(double var_q, double var_p);

// Entropy of a thermal state with symplectic eigenvalue x >= 1:
// [(x+1)/2] log2[(x+1)/2] - [(x-1)/2] log2[(x-1)/2]; h(1) = 0.
double entropy_h(double x);

// Capacity lower bound for the additive-noise channel of symmetric variance
// v: max[-log2(v/2) - 1/ln 2, 0].
double q_lb(double v);

// Matching upper bound: max[-log2(v/2) - 1/ln 2 + 2 h(sqrt(1 + v^2/4)), 0].
// Decreasing in v only up to v ~ 1.52; it rises again beyond that, so it
// carries no zero-capacity certificate at large noise.
double q_ub(double v);

// Gain above which the lower bound is positive: e / (2 sqrt(eta (1 - eta))).
double g_star(double eta);

// Gain above which the lower bound beats direct transduction:
// e sqrt(eta) / (2 (1 - eta)^{3/2}) for eta >= 1/2, else g_star.
double g_star_adv(double eta);

// Smallest eta with a positive guaranteed rate at gain G >= e:
// (1 - sqrt(1 - e^2 / G^2)) / 2.
double eta_min_positive(double gain);

// Squeezing threshold in dB for the lossless protocol at query.eta, found by
// bisection over linear gain in [1, 1e6] to 1e-9. For the upper bound with a
// zero target the bound never returns to zero (see q_ub); the returned value
// is then the gain minimizing the bound, which is where it stops excluding
// anything below it. Throws numerical_error when the target is out of reach
// inside the bracket.
double gain_threshold_db(const ThresholdQuery& query);

// (q_lb, q_ub) evaluated at the symmetrized noise of teleport_channel(params).
CapacityBounds protocol_rate_bounds(const ProtocolParams& params);

}  // namespace cvtrans
