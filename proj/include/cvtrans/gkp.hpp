#pragma once

#include <cstdint>

namespace cvtrans {

// Rectangular single-qubit GKP lattice matched to the protocol's asymmetric
// noise: l_q / l_p = sqrt((1 - eta) / eta) and l_q * l_p = 8 pi (hbar = 2).
struct GkpLattice {
    double l_q = 0.0;
    double l_p = 0.0;
};

GkpLattice gkp_spacings(double eta);

// Logical-error probability bound after correcting the teleportation
// displacement noise with the matched rectangular lattice:
//   P_E <= 1 - erf(sqrt(G pi) (eta (1 - eta))^{1/4})^2,
// evaluated through erfc so the tail does not cancel to zero.
double gkp_error_bound(double eta, double gain);

struct GkpMcResult {
    double p_hat = 0.0;
    double std_error = 0.0;
};

// Brute-force check of the displacement-error model behind the bound: draws
// (dq, dp) from N(0, 1/(eta G)) x N(0, 1/((1-eta) G)) and counts samples
// falling outside the correctable cell |dq| <= w_q, |dp| <= w_p with
// w_q = ((1-eta)/eta)^{1/4} sqrt(2 pi) = l_q / 2 (and the p analogue).
GkpMcResult gkp_error_mc(double eta, double gain, std::int64_t n_samples,
                         std::uint64_t seed);

}  // namespace cvtrans
