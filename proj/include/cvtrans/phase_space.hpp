#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace cvtrans {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

enum class Axis { position, momentum };

// One quadrature of one mode.
struct QuadratureLabel {
    int mode = 0;
    Axis axis = Axis::position;
};

// Gaussian state of N bosonic modes in vacuum units (hbar = 2): mean vector
// of length 2N in (q1, p1, ..., qN, pN) order plus a symmetric 2N x 2N
// covariance matrix. Vacuum has mean zero and unit covariance; physical
// states have every symplectic eigenvalue >= 1.
struct GaussianState {
    Vec mean;
    Mat cov;

    int num_modes() const { return static_cast<int>(mean.size()) / 2; }
};

// Linear phase-space map x -> S x + d. S must preserve the symplectic form.
struct SymplecticOp {
    Mat matrix;
    Vec displacement;
};

// Block-diagonal symplectic form with per-mode blocks [[0, 1], [-1, 0]].
Mat symplectic_form(int n_modes);
bool is_symplectic(const Mat& s, double tol = 1e-12);

// ---------------------------- state construction ----------------------------

GaussianState vacuum_state(int n_modes);

// Single-mode squeezed vacuum with linear gain G >= 1. The squeezed axis has
// variance 1/G, the conjugate axis G.
GaussianState squeezed_vacuum(double gain, Axis axis);

GaussianState coherent_state(double q_mean, double p_mean);

// Product state; modes of `a` come first.
GaussianState tensor(const GaussianState& a, const GaussianState& b);

// ------------------------------ symplectic ops ------------------------------

SymplecticOp identity_op(int n_modes);

// Two-mode mixing acting identically on q and p:
//   out_i = sqrt(eta) in_i + sqrt(1-eta) in_j
//   out_j = sqrt(1-eta) in_i - sqrt(eta) in_j
// eta = 0 swaps the modes; eta = 1 leaves mode i alone and flips the sign of
// mode j.
SymplecticOp beamsplitter_op(double eta, int mode_i, int mode_j, int n_modes);

// Scales the chosen axis of one mode by 1/sqrt(G) and the conjugate axis by
// sqrt(G).
SymplecticOp squeeze_op(double gain, Axis axis, int mode, int n_modes);

// q -> cos(t) q + sin(t) p, p -> -sin(t) q + cos(t) p on one mode.
SymplecticOp phase_rotation_op(double theta, int mode, int n_modes);

// ------------------------------- channels -----------------------------------

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op);

// Pure-loss channel a -> sqrt(kappa) a + sqrt(1-kappa) vac on one mode.
GaussianState apply_loss(const GaussianState& state, int mode, double kappa);

// Adds diag(var_q, var_p) to one mode's covariance block; mean unchanged.
GaussianState apply_additive_noise(const GaussianState& state, int mode,
                                   double var_q, double var_p);

GaussianState displace(const GaussianState& state, int mode, double dq, double dp);

// ------------------------------- measurement --------------------------------

struct HomodyneResult {
    double outcome;
    GaussianState post_state;  // measured mode removed
};

// Conditions the remaining modes on a known outcome of the target quadrature
// and drops the measured mode. The covariance update does not depend on the
// outcome value.
GaussianState homodyne_project(const GaussianState& state, QuadratureLabel target,
                               double outcome);

// Samples the outcome from the Gaussian marginal of the target quadrature,
// then conditions as in homodyne_project.
HomodyneResult homodyne(const GaussianState& state, QuadratureLabel target, Rng& rng);

// Marginal state of the listed modes (treated as a set; output keeps
// ascending mode order).
GaussianState partial_trace(const GaussianState& state, std::vector<int> keep);

// Minimum modulus of the eigenvalues of i * Omega * cov. Physical states give
// values >= 1 up to numerical tolerance.
double min_symplectic_eigenvalue(const GaussianState& state);

}  // namespace cvtrans
