#include "cvtrans/phase_space.hpp"

#include "cvtrans/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cvtrans {

namespace {

void symmetrize(Mat& m) { m = ((m + m.transpose()) * 0.5).eval(); }

void check_mode(int mode, int n_modes, const char* what) {
    if (mode < 0 || mode >= n_modes) {
        throw std::invalid_argument(std::string(what) + ": mode index out of range");
    }
}

}  // namespace

Mat symplectic_form(int n_modes) {
    Mat omega = Mat::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

bool is_symplectic(const Mat& s, double tol) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0) return false;
    const int n = static_cast<int>(s.rows()) / 2;
    const Mat omega = symplectic_form(n);
    return ((s * omega * s.transpose() - omega).cwiseAbs().maxCoeff()) < tol;
}

GaussianState vacuum_state(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("vacuum_state: need at least one mode");
    return {Vec::Zero(2 * n_modes), Mat::Identity(2 * n_modes, 2 * n_modes)};
}

GaussianState squeezed_vacuum(double gain, Axis axis) {
    if (!(gain >= 1.0)) {
        throw std::invalid_argument("squeezed_vacuum: gain must be >= 1");
    }
    Mat cov(2, 2);
    if (axis == Axis::position) {
        cov << 1.0 / gain, 0.0, 0.0, gain;
    } else {
        cov << gain, 0.0, 0.0, 1.0 / gain;
    }
    return {Vec::Zero(2), cov};
}

GaussianState coherent_state(double q_mean, double p_mean) {
    Vec mean(2);
    mean << q_mean, p_mean;
    return {mean, Mat::Identity(2, 2)};
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const auto na = a.mean.size();
    const auto nb = b.mean.size();
    GaussianState out{Vec::Zero(na + nb), Mat::Zero(na + nb, na + nb)};
    out.mean.head(na) = a.mean;
    out.mean.tail(nb) = b.mean;
    out.cov.topLeftCorner(na, na) = a.cov;
    out.cov.bottomRightCorner(nb, nb) = b.cov;
    return out;
}

SymplecticOp identity_op(int n_modes) {
    return {Mat::Identity(2 * n_modes, 2 * n_modes), Vec::Zero(2 * n_modes)};
}

SymplecticOp beamsplitter_op(double eta, int mode_i, int mode_j, int n_modes) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("beamsplitter_op: eta must lie in [0, 1]");
    }
    check_mode(mode_i, n_modes, "beamsplitter_op");
    check_mode(mode_j, n_modes, "beamsplitter_op");
    if (mode_i == mode_j) {
        throw std::invalid_argument("beamsplitter_op: modes must differ");
    }
    const double t = std::sqrt(eta);
    const double r = std::sqrt(1.0 - eta);
    SymplecticOp op = identity_op(n_modes);
    for (int k = 0; k < 2; ++k) {
        op.matrix(2 * mode_i + k, 2 * mode_i + k) = t;
        op.matrix(2 * mode_i + k, 2 * mode_j + k) = r;
        op.matrix(2 * mode_j + k, 2 * mode_i + k) = r;
        op.matrix(2 * mode_j + k, 2 * mode_j + k) = -t;
    }
    return op;
}

SymplecticOp squeeze_op(double gain, Axis axis, int mode, int n_modes) {
    if (!(gain >= 1.0)) throw std::invalid_argument("squeeze_op: gain must be >= 1");
    check_mode(mode, n_modes, "squeeze_op");
    const double s = std::sqrt(gain);
    SymplecticOp op = identity_op(n_modes);
    const int q = 2 * mode;
    if (axis == Axis::position) {
        op.matrix(q, q) = 1.0 / s;
        op.matrix(q + 1, q + 1) = s;
    } else {
        op.matrix(q, q) = s;
        op.matrix(q + 1, q + 1) = 1.0 / s;
    }
    return op;
}

SymplecticOp phase_rotation_op(double theta, int mode, int n_modes) {
    check_mode(mode, n_modes, "phase_rotation_op");
    SymplecticOp op = identity_op(n_modes);
    const int q = 2 * mode;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    op.matrix(q, q) = c;
    op.matrix(q, q + 1) = s;
    op.matrix(q + 1, q) = -s;
    op.matrix(q + 1, q + 1) = c;
    return op;
}

GaussianState apply_symplectic(const GaussianState& state, const SymplecticOp& op) {
    if (op.matrix.rows() != state.mean.size()) {
        throw std::invalid_argument("apply_symplectic: dimension mismatch");
    }
    GaussianState out;
    out.mean = op.matrix * state.mean + op.displacement;
    out.cov = op.matrix * state.cov * op.matrix.transpose();
    symmetrize(out.cov);
    return out;
}

GaussianState apply_loss(const GaussianState& state, int mode, double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) {
        throw std::invalid_argument("apply_loss: kappa must lie in [0, 1]");
    }
    check_mode(mode, state.num_modes(), "apply_loss");
    const double s = std::sqrt(kappa);
    GaussianState out = state;
    const int q = 2 * mode;
    out.mean.segment<2>(q) *= s;
    out.cov.middleRows<2>(q) *= s;
    out.cov.middleCols<2>(q) *= s;
    out.cov(q, q) += 1.0 - kappa;
    out.cov(q + 1, q + 1) += 1.0 - kappa;
    symmetrize(out.cov);
    return out;
}

GaussianState apply_additive_noise(const GaussianState& state, int mode,
                                   double var_q, double var_p) {
    if (var_q < 0.0 || var_p < 0.0) {
        throw std::invalid_argument("apply_additive_noise: variances must be >= 0");
    }
    check_mode(mode, state.num_modes(), "apply_additive_noise");
    GaussianState out = state;
    out.cov(2 * mode, 2 * mode) += var_q;
    out.cov(2 * mode + 1, 2 * mode + 1) += var_p;
    return out;
}

GaussianState displace(const GaussianState& state, int mode, double dq, double dp) {
    check_mode(mode, state.num_modes(), "displace");
    GaussianState out = state;
    out.mean(2 * mode) += dq;
    out.mean(2 * mode + 1) += dp;
    return out;
}

GaussianState homodyne_project(const GaussianState& state, QuadratureLabel target,
                               double outcome) {
    const int n = state.num_modes();
    check_mode(target.mode, n, "homodyne");
    if (n < 1) throw std::invalid_argument("homodyne: empty state");
    const int idx = 2 * target.mode + (target.axis == Axis::momentum ? 1 : 0);

    const double var_t = state.cov(idx, idx);
    if (!(var_t > 1e-12)) {
        throw numerical_error("homodyne: measured quadrature has non-positive variance");
    }

    std::vector<int> keep;
    keep.reserve(2 * (n - 1));
    for (int k = 0; k < 2 * n; ++k) {
        if (k / 2 != target.mode) keep.push_back(k);
    }

    GaussianState out;
    out.mean = state.mean(keep);
    out.cov = state.cov(keep, keep);
    const Vec cross = state.cov(keep, Eigen::all).col(idx);
    out.mean += cross * ((outcome - state.mean(idx)) / var_t);
    out.cov -= (cross * cross.transpose()) / var_t;
    symmetrize(out.cov);
    return out;
}

HomodyneResult homodyne(const GaussianState& state, QuadratureLabel target, Rng& rng) {
    const int idx = 2 * target.mode + (target.axis == Axis::momentum ? 1 : 0);
    check_mode(target.mode, state.num_modes(), "homodyne");
    const double var_t = state.cov(idx, idx);
    if (!(var_t > 1e-12)) {
        throw numerical_error("homodyne: measured quadrature has non-positive variance");
    }
    std::normal_distribution<double> dist(state.mean(idx), std::sqrt(var_t));
    const double outcome = dist(rng);
    return {outcome, homodyne_project(state, target, outcome)};
}

GaussianState partial_trace(const GaussianState& state, std::vector<int> keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
        throw std::invalid_argument("partial_trace: duplicate mode index");
    }
    const int n = state.num_modes();
    std::vector<int> idx;
    idx.reserve(2 * keep.size());
    for (int m : keep) {
        check_mode(m, n, "partial_trace");
        idx.push_back(2 * m);
        idx.push_back(2 * m + 1);
    }
    return {state.mean(idx), state.cov(idx, idx)};
}

double min_symplectic_eigenvalue(const GaussianState& state) {
    // The symplectic eigenvalues are the square roots of the eigenvalues of
    // cov^{1/2} (Omega cov Omega^T) cov^{1/2}. Keeping the problem symmetric
    // avoids the convergence failures a plain Schur pass can hit on the
    // degenerate +-i spectra of near-vacuum states.
    const int n = state.num_modes();
    Eigen::SelfAdjointEigenSolver<Mat> cov_solver(state.cov);
    const Mat root = cov_solver.eigenvectors() *
                     cov_solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                     cov_solver.eigenvectors().transpose();
    const Mat omega = symplectic_form(n);
    const Mat sym = root * omega * state.cov * omega.transpose() * root;
    Eigen::SelfAdjointEigenSolver<Mat> solver(sym, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(solver.eigenvalues().minCoeff(), 0.0));
}

}  // namespace cvtrans
