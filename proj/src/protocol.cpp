#include "cvtrans/protocol.hpp"

#include "cvtrans/errors.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace cvtrans {

namespace {

// Mode indices of the three-role joint state after the device beamsplitter.
struct JointLayout {
    int a_prime;
    int s_prime;
    int b;
};

// in1 (position-squeezed) and in2 (momentum-squeezed) to (A, B); a rotation,
// acting identically on q and p.
SymplecticOp epr_mixing_op(double eta) {
    const double c = std::sqrt(1.0 - eta);
    const double s = std::sqrt(eta);
    SymplecticOp op = identity_op(2);
    for (int k = 0; k < 2; ++k) {
        op.matrix(0 + k, 0 + k) = c;
        op.matrix(0 + k, 2 + k) = s;
        op.matrix(2 + k, 0 + k) = -s;
        op.matrix(2 + k, 2 + k) = c;
    }
    return op;
}

// Resource preparation, loss on signal and arm A, then the device
// beamsplitter. Afterwards A' sits on the signal wire, S' on the wire that
// held A, and B is last.
GaussianState premeasure_joint(const ProtocolParams& p, const GaussianState& input,
                               int signal_mode, JointLayout& layout) {
    const int n_in = input.num_modes();
    if (signal_mode < 0 || signal_mode >= n_in) {
        throw std::invalid_argument("teleport: signal mode out of range");
    }
    const int a = n_in;
    const int b = n_in + 1;
    GaussianState joint = tensor(input, make_generalized_epr(p.eta, p.gain, p.kappa_s));
    joint = apply_loss(joint, signal_mode, p.kappa_h);
    joint = apply_loss(joint, a, p.kappa_h);
    // out_a = sqrt(eta) A + sqrt(1-eta) S = S';  out_signal = sqrt(1-eta) A - sqrt(eta) S = A'
    joint = apply_symplectic(joint, beamsplitter_op(p.eta, a, signal_mode, n_in + 2));
    layout = {signal_mode, a, b};
    return joint;
}

// Homodyne of p on S' and q on A' followed by the corrective displacement on
// B. Requires layout.a_prime < layout.s_prime < layout.b.
TrajectoryRecord measure_and_correct(const ProtocolParams& p, const GaussianState& joint,
                                     const JointLayout& layout, Rng& rng) {
    auto [p_tilde, after_p] =
        homodyne(joint, {layout.s_prime, Axis::momentum}, rng);
    const int b_after_p = layout.b - 1;
    auto [q_tilde, after_q] =
        homodyne(after_p, {layout.a_prime, Axis::position}, rng);
    const int b_final = b_after_p - 1;
    GaussianState out =
        displace(after_q, b_final, -q_tilde / std::sqrt(p.kappa_h * p.eta),
                 p_tilde / std::sqrt(p.kappa_h * (1.0 - p.eta)));
    return {q_tilde, p_tilde, std::move(out)};
}

constexpr std::int64_t kChunkSamples = 4096;

Rng chunk_rng(std::uint64_t seed, std::uint32_t probe, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32), probe,
                      static_cast<std::uint32_t>(chunk),
                      static_cast<std::uint32_t>(chunk >> 32)};
    return Rng(seq);
}

// Runs fn(chunk_index) for every chunk, split over a fixed partition so the
// set of chunks per call is independent of the thread count. Worker
// exceptions surface on the calling thread.
void for_each_chunk(std::int64_t n_chunks, int threads,
                    const std::function<void(std::int64_t)>& fn) {
    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1 || n_chunks <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::mutex mu;
    std::exception_ptr first_error;
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::int64_t c = t; c < n_chunks; c += n_threads) fn(c);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

void validate(const ProtocolParams& p) {
    if (!(p.eta > 0.0 && p.eta < 1.0)) {
        throw std::invalid_argument("protocol: eta must lie in (0, 1)");
    }
    if (!(p.gain >= 1.0)) {
        throw std::invalid_argument("protocol: gain must be >= 1");
    }
    if (!(p.kappa_h > 0.0 && p.kappa_h <= 1.0)) {
        throw std::invalid_argument("protocol: kappa_h must lie in (0, 1]");
    }
    if (!(p.kappa_s > 0.0 && p.kappa_s <= 1.0)) {
        throw std::invalid_argument("protocol: kappa_s must lie in (0, 1]");
    }
}

GaussianState make_generalized_epr(double eta, double gain, double kappa_s) {
    validate({eta, gain, 1.0, kappa_s});
    GaussianState st = tensor(squeezed_vacuum(gain, Axis::position),
                              squeezed_vacuum(gain, Axis::momentum));
    st = apply_loss(st, 0, kappa_s);
    st = apply_loss(st, 1, kappa_s);
    return apply_symplectic(st, epr_mixing_op(eta));
}

std::pair<double, double> epr_variances(const GaussianState& state, double eta) {
    if (state.num_modes() != 2) {
        throw std::invalid_argument("epr_variances: need a two-mode state");
    }
    const double c = std::sqrt(1.0 - eta);
    const double s = std::sqrt(eta);
    Vec vq = Vec::Zero(4), vp = Vec::Zero(4);
    vq << c, 0.0, -s, 0.0;
    vp << 0.0, s, 0.0, c;
    return {vq.dot(state.cov * vq), vp.dot(state.cov * vp)};
}

std::pair<double, double> epr_anti_variances(const GaussianState& state, double eta) {
    if (state.num_modes() != 2) {
        throw std::invalid_argument("epr_anti_variances: need a two-mode state");
    }
    const double c = std::sqrt(1.0 - eta);
    const double s = std::sqrt(eta);
    Vec vq = Vec::Zero(4), vp = Vec::Zero(4);
    vq << s, 0.0, c, 0.0;
    vp << 0.0, c, 0.0, -s;
    return {vq.dot(state.cov * vq), vp.dot(state.cov * vp)};
}

AdditiveNoiseSpec teleport_channel(const ProtocolParams& p) {
    validate(p);
    const double num = p.kappa_h * p.kappa_s / p.gain + (1.0 - p.kappa_h * p.kappa_s);
    return {num / (p.eta * p.kappa_h), num / ((1.0 - p.eta) * p.kappa_h)};
}

TrajectoryRecord teleport_trajectory(const ProtocolParams& p, const GaussianState& input,
                                     Rng& rng) {
    validate(p);
    if (input.num_modes() != 1) {
        throw std::invalid_argument("teleport_trajectory: input must be single-mode");
    }
    JointLayout layout{};
    const GaussianState joint = premeasure_joint(p, input, 0, layout);
    return measure_and_correct(p, joint, layout, rng);
}

GaussianState teleport_unconditional(const ProtocolParams& p, const GaussianState& input,
                                     int signal_mode) {
    validate(p);
    JointLayout layout{};
    const GaussianState joint = premeasure_joint(p, input, signal_mode, layout);
    const int n_in = input.num_modes();
    const int n = n_in + 2;

    // Output quadratures as linear functionals of the pre-measurement joint
    // state: spectators pass through, and the corrected output is
    //   q = q_B - q_{A'} / sqrt(kh eta),  p = p_B + p_{S'} / sqrt(kh (1-eta)).
    Mat t = Mat::Zero(2 * n_in, 2 * n);
    for (int m = 0; m < n_in; ++m) {
        if (m == signal_mode) {
            t(2 * m, 2 * layout.b) = 1.0;
            t(2 * m, 2 * layout.a_prime) = -1.0 / std::sqrt(p.kappa_h * p.eta);
            t(2 * m + 1, 2 * layout.b + 1) = 1.0;
            t(2 * m + 1, 2 * layout.s_prime + 1) =
                1.0 / std::sqrt(p.kappa_h * (1.0 - p.eta));
        } else {
            t(2 * m, 2 * m) = 1.0;
            t(2 * m + 1, 2 * m + 1) = 1.0;
        }
    }
    GaussianState out;
    out.mean = t * joint.mean;
    out.cov = t * joint.cov * t.transpose();
    out.cov = ((out.cov + out.cov.transpose()) * 0.5).eval();
    return out;
}

ChannelEstimate estimate_channel_mc(const ProtocolParams& p, std::int64_t n_samples,
                                    std::uint64_t seed, int threads) {
    validate(p);
    if (n_samples < 100) {
        throw std::invalid_argument("estimate_channel_mc: need at least 100 samples");
    }

    const Eigen::Vector2d probes[3] = {{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}};
    const std::int64_t n_chunks = (n_samples + kChunkSamples - 1) / kChunkSamples;

    JointLayout layout{};
    // Per-probe accumulators of the trajectory output means, combined in
    // fixed chunk order after the parallel phase.
    struct Acc {
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        Eigen::Matrix2d sum_outer = Eigen::Matrix2d::Zero();
    };
    std::vector<std::vector<Acc>> chunk_acc(3, std::vector<Acc>(n_chunks));

    for (std::uint32_t probe = 0; probe < 3; ++probe) {
        const GaussianState joint = premeasure_joint(
            p, coherent_state(probes[probe].x(), probes[probe].y()), 0, layout);
        for_each_chunk(n_chunks, threads, [&](std::int64_t chunk) {
            Rng rng = chunk_rng(seed, probe, static_cast<std::uint64_t>(chunk));
            const std::int64_t lo = chunk * kChunkSamples;
            const std::int64_t hi = std::min(lo + kChunkSamples, n_samples);
            Acc acc;
            for (std::int64_t i = lo; i < hi; ++i) {
                TrajectoryRecord rec = measure_and_correct(p, joint, layout, rng);
                const Eigen::Vector2d m = rec.output.mean;
                acc.sum += m;
                acc.sum_outer += m * m.transpose();
            }
            chunk_acc[probe][chunk] = acc;
        });
    }

    Eigen::Vector2d probe_mean[3];
    Eigen::Matrix2d probe_centered[3];  // sum of centered outer products
    for (int probe = 0; probe < 3; ++probe) {
        Eigen::Vector2d sum = Eigen::Vector2d::Zero();
        Eigen::Matrix2d sum_outer = Eigen::Matrix2d::Zero();
        for (const Acc& a : chunk_acc[probe]) {
            sum += a.sum;
            sum_outer += a.sum_outer;
        }
        const double n = static_cast<double>(n_samples);
        probe_mean[probe] = sum / n;
        probe_centered[probe] =
            sum_outer - n * probe_mean[probe] * probe_mean[probe].transpose();
    }

    // Outcome-independent conditional covariance of the corrected output.
    const GaussianState joint0 = premeasure_joint(p, coherent_state(0.0, 0.0), 0, layout);
    GaussianState cond = homodyne_project(joint0, {layout.s_prime, Axis::momentum}, 0.0);
    cond = homodyne_project(cond, {layout.a_prime, Axis::position}, 0.0);
    const Eigen::Matrix2d cond_cov = cond.cov;

    const double df = 3.0 * static_cast<double>(n_samples) - 3.0;
    Eigen::Matrix2d pooled =
        (probe_centered[0] + probe_centered[1] + probe_centered[2]) / df;

    ChannelEstimate est;
    est.samples_per_probe = n_samples;
    est.noise_cov = pooled + (cond_cov - Eigen::Matrix2d::Identity());
    est.noise_cov_se(0, 0) = pooled(0, 0) * std::sqrt(2.0 / df);
    est.noise_cov_se(1, 1) = pooled(1, 1) * std::sqrt(2.0 / df);
    est.noise_cov_se(0, 1) = est.noise_cov_se(1, 0) =
        std::sqrt((pooled(0, 0) * pooled(1, 1) + pooled(0, 1) * pooled(0, 1)) / df);

    const double n = static_cast<double>(n_samples);
    est.mean_gain(0) = (probe_mean[1].x() - probe_mean[0].x()) / 2.0;
    est.mean_gain(1) = (probe_mean[2].y() - probe_mean[0].y()) / 2.0;
    est.mean_gain_se(0) =
        std::sqrt((probe_centered[1](0, 0) + probe_centered[0](0, 0)) / (df / 3.0)) /
        (2.0 * std::sqrt(n));
    est.mean_gain_se(1) =
        std::sqrt((probe_centered[2](1, 1) + probe_centered[0](1, 1)) / (df / 3.0)) /
        (2.0 * std::sqrt(n));
    return est;
}

SwapResult entanglement_swap(const ProtocolParams& p, double gain_in) {
    validate(p);
    if (!(gain_in >= 1.0)) {
        throw std::invalid_argument("entanglement_swap: gain_in must be >= 1");
    }
    // Balanced EPR pair (I, S); S goes through the protocol.
    const GaussianState tmsv = make_generalized_epr(0.5, gain_in, 1.0);
    GaussianState out = teleport_unconditional(p, tmsv, 1);
    auto [vq, vp] = epr_variances(out, 0.5);
    return {std::move(out), vq, vp};
}

}  // namespace cvtrans
