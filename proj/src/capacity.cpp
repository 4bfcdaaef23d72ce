#include "cvtrans/capacity.hpp"

#include "cvtrans/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvtrans {

namespace {

constexpr double kGainLo = 1.0;
constexpr double kGainHi = 1e6;
constexpr double kGainTol = 1e-9;

double bound_value(BoundKind kind, double v) {
    return kind == BoundKind::lower ? q_lb(v) : q_ub(v);
}

double rate_at(const ThresholdQuery& query, double gain) {
    const AdditiveNoiseSpec noise = teleport_channel({query.eta, gain, 1.0, 1.0});
    return bound_value(query.bound, sym_variance(noise.var_q, noise.var_p));
}

// Golden-section minimizer over log-gain; the upper bound along gain dips
// once and then rises, so the function is unimodal on the bracket.
double argmin_gain(const ThresholdQuery& query) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::log(kGainLo);
    double b = std::log(kGainHi);
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = rate_at(query, std::exp(c));
    double fd = rate_at(query, std::exp(d));
    while (std::exp(b) - std::exp(a) > kGainTol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = rate_at(query, std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = rate_at(query, std::exp(d));
        }
    }
    return std::exp(0.5 * (a + b));
}

}  // namespace

double db_from_gain(double gain) { return 10.0 * std::log10(gain); }

double gain_from_db(double db) { return std::pow(10.0, db / 10.0); }

double pure_loss_capacity(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("pure_loss_capacity: eta must lie in [0, 1]");
    }
    if (eta == 1.0) return std::numeric_limits<double>::infinity();
    if (eta == 0.0) return 0.0;
    return std::max(std::log2(eta / (1.0 - eta)), 0.0);
}

double sym_variance(double var_q, double var_p) {
    if (!(var_q > 0.0) || !(var_p > 0.0)) {
        throw std::invalid_argument("sym_variance: variances must be positive");
    }
    return std::sqrt(var_q * var_p);
}

double entropy_h(double x) {
    if (!(x >= 1.0)) {
        throw std::invalid_argument("entropy_h: argument must be >= 1");
    }
    const double a = (x + 1.0) / 2.0;
    const double b = (x - 1.0) / 2.0;
    const double tb = b > 0.0 ? b * std::log2(b) : 0.0;  // x -> 1 limit
    return a * std::log2(a) - tb;
}

double q_lb(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("q_lb: variance must be positive");
    return std::max(-std::log2(v / 2.0) - 1.0 / M_LN2, 0.0);
}

double q_ub(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("q_ub: variance must be positive");
    const double raw = -std::log2(v / 2.0) - 1.0 / M_LN2 +
                       2.0 * entropy_h(std::sqrt(1.0 + v * v / 4.0));
    return std::max(raw, 0.0);
}

double g_star(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("g_star: eta must lie in (0, 1)");
    }
    return M_E / (2.0 * std::sqrt(eta * (1.0 - eta)));
}

double g_star_adv(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("g_star_adv: eta must lie in (0, 1)");
    }
    if (eta < 0.5) return g_star(eta);
    return M_E * std::sqrt(eta) / (2.0 * std::pow(1.0 - eta, 1.5));
}

double eta_min_positive(double gain) {
    if (!(gain >= M_E)) {
        throw std::invalid_argument("eta_min_positive: gain must be >= e");
    }
    // (1 - sqrt(1 - x)) / 2 in a form that keeps precision for x -> 0.
    const double r = M_E / gain;
    const double x = r * r;
    return x / (2.0 * (1.0 + std::sqrt(1.0 - x)));
}

double gain_threshold_db(const ThresholdQuery& query) {
    if (!(query.eta > 0.0 && query.eta < 1.0)) {
        throw std::invalid_argument("gain_threshold: eta must lie in (0, 1)");
    }
    const double target = query.target == ThresholdTarget::positive_rate
                              ? 0.0
                              : pure_loss_capacity(query.eta);
    if (!(rate_at(query, kGainHi) > target)) {
        throw numerical_error("gain_threshold: target not reached inside gain bracket");
    }

    double lo = kGainLo;
    if (rate_at(query, kGainLo) > target) {
        if (query.bound == BoundKind::lower) {
            throw numerical_error("gain_threshold: bound already above target at unit gain");
        }
        // Upper bound: positive at unit gain. If it never dips to the target,
        // report its minimizer; otherwise bisect on the rising branch.
        const double g_min = argmin_gain(query);
        if (rate_at(query, g_min) > target) return db_from_gain(g_min);
        lo = g_min;
    }

    double hi = kGainHi;
    while (hi - lo > kGainTol) {
        const double mid = 0.5 * (lo + hi);
        (rate_at(query, mid) > target ? hi : lo) = mid;
    }
    return db_from_gain(0.5 * (lo + hi));
}

CapacityBounds protocol_rate_bounds(const ProtocolParams& params) {
    const AdditiveNoiseSpec noise = teleport_channel(params);
    const double v = sym_variance(noise.var_q, noise.var_p);
    return {q_lb(v), q_ub(v)};
}

}  // namespace cvtrans
