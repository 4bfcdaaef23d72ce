#include "cvtrans/gkp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cvtrans {

namespace {

void check_domain(double eta, double gain) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("gkp: eta must lie in (0, 1)");
    }
    if (!(gain >= 1.0)) {
        throw std::invalid_argument("gkp: gain must be >= 1");
    }
}

}  // namespace

GkpLattice gkp_spacings(double eta) {
    check_domain(eta, 1.0);
    const double ratio = std::pow((1.0 - eta) / eta, 0.25);
    const double base = 2.0 * std::sqrt(2.0 * M_PI);
    return {ratio * base, base / ratio};
}

double gkp_error_bound(double eta, double gain) {
    check_domain(eta, gain);
    const double z = std::sqrt(gain * M_PI) * std::pow(eta * (1.0 - eta), 0.25);
    // 1 - erf(z)^2 = erfc(z) (2 - erfc(z)), exact also deep in the tail.
    const double c = std::erfc(z);
    return c * (2.0 - c);
}

GkpMcResult gkp_error_mc(double eta, double gain, std::int64_t n_samples,
                         std::uint64_t seed) {
    check_domain(eta, gain);
    if (n_samples < 1000) {
        throw std::invalid_argument("gkp_error_mc: need at least 1000 samples");
    }

    const double sigma_q = 1.0 / std::sqrt(eta * gain);
    const double sigma_p = 1.0 / std::sqrt((1.0 - eta) * gain);
    const double w_q = std::pow((1.0 - eta) / eta, 0.25) * std::sqrt(2.0 * M_PI);
    const double w_p = std::pow(eta / (1.0 - eta), 0.25) * std::sqrt(2.0 * M_PI);

    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> dq(0.0, sigma_q);
    std::normal_distribution<double> dp(0.0, sigma_p);

    std::int64_t errors = 0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const double q = dq(rng);
        const double p = dp(rng);
        if (std::abs(q) > w_q || std::abs(p) > w_p) ++errors;
    }
    const double n = static_cast<double>(n_samples);
    const double p_hat = static_cast<double>(errors) / n;
    return {p_hat, std::sqrt(p_hat * (1.0 - p_hat) / n)};
}

}  // namespace cvtrans
