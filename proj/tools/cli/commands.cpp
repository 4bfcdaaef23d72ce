#include "cli/commands.hpp"

#include "cvtrans/capacity.hpp"
#include "cvtrans/gkp.hpp"
#include "cvtrans/json_io.hpp"
#include "cvtrans/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace cvtrans::cli {

namespace {

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (!(lo <= hi)) throw std::invalid_argument("grid bounds are inverted");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo + static_cast<double>(i) * step;
    return out;
}

// Sweeps stay inside the capacity-query domain.
std::vector<double> eta_grid(double lo, double hi, double step) {
    return grid(std::max(lo, 0.01), std::min(hi, 0.99), step);
}

void check_eta_point(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("eta must lie in (0, 1)");
    }
}

void check_gain_db(double db) {
    if (!(db >= 0.0)) {
        throw std::invalid_argument("gain-db must be >= 0 (linear gain >= 1)");
    }
}

void check_kappa_range(double lo, double hi) {
    if (!(lo > 0.0 && hi <= 1.0 && lo <= hi)) {
        throw std::invalid_argument("kappa range must lie inside (0, 1]");
    }
}

template <class Fn>
void parallel_rows(std::size_t n, int threads, Fn&& fn) {
    int n_threads =
        threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(std::min<std::size_t>(n_threads, n));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::mutex mu;
    std::exception_ptr first_error;
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = static_cast<std::size_t>(t); i < n;
                     i += static_cast<std::size_t>(n_threads)) {
                    fn(i);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

nlohmann::ordered_json matrix2_json(const Eigen::Matrix2d& m) {
    return nlohmann::ordered_json::array(
        {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
}

}  // namespace

Table fig2a_table(const Fig2aOptions& opt) {
    const std::vector<double> etas = eta_grid(opt.eta_min, opt.eta_max, opt.eta_step);
    Table t;
    t.columns = {"eta", "q_direct", "q_lb_10db", "q_ub_10db", "q_lb_20db", "q_ub_20db"};
    t.rows.resize(etas.size());
    parallel_rows(etas.size(), opt.threads, [&](std::size_t i) {
        const double eta = etas[i];
        const CapacityBounds b10 = protocol_rate_bounds({eta, 10.0, 1.0, 1.0});
        const CapacityBounds b20 = protocol_rate_bounds({eta, 100.0, 1.0, 1.0});
        t.rows[i] = {eta,       pure_loss_capacity(eta), b10.lower,
                     b10.upper, b20.lower,               b20.upper};
    });
    return t;
}

Table fig2b_table(const Fig2bOptions& opt) {
    check_eta_point(opt.eta);
    check_gain_db(opt.gain_db_min);
    const std::vector<double> dbs = grid(opt.gain_db_min, opt.gain_db_max, opt.gain_db_step);
    Table t;
    t.columns = {"g_db", "q_lb", "q_ub"};
    t.rows.resize(dbs.size());
    parallel_rows(dbs.size(), opt.threads, [&](std::size_t i) {
        const CapacityBounds b =
            protocol_rate_bounds({opt.eta, gain_from_db(dbs[i]), 1.0, 1.0});
        t.rows[i] = {dbs[i], b.lower, b.upper};
    });
    return t;
}

std::string fig2b_summary_json(const Fig2bOptions& opt) {
    nlohmann::ordered_json j;
    j["eta"] = opt.eta;
    j["g_star_db"] = db_from_gain(g_star(opt.eta));
    j["g_star_adv_db"] = db_from_gain(g_star_adv(opt.eta));
    return j.dump(2) + "\n";
}

Table fig3_table(const Fig3Options& opt) {
    const std::vector<double> etas = eta_grid(opt.eta_min, opt.eta_max, opt.eta_step);
    Table t;
    t.columns = {"eta", "thr_pos_lb_db", "thr_pos_ub_db", "thr_adv_lb_db", "thr_adv_ub_db"};
    t.rows.resize(etas.size());
    parallel_rows(etas.size(), opt.threads, [&](std::size_t i) {
        const double eta = etas[i];
        using T = ThresholdTarget;
        using B = BoundKind;
        t.rows[i] = {eta,
                     gain_threshold_db({eta, T::positive_rate, B::lower}),
                     gain_threshold_db({eta, T::positive_rate, B::upper}),
                     gain_threshold_db({eta, T::advantage_over_direct, B::lower}),
                     gain_threshold_db({eta, T::advantage_over_direct, B::upper})};
    });
    return t;
}

Table fig4_table(const Fig4Options& opt) {
    check_eta_point(opt.eta);
    check_kappa_range(opt.kappa_min, opt.kappa_max);
    Table t;
    if (opt.mode == "a") {
        check_gain_db(opt.gain_db_min);
        const std::vector<double> dbs =
            grid(opt.gain_db_min, opt.gain_db_max, opt.gain_db_step);
        const std::vector<double> kappas = grid(opt.kappa_min, opt.kappa_max, opt.kappa_step);
        t.columns = {"g_db", "kappa", "q_lb"};
        t.rows.resize(dbs.size() * kappas.size());
        parallel_rows(dbs.size(), opt.threads, [&](std::size_t i) {
            const double gain = gain_from_db(dbs[i]);
            for (std::size_t k = 0; k < kappas.size(); ++k) {
                const double q =
                    protocol_rate_bounds({opt.eta, gain, kappas[k], kappas[k]}).lower;
                t.rows[i * kappas.size() + k] = {dbs[i], kappas[k], q};
            }
        });
    } else if (opt.mode == "b") {
        check_gain_db(opt.gain_db);
        const std::vector<double> kh = grid(opt.kappa_min, opt.kappa_max, opt.kappa_step);
        const std::vector<double> ks = grid(opt.kappa_min, opt.kappa_max, opt.kappa_step);
        const double gain = gain_from_db(opt.gain_db);
        t.columns = {"kappa_h", "kappa_s", "q_lb"};
        t.rows.resize(kh.size() * ks.size());
        parallel_rows(kh.size(), opt.threads, [&](std::size_t i) {
            for (std::size_t k = 0; k < ks.size(); ++k) {
                const double q = protocol_rate_bounds({opt.eta, gain, kh[i], ks[k]}).lower;
                t.rows[i * ks.size() + k] = {kh[i], ks[k], q};
            }
        });
    } else {
        throw std::invalid_argument("fig4 mode must be 'a' or 'b'");
    }
    return t;
}

std::string teleport_demo_json(const DemoOptions& opt) {
    const ProtocolParams params{opt.eta, gain_from_db(opt.gain_db), opt.kappa_h,
                                opt.kappa_s};
    const AdditiveNoiseSpec analytic = teleport_channel(params);
    const ChannelEstimate est =
        estimate_channel_mc(params, opt.samples, opt.seed, opt.threads);

    const bool pass =
        std::abs(est.noise_cov(0, 0) - analytic.var_q) <= 3.0 * est.noise_cov_se(0, 0) &&
        std::abs(est.noise_cov(1, 1) - analytic.var_p) <= 3.0 * est.noise_cov_se(1, 1) &&
        std::abs(est.noise_cov(0, 1)) <= 3.0 * est.noise_cov_se(0, 1) &&
        std::abs(est.mean_gain(0) - 1.0) <= 3.0 * est.mean_gain_se(0) &&
        std::abs(est.mean_gain(1) - 1.0) <= 3.0 * est.mean_gain_se(1);

    nlohmann::ordered_json j;
    j["params"] = {{"eta", opt.eta},
                   {"gain_db", opt.gain_db},
                   {"gain", params.gain},
                   {"kappa_h", opt.kappa_h},
                   {"kappa_s", opt.kappa_s}};
    j["samples_per_probe"] = est.samples_per_probe;
    j["seed"] = opt.seed;
    j["analytic_channel"] = {{"var_q", analytic.var_q}, {"var_p", analytic.var_p}};
    j["mc_estimate"] = {{"mean_gain", {est.mean_gain(0), est.mean_gain(1)}},
                        {"noise_cov", matrix2_json(est.noise_cov)}};
    j["std_errors"] = {{"mean_gain", {est.mean_gain_se(0), est.mean_gain_se(1)}},
                       {"noise_cov", matrix2_json(est.noise_cov_se)}};
    j["pass"] = pass;
    return j.dump(2) + "\n";
}

std::string teleport_demo_state_json(const DemoOptions& opt) {
    const ProtocolParams params{opt.eta, gain_from_db(opt.gain_db), opt.kappa_h,
                                opt.kappa_s};
    const GaussianState out = teleport_unconditional(params, vacuum_state(1));
    return state_to_json(out).dump(2) + "\n";
}

std::string gkp_json(const GkpOptions& opt) {
    const double gain = gain_from_db(opt.gain_db);
    const GkpLattice lat = gkp_spacings(opt.eta);
    const double bound = gkp_error_bound(opt.eta, gain);
    const GkpMcResult mc = gkp_error_mc(opt.eta, gain, opt.samples, opt.seed);

    nlohmann::ordered_json j;
    j["eta"] = opt.eta;
    j["gain_db"] = opt.gain_db;
    j["gain"] = gain;
    j["samples"] = opt.samples;
    j["seed"] = opt.seed;
    j["l_q"] = lat.l_q;
    j["l_p"] = lat.l_p;
    j["p_bound"] = bound;
    j["p_mc"] = mc.p_hat;
    j["std_error"] = mc.std_error;
    return j.dump(2) + "\n";
}

std::string epr_json(const EprOptions& opt) {
    const double gain = gain_from_db(opt.gain_db);
    const GaussianState epr = make_generalized_epr(opt.eta, gain, opt.kappa_s);
    const auto [vq, vp] = epr_variances(epr, opt.eta);
    const auto [aq, ap] = epr_anti_variances(epr, opt.eta);

    nlohmann::ordered_json j;
    j["eta"] = opt.eta;
    j["gain_db"] = opt.gain_db;
    j["gain"] = gain;
    j["kappa_s"] = opt.kappa_s;
    j["var_q_minus"] = vq;
    j["var_p_plus"] = vp;
    j["var_q_plus"] = aq;
    j["var_p_minus"] = ap;
    return j.dump(2) + "\n";
}

std::string epr_state_json(const EprOptions& opt) {
    const GaussianState epr =
        make_generalized_epr(opt.eta, gain_from_db(opt.gain_db), opt.kappa_s);
    return state_to_json(epr).dump(2) + "\n";
}

std::string gnuplot_script(const std::string& command, const Table& table,
                           const std::string& csv_filename) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    if (table.columns.size() == 3 && (command == "fig4")) {
        s += "set xlabel '" + table.columns[0] + "'\n";
        s += "set ylabel '" + table.columns[1] + "'\n";
        s += "set view map\n";
        s += "splot '" + csv_filename + "' using 1:2:3 with points pointtype 5 palette\n";
        return s;
    }
    s += "set xlabel '" + table.columns[0] + "'\n";
    s += "plot ";
    for (std::size_t c = 1; c < table.columns.size(); ++c) {
        if (c > 1) s += ", ";
        s += (c == 1 ? "'" + csv_filename + "'" : "''");
        s += " using 1:" + std::to_string(c + 1) + " with lines";
    }
    s += "\n";
    return s;
}

}  // namespace cvtrans::cli
