#pragma once

#include "cli/format.hpp"

#include <cstdint>
#include <string>

namespace cvtrans::cli {

enum class OutputFormat { csv, json };

struct Fig2aOptions {
    double eta_min = 0.01;
    double eta_max = 0.99;
    double eta_step = 0.01;
    int threads = 0;
};

struct Fig2bOptions {
    double eta = 0.6;
    double gain_db_min = 0.0;
    double gain_db_max = 25.0;
    double gain_db_step = 0.1;
    int threads = 0;
};

struct Fig3Options {
    double eta_min = 0.01;
    double eta_max = 0.99;
    double eta_step = 0.01;
    int threads = 0;
};

struct Fig4Options {
    std::string mode = "a";  // a: (gain dB, kappa_h = kappa_s); b: (kappa_h, kappa_s)
    double eta = 0.5;
    double gain_db = 10.0;   // mode b
    double gain_db_min = 0.0;
    double gain_db_max = 25.0;
    double gain_db_step = 0.1;
    double kappa_min = 0.5;
    double kappa_max = 1.0;
    double kappa_step = 0.005;
    int threads = 0;
};

struct DemoOptions {
    double eta = 0.6;
    double gain_db = 10.0;
    double kappa_h = 1.0;
    double kappa_s = 1.0;
    std::int64_t samples = 100000;
    std::uint64_t seed = 20240101;
    int threads = 0;
};

struct GkpOptions {
    double eta = 0.5;
    double gain_db = 3.0102999566398120;  // G = 2
    std::int64_t samples = 1000000;
    std::uint64_t seed = 20240101;
};

struct EprOptions {
    double eta = 0.6;
    double gain_db = 10.0;
    double kappa_s = 1.0;
};

// Figure data producers. Rows are computed in parallel but emitted in grid
// order, so the output is independent of the thread count.
Table fig2a_table(const Fig2aOptions& opt);
Table fig2b_table(const Fig2bOptions& opt);
std::string fig2b_summary_json(const Fig2bOptions& opt);
Table fig3_table(const Fig3Options& opt);
Table fig4_table(const Fig4Options& opt);

std::string teleport_demo_json(const DemoOptions& opt);
std::string teleport_demo_state_json(const DemoOptions& opt);
std::string gkp_json(const GkpOptions& opt);
std::string epr_json(const EprOptions& opt);
std::string epr_state_json(const EprOptions& opt);

// Companion gnuplot script for a figure CSV written to csv_filename.
std::string gnuplot_script(const std::string& command, const Table& table,
                           const std::string& csv_filename);

}  // namespace cvtrans::cli
