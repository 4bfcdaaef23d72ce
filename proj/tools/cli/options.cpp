#include "cli/options.hpp"

#include "cli/commands.hpp"
#include "cvtrans/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace cvtrans::cli {

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw config_error("config parse failure: " + std::string(e.what()));
    }
    if (!cfg.is_object()) throw config_error("config must be a flat JSON object");
    return cfg;
}

// Applies config values to options the command line left untouched and
// tracks which keys the active subcommand understands.
struct ConfigMerger {
    CLI::App* sub;
    const json* cfg;
    std::set<std::string> recognized;

    template <class T>
    void merge(const std::string& flag, T& value) {
        std::string key = flag.substr(2);
        for (auto& ch : key) {
            if (ch == '-') ch = '_';
        }
        recognized.insert(key);
        if (!cfg || sub->count(flag) > 0 || !cfg->contains(key)) return;
        try {
            value = cfg->at(key).get<T>();
        } catch (const json::exception&) {
            throw config_error("config key '" + key + "' has the wrong type");
        }
    }

    void finish() const {
        if (!cfg) return;
        for (const auto& item : cfg->items()) {
            if (!recognized.count(item.key())) {
                throw config_error("unknown config key: " + item.key());
            }
        }
    }
};

struct CommonOptions {
    std::string out;
    std::string format = "csv";
    std::string config_path;
    std::string summary_out;
    std::string dump_state;
    bool gnuplot = false;
};

void add_output_flags(CLI::App* sub, CommonOptions& c, bool table_command) {
    sub->add_option("--out", c.out, "Output path (stdout when omitted)");
    sub->add_option("--config", c.config_path, "Flat JSON config mirroring the flags");
    if (table_command) {
        sub->add_option("--format", c.format, "Output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--gnuplot", c.gnuplot, "Also emit a gnuplot script (needs --out)");
    }
}

std::string replace_extension(const std::string& path, const std::string& ext) {
    return std::filesystem::path(path).replace_extension(ext).string();
}

OutputFormat parse_format(const std::string& f) {
    return f == "json" ? OutputFormat::json : OutputFormat::csv;
}

// Routes a finished table to files/stdout according to the common options.
void emit_table(Products& out, const CommonOptions& c, const std::string& command,
                const Table& table) {
    const OutputFormat fmt = parse_format(c.format);
    if (c.gnuplot && fmt != OutputFormat::csv) {
        throw config_error("--gnuplot requires csv format");
    }
    if (c.gnuplot && c.out.empty()) {
        throw config_error("--gnuplot requires --out");
    }
    const std::string body = fmt == OutputFormat::csv ? table.to_csv() : table.to_json();
    if (c.out.empty()) {
        out.to_stdout += body;
    } else {
        out.files.emplace_back(c.out, body);
        if (c.gnuplot) {
            const std::string csv_name = std::filesystem::path(c.out).filename().string();
            out.files.emplace_back(replace_extension(c.out, ".gp"),
                                   gnuplot_script(command, table, csv_name));
        }
    }
}

void emit_text(Products& out, const CommonOptions& c, const std::string& body) {
    if (c.out.empty()) {
        out.to_stdout += body;
    } else {
        out.files.emplace_back(c.out, body);
    }
}

}  // namespace

Products run_command_line(const std::vector<std::string>& args) {
    CLI::App app{"Gaussian-state simulator for teleportation-based quantum transduction"};
    app.require_subcommand(0, 1);

    Fig2aOptions fig2a;
    Fig2bOptions fig2b;
    Fig3Options fig3;
    Fig4Options fig4;
    DemoOptions demo;
    GkpOptions gkp;
    EprOptions epr;
    CommonOptions common[7];

    CLI::App* sub_fig2a = app.add_subcommand(
        "fig2a", "Rate bounds vs device efficiency at 10 and 20 dB of squeezing");
    sub_fig2a->add_option("--eta-min", fig2a.eta_min, "Sweep start")->capture_default_str();
    sub_fig2a->add_option("--eta-max", fig2a.eta_max, "Sweep end")->capture_default_str();
    sub_fig2a->add_option("--eta-step", fig2a.eta_step, "Sweep step")->capture_default_str();
    sub_fig2a->add_option("--threads", fig2a.threads, "Worker threads (0 = auto)");
    add_output_flags(sub_fig2a, common[0], true);

    CLI::App* sub_fig2b = app.add_subcommand(
        "fig2b", "Rate bounds vs squeezing gain, with threshold markers");
    sub_fig2b->add_option("--eta", fig2b.eta, "Device efficiency")->capture_default_str();
    sub_fig2b->add_option("--gain-db-min", fig2b.gain_db_min)->capture_default_str();
    sub_fig2b->add_option("--gain-db-max", fig2b.gain_db_max)->capture_default_str();
    sub_fig2b->add_option("--gain-db-step", fig2b.gain_db_step)->capture_default_str();
    sub_fig2b->add_option("--threads", fig2b.threads, "Worker threads (0 = auto)");
    sub_fig2b->add_option("--summary-out", common[1].summary_out,
                          "Path for the threshold-marker JSON");
    add_output_flags(sub_fig2b, common[1], true);

    CLI::App* sub_fig3 = app.add_subcommand(
        "fig3", "Squeezing thresholds in dB vs device efficiency");
    sub_fig3->add_option("--eta-min", fig3.eta_min)->capture_default_str();
    sub_fig3->add_option("--eta-max", fig3.eta_max)->capture_default_str();
    sub_fig3->add_option("--eta-step", fig3.eta_step)->capture_default_str();
    sub_fig3->add_option("--threads", fig3.threads, "Worker threads (0 = auto)");
    add_output_flags(sub_fig3, common[2], true);

    CLI::App* sub_fig4 = app.add_subcommand(
        "fig4", "Lower bound under loss: gain/kappa (a) or kappa_h/kappa_s (b) sweep");
    sub_fig4->add_option("--mode", fig4.mode, "a or b")->check(CLI::IsMember({"a", "b"}));
    sub_fig4->add_option("--eta", fig4.eta, "Device efficiency")->capture_default_str();
    sub_fig4->add_option("--gain-db", fig4.gain_db, "Gain for mode b")->capture_default_str();
    sub_fig4->add_option("--gain-db-min", fig4.gain_db_min)->capture_default_str();
    sub_fig4->add_option("--gain-db-max", fig4.gain_db_max)->capture_default_str();
    sub_fig4->add_option("--gain-db-step", fig4.gain_db_step)->capture_default_str();
    sub_fig4->add_option("--kappa-min", fig4.kappa_min)->capture_default_str();
    sub_fig4->add_option("--kappa-max", fig4.kappa_max)->capture_default_str();
    sub_fig4->add_option("--kappa-step", fig4.kappa_step)->capture_default_str();
    sub_fig4->add_option("--threads", fig4.threads, "Worker threads (0 = auto)");
    add_output_flags(sub_fig4, common[3], true);

    CLI::App* sub_demo = app.add_subcommand(
        "teleport-demo", "Monte Carlo vs analytic channel report");
    sub_demo->add_option("--eta", demo.eta)->capture_default_str();
    sub_demo->add_option("--gain-db", demo.gain_db)->capture_default_str();
    sub_demo->add_option("--kappa-h", demo.kappa_h)->capture_default_str();
    sub_demo->add_option("--kappa-s", demo.kappa_s)->capture_default_str();
    sub_demo->add_option("--samples", demo.samples, "Trajectories per probe")
        ->capture_default_str();
    sub_demo->add_option("--seed", demo.seed)->capture_default_str();
    sub_demo->add_option("--threads", demo.threads, "Worker threads (0 = auto)");
    sub_demo->add_option("--dump-state", common[4].dump_state,
                         "Also write the averaged output state for a vacuum input");
    add_output_flags(sub_demo, common[4], false);

    CLI::App* sub_gkp = app.add_subcommand(
        "gkp", "Rectangular-lattice error bound vs Monte Carlo");
    sub_gkp->add_option("--eta", gkp.eta)->capture_default_str();
    sub_gkp->add_option("--gain-db", gkp.gain_db)->capture_default_str();
    sub_gkp->add_option("--samples", gkp.samples)->capture_default_str();
    sub_gkp->add_option("--seed", gkp.seed)->capture_default_str();
    add_output_flags(sub_gkp, common[5], false);

    CLI::App* sub_epr = app.add_subcommand("epr", "EPR variances of the resource state");
    sub_epr->add_option("--eta", epr.eta)->capture_default_str();
    sub_epr->add_option("--gain-db", epr.gain_db)->capture_default_str();
    sub_epr->add_option("--kappa-s", epr.kappa_s)->capture_default_str();
    sub_epr->add_option("--dump-state", common[6].dump_state,
                        "Also write the resource state as JSON");
    add_output_flags(sub_epr, common[6], false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        Products p;
        p.to_stdout = app.help();
        return p;
    } catch (const CLI::ParseError& e) {
        throw config_error(e.what());
    }

    CLI::App* active = nullptr;
    int idx = -1;
    CLI::App* all[] = {sub_fig2a, sub_fig2b, sub_fig3, sub_fig4, sub_demo, sub_gkp, sub_epr};
    for (int i = 0; i < 7; ++i) {
        if (all[i]->parsed()) {
            active = all[i];
            idx = i;
            break;
        }
    }
    if (!active) throw config_error("missing subcommand (see --help)");
    CommonOptions& c = common[idx];

    json cfg;
    const json* cfg_ptr = nullptr;
    if (!c.config_path.empty()) {
        cfg = load_config(c.config_path);
        cfg_ptr = &cfg;
    }
    ConfigMerger merger{active, cfg_ptr, {}};
    merger.merge("--out", c.out);
    merger.merge("--config", c.config_path);
    switch (idx) {
        case 0:
            merger.merge("--format", c.format);
            merger.merge("--gnuplot", c.gnuplot);
            merger.merge("--eta-min", fig2a.eta_min);
            merger.merge("--eta-max", fig2a.eta_max);
            merger.merge("--eta-step", fig2a.eta_step);
            merger.merge("--threads", fig2a.threads);
            break;
        case 1:
            merger.merge("--format", c.format);
            merger.merge("--gnuplot", c.gnuplot);
            merger.merge("--summary-out", c.summary_out);
            merger.merge("--eta", fig2b.eta);
            merger.merge("--gain-db-min", fig2b.gain_db_min);
            merger.merge("--gain-db-max", fig2b.gain_db_max);
            merger.merge("--gain-db-step", fig2b.gain_db_step);
            merger.merge("--threads", fig2b.threads);
            break;
        case 2:
            merger.merge("--format", c.format);
            merger.merge("--gnuplot", c.gnuplot);
            merger.merge("--eta-min", fig3.eta_min);
            merger.merge("--eta-max", fig3.eta_max);
            merger.merge("--eta-step", fig3.eta_step);
            merger.merge("--threads", fig3.threads);
            break;
        case 3:
            merger.merge("--format", c.format);
            merger.merge("--gnuplot", c.gnuplot);
            merger.merge("--mode", fig4.mode);
            merger.merge("--eta", fig4.eta);
            merger.merge("--gain-db", fig4.gain_db);
            merger.merge("--gain-db-min", fig4.gain_db_min);
            merger.merge("--gain-db-max", fig4.gain_db_max);
            merger.merge("--gain-db-step", fig4.gain_db_step);
            merger.merge("--kappa-min", fig4.kappa_min);
            merger.merge("--kappa-max", fig4.kappa_max);
            merger.merge("--kappa-step", fig4.kappa_step);
            merger.merge("--threads", fig4.threads);
            break;
        case 4:
            merger.merge("--eta", demo.eta);
            merger.merge("--gain-db", demo.gain_db);
            merger.merge("--kappa-h", demo.kappa_h);
            merger.merge("--kappa-s", demo.kappa_s);
            merger.merge("--samples", demo.samples);
            merger.merge("--seed", demo.seed);
            merger.merge("--threads", demo.threads);
            merger.merge("--dump-state", c.dump_state);
            break;
        case 5:
            merger.merge("--eta", gkp.eta);
            merger.merge("--gain-db", gkp.gain_db);
            merger.merge("--samples", gkp.samples);
            merger.merge("--seed", gkp.seed);
            break;
        default:
            merger.merge("--eta", epr.eta);
            merger.merge("--gain-db", epr.gain_db);
            merger.merge("--kappa-s", epr.kappa_s);
            merger.merge("--dump-state", c.dump_state);
            break;
    }
    merger.finish();

    Products out;
    switch (idx) {
        case 0:
            emit_table(out, c, "fig2a", fig2a_table(fig2a));
            break;
        case 1: {
            emit_table(out, c, "fig2b", fig2b_table(fig2b));
            const std::string summary = fig2b_summary_json(fig2b);
            if (!c.summary_out.empty()) {
                out.files.emplace_back(c.summary_out, summary);
            } else if (!c.out.empty()) {
                out.files.emplace_back(replace_extension(c.out, ".summary.json"), summary);
            } else {
                out.to_stdout += "\n" + summary;
            }
            break;
        }
        case 2:
            emit_table(out, c, "fig3", fig3_table(fig3));
            break;
        case 3:
            emit_table(out, c, "fig4", fig4_table(fig4));
            break;
        case 4:
            emit_text(out, c, teleport_demo_json(demo));
            if (!c.dump_state.empty()) {
                out.files.emplace_back(c.dump_state, teleport_demo_state_json(demo));
            }
            break;
        case 5:
            emit_text(out, c, gkp_json(gkp));
            break;
        default:
            emit_text(out, c, epr_json(epr));
            if (!c.dump_state.empty()) {
                out.files.emplace_back(c.dump_state, epr_state_json(epr));
            }
            break;
    }
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(target.parent_path(), ec);
    }
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw config_error("cannot write output file: " + path);
        f << content;
        if (!f) throw config_error("write failure: " + path);
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace

int main_entry(int argc, char** argv) {
    try {
        const Products products =
            run_command_line(std::vector<std::string>(argv + 1, argv + argc));
        for (const auto& [path, content] : products.files) write_file(path, content);
        if (!products.to_stdout.empty()) std::cout << products.to_stdout;
        return 0;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace cvtrans::cli
