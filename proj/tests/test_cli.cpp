#include "cli/commands.hpp"
#include "cli/options.hpp"

#include "cvtrans/capacity.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace cvtrans;
using namespace cvtrans::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cvtrans_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string& product(const Products& p, const std::string& path) {
    for (const auto& [name, content] : p.files) {
        if (name == path) return content;
    }
    REQUIRE(false);
    static std::string empty;
    return empty;
}

std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           std::vector<std::string>* header = nullptr) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) break;  // trailing summary block on stdout
        std::istringstream cells(line);
        std::string cell;
        if (first) {
            if (header) {
                while (std::getline(cells, cell, ',')) header->push_back(cell);
            }
            first = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

int run_main(std::vector<std::string> args) {
    std::vector<char*> argv;
    static char prog[] = "cvtrans";
    argv.push_back(prog);
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("fig2a table contents") {
    const Products p = run_command_line({"fig2a"});
    std::vector<std::string> header;
    const auto rows = parse_csv(p.to_stdout, &header);
    CHECK(header == std::vector<std::string>{"eta", "q_direct", "q_lb_10db", "q_ub_10db",
                                             "q_lb_20db", "q_ub_20db"});
    REQUIRE(rows.size() == 99);

    // eta = 0.60 sits at index 59.
    const auto& row = rows[59];
    CHECK(row[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(row[1] == doctest::Approx(0.5849625007211562).epsilon(1e-12));
    CHECK(row[2] == doctest::Approx(1.8497862094716147).epsilon(1e-12));

    for (const auto& r : rows) {
        if (r[0] <= 0.5) CHECK(r[1] == 0.0);
    }
    // eta <-> 1-eta pairs carry identical protocol bounds.
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& mirror = rows[rows.size() - 1 - i];
        CHECK(rows[i][2] == doctest::Approx(mirror[2]).epsilon(1e-14));
        CHECK(rows[i][4] == doctest::Approx(mirror[4]).epsilon(1e-14));
    }
}

TEST_CASE("fig2b table and summary") {
    TempDir tmp;
    const std::string out = tmp.file("fig2b.csv");
    const Products p = run_command_line({"fig2b", "--out", out});
    const auto rows = parse_csv(product(p, out));
    REQUIRE(rows.size() == 251);

    nlohmann::json summary =
        nlohmann::json::parse(product(p, tmp.file("fig2b.summary.json")));
    const double g_star_db = summary.at("g_star_db").get<double>();
    CHECK(g_star_db == doctest::Approx(4.431588653834676).epsilon(1e-12));
    CHECK(summary.at("g_star_adv_db").get<double>() ==
          doctest::Approx(6.192501244391488).epsilon(1e-12));

    const double slope_per_db = 1.0 / (10.0 * std::log10(2.0));
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i][0] < g_star_db) CHECK(rows[i][1] == 0.0);
        if (rows[i][1] > 0.0 && rows[i + 1][1] > 0.0) {
            const double slope = (rows[i + 1][1] - rows[i][1]) / 0.1;
            CHECK(slope == doctest::Approx(slope_per_db).epsilon(1e-9));
        }
    }
}

TEST_CASE("fig3 thresholds") {
    const Products p =
        run_command_line({"fig3", "--eta-min", "0.1", "--eta-max", "0.9", "--eta-step", "0.1"});
    const auto rows = parse_csv(p.to_stdout);
    REQUIRE(rows.size() == 9);
    for (const auto& row : rows) {
        const double eta = row[0];
        CHECK(std::abs(row[1] - db_from_gain(g_star(eta))) < 1e-6);
        CHECK(std::abs(row[3] - db_from_gain(g_star_adv(eta))) < 1e-6);
        CHECK(row[2] < row[1]);  // optimistic below guaranteed
        if (eta <= 0.5) {
            CHECK(row[3] == row[1]);
            CHECK(row[4] == row[2]);
        }
    }
    CHECK(std::abs(rows[4][1] - 4.342944819032518) < 1e-6);
    CHECK(std::abs(rows[4][2] - 1.195) < 0.005);
}

TEST_CASE("fig4 mode b grid") {
    const Products p = run_command_line({"fig4", "--mode", "b"});
    const auto rows = parse_csv(p.to_stdout);
    REQUIRE(rows.size() == 101 * 101);

    double at_corner = -1.0, at_paper_corner = -1.0;
    for (const auto& row : rows) {
        if (std::abs(row[0] - 1.0) < 1e-9 && std::abs(row[1] - 0.71) < 1e-9)
            at_corner = row[2];
        if (std::abs(row[0] - 0.95) < 1e-9 && std::abs(row[1] - 0.71) < 1e-9)
            at_paper_corner = row[2];
    }
    CHECK(at_corner == doctest::Approx(0.027234216885952733).epsilon(1e-9));
    CHECK(at_paper_corner == 0.0);

    // The positive region is upward-closed along both kappa axes.
    for (int i = 0; i < 101; ++i) {
        bool seen_positive_row = false, seen_positive_col = false;
        for (int k = 0; k < 101; ++k) {
            const double along_ks = rows[i * 101 + k][2];
            if (seen_positive_row) CHECK(along_ks > 0.0);
            seen_positive_row = seen_positive_row || along_ks > 0.0;
            const double along_kh = rows[k * 101 + i][2];
            if (seen_positive_col) CHECK(along_kh > 0.0);
            seen_positive_col = seen_positive_col || along_kh > 0.0;
        }
    }
}

TEST_CASE("fig4 mode a reduces to fig2b on the lossless line") {
    const Products grid = run_command_line(
        {"fig4", "--mode", "a", "--kappa-min", "1", "--kappa-max", "1", "--gain-db-max", "10"});
    const Products curve = run_command_line(
        {"fig2b", "--eta", "0.5", "--gain-db-max", "10"});
    const auto grid_rows = parse_csv(grid.to_stdout);
    const auto curve_rows = parse_csv(curve.to_stdout);
    REQUIRE(grid_rows.size() == curve_rows.size());
    for (std::size_t i = 0; i < grid_rows.size(); ++i) {
        CHECK(grid_rows[i][2] == curve_rows[i][1]);
    }
}

TEST_CASE("teleport-demo report") {
    const Products p = run_command_line(
        {"teleport-demo", "--samples", "20000", "--seed", "11", "--threads", "2"});
    const nlohmann::json j = nlohmann::json::parse(p.to_stdout);
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("analytic_channel").at("var_q").get<double>() ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(j.at("mc_estimate").at("noise_cov").size() == 2);
    CHECK(j.at("std_errors").at("mean_gain").size() == 2);
    CHECK(j.at("samples_per_probe").get<long long>() == 20000);
}

TEST_CASE("gkp report") {
    const Products p =
        run_command_line({"gkp", "--samples", "100000", "--seed", "3"});
    const nlohmann::json j = nlohmann::json::parse(p.to_stdout);
    CHECK(j.at("l_q").get<double>() == doctest::Approx(5.0132565492620005).epsilon(1e-12));
    CHECK(j.at("l_p").get<double>() == doctest::Approx(5.0132565492620005).epsilon(1e-12));
    const double diff =
        std::abs(j.at("p_mc").get<double>() - j.at("p_bound").get<double>());
    CHECK(diff <= 3.0 * j.at("std_error").get<double>());
}

TEST_CASE("epr report and state dump") {
    TempDir tmp;
    const std::string state_path = tmp.file("epr_state.json");
    const Products p = run_command_line({"epr", "--dump-state", state_path});
    const nlohmann::json j = nlohmann::json::parse(p.to_stdout);
    CHECK(j.at("var_q_minus").get<double>() == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(j.at("var_p_plus").get<double>() == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(j.at("var_q_plus").get<double>() == doctest::Approx(10.0).epsilon(1e-10));

    const nlohmann::json st = nlohmann::json::parse(product(p, state_path));
    CHECK(st.at("num_modes").get<int>() == 2);
    CHECK(st.at("mean").size() == 4);
    CHECK(st.at("cov").size() == 4);
    CHECK(st.at("cov").at(0).size() == 4);
}

TEST_CASE("outputs are deterministic") {
    const Products a = run_command_line({"teleport-demo", "--samples", "5000", "--seed", "42"});
    const Products b = run_command_line({"teleport-demo", "--samples", "5000", "--seed", "42"});
    CHECK(a.to_stdout == b.to_stdout);

    const Products c = run_command_line({"fig2a", "--eta-step", "0.05"});
    const Products d = run_command_line({"fig2a", "--eta-step", "0.05", "--threads", "3"});
    CHECK(c.to_stdout == d.to_stdout);

    const Products e = run_command_line({"teleport-demo", "--samples", "5000", "--seed", "43"});
    CHECK(a.to_stdout != e.to_stdout);
}

TEST_CASE("csv shape") {
    const Products p = run_command_line({"fig2a", "--eta-step", "0.2"});
    CHECK(p.to_stdout.rfind("eta,q_direct,", 0) == 0);
    CHECK(p.to_stdout.find('\r') == std::string::npos);
    CHECK(p.to_stdout.back() == '\n');

    const Products j = run_command_line({"fig2a", "--eta-step", "0.2", "--format", "json"});
    const nlohmann::json parsed = nlohmann::json::parse(j.to_stdout);
    CHECK(parsed.at("columns").size() == 6);
    CHECK(parsed.at("rows").size() == 5);
}

TEST_CASE("gnuplot companion script") {
    TempDir tmp;
    const std::string out = tmp.file("fig2b.csv");
    const Products p = run_command_line({"fig2b", "--out", out, "--gnuplot"});
    const std::string& script = product(p, tmp.file("fig2b.gp"));
    CHECK(script.find("set datafile separator ','") != std::string::npos);
    CHECK(script.find("fig2b.csv") != std::string::npos);

    CHECK_THROWS_AS(run_command_line({"fig2b", "--gnuplot"}), config_error);
    CHECK_THROWS_AS(run_command_line({"fig2b", "--gnuplot", "--format", "json", "--out", out}),
                    config_error);
}

TEST_CASE("config file merging") {
    TempDir tmp;
    const std::string cfg = tmp.file("run.json");
    {
        std::ofstream f(cfg);
        f << R"({"eta": 0.3, "gain_db": 13.0})";
    }
    const Products p = run_command_line({"epr", "--config", cfg, "--gain-db", "10"});
    const nlohmann::json j = nlohmann::json::parse(p.to_stdout);
    CHECK(j.at("eta").get<double>() == 0.3);       // from config
    CHECK(j.at("gain_db").get<double>() == 10.0);  // flag wins

    {
        std::ofstream f(cfg);
        f << R"({"nonsense": 1})";
    }
    CHECK_THROWS_AS(run_command_line({"epr", "--config", cfg}), config_error);

    {
        std::ofstream f(cfg);
        f << R"({"eta": "not a number"})";
    }
    CHECK_THROWS_AS(run_command_line({"epr", "--config", cfg}), config_error);
}

TEST_CASE("domain guards exit with code 2 and leave no file") {
    TempDir tmp;
    const std::string out = tmp.file("never.csv");
    CHECK(run_main({"fig2b", "--eta", "1.5", "--out", out}) == 2);
    CHECK(!fs::exists(out));
    CHECK(run_main({"fig2a", "--eta-step", "0", "--out", out}) == 2);
    CHECK(!fs::exists(out));
    CHECK(run_main({"epr", "--gain-db", "-3", "--out", out}) == 2);
    CHECK(!fs::exists(out));
    CHECK(run_main({"no-such-command"}) == 2);
}

TEST_CASE("installed binary round trip") {
    TempDir tmp;
    const std::string out_a = tmp.file("a.csv");
    const std::string out_b = tmp.file("b.csv");
    const std::string base = std::string(CVTRANS_BIN) + " fig2a --eta-step 0.1 --out ";
    REQUIRE(std::system((base + out_a).c_str()) == 0);
    REQUIRE(std::system((base + out_b).c_str()) == 0);
    CHECK(slurp(out_a) == slurp(out_b));

    const int bad = std::system((std::string(CVTRANS_BIN) + " fig2b --eta 2 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(bad) == 2);
}
