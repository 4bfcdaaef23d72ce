#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvtrans::cli {

// Bad flags, bad config values, out-of-domain parameters. Exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a command run wants written out. Files are fully materialized
// before anything touches the filesystem, so failed runs leave no partial
// output behind.
struct Products {
    std::vector<std::pair<std::string, std::string>> files;  // (path, content)
    std::string to_stdout;
};

// Parses and executes one command line (without the program name).
// Throws config_error / std::invalid_argument for exit code 2 and
// cvtrans::numerical_error for exit code 3.
Products run_command_line(const std::vector<std::string>& args);

// argv wrapper around run_command_line: writes products, maps exceptions to
// exit codes (0 ok, 2 config error, 3 numerical failure).
int main_entry(int argc, char** argv);

}  // namespace cvtrans::cli
