#include "cli/options.hpp"

int main(int argc, char** argv) { return cvtrans::cli::main_entry(argc, argv); }
