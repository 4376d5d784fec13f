#pragma once

#include <string>

namespace netrecon {

struct CliOptions {
    std::string config_path;
    int threads = 1;
};

// Subcommand bodies; each reads a JSON config, writes its output files next
// to the configured prefix, and throws config_error / data_error /
// numeric_error on failure.
void cmd_generate(const CliOptions& opt);
void cmd_reconstruct(const CliOptions& opt);
void cmd_sample(const CliOptions& opt);
void cmd_compare(const CliOptions& opt);
void cmd_bench_scaling(const CliOptions& opt);

// Parses argv, dispatches, and maps failures onto the exit-code contract:
// 0 ok, 2 bad config, 3 bad data, 4 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace netrecon
