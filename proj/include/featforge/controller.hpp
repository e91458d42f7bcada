#pragma once

#include <string>

namespace featforge {

// Full pipeline: parse config, load data, extract, export, train, report.
// Returns the process exit code; failures are logged to stderr.
int run(const std::string& config_path);

void list_features();
void list_classifiers();

// `featforge run <config.ini> | list-features | list-classifiers`.
int run_cli(int argc, char** argv);

}  // namespace featforge
