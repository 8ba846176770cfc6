#pragma once

#include <string>
#include <utility>
#include <vector>

namespace cli {

struct Options {
    std::string config;
    std::string out; // empty: current directory
    int workers = 1;
    std::vector<std::pair<std::string, double>> tolerances;

    // fit without a config file
    std::vector<std::string> series;
    std::string geometry = "chord";
    int total_length = 0;
    int la_min = -1;
    int la_max = -1;
};

// Each returns the process exit status: 0 success, 2 numerical failure. Validation problems throw.
int cmd_model_list(const Options& o);
int cmd_entanglement(const Options& o);
int cmd_fit(const Options& o);
int cmd_dynamics(const Options& o);
int cmd_duality(const Options& o);
int cmd_oracle(const Options& o);

} // namespace cli
