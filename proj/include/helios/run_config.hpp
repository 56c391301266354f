#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "helios/bnn.hpp"
#include "helios/controller.hpp"

namespace helios {

/// Everything a command run needs, loadable from a JSON file so campaigns
/// are reproducible from a committed artifact. Flag overrides are applied
/// on top by the CLI.
struct RunConfig {
    std::filesystem::path data_dir = "data/synthetic";
    std::filesystem::path price_file;  // empty: uniform 10 cent/kWh
    std::filesystem::path model_dir = "models";
    std::filesystem::path output_dir = "out";

    ControlConfig control;
    double watts_to_ppfd = kDefaultWattsToPpfd;

    std::vector<int> months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<int> train_years;
    std::vector<int> test_years;
    int test_days_per_month = 3;

    BnnConfig bnn;
    int markov_bins = 10;
    double markov_alpha = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Raised for unreadable files, malformed JSON, or unknown keys.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace helios
