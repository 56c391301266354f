#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "helios/data_io.hpp"

namespace helios {

/// Clear-sky-like GHI generator: each day is a half-sine centered on local
/// noon whose peak and daylength swing over the year. Deterministic given
/// the seed; per-day amplitude jitter is derived from the calendar date,
/// not from generation order.
struct SyntheticConfig {
    int year = 2020;
    std::vector<int> months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    double peak_watts_summer = 470.0;  // noon GHI near the June solstice
    double peak_watts_winter = 200.0;
    double daylength_summer_h = 14.0;
    double daylength_winter_h = 8.0;
    double amplitude_jitter = 0.15;    // uniform +/- fraction; 0 = clean
    /// Repeat the month's mid-month profile (jitter off) on every day, so
    /// step-to-step dynamics are exactly learnable.
    bool identical_days = false;
    int sample_seconds = 300;          // native sensor cadence
    std::uint64_t seed = 0;

    void validate() const;
};

/// Native-resolution records for every day of the configured months,
/// chronologically sorted.
std::vector<IrradianceRecord> synthetic_records(const SyntheticConfig& config);

/// Records for one month resampled onto the control grid, one series per
/// day.
std::vector<StepSeries> synthetic_month(const SyntheticConfig& config, int month,
                                        const GridSpec& grid,
                                        double conversion_factor,
                                        const PhotosynthesisParams& params);

/// Writes one `synthetic_YYYY_MM.csv` per configured month under `dir`
/// (created if absent), in the sensor CSV format the loaders read back.
void write_synthetic_corpus(const SyntheticConfig& config,
                            const std::filesystem::path& dir);

}  // namespace helios
