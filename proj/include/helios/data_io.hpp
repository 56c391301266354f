#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "helios/light_model.hpp"

namespace helios {

using CivilDate = std::chrono::year_month_day;

/// One sensor reading in local site time.
struct IrradianceRecord {
    std::chrono::sys_seconds timestamp;
    Irradiance ghi;
};

/// The m-second control grid over the daily photoperiod window.
struct GridSpec {
    int step_seconds = 900;
    int photoperiod_start = 4 * 3600;       // seconds after local midnight
    int photoperiod_seconds = 16 * 3600;

    int num_steps() const { return photoperiod_seconds / step_seconds; }
    void validate() const;
};

struct StepSample {
    int step = 0;        // 1-based position on the control grid
    Ppfd sun_ppfd;       // s_t
    Etr sun_etr;         // etr(s_t)
};

/// A day of sunlight resampled onto the control grid.
struct StepSeries {
    CivilDate date{};
    int month = 0;
    int step_seconds = 0;
    std::vector<StepSample> values;
};

/// Per-step electricity price in cent/kWh, length num_steps().
struct PriceSchedule {
    std::vector<double> cent_per_kwh;
};

struct DatasetSplit {
    std::vector<StepSeries> train;
    std::vector<StepSeries> test;
    int month = 0;
};

/// Parse failure tied to a specific line of an input file.
struct IngestError : std::runtime_error {
    IngestError(const std::string& msg, int line_number)
        : std::runtime_error(msg), line(line_number) {}
    int line = 0;
};

/// Raised when sensor records leave control-grid steps without samples.
struct GapError : std::runtime_error {
    GapError(const std::string& msg, std::vector<int> steps)
        : std::runtime_error(msg), missing_steps(std::move(steps)) {}
    std::vector<int> missing_steps;
};

/// Reads a `timestamp,ghi_w_m2` CSV; records come back chronologically
/// sorted and strictly increasing in time. Malformed rows raise IngestError
/// with the offending line number.
std::vector<IrradianceRecord> load_irradiance_csv(const std::filesystem::path& path);

/// Loads and merges every *.csv under a directory.
std::vector<IrradianceRecord> load_irradiance_dir(const std::filesystem::path& dir);

/// Distinct calendar dates present in a chronologically sorted record set.
std::vector<CivilDate> distinct_dates(const std::vector<IrradianceRecord>& records);

/// Resamples GHI onto the control grid for one day by averaging the samples
/// inside each step, then converts to PPFD and ETR. Single missing samples
/// on the native input grid are linearly interpolated; anything wider than
/// one control step raises GapError naming the uncovered steps.
StepSeries build_step_series(const std::vector<IrradianceRecord>& records,
                             CivilDate date, const GridSpec& grid,
                             double conversion_factor,
                             const PhotosynthesisParams& params);

/// build_step_series for every date of `month` within `years` present in
/// the records.
std::vector<StepSeries> build_month_series(const std::vector<IrradianceRecord>& records,
                                           int month, const std::vector<int>& years,
                                           const GridSpec& grid,
                                           double conversion_factor,
                                           const PhotosynthesisParams& params);

/// Partitions day series into train/test by calendar year, filtered to one
/// month. Year sets must be nonempty and disjoint.
DatasetSplit split_by_years(const std::vector<StepSeries>& series,
                            const std::vector<int>& train_years,
                            const std::vector<int>& test_years, int month);

/// Price CSV with header `hour,cent_per_kwh` (24 rows, expanded to steps by
/// the hour containing each step start) or `step,cent_per_kwh` (one row per
/// control step).
PriceSchedule load_price_csv(const std::filesystem::path& path, const GridSpec& grid);

PriceSchedule uniform_prices(const GridSpec& grid, double cent_per_kwh);

// Small calendar helpers shared by the pipeline.
int year_of(CivilDate d);
int month_of(CivilDate d);
std::string format_date(CivilDate d);
std::string format_timestamp(std::chrono::sys_seconds t);

}  // namespace helios
