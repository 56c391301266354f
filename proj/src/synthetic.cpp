#include "helios/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "helios/seeds.hpp"

namespace helios {

namespace chr = std::chrono;

namespace {

struct DayShape {
    double peak_watts = 0.0;
    double sunrise_sec = 0.0;   // seconds after local midnight
    double daylength_sec = 0.0;
};

int day_of_year(CivilDate date) {
    const auto first = chr::sys_days{date.year() / chr::January / 1};
    return static_cast<int>((chr::sys_days{date} - first).count()) + 1;
}

DayShape shape_for(const SyntheticConfig& config, CivilDate date) {
    // Annual cycle peaking near the June solstice (day 172).
    const double phase =
        2.0 * std::numbers::pi * (day_of_year(date) - 172) / 365.25;
    const double season = std::cos(phase);

    const double peak_mid = 0.5 * (config.peak_watts_summer + config.peak_watts_winter);
    const double peak_span = 0.5 * (config.peak_watts_summer - config.peak_watts_winter);
    const double len_mid = 0.5 * (config.daylength_summer_h + config.daylength_winter_h);
    const double len_span = 0.5 * (config.daylength_summer_h - config.daylength_winter_h);

    DayShape shape;
    shape.peak_watts = peak_mid + peak_span * season;
    shape.daylength_sec = (len_mid + len_span * season) * 3600.0;
    shape.sunrise_sec = 12.0 * 3600.0 - shape.daylength_sec / 2.0;

    if (!config.identical_days && config.amplitude_jitter > 0.0) {
        const auto day_tag = static_cast<std::uint64_t>(
            chr::sys_days{date}.time_since_epoch().count());
        std::mt19937_64 rng(mix_seed(config.seed, day_tag));
        std::uniform_real_distribution<double> jitter(1.0 - config.amplitude_jitter,
                                                      1.0 + config.amplitude_jitter);
        shape.peak_watts *= jitter(rng);
    }
    return shape;
}

double ghi_at(const DayShape& shape, double sec_of_day) {
    const double rel = sec_of_day - shape.sunrise_sec;
    if (rel <= 0.0 || rel >= shape.daylength_sec) return 0.0;
    return shape.peak_watts * std::sin(std::numbers::pi * rel / shape.daylength_sec);
}

void append_day(const SyntheticConfig& config, CivilDate date,
                std::vector<IrradianceRecord>& out) {
    const CivilDate shape_date =
        config.identical_days ? CivilDate{date.year(), date.month(), chr::day{15}} : date;
    const DayShape shape = shape_for(config, shape_date);
    const auto midnight = chr::sys_days{date};
    for (int sec = 0; sec < 24 * 3600; sec += config.sample_seconds) {
        IrradianceRecord rec;
        rec.timestamp = midnight + chr::seconds{sec};
        rec.ghi = Irradiance(ghi_at(shape, sec));
        out.push_back(rec);
    }
}

std::vector<CivilDate> month_dates(int year, int month) {
    std::vector<CivilDate> dates;
    const auto ym = chr::year{year} / chr::month{static_cast<unsigned>(month)};
    const unsigned last = unsigned((ym / chr::last).day());
    for (unsigned d = 1; d <= last; ++d)
        dates.push_back(CivilDate{ym / chr::day{d}});
    return dates;
}

}  // namespace

void SyntheticConfig::validate() const {
    if (months.empty()) throw std::invalid_argument("SyntheticConfig: no months");
    for (int m : months)
        if (m < 1 || m > 12)
            throw std::invalid_argument("SyntheticConfig: month out of range");
    if (!(peak_watts_summer >= 0.0) || !(peak_watts_winter >= 0.0))
        throw std::invalid_argument("SyntheticConfig: peak watts must be >= 0");
    if (!(daylength_summer_h > 0.0) || !(daylength_winter_h > 0.0) ||
        daylength_summer_h > 24.0 || daylength_winter_h > 24.0)
        throw std::invalid_argument("SyntheticConfig: daylength must be in (0, 24] hours");
    if (!(amplitude_jitter >= 0.0) || amplitude_jitter >= 1.0)
        throw std::invalid_argument("SyntheticConfig: jitter must be in [0, 1)");
    if (sample_seconds < 1 || sample_seconds > 3600)
        throw std::invalid_argument("SyntheticConfig: sample_seconds out of range");
}

std::vector<IrradianceRecord> synthetic_records(const SyntheticConfig& config) {
    config.validate();
    std::vector<int> months = config.months;
    std::sort(months.begin(), months.end());
    months.erase(std::unique(months.begin(), months.end()), months.end());

    std::vector<IrradianceRecord> out;
    for (int m : months)
        for (CivilDate date : month_dates(config.year, m))
            append_day(config, date, out);
    return out;
}

std::vector<StepSeries> synthetic_month(const SyntheticConfig& config, int month,
                                        const GridSpec& grid,
                                        double conversion_factor,
                                        const PhotosynthesisParams& params) {
    SyntheticConfig one = config;
    one.months = {month};
    const std::vector<IrradianceRecord> records = synthetic_records(one);
    std::vector<StepSeries> series;
    for (CivilDate date : distinct_dates(records))
        series.push_back(
            build_step_series(records, date, grid, conversion_factor, params));
    return series;
}

void write_synthetic_corpus(const SyntheticConfig& config,
                            const std::filesystem::path& dir) {
    config.validate();
    std::filesystem::create_directories(dir);
    for (int m : config.months) {
        SyntheticConfig one = config;
        one.months = {m};
        const std::vector<IrradianceRecord> records = synthetic_records(one);

        char name[40];
        std::snprintf(name, sizeof name, "synthetic_%04d_%02d.csv", config.year, m);
        const std::filesystem::path path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        out << "timestamp,ghi_w_m2\n";
        char row[64];
        for (const IrradianceRecord& rec : records) {
            std::snprintf(row, sizeof row, "%s,%.12g\n",
                          format_timestamp(rec.timestamp).c_str(), rec.ghi.value);
            out << row;
        }
        if (!out) throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace helios
