#include "helios/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace helios {

namespace chr = std::chrono;

void GridSpec::validate() const {
    if (step_seconds <= 0)
        throw std::invalid_argument("GridSpec: step_seconds must be > 0");
    if (photoperiod_seconds <= 0 || photoperiod_seconds % step_seconds != 0)
        throw std::invalid_argument("GridSpec: photoperiod must be a multiple of the step");
    if (photoperiod_start < 0 || photoperiod_start + photoperiod_seconds > 86400)
        throw std::invalid_argument("GridSpec: photoperiod window must fit within one day");
}

int year_of(CivilDate d) { return int(d.year()); }
int month_of(CivilDate d) { return int(unsigned(d.month())); }

std::string format_date(CivilDate d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()),
                  unsigned(d.month()), unsigned(d.day()));
    return buf;
}

std::string format_timestamp(chr::sys_seconds t) {
    const auto day = chr::floor<chr::days>(t);
    const CivilDate ymd{day};
    const auto tod = chr::hh_mm_ss{t - day};
    char buf[24];
    std::snprintf(buf, sizeof buf, "%sT%02ld:%02ld:%02ld", format_date(ymd).c_str(),
                  long(tod.hours().count()), long(tod.minutes().count()),
                  long(tod.seconds().count()));
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Accepts YYYY-MM-DD{T or space}HH:MM[:SS].
bool parse_timestamp(const std::string& text, chr::sys_seconds& out) {
    int y, mo, d, h, mi, se = 0;
    char sep;
    const int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d,
                              &sep, &h, &mi, &se);
    if (n < 6 || (sep != 'T' && sep != ' ' && sep != 't')) return false;
    const CivilDate ymd{chr::year{y}, chr::month{unsigned(mo)}, chr::day{unsigned(d)}};
    if (!ymd.ok()) return false;
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 59) return false;
    out = chr::sys_days{ymd} + chr::hours{h} + chr::minutes{mi} + chr::seconds{se};
    return true;
}

}  // namespace

std::vector<IrradianceRecord> load_irradiance_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open irradiance file: " + path.string());

    std::vector<IrradianceRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "timestamp,ghi_w_m2")
                throw IngestError(path.string() + ":1: expected header 'timestamp,ghi_w_m2', got '" +
                                      line + "'",
                                  1);
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw IngestError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected 'timestamp,ghi_w_m2' row",
                              line_no);
        chr::sys_seconds ts;
        if (!parse_timestamp(trim(line.substr(0, comma)), ts))
            throw IngestError(path.string() + ":" + std::to_string(line_no) +
                                  ": unparsable timestamp '" + trim(line.substr(0, comma)) + "'",
                              line_no);
        const std::string ghi_text = trim(line.substr(comma + 1));
        double ghi;
        try {
            std::size_t used = 0;
            ghi = std::stod(ghi_text, &used);
            if (used != ghi_text.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw IngestError(path.string() + ":" + std::to_string(line_no) +
                                  ": unparsable ghi_w_m2 '" + ghi_text + "'",
                              line_no);
        }
        if (!(ghi >= 0.0) || !std::isfinite(ghi))
            throw IngestError(path.string() + ":" + std::to_string(line_no) +
                                  ": ghi_w_m2 must be >= 0, got " + ghi_text,
                              line_no);
        records.push_back({ts, Irradiance(ghi)});
    }

    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].timestamp == records[i - 1].timestamp)
            throw std::runtime_error(path.string() + ": duplicate timestamp " +
                                     format_timestamp(records[i].timestamp));
    return records;
}

std::vector<IrradianceRecord> load_irradiance_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("no .csv files under " + dir.string());

    std::vector<IrradianceRecord> all;
    for (const auto& f : files) {
        auto part = load_irradiance_csv(f);
        all.insert(all.end(), part.begin(), part.end());
    }
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return all;
}

std::vector<CivilDate> distinct_dates(const std::vector<IrradianceRecord>& records) {
    std::vector<CivilDate> dates;
    for (const auto& r : records) {
        const CivilDate d{chr::floor<chr::days>(r.timestamp)};
        if (dates.empty() || dates.back() != d) dates.push_back(d);
    }
    return dates;
}

StepSeries build_step_series(const std::vector<IrradianceRecord>& records,
                             CivilDate date, const GridSpec& grid,
                             double conversion_factor,
                             const PhotosynthesisParams& params) {
    grid.validate();
    params.validate();
    if (!(conversion_factor > 0.0))
        throw std::invalid_argument("build_step_series: conversion factor must be > 0");

    const auto window_start =
        chr::sys_days{date} + chr::seconds{grid.photoperiod_start};
    const auto window_end = window_start + chr::seconds{grid.photoperiod_seconds};
    const int T = grid.num_steps();

    // Pull the day's window (with one step of slack for interpolation).
    std::vector<std::pair<double, double>> samples;  // (sec from window start, ghi)
    for (const auto& r : records) {
        if (r.timestamp < window_start - chr::seconds{grid.step_seconds}) continue;
        if (r.timestamp >= window_end + chr::seconds{grid.step_seconds}) break;
        samples.emplace_back(
            chr::duration_cast<chr::seconds>(r.timestamp - window_start).count(),
            r.ghi.value);
    }
    if (samples.empty()) {
        std::vector<int> missing(T);
        for (int t = 0; t < T; ++t) missing[t] = t + 1;
        throw GapError("build_step_series: no records cover " + format_date(date) +
                           " photoperiod window",
                       std::move(missing));
    }

    // Native input resolution: median spacing between consecutive samples.
    std::vector<double> deltas;
    for (std::size_t i = 1; i < samples.size(); ++i)
        deltas.push_back(samples[i].first - samples[i - 1].first);
    double native = grid.step_seconds;
    if (!deltas.empty()) {
        std::vector<double> sorted = deltas;
        std::sort(sorted.begin(), sorted.end());
        native = sorted[sorted.size() / 2];
    }
    if (native > grid.step_seconds)
        throw std::runtime_error("build_step_series: input resolution " +
                                 std::to_string(native) + " s coarser than the control step");

    // A single missing native sample is filled by linear interpolation.
    std::vector<std::pair<double, double>> filled;
    filled.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0) {
            const double gap = samples[i].first - samples[i - 1].first;
            if (gap > 1.5 * native && gap <= 2.5 * native && gap <= grid.step_seconds) {
                const double t_mid = samples[i - 1].first + native;
                const double w = (t_mid - samples[i - 1].first) / gap;
                filled.emplace_back(t_mid, (1.0 - w) * samples[i - 1].second +
                                               w * samples[i].second);
            }
        }
        filled.push_back(samples[i]);
    }

    // Average within each step.
    std::vector<double> sums(T, 0.0);
    std::vector<int> counts(T, 0);
    for (const auto& [sec, ghi] : filled) {
        if (sec < 0.0 || sec >= grid.photoperiod_seconds) continue;
        const int step = static_cast<int>(sec / grid.step_seconds);
        sums[step] += ghi;
        counts[step] += 1;
    }

    std::vector<int> missing;
    for (int t = 0; t < T; ++t)
        if (counts[t] == 0) missing.push_back(t + 1);
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "build_step_series: " << format_date(date) << " has no samples for "
            << missing.size() << " step(s):";
        for (int s : missing) msg << ' ' << s;
        throw GapError(msg.str(), missing);
    }

    StepSeries series;
    series.date = date;
    series.month = month_of(date);
    series.step_seconds = grid.step_seconds;
    series.values.reserve(T);
    for (int t = 0; t < T; ++t) {
        const Ppfd s = watts_to_ppfd(Irradiance(sums[t] / counts[t]), conversion_factor);
        series.values.push_back({t + 1, s, etr_from_ppfd(s, params)});
    }
    return series;
}

std::vector<StepSeries> build_month_series(const std::vector<IrradianceRecord>& records,
                                           int month, const std::vector<int>& years,
                                           const GridSpec& grid,
                                           double conversion_factor,
                                           const PhotosynthesisParams& params) {
    const std::set<int> year_set(years.begin(), years.end());
    std::vector<StepSeries> out;
    for (const CivilDate d : distinct_dates(records)) {
        if (month_of(d) != month) continue;
        if (!year_set.empty() && !year_set.count(year_of(d))) continue;
        out.push_back(build_step_series(records, d, grid, conversion_factor, params));
    }
    return out;
}

DatasetSplit split_by_years(const std::vector<StepSeries>& series,
                            const std::vector<int>& train_years,
                            const std::vector<int>& test_years, int month) {
    if (train_years.empty() || test_years.empty())
        throw std::invalid_argument("split_by_years: year sets must be nonempty");
    const std::set<int> train_set(train_years.begin(), train_years.end());
    const std::set<int> test_set(test_years.begin(), test_years.end());
    for (int y : train_set)
        if (test_set.count(y))
            throw std::invalid_argument("split_by_years: year " + std::to_string(y) +
                                        " appears in both train and test sets");

    DatasetSplit split;
    split.month = month;
    for (const auto& s : series) {
        if (s.month != month) continue;
        const int y = year_of(s.date);
        if (train_set.count(y)) split.train.push_back(s);
        else if (test_set.count(y)) split.test.push_back(s);
    }
    const auto by_date = [](const StepSeries& a, const StepSeries& b) {
        return chr::sys_days{a.date} < chr::sys_days{b.date};
    };
    std::sort(split.train.begin(), split.train.end(), by_date);
    std::sort(split.test.begin(), split.test.end(), by_date);
    return split;
}

PriceSchedule load_price_csv(const std::filesystem::path& path, const GridSpec& grid) {
    grid.validate();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open price file: " + path.string());

    std::string header;
    std::getline(in, header);
    header = trim(header);
    const bool hourly = header == "hour,cent_per_kwh";
    if (!hourly && header != "step,cent_per_kwh")
        throw IngestError(path.string() +
                              ":1: expected header 'hour,cent_per_kwh' or 'step,cent_per_kwh'",
                          1);

    std::map<int, double> rows;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        int key;
        double price;
        if (std::sscanf(line.c_str(), "%d,%lf", &key, &price) != 2)
            throw IngestError(path.string() + ":" + std::to_string(line_no) +
                                  ": unparsable price row '" + line + "'",
                              line_no);
        if (!(price > 0.0))
            throw IngestError(path.string() + ":" + std::to_string(line_no) +
                                  ": price must be > 0",
                              line_no);
        if (!rows.emplace(key, price).second)
            throw IngestError(path.string() + ":" + std::to_string(line_no) +
                                  ": duplicate key " + std::to_string(key),
                              line_no);
    }

    const int T = grid.num_steps();
    PriceSchedule schedule;
    schedule.cent_per_kwh.resize(T);
    if (hourly) {
        if (rows.size() != 24 || rows.begin()->first != 0 || rows.rbegin()->first != 23)
            throw std::runtime_error(path.string() + ": hourly schedule needs hours 0..23");
        for (int t = 0; t < T; ++t) {
            const int hour = (grid.photoperiod_start + t * grid.step_seconds) / 3600 % 24;
            schedule.cent_per_kwh[t] = rows.at(hour);
        }
    } else {
        if (static_cast<int>(rows.size()) != T || rows.begin()->first != 1 ||
            rows.rbegin()->first != T)
            throw std::runtime_error(path.string() + ": step schedule needs steps 1.." +
                                     std::to_string(T));
        for (int t = 0; t < T; ++t) schedule.cent_per_kwh[t] = rows.at(t + 1);
    }
    return schedule;
}

PriceSchedule uniform_prices(const GridSpec& grid, double cent_per_kwh) {
    grid.validate();
    if (!(cent_per_kwh > 0.0))
        throw std::invalid_argument("uniform_prices: price must be > 0");
    return PriceSchedule{std::vector<double>(grid.num_steps(), cent_per_kwh)};
}

}  // namespace helios
