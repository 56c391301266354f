#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "helios/controller.hpp"
#include "helios/model_store.hpp"
#include "helios/run_config.hpp"
#include "helios/seeds.hpp"
#include "helios/synthetic.hpp"

namespace {

using namespace helios;

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::ofstream open_out(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("bad ") + what + " value: " + item);
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string("empty ") + what + " list");
    return out;
}

struct CommonFlags {
    std::string config_path;
    std::string months_csv;
    std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig config =
        flags.config_path.empty() ? RunConfig{} : load_run_config(flags.config_path);
    if (!flags.months_csv.empty()) config.months = parse_int_list(flags.months_csv, "month");
    if (flags.seed) config.seed = *flags.seed;
    config.validate();
    return config;
}

PriceSchedule resolve_prices(const RunConfig& config) {
    if (config.price_file.empty()) return uniform_prices(config.control.grid, 10.0);
    return load_price_csv(config.price_file, config.control.grid);
}

std::vector<IrradianceRecord> load_records(const RunConfig& config) {
    if (!std::filesystem::is_directory(config.data_dir))
        throw std::invalid_argument("data directory not found: " + config.data_dir.string() +
                                    " (generate one with 'helios datagen')");
    return load_irradiance_dir(config.data_dir);
}

std::filesystem::path model_path(const RunConfig& config, const std::string& kind,
                                 int month) {
    char name[40];
    std::snprintf(name, sizeof name, "%s_%02d.helios", kind.c_str(), month);
    return config.model_dir / name;
}

std::vector<StepSeries> month_days(const RunConfig& config,
                                   const std::vector<IrradianceRecord>& records,
                                   int month, const std::vector<int>& years,
                                   const char* role) {
    if (years.empty())
        throw std::invalid_argument(std::string("config: no ") + role + " years set");
    std::vector<StepSeries> days =
        build_month_series(records, month, years, config.control.grid,
                           config.watts_to_ppfd, config.control.params);
    if (days.empty())
        throw std::invalid_argument("no " + std::string(role) + " days for month " +
                                    std::to_string(month) + " in " +
                                    config.data_dir.string());
    return days;
}

// ---------------------------------------------------------------- train ----

int cmd_train(const RunConfig& config, const std::string& kind) {
    const bool do_bnn = kind == "bnn" || kind == "both";
    const bool do_markov = kind == "markov" || kind == "both";
    if (!do_bnn && !do_markov)
        throw std::invalid_argument("train: --kind must be bnn, markov, or both");

    const std::vector<IrradianceRecord> records = load_records(config);
    std::filesystem::create_directories(config.model_dir);

    for (int month : config.months) {
        const std::vector<StepSeries> train_days =
            month_days(config, records, month, config.train_years, "training");

        ClimatologyProfile prior = fit_climatology(train_days);
        prior.month = month;
        const auto clim_path = model_path(config, "climatology", month);
        save_model(prior, clim_path);
        std::cout << "wrote " << clim_path.string() << " (" << train_days.size()
                  << " training days)\n";

        if (do_markov) {
            MarkovModel markov =
                fit_markov(train_days, config.markov_bins, config.markov_alpha);
            markov.month = month;
            const auto path = model_path(config, "markov", month);
            save_model(markov, path);
            std::cout << "wrote " << path.string() << "\n";
        }

        if (do_bnn) {
            BnnConfig bnn_config = config.bnn;
            bnn_config.seed = mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(month));
            BnnModel model = init_model(bnn_config);
            model.month = month;
            TrainResult result = train(std::move(model), train_days, bnn_config);
            const auto path = model_path(config, "bnn", month);
            save_model(result.model, path);

            const auto loss_path = config.model_dir /
                (std::string("bnn_") + (month < 10 ? "0" : "") +
                 std::to_string(month) + "_loss.csv");
            std::ofstream loss = open_out(loss_path);
            loss << "epoch,free_energy\n";
            for (std::size_t e = 0; e < result.loss_history.size(); ++e)
                loss << e + 1 << "," << fmt(result.loss_history[e]) << "\n";
            std::cout << "wrote " << path.string() << " (final free energy "
                      << (result.loss_history.empty() ? std::string("n/a")
                                                      : fmt(result.loss_history.back()))
                      << ")\n";
        }
    }
    return kExitOk;
}

// ------------------------------------------------------------- simulate ----

std::vector<StrategyKind> parse_strategies(const std::string& csv) {
    std::vector<StrategyKind> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        const StrategyKind kind = strategy_from_string(item);
        if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
    }
    if (out.empty()) throw std::invalid_argument("empty strategy list");
    return out;
}

MonthCampaign assemble_month(const RunConfig& config,
                             const std::vector<IrradianceRecord>& records, int month,
                             const std::vector<StrategyKind>& strategies) {
    MonthCampaign mc;
    mc.month = month;
    mc.test_days = month_days(config, records, month, config.test_years, "test");

    const bool wants_bnn = std::find(strategies.begin(), strategies.end(),
                                     StrategyKind::Bnn) != strategies.end();
    const bool wants_markov = std::find(strategies.begin(), strategies.end(),
                                        StrategyKind::Markov) != strategies.end();
    const auto require = [&](const std::string& kind) {
        const auto path = model_path(config, kind, month);
        if (!std::filesystem::exists(path))
            throw std::invalid_argument(
                "no " + kind + " model for month " + std::to_string(month) + " at " +
                path.string() + "; run 'helios train --months " + std::to_string(month) +
                "' first");
        return path;
    };
    if (wants_bnn) mc.bnn = load_bnn(require("bnn"));
    if (wants_markov) mc.markov = load_markov(require("markov"));
    if (wants_bnn || wants_markov) mc.prior = load_climatology(require("climatology"));
    return mc;
}

void write_day_results(const CampaignReport& report, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "month,date,strategy,total_cost_cent_m2,realized_dpi_mol,dpi_met,feasible,"
           "r_squared,rmse_ppfd\n";
    for (const DayOutcome& day : report.days) {
        out << day.month << "," << format_date(day.result.date) << ","
            << to_string(day.result.strategy) << "," << fmt(day.result.total_cost) << ","
            << fmt(day.result.realized_dpi) << "," << (day.result.dpi_met ? 1 : 0) << ","
            << (day.result.feasible ? 1 : 0) << ",";
        if (day.prediction) {
            out << fmt_opt(day.prediction->r_squared) << ","
                << fmt(day.prediction->rmse_abs);
        } else {
            out << ",";
        }
        out << "\n";
    }
}

void write_campaign_report(const CampaignReport& report,
                           const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "month,strategy,days,mean_cost_cent_m2,relative_to_baseline,mean_r_squared,"
           "mean_rmse_ppfd,dpi_met_days,feasible_days\n";
    for (const MonthStrategySummary& row : report.summary) {
        out << row.month << "," << to_string(row.strategy) << "," << row.days << ","
            << fmt(row.mean_cost) << "," << fmt_opt(row.relative_to_baseline) << ","
            << fmt_opt(row.mean_r_squared) << "," << fmt_opt(row.mean_rmse) << ","
            << row.dpi_met_days << "," << row.feasible_days << "\n";
    }
}

void write_traces(const CampaignReport& report, const std::filesystem::path& dir) {
    // One plot-ready file per simulated day, strategies side by side.
    std::map<std::string, std::map<StrategyKind, const DayResult*>> by_date;
    for (const DayOutcome& day : report.days)
        by_date[format_date(day.result.date)][day.result.strategy] = &day.result;

    for (const auto& [date, results] : by_date) {
        std::ofstream out = open_out(dir / ("trace_" + date + ".csv"));
        out << "step,actual_ppfd,bnn_pred,markov_pred,baseline_led,bnn_led,markov_led,"
               "heuristic_led\n";
        const DayResult* any = results.begin()->second;
        const auto led = [&results](StrategyKind kind, int idx) -> std::string {
            const auto it = results.find(kind);
            return it == results.end() ? "" : fmt(it->second->steps[idx].led_ppfd);
        };
        const auto pred = [&results](StrategyKind kind, int idx) -> std::string {
            const auto it = results.find(kind);
            return it == results.end() ? ""
                                       : fmt(it->second->steps[idx].predicted_ppfd);
        };
        for (std::size_t i = 0; i < any->steps.size(); ++i) {
            out << any->steps[i].step << "," << fmt(any->steps[i].actual_ppfd) << ","
                << pred(StrategyKind::Bnn, i) << "," << pred(StrategyKind::Markov, i)
                << "," << led(StrategyKind::BaselineOracle, i) << ","
                << led(StrategyKind::Bnn, i) << "," << led(StrategyKind::Markov, i)
                << "," << led(StrategyKind::Heuristic, i) << "\n";
        }
    }
}

int cmd_simulate(const RunConfig& config, const std::string& strategies_csv) {
    const std::vector<StrategyKind> strategies = parse_strategies(strategies_csv);
    const PriceSchedule prices = resolve_prices(config);
    const std::vector<IrradianceRecord> records = load_records(config);

    std::vector<MonthCampaign> months;
    for (int month : config.months)
        months.push_back(assemble_month(config, records, month, strategies));

    CampaignConfig campaign;
    campaign.strategies = strategies;
    campaign.test_days_per_month = config.test_days_per_month;
    campaign.seed = config.seed;
    const CampaignReport report =
        run_campaign(months, prices, config.control, campaign);

    write_day_results(report, config.output_dir / "day_results.csv");
    write_campaign_report(report, config.output_dir / "campaign_report.csv");
    write_traces(report, config.output_dir);
    std::cout << "wrote " << (config.output_dir / "day_results.csv").string() << " ("
              << report.days.size() << " day runs)\n"
              << "wrote " << (config.output_dir / "campaign_report.csv").string() << " ("
              << report.summary.size() << " month/strategy rows)\n";
    return kExitOk;
}

// --------------------------------------------------------------- report ----

struct DayRow {
    int month = 0;
    std::string date, strategy;
    double cost = 0.0;
};

int cmd_report(const RunConfig& config) {
    const auto in_path = config.output_dir / "day_results.csv";
    std::ifstream in(in_path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("missing " + in_path.string() +
                                    "; run 'helios simulate' first");
    std::string line;
    if (!std::getline(in, line) || split_csv(line).size() < 9)
        throw std::invalid_argument("unrecognized header in " + in_path.string());

    std::vector<DayRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() < 9)
            throw std::invalid_argument("short row in " + in_path.string() + ": " + line);
        rows.push_back({std::stoi(f[0]), f[1], f[2], std::stod(f[3])});
    }

    std::map<std::string, double> baseline_by_date;
    for (const DayRow& row : rows)
        if (row.strategy == "baseline") baseline_by_date[row.date] = row.cost;

    std::ofstream daily = open_out(config.output_dir / "cost_increase.csv");
    daily << "month,date,strategy,cost_cent_m2,baseline_cent_m2,increase_cent_m2,"
             "increase_pct\n";
    struct Agg {
        double cost = 0.0, base = 0.0;
        int n = 0;
    };
    std::map<std::pair<int, std::string>, Agg> monthly;
    for (const DayRow& row : rows) {
        const auto base = baseline_by_date.find(row.date);
        if (base == baseline_by_date.end())
            throw std::invalid_argument(
                "no baseline row for " + row.date +
                " in day_results.csv; rerun simulate with baseline included");
        const double inc = row.cost - base->second;
        daily << row.month << "," << row.date << "," << row.strategy << ","
              << fmt(row.cost) << "," << fmt(base->second) << "," << fmt(inc) << ",";
        if (base->second > 0.0)
            daily << fmt(100.0 * inc / base->second);
        daily << "\n";
        Agg& agg = monthly[{row.month, row.strategy}];
        agg.cost += row.cost;
        agg.base += base->second;
        agg.n += 1;
    }

    std::ofstream out = open_out(config.output_dir / "cost_increase_monthly.csv");
    out << "month,strategy,mean_cost_cent_m2,baseline_mean_cent_m2,increase_cent_m2,"
           "increase_pct\n";
    for (const auto& [key, agg] : monthly) {
        const double mean = agg.cost / agg.n;
        const double base = agg.base / agg.n;
        out << key.first << "," << key.second << "," << fmt(mean) << "," << fmt(base)
            << "," << fmt(mean - base) << ",";
        if (base > 0.0)
            out << fmt(100.0 * (mean - base) / base);
        out << "\n";
    }
    std::cout << "wrote " << (config.output_dir / "cost_increase.csv").string() << "\n"
              << "wrote " << (config.output_dir / "cost_increase_monthly.csv").string()
              << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- predict ----

int cmd_predict(const RunConfig& config, int month_flag, const std::string& day_flag,
                const std::string& strategy_name) {
    const StrategyKind strategy = strategy_from_string(strategy_name);
    if (strategy != StrategyKind::Bnn && strategy != StrategyKind::Markov)
        throw std::invalid_argument("predict: --strategy must be bnn or markov");
    const int month = month_flag > 0 ? month_flag : config.months.front();
    const int T = config.control.grid.num_steps();

    const std::vector<IrradianceRecord> records = load_records(config);
    const std::vector<StepSeries> days =
        month_days(config, records, month, config.test_years, "test");
    const StepSeries* day = nullptr;
    if (day_flag.empty()) {
        day = &days[(days.size() - 1) / 2];
    } else {
        for (const StepSeries& d : days)
            if (format_date(d.date) == day_flag) day = &d;
        if (!day)
            throw std::invalid_argument("predict: " + day_flag +
                                        " is not a test day of month " +
                                        std::to_string(month));
    }

    std::unique_ptr<Predictor> predictor;
    if (strategy == StrategyKind::Bnn) {
        const auto path = model_path(config, "bnn", month);
        if (!std::filesystem::exists(path))
            throw std::invalid_argument("no bnn model at " + path.string() +
                                        "; run 'helios train --months " +
                                        std::to_string(month) + "' first");
        predictor = std::make_unique<BnnPredictor>(
            load_bnn(path), T, mix_seed(config.seed, static_cast<std::uint64_t>(month)));
    } else {
        const auto path = model_path(config, "markov", month);
        if (!std::filesystem::exists(path))
            throw std::invalid_argument("no markov model at " + path.string() +
                                        "; run 'helios train --months " +
                                        std::to_string(month) + "' first");
        predictor = std::make_unique<MarkovPredictor>(load_markov(path));
    }
    const ClimatologyProfile prior = load_climatology(model_path(config, "climatology", month));

    // One-step-ahead forecasts plus the before-sunrise rollout.
    std::vector<double> actual(T), one_step(T, 0.0), rollout(T, 0.0);
    for (int t = 0; t < T; ++t) actual[t] = day->values[t].sun_ppfd.value;
    one_step[0] = std::max(0.0, prior.mean_ppfd[0]);
    rollout[0] = one_step[0];
    const std::vector<Ppfd> ahead =
        predictor->predict_horizon(1, Ppfd(rollout[0]));
    for (int t = 1; t < T; ++t) rollout[t] = ahead[t - 1].value;
    for (int t = 1; t < T; ++t)
        one_step[t] = predictor->predict_horizon(t, Ppfd(actual[t - 1])).front().value;

    const std::string date = format_date(day->date);
    const auto path =
        config.output_dir / ("predict_" + std::string(to_string(strategy)) + "_" + date + ".csv");
    std::ofstream out = open_out(path);
    out << "step,actual_ppfd,one_step_pred,sunrise_rollout\n";
    for (int t = 0; t < T; ++t)
        out << t + 1 << "," << fmt(actual[t]) << "," << fmt(one_step[t]) << ","
            << fmt(rollout[t]) << "\n";

    const PredictionScore one_score = score(actual, one_step);
    const PredictionScore roll_score = score(actual, rollout);
    std::cout << "wrote " << path.string() << "\n"
              << date << " " << to_string(strategy)
              << " one-step R2=" << fmt_opt(one_score.r_squared)
              << " RMSE=" << fmt(one_score.rmse_abs)
              << " | rollout R2=" << fmt_opt(roll_score.r_squared)
              << " RMSE=" << fmt(roll_score.rmse_abs) << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- datagen ----

int cmd_datagen(const RunConfig& config, const std::string& out_dir,
                const std::string& years_csv, bool identical_days, double jitter) {
    SyntheticConfig synth;
    synth.months = config.months;
    synth.identical_days = identical_days;
    synth.amplitude_jitter = jitter;
    synth.seed = config.seed;

    std::vector<int> years;
    if (!years_csv.empty()) {
        years = parse_int_list(years_csv, "year");
    } else {
        years = config.train_years;
        years.insert(years.end(), config.test_years.begin(), config.test_years.end());
        if (years.empty()) years = {synth.year};
    }
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());

    const std::filesystem::path dir =
        out_dir.empty() ? config.data_dir : std::filesystem::path(out_dir);
    for (int year : years) {
        synth.year = year;
        write_synthetic_corpus(synth, dir);
    }
    std::cout << "wrote " << years.size() * config.months.size()
              << " synthetic month files under " << dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Greenhouse supplemental lighting: train sunlight models, run the "
                 "cost-optimal controller, and report against reference strategies."};
    app.require_subcommand(1);
    app.fallthrough();

    CommonFlags common;
    std::string seed_text;
    app.add_option("--config", common.config_path, "JSON run configuration");
    app.add_option("--months", common.months_csv, "comma-separated months (1-12)");
    app.add_option("--seed", seed_text, "override the run seed");

    std::string train_kind = "both";
    CLI::App* train = app.add_subcommand("train", "fit per-month sunlight models");
    train->add_option("--kind", train_kind, "bnn, markov, or both")->capture_default_str();

    std::string strategies_csv = "baseline,bnn,markov,heuristic";
    CLI::App* simulate =
        app.add_subcommand("simulate", "run the controller over the test days");
    simulate->add_option("--strategies", strategies_csv, "comma-separated strategies")
        ->capture_default_str();

    CLI::App* report =
        app.add_subcommand("report", "cost increase vs. baseline from simulate outputs");

    int predict_month = 0;
    std::string predict_day, predict_strategy = "bnn";
    CLI::App* predict = app.add_subcommand("predict", "dump one day of forecasts");
    predict->add_option("--month", predict_month, "month to predict (default: first configured)");
    predict->add_option("--day", predict_day, "test day as YYYY-MM-DD (default: middle)");
    predict->add_option("--strategy", predict_strategy, "bnn or markov")
        ->capture_default_str();

    std::string datagen_out, datagen_years;
    bool identical_days = false;
    double jitter = 0.15;
    CLI::App* datagen = app.add_subcommand("datagen", "write a synthetic sensor corpus");
    datagen->add_option("--out", datagen_out, "output directory (default: data_dir)");
    datagen->add_option("--years", datagen_years,
                        "comma-separated years (default: train+test years)");
    datagen->add_flag("--identical-days", identical_days,
                      "repeat each month's mid-month profile");
    datagen->add_option("--jitter", jitter, "per-day amplitude jitter fraction")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    }

    try {
        if (!seed_text.empty()) {
            size_t used = 0;
            common.seed = std::stoull(seed_text, &used);
            if (used != seed_text.size())
                throw std::invalid_argument("bad --seed value: " + seed_text);
        }
        const RunConfig config = resolve_config(common);
        if (train->parsed()) return cmd_train(config, train_kind);
        if (simulate->parsed()) return cmd_simulate(config, strategies_csv);
        if (report->parsed()) return cmd_report(config);
        if (predict->parsed())
            return cmd_predict(config, predict_month, predict_day, predict_strategy);
        if (datagen->parsed())
            return cmd_datagen(config, datagen_out, datagen_years, identical_days, jitter);
        std::cerr << "error: no subcommand\n";
        return kExitUser;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const ModelIoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const IngestError& e) {
        std::cerr << "error: " << e.what() << " (line " << e.line << ")\n";
        return kExitUser;
    } catch (const GapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kExitInternal;
    }
}
