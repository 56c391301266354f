// End-to-end acceptance gate: ten checks covering solver optimality, the
// receding-horizon equivalences, campaign-level guarantees, model training
// quality, the physical anchor values, and output determinism. Prints one
// [PASS]/[FAIL] line per check and exits nonzero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helios/bnn.hpp"
#include "helios/controller.hpp"
#include "helios/light_model.hpp"
#include "helios/metrics.hpp"
#include "helios/optimizer.hpp"
#include "helios/predictors.hpp"
#include "helios/seeds.hpp"
#include "helios/synthetic.hpp"
#include "support/cli_runner.hpp"
#include "support/oracle.hpp"
#include "support/temp_dir.hpp"

using namespace helios;
using namespace helios::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string date_str(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(d.year()),
                  unsigned(d.month()), unsigned(d.day()));
    return buf;
}

PriceSchedule flat_prices(const GridSpec& grid, double cent_per_kwh) {
    PriceSchedule p;
    p.cent_per_kwh.assign(grid.num_steps(), cent_per_kwh);
    return p;
}

// Two-tier tariff: 30 cent/kWh from noon to the end of the photoperiod,
// 10 otherwise.
PriceSchedule tou_prices(const GridSpec& grid) {
    PriceSchedule p = flat_prices(grid, 10.0);
    for (int t = 1; t <= grid.num_steps(); ++t) {
        const int start = grid.photoperiod_start + (t - 1) * grid.step_seconds;
        if (start >= 12 * 3600) p.cent_per_kwh[t - 1] = 30.0;
    }
    return p;
}

std::vector<StepSeries> month_days(const SyntheticConfig& config, int month,
                                   const ControlConfig& control) {
    return synthetic_month(config, month, control.grid, kDefaultWattsToPpfd,
                           control.params);
}

// ---------------------------------------------------------------------------
// 1. solve_horizon against the projected-gradient and grid oracles.

std::string check_solver_oracle() {
    const auto start = Clock::now();
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const HorizonProblem p = random_problem(seed);
        const LightingSchedule sched = solve_horizon(p);
        const OracleResult oracle = oracle_solve(p, seed);
        if (sched.feasible != oracle.feasible)
            return "seed " + std::to_string(seed) + ": feasibility disagrees (solver " +
                   (sched.feasible ? "feasible" : "infeasible") + ")";
        if (!sched.feasible) continue;
        if (sched.diagnostics.budget_residual < -1e-6)
            return "seed " + std::to_string(seed) + ": budget residual " +
                   num(sched.diagnostics.budget_residual);
        const double obj = horizon_objective(p, sched.led_etr);
        const double scale = std::max(1.0, std::abs(oracle.objective));
        if (std::abs(obj - oracle.objective) > 1e-5 * scale)
            return "seed " + std::to_string(seed) + ": objective " + num(obj) +
                   " vs oracle " + num(oracle.objective);
        if (p.horizon() == 2) {
            const OracleResult grid = grid_solve_2d(p, 0.25);
            if (grid.feasible &&
                obj > grid.objective + 1e-5 * std::max(1.0, std::abs(grid.objective)))
                return "seed " + std::to_string(seed) + ": objective " + num(obj) +
                       " above grid search " + num(grid.objective);
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 10.0)
        return "runtime " + num(elapsed) + " s exceeds 10 s";
    return {};
}

// ---------------------------------------------------------------------------
// 2. Receding-horizon control with perfect forecasts equals the one-shot
//    whole-day solve.

std::string check_perfect_prediction() {
    ControlConfig control;
    const PriceSchedule prices = flat_prices(control.grid, 10.0);
    SyntheticConfig syn;
    syn.year = 2021;
    syn.seed = 7;

    int days_checked = 0;
    for (int month = 1; month <= 10; ++month) {
        const auto series = month_days(syn, month, control);
        for (std::size_t d = 0; d < 5 && d < series.size(); ++d, ++days_checked) {
            const StepSeries& day = series[d];
            const DayResult receding =
                run_day(StrategyKind::BaselineOracle, day, prices, control);

            HorizonProblem p;
            p.start_step = 1;
            p.params = control.params;
            p.led_cap = control.led_cap_etr();
            for (const StepSample& s : day.values) {
                p.prices.push_back(prices.cent_per_kwh[s.step - 1]);
                p.sun_etr.push_back(s.sun_etr);
                p.sun_ppfd.push_back(s.sun_ppfd);
            }
            p.budget = remaining_budget(control.dpi_target_mol,
                                        control.grid.step_seconds, {});
            const LightingSchedule oneshot = solve_horizon(p);
            if (!receding.feasible || !oneshot.feasible)
                return date_str(day.date) + ": unexpectedly infeasible";
            const double oneshot_cost = schedule_cost(oneshot, p, control.cost_factor());
            const double tol = 1e-6 * std::max(1.0, std::abs(oneshot_cost));
            if (std::abs(receding.total_cost - oneshot_cost) > tol)
                return date_str(day.date) + ": receding " + num(receding.total_cost) +
                       " vs one-shot " + num(oneshot_cost);
        }
    }
    if (days_checked != 50)
        return "expected 50 days, checked " + std::to_string(days_checked);
    return {};
}

// ---------------------------------------------------------------------------
// Shared 12-month campaign for checks 3 and 4: two jittered training years,
// one jittered test year, all four strategies, time-of-use prices.

const CampaignReport& seasonal_campaign() {
    static const CampaignReport report = [] {
        ControlConfig control;
        SyntheticConfig base;
        base.seed = 101;

        std::vector<MonthCampaign> months;
        for (int month = 1; month <= 12; ++month) {
            MonthCampaign mc;
            mc.month = month;
            std::vector<StepSeries> train_days;
            for (int year : {2019, 2020}) {
                SyntheticConfig cfg = base;
                cfg.year = year;
                const auto days = month_days(cfg, month, control);
                train_days.insert(train_days.end(), days.begin(), days.end());
            }
            SyntheticConfig test_cfg = base;
            test_cfg.year = 2021;
            mc.test_days = month_days(test_cfg, month, control);
            mc.prior = fit_climatology(train_days);
            mc.markov = fit_markov(train_days, 10, 1.0);

            BnnConfig bc;
            bc.hidden_sizes = {32, 32};
            bc.learning_rate = 2e-3;
            bc.epochs = 200;
            bc.batch_size = 32;
            bc.mc_samples_predict = 10;
            bc.seed = mix_seed(9000, static_cast<std::uint64_t>(month));
            mc.bnn = train(init_model(bc), train_days, bc).model;
            months.push_back(std::move(mc));
        }

        CampaignConfig cc;
        cc.strategies = {StrategyKind::BaselineOracle, StrategyKind::Bnn,
                         StrategyKind::Markov, StrategyKind::Heuristic};
        cc.test_days_per_month = 5;
        cc.seed = 424242;
        return run_campaign(months, tou_prices(control.grid), control, cc);
    }();
    return report;
}

// 3. Every feasible day reaches the daily photochemical target.

std::string check_dpi_guarantee() {
    const CampaignReport& report = seasonal_campaign();
    if (report.days.empty()) return "campaign produced no days";
    int feasible_days = 0;
    for (const DayOutcome& day : report.days) {
        if (!day.result.feasible) continue;
        ++feasible_days;
        if (day.result.realized_dpi < 3.0 * (1.0 - 1e-6))
            return date_str(day.result.date) + " " + to_string(day.result.strategy) +
                   ": realized dpi " + num(day.result.realized_dpi);
    }
    if (feasible_days == 0) return "no feasible days in the campaign";
    return {};
}

// 4. The full-information baseline is the monthly cost floor, and a BNN
//    trained to convergence on a noiseless generator matches it to 1%.

std::string check_strategy_ordering() {
    const CampaignReport& report = seasonal_campaign();
    if (report.summary.size() != 12 * 4)
        return "expected 48 summary rows, got " + std::to_string(report.summary.size());

    std::map<int, double> baseline;
    for (const MonthStrategySummary& s : report.summary)
        if (s.strategy == StrategyKind::BaselineOracle) baseline[s.month] = s.mean_cost;
    for (const MonthStrategySummary& s : report.summary) {
        if (s.strategy == StrategyKind::BaselineOracle) continue;
        const double base = baseline.at(s.month);
        if (base > s.mean_cost + 1e-9 * std::max(1.0, std::abs(s.mean_cost)))
            return "month " + std::to_string(s.month) + ": baseline " + num(base) +
                   " above " + to_string(s.strategy) + " " + num(s.mean_cost);
    }

    // Noiseless repeated-day December: the learned one-step map is exact,
    // so the BNN strategy should price out within 1% of full information.
    ControlConfig control;
    SyntheticConfig clean;
    clean.identical_days = true;
    clean.amplitude_jitter = 0.0;
    clean.seed = 5;

    MonthCampaign mc;
    mc.month = 12;
    std::vector<StepSeries> train_days;
    for (int year : {2019, 2020}) {
        SyntheticConfig cfg = clean;
        cfg.year = year;
        const auto days = month_days(cfg, 12, control);
        train_days.insert(train_days.end(), days.begin(), days.end());
    }
    SyntheticConfig test_cfg = clean;
    test_cfg.year = 2021;
    mc.test_days = month_days(test_cfg, 12, control);
    mc.prior = fit_climatology(train_days);

    BnnConfig bc;
    bc.hidden_sizes = {32, 32};
    bc.learning_rate = 2e-3;
    bc.epochs = 400;
    bc.batch_size = 32;
    bc.mc_samples_predict = 10;
    bc.seed = mix_seed(8000, 12);
    mc.bnn = train(init_model(bc), train_days, bc).model;

    CampaignConfig cc;
    cc.strategies = {StrategyKind::BaselineOracle, StrategyKind::Bnn};
    cc.test_days_per_month = 5;
    cc.seed = 777;
    std::vector<MonthCampaign> months;
    months.push_back(std::move(mc));
    const CampaignReport clean_report =
        run_campaign(months, tou_prices(control.grid), control, cc);

    double base_cost = -1.0, bnn_cost = -1.0;
    for (const MonthStrategySummary& s : clean_report.summary) {
        if (s.strategy == StrategyKind::BaselineOracle) base_cost = s.mean_cost;
        if (s.strategy == StrategyKind::Bnn) bnn_cost = s.mean_cost;
    }
    if (base_cost <= 0.0)
        return "noiseless December baseline cost " + num(base_cost) +
               ", cannot test a relative bound";
    if (std::abs(bnn_cost - base_cost) > 0.01 * base_cost)
        return "noiseless bnn cost " + num(bnn_cost) + " vs baseline " +
               num(base_cost) + " (over 1%)";
    return {};
}

// ---------------------------------------------------------------------------
// 5 and 6. Physical anchor values.

std::string check_light_response_anchor() {
    const double v = etr_from_ppfd(Ppfd(200.0), PhotosynthesisParams{}).value;
    if (std::abs(v - 51.47) > 0.01)
        return "etr(200) = " + num(v);
    return {};
}

std::string check_cost_anchor() {
    const double factor = cost_conversion_factor(900.0);
    if (factor != 0.25 / 2800.0)
        return "conversion factor " + num(factor) + " != 0.25/2800";
    const double step_cost = 10.0 * 200.0 * factor;
    if (std::abs(step_cost - 0.1786) > 1e-4)
        return "single-step cost " + num(step_cost);
    return {};
}

// ---------------------------------------------------------------------------
// 7. Analytic free-energy gradients against central differences on a fixed
//    batch with frozen weight noise.

std::string check_gradients() {
    const auto start = Clock::now();

    BnnConfig config;
    config.hidden_sizes = {5, 4};
    config.seed = 21;
    config.obs_noise_std = 0.3;
    config.prior_std = 0.8;
    BnnModel model = init_model(config);
    std::mt19937_64 jitter(17);
    std::normal_distribution<double> gauss(0.0, 0.2);
    for (double& m : model.output.mu) m += gauss(jitter);
    for (double& b : model.hidden1.bias) b += gauss(jitter);
    for (double& b : model.hidden2.bias) b += gauss(jitter);

    TrainingBatch batch;
    batch.inputs = {{-1.2, -0.8}, {-0.4, 0.3}, {0.0, 1.1}, {0.6, -0.5}, {1.3, 0.9}};
    batch.targets = {0.4, -0.7, 1.0, -0.2, 0.8};

    const int n_samples = 3;
    const double kl_weight = 0.37;
    const std::uint64_t rng_seed = 123;

    std::mt19937_64 rng(rng_seed);
    const ElboGradients grads =
        elbo_with_gradients(model, batch, n_samples, rng, kl_weight);

    std::string failure;
    const auto fd_check = [&](const char* name, std::vector<double>& param,
                              const std::vector<double>& grad) {
        if (!failure.empty()) return;
        if (param.size() != grad.size()) {
            failure = std::string(name) + ": gradient size mismatch";
            return;
        }
        for (std::size_t i = 0; i < param.size(); ++i) {
            const double saved = param[i];
            const double h = 1e-6 * std::max(1.0, std::abs(saved));
            param[i] = saved + h;
            std::mt19937_64 rp(rng_seed);
            const double up = elbo_loss(model, batch, n_samples, rp, kl_weight);
            param[i] = saved - h;
            std::mt19937_64 rm(rng_seed);
            const double down = elbo_loss(model, batch, n_samples, rm, kl_weight);
            param[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            if (std::abs(grad[i] - fd) >
                1e-4 * std::max({1.0, std::abs(grad[i]), std::abs(fd)})) {
                failure = std::string(name) + "[" + std::to_string(i) + "]: analytic " +
                          num(grad[i]) + " vs fd " + num(fd);
                return;
            }
        }
    };
    fd_check("hidden1.w", model.hidden1.weights, grads.hidden1_w);
    fd_check("hidden1.b", model.hidden1.bias, grads.hidden1_b);
    fd_check("hidden2.w", model.hidden2.weights, grads.hidden2_w);
    fd_check("hidden2.b", model.hidden2.bias, grads.hidden2_b);
    fd_check("mu", model.output.mu, grads.mu);
    fd_check("rho", model.output.rho, grads.rho);
    if (!failure.empty()) return failure;

    const double elapsed = seconds_since(start);
    if (elapsed >= 5.0) return "runtime " + num(elapsed) + " s exceeds 5 s";
    return {};
}

// ---------------------------------------------------------------------------
// 8. Trained forecast quality on a clean half-sine month.

std::string check_bnn_regression() {
    const auto start = Clock::now();

    ControlConfig control;
    SyntheticConfig clean;
    clean.year = 2021;
    clean.amplitude_jitter = 0.0;
    clean.seed = 0;
    const auto days = month_days(clean, 6, control);
    if (days.size() != 30)
        return "expected 30 days, got " + std::to_string(days.size());
    const int num_steps = control.grid.num_steps();

    BnnConfig bc;
    bc.hidden_sizes = {32, 32};
    bc.learning_rate = 2e-3;
    bc.epochs = 500;
    bc.batch_size = 32;
    bc.seed = 1234;
    const BnnModel model = train(init_model(bc), days, bc).model;

    std::mt19937_64 rng(5150);
    std::vector<double> observed, one_step, rollout_obs, rollout_pred;
    for (const StepSeries& day : days) {
        for (int t = 1; t < num_steps; ++t) {
            observed.push_back(day.values[t].sun_ppfd.value);
            one_step.push_back(
                predict_mean(model, day.values[t - 1].sun_ppfd, t, 100, rng).value);
        }
        const std::vector<Ppfd> path =
            predict_horizon(model, 1, day.values[0].sun_ppfd, num_steps, rng);
        for (int t = 1; t < num_steps; ++t) {
            rollout_obs.push_back(day.values[t].sun_ppfd.value);
            rollout_pred.push_back(path[t - 1].value);
        }
    }

    const PredictionScore one = score(observed, one_step);
    if (!one.r_squared || *one.r_squared <= 0.99)
        return "one-step r^2 " + (one.r_squared ? num(*one.r_squared) : "undefined");
    const PredictionScore roll = score(rollout_obs, rollout_pred);
    if (!roll.r_squared || *roll.r_squared <= 0.95)
        return "rollout r^2 " + (roll.r_squared ? num(*roll.r_squared) : "undefined");

    const double elapsed = seconds_since(start);
    if (elapsed >= 300.0) return "runtime " + num(elapsed) + " s exceeds 5 min";
    return {};
}

// ---------------------------------------------------------------------------
// 9. Fit-metrics hand example.

std::string check_metrics_anchor() {
    const PredictionScore s = score({0.0, 10.0, 20.0}, {0.0, 10.0, 26.0});
    if (std::abs(s.rmse_abs - std::sqrt(12.0)) > 1e-12)
        return "rmse " + num(s.rmse_abs);
    if (!s.r_squared || std::abs(*s.r_squared - 0.82) > 1e-12)
        return "r^2 " + (s.r_squared ? num(*s.r_squared) : "undefined");
    return {};
}

// ---------------------------------------------------------------------------
// 10. Identical seeds give byte-identical pipeline outputs.

const char* kDeterminismConfig = R"({
  "data_dir": "data",
  "model_dir": "models",
  "output_dir": "out",
  "months": [3],
  "train_years": [2019, 2020],
  "test_years": [2021],
  "test_days_per_month": 2,
  "bnn": {
    "hidden_sizes": [8, 8],
    "epochs": 25,
    "learning_rate": 0.005,
    "batch_size": 0,
    "mc_samples_predict": 5
  },
  "markov": {"bins": 8, "alpha": 1.0},
  "seed": 17
})";

std::vector<fs::path> output_files(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext == ".csv" || ext == ".helios")
            files.push_back(fs::relative(entry.path(), root));
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string check_determinism() {
    TempDir first("helios_accept_run1");
    TempDir second("helios_accept_run2");
    for (const fs::path& dir : {first.path, second.path}) {
        write_file(dir, "config.json", kDeterminismConfig);
        for (const char* command : {"datagen", "train", "simulate"}) {
            const CliResult r =
                run_cli(std::string("--config config.json ") + command, dir);
            if (r.exit_code != 0)
                return std::string(command) + " exited " +
                       std::to_string(r.exit_code) + ": " + r.err;
        }
    }

    const auto files1 = output_files(first.path);
    const auto files2 = output_files(second.path);
    if (files1 != files2)
        return "runs produced different file sets (" + std::to_string(files1.size()) +
               " vs " + std::to_string(files2.size()) + ")";
    if (files1.empty()) return "runs produced no output files";
    for (const fs::path& rel : files1) {
        if (read_file(first.path / rel) != read_file(second.path / rel))
            return rel.string() + " differs between runs";
    }
    return {};
}

}  // namespace

int main() {
    struct Check {
        int number;
        const char* name;
        std::function<std::string()> body;
    };
    const std::vector<Check> checks = {
        {1, "solver matches oracle", check_solver_oracle},
        {2, "perfect prediction equals one-shot", check_perfect_prediction},
        {3, "feasible days meet the dpi target", check_dpi_guarantee},
        {4, "baseline is the monthly cost floor", check_strategy_ordering},
        {5, "light-response anchor", check_light_response_anchor},
        {6, "cost conversion anchor", check_cost_anchor},
        {7, "analytic gradients match finite differences", check_gradients},
        {8, "one-step and rollout forecast quality", check_bnn_regression},
        {9, "fit metrics hand example", check_metrics_anchor},
        {10, "deterministic pipeline outputs", check_determinism},
    };

    int failures = 0;
    for (const Check& check : checks) {
        std::string detail;
        try {
            detail = check.body();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            std::printf("[PASS] #%d %s\n", check.number, check.name);
        } else {
            std::printf("[FAIL] #%d %s: %s\n", check.number, check.name, detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
