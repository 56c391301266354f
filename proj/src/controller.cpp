#include "helios/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "helios/seeds.hpp"

namespace helios {

namespace {

constexpr double kDpiRelTol = 1e-6;

bool is_prediction_strategy(StrategyKind kind) {
    return kind == StrategyKind::Bnn || kind == StrategyKind::Markov;
}

/// Remaining-day problem at step t: the first horizon entry is the sun
/// value assumed for the current step, later entries are forecasts.
HorizonProblem make_step_problem(int t, const std::vector<double>& prices,
                                 const std::vector<Ppfd>& sun, double budget,
                                 const ControlConfig& config) {
    HorizonProblem problem;
    problem.start_step = t;
    problem.prices.assign(prices.begin() + (t - 1), prices.end());
    problem.sun_ppfd = sun;
    problem.sun_etr.reserve(sun.size());
    for (const Ppfd& s : sun)
        problem.sun_etr.push_back(etr_from_ppfd(s, config.params));
    problem.params = config.params;
    problem.led_cap = config.led_cap_etr();
    problem.budget = budget;
    return problem;
}

DayResult run_heuristic_day(const StepSeries& day, const PriceSchedule& prices,
                            const ControlConfig& config) {
    const Ppfd threshold = derive_heuristic_threshold(config);
    const double factor = config.cost_factor();
    const int T = config.grid.num_steps();

    DayResult result;
    result.date = day.date;
    result.strategy = StrategyKind::Heuristic;
    result.steps.reserve(T);

    double realized_sum = 0.0;
    for (int t = 1; t <= T; ++t) {
        const StepSample& sample = day.values[t - 1];
        const double requested = std::max(0.0, threshold.value - sample.sun_ppfd.value);
        const Ppfd led = heuristic_step(sample.sun_ppfd, threshold, config.led_max_ppfd);
        if (led.value < requested) result.feasible = false;  // lamp ceiling hit

        const Etr total = etr_from_ppfd(
            Ppfd(sample.sun_ppfd.value + led.value), config.params);
        StepRecord rec;
        rec.step = t;
        rec.actual_ppfd = sample.sun_ppfd.value;
        rec.used_ppfd = sample.sun_ppfd.value;
        rec.predicted_ppfd = sample.sun_ppfd.value;
        rec.led_etr = total.value - sample.sun_etr.value;
        rec.led_ppfd = led.value;
        rec.step_cost = led.value * prices.cent_per_kwh[t - 1] * factor;
        realized_sum += rec.led_etr + sample.sun_etr.value;
        result.total_cost += rec.step_cost;
        result.steps.push_back(rec);
    }
    result.realized_dpi = realized_sum * config.grid.step_seconds * 1e-6;
    result.dpi_met = result.realized_dpi >= config.dpi_target_mol * (1.0 - kDpiRelTol);
    return result;
}

}  // namespace

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::BaselineOracle: return "baseline";
        case StrategyKind::Bnn: return "bnn";
        case StrategyKind::Markov: return "markov";
        case StrategyKind::Heuristic: return "heuristic";
    }
    throw std::logic_error("unknown StrategyKind");
}

StrategyKind strategy_from_string(const std::string& s) {
    if (s == "baseline" || s == "baseline-oracle") return StrategyKind::BaselineOracle;
    if (s == "bnn") return StrategyKind::Bnn;
    if (s == "markov") return StrategyKind::Markov;
    if (s == "heuristic") return StrategyKind::Heuristic;
    throw std::invalid_argument("unknown strategy: " + s);
}

Etr ControlConfig::led_cap_etr() const {
    return etr_from_ppfd(Ppfd(led_max_ppfd), params);
}

double ControlConfig::cost_factor() const {
    return cost_conversion_factor(grid.step_seconds, led_efficacy_umol_per_j);
}

void ControlConfig::validate() const {
    grid.validate();
    params.validate();
    if (!(dpi_target_mol >= 0.0))
        throw std::invalid_argument("ControlConfig: dpi_target_mol must be >= 0");
    if (!(led_max_ppfd >= 0.0))
        throw std::invalid_argument("ControlConfig: led_max_ppfd must be >= 0");
    if (!(led_efficacy_umol_per_j > 0.0))
        throw std::invalid_argument("ControlConfig: led efficacy must be > 0");
}

Ppfd heuristic_step(Ppfd sun, Ppfd threshold, double led_max_ppfd) {
    const double need = std::max(0.0, threshold.value - sun.value);
    return Ppfd(std::min(need, led_max_ppfd));
}

Ppfd derive_heuristic_threshold(const ControlConfig& config) {
    const int T = config.grid.num_steps();
    const double per_step_etr =
        config.dpi_target_mol * 1e6 / (config.grid.step_seconds * static_cast<double>(T));
    if (per_step_etr <= 0.0) return Ppfd(0.0);
    if (per_step_etr >= config.params.a)
        throw std::domain_error(
            "derive_heuristic_threshold: per-step requirement at or beyond the "
            "light-response asymptote; no constant PPFD reaches the target");
    return ppfd_from_etr(Etr(per_step_etr), config.params);
}

DayResult run_day(StrategyKind strategy, const StepSeries& day,
                  const PriceSchedule& prices, const ControlConfig& config,
                  const Predictor* predictor, const ClimatologyProfile* prior) {
    config.validate();
    const int T = config.grid.num_steps();
    if (static_cast<int>(day.values.size()) != T)
        throw std::invalid_argument("run_day: day length does not match the grid");
    if (static_cast<int>(prices.cent_per_kwh.size()) != T)
        throw std::invalid_argument("run_day: price schedule length does not match the grid");

    if (strategy == StrategyKind::Heuristic)
        return run_heuristic_day(day, prices, config);

    if (is_prediction_strategy(strategy)) {
        if (predictor == nullptr)
            throw std::invalid_argument("run_day: strategy needs a predictor");
        if (predictor->num_steps() != T)
            throw std::invalid_argument("run_day: predictor grid does not match");
        if (prior != nullptr && static_cast<int>(prior->mean_ppfd.size()) != T)
            throw std::invalid_argument("run_day: prior length does not match the grid");
    }

    PerfectPredictor oracle(day);
    const Predictor& forecasts =
        strategy == StrategyKind::BaselineOracle ? static_cast<const Predictor&>(oracle)
                                                 : *predictor;
    const bool use_prior = is_prediction_strategy(strategy) && prior != nullptr;
    const double factor = config.cost_factor();
    const double margin = kDomainMarginFrac * config.params.a;

    DayResult result;
    result.date = day.date;
    result.strategy = strategy;
    result.steps.reserve(T);

    std::vector<double> realized;  // per-step x_t + s_t, actual sun
    realized.reserve(T);
    // Forecast of step t+1 carried over from the solve at step t.
    double next_forecast = std::numeric_limits<double>::quiet_NaN();
    bool sun_seen = false;

    for (int t = 1; t <= T; ++t) {
        const StepSample& sample = day.values[t - 1];
        sun_seen = sun_seen || sample.sun_ppfd.value > 0.0;

        // Sun profile over steps t..T as the controller believes it.
        std::vector<Ppfd> sun;
        double used_ppfd = 0.0;
        double predicted_ppfd = 0.0;
        if (t == 1 && use_prior) {
            sun.reserve(T);
            for (double v : prior->mean_ppfd) sun.push_back(Ppfd(std::max(0.0, v)));
            used_ppfd = sun.front().value;
            predicted_ppfd = sun.front().value;
            if (T > 1) next_forecast = sun[1].value;
        } else {
            const bool dark_rest = is_prediction_strategy(strategy) &&
                                   config.zero_sun_after_sunset && sun_seen &&
                                   sample.sun_ppfd.value == 0.0;
            sun.reserve(T - t + 1);
            sun.push_back(sample.sun_ppfd);
            if (t < T) {
                if (dark_rest) {
                    sun.resize(T - t + 1, Ppfd(0.0));
                } else {
                    std::vector<Ppfd> ahead = forecasts.predict_horizon(t, sample.sun_ppfd);
                    if (static_cast<int>(ahead.size()) != T - t)
                        throw std::runtime_error("run_day: predictor returned a wrong-length horizon");
                    sun.insert(sun.end(), ahead.begin(), ahead.end());
                }
            }
            used_ppfd = sample.sun_ppfd.value;
            predicted_ppfd = std::isnan(next_forecast) ? sample.sun_ppfd.value : next_forecast;
            next_forecast = t < T ? sun[1].value : predicted_ppfd;
        }

        const double budget =
            remaining_budget(config.dpi_target_mol, config.grid.step_seconds, realized);
        const HorizonProblem problem = make_step_problem(t, prices.cent_per_kwh, sun,
                                                         budget, config);
        const LightingSchedule schedule = solve_horizon(problem);
        if (!schedule.feasible) result.feasible = false;

        // Commit only the current step; the realized gain rides on the
        // actual sun, clamped into the response curve's domain in case the
        // assumed sun undershot it.
        const double max_led =
            std::max(0.0, config.params.a - sample.sun_etr.value - margin);
        const double led_etr = std::min(schedule.led_etr.front().value, max_led);
        const Ppfd led_ppfd =
            led_etr > 0.0 ? led_ppfd_for(Etr(led_etr), sample.sun_etr,
                                         sample.sun_ppfd, config.params)
                          : Ppfd(0.0);

        StepRecord rec;
        rec.step = t;
        rec.actual_ppfd = sample.sun_ppfd.value;
        rec.used_ppfd = used_ppfd;
        rec.predicted_ppfd = predicted_ppfd;
        rec.led_etr = led_etr;
        rec.led_ppfd = led_ppfd.value;
        rec.step_cost = led_ppfd.value * prices.cent_per_kwh[t - 1] * factor;
        realized.push_back(led_etr + sample.sun_etr.value);
        result.total_cost += rec.step_cost;
        result.steps.push_back(rec);
    }

    double realized_sum = 0.0;
    for (double v : realized) realized_sum += v;
    result.realized_dpi = realized_sum * config.grid.step_seconds * 1e-6;
    result.dpi_met = result.realized_dpi >= config.dpi_target_mol * (1.0 - kDpiRelTol);
    return result;
}

std::vector<int> select_test_day_indices(int available, int requested) {
    if (available <= 0 || requested <= 0) return {};
    std::vector<int> idx;
    if (requested >= available) {
        idx.resize(available);
        for (int i = 0; i < available; ++i) idx[i] = i;
        return idx;
    }
    if (requested == 1) return {(available - 1) / 2};
    idx.reserve(requested);
    for (int i = 0; i < requested; ++i)
        idx.push_back(static_cast<int>(
            std::lround(static_cast<double>(i) * (available - 1) / (requested - 1))));
    return idx;
}

CampaignReport run_campaign(const std::vector<MonthCampaign>& months,
                            const PriceSchedule& prices, const ControlConfig& config,
                            const CampaignConfig& campaign) {
    config.validate();
    if (campaign.strategies.empty())
        throw std::invalid_argument("run_campaign: no strategies selected");
    const int T = config.grid.num_steps();

    const bool wants_bnn =
        std::find(campaign.strategies.begin(), campaign.strategies.end(),
                  StrategyKind::Bnn) != campaign.strategies.end();
    const bool wants_markov =
        std::find(campaign.strategies.begin(), campaign.strategies.end(),
                  StrategyKind::Markov) != campaign.strategies.end();

    CampaignReport report;
    for (const MonthCampaign& mc : months) {
        if (wants_bnn && !mc.bnn.has_value())
            throw std::invalid_argument("run_campaign: month " + std::to_string(mc.month) +
                                        " has no trained bnn model");
        if (wants_markov && !mc.markov.has_value())
            throw std::invalid_argument("run_campaign: month " + std::to_string(mc.month) +
                                        " has no trained markov model");
        if ((wants_bnn || wants_markov) && !mc.prior.has_value())
            throw std::invalid_argument("run_campaign: month " + std::to_string(mc.month) +
                                        " has no climatology prior");

        std::unique_ptr<BnnPredictor> bnn;
        if (wants_bnn)
            bnn = std::make_unique<BnnPredictor>(
                *mc.bnn, T, mix_seed(campaign.seed, static_cast<std::uint64_t>(mc.month)));
        std::unique_ptr<MarkovPredictor> markov;
        if (wants_markov) markov = std::make_unique<MarkovPredictor>(*mc.markov);

        const std::vector<int> picks = select_test_day_indices(
            static_cast<int>(mc.test_days.size()), campaign.test_days_per_month);

        struct Accum {
            double cost_sum = 0.0;
            double r2_sum = 0.0;
            int r2_days = 0;
            double rmse_sum = 0.0;
            int rmse_days = 0;
            int days = 0, dpi_met = 0, feasible = 0;
        };
        std::vector<Accum> acc(campaign.strategies.size());

        for (int day_idx : picks) {
            const StepSeries& day = mc.test_days[day_idx];
            for (std::size_t s = 0; s < campaign.strategies.size(); ++s) {
                const StrategyKind strat = campaign.strategies[s];
                const Predictor* predictor = nullptr;
                const ClimatologyProfile* prior = nullptr;
                if (strat == StrategyKind::Bnn) predictor = bnn.get();
                if (strat == StrategyKind::Markov) predictor = markov.get();
                if (is_prediction_strategy(strat)) prior = &*mc.prior;

                DayOutcome outcome;
                outcome.month = mc.month;
                outcome.result = run_day(strat, day, prices, config, predictor, prior);
                if (is_prediction_strategy(strat)) {
                    std::vector<double> observed, predicted;
                    observed.reserve(T);
                    predicted.reserve(T);
                    for (const StepRecord& rec : outcome.result.steps) {
                        observed.push_back(rec.actual_ppfd);
                        predicted.push_back(rec.predicted_ppfd);
                    }
                    outcome.prediction = score(observed, predicted);
                }

                Accum& a = acc[s];
                a.cost_sum += outcome.result.total_cost;
                a.days += 1;
                a.dpi_met += outcome.result.dpi_met ? 1 : 0;
                a.feasible += outcome.result.feasible ? 1 : 0;
                if (outcome.prediction) {
                    if (outcome.prediction->r_squared) {
                        a.r2_sum += *outcome.prediction->r_squared;
                        a.r2_days += 1;
                    }
                    a.rmse_sum += outcome.prediction->rmse_abs;
                    a.rmse_days += 1;
                }
                report.days.push_back(std::move(outcome));
            }
        }

        std::optional<double> baseline_mean;
        for (std::size_t s = 0; s < campaign.strategies.size(); ++s)
            if (campaign.strategies[s] == StrategyKind::BaselineOracle && acc[s].days > 0)
                baseline_mean = acc[s].cost_sum / acc[s].days;

        for (std::size_t s = 0; s < campaign.strategies.size(); ++s) {
            if (acc[s].days == 0) continue;
            MonthStrategySummary sum;
            sum.month = mc.month;
            sum.strategy = campaign.strategies[s];
            sum.days = acc[s].days;
            sum.mean_cost = acc[s].cost_sum / acc[s].days;
            if (baseline_mean && *baseline_mean > 0.0)
                sum.relative_to_baseline = sum.mean_cost / *baseline_mean;
            if (acc[s].r2_days > 0) sum.mean_r_squared = acc[s].r2_sum / acc[s].r2_days;
            if (acc[s].rmse_days > 0) sum.mean_rmse = acc[s].rmse_sum / acc[s].rmse_days;
            sum.dpi_met_days = acc[s].dpi_met;
            sum.feasible_days = acc[s].feasible;
            report.summary.push_back(sum);
        }
    }
    return report;
}

}  // namespace helios
