#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "helios/bnn.hpp"
#include "helios/data_io.hpp"
#include "helios/metrics.hpp"
#include "helios/optimizer.hpp"
#include "helios/predictors.hpp"

namespace helios {

enum class StrategyKind { BaselineOracle, Bnn, Markov, Heuristic };

std::string to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& s);

/// Daily control settings shared by every strategy.
struct ControlConfig {
    double dpi_target_mol = 3.0;        // required daily photochemical integral
    GridSpec grid;
    PhotosynthesisParams params;
    double led_max_ppfd = 200.0;        // lamp output ceiling
    double led_efficacy_umol_per_j = 2.8;
    /// Once positive sun has been seen and the current reading is zero,
    /// prediction strategies treat the rest of the day as dark instead of
    /// trusting the model (the after-sunset top-up).
    bool zero_sun_after_sunset = true;

    Etr led_cap_etr() const;            // per-step ETR bound matching led_max_ppfd
    double cost_factor() const;         // cent/kWh -> cent/m^2 per step
    void validate() const;
};

struct StepRecord {
    int step = 0;             // 1-based
    double actual_ppfd = 0.0;
    double used_ppfd = 0.0;       // sun value assumed for this step when committing
    double predicted_ppfd = 0.0;  // latest forecast of this step before observing it
    double led_etr = 0.0;         // committed allocation x_t
    double led_ppfd = 0.0;
    double step_cost = 0.0;       // cent/m^2
};

struct DayResult {
    CivilDate date{};
    StrategyKind strategy{};
    std::vector<StepRecord> steps;
    double total_cost = 0.0;    // cent/m^2
    double realized_dpi = 0.0;  // mol m^-2 d^-1, from actual sun + committed LED
    bool dpi_met = false;
    bool feasible = true;       // every per-step solve could reach its budget
};

/// One simulated day under one strategy.
///
/// The first solve runs before sunrise on the climatology prior (when one
/// is given); every later step observes the actual sunlight, re-predicts
/// the remaining horizon, re-solves for the reduced budget, and commits
/// only the current step. baseline-oracle replays the day's actual values
/// as its forecast; heuristic ignores predictions and prices entirely.
/// `predictor` is required for bnn/markov and ignored otherwise.
DayResult run_day(StrategyKind strategy, const StepSeries& day,
                  const PriceSchedule& prices, const ControlConfig& config,
                  const Predictor* predictor = nullptr,
                  const ClimatologyProfile* prior = nullptr);

/// LED PPFD that tops sunlight up to a constant level, capped at the lamp
/// maximum.
Ppfd heuristic_step(Ppfd sun, Ppfd threshold, double led_max_ppfd);

/// Smallest constant PPFD whose ETR, held for every step, meets the daily
/// target. Throws std::domain_error when the per-step requirement sits at
/// or beyond the curve's asymptote.
Ppfd derive_heuristic_threshold(const ControlConfig& config);

/// Everything needed to evaluate one month: candidate test days plus the
/// models fitted on that month's training years.
struct MonthCampaign {
    int month = 0;
    std::vector<StepSeries> test_days;
    std::optional<BnnModel> bnn;
    std::optional<MarkovModel> markov;
    std::optional<ClimatologyProfile> prior;  // required with bnn or markov
};

struct CampaignConfig {
    std::vector<StrategyKind> strategies;
    int test_days_per_month = 3;
    std::uint64_t seed = 0;  // stream base for stochastic predictors
};

struct DayOutcome {
    int month = 0;
    DayResult result;
    /// One-step-ahead forecast quality over the day; prediction
    /// strategies only.
    std::optional<PredictionScore> prediction;
};

struct MonthStrategySummary {
    int month = 0;
    StrategyKind strategy{};
    int days = 0;
    double mean_cost = 0.0;
    std::optional<double> relative_to_baseline;  // mean_cost / baseline mean
    std::optional<double> mean_r_squared;
    std::optional<double> mean_rmse;
    int dpi_met_days = 0;
    int feasible_days = 0;
};

struct CampaignReport {
    std::vector<DayOutcome> days;      // ordered by (month, date, strategy)
    std::vector<MonthStrategySummary> summary;
};

/// Evenly spaced picks from `available` candidates (all of them when
/// `requested` is no smaller).
std::vector<int> select_test_day_indices(int available, int requested);

/// Runs every (selected day, strategy) pair and aggregates monthly means.
CampaignReport run_campaign(const std::vector<MonthCampaign>& months,
                            const PriceSchedule& prices, const ControlConfig& config,
                            const CampaignConfig& campaign);

}  // namespace helios
