#pragma once

#include <memory>
#include <vector>

#include "helios/data_io.hpp"
#include "helios/light_model.hpp"

namespace helios {

/// Sunlight forecaster consulted by the receding-horizon controller.
/// Implementations are immutable once built; predict calls are const.
class Predictor {
public:
    virtual ~Predictor() = default;

    /// Number of control steps in a day (T).
    virtual int num_steps() const = 0;

    /// Predicted sunlight PPFD for steps current_step+1 .. T, given the
    /// observation at current_step. Output length is T - current_step;
    /// entries are nonnegative and finite.
    virtual std::vector<Ppfd> predict_horizon(int current_step, Ppfd current) const = 0;
};

/// Per-step mean of the training days; the pre-sunrise prior.
struct ClimatologyProfile {
    int month = 0;
    std::vector<double> mean_ppfd;  // length T
};

ClimatologyProfile fit_climatology(const std::vector<StepSeries>& train);

/// Time-inhomogeneous chain over PPFD bins: transitions[t-1] maps the state
/// distribution at step t to step t+1 (row-stochastic, n_bins x n_bins,
/// row-major). Bins cover [0, max observed PPFD] uniformly.
struct MarkovModel {
    int month = 0;
    int n_bins = 0;
    std::vector<double> bin_edges;    // n_bins + 1, strictly increasing
    std::vector<double> bin_centers;  // n_bins
    std::vector<std::vector<double>> transitions;  // T-1 matrices

    int num_steps() const { return static_cast<int>(transitions.size()) + 1; }
    int bin_of(double ppfd) const;  // clamped into [0, n_bins-1]
    void validate() const;
};

/// Laplace-smoothed empirical transition frequencies. With alpha = 0, rows
/// that were never observed fall back to a self-transition.
MarkovModel fit_markov(const std::vector<StepSeries>& train, int n_bins,
                       double alpha = 1.0);

struct MarkovDiagnostics {
    bool clamped_above_top_bin = false;
};

/// Expected PPFD per future step: a point mass on the current bin pushed
/// through the per-step matrices, reported as the distribution mean.
std::vector<Ppfd> markov_predict(const MarkovModel& model, int current_step,
                                 Ppfd current, int horizon,
                                 MarkovDiagnostics* diag = nullptr);

class ClimatologyPredictor : public Predictor {
public:
    explicit ClimatologyPredictor(ClimatologyProfile profile);
    int num_steps() const override;
    std::vector<Ppfd> predict_horizon(int current_step, Ppfd current) const override;

private:
    ClimatologyProfile profile_;
};

class MarkovPredictor : public Predictor {
public:
    explicit MarkovPredictor(MarkovModel model);
    int num_steps() const override;
    std::vector<Ppfd> predict_horizon(int current_step, Ppfd current) const override;

private:
    MarkovModel model_;
};

/// Replays the day's actual values; the full-information reference.
class PerfectPredictor : public Predictor {
public:
    explicit PerfectPredictor(StepSeries day);
    int num_steps() const override;
    std::vector<Ppfd> predict_horizon(int current_step, Ppfd current) const override;

private:
    StepSeries day_;
};

}  // namespace helios
