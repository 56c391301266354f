#include "helios/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace helios {

namespace {

// All training days must share one grid length.
int common_length(const std::vector<StepSeries>& train) {
    if (train.empty())
        throw std::invalid_argument("training set must be nonempty");
    const auto T = train.front().values.size();
    for (const auto& day : train)
        if (day.values.size() != T)
            throw std::invalid_argument("training days have mismatched step counts");
    return static_cast<int>(T);
}

}  // namespace

ClimatologyProfile fit_climatology(const std::vector<StepSeries>& train) {
    const int T = common_length(train);
    ClimatologyProfile profile;
    profile.month = train.front().month;
    profile.mean_ppfd.assign(T, 0.0);
    for (const auto& day : train)
        for (int t = 0; t < T; ++t)
            profile.mean_ppfd[t] += day.values[t].sun_ppfd.value;
    for (double& v : profile.mean_ppfd) v /= static_cast<double>(train.size());
    return profile;
}

int MarkovModel::bin_of(double ppfd) const {
    const auto it = std::upper_bound(bin_edges.begin() + 1, bin_edges.end() - 1, ppfd);
    return static_cast<int>(it - bin_edges.begin()) - 1;
}

void MarkovModel::validate() const {
    if (n_bins < 2) throw std::invalid_argument("MarkovModel: n_bins must be >= 2");
    if (static_cast<int>(bin_edges.size()) != n_bins + 1 ||
        static_cast<int>(bin_centers.size()) != n_bins)
        throw std::invalid_argument("MarkovModel: inconsistent bin arrays");
    for (std::size_t i = 1; i < bin_edges.size(); ++i)
        if (!(bin_edges[i] > bin_edges[i - 1]))
            throw std::invalid_argument("MarkovModel: bin edges must increase strictly");
    for (const auto& matrix : transitions) {
        if (static_cast<int>(matrix.size()) != n_bins * n_bins)
            throw std::invalid_argument("MarkovModel: transition matrix size mismatch");
        for (int i = 0; i < n_bins; ++i) {
            double row = 0.0;
            for (int j = 0; j < n_bins; ++j) row += matrix[i * n_bins + j];
            if (std::abs(row - 1.0) > 1e-9)
                throw std::invalid_argument("MarkovModel: transition row does not sum to 1");
        }
    }
}

MarkovModel fit_markov(const std::vector<StepSeries>& train, int n_bins, double alpha) {
    if (n_bins < 2) throw std::invalid_argument("fit_markov: n_bins must be >= 2");
    if (alpha < 0.0) throw std::invalid_argument("fit_markov: alpha must be >= 0");
    const int T = common_length(train);

    double max_ppfd = 0.0;
    for (const auto& day : train)
        for (const auto& v : day.values)
            max_ppfd = std::max(max_ppfd, v.sun_ppfd.value);
    if (max_ppfd <= 0.0) max_ppfd = 1.0;  // all-dark training data still bins

    MarkovModel model;
    model.month = train.front().month;
    model.n_bins = n_bins;
    model.bin_edges.resize(n_bins + 1);
    model.bin_centers.resize(n_bins);
    for (int b = 0; b <= n_bins; ++b)
        model.bin_edges[b] = max_ppfd * static_cast<double>(b) / n_bins;
    for (int b = 0; b < n_bins; ++b)
        model.bin_centers[b] = 0.5 * (model.bin_edges[b] + model.bin_edges[b + 1]);

    model.transitions.assign(T - 1, std::vector<double>(n_bins * n_bins, 0.0));
    for (const auto& day : train) {
        for (int t = 0; t + 1 < T; ++t) {
            const int from = model.bin_of(day.values[t].sun_ppfd.value);
            const int to = model.bin_of(day.values[t + 1].sun_ppfd.value);
            model.transitions[t][from * n_bins + to] += 1.0;
        }
    }
    for (auto& matrix : model.transitions) {
        for (int i = 0; i < n_bins; ++i) {
            double row = 0.0;
            for (int j = 0; j < n_bins; ++j) row += matrix[i * n_bins + j];
            if (row == 0.0 && alpha == 0.0) {
                matrix[i * n_bins + i] = 1.0;  // never seen: stay put
                continue;
            }
            const double denom = row + alpha * n_bins;
            for (int j = 0; j < n_bins; ++j)
                matrix[i * n_bins + j] = (matrix[i * n_bins + j] + alpha) / denom;
        }
    }
    model.validate();
    return model;
}

std::vector<Ppfd> markov_predict(const MarkovModel& model, int current_step,
                                 Ppfd current, int horizon, MarkovDiagnostics* diag) {
    const int T = model.num_steps();
    if (current_step < 1 || current_step > T)
        throw std::invalid_argument("markov_predict: step out of range");
    if (horizon < 0 || current_step + horizon > T)
        throw std::invalid_argument("markov_predict: horizon past end of day");
    if (diag) diag->clamped_above_top_bin = current.value > model.bin_edges.back();

    std::vector<double> dist(model.n_bins, 0.0);
    dist[model.bin_of(current.value)] = 1.0;

    std::vector<Ppfd> predictions;
    predictions.reserve(horizon);
    std::vector<double> next(model.n_bins);
    for (int h = 0; h < horizon; ++h) {
        const auto& matrix = model.transitions[current_step - 1 + h];
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < model.n_bins; ++i) {
            if (dist[i] == 0.0) continue;
            for (int j = 0; j < model.n_bins; ++j)
                next[j] += dist[i] * matrix[i * model.n_bins + j];
        }
        dist.swap(next);
        double mean = 0.0;
        for (int j = 0; j < model.n_bins; ++j) mean += dist[j] * model.bin_centers[j];
        predictions.push_back(Ppfd(std::max(0.0, mean)));
    }
    return predictions;
}

ClimatologyPredictor::ClimatologyPredictor(ClimatologyProfile profile)
    : profile_(std::move(profile)) {
    if (profile_.mean_ppfd.empty())
        throw std::invalid_argument("ClimatologyPredictor: empty profile");
}

int ClimatologyPredictor::num_steps() const {
    return static_cast<int>(profile_.mean_ppfd.size());
}

std::vector<Ppfd> ClimatologyPredictor::predict_horizon(int current_step, Ppfd) const {
    const int T = num_steps();
    if (current_step < 1 || current_step > T)
        throw std::invalid_argument("ClimatologyPredictor: step out of range");
    std::vector<Ppfd> out;
    out.reserve(T - current_step);
    for (int t = current_step; t < T; ++t)
        out.push_back(Ppfd(std::max(0.0, profile_.mean_ppfd[t])));
    return out;
}

MarkovPredictor::MarkovPredictor(MarkovModel model) : model_(std::move(model)) {
    model_.validate();
}

int MarkovPredictor::num_steps() const { return model_.num_steps(); }

std::vector<Ppfd> MarkovPredictor::predict_horizon(int current_step, Ppfd current) const {
    return markov_predict(model_, current_step, current, num_steps() - current_step);
}

PerfectPredictor::PerfectPredictor(StepSeries day) : day_(std::move(day)) {
    if (day_.values.empty())
        throw std::invalid_argument("PerfectPredictor: empty day");
}

int PerfectPredictor::num_steps() const {
    return static_cast<int>(day_.values.size());
}

std::vector<Ppfd> PerfectPredictor::predict_horizon(int current_step, Ppfd) const {
    const int T = num_steps();
    if (current_step < 1 || current_step > T)
        throw std::invalid_argument("PerfectPredictor: step out of range");
    std::vector<Ppfd> out;
    out.reserve(T - current_step);
    for (int t = current_step; t < T; ++t)
        out.push_back(day_.values[t].sun_ppfd);
    return out;
}

}  // namespace helios
