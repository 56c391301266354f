#include "helios/bnn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "helios/seeds.hpp"

namespace helios {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * ln(2*pi)

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double softplus_prime(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double inv_softplus(double s) { return s > 30.0 ? s : std::log(std::expm1(s)); }

double relu(double x) { return x > 0.0 ? x : 0.0; }
double relu_prime(double x) { return x > 0.0 ? 1.0 : 0.0; }

void dense_forward(const DenseLayer& layer, const double* in, double* pre, double* post) {
    for (int o = 0; o < layer.out; ++o) {
        double acc = layer.bias[o];
        const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) acc += row[i] * in[i];
        pre[o] = acc;
        post[o] = relu(acc);
    }
}

// Activations for a whole batch; hidden layers are deterministic so this is
// shared across Monte-Carlo weight draws.
struct BatchActivations {
    int n = 0, h1 = 0, h2 = 0;
    std::vector<double> pre1, post1, pre2, post2;  // [n][h]
};

BatchActivations run_hidden(const BnnModel& model, const TrainingBatch& batch) {
    BatchActivations act;
    act.n = static_cast<int>(batch.inputs.size());
    act.h1 = model.hidden1.out;
    act.h2 = model.hidden2.out;
    act.pre1.resize(static_cast<std::size_t>(act.n) * act.h1);
    act.post1.resize(act.pre1.size());
    act.pre2.resize(static_cast<std::size_t>(act.n) * act.h2);
    act.post2.resize(act.pre2.size());
    for (int p = 0; p < act.n; ++p) {
        dense_forward(model.hidden1, batch.inputs[p].data(),
                      act.pre1.data() + static_cast<std::size_t>(p) * act.h1,
                      act.post1.data() + static_cast<std::size_t>(p) * act.h1);
        dense_forward(model.hidden2, act.post1.data() + static_cast<std::size_t>(p) * act.h1,
                      act.pre2.data() + static_cast<std::size_t>(p) * act.h2,
                      act.post2.data() + static_cast<std::size_t>(p) * act.h2);
    }
    return act;
}

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::vector<double>& param, const std::vector<double>& grad,
               AdamState& state, int t, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < param.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        param[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps);
    }
}

}  // namespace

void BnnConfig::validate() const {
    if (hidden_sizes.size() != 2 || hidden_sizes[0] < 1 || hidden_sizes[1] < 1)
        throw std::invalid_argument("BnnConfig: expected two positive hidden sizes");
    if (mc_samples_train < 1 || mc_samples_predict < 1)
        throw std::invalid_argument("BnnConfig: Monte-Carlo sample counts must be >= 1");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("BnnConfig: learning_rate must be > 0");
    if (epochs < 0) throw std::invalid_argument("BnnConfig: epochs must be >= 0");
    if (batch_size < 0) throw std::invalid_argument("BnnConfig: batch_size must be >= 0");
    if (!(prior_std > 0.0) || !(obs_noise_std > 0.0) || !(init_sigma > 0.0))
        throw std::invalid_argument("BnnConfig: scales must be > 0");
}

Normalization compute_normalization(const std::vector<StepSeries>& train) {
    if (train.empty())
        throw std::invalid_argument("compute_normalization: empty training set");
    double s_sum = 0, s_sq = 0, t_sum = 0, t_sq = 0, y_sum = 0, y_sq = 0;
    std::size_t n = 0;
    for (const auto& day : train) {
        for (std::size_t t = 0; t + 1 < day.values.size(); ++t) {
            const double s = day.values[t].sun_ppfd.value;
            const double step = day.values[t].step;
            const double y = day.values[t + 1].sun_ppfd.value;
            s_sum += s; s_sq += s * s;
            t_sum += step; t_sq += step * step;
            y_sum += y; y_sq += y * y;
            ++n;
        }
    }
    if (n == 0)
        throw std::invalid_argument("compute_normalization: days too short for pairs");
    const auto finish = [n](double sum, double sq, double& mean, double& std) {
        mean = sum / n;
        const double var = std::max(0.0, sq / n - mean * mean);
        std = var > 0.0 ? std::sqrt(var) : 1.0;
    };
    Normalization norm;
    finish(s_sum, s_sq, norm.s_mean, norm.s_std);
    finish(t_sum, t_sq, norm.t_mean, norm.t_std);
    finish(y_sum, y_sq, norm.y_mean, norm.y_std);
    return norm;
}

TrainingBatch make_training_batch(const std::vector<StepSeries>& train,
                                  const Normalization& norm) {
    TrainingBatch batch;
    for (const auto& day : train) {
        for (std::size_t t = 0; t + 1 < day.values.size(); ++t) {
            batch.inputs.push_back(
                {(day.values[t].sun_ppfd.value - norm.s_mean) / norm.s_std,
                 (day.values[t].step - norm.t_mean) / norm.t_std});
            batch.targets.push_back(
                (day.values[t + 1].sun_ppfd.value - norm.y_mean) / norm.y_std);
        }
    }
    return batch;
}

BnnModel init_model(const BnnConfig& config) {
    config.validate();
    std::mt19937_64 rng(mix_seed(config.seed, 0));
    const auto glorot = [&rng](DenseLayer& layer, int in, int out) {
        layer.in = in;
        layer.out = out;
        layer.weights.resize(static_cast<std::size_t>(in) * out);
        layer.bias.assign(out, 0.0);
        const double limit = std::sqrt(6.0 / (in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : layer.weights) w = dist(rng);
    };

    BnnModel model;
    model.config = config;
    glorot(model.hidden1, 2, config.hidden_sizes[0]);
    glorot(model.hidden2, config.hidden_sizes[0], config.hidden_sizes[1]);

    const int in = config.hidden_sizes[1];
    model.output.in = in;
    model.output.mu.assign(in + 1, 0.0);
    model.output.rho.assign(in + 1, inv_softplus(config.init_sigma));
    const double limit = std::sqrt(6.0 / (in + 1));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (int j = 0; j < in; ++j) model.output.mu[j] = dist(rng);  // bias mu stays 0
    return model;
}

double forward_sample(const BnnModel& model, double s_norm, double t_norm,
                      std::mt19937_64& rng) {
    const double x[2] = {s_norm, t_norm};
    std::vector<double> pre1(model.hidden1.out), post1(model.hidden1.out);
    std::vector<double> pre2(model.hidden2.out), post2(model.hidden2.out);
    dense_forward(model.hidden1, x, pre1.data(), post1.data());
    dense_forward(model.hidden2, post1.data(), pre2.data(), post2.data());

    std::normal_distribution<double> gauss(0.0, 1.0);
    const int nw = model.output.in + 1;
    double y = 0.0;
    for (int j = 0; j < nw; ++j) {
        const double sigma = softplus(model.output.rho[j]);
        const double w = model.output.mu[j] + sigma * gauss(rng);
        y += j < model.output.in ? w * post2[j] : w;
    }
    return y * model.norm.y_std + model.norm.y_mean;
}

namespace {

// Shared core of elbo_loss / elbo_with_gradients. Gradient buffers may be
// null for loss-only evaluation.
double elbo_core(const BnnModel& model, const TrainingBatch& batch, int n_samples,
                 std::mt19937_64& rng, double kl_weight, ElboGradients* grads) {
    if (batch.inputs.empty() || batch.inputs.size() != batch.targets.size())
        throw std::invalid_argument("elbo: empty or mismatched batch");
    if (n_samples < 1) throw std::invalid_argument("elbo: n_samples must be >= 1");

    const auto& out = model.output;
    const int nw = out.in + 1;
    const double prior_var = model.config.prior_std * model.config.prior_std;
    const double obs_var = model.config.obs_noise_std * model.config.obs_noise_std;
    const BatchActivations act = run_hidden(model, batch);

    std::vector<double> sigma(nw), xi(nw), w(nw);
    std::vector<double> d_post2(act.h2), d_pre2(act.h2), d_post1(act.h1), d_pre1(act.h1);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double inv_n = 1.0 / n_samples;
    double loss = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        for (int j = 0; j < nw; ++j) {
            sigma[j] = softplus(out.rho[j]);
            xi[j] = gauss(rng);
            w[j] = out.mu[j] + sigma[j] * xi[j];
        }

        // kl_weight * (log q(w) - log P(w))
        double sample_loss = 0.0;
        for (int j = 0; j < nw; ++j) {
            const double log_q = -kHalfLog2Pi - std::log(sigma[j]) - 0.5 * xi[j] * xi[j];
            const double log_p = -kHalfLog2Pi - std::log(model.config.prior_std) -
                                 w[j] * w[j] / (2.0 * prior_var);
            sample_loss += kl_weight * (log_q - log_p);
            if (grads) {
                const double d_w = kl_weight * (w[j] / prior_var);  // from -log P
                grads->mu[j] += d_w * inv_n;
                grads->rho[j] += (d_w * xi[j] - kl_weight / sigma[j]) *
                                 softplus_prime(out.rho[j]) * inv_n;
            }
        }

        // -log P(batch | w), with backprop through the sampled weights
        for (int p = 0; p < act.n; ++p) {
            const double* h2 = act.post2.data() + static_cast<std::size_t>(p) * act.h2;
            double f = w[nw - 1];
            for (int j = 0; j < out.in; ++j) f += w[j] * h2[j];
            const double r = f - batch.targets[p];
            sample_loss += kHalfLog2Pi + std::log(model.config.obs_noise_std) +
                           r * r / (2.0 * obs_var);
            if (!grads) continue;

            const double delta = r / obs_var;  // d(-log lik)/d f
            for (int j = 0; j < out.in; ++j) {
                const double d_w = delta * h2[j];
                grads->mu[j] += d_w * inv_n;
                grads->rho[j] += d_w * xi[j] * softplus_prime(out.rho[j]) * inv_n;
            }
            grads->mu[nw - 1] += delta * inv_n;
            grads->rho[nw - 1] += delta * xi[nw - 1] * softplus_prime(out.rho[nw - 1]) * inv_n;

            const double* pre2 = act.pre2.data() + static_cast<std::size_t>(p) * act.h2;
            const double* post1 = act.post1.data() + static_cast<std::size_t>(p) * act.h1;
            const double* pre1 = act.pre1.data() + static_cast<std::size_t>(p) * act.h1;
            for (int j = 0; j < act.h2; ++j)
                d_pre2[j] = delta * w[j] * relu_prime(pre2[j]) * inv_n;
            for (int j = 0; j < act.h2; ++j) {
                if (d_pre2[j] == 0.0) continue;
                double* g_row = grads->hidden2_w.data() + static_cast<std::size_t>(j) * act.h1;
                for (int i = 0; i < act.h1; ++i) g_row[i] += d_pre2[j] * post1[i];
                grads->hidden2_b[j] += d_pre2[j];
            }
            std::fill(d_post1.begin(), d_post1.end(), 0.0);
            for (int j = 0; j < act.h2; ++j) {
                if (d_pre2[j] == 0.0) continue;
                const double* w_row =
                    model.hidden2.weights.data() + static_cast<std::size_t>(j) * act.h1;
                for (int i = 0; i < act.h1; ++i) d_post1[i] += d_pre2[j] * w_row[i];
            }
            for (int i = 0; i < act.h1; ++i)
                d_pre1[i] = d_post1[i] * relu_prime(pre1[i]);
            for (int i = 0; i < act.h1; ++i) {
                if (d_pre1[i] == 0.0) continue;
                grads->hidden1_w[static_cast<std::size_t>(i) * 2] +=
                    d_pre1[i] * batch.inputs[p][0];
                grads->hidden1_w[static_cast<std::size_t>(i) * 2 + 1] +=
                    d_pre1[i] * batch.inputs[p][1];
                grads->hidden1_b[i] += d_pre1[i];
            }
        }
        loss += sample_loss * inv_n;
    }
    if (grads) grads->loss = loss;
    return loss;
}

}  // namespace

double elbo_loss(const BnnModel& model, const TrainingBatch& batch, int n_samples,
                 std::mt19937_64& rng, double kl_weight) {
    return elbo_core(model, batch, n_samples, rng, kl_weight, nullptr);
}

ElboGradients elbo_with_gradients(const BnnModel& model, const TrainingBatch& batch,
                                  int n_samples, std::mt19937_64& rng,
                                  double kl_weight) {
    ElboGradients grads;
    grads.hidden1_w.assign(model.hidden1.weights.size(), 0.0);
    grads.hidden1_b.assign(model.hidden1.bias.size(), 0.0);
    grads.hidden2_w.assign(model.hidden2.weights.size(), 0.0);
    grads.hidden2_b.assign(model.hidden2.bias.size(), 0.0);
    grads.mu.assign(model.output.mu.size(), 0.0);
    grads.rho.assign(model.output.rho.size(), 0.0);
    elbo_core(model, batch, n_samples, rng, kl_weight, &grads);
    return grads;
}

TrainResult train(BnnModel model, const std::vector<StepSeries>& dataset,
                  const BnnConfig& config) {
    config.validate();
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    if (config.epochs == 0) return {std::move(model), {}};

    model.config = config;
    model.norm = compute_normalization(dataset);
    const TrainingBatch all = make_training_batch(dataset, model.norm);
    const int total = static_cast<int>(all.inputs.size());
    const int batch_size = config.batch_size <= 0
                               ? total
                               : std::min(config.batch_size, total);
    const int num_batches = (total + batch_size - 1) / batch_size;
    const double kl_weight = 1.0 / num_batches;

    std::mt19937_64 rng(mix_seed(config.seed, 1));
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);

    AdamState s_h1w(model.hidden1.weights.size()), s_h1b(model.hidden1.bias.size());
    AdamState s_h2w(model.hidden2.weights.size()), s_h2b(model.hidden2.bias.size());
    AdamState s_mu(model.output.mu.size()), s_rho(model.output.rho.size());

    TrainingBatch mini;
    std::vector<double> history;
    history.reserve(config.epochs);
    int step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (int b = 0; b < num_batches; ++b) {
            const int lo = b * batch_size;
            const int hi = std::min(total, lo + batch_size);
            mini.inputs.assign(all.inputs.begin() + lo, all.inputs.begin() + hi);
            mini.targets.assign(all.targets.begin() + lo, all.targets.begin() + hi);
            for (int idx = lo; idx < hi; ++idx) {
                mini.inputs[idx - lo] = all.inputs[order[idx]];
                mini.targets[idx - lo] = all.targets[order[idx]];
            }
            const ElboGradients g =
                elbo_with_gradients(model, mini, config.mc_samples_train, rng, kl_weight);
            if (!std::isfinite(g.loss))
                throw std::runtime_error("bnn train: loss diverged (non-finite) at epoch " +
                                         std::to_string(epoch + 1));
            ++step;
            adam_step(model.hidden1.weights, g.hidden1_w, s_h1w, step, config.learning_rate);
            adam_step(model.hidden1.bias, g.hidden1_b, s_h1b, step, config.learning_rate);
            adam_step(model.hidden2.weights, g.hidden2_w, s_h2w, step, config.learning_rate);
            adam_step(model.hidden2.bias, g.hidden2_b, s_h2b, step, config.learning_rate);
            adam_step(model.output.mu, g.mu, s_mu, step, config.learning_rate);
            adam_step(model.output.rho, g.rho, s_rho, step, config.learning_rate);
            epoch_loss += g.loss;
        }
        history.push_back(epoch_loss / num_batches);
    }
    return {std::move(model), std::move(history)};
}

Ppfd predict_mean(const BnnModel& model, Ppfd sunlight, int step, int n_draws,
                  std::mt19937_64& rng) {
    if (n_draws < 1) throw std::invalid_argument("predict_mean: n_draws must be >= 1");
    const double s_norm = (sunlight.value - model.norm.s_mean) / model.norm.s_std;
    const double t_norm = (step - model.norm.t_mean) / model.norm.t_std;
    double sum = 0.0;
    for (int d = 0; d < n_draws; ++d)
        sum += forward_sample(model, s_norm, t_norm, rng);
    return Ppfd(std::max(0.0, sum / n_draws));
}

std::vector<Ppfd> predict_horizon(const BnnModel& model, int current_step,
                                  Ppfd current, int num_steps, std::mt19937_64& rng) {
    if (current_step < 1 || current_step > num_steps)
        throw std::invalid_argument("predict_horizon: step out of range");
    std::vector<Ppfd> out;
    out.reserve(num_steps - current_step);
    Ppfd state = current;
    for (int t = current_step; t < num_steps; ++t) {
        state = predict_mean(model, state, t, model.config.mc_samples_predict, rng);
        out.push_back(state);
    }
    return out;
}

BnnPredictor::BnnPredictor(BnnModel model, int num_steps, std::uint64_t seed)
    : model_(std::move(model)), num_steps_(num_steps), seed_(seed) {
    if (num_steps_ < 1) throw std::invalid_argument("BnnPredictor: num_steps must be >= 1");
}

int BnnPredictor::num_steps() const { return num_steps_; }

std::vector<Ppfd> BnnPredictor::predict_horizon(int current_step, Ppfd current) const {
    std::mt19937_64 rng(mix_seed(seed_, static_cast<std::uint64_t>(current_step)));
    return helios::predict_horizon(model_, current_step, current, num_steps_, rng);
}

}  // namespace helios
