#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "helios/data_io.hpp"
#include "helios/predictors.hpp"

namespace helios {

struct BnnConfig {
    std::vector<int> hidden_sizes{100, 100};  // ReLU layers
    int mc_samples_train = 1;    // weight draws per training step
    int mc_samples_predict = 10; // model draws averaged at prediction time
    double learning_rate = 1e-4;
    int epochs = 2000;
    int batch_size = 32;         // 0 = full batch
    double prior_std = 1.0;      // zero-mean Gaussian prior on output weights
    double obs_noise_std = 0.05; // Gaussian likelihood scale, normalized units
    double init_sigma = 0.05;    // posterior scale at initialization
    std::uint64_t seed = 0;

    void validate() const;
};

/// z-score statistics for the (sunlight, step) inputs and the next-step
/// sunlight target, taken from the training month.
struct Normalization {
    double s_mean = 0.0, s_std = 1.0;
    double t_mean = 0.0, t_std = 1.0;
    double y_mean = 0.0, y_std = 1.0;
};

struct DenseLayer {
    int in = 0, out = 0;
    std::vector<double> weights;  // row-major [out][in]
    std::vector<double> bias;     // [out]
};

/// Single-unit output layer with a factorized Gaussian posterior over its
/// weights and bias: w_j = mu_j + softplus(rho_j) * xi_j, xi ~ N(0,1).
struct VariationalLayer {
    int in = 0;
    std::vector<double> mu;   // in + 1 entries, bias last
    std::vector<double> rho;  // same shape; sigma = softplus(rho) > 0
};

/// One-step sunlight model: inputs (s_t, t), output s_{t+1}. Two plain
/// dense ReLU layers feed the variational output unit.
struct BnnModel {
    int month = 0;
    BnnConfig config;
    Normalization norm;
    DenseLayer hidden1, hidden2;
    VariationalLayer output;
};

/// Normalized supervised pairs for one month.
struct TrainingBatch {
    std::vector<std::array<double, 2>> inputs;  // (s_t, t), normalized
    std::vector<double> targets;                // s_{t+1}, normalized
};

Normalization compute_normalization(const std::vector<StepSeries>& train);
TrainingBatch make_training_batch(const std::vector<StepSeries>& train,
                                  const Normalization& norm);

/// Fresh model with fan-in-scaled dense weights and the posterior at
/// (mu near 0, sigma = init_sigma). Deterministic given config.seed.
BnnModel init_model(const BnnConfig& config);

/// One stochastic forward pass on a normalized input; the output-layer
/// weights are sampled once. Returns the denormalized prediction.
double forward_sample(const BnnModel& model, double s_norm, double t_norm,
                      std::mt19937_64& rng);

/// Monte-Carlo variational free energy of the batch:
///   mean_i [ kl_weight * (log q(w_i) - log P(w_i)) - log P(batch | w_i) ]
/// with Gaussian posterior, prior, and likelihood. kl_weight spreads the
/// KL terms across minibatches (1/num_batches).
double elbo_loss(const BnnModel& model, const TrainingBatch& batch, int n_samples,
                 std::mt19937_64& rng, double kl_weight = 1.0);

/// elbo_loss plus analytic gradients for every trainable parameter,
/// obtained by backpropagation through the sampling reparameterization.
struct ElboGradients {
    double loss = 0.0;
    std::vector<double> hidden1_w, hidden1_b;
    std::vector<double> hidden2_w, hidden2_b;
    std::vector<double> mu, rho;
};
ElboGradients elbo_with_gradients(const BnnModel& model, const TrainingBatch& batch,
                                  int n_samples, std::mt19937_64& rng,
                                  double kl_weight = 1.0);

struct TrainResult {
    BnnModel model;
    std::vector<double> loss_history;  // one mean loss per epoch
};

/// Adam on the free energy for config.epochs epochs. Normalization is
/// computed from the dataset. Deterministic given config.seed; throws on a
/// non-finite loss.
TrainResult train(BnnModel model, const std::vector<StepSeries>& dataset,
                  const BnnConfig& config);

/// Average of n_draws stochastic forward passes at (sunlight, step),
/// clamped below at zero.
Ppfd predict_mean(const BnnModel& model, Ppfd sunlight, int step, int n_draws,
                  std::mt19937_64& rng);

/// Autoregressive rollout: each one-step mean prediction feeds the next
/// input. Returns predictions for steps current_step+1 .. num_steps.
std::vector<Ppfd> predict_horizon(const BnnModel& model, int current_step,
                                  Ppfd current, int num_steps, std::mt19937_64& rng);

/// Predictor adapter. Each predict call runs on an RNG stream derived from
/// (seed, current_step), so results do not depend on call order.
class BnnPredictor : public Predictor {
public:
    BnnPredictor(BnnModel model, int num_steps, std::uint64_t seed);
    int num_steps() const override;
    std::vector<Ppfd> predict_horizon(int current_step, Ppfd current) const override;

private:
    BnnModel model_;
    int num_steps_ = 0;
    std::uint64_t seed_ = 0;
};

}  // namespace helios
