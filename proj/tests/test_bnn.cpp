#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "helios/bnn.hpp"

using namespace helios;

namespace {

const PhotosynthesisParams kParams{};

StepSeries make_series(int month, const std::vector<double>& ppfd) {
    StepSeries day;
    day.month = month;
    day.step_seconds = 900;
    for (std::size_t i = 0; i < ppfd.size(); ++i) {
        StepSample sample;
        sample.step = static_cast<int>(i) + 1;
        sample.sun_ppfd = Ppfd(ppfd[i]);
        sample.sun_etr = etr_from_ppfd(sample.sun_ppfd, kParams);
        day.values.push_back(sample);
    }
    return day;
}

std::vector<StepSeries> half_sine_days(int n_days, int T, double peak) {
    std::vector<StepSeries> days;
    for (int d = 0; d < n_days; ++d) {
        std::vector<double> ppfd(T, 0.0);
        for (int t = 0; t < T; ++t) {
            const double phase = (t + 0.5) / T;
            ppfd[t] = std::max(0.0, peak * std::sin(phase * M_PI));
        }
        days.push_back(make_series(6, ppfd));
    }
    return days;
}

// Model with all-zero hidden layers; the output reduces to its bias weight.
BnnModel constant_model(double bias_mu, double sigma) {
    BnnModel model;
    model.config.hidden_sizes = {1, 1};
    model.hidden1 = DenseLayer{2, 1, {0.0, 0.0}, {0.0}};
    model.hidden2 = DenseLayer{1, 1, {0.0}, {0.0}};
    model.output.in = 1;
    model.output.mu = {0.0, bias_mu};
    const double rho = std::log(std::expm1(sigma));
    model.output.rho = {rho, rho};
    return model;  // identity normalization
}

}  // namespace

TEST_CASE("config validation") {
    BnnConfig config;
    CHECK_NOTHROW(config.validate());
    config.hidden_sizes = {100};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = BnnConfig{};
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = BnnConfig{};
    config.obs_noise_std = -1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("normalization statistics") {
    const std::vector<StepSeries> train{make_series(6, {0.0, 100.0, 200.0})};
    const Normalization norm = compute_normalization(train);
    // Pairs: (s=0, t=1) -> 100 and (s=100, t=2) -> 200.
    CHECK(norm.s_mean == doctest::Approx(50.0));
    CHECK(norm.s_std == doctest::Approx(50.0));
    CHECK(norm.t_mean == doctest::Approx(1.5));
    CHECK(norm.t_std == doctest::Approx(0.5));
    CHECK(norm.y_mean == doctest::Approx(150.0));
    CHECK(norm.y_std == doctest::Approx(50.0));

    const TrainingBatch batch = make_training_batch(train, norm);
    REQUIRE(batch.inputs.size() == 2);
    CHECK(batch.inputs[0][0] == doctest::Approx(-1.0));
    CHECK(batch.inputs[0][1] == doctest::Approx(-1.0));
    CHECK(batch.targets[0] == doctest::Approx(-1.0));
    CHECK(batch.inputs[1][0] == doctest::Approx(1.0));
    CHECK(batch.targets[1] == doctest::Approx(1.0));
}

TEST_CASE("zero-variance features fall back to unit scale") {
    const Normalization norm =
        compute_normalization({make_series(6, {5.0, 5.0, 5.0})});
    CHECK(norm.s_std == 1.0);
    CHECK(norm.y_std == 1.0);
    CHECK(norm.s_mean == doctest::Approx(5.0));
}

TEST_CASE("normalization rejects unusable datasets") {
    CHECK_THROWS_AS(compute_normalization({}), std::invalid_argument);
    CHECK_THROWS_AS(compute_normalization({make_series(6, {1.0})}),
                    std::invalid_argument);
}

TEST_CASE("initialization") {
    BnnConfig config;
    config.hidden_sizes = {6, 5};
    config.seed = 11;
    const BnnModel a = init_model(config);
    const BnnModel b = init_model(config);
    CHECK(a.hidden1.weights == b.hidden1.weights);
    CHECK(a.output.mu == b.output.mu);

    config.seed = 12;
    const BnnModel c = init_model(config);
    CHECK(a.hidden1.weights != c.hidden1.weights);

    CHECK(a.hidden1.in == 2);
    CHECK(a.hidden1.out == 6);
    CHECK(a.hidden2.out == 5);
    CHECK(a.output.in == 5);
    REQUIRE(a.output.rho.size() == 6);
    for (double rho : a.output.rho) {
        const double sigma = std::log1p(std::exp(rho));
        CHECK(sigma == doctest::Approx(config.init_sigma).epsilon(1e-9));
    }
    CHECK(a.output.mu.back() == 0.0);
    for (double bias : a.hidden1.bias) CHECK(bias == 0.0);
}

TEST_CASE("free energy of a near-deterministic constant model") {
    const BnnModel model = constant_model(0.3, 1e-9);
    TrainingBatch batch;
    batch.inputs = {{0.0, 0.0}, {1.0, -1.0}};
    batch.targets = {0.1, 0.5};
    // Pure Gaussian NLL at f = 0.3 with obs std 0.5 (kl weight zero):
    // 2 * (0.5 ln 2*pi + ln 0.5) + (0.04 + 0.04) / (2 * 0.25).
    BnnModel noisy = model;
    noisy.config.obs_noise_std = 0.5;
    std::mt19937_64 rng(99);
    const double loss = elbo_loss(noisy, batch, 1, rng, 0.0);
    const double expected = 2.0 * (0.9189385332046727 + std::log(0.5)) + 0.16;
    CHECK(loss == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("analytic gradients match central differences") {
    BnnConfig config;
    config.hidden_sizes = {5, 4};
    config.seed = 3;
    config.obs_noise_std = 0.3;
    config.prior_std = 0.8;
    BnnModel model = init_model(config);
    // Move the posterior off its symmetric start.
    std::mt19937_64 jitter(17);
    std::normal_distribution<double> gauss(0.0, 0.2);
    for (double& m : model.output.mu) m += gauss(jitter);
    for (double& b : model.hidden1.bias) b += gauss(jitter);
    for (double& b : model.hidden2.bias) b += gauss(jitter);

    TrainingBatch batch;
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    for (int p = 0; p < 7; ++p) {
        batch.inputs.push_back({uni(jitter), uni(jitter)});
        batch.targets.push_back(uni(jitter));
    }

    const int n_samples = 3;
    const double kl_weight = 0.37;
    const std::uint64_t rng_seed = 123;  // frozen noise shared by every evaluation

    std::mt19937_64 rng(rng_seed);
    const ElboGradients grads =
        elbo_with_gradients(model, batch, n_samples, rng, kl_weight);

    const auto fd_check = [&](std::vector<double>& param, const std::vector<double>& grad) {
        REQUIRE(param.size() == grad.size());
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
            CHECK(std::abs(grad[i] - fd) <=
                  1e-4 * std::max({1.0, std::abs(grad[i]), std::abs(fd)}));
        }
    };
    fd_check(model.hidden1.weights, grads.hidden1_w);
    fd_check(model.hidden1.bias, grads.hidden1_b);
    fd_check(model.hidden2.weights, grads.hidden2_w);
    fd_check(model.hidden2.bias, grads.hidden2_b);
    fd_check(model.output.mu, grads.mu);
    fd_check(model.output.rho, grads.rho);
}

TEST_CASE("training") {
    const auto days = half_sine_days(3, 16, 500.0);
    BnnConfig config;
    config.hidden_sizes = {8, 8};
    config.learning_rate = 1e-2;
    config.epochs = 150;
    config.batch_size = 0;  // full batch
    config.seed = 5;

    SUBCASE("zero epochs leave the model untouched") {
        const BnnModel before = init_model(config);
        BnnConfig frozen = config;
        frozen.epochs = 0;
        const TrainResult result = train(before, days, frozen);
        CHECK(result.loss_history.empty());
        CHECK(result.model.hidden1.weights == before.hidden1.weights);
        CHECK(result.model.output.mu == before.output.mu);
    }

    SUBCASE("free energy trends down and runs are reproducible") {
        const TrainResult a = train(init_model(config), days, config);
        REQUIRE(a.loss_history.size() == 150);
        for (double loss : a.loss_history) CHECK(std::isfinite(loss));
        const auto mean10 = [&](std::size_t from) {
            return std::accumulate(a.loss_history.begin() + from,
                                   a.loss_history.begin() + from + 10, 0.0) /
                   10.0;
        };
        CHECK(mean10(140) < mean10(0));

        const TrainResult b = train(init_model(config), days, config);
        CHECK(a.model.hidden1.weights == b.model.hidden1.weights);
        CHECK(a.model.output.mu == b.model.output.mu);
        CHECK(a.model.output.rho == b.model.output.rho);
        CHECK(a.loss_history == b.loss_history);
    }

    SUBCASE("an absurd learning rate is reported, not silently returned") {
        BnnConfig wild = config;
        wild.learning_rate = 1e12;
        wild.epochs = 10;
        CHECK_THROWS_AS(train(init_model(wild), days, wild), std::runtime_error);
    }

    CHECK_THROWS_AS(train(init_model(config), {}, config), std::invalid_argument);
}

TEST_CASE("prediction clamps at zero sunlight") {
    const BnnModel model = constant_model(-5.0, 1e-9);
    std::mt19937_64 rng(1);
    CHECK(predict_mean(model, Ppfd(0.0), 1, 10, rng).value == 0.0);
}

TEST_CASE("rollout feeds each prediction back in") {
    const BnnModel model = constant_model(0.7, 1e-9);
    std::mt19937_64 rng(1);
    const auto path = predict_horizon(model, 2, Ppfd(300.0), 6, rng);
    REQUIRE(path.size() == 4);
    for (const Ppfd& p : path) CHECK(p.value == doctest::Approx(0.7).epsilon(1e-6));
    CHECK_THROWS_AS(predict_horizon(model, 0, Ppfd(0.0), 6, rng), std::invalid_argument);
    CHECK_THROWS_AS(predict_horizon(model, 7, Ppfd(0.0), 6, rng), std::invalid_argument);
}

TEST_CASE("predictor results do not depend on call order") {
    BnnConfig config;
    config.hidden_sizes = {6, 5};
    config.seed = 21;
    BnnModel model = init_model(config);
    model.norm = {100.0, 80.0, 8.0, 4.0, 100.0, 80.0};

    const BnnPredictor predictor(model, 12, 404);
    const auto straight = predictor.predict_horizon(5, Ppfd(120.0));
    predictor.predict_horizon(1, Ppfd(0.0));
    predictor.predict_horizon(9, Ppfd(300.0));
    const auto after_detour = predictor.predict_horizon(5, Ppfd(120.0));
    REQUIRE(straight.size() == 7);
    REQUIRE(after_detour.size() == 7);
    for (std::size_t i = 0; i < straight.size(); ++i)
        CHECK(straight[i].value == after_detour[i].value);

    const BnnPredictor twin(model, 12, 404);
    const auto twin_run = twin.predict_horizon(5, Ppfd(120.0));
    for (std::size_t i = 0; i < straight.size(); ++i)
        CHECK(straight[i].value == twin_run[i].value);
}
