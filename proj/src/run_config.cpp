#include "helios/run_config.hpp"

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

namespace helios {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& item : obj.items())
        if (!known.count(item.key()))
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
}

void load_grid(const json& j, GridSpec& grid) {
    reject_unknown_keys(j, {"start_hour", "hours", "step_seconds"}, "photoperiod");
    if (j.contains("start_hour"))
        grid.photoperiod_start =
            static_cast<int>(j.at("start_hour").get<double>() * 3600.0);
    if (j.contains("hours"))
        grid.photoperiod_seconds = static_cast<int>(j.at("hours").get<double>() * 3600.0);
    if (j.contains("step_seconds")) grid.step_seconds = j.at("step_seconds").get<int>();
}

void load_bnn(const json& j, BnnConfig& bnn) {
    reject_unknown_keys(j,
                        {"hidden_sizes", "mc_samples_train", "mc_samples_predict",
                         "learning_rate", "epochs", "batch_size", "prior_std",
                         "obs_noise_std", "init_sigma"},
                        "bnn");
    if (j.contains("hidden_sizes")) bnn.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
    if (j.contains("mc_samples_train")) bnn.mc_samples_train = j.at("mc_samples_train").get<int>();
    if (j.contains("mc_samples_predict")) bnn.mc_samples_predict = j.at("mc_samples_predict").get<int>();
    if (j.contains("learning_rate")) bnn.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("epochs")) bnn.epochs = j.at("epochs").get<int>();
    if (j.contains("batch_size")) bnn.batch_size = j.at("batch_size").get<int>();
    if (j.contains("prior_std")) bnn.prior_std = j.at("prior_std").get<double>();
    if (j.contains("obs_noise_std")) bnn.obs_noise_std = j.at("obs_noise_std").get<double>();
    if (j.contains("init_sigma")) bnn.init_sigma = j.at("init_sigma").get<double>();
}

}  // namespace

void RunConfig::validate() const {
    control.validate();
    if (!(watts_to_ppfd > 0.0))
        throw ConfigError("config: watts_to_ppfd must be > 0");
    if (months.empty()) throw ConfigError("config: months must be nonempty");
    for (int m : months)
        if (m < 1 || m > 12) throw ConfigError("config: month out of range: " + std::to_string(m));
    if (test_days_per_month < 1)
        throw ConfigError("config: test_days_per_month must be >= 1");
    bnn.validate();
    if (markov_bins < 1) throw ConfigError("config: markov bins must be >= 1");
    if (!(markov_alpha >= 0.0)) throw ConfigError("config: markov alpha must be >= 0");
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid config " + path.string() + ": " + e.what());
    }
    reject_unknown_keys(
        j,
        {"data_dir", "price_file", "model_dir", "output_dir", "photoperiod",
         "dpi_target_mol", "light_response", "led", "after_sunset_top_up",
         "watts_to_ppfd", "months", "train_years", "test_years",
         "test_days_per_month", "bnn", "markov", "seed"},
        "the top level");

    RunConfig config;
    if (j.contains("data_dir")) config.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("price_file")) config.price_file = j.at("price_file").get<std::string>();
    if (j.contains("model_dir")) config.model_dir = j.at("model_dir").get<std::string>();
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("photoperiod")) load_grid(j.at("photoperiod"), config.control.grid);
    if (j.contains("dpi_target_mol"))
        config.control.dpi_target_mol = j.at("dpi_target_mol").get<double>();
    if (j.contains("light_response")) {
        const json& lr = j.at("light_response");
        reject_unknown_keys(lr, {"a", "k"}, "light_response");
        if (lr.contains("a")) config.control.params.a = lr.at("a").get<double>();
        if (lr.contains("k")) config.control.params.k = lr.at("k").get<double>();
    }
    if (j.contains("led")) {
        const json& led = j.at("led");
        reject_unknown_keys(led, {"max_ppfd", "efficacy_umol_per_j"}, "led");
        if (led.contains("max_ppfd"))
            config.control.led_max_ppfd = led.at("max_ppfd").get<double>();
        if (led.contains("efficacy_umol_per_j"))
            config.control.led_efficacy_umol_per_j =
                led.at("efficacy_umol_per_j").get<double>();
    }
    if (j.contains("after_sunset_top_up"))
        config.control.zero_sun_after_sunset = j.at("after_sunset_top_up").get<bool>();
    if (j.contains("watts_to_ppfd")) config.watts_to_ppfd = j.at("watts_to_ppfd").get<double>();
    if (j.contains("months")) config.months = j.at("months").get<std::vector<int>>();
    if (j.contains("train_years")) config.train_years = j.at("train_years").get<std::vector<int>>();
    if (j.contains("test_years")) config.test_years = j.at("test_years").get<std::vector<int>>();
    if (j.contains("test_days_per_month"))
        config.test_days_per_month = j.at("test_days_per_month").get<int>();
    if (j.contains("bnn")) load_bnn(j.at("bnn"), config.bnn);
    if (j.contains("markov")) {
        const json& mk = j.at("markov");
        reject_unknown_keys(mk, {"bins", "alpha"}, "markov");
        if (mk.contains("bins")) config.markov_bins = mk.at("bins").get<int>();
        if (mk.contains("alpha")) config.markov_alpha = mk.at("alpha").get<double>();
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();

    try {
        config.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string(e.what()) + " (from " + path.string() + ")");
    }
    return config;
}

}  // namespace helios
