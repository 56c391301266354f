#include "helios/model_store.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace helios {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "helios-model";
constexpr int kVersion = 1;

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json dense_to_json(const DenseLayer& layer) {
    return {{"in", layer.in}, {"out", layer.out},
            {"weights", layer.weights}, {"bias", layer.bias}};
}

DenseLayer dense_from_json(const json& j) {
    DenseLayer layer;
    layer.in = j.at("in").get<int>();
    layer.out = j.at("out").get<int>();
    layer.weights = j.at("weights").get<std::vector<double>>();
    layer.bias = j.at("bias").get<std::vector<double>>();
    if (layer.in < 1 || layer.out < 1 ||
        layer.weights.size() != static_cast<std::size_t>(layer.in) * layer.out ||
        layer.bias.size() != static_cast<std::size_t>(layer.out))
        throw ModelIoError("model payload: dense layer shape mismatch");
    return layer;
}

json config_to_json(const BnnConfig& c) {
    return {{"hidden_sizes", c.hidden_sizes},
            {"mc_samples_train", c.mc_samples_train},
            {"mc_samples_predict", c.mc_samples_predict},
            {"learning_rate", c.learning_rate},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"prior_std", c.prior_std},
            {"obs_noise_std", c.obs_noise_std},
            {"init_sigma", c.init_sigma},
            {"seed", c.seed}};
}

BnnConfig config_from_json(const json& j) {
    BnnConfig c;
    c.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
    c.mc_samples_train = j.at("mc_samples_train").get<int>();
    c.mc_samples_predict = j.at("mc_samples_predict").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.prior_std = j.at("prior_std").get<double>();
    c.obs_noise_std = j.at("obs_noise_std").get<double>();
    c.init_sigma = j.at("init_sigma").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json bnn_payload(const BnnModel& model) {
    return {{"config", config_to_json(model.config)},
            {"norm",
             {{"s_mean", model.norm.s_mean}, {"s_std", model.norm.s_std},
              {"t_mean", model.norm.t_mean}, {"t_std", model.norm.t_std},
              {"y_mean", model.norm.y_mean}, {"y_std", model.norm.y_std}}},
            {"hidden1", dense_to_json(model.hidden1)},
            {"hidden2", dense_to_json(model.hidden2)},
            {"output",
             {{"in", model.output.in}, {"mu", model.output.mu},
              {"rho", model.output.rho}}}};
}

BnnModel bnn_from_payload(const json& j, int month) {
    BnnModel model;
    model.month = month;
    model.config = config_from_json(j.at("config"));
    const json& n = j.at("norm");
    model.norm.s_mean = n.at("s_mean").get<double>();
    model.norm.s_std = n.at("s_std").get<double>();
    model.norm.t_mean = n.at("t_mean").get<double>();
    model.norm.t_std = n.at("t_std").get<double>();
    model.norm.y_mean = n.at("y_mean").get<double>();
    model.norm.y_std = n.at("y_std").get<double>();
    model.hidden1 = dense_from_json(j.at("hidden1"));
    model.hidden2 = dense_from_json(j.at("hidden2"));
    const json& out = j.at("output");
    model.output.in = out.at("in").get<int>();
    model.output.mu = out.at("mu").get<std::vector<double>>();
    model.output.rho = out.at("rho").get<std::vector<double>>();
    if (model.output.in < 1 ||
        model.output.mu.size() != static_cast<std::size_t>(model.output.in) + 1 ||
        model.output.rho.size() != model.output.mu.size())
        throw ModelIoError("model payload: output layer shape mismatch");
    return model;
}

json markov_payload(const MarkovModel& model) {
    return {{"n_bins", model.n_bins},
            {"bin_edges", model.bin_edges},
            {"bin_centers", model.bin_centers},
            {"transitions", model.transitions}};
}

MarkovModel markov_from_payload(const json& j, int month) {
    MarkovModel model;
    model.month = month;
    model.n_bins = j.at("n_bins").get<int>();
    model.bin_edges = j.at("bin_edges").get<std::vector<double>>();
    model.bin_centers = j.at("bin_centers").get<std::vector<double>>();
    model.transitions = j.at("transitions").get<std::vector<std::vector<double>>>();
    model.validate();
    return model;
}

void write_envelope(ModelKind kind, int month, json payload,
                    const std::filesystem::path& path) {
    json envelope;
    envelope["format"] = kFormat;
    envelope["version"] = kVersion;
    envelope["kind"] = to_string(kind);
    envelope["month"] = month;
    envelope["checksum"] = fnv1a_hex(payload.dump());
    envelope["model"] = std::move(payload);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelIoError("cannot open for writing: " + path.string());
    out << envelope.dump(2) << '\n';
    if (!out) throw ModelIoError("write failed: " + path.string());
}

json read_envelope(const std::filesystem::path& path, ModelKind expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelIoError("cannot open model file: " + path.string());
    json envelope;
    try {
        envelope = json::parse(in);
    } catch (const json::exception& e) {
        throw ModelIoError("invalid model file " + path.string() + ": " + e.what());
    }
    if (envelope.value("format", "") != kFormat)
        throw ModelIoError("not a model file: " + path.string());
    if (envelope.value("version", -1) != kVersion)
        throw ModelIoError("unsupported model version in " + path.string());
    const ModelKind kind = model_kind_from_string(envelope.at("kind").get<std::string>());
    if (kind != expected)
        throw ModelIoError("model kind mismatch in " + path.string() + ": found " +
                           to_string(kind) + ", expected " + to_string(expected));
    const std::string stored = envelope.at("checksum").get<std::string>();
    if (fnv1a_hex(envelope.at("model").dump()) != stored)
        throw ModelIoError("checksum mismatch in " + path.string());
    return envelope;
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Bnn: return "bnn";
        case ModelKind::Markov: return "markov";
        case ModelKind::Climatology: return "climatology";
    }
    throw std::logic_error("unknown ModelKind");
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "bnn") return ModelKind::Bnn;
    if (s == "markov") return ModelKind::Markov;
    if (s == "climatology") return ModelKind::Climatology;
    throw ModelIoError("unknown model kind: " + s);
}

void save_model(const BnnModel& model, const std::filesystem::path& path) {
    write_envelope(ModelKind::Bnn, model.month, bnn_payload(model), path);
}

void save_model(const MarkovModel& model, const std::filesystem::path& path) {
    write_envelope(ModelKind::Markov, model.month, markov_payload(model), path);
}

void save_model(const ClimatologyProfile& profile, const std::filesystem::path& path) {
    write_envelope(ModelKind::Climatology, profile.month,
                   json{{"mean_ppfd", profile.mean_ppfd}}, path);
}

ModelKind peek_model_kind(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelIoError("cannot open model file: " + path.string());
    json envelope;
    try {
        envelope = json::parse(in);
    } catch (const json::exception& e) {
        throw ModelIoError("invalid model file " + path.string() + ": " + e.what());
    }
    if (envelope.value("format", "") != kFormat)
        throw ModelIoError("not a model file: " + path.string());
    return model_kind_from_string(envelope.at("kind").get<std::string>());
}

BnnModel load_bnn(const std::filesystem::path& path) {
    const json envelope = read_envelope(path, ModelKind::Bnn);
    return bnn_from_payload(envelope.at("model"), envelope.at("month").get<int>());
}

MarkovModel load_markov(const std::filesystem::path& path) {
    const json envelope = read_envelope(path, ModelKind::Markov);
    return markov_from_payload(envelope.at("model"), envelope.at("month").get<int>());
}

ClimatologyProfile load_climatology(const std::filesystem::path& path) {
    const json envelope = read_envelope(path, ModelKind::Climatology);
    ClimatologyProfile profile;
    profile.month = envelope.at("month").get<int>();
    profile.mean_ppfd = envelope.at("model").at("mean_ppfd").get<std::vector<double>>();
    if (profile.mean_ppfd.empty())
        throw ModelIoError("model payload: empty climatology profile");
    return profile;
}

}  // namespace helios
