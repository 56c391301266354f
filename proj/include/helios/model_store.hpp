#pragma once

#include <filesystem>
#include <string>

#include "helios/bnn.hpp"
#include "helios/predictors.hpp"

namespace helios {

enum class ModelKind { Bnn, Markov, Climatology };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// Raised for missing files, unknown formats, or checksum mismatches.
struct ModelIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Models persist as a JSON envelope carrying the kind, month, and a
// checksum over the payload. Doubles survive bitwise (shortest round-trip
// printing), so save -> load -> save is byte identical.

void save_model(const BnnModel& model, const std::filesystem::path& path);
void save_model(const MarkovModel& model, const std::filesystem::path& path);
void save_model(const ClimatologyProfile& profile, const std::filesystem::path& path);

/// Kind recorded in the envelope, without loading the payload.
ModelKind peek_model_kind(const std::filesystem::path& path);

BnnModel load_bnn(const std::filesystem::path& path);
MarkovModel load_markov(const std::filesystem::path& path);
ClimatologyProfile load_climatology(const std::filesystem::path& path);

}  // namespace helios
