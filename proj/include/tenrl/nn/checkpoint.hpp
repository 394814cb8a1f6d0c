#pragma once

#include <filesystem>

#include <json.hpp>

#include "tenrl/nn/network.hpp"

namespace tenrl::nn {

// A checkpoint directory holds manifest.json plus one `<layer>.<param>.tnsr`
// per parameter. `extra` is stored verbatim under the "config" key.
void save_checkpoint(const Network& net, const std::filesystem::path& dir, const nlohmann::json& extra = {});

nlohmann::json read_manifest(const std::filesystem::path& dir);

/// Rebuilds the network recorded in the manifest and loads its parameters.
Network load_checkpoint(const std::filesystem::path& dir);

/// Loads parameters into an existing network; names and shapes must match.
void load_parameters(Network& net, const std::filesystem::path& dir);

}  // namespace tenrl::nn
