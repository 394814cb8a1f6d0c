#include "tenrl/nn/checkpoint.hpp"

#include <fstream>

#include "tenrl/errors.hpp"
#include "tenrl/nn/spec_json.hpp"
#include "tenrl/tnsr_io.hpp"

namespace tenrl::nn {

namespace fs = std::filesystem;

void save_checkpoint(const Network& net, const fs::path& dir, const nlohmann::json& extra) {
  fs::create_directories(dir);
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : net.parameters()) {
    const std::string file = p.name + ".tnsr";
    save_tnsr(dir / file, p.value);
    params.push_back({{"name", p.name}, {"file", file}, {"shape", p.value.shape()}});
  }
  nlohmann::json manifest{{"format", "tenrl-checkpoint"}, {"version", 1}, {"network", to_json(net.spec())},
                          {"parameters", params}};
  if (!extra.is_null()) manifest["config"] = extra;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw CheckpointError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

nlohmann::json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw CheckpointError("no manifest.json in " + dir.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError("malformed manifest.json: " + std::string(e.what()));
  }
}

void load_parameters(Network& net, const fs::path& dir) {
  const auto manifest = read_manifest(dir);
  const auto& entries = manifest.at("parameters");
  if (entries.size() != net.parameters().size()) {
    throw CheckpointError("checkpoint has " + std::to_string(entries.size()) + " parameters, network expects " +
                          std::to_string(net.parameters().size()));
  }
  for (const auto& e : entries) {
    const auto name = e.at("name").get<std::string>();
    Parameter* p = nullptr;
    try {
      p = &net.parameter(name);
    } catch (const std::out_of_range&) {
      throw CheckpointError("checkpoint parameter " + name + " does not exist in the network");
    }
    DenseTensor value;
    try {
      value = load_tnsr(dir / e.at("file").get<std::string>());
    } catch (const std::exception& ex) {
      throw CheckpointError("cannot read " + name + ": " + ex.what());
    }
    if (value.shape() != p->value.shape()) throw CheckpointError("shape mismatch for " + name);
    value.set_dtype(DType::kFloat64);
    p->value = std::move(value);
  }
}

Network load_checkpoint(const fs::path& dir) {
  const auto manifest = read_manifest(dir);
  if (!manifest.contains("network")) throw CheckpointError("manifest has no network spec");
  Network net(network_spec_from_json(manifest.at("network")), 0);
  load_parameters(net, dir);
  return net;
}

}  // namespace tenrl::nn
