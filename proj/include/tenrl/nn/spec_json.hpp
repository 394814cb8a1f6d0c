#pragma once

#include <string>

#include <json.hpp>

#include "tenrl/nn/network_spec.hpp"

namespace tenrl::nn {

// Schema:
//   {"input_shape": [C, H, W],
//    "layers": [{"type": "conv", "out_channels": 16, "kernel": 4, "stride": 4},
//               {"type": "relu"}, {"type": "flatten"},
//               {"type": "dense", "width": 64},
//               {"type": "trl", "width": 64, "rank": 8}          // or "ranks": [..]
//               {"type": "scattering", "J": 2, "L": 4, "order": 2}],
//    "head": {"actions": 3, "dueling": true, "atoms": 1, "v_min": -10, "v_max": 10,
//             "final": "dense" | "trl", "final_rank": 0}}
NetworkSpec network_spec_from_json(const nlohmann::json& j, const std::string& path = "network");
nlohmann::json to_json(const NetworkSpec& spec);

}  // namespace tenrl::nn
