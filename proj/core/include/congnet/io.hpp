#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "congnet/reduction.hpp"

namespace congnet {

using Json = nlohmann::json;

// One self-contained problem instance: network, data, loss.
struct Instance {
  LayeredDnn dnn;
  Dataset data;
  PowerLoss loss;
  bool classification_loss = false;
};

Json dnn_to_json(const LayeredDnn& dnn);
LayeredDnn dnn_from_json(const Json& j);

Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

Json game_to_json(const CongestionGame& game);
CongestionGame game_from_json(const Json& j);

Json certificate_to_json(const ReductionCertificate& cert);

Json write_json_file(const Json& j, const std::string& path);
Json read_json_file(const std::string& path);

// FNV-1a over the canonical (key-sorted) dump; stable under field reordering
// of the source document.
uint64_t digest(const Json& j);

}  // namespace congnet
