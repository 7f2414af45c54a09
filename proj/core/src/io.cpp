#include "congnet/io.hpp"

#include <fstream>
#include <stdexcept>

namespace congnet {

namespace {

Json matrix_rows(const Matrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const Json& j, int expect_rows = -1,
                        int expect_cols = -1) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw std::invalid_argument("document: expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  if ((expect_rows >= 0 && rows != expect_rows) ||
      (expect_cols >= 0 && cols != expect_cols))
    throw std::invalid_argument("document: matrix shape mismatch");
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw std::invalid_argument("document: ragged matrix rows");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

// Malformed documents are configuration errors; translate the json library's
// own exceptions (missing key, wrong type) so callers see one failure mode.
template <typename F>
auto parse_guard(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("document: ") + e.what());
  }
}

}  // namespace

Json dnn_to_json(const LayeredDnn& dnn) {
  Json j;
  j["layer_sizes"] = dnn.layer_sizes;
  Json ws = Json::array();
  for (const auto& w : dnn.weights) ws.push_back(matrix_rows(w));
  j["weights"] = std::move(ws);
  j["activation"] =
      dnn.activation == Activation::Relu ? "relu" : "identity";
  return j;
}

LayeredDnn dnn_from_json(const Json& j) {
  return parse_guard([&] {
  LayeredDnn dnn;
  dnn.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  const std::string act = j.at("activation").get<std::string>();
  if (act == "relu")
    dnn.activation = Activation::Relu;
  else if (act == "identity")
    dnn.activation = Activation::Identity;
  else
    throw std::invalid_argument("document: unknown activation '" + act + "'");
  const Json& ws = j.at("weights");
  if (ws.size() + 1 != dnn.layer_sizes.size())
    throw std::invalid_argument("document: weights count vs layer_sizes");
  for (size_t l = 0; l < ws.size(); ++l)
    dnn.weights.push_back(
        matrix_from_rows(ws[l], dnn.layer_sizes[l + 1], dnn.layer_sizes[l]));
  return dnn;
  });
}

Json instance_to_json(const Instance& inst) {
  Json j = dnn_to_json(inst.dnn);
  j["version"] = 1;
  Json samples = Json::array();
  for (int s = 0; s < inst.data.size(); ++s) {
    Json sample;
    sample["x"] = std::vector<double>(
        inst.data.inputs.col(s).data(),
        inst.data.inputs.col(s).data() + inst.data.dim());
    sample["y"] = std::vector<double>(
        inst.data.labels.col(s).data(),
        inst.data.labels.col(s).data() + inst.data.num_classes());
    samples.push_back(std::move(sample));
  }
  j["samples"] = std::move(samples);
  j["normalized_inputs"] = inst.data.normalized_inputs;
  Json loss;
  loss["beta"] = inst.loss.beta;
  if (inst.classification_loss)
    loss["coefficients"] = "classification";
  else
    loss["coefficients"] = matrix_rows(inst.loss.coefficients);
  j["loss"] = std::move(loss);
  return j;
}

Instance instance_from_json(const Json& j) {
  return parse_guard([&] {
  Instance inst;
  inst.dnn = dnn_from_json(j);
  const Json& samples = j.at("samples");
  if (!samples.is_array() || samples.empty())
    throw std::invalid_argument("document: field 'samples' empty or missing");
  const int M = static_cast<int>(samples.size());
  const int d = inst.dnn.input_dim();
  const int C = inst.dnn.output_dim();
  Matrix X(d, M), Y(C, M);
  for (int s = 0; s < M; ++s) {
    auto x = samples[s].at("x").get<std::vector<double>>();
    auto y = samples[s].at("y").get<std::vector<double>>();
    if (static_cast<int>(x.size()) != d)
      throw std::invalid_argument("document: sample 'x' has wrong dimension");
    if (static_cast<int>(y.size()) != C)
      throw std::invalid_argument("document: sample 'y' has wrong dimension");
    for (int i = 0; i < d; ++i) X(i, s) = x[i];
    for (int k = 0; k < C; ++k) Y(k, s) = y[k];
  }
  const bool normalized = j.value("normalized_inputs", false);
  inst.data = Dataset(std::move(X), std::move(Y), normalized);

  const Json& loss = j.at("loss");
  const double beta = loss.at("beta").get<double>();
  const Json& coeff = loss.at("coefficients");
  if (coeff.is_string()) {
    if (coeff.get<std::string>() != "classification")
      throw std::invalid_argument("document: unknown loss coefficients mode");
    inst.loss = PowerLoss::classification(inst.data, beta);
    inst.classification_loss = true;
  } else {
    inst.loss = PowerLoss(matrix_from_rows(coeff, C, M), beta);
  }
  return inst;
  });
}

Json game_to_json(const CongestionGame& game) {
  Json j;
  j["version"] = 1;
  j["populations"] = game.d;
  j["classes"] = game.C;
  j["samples"] = game.M;
  j["layer_sizes"] = game.layer_sizes;
  j["beta"] = game.beta;
  j["inputs"] = matrix_rows(game.inputs);
  j["coefficients"] = matrix_rows(game.coefficients);
  Json res = Json::array();
  for (const auto& r : game.resources) {
    Json e;
    switch (r.set) {
      case Resource::Set::B:
        e["set"] = "B";
        e["layer"] = r.layer;
        e["from"] = r.from;
        e["to"] = r.to;
        break;
      case Resource::Set::J:
        e["set"] = "J";
        e["layer"] = r.layer;
        e["node"] = r.from;
        break;
      case Resource::Set::T:
        e["set"] = "T";
        e["k"] = r.k;
        e["j"] = r.j;
        break;
    }
    res.push_back(std::move(e));
  }
  j["resources"] = std::move(res);
  return j;
}

CongestionGame game_from_json(const Json& j) {
  return parse_guard([&] {
  CongestionGame game;
  game.d = j.at("populations").get<int>();
  game.C = j.at("classes").get<int>();
  game.M = j.at("samples").get<int>();
  game.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  game.beta = j.at("beta").get<double>();
  game.inputs = matrix_from_rows(j.at("inputs"), game.d, game.M);
  game.coefficients = matrix_from_rows(j.at("coefficients"), game.C, game.M);
  for (const auto& e : j.at("resources")) {
    Resource r;
    const std::string set = e.at("set").get<std::string>();
    if (set == "B") {
      r.set = Resource::Set::B;
      r.layer = e.at("layer").get<int>();
      r.from = e.at("from").get<int>();
      r.to = e.at("to").get<int>();
    } else if (set == "J") {
      r.set = Resource::Set::J;
      r.layer = e.at("layer").get<int>();
      r.from = r.to = e.at("node").get<int>();
    } else if (set == "T") {
      r.set = Resource::Set::T;
      r.k = e.at("k").get<int>();
      r.j = e.at("j").get<int>();
    } else {
      throw std::invalid_argument("document: unknown resource set tag");
    }
    game.resources.push_back(r);
  }
  return game;
  });
}

Json certificate_to_json(const ReductionCertificate& cert) {
  Json j;
  j["dnn_digest"] = cert.dnn_digest;
  j["game_digest"] = cert.game_digest;
  j["network_loss"] = cert.network_loss_value;
  j["social_cost"] = cert.social_cost_value;
  j["per_sample_loss"] = cert.per_sample_loss;
  j["per_edge_cost"] = cert.per_edge_cost;
  j["discrepancy"] = cert.discrepancy;
  return j;
}

Json write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << j.dump(2) << '\n';
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  return parse_guard([&] { return Json::parse(in); });
}

Instance load_instance(const std::string& path) {
  return instance_from_json(read_json_file(path));
}

void save_instance(const Instance& inst, const std::string& path) {
  write_json_file(instance_to_json(inst), path);
}

uint64_t digest(const Json& j) {
  const std::string s = j.dump();  // objects serialize with sorted keys
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace congnet
