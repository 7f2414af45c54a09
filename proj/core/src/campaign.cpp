#include "congnet/campaign.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace congnet {

namespace {
constexpr const char* kToolkitVersion = "0.1.0";

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}
}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  try {
  ExperimentConfig cfg;
  cfg.raw = j;

  if (!j.contains("instance"))
    throw std::invalid_argument("config: missing field 'instance'");
  const Json& inst = j.at("instance");
  if (inst.contains("file")) {
    cfg.instance_file = inst.at("file").get<std::string>();
  } else if (inst.contains("generator")) {
    const Json& g = inst.at("generator");
    GeneratorSpec spec;
    spec.shape = g.at("shape").get<std::vector<int>>();
    spec.samples = g.value("samples", 1);
    spec.weight_seed = g.value("seed", uint64_t{0});
    spec.data_seed = g.value("data_seed", spec.weight_seed + 1);
    spec.normalized_inputs = g.value("normalized", true);
    spec.classification_loss =
        g.value("loss", std::string("classification")) == "classification";
    spec.beta = g.value("beta", 2.0);
    spec.loss_seed = g.value("loss_seed", spec.weight_seed + 2);
    cfg.generator = spec;
  } else {
    throw std::invalid_argument(
        "config: field 'instance' needs 'file' or 'generator'");
  }

  if (j.contains("train")) {
    const Json& t = j.at("train");
    const std::string mode = t.value("mode", std::string("weight"));
    if (mode == "marginal")
      cfg.train.mode = TrainMode::MarginalSpace;
    else if (mode == "weight")
      cfg.train.mode = TrainMode::WeightSpace;
    else
      throw std::invalid_argument("config: train.mode must be 'weight' or "
                                  "'marginal', got '" + mode + "'");
    cfg.train.max_iters = t.value("max_iters", 100000);
    cfg.train.grad_tol = t.value("tol", 1e-9);
    cfg.train.init_step = t.value("step", 1.0);
    cfg.train.restarts = t.value("restarts", 1);
  }

  if (j.contains("campaign")) {
    const Json& c = j.at("campaign");
    cfg.num_seeds = c.value("seeds", 1);
    cfg.base_seed = c.value("base_seed", uint64_t{0});
  }
  if (cfg.num_seeds < 1)
    throw std::invalid_argument("config: campaign size must be >= 1");
  cfg.out_dir = j.value("out", std::string("."));
  return cfg;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

bool RunRecord::all_passed() const {
  for (const auto& s : seeds)
    if (s.error || !s.report.success) return false;
  return !seeds.empty();
}

Json run_record_to_json(const RunRecord& rec) {
  Json j;
  j["config_digest"] = rec.config_digest;
  j["toolkit_version"] = rec.toolkit_version;
  j["wall_ms"] = rec.wall_ms;
  Json seeds = Json::array();
  for (const auto& s : rec.seeds) {
    Json e;
    e["seed"] = s.seed;
    e["wall_ms"] = s.wall_ms;
    if (s.error) {
      e["error"] = s.error_message;
    } else {
      const TheoremReport& r = s.report;
      e["loss"] = r.loss_value;
      e["converged"] = r.training.converged;
      e["iterations"] = r.training.iterations;
      e["pg_norm"] = r.training.pg_norm;
      e["vi_residual"] = r.vi_residual;
      e["is_equilibrium"] = r.equilibrium_definition && r.equilibrium_vi;
      e["we_value"] = r.we_value;
      e["so_value"] = r.so_value;
      e["poa"] = r.poa;
      e["success"] = r.success;
      e["restart_losses"] = r.training.restart_losses;
    }
    seeds.push_back(std::move(e));
  }
  j["seeds"] = std::move(seeds);
  j["all_passed"] = rec.all_passed();
  return j;
}

std::string run_record_csv(const RunRecord& rec) {
  std::ostringstream os;
  os.precision(17);
  os << "seed,loss,converged,vi_residual,is_equilibrium,so,we,poa,success\n";
  for (const auto& s : rec.seeds) {
    if (s.error) {
      os << s.seed << ",,,,,,,,error\n";
      continue;
    }
    const TheoremReport& r = s.report;
    os << s.seed << ',' << r.loss_value << ',' << r.training.converged << ','
       << r.vi_residual << ','
       << (r.equilibrium_definition && r.equilibrium_vi) << ',' << r.so_value
       << ',' << r.we_value << ',' << r.poa << ',' << r.success << '\n';
  }
  return os.str();
}

RunRecord run_campaign(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config_digest = digest(cfg.raw);
  rec.toolkit_version = kToolkitVersion;

  Instance base;
  if (cfg.instance_file)
    base = load_instance(*cfg.instance_file);
  else
    base = generate_instance(*cfg.generator);

  for (int s = 0; s < cfg.num_seeds; ++s) {
    SeedResult res;
    res.seed = cfg.base_seed + static_cast<uint64_t>(s);
    const auto ts = std::chrono::steady_clock::now();
    try {
      TrainConfig tc = cfg.train;
      tc.seed = res.seed;
      Instance inst = base;
      if (cfg.generator && s > 0) {
        // Fresh weights per seed, same data: one instance, many starts.
        GeneratorSpec spec = *cfg.generator;
        spec.weight_seed = res.seed;
        Instance fresh = generate_instance(spec);
        inst.dnn = fresh.dnn;
      }
      res.report = verify_theorem1(inst.dnn, inst.data, inst.loss, tc);
    } catch (const std::exception& ex) {
      res.error = true;
      res.error_message = ex.what();
    }
    res.wall_ms = ms_since(ts);
    rec.seeds.push_back(std::move(res));
  }
  rec.wall_ms = ms_since(t0);

  std::filesystem::create_directories(cfg.out_dir);
  write_json_file(run_record_to_json(rec),
                  (std::filesystem::path(cfg.out_dir) / "record.json").string());
  std::ofstream csv(std::filesystem::path(cfg.out_dir) / "summary.csv");
  csv << run_record_csv(rec);
  return rec;
}

}  // namespace congnet
