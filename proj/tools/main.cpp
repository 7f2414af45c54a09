// Command-line front end: validation, game construction, training,
// equilibrium verification and the loss-family checks, all over the JSON
// instance documents.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "congnet/campaign.hpp"
#include "congnet/relu_model.hpp"
#include "congnet/squared_loss.hpp"

namespace fs = std::filesystem;
using namespace congnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;

struct GlobalOpts {
  std::string config;
  std::string out_dir = ".";
  uint64_t seed = 0;
  bool json = false;
};

void emit(const GlobalOpts& g, const Json& j, const std::string& human) {
  if (g.json)
    std::cout << j.dump(2) << std::endl;
  else
    std::cout << human;
}

void write_out(const GlobalOpts& g, const Json& j, const std::string& name) {
  fs::create_directories(g.out_dir);
  write_json_file(j, (fs::path(g.out_dir) / name).string());
}

Instance load(const GlobalOpts& g) {
  if (g.config.empty())
    throw std::invalid_argument("--config <instance.json> is required");
  return load_instance(g.config);
}

int cmd_validate(const GlobalOpts& g) {
  Instance inst = load(g);
  ValidationReport net = validate_dnn(inst.dnn);
  ValidationReport data = validate_dataset(inst.data);
  Json j;
  j["network"] = Json::array();
  for (const auto& c : net.checks)
    j["network"].push_back({{"name", c.name}, {"passed", c.passed},
                            {"detail", c.detail}});
  j["dataset"] = Json::array();
  for (const auto& c : data.checks)
    j["dataset"].push_back({{"name", c.name}, {"passed", c.passed},
                            {"detail", c.detail}});
  const bool ok = net.all_passed() && data.all_passed();
  j["all_passed"] = ok;
  emit(g, j, net.summary() + data.summary());
  return ok ? kExitOk : kExitAssertion;
}

int cmd_build_game(const GlobalOpts& g) {
  Instance inst = load(g);
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  ReductionCertificate cert = certify_reduction(inst.dnn, inst.data, inst.loss);
  write_out(g, game_to_json(game), "game.json");
  write_out(g, certificate_to_json(cert), "certificate.json");
  Json j;
  j["resources"] = {{"B", game.count(Resource::Set::B)},
                    {"J", game.count(Resource::Set::J)},
                    {"T", game.count(Resource::Set::T)}};
  j["populations"] = game.d;
  j["strategies_per_population"] = game.C * game.paths_per_class();
  j["discrepancy"] = cert.discrepancy;
  std::ostringstream os;
  os << "game: |B|=" << game.count(Resource::Set::B)
     << " |J|=" << game.count(Resource::Set::J)
     << " |T|=" << game.count(Resource::Set::T) << ", " << game.d
     << " populations, loss/SC discrepancy " << cert.discrepancy << "\n";
  emit(g, j, os.str());
  return cert.discrepancy <= 1e-10 ? kExitOk : kExitAssertion;
}

Json train_report_json(const TrainReport& r) {
  Json j;
  j["final_loss"] = r.final_loss;
  j["iterations"] = r.iterations;
  j["pg_norm"] = r.pg_norm;
  j["converged"] = r.converged;
  j["restart_losses"] = r.restart_losses;
  return j;
}

int cmd_train(const GlobalOpts& g, const TrainConfig& tc) {
  Instance inst = load(g);
  TrainReport rep = train(inst.dnn, inst.data, inst.loss, tc);
  write_out(g, train_report_json(rep), "train_report.json");
  {
    fs::create_directories(g.out_dir);
    std::ofstream csv(fs::path(g.out_dir) / "restart_losses.csv");
    csv.precision(17);
    csv << "restart,final_loss\n";
    for (size_t i = 0; i < rep.restart_losses.size(); ++i)
      csv << i << ',' << rep.restart_losses[i] << '\n';
  }
  std::ostringstream os;
  os << "final loss " << rep.final_loss << " after " << rep.iterations
     << " iterations, pg norm " << rep.pg_norm
     << (rep.converged ? " (converged)" : " (not converged)") << "\n";
  emit(g, train_report_json(rep), os.str());
  return rep.converged ? kExitOk : kExitAssertion;
}

int cmd_verify(const GlobalOpts& g, const TrainConfig& tc) {
  Instance inst = load(g);
  TheoremReport rep = verify_theorem1(inst.dnn, inst.data, inst.loss, tc);
  Json j;
  j["training"] = train_report_json(rep.training);
  j["loss"] = rep.loss_value;
  j["vi_residual"] = rep.vi_residual;
  j["is_equilibrium"] = rep.equilibrium_definition && rep.equilibrium_vi;
  j["we_value"] = rep.we_value;
  j["so_value"] = rep.so_value;
  j["poa"] = rep.poa;
  j["success"] = rep.success;
  write_out(g, j, "verify_report.json");
  std::ostringstream os;
  os << "loss " << rep.loss_value << ", WE " << rep.we_value << ", SO "
     << rep.so_value << ", PoA " << rep.poa << ", equilibrium "
     << (rep.equilibrium_definition && rep.equilibrium_vi ? "yes" : "no")
     << ", vi residual " << rep.vi_residual << "\n";
  emit(g, j, os.str());
  return rep.success ? kExitOk : kExitAssertion;
}

int cmd_poa(const GlobalOpts& g) {
  Instance inst = load(g);
  CongestionGame game = build_game(inst.dnn, inst.data, inst.loss);
  PoaResult res = price_of_anarchy(game, g.seed);
  MarginalFlow current = weights_to_flow(inst.dnn, game);
  EquilibriumReport vi = wardrop_check_vi(game, current);
  Json j;
  j["sc"] = social_cost(game, current);
  j["so"] = res.so_value;
  j["we_value"] = res.we_value;
  j["poa"] = res.poa;
  j["vi_residual"] = vi.vi_residual;
  j["is_equilibrium"] = vi.is_equilibrium;
  write_out(g, j, "poa_report.json");
  std::ostringstream os;
  os << "SC(current) " << j["sc"].get<double>() << ", SO " << res.so_value
     << ", WE " << res.we_value << ", PoA " << res.poa << "\n";
  emit(g, j, os.str());
  return kExitOk;
}

int cmd_factorize(const GlobalOpts& g, const std::vector<int>& widths) {
  Instance inst = load(g);
  Matrix target = aggregates(inst.dnn, inst.data).b;
  std::vector<int> shape = widths;
  if (shape.empty()) shape = inst.dnn.layer_sizes;
  std::vector<Matrix> factors = factorize(target, shape);
  Matrix product = factors.front();
  for (size_t l = 1; l < factors.size(); ++l) product = factors[l] * product;
  const double err = (product - target).cwiseAbs().maxCoeff();
  Json j;
  j["widths"] = shape;
  j["factors"] = Json::array();
  for (const auto& f : factors) {
    Json rows = Json::array();
    for (int r = 0; r < f.rows(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < f.cols(); ++c) row.push_back(f(r, c));
      rows.push_back(std::move(row));
    }
    j["factors"].push_back(std::move(rows));
  }
  j["product_error"] = err;
  write_out(g, j, "factorization.json");
  std::ostringstream os;
  os << factors.size() << " factors, product error " << err << "\n";
  emit(g, j, os.str());
  return err <= 1e-12 ? kExitOk : kExitAssertion;
}

int cmd_relu_scaling(const GlobalOpts& g, double rho, long long samples) {
  Instance inst = load(g);
  ReluPathModel model(inst.dnn, rho);
  const double linear = network_loss(model.base, inst.data, inst.loss);
  const double scaled = relu_model_loss(model, inst.data, inst.loss);
  const double expected = std::pow(rho, inst.loss.beta);
  Json j;
  j["linear_loss"] = linear;
  j["model_loss"] = scaled;
  j["ratio"] = linear > 0.0 ? scaled / linear : 0.0;
  j["expected_ratio"] = expected;
  if (samples > 0) {
    SampleStats stats = sample_outputs(model, inst.data, samples, g.seed);
    const Matrix eo = expected_outputs(model, inst.data);
    j["mc_max_abs_error"] = (stats.mean - eo).cwiseAbs().maxCoeff();
    j["mc_samples"] = samples;
  }
  write_out(g, j, "relu_scaling.json");
  std::ostringstream os;
  os << "linear loss " << linear << ", model loss " << scaled << ", ratio "
     << j["ratio"].get<double>() << " (expected " << expected << ")\n";
  emit(g, j, os.str());
  const bool ok = linear == 0.0 ||
                  std::abs(scaled / linear - expected) <= 1e-12;
  return ok ? kExitOk : kExitAssertion;
}

int cmd_sqloss(const GlobalOpts& g) {
  Instance inst = load(g);
  LossDecomposition dec = loss_decomposition(inst.dnn, inst.data);
  Json j;
  j["paper_loss"] = dec.paper_loss;
  j["const"] = dec.constant;
  j["squared_loss"] = dec.squared;
  j["ratio"] = dec.paper_loss > 0.0 ? dec.squared / dec.paper_loss : 0.0;
  j["c_equals_2"] = inst.dnn.output_dim() == 2;
  write_out(g, j, "sqloss_report.json");
  std::ostringstream os;
  os << "loss " << dec.paper_loss << " + const " << dec.constant
     << " = squared " << dec.squared << "\n";
  emit(g, j, os.str());
  return kExitOk;
}

int cmd_campaign(const GlobalOpts& g) {
  if (g.config.empty())
    throw std::invalid_argument("--config <campaign.json> is required");
  Json doc = read_json_file(g.config);
  ExperimentConfig cfg = ExperimentConfig::from_json(doc);
  if (g.out_dir != ".") cfg.out_dir = g.out_dir;
  RunRecord rec = run_campaign(cfg);
  Json j = run_record_to_json(rec);
  std::ostringstream os;
  int pass = 0;
  for (const auto& s : rec.seeds)
    if (!s.error && s.report.success) ++pass;
  os << pass << "/" << rec.seeds.size() << " seeds passed, record in "
     << cfg.out_dir << "\n";
  emit(g, j, os.str());
  return rec.all_passed() ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear networks as non-atomic congestion games"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config, "Instance or campaign JSON document");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_flag("--json", g.json, "Machine-readable stdout");

  TrainConfig tc;
  std::string mode = "weight";
  auto add_train_opts = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "weight | marginal");
    sub->add_option("--restarts", tc.restarts, "Restart count");
    sub->add_option("--max-iters", tc.max_iters, "Iteration budget");
    sub->add_option("--tol", tc.grad_tol, "Projected-gradient norm threshold");
  };

  auto* validate = app.add_subcommand("validate", "Check instance assumptions");
  auto* build = app.add_subcommand("build-game", "Construct the game document");
  auto* train_cmd = app.add_subcommand("train", "Projected gradient descent");
  add_train_opts(train_cmd);
  auto* verify = app.add_subcommand("verify", "Train and check equilibrium");
  add_train_opts(verify);
  auto* poa = app.add_subcommand("poa", "Equilibrium and optimum values");

  std::vector<int> widths;
  auto* fact = app.add_subcommand("factorize", "Stochastic factorization");
  fact->add_option("--widths", widths, "Target layer widths");

  double rho = 1.0;
  long long samples = 0;
  auto* relu = app.add_subcommand("relu-scaling", "Path-failure loss scaling");
  relu->add_option("--rho", rho, "Path success probability");
  relu->add_option("--samples", samples, "Monte Carlo sample count");

  auto* sq = app.add_subcommand("sqloss-check", "Squared-loss decomposition");
  auto* camp = app.add_subcommand("campaign", "Multi-seed verification run");

  // globals (--config, --out, --seed, --json) may appear after the subcommand
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  tc.seed = g.seed;
  tc.mode = (mode == "marginal") ? TrainMode::MarginalSpace
                                 : TrainMode::WeightSpace;

  try {
    if (validate->parsed()) return cmd_validate(g);
    if (build->parsed()) return cmd_build_game(g);
    if (train_cmd->parsed()) return cmd_train(g, tc);
    if (verify->parsed()) return cmd_verify(g, tc);
    if (poa->parsed()) return cmd_poa(g);
    if (fact->parsed()) return cmd_factorize(g, widths);
    if (relu->parsed()) return cmd_relu_scaling(g, rho, samples);
    if (sq->parsed()) return cmd_sqloss(g);
    if (camp->parsed()) return cmd_campaign(g);
  } catch (const std::invalid_argument& ex) {
    std::cerr << "configuration error: " << ex.what() << std::endl;
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << std::endl;
    return kExitAssertion;
  }
  return kExitConfig;
}
