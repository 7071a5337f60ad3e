// msm2 — second-order multistate Markov models on daily trajectory data.
//
// Subcommands: simulate, estimate, predict, markov-test.  Every output file
// is accompanied by <out>.manifest.json recording the command, parameters
// and input hashes; outputs are byte-deterministic for fixed inputs and
// parameters, independent of --threads.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "msm2/errors.hpp"
#include "msm2/estimate.hpp"
#include "msm2/io.hpp"
#include "msm2/markov_test.hpp"
#include "msm2/model.hpp"
#include "msm2/propagate.hpp"
#include "msm2/simulate.hpp"

namespace {

using msm2::ConfigError;
using msm2::IoError;
using msm2::ValidationError;

int parse_state(const std::string& text, const msm2::StateSpace& space,
                const char* what) {
  if (!text.empty() &&
      text.find_first_not_of("0123456789") == std::string::npos) {
    const int v = std::stoi(text);
    if (v < 1 || v > space.num_states())
      throw ConfigError(std::string(what) + " state index " + text +
                        " out of range");
    return v - 1;
  }
  try {
    return space.index_of(text);
  } catch (const ValidationError&) {
    throw ConfigError(std::string(what) + " state \"" + text +
                      "\" is neither an index nor a known label");
  }
}

std::pair<int, int> parse_state_pair(const std::string& text,
                                     const msm2::StateSpace& space,
                                     const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw ConfigError(std::string(what) + " must be two states \"a,b\"");
  return {parse_state(text.substr(0, comma), space, what),
          parse_state(text.substr(comma + 1), space, what)};
}

std::vector<msm2::Trajectory> load_validated(const std::string& data_path,
                                             const msm2::StateSpace& space,
                                             bool strict,
                                             std::vector<std::string>* notes) {
  std::vector<msm2::Trajectory> dataset =
      msm2::read_trajectories_csv(data_path, space);
  const msm2::ValidationReport report =
      msm2::validate_dataset(dataset, space, strict);
  if (!report.ok()) {
    // Keep the clean trajectories; every exclusion is reported.
    for (const msm2::Violation& v : report.violations)
      std::cerr << "warning: " << v.message << "\n";
    std::vector<msm2::Trajectory> kept;
    kept.reserve(dataset.size());
    std::size_t next_flagged = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (next_flagged < report.flagged.size() &&
          report.flagged[next_flagged] == i) {
        ++next_flagged;
        if (notes)
          notes->push_back("excluded subject " + dataset[i].subject_id);
        continue;
      }
      kept.push_back(std::move(dataset[i]));
    }
    if (kept.empty())
      throw ValidationError("all trajectories were excluded by validation");
    std::cerr << "warning: excluded " << report.flagged.size() << " of "
              << dataset.size() << " trajectories\n";
    return kept;
  }
  return dataset;
}

msm2::StateSpace space_from_json(const nlohmann::json& j,
                                 const std::string& where) {
  const int m = j.at("m").get<int>();
  auto labels = j.at("labels").get<std::vector<std::string>>();
  if (static_cast<int>(labels.size()) != m)
    throw ValidationError(where + ": labels size does not match m");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("adjacency"))
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  std::vector<int> absorbing;
  if (j.contains("absorbing"))
    absorbing = j.at("absorbing").get<std::vector<int>>();
  return msm2::StateSpace::from_one_based(std::move(labels), edges, absorbing);
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
  const nlohmann::json cfg = [&] {
    try {
      return nlohmann::json::parse(msm2::read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(config_path + ": invalid JSON: " + e.what());
    }
  }();

  std::vector<std::string> inputs{config_path};
  msm2::SimulationConfig sim{
      .space = [&] {
        if (cfg.contains("space_path")) {
          inputs.push_back(cfg.at("space_path").get<std::string>());
          return msm2::read_space_json(inputs.back());
        }
        if (!cfg.contains("space"))
          throw ConfigError(config_path + ": needs \"space\" or \"space_path\"");
        return space_from_json(cfg.at("space"), config_path);
      }(),
      .tensor = {},
      .init = {},
      .n_subjects = 0,
      .t_max = 0,
      .seed = 0,
      .order = msm2::ChainOrder::Second,
  };
  {
    msm2::TensorBundle bundle;
    if (cfg.contains("tensor_path")) {
      inputs.push_back(cfg.at("tensor_path").get<std::string>());
      bundle = msm2::read_tensor_json(inputs.back());
    } else if (cfg.contains("tensor")) {
      // Inline tensors go through the same reader via a temp round-trip to
      // keep one parsing path; cheap at these sizes.
      const std::string tmp = out_path + ".tensor.tmp.json";
      msm2::write_file(tmp, cfg.at("tensor").dump());
      bundle = msm2::read_tensor_json(tmp);
      std::remove(tmp.c_str());
    } else {
      throw ConfigError(config_path + ": needs \"tensor\" or \"tensor_path\"");
    }
    sim.tensor = std::move(bundle.tensor);
    sim.init = std::move(bundle.init);
  }
  if (!cfg.contains("n_subjects") || !cfg.contains("t_max") ||
      !cfg.contains("seed"))
    throw ConfigError(config_path + ": needs n_subjects, t_max and seed");
  sim.n_subjects = cfg.at("n_subjects").get<int>();
  sim.t_max = cfg.at("t_max").get<int>();
  sim.seed = cfg.at("seed").get<std::uint64_t>();
  if (cfg.contains("order")) {
    const std::string order = cfg.at("order").get<std::string>();
    if (order == "first")
      sim.order = msm2::ChainOrder::First;
    else if (order != "second")
      throw ConfigError(config_path + ": order must be \"first\" or \"second\"");
  }

  const std::vector<msm2::Trajectory> cohort = msm2::simulate_cohort(sim);
  msm2::write_trajectories_csv(out_path, cohort);

  msm2::RunManifest manifest;
  manifest.command = "simulate";
  manifest.parameters = {
      {"config", config_path},
      {"n_subjects", std::to_string(sim.n_subjects)},
      {"t_max", std::to_string(sim.t_max)},
      {"seed", std::to_string(sim.seed)},
      {"order", sim.order == msm2::ChainOrder::First ? "first" : "second"},
  };
  manifest.input_paths = inputs;
  manifest.output_paths = {out_path};
  msm2::write_manifest(out_path, manifest);
  return 0;
}

int run_estimate(const std::string& data_path, const std::string& space_path,
                 const std::string& method_name, const std::string& out_path,
                 const std::string& labels_path,
                 const std::string& two_step_path, std::int64_t min_support,
                 bool strict) {
  msm2::EstimateMethod method;
  if (method_name == "ratio")
    method = msm2::EstimateMethod::Ratio;
  else if (method_name == "conditional")
    method = msm2::EstimateMethod::Conditional;
  else
    throw ConfigError("--method must be ratio or conditional");

  msm2::StateSpace space = msm2::read_space_json(space_path);
  if (!labels_path.empty()) {
    // Optional sidecar overriding the labels carried by the space file.
    auto labels = msm2::read_labels_csv(labels_path);
    if (static_cast<int>(labels.size()) != space.num_states())
      throw ValidationError(labels_path +
                            ": label count does not match state space");
    std::vector<std::pair<int, int>> edges;
    for (int f = 0; f < space.num_states(); ++f)
      for (int t = 0; t < space.num_states(); ++t)
        if (space.edge(f, t)) edges.emplace_back(f, t);
    std::vector<int> absorbing = space.absorbing_states();
    space = msm2::StateSpace(std::move(labels), edges, absorbing);
  }

  std::vector<std::string> notes;
  const std::vector<msm2::Trajectory> dataset =
      load_validated(data_path, space, strict, &notes);

  const msm2::PathCounts counts = msm2::count_paths(dataset, space);
  const msm2::TensorEstimate est =
      msm2::estimate_tensor(counts, space, method, min_support);
  for (int h = 0; h < space.num_states(); ++h)
    for (int j = 0; j < space.num_states(); ++j)
      if (est.thin[static_cast<std::size_t>(h) * space.num_states() + j])
        std::cerr << "warning: history (" << (h + 1) << "," << (j + 1)
                  << ") estimated from only "
                  << est.at_risk_totals[static_cast<std::size_t>(h) *
                                            space.num_states() +
                                        j]
                  << " at-risk days\n";

  msm2::TensorBundle bundle;
  bundle.labels = space.labels();
  bundle.tensor = est.tensor;
  bundle.init = msm2::estimate_initialization(dataset, space);
  msm2::write_tensor_json(out_path, bundle);

  msm2::RunManifest manifest;
  manifest.command = "estimate";
  manifest.parameters = {
      {"data", data_path},
      {"space", space_path},
      {"method", method_name},
      {"min_support", std::to_string(min_support)},
      {"strict", strict ? "true" : "false"},
      {"subjects", std::to_string(dataset.size())},
  };
  for (const std::string& n : notes) manifest.parameters.push_back({"note", n});
  manifest.input_paths = {data_path, space_path};
  if (!labels_path.empty()) manifest.input_paths.push_back(labels_path);
  manifest.output_paths = {out_path};

  if (!two_step_path.empty()) {
    msm2::write_two_step_csv(two_step_path, msm2::two_step_paths(dataset, space),
                             space);
    manifest.output_paths.push_back(two_step_path);
    msm2::RunManifest m2 = manifest;
    msm2::write_manifest(two_step_path, m2);
  }
  msm2::write_manifest(out_path, manifest);
  return 0;
}

int run_predict(const std::string& tensor_path, const std::string& from_text,
                const std::string& target_text, int horizon,
                const std::string& out_path) {
  if (horizon < 1) throw ConfigError("--horizon must be >= 1");
  const msm2::TensorBundle bundle = msm2::read_tensor_json(tensor_path);

  // Resolve state references against the labels stored with the tensor; a
  // throwaway space with full adjacency is enough for lookups.
  std::vector<std::pair<int, int>> edges;
  const int m = bundle.tensor.m;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) edges.emplace_back(a, b);
  const msm2::StateSpace lookup(bundle.labels, edges, {});

  const auto [prev, current] = parse_state_pair(from_text, lookup, "--from");
  const int target = parse_state(target_text, lookup, "--target");

  msm2::PredictionCurve curve;
  try {
    curve = msm2::prediction_curve(bundle.tensor, prev, current, target,
                                   horizon);
  } catch (const std::domain_error& e) {
    throw ValidationError(e.what());
  }
  msm2::write_curve_csv(out_path, curve);
  if (curve.lost_mass > 0.0)
    std::cerr << "warning: " << curve.lost_mass
              << " probability mass reached histories the tensor does not "
                 "support\n";

  msm2::RunManifest manifest;
  manifest.command = "predict";
  char lost[40];
  std::snprintf(lost, sizeof(lost), "%.17g", curve.lost_mass);
  manifest.parameters = {
      {"tensor", tensor_path}, {"from", from_text},
      {"target", target_text}, {"horizon", std::to_string(horizon)},
      {"lost_mass", lost},
  };
  manifest.input_paths = {tensor_path};
  manifest.output_paths = {out_path};
  msm2::write_manifest(out_path, manifest);
  return 0;
}

int run_markov_test(const std::string& data_path,
                    const std::string& space_path,
                    const std::string& transition_text,
                    const std::string& grid_text, int B, std::uint64_t seed,
                    const std::string& conditioning_text,
                    const std::string& weights_name,
                    const std::string& out_path, bool strict) {
  const msm2::StateSpace space = msm2::read_space_json(space_path);
  const auto [from, to] = parse_state_pair(transition_text, space,
                                           "--transition");

  msm2::TestGrid grid_spec;
  {
    double vals[3] = {1.0, 11.0, 0.5};
    std::size_t start = 0;
    int count = 0;
    const std::string text = grid_text;
    while (start <= text.size() && count < 3) {
      const auto comma = text.find(',', start);
      const std::string piece =
          text.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      try {
        vals[count] = std::stod(piece);
      } catch (const std::exception&) {
        throw ConfigError("--grid must be t0,t_max[,step]");
      }
      ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (count < 2) throw ConfigError("--grid must be t0,t_max[,step]");
    grid_spec.t0 = vals[0];
    grid_spec.t_max = vals[1];
    grid_spec.step = vals[2];
  }

  std::vector<int> conditioning;
  if (!conditioning_text.empty()) {
    std::size_t start = 0;
    while (start <= conditioning_text.size()) {
      const auto comma = conditioning_text.find(',', start);
      const std::string piece = conditioning_text.substr(
          start,
          comma == std::string::npos ? std::string::npos : comma - start);
      conditioning.push_back(parse_state(piece, space, "--conditioning"));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }

  msm2::WeightScheme weights;
  if (weights_name == "atrisk")
    weights = msm2::WeightScheme::AtRisk;
  else if (weights_name == "uniform")
    weights = msm2::WeightScheme::Uniform;
  else
    throw ConfigError("--weights must be atrisk or uniform");

  std::vector<std::string> notes;
  const std::vector<msm2::Trajectory> dataset =
      load_validated(data_path, space, strict, &notes);

  const msm2::MarkovTestReport report =
      msm2::wild_bootstrap_test(dataset, space, from, to, grid_spec.points(),
                                conditioning, B, seed, weights);
  for (const std::string& w : report.warnings)
    std::cerr << "warning: " << w << "\n";
  msm2::write_markov_report_csv(out_path, report, space);

  msm2::RunManifest manifest;
  manifest.command = "markov-test";
  char grid_buf[80];
  std::snprintf(grid_buf, sizeof(grid_buf), "%.17g,%.17g,%.17g", grid_spec.t0,
                grid_spec.t_max, grid_spec.step);
  manifest.parameters = {
      {"data", data_path},
      {"space", space_path},
      {"transition", transition_text},
      {"grid", grid_buf},
      {"B", std::to_string(B)},
      {"seed", std::to_string(seed)},
      {"weights", weights_name},
      {"strict", strict ? "true" : "false"},
  };
  for (const std::string& w : report.warnings)
    manifest.parameters.push_back({"warning", w});
  for (const std::string& n : notes) manifest.parameters.push_back({"note", n});
  manifest.input_paths = {data_path, space_path};
  manifest.output_paths = {out_path};
  msm2::write_manifest(out_path, manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order multistate Markov models on daily trajectories"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker threads (0 = library default); results do not "
                 "depend on it");

  auto* sim = app.add_subcommand("simulate", "Draw a cohort of trajectories");
  std::string sim_config, sim_out;
  sim->add_option("--config", sim_config, "Simulation config JSON")
      ->required();
  sim->add_option("--out", sim_out, "Output trajectory CSV")->required();

  auto* est = app.add_subcommand(
      "estimate", "Fit the second-order transition tensor from data");
  std::string est_data, est_space, est_method = "ratio", est_out;
  std::string est_labels, est_two_step;
  std::int64_t est_min_support = 10;
  bool est_strict = false;
  est->add_option("--data", est_data, "Trajectory CSV")->required();
  est->add_option("--space", est_space, "State space JSON")->required();
  est->add_option("--method", est_method, "ratio | conditional");
  est->add_option("--out", est_out, "Output tensor JSON")->required();
  est->add_option("--labels", est_labels, "Optional labels CSV (index,label)");
  est->add_option("--two-step-out", est_two_step,
                  "Also write the two-step path table CSV");
  est->add_option("--min-support", est_min_support,
                  "At-risk days below which a row is flagged as thin");
  est->add_flag("--strict", est_strict,
                "Fail on any trajectory violation instead of excluding");

  auto* pre = app.add_subcommand(
      "predict", "n-step probabilities from a fitted tensor");
  std::string pre_tensor, pre_from, pre_target, pre_out;
  int pre_horizon = 0;
  pre->add_option("--tensor", pre_tensor, "Tensor JSON")->required();
  pre->add_option("--from", pre_from,
                  "Conditioning pair \"prev,current\" (indices or labels)")
      ->required();
  pre->add_option("--target", pre_target, "Target state")->required();
  pre->add_option("--horizon", pre_horizon, "Maximum horizon n")->required();
  pre->add_option("--out", pre_out, "Output CSV (n,probability)")->required();

  auto* mkt = app.add_subcommand(
      "markov-test", "Wild-bootstrap log-rank test of the Markov property");
  std::string mkt_data, mkt_space, mkt_transition, mkt_grid = "1,11,0.5";
  std::string mkt_conditioning, mkt_weights = "atrisk", mkt_out;
  int mkt_B = 5000;
  std::uint64_t mkt_seed = 1;
  bool mkt_strict = false;
  mkt->add_option("--data", mkt_data, "Trajectory CSV")->required();
  mkt->add_option("--space", mkt_space, "State space JSON")->required();
  mkt->add_option("--transition", mkt_transition,
                  "Transition \"from,to\" (indices or labels)")
      ->required();
  mkt->add_option("--grid", mkt_grid, "Evaluation grid t0,t_max[,step]");
  mkt->add_option("--B", mkt_B, "Bootstrap resamples");
  mkt->add_option("--seed", mkt_seed, "RNG seed");
  mkt->add_option("--conditioning", mkt_conditioning,
                  "Conditioning states (default: all transient)");
  mkt->add_option("--weights", mkt_weights, "atrisk | uniform");
  mkt->add_option("--out", mkt_out, "Output CSV of p-values")->required();
  mkt->add_flag("--strict", mkt_strict,
                "Fail on any trajectory violation instead of excluding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (sim->parsed()) return run_simulate(sim_config, sim_out);
    if (est->parsed())
      return run_estimate(est_data, est_space, est_method, est_out, est_labels,
                          est_two_step, est_min_support, est_strict);
    if (pre->parsed())
      return run_predict(pre_tensor, pre_from, pre_target, pre_horizon,
                         pre_out);
    if (mkt->parsed())
      return run_markov_test(mkt_data, mkt_space, mkt_transition, mkt_grid,
                             mkt_B, mkt_seed, mkt_conditioning, mkt_weights,
                             mkt_out, mkt_strict);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
