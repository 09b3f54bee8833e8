#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "slds/eval.hpp"
#include "slds/gibbs.hpp"
#include "slds/io.hpp"
#include "slds/synthetic.hpp"

namespace fs = std::filesystem;
using namespace slds;

namespace {

IndexVec read_supervision(const fs::path& path) {
  // Same single-column format as mode labels; zero marks a free step.
  IndexVec raw = read_labels_csv(path);  // reader subtracts one
  for (int& v : raw) {
    if (v < 0) v = -1;
  }
  return raw;
}

void write_meta(const fs::path& path, const Json& meta) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << meta.dump(2) << '\n';
}

std::vector<TraceRecord> load_trace_dir(const fs::path& trace, double burnin_frac) {
  std::vector<fs::path> files;
  if (fs::is_directory(trace)) {
    for (const auto& entry : fs::directory_iterator(trace)) {
      if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(trace);
  }
  if (files.empty()) throw IoError("no trace files under " + trace.string());
  std::vector<TraceRecord> out;
  for (const auto& f : files) {
    std::vector<TraceRecord> one = read_trace_jsonl(f);
    const std::size_t skip = static_cast<std::size_t>(burnin_frac * one.size());
    for (std::size_t i = skip; i < one.size(); ++i) out.push_back(std::move(one[i]));
  }
  if (out.empty()) throw IoError("traces are empty after burn-in");
  return out;
}

int cmd_generate(const std::string& scenario_name_arg, int T, std::uint64_t seed,
                 const std::string& out_dir) {
  const Scenario scenario = scenario_from_name(scenario_name_arg);
  SyntheticData data = generate_synthetic(scenario, T, seed);
  fs::create_directories(out_dir);
  const fs::path base = fs::path(out_dir) / scenario_name_arg;
  write_matrix_csv(base.string() + "_y.csv", data.y);
  write_labels_csv(base.string() + "_z.csv", data.z_true);
  if (data.family == ModelFamily::Ar) {
    write_matrix_csv(base.string() + "_context.csv", data.context);
  }
  Json meta;
  meta["scenario"] = scenario_name_arg;
  meta["T"] = T;
  meta["seed"] = seed;
  meta["self_transition"] = data.self_transition;
  meta["modes"] = static_cast<int>(data.dyn.size());
  meta["family"] = data.family == ModelFamily::Ar ? "ar" : "slds";
  if (data.unstable_dynamics) {
    meta["warning"] = "requested dynamics have spectral radius above one";
    std::cerr << "warning: unstable dynamics requested\n";
  }
  Json events = Json::array();
  for (int t : change_points(data.z_true)) events.push_back(t + 1);
  meta["change_points"] = events;
  write_meta(base.string() + "_meta.json", meta);
  std::cout << "wrote " << base.string() << "_y.csv (" << data.y.cols() << " steps)\n";
  return 0;
}

int cmd_preprocess(const std::string& input, const std::vector<std::string>& ops,
                   const std::string& output, double scale_target) {
  Matrix y = read_matrix_csv(input);
  Json all_meta = Json::array();
  for (const std::string& op : ops) {
    PreprocessResult res;
    if (op == "center-scale") {
      res = center_and_scale(y, scale_target);
    } else if (op == "first-difference") {
      res = first_difference_op(y);
    } else if (op == "log-squared-returns") {
      res = log_squared_returns(y);
    } else {
      throw ConfigError("unknown preprocess op: " + op);
    }
    y = res.y;
    all_meta.push_back(res.metadata);
  }
  write_matrix_csv(output, y);
  Json meta;
  meta["input"] = input;
  meta["ops"] = all_meta;
  write_meta(output + ".meta.json", meta);
  std::cout << "wrote " << output << "\n";
  return 0;
}

int cmd_fit(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
            const std::string& out_override, int chains_override) {
  RunConfig rc = load_run_config(config_path);
  if (has_seed) rc.seed = seed_override;
  if (!out_override.empty()) rc.out_dir = out_override;
  if (chains_override > 0) rc.chains = chains_override;

  Matrix y = read_matrix_csv(rc.data_path);
  for (const std::string& op : rc.preprocess_ops) {
    if (op == "center-scale") {
      y = center_and_scale(y, rc.scale_target).y;
    } else if (op == "first-difference") {
      y = first_difference_op(y).y;
    } else if (op == "log-squared-returns") {
      y = log_squared_returns(y).y;
    } else {
      throw ConfigError("unknown preprocess op: " + op);
    }
  }

  Dataset ds;
  const int r = rc.model.is_slds() ? 0 : rc.model.ar_order;
  if (!rc.context_path.empty()) {
    ds.context = read_matrix_csv(rc.context_path);
    ds.y = y;
  } else if (r > 0) {
    // Without an explicit context file the first r observations provide it.
    if (y.cols() <= r) throw ConfigError("series shorter than the AR order");
    ds.context = y.leftCols(r).rowwise().reverse();
    ds.y = y.rightCols(y.cols() - r);
  } else {
    ds.context = Matrix::Zero(y.rows(), 0);
    ds.y = y;
  }

  if (!rc.supervision_path.empty()) {
    rc.model.supervision = read_supervision(rc.supervision_path);
  }

  set_hyperparameters_from_data(rc.model, ds.y, rc.s0_fraction, rc.r0_fraction,
                                rc.mniw_n0_override);
  rc.model.validate(ds.dim(), ds.length());

  fs::create_directories(rc.out_dir);
  auto traces = run_chains(rc.model, ds, rc.chains, rc.seed, rc.threads);
  for (int c = 0; c < rc.chains; ++c) {
    std::ostringstream name;
    name << "trace_chain" << c << ".jsonl";
    write_trace_jsonl(fs::path(rc.out_dir) / name.str(), c, traces[c]);
  }
  write_manifest(fs::path(rc.out_dir) / "manifest.json", rc.raw, rc.seed);
  std::cout << "wrote " << rc.chains << " trace file(s) to " << rc.out_dir << "\n";
  return 0;
}

int cmd_evaluate(const std::string& trace, const std::string& protocol,
                 const std::string& truth_path, const std::string& out_path,
                 double burnin_frac, int window, const std::string& config_path,
                 const std::string& heldout_path, const std::string& context_path,
                 std::uint64_t seed) {
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open for writing: " + out_path);
  out.precision(17);

  if (protocol == "hamming") {
    const IndexVec z_true = read_labels_csv(truth_path);
    auto records = load_trace_dir(trace, burnin_frac);
    std::vector<double> distances;
    distances.reserve(records.size());
    for (const auto& rec : records) {
      distances.push_back(hamming_with_optimal_mapping(rec.z, z_true));
    }
    std::sort(distances.begin(), distances.end());
    auto quantile = [&](double q) {
      const double idx = q * (distances.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(idx);
      const double frac = idx - lo;
      const std::size_t hi = std::min(lo + 1, distances.size() - 1);
      return (1.0 - frac) * distances[lo] + frac * distances[hi];
    };
    out << "quantile,hamming\n";
    out << "0.1," << quantile(0.1) << "\n";
    out << "0.5," << quantile(0.5) << "\n";
    out << "0.9," << quantile(0.9) << "\n";
  } else if (protocol == "roc") {
    const IndexVec z_true = read_labels_csv(truth_path);
    auto records = load_trace_dir(trace, burnin_frac);
    std::vector<IndexVec> samples;
    samples.reserve(records.size());
    for (auto& rec : records) samples.push_back(std::move(rec.z));
    RocCurve curve = changepoint_roc(samples, change_points(z_true), window);
    out << "threshold,fpr,tpr,auc\n";
    for (const auto& pt : curve.points) {
      out << pt.threshold << ',' << pt.fpr << ',' << pt.tpr << ',' << curve.auc << "\n";
    }
  } else if (protocol == "heldout") {
    if (config_path.empty() || heldout_path.empty()) {
      throw ConfigError("heldout protocol needs --config and --heldout-data");
    }
    RunConfig rc = load_run_config(config_path);
    Matrix y_heldout = read_matrix_csv(heldout_path);
    Matrix context = Matrix::Zero(y_heldout.rows(), 0);
    Matrix y_eval = y_heldout;
    const int r = rc.model.is_slds() ? 0 : rc.model.ar_order;
    if (!context_path.empty()) {
      context = read_matrix_csv(context_path);
    } else if (r > 0) {
      if (y_heldout.cols() <= r) throw ConfigError("held-out series shorter than AR order");
      context = y_heldout.leftCols(r).rowwise().reverse();
      y_eval = y_heldout.rightCols(y_heldout.cols() - r);
    }
    // Hyperparameters only matter through the stored parameter samples here,
    // but validation wants a complete model.
    set_hyperparameters_from_data(rc.model, y_eval, rc.s0_fraction, rc.r0_fraction,
                                  rc.mniw_n0_override);
    auto records = load_trace_dir(trace, burnin_frac);
    HeldoutResult res = heldout_log_likelihood(records, rc.model, y_eval, context, seed);
    out << "sample,loglik\n";
    for (std::size_t i = 0; i < res.values.size(); ++i) {
      out << i << ',' << res.values[i] << "\n";
    }
    Json meta;
    meta["method"] = res.method;
    meta["interval_lo"] = res.lo;
    meta["interval_hi"] = res.hi;
    meta["coverage"] = 0.95;
    write_meta(out_path + ".meta.json", meta);
  } else if (protocol == "modecount") {
    auto records = load_trace_dir(trace, burnin_frac);
    auto hist = mode_count_summary(records);
    out << "modes,count\n";
    for (const auto& [modes, count] : hist) out << modes << ',' << count << "\n";
  } else {
    throw ConfigError("unknown protocol: " + protocol);
  }
  if (!out) throw IoError("write failed: " + out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric switching linear dynamical systems"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "simulate a synthetic scenario");
  std::string scenario;
  int gen_T = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "data";
  gen->add_option("--scenario", scenario,
                  "one of: var1-5mode, ar2-3mode, slds-3mode, slds-sparse-2mode, "
                  "mssv-switching-mean")
      ->required();
  gen->add_option("--T", gen_T, "series length");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");

  auto* pre = app.add_subcommand("preprocess", "transform an observation CSV");
  std::string pre_in, pre_out;
  std::vector<std::string> pre_ops;
  double pre_scale = 10.0;
  pre->add_option("--input", pre_in)->required();
  pre->add_option("--op", pre_ops,
                  "center-scale | first-difference | log-squared-returns (repeatable)")
      ->required();
  pre->add_option("--out", pre_out)->required();
  pre->add_option("--scale-target", pre_scale, "max-abs target for center-scale");

  auto* fit = app.add_subcommand("fit", "run Gibbs chains from a JSON config");
  std::string fit_config, fit_out;
  std::uint64_t fit_seed = 0;
  int fit_chains = -1;
  fit->add_option("--config", fit_config)->required();
  auto* seed_opt = fit->add_option("--seed", fit_seed, "override the config seed");
  fit->add_option("--out", fit_out, "override the output directory");
  fit->add_option("--chains", fit_chains, "override the chain count");

  auto* eval = app.add_subcommand("evaluate", "summarize traces against ground truth");
  std::string ev_trace, ev_protocol, ev_truth, ev_out, ev_config, ev_heldout, ev_context;
  double ev_burnin = 0.5;
  int ev_window = 10;
  std::uint64_t ev_seed = 0;
  eval->add_option("--trace", ev_trace, "trace file or directory")->required();
  eval->add_option("--protocol", ev_protocol, "hamming | roc | heldout | modecount")
      ->required();
  eval->add_option("--truth", ev_truth, "true mode labels CSV");
  eval->add_option("--out", ev_out)->required();
  eval->add_option("--burnin-frac", ev_burnin, "fraction of each trace to drop");
  eval->add_option("--window", ev_window, "window length for the ROC protocol");
  eval->add_option("--config", ev_config, "run config (heldout protocol)");
  eval->add_option("--heldout-data", ev_heldout, "held-out observations CSV");
  eval->add_option("--context", ev_context, "context observations CSV");
  eval->add_option("--seed", ev_seed, "seed for sampled-mode likelihoods");

  try {
    app.parse(argc, argv);
    if (*gen) return cmd_generate(scenario, gen_T, gen_seed, gen_out);
    if (*pre) return cmd_preprocess(pre_in, pre_ops, pre_out, pre_scale);
    if (*fit) {
      return cmd_fit(fit_config, fit_seed, seed_opt->count() > 0, fit_out, fit_chains);
    }
    if (*eval) {
      return cmd_evaluate(ev_trace, ev_protocol, ev_truth, ev_out, ev_burnin, ev_window,
                          ev_config, ev_heldout, ev_context, ev_seed);
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
