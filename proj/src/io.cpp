#include "slds/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace slds {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void require_keys(const Json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a nonempty matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& column_names) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  const Eigen::Index d = m.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i) out << ',';
    if (static_cast<std::size_t>(i) < column_names.size()) {
      out << column_names[i];
    } else {
      out << 'c' << (i + 1);
    }
  }
  out << '\n';
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i) out << ',';
      out << format_double(m(i, t));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  const std::size_t d = split_csv_line(line).size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != d) {
      throw IoError("ragged CSV row in " + path.string());
    }
    for (const auto& f : fields) {
      try {
        values.push_back(std::stod(f));
      } catch (const std::exception&) {
        throw IoError("non-numeric field '" + f + "' in " + path.string());
      }
    }
    ++rows;
  }
  Matrix m(d, rows);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t i = 0; i < d; ++i) m(i, t) = values[t * d + i];
  }
  return m;
}

void write_labels_csv(const std::filesystem::path& path, const IndexVec& z) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "mode\n";
  for (int v : z) out << (v + 1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

IndexVec read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  IndexVec z;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      z.push_back(std::stoi(line) - 1);
    } catch (const std::exception&) {
      throw IoError("non-integer label '" + line + "' in " + path.string());
    }
  }
  return z;
}

Json trace_record_to_json(const TraceRecord& rec, int chain) {
  Json j;
  j["schema_version"] = 1;
  j["chain"] = chain;
  j["iter"] = rec.iteration;
  Json z = Json::array();
  for (int v : rec.z) z.push_back(v + 1);
  j["z"] = std::move(z);
  j["active_modes"] = rec.active_modes;
  j["log_joint"] = rec.log_joint;
  j["alpha"] = rec.alpha;
  j["gamma"] = rec.gamma;
  j["kappa"] = rec.kappa;
  if (rec.ard_alphas.size() > 0) j["ard_alphas"] = matrix_to_json(rec.ard_alphas);
  if (rec.has_params) {
    Json params;
    Json a = Json::array(), sigma = Json::array(), mu = Json::array();
    for (const auto& d : rec.dyn) {
      a.push_back(matrix_to_json(d.A));
      sigma.push_back(matrix_to_json(d.Sigma));
      mu.push_back(d.has_mu() ? vector_to_json(d.mu) : Json::array());
    }
    params["A"] = std::move(a);
    params["Sigma"] = std::move(sigma);
    params["mu"] = std::move(mu);
    params["beta"] = vector_to_json(rec.beta);
    params["pi"] = matrix_to_json(rec.pi);
    if (rec.R.size() > 0) params["R"] = matrix_to_json(rec.R);
    j["params"] = std::move(params);
  }
  return j;
}

TraceRecord trace_record_from_json(const Json& j) {
  TraceRecord rec;
  rec.iteration = j.at("iter").get<int>();
  for (const auto& v : j.at("z")) rec.z.push_back(v.get<int>() - 1);
  rec.active_modes = j.at("active_modes").get<int>();
  rec.log_joint = j.at("log_joint").get<double>();
  rec.alpha = j.at("alpha").get<double>();
  rec.gamma = j.at("gamma").get<double>();
  rec.kappa = j.at("kappa").get<double>();
  if (j.contains("ard_alphas")) rec.ard_alphas = matrix_from_json(j["ard_alphas"]);
  if (j.contains("params")) {
    const Json& p = j["params"];
    rec.has_params = true;
    const auto& a = p.at("A");
    const auto& sigma = p.at("Sigma");
    const auto& mu = p.at("mu");
    for (std::size_t k = 0; k < a.size(); ++k) {
      ModeDynamics d;
      d.A = matrix_from_json(a[k]);
      d.Sigma = matrix_from_json(sigma[k]);
      if (!mu[k].empty()) d.mu = vector_from_json(mu[k]);
      rec.dyn.push_back(std::move(d));
    }
    rec.beta = vector_from_json(p.at("beta"));
    rec.pi = matrix_from_json(p.at("pi"));
    if (p.contains("R")) rec.R = matrix_from_json(p["R"]);
  }
  return rec;
}

void write_trace_jsonl(const std::filesystem::path& path, int chain,
                       const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& rec : trace) {
    out << trace_record_to_json(rec, chain).dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<TraceRecord> read_trace_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<TraceRecord> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw IoError("malformed trace line in " + path.string());
    trace.push_back(trace_record_from_json(j));
  }
  return trace;
}

RunConfig parse_run_config(const Json& j) {
  require_keys(j,
               {"model", "schedule", "data", "preprocess", "seed", "chains", "threads",
                "out_dir"},
               "config");
  RunConfig rc;
  rc.raw = j;

  if (j.contains("preprocess")) {
    const Json& p = j["preprocess"];
    require_keys(p, {"ops", "scale_target"}, "preprocess");
    for (const auto& op : p.value("ops", Json::array())) {
      rc.preprocess_ops.push_back(op.get<std::string>());
    }
    rc.scale_target = p.value("scale_target", 10.0);
  }

  const Json& model = j.at("model");
  require_keys(model,
               {"family", "prior", "obs_dim", "ar_order", "state_dim", "truncation",
                "process_mean", "fixed_A", "sticky", "hyper_priors", "s0_fraction",
                "r0_fraction", "mniw_n0", "ard_prior_mean", "mixture_noise",
                "mixture_truncation", "mixture_sigma_r", "mixture_component_dof",
                "mixture_component_mean", "p0_scale", "mu_prior_mean", "mu_prior_var"},
               "model");

  const std::string family = model.at("family").get<std::string>();
  if (family == "ar") {
    rc.model.family = ModelFamily::Ar;
  } else if (family == "slds") {
    rc.model.family = ModelFamily::Slds;
  } else if (family == "slds-shared-a") {
    rc.model.family = ModelFamily::SldsSharedA;
  } else if (family == "slds-fixed-a") {
    rc.model.family = ModelFamily::SldsFixedA;
  } else {
    throw ConfigError("model.family: unknown value '" + family + "'");
  }

  const std::string prior = model.at("prior").get<std::string>();
  if (prior == "mniw") {
    rc.model.prior = PriorFamily::Mniw;
  } else if (prior == "ard") {
    rc.model.prior = PriorFamily::Ard;
  } else if (prior == "niwn") {
    rc.model.prior = PriorFamily::Niwn;
  } else {
    throw ConfigError("model.prior: unknown value '" + prior + "'");
  }

  rc.model.obs_dim = model.at("obs_dim").get<int>();
  rc.model.ar_order = model.value("ar_order", 1);
  rc.model.state_dim = model.value("state_dim", rc.model.obs_dim);
  rc.model.L = model.value("truncation", 20);
  rc.model.process_mean = model.value("process_mean", false);
  rc.model.hdp_priors.sticky = model.value("sticky", true);
  if (model.contains("hyper_priors")) {
    const Json& hp = model["hyper_priors"];
    require_keys(hp, {"a_conc", "b_conc", "a_gamma", "b_gamma", "c_rho", "d_rho"},
                 "model.hyper_priors");
    rc.model.hdp_priors.a_conc = hp.value("a_conc", 1.0);
    rc.model.hdp_priors.b_conc = hp.value("b_conc", 0.01);
    rc.model.hdp_priors.a_gamma = hp.value("a_gamma", 1.0);
    rc.model.hdp_priors.b_gamma = hp.value("b_gamma", 0.01);
    rc.model.hdp_priors.c_rho = hp.value("c_rho", 10.0);
    rc.model.hdp_priors.d_rho = hp.value("d_rho", 1.0);
  }
  if (model.contains("fixed_A")) rc.model.fixed_A = matrix_from_json(model["fixed_A"]);
  rc.s0_fraction = model.value("s0_fraction", -1.0);
  rc.r0_fraction = model.value("r0_fraction", 0.075);
  rc.mniw_n0_override = model.value("mniw_n0", -1.0);
  rc.model.ard_prior_mean = model.value("ard_prior_mean", 1000.0);
  rc.model.p0_scale = model.value("p0_scale", -1.0);
  rc.model.mixture_noise = model.value("mixture_noise", false);
  rc.model.mixture_truncation = model.value("mixture_truncation", 10);
  rc.model.mixture_sigma_r = model.value("mixture_sigma_r", 1.0);
  if (rc.model.mixture_noise) {
    const double dof = model.value("mixture_component_dof", 3.0);
    const double mean = model.value("mixture_component_mean", 5.0 * M_PI * M_PI);
    const int d = rc.model.obs_dim;
    const double scale = mean * (dof - d - 1.0);
    if (scale <= 0.0) throw ConfigError("mixture component prior has no finite mean");
    rc.model.mixture_component_prior =
        InverseWishartParams{dof, scale * Matrix::Identity(d, d)};
  }
  if (model.contains("mu_prior_mean") || model.contains("mu_prior_var")) {
    const int ell = rc.model.out_dim();
    Vector mu0 = Vector::Zero(ell);
    if (model.contains("mu_prior_mean")) mu0 = vector_from_json(model["mu_prior_mean"]);
    double var = model.value("mu_prior_var", 1.0);
    rc.model.mu_prior = std::make_pair(mu0, Matrix(var * Matrix::Identity(ell, ell)));
  }

  if (j.contains("schedule")) {
    const Json& s = j["schedule"];
    require_keys(s,
                 {"n_iters", "burn_in", "thinning", "sequential_period", "inner_iters",
                  "store_params"},
                 "schedule");
    rc.model.schedule.n_iters = s.value("n_iters", 1000);
    rc.model.schedule.burn_in = s.value("burn_in", -1);
    rc.model.schedule.thinning = s.value("thinning", 1);
    rc.model.schedule.sequential_period = s.value("sequential_period", 10);
    rc.model.schedule.inner_iters = s.value("inner_iters", 5);
    rc.model.schedule.store_params = s.value("store_params", false);
  }

  const Json& data = j.at("data");
  require_keys(data, {"path", "context_path", "supervision_path"}, "data");
  rc.data_path = data.at("path").get<std::string>();
  rc.context_path = data.value("context_path", "");
  rc.supervision_path = data.value("supervision_path", "");

  rc.seed = j.value("seed", 0ULL);
  rc.chains = j.value("chains", 1);
  rc.threads = j.value("threads", 1);
  rc.out_dir = j.value("out_dir", "out");
  if (rc.chains < 1) throw ConfigError("chains must be at least 1");
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
  return parse_run_config(j);
}

std::uint64_t config_hash(const Json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_manifest(const std::filesystem::path& path, const Json& config,
                    std::uint64_t seed) {
  Json manifest;
  manifest["schema_version"] = 1;
  manifest["config"] = config;
  manifest["config_hash"] = config_hash(config);
  manifest["seed"] = seed;
  manifest["tool_version"] = "1.0.0";
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << manifest.dump(2) << '\n';
}

PreprocessResult center_and_scale(const Matrix& y, double target_range) {
  PreprocessResult out;
  const Eigen::Index d = y.rows();
  Vector offsets = y.rowwise().mean();
  Vector scales(d);
  Matrix centered = y.colwise() - offsets;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double max_abs = centered.row(i).cwiseAbs().maxCoeff();
    scales[i] = max_abs > 0.0 ? target_range / max_abs : 1.0;
  }
  out.y = scales.asDiagonal() * centered;
  out.metadata["op"] = "center-scale";
  out.metadata["target_range"] = target_range;
  out.metadata["offsets"] = Json::array();
  out.metadata["scales"] = Json::array();
  for (Eigen::Index i = 0; i < d; ++i) {
    out.metadata["offsets"].push_back(offsets[i]);
    out.metadata["scales"].push_back(scales[i]);
  }
  return out;
}

Matrix invert_center_and_scale(const Matrix& y, const Json& metadata) {
  const Eigen::Index d = y.rows();
  Matrix out = y;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double scale = metadata.at("scales")[i].get<double>();
    const double offset = metadata.at("offsets")[i].get<double>();
    out.row(i) = y.row(i) / scale + Vector::Constant(y.cols(), offset).transpose();
  }
  return out;
}

PreprocessResult first_difference_op(const Matrix& y) {
  PreprocessResult out;
  out.y = first_differences(y);
  out.metadata["op"] = "first-difference";
  return out;
}

PreprocessResult log_squared_returns(const Matrix& y) {
  PreprocessResult out;
  out.y = (y.array().square().max(1e-12)).log();
  out.metadata["op"] = "log-squared-returns";
  out.metadata["zero_clamp"] = 1e-12;
  return out;
}

}  // namespace slds
