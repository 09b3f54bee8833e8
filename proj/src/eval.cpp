#include "slds/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "slds/linalg.hpp"
#include "slds/mode_sampler.hpp"

namespace slds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logsumexp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// Confusion counts between the labels present in each sequence.
struct Confusion {
  std::vector<int> est_labels;
  std::vector<int> true_labels;
  Matrix counts;  // est x true
};

Confusion build_confusion(const IndexVec& z_est, const IndexVec& z_true) {
  if (z_est.size() != z_true.size()) {
    throw ParameterError("label sequences must have equal length");
  }
  std::set<int> est_set(z_est.begin(), z_est.end());
  std::set<int> true_set(z_true.begin(), z_true.end());
  Confusion c;
  c.est_labels.assign(est_set.begin(), est_set.end());
  c.true_labels.assign(true_set.begin(), true_set.end());
  c.counts = Matrix::Zero(c.est_labels.size(), c.true_labels.size());
  auto index_of = [](const std::vector<int>& v, int x) {
    return static_cast<int>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  for (std::size_t t = 0; t < z_est.size(); ++t) {
    c.counts(index_of(c.est_labels, z_est[t]), index_of(c.true_labels, z_true[t])) += 1.0;
  }
  return c;
}

// Maximum total overlap of an injective est -> true matching.
double max_overlap(const Matrix& counts) {
  const int s = static_cast<int>(std::max(counts.rows(), counts.cols()));
  Matrix cost = Matrix::Zero(s, s);
  cost.topLeftCorner(counts.rows(), counts.cols()) = -counts;
  const auto assign = hungarian_min_assignment(cost);
  double overlap = 0.0;
  for (int i = 0; i < static_cast<int>(counts.rows()); ++i) {
    if (assign[i] < counts.cols()) overlap += counts(i, assign[i]);
  }
  return overlap;
}

}  // namespace

std::vector<int> hungarian_min_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ParameterError("hungarian_min_assignment: matrix must be square");
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) result[p[j] - 1] = j - 1;
  }
  return result;
}

LabelMapping optimal_label_mapping(const IndexVec& z_est, const IndexVec& z_true) {
  Confusion c = build_confusion(z_est, z_true);
  const double best = max_overlap(c.counts);

  LabelMapping out;
  out.overlap = static_cast<int>(std::lround(best));

  // Fix the mapping greedily in ascending label order; each tentative pair is
  // kept only when the remaining assignment can still reach the optimum.
  Matrix counts = c.counts;
  std::vector<int> est_left(c.est_labels.begin(), c.est_labels.end());
  std::vector<int> true_left(c.true_labels.begin(), c.true_labels.end());
  double committed = 0.0;
  while (!est_left.empty()) {
    const int e = est_left.front();
    bool matched = false;
    for (std::size_t tj = 0; tj < true_left.size(); ++tj) {
      Matrix reduced(counts.rows() - 1, counts.cols() - 1);
      for (Eigen::Index i = 1, ri = 0; i < counts.rows(); ++i, ++ri) {
        for (Eigen::Index j = 0, rj = 0; j < counts.cols(); ++j) {
          if (j == static_cast<Eigen::Index>(tj)) continue;
          reduced(ri, rj++) = counts(i, j);
        }
      }
      const double with_pair = committed + counts(0, tj) + max_overlap(reduced);
      if (with_pair >= best - 0.5) {
        out.mapping[e] = true_left[tj];
        committed += counts(0, tj);
        counts = reduced;
        true_left.erase(true_left.begin() + tj);
        matched = true;
        break;
      }
    }
    if (!matched) {
      counts = counts.bottomRows(counts.rows() - 1).eval();
    }
    est_left.erase(est_left.begin());
  }
  return out;
}

double hamming_with_optimal_mapping(const IndexVec& z_est, const IndexVec& z_true) {
  if (z_est.size() != z_true.size()) {
    throw ParameterError("hamming_with_optimal_mapping: length mismatch");
  }
  if (z_est.empty()) throw ParameterError("hamming_with_optimal_mapping: empty sequences");
  Confusion c = build_confusion(z_est, z_true);
  return 1.0 - max_overlap(c.counts) / static_cast<double>(z_est.size());
}

double hmm_forward_loglik(const Matrix& loglik, const Vector& beta, const Matrix& pi) {
  const Eigen::Index T = loglik.rows();
  const Eigen::Index L = loglik.cols();
  const Matrix log_pi = pi.array().max(1e-300).log();
  Vector a = beta.array().max(1e-300).log().matrix() + loglik.row(0).transpose();
  Vector next(L);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index k = 0; k < L; ++k) {
      next[k] = logsumexp(a + log_pi.col(k)) + loglik(t, k);
    }
    a = next;
  }
  return logsumexp(a);
}

IndexVec viterbi_map_sequence(const Matrix& loglik, const Vector& beta, const Matrix& pi) {
  const Eigen::Index T = loglik.rows();
  const Eigen::Index L = loglik.cols();
  const Matrix log_pi = pi.array().max(1e-300).log();
  Matrix score(T, L);
  Eigen::MatrixXi back(T, L);
  score.row(0) =
      (beta.array().max(1e-300).log().matrix() + loglik.row(0).transpose()).transpose();
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index k = 0; k < L; ++k) {
      Eigen::Index best_j = 0;
      double best = -kInf;
      for (Eigen::Index j = 0; j < L; ++j) {
        const double v = score(t - 1, j) + log_pi(j, k);
        if (v > best) {
          best = v;
          best_j = j;
        }
      }
      score(t, k) = best + loglik(t, k);
      back(t, k) = static_cast<int>(best_j);
    }
  }
  IndexVec z(T);
  Eigen::Index last = 0;
  score.row(T - 1).maxCoeff(&last);
  z[T - 1] = static_cast<int>(last);
  for (Eigen::Index t = T - 1; t > 0; --t) {
    z[t - 1] = back(t, z[t]);
  }
  return z;
}

double ar_heldout_loglik(const Matrix& y, const Matrix& context, int r,
                         const TransitionSet& trans, const std::vector<ModeDynamics>& dyn) {
  IndexVec dummy(y.cols(), 0);
  PseudoObsRegression reg = ar_regression(y, context, r, dummy);
  const Matrix table = regression_loglik_table(reg, dyn);
  return hmm_forward_loglik(table, trans.beta, trans.pi);
}

double slds_kalman_loglik(const Matrix& y, const IndexVec& z,
                          const std::vector<ModeDynamics>& dyn, const Matrix& c,
                          const Matrix& r, const Matrix& p0) {
  const Eigen::Index T = y.cols();
  const Eigen::Index n = p0.rows();
  Vector m = Vector::Zero(n);
  Matrix p = p0;
  double ll = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t > 0) {
      const ModeDynamics& d = dyn[z[t]];
      m = d.A * m;
      if (d.has_mu()) m += d.mu;
      p = symmetrized(d.A * p * d.A.transpose() + d.Sigma);
    }
    const Matrix s = symmetrized(c * p * c.transpose() + r);
    auto llt = llt_jittered(s, "slds_kalman_loglik");
    ll += log_mvn(y.col(t), c * m, llt);
    const Matrix k = p * c.transpose() * llt.solve(Matrix::Identity(s.rows(), s.rows()));
    m += k * (y.col(t) - c * m);
    p = symmetrized(p - k * c * p);
  }
  return ll;
}

std::pair<double, double> shortest_interval(std::vector<double> values, double coverage) {
  if (values.empty()) throw ParameterError("shortest_interval: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const std::size_t m =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(coverage * n)));
  std::size_t best = 0;
  double best_width = kInf;
  for (std::size_t i = 0; i + m <= n; ++i) {
    const double width = values[i + m - 1] - values[i];
    if (width < best_width - 1e-300) {
      best_width = width;
      best = i;
    }
  }
  return {values[best], values[best + m - 1]};
}

HeldoutResult heldout_log_likelihood(const std::vector<TraceRecord>& samples,
                                     const ModelConfig& config, const Matrix& y_heldout,
                                     const Matrix& context, std::uint64_t seed,
                                     double coverage) {
  HeldoutResult out;
  const Eigen::Index T = y_heldout.cols();
  std::size_t idx = 0;
  for (const TraceRecord& rec : samples) {
    ++idx;
    if (!rec.has_params) continue;
    TransitionSet trans{rec.beta, rec.pi};
    if (!config.is_slds()) {
      out.values.push_back(
          ar_heldout_loglik(y_heldout, context, config.ar_order, trans, rec.dyn));
      out.method = "ar-forward-sum";
    } else {
      Rng rng = Rng::stream(seed, idx);
      IndexVec z(T, 0);
      z[0] = rng.categorical(rec.beta);
      for (Eigen::Index t = 1; t < T; ++t) {
        z[t] = rng.categorical(rec.pi.row(z[t - 1]).transpose());
      }
      out.values.push_back(slds_kalman_loglik(y_heldout, z, rec.dyn,
                                              config.measurement_matrix(), rec.R,
                                              config.initial_state_covariance()));
      out.method = "slds-sampled-mode-kalman";
    }
  }
  if (out.values.empty()) {
    throw ParameterError("heldout_log_likelihood: no stored parameter samples in trace");
  }
  auto [lo, hi] = shortest_interval(out.values, coverage);
  out.lo = lo;
  out.hi = hi;
  return out;
}

Vector changepoint_probability(const std::vector<IndexVec>& z_samples) {
  if (z_samples.empty()) throw ParameterError("changepoint_probability: empty trace");
  const std::size_t T = z_samples[0].size();
  Vector p = Vector::Zero(static_cast<Eigen::Index>(T) - 1);
  for (const auto& z : z_samples) {
    if (z.size() != T) throw ParameterError("changepoint_probability: ragged trace");
    for (std::size_t t = 1; t < T; ++t) {
      if (z[t] != z[t - 1]) p[static_cast<Eigen::Index>(t) - 1] += 1.0;
    }
  }
  return p / static_cast<double>(z_samples.size());
}

std::vector<int> change_points(const IndexVec& z) {
  std::vector<int> out;
  for (std::size_t t = 1; t < z.size(); ++t) {
    if (z[t] != z[t - 1]) out.push_back(static_cast<int>(t));
  }
  return out;
}

RocCurve changepoint_roc(const std::vector<IndexVec>& z_samples,
                         const std::vector<int>& true_event_times, int window) {
  const Vector p = changepoint_probability(z_samples);
  if (window < 1 || window > p.size()) {
    throw ParameterError("changepoint_roc: window must fit inside the series");
  }
  const int n_windows = static_cast<int>((p.size() + window - 1) / window);
  std::vector<double> score(n_windows, 0.0);
  std::vector<char> positive(n_windows, 0);
  for (int w = 0; w < n_windows; ++w) {
    const int lo = w * window;
    const int hi = std::min<int>(lo + window, static_cast<int>(p.size()));
    score[w] = p.segment(lo, hi - lo).maxCoeff();
  }
  for (int t : true_event_times) {
    const int j = t - 1;  // change at time t lives at probability index t-1
    if (j < 0 || j >= p.size()) continue;
    positive[j / window] = 1;
  }
  int n_pos = 0, n_neg = 0;
  for (char c : positive) {
    if (c) {
      ++n_pos;
    } else {
      ++n_neg;
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw ParameterError("changepoint_roc: need both positive and negative windows");
  }

  std::vector<double> thresholds(score.begin(), score.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  RocCurve curve;
  curve.points.push_back({kInf, 0.0, 0.0});
  for (double th : thresholds) {
    int tp = 0, fp = 0;
    for (int w = 0; w < n_windows; ++w) {
      if (score[w] >= th) {
        if (positive[w]) {
          ++tp;
        } else {
          ++fp;
        }
      }
    }
    curve.points.push_back(
        {th, static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos});
  }
  double auc = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
  }
  // Close the curve to (1,1) if the smallest threshold does not reach it.
  const auto& last = curve.points.back();
  auc += (1.0 - last.fpr) * 0.5 * (last.tpr + 1.0);
  curve.auc = auc;
  return curve;
}

std::map<int, int> mode_count_summary(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw ParameterError("mode_count_summary: empty trace");
  std::map<int, int> hist;
  for (const auto& rec : trace) hist[rec.active_modes] += 1;
  return hist;
}

}  // namespace slds
