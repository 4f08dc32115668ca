#include "mocap/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace mocap {
namespace {

Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector>& features) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()), kFeatureCount);
  for (std::size_t i = 0; i < features.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = features[i].values().transpose();
  }
  return m;
}

// Symmetric PSD square root; negative eigenvalues clamped to 0.
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  Eigen::VectorXd roots = solver.eigenvalues().array().max(0.0).sqrt();
  return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

GaussianMoments fit_moments(const std::vector<FeatureVector>& features) {
  if (features.size() < 2) throw TooFewSamples("need at least 2 samples to fit moments");
  Eigen::MatrixXd m = feature_matrix(features);
  GaussianMoments g;
  g.sample_count = static_cast<int>(features.size());
  g.mean = m.colwise().mean();
  Eigen::MatrixXd centered = m.rowwise() - g.mean.transpose();
  g.covariance = centered.transpose() * centered / static_cast<double>(g.sample_count);
  g.covariance = 0.5 * (g.covariance + g.covariance.transpose());
  return g;
}

double fid(const std::vector<FeatureVector>& real_features,
           const std::vector<FeatureVector>& synth_features) {
  GaussianMoments a = fit_moments(real_features);
  GaussianMoments b = fit_moments(synth_features);
  if (a.mean.size() != b.mean.size()) throw DimensionMismatch("feature dimensions differ");

  const Eigen::Index d = a.mean.size();
  Eigen::MatrixXd reg = 1e-6 * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd sigma1 = a.covariance + reg;
  Eigen::MatrixXd sigma2 = b.covariance + reg;

  Eigen::MatrixXd root1 = sqrt_psd(sigma1);
  Eigen::MatrixXd cross = sqrt_psd(root1 * sigma2 * root1);

  double value = (a.mean - b.mean).squaredNorm() + (sigma1 + sigma2).trace() - 2.0 * cross.trace();
  return std::max(0.0, value);
}

double diversity(const std::vector<FeatureVector>& features) {
  if (features.size() < 2) throw TooFewSamples("diversity needs at least 2 samples");
  Eigen::MatrixXd m = feature_matrix(features);
  double total = 0.0;
  long pairs = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
      total += (m.row(i) - m.row(j)).norm();
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

double fidelity(const std::vector<FeatureVector>& real_features,
                const std::vector<FeatureVector>& synth_features) {
  if (real_features.size() < 2 || synth_features.empty()) {
    throw TooFewSamples("fidelity needs >= 2 real and >= 1 synthetic samples");
  }
  double real_spread = diversity(real_features);
  if (real_spread <= 0.0) real_spread = std::numeric_limits<double>::min();

  double total = 0.0;
  for (const FeatureVector& s : synth_features) {
    Eigen::VectorXd sv = s.values();
    double best = std::numeric_limits<double>::infinity();
    for (const FeatureVector& r : real_features) {
      if (r.label != s.label) continue;
      best = std::min(best, (sv - r.values()).norm());
    }
    if (!std::isfinite(best)) {
      // No real sample of that class; fall back to the nearest of any class.
      for (const FeatureVector& r : real_features) {
        best = std::min(best, (sv - r.values()).norm());
      }
    }
    total += best;
  }
  return -(total / static_cast<double>(synth_features.size())) / real_spread;
}

double dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0) throw EmptyInput("dtw needs non-empty sequences");
  if (a.cols() != b.cols()) throw DimensionMismatch("dtw channel counts differ");

  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(m + 1, kInf);
  Eigen::VectorXd curr(m + 1);
  prev(0) = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    curr.setConstant(kInf);
    for (Eigen::Index j = 1; j <= m; ++j) {
      double cost = (a.row(i - 1) - b.row(j - 1)).norm();
      curr(j) = cost + std::min({prev(j - 1), prev(j), curr(j - 1)});
    }
    std::swap(prev, curr);
  }
  return prev(m);
}

double dtw_population(const std::vector<MotionClip>& real, const std::vector<MotionClip>& synth,
                      const std::vector<int>& pairing, std::vector<DtwPair>* pairs) {
  if (real.empty() || synth.empty()) throw EmptyInput("dtw_population needs both pools");
  double total = 0.0;
  for (std::size_t i = 0; i < synth.size(); ++i) {
    int target = i < pairing.size() ? pairing[i] : -1;
    double cost;
    if (target >= 0) {
      cost = dtw(synth[i].frames, real[static_cast<std::size_t>(target)].frames);
    } else {
      // Unknown reference: nearest real clip of the same class by DTW.
      cost = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < real.size(); ++r) {
        if (real[r].label != synth[i].label) continue;
        double d = dtw(synth[i].frames, real[r].frames);
        if (d < cost) {
          cost = d;
          target = static_cast<int>(r);
        }
      }
      if (!std::isfinite(cost)) throw EmptyInput("no real clip shares class with a synthetic clip");
    }
    if (pairs) pairs->push_back({static_cast<int>(i), target, cost});
    total += cost;
  }
  return total / static_cast<double>(synth.size());
}

double mpjpe(const JointPositions& a, const JointPositions& b) {
  if (a.frame_count() != b.frame_count() || a.joint_count() != b.joint_count()) {
    throw ShapeMismatch("mpjpe operands must share frame and joint counts");
  }
  double total = 0.0;
  for (int f = 0; f < a.frame_count(); ++f) {
    total += (a.frames[f] - b.frames[f]).colwise().norm().sum();
  }
  return total / (static_cast<double>(a.frame_count()) * a.joint_count());
}

}  // namespace mocap
