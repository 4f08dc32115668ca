#include "mocap/ngn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mocap {
namespace {

// The learning-rate decay makes early iterations plateau before the
// neighborhood range shrinks enough for neurons to spread, so convergence is
// judged over a window of iterations rather than a single step.
constexpr int kConvergenceWindow = 5;

Eigen::MatrixXd pool_frames(const std::vector<MotionClip>& clips) {
  if (clips.empty()) throw EmptyInput("no clips to train on");
  const Eigen::Index c = clips.front().frames.cols();
  Eigen::Index total = 0;
  for (const MotionClip& clip : clips) {
    if (clip.frames.cols() != c) throw MixedChannelCounts("clips disagree on channel count");
    total += clip.frames.rows();
  }
  if (total == 0) throw EmptyInput("no frames to train on");
  Eigen::MatrixXd pooled(total, c);
  Eigen::Index row = 0;
  for (const MotionClip& clip : clips) {
    pooled.middleRows(row, clip.frames.rows()) = clip.frames;
    row += clip.frames.rows();
  }
  return pooled;
}

}  // namespace

Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over (seed, stream) so substreams are decorrelated.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return Rng(z);
}

Eigen::MatrixXd init_neurons(std::uint64_t seed, int neuron_count, int channels,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (neuron_count < 1 || channels < 1) throw InvalidBounds("need N >= 1 and C >= 1");
  if (lower.size() != channels || upper.size() != channels) {
    throw InvalidBounds("bounds length does not match channel count");
  }
  for (int c = 0; c < channels; ++c) {
    if (lower(c) > upper(c)) throw InvalidBounds("lower bound exceeds upper bound");
  }
  Rng rng = derive_rng(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd weights(neuron_count, channels);
  for (int n = 0; n < neuron_count; ++n) {
    for (int c = 0; c < channels; ++c) {
      weights(n, c) = lower(c) + (upper(c) - lower(c)) * unit(rng);
    }
  }
  return weights;
}

double frame_distance(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  if (v.size() != w.size()) throw LengthMismatch("frame and neuron lengths differ");
  return (v - w).norm();
}

std::vector<int> rank_neurons(const Eigen::VectorXd& v, const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  Eigen::VectorXd dist(n);
  for (int i = 0; i < n; ++i) dist(i) = (weights.row(i).transpose() - v).norm();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return dist(a) < dist(b); });
  // rank(i) = number of neurons strictly closer; ties share a rank.
  std::vector<int> ranks(static_cast<std::size_t>(n), 0);
  for (int pos = 0; pos < n; ++pos) {
    int i = order[static_cast<std::size_t>(pos)];
    if (pos > 0 && dist(i) == dist(order[static_cast<std::size_t>(pos - 1)])) {
      ranks[static_cast<std::size_t>(i)] =
          ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(pos - 1)])];
    } else {
      ranks[static_cast<std::size_t>(i)] = pos;
    }
  }
  return ranks;
}

double schedule(int t, int iterations, double start, double end) {
  if (start <= 0.0 || end <= 0.0) throw NonPositiveRate("schedule endpoints must be positive");
  if (iterations <= 1) return start;
  return start * std::pow(end / start, static_cast<double>(t) / (iterations - 1));
}

void update_step(Eigen::MatrixXd& weights, const Eigen::VectorXd& v, double epsilon,
                 double lambda) {
  if (weights.cols() != v.size()) throw LengthMismatch("frame length does not match neurons");
  std::vector<int> ranks = rank_neurons(v, weights);
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    double factor = epsilon * std::exp(-ranks[static_cast<std::size_t>(i)] / lambda);
    weights.row(i) += factor * (v.transpose() - weights.row(i));
  }
}

double average_error(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& frames) {
  if (weights.rows() == 0 || frames.rows() == 0) throw EmptyInput("average_error needs data");
  double total = 0.0;
  for (Eigen::Index f = 0; f < frames.rows(); ++f) {
    double best = (weights.row(0) - frames.row(f)).norm();
    for (Eigen::Index i = 1; i < weights.rows(); ++i) {
      best = std::min(best, (weights.row(i) - frames.row(f)).norm());
    }
    total += best;
  }
  return total / static_cast<double>(frames.rows());
}

NeuronField train(const std::vector<MotionClip>& standardized_clips, const TrainConfig& config,
                  const std::string& class_label) {
  Eigen::MatrixXd frames = pool_frames(standardized_clips);
  const int c = static_cast<int>(frames.cols());

  Eigen::VectorXd lower = frames.colwise().minCoeff();
  Eigen::VectorXd upper = frames.colwise().maxCoeff();
  Eigen::MatrixXd weights = init_neurons(config.seed, config.neuron_count, c, lower, upper);

  NeuronField field;
  field.class_label = class_label;
  field.config = config;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(frames.rows()));
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = derive_rng(config.seed, 1);

  for (int t = 0; t < config.iterations; ++t) {
    double epsilon = schedule(t, config.iterations, config.epsilon_initial, config.epsilon_final);
    double lambda = schedule(t, config.iterations, config.lambda_initial, config.lambda_final);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (Eigen::Index idx : order) {
      update_step(weights, frames.row(idx).transpose(), epsilon, lambda);
    }
    // Record the best error achieved so far: the raw per-epoch value jitters
    // with the stochastic presentation order, and a monotone envelope keeps
    // the plateau detection below from tripping on that noise.
    double err = average_error(weights, frames);
    if (!field.error_history.empty()) err = std::min(err, field.error_history.back());
    field.error_history.push_back(err);
    if (t >= kConvergenceWindow) {
      double past = field.error_history[static_cast<std::size_t>(t - kConvergenceWindow)];
      double improvement = past > 0.0 ? (past - err) / past : 0.0;
      if (improvement < config.convergence_tol) {
        field.converged_at = t;
        break;
      }
    }
  }
  field.weights = std::move(weights);
  return field;
}

int nearest_neuron(const Eigen::VectorXd& v, const Eigen::MatrixXd& weights) {
  int best = 0;
  double best_dist = (weights.row(0).transpose() - v).norm();
  for (Eigen::Index i = 1; i < weights.rows(); ++i) {
    double d = (weights.row(i).transpose() - v).norm();
    if (d < best_dist) {  // lowest index wins ties
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Eigen::VectorXd generate_frame(const Eigen::VectorXd& reference_frame, const NeuronField& field,
                               double noise_std, Rng& rng) {
  if (field.weights.cols() != reference_frame.size()) {
    throw LengthMismatch("reference frame length does not match neurons");
  }
  Eigen::VectorXd out = field.weights.row(nearest_neuron(reference_frame, field.weights));
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index c = 0; c < out.size(); ++c) out(c) += noise(rng);
  }
  return out;
}

MotionClip generate_clip(const MotionClip& standardized_reference, const NeuronField& field,
                         const StandardizationModel& model, const TrainConfig& config, Rng& rng) {
  if (standardized_reference.frames.cols() != field.weights.cols()) {
    throw MixedChannelCounts("reference channel count does not match field");
  }
  MotionClip synth = standardized_reference;
  for (Eigen::Index f = 0; f < synth.frames.rows(); ++f) {
    synth.frames.row(f) =
        generate_frame(standardized_reference.frames.row(f).transpose(), field, config.noise_std,
                       rng)
            .transpose();
  }
  synth = gaussian_smooth(synth, config.smoothing_sigma);
  synth = inverse_standardize(synth, model);
  synth.provenance = Provenance::Synthetic;
  synth.label = field.class_label;
  synth.frame_time = standardized_reference.frame_time;
  return synth;
}

std::vector<MotionClip> generate_dataset(const std::vector<ClassPool>& pools, int n_per_class,
                                         std::uint64_t seed) {
  for (const ClassPool& pool : pools) {
    if (pool.references.empty()) {
      throw MissingClass("class '" + pool.field.class_label + "' has no reference clips");
    }
  }
  std::vector<MotionClip> out;
  for (std::size_t class_idx = 0; class_idx < pools.size(); ++class_idx) {
    const ClassPool& pool = pools[class_idx];
    for (int i = 0; i < n_per_class; ++i) {
      const MotionClip& reference = pool.references[static_cast<std::size_t>(i) %
                                                    pool.references.size()];
      Rng rng = derive_rng(seed, (class_idx << 32) | static_cast<std::uint64_t>(i));
      MotionClip clip = generate_clip(reference, pool.field, pool.model, pool.field.config, rng);
      clip.source_id = pool.field.class_label + "_" + std::to_string(i);
      out.push_back(std::move(clip));
    }
  }
  return out;
}

}  // namespace mocap
