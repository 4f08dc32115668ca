#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mocap/classify.hpp"
#include "mocap/metrics.hpp"
#include "mocap/ngn.hpp"

namespace mocap {

// Exit codes shared by the CLI and pipeline stages.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct PipelineConfig {
  std::filesystem::path data_dir;  // class-name subdirectories of BVH files
  std::filesystem::path out_dir;
  std::vector<std::string> classes;  // empty = all subdirectories, sorted
  int target_frames = 3000;
  int references_per_class = 2;  // held out from the Base arm, used for synthesis
  std::map<std::string, std::vector<std::string>> reference_files;  // optional explicit lists
  TrainConfig train;
  ForestConfig forest;
  int cv_runs = 20;
  double train_fraction = 0.7;
  std::uint64_t seed = 42;
};

PipelineConfig load_config(const std::filesystem::path& path);
void apply_config_key(PipelineConfig& config, const std::string& key, const std::string& value);

struct ArmReport {
  std::string arm;  // Base | Syn | Syn+Base
  int sample_count = 0;
  CvResult cv;
};

struct EvalReport {
  double fid = 0.0;
  double diversity_real = 0.0;
  double diversity_synth = 0.0;
  double fidelity = 0.0;
  double dtw_mean = 0.0;
  double mpjpe_mean = 0.0;
  std::vector<ArmReport> arms;
  std::vector<std::string> class_names;
  Eigen::VectorXd importances;  // from a forest over the full Syn+Base pool
  std::vector<DtwPair> dtw_pairs;
  std::vector<double> mpjpe_pairs;  // aligned with dtw_pairs
};

// Field artifact persistence (one file per class).
struct FieldArtifact {
  NeuronField field;
  StandardizationModel model;
};

void save_field(const FieldArtifact& artifact, const std::filesystem::path& path);
FieldArtifact load_field(const std::filesystem::path& path);

int cmd_inspect(const std::filesystem::path& path);
int cmd_train(const PipelineConfig& config);
int cmd_generate(const PipelineConfig& config);
int cmd_evaluate(const PipelineConfig& config);
int cmd_pipeline(const PipelineConfig& config);

// In-memory experiment arms over already-loaded, resampled clips; the substrate
// of cmd_evaluate and of the trend-replication harness. `reference_indices`
// marks clips in `baseline_all` that were held out for synthesis: they stay in
// the metric comparison population but are excluded from the Base arm.
// `synth_reference_index[i]` is the index in `baseline_all` of clip i's
// generation reference, or -1 when unknown.
EvalReport run_experiment_arms(const Skeleton& skeleton,
                               const std::vector<MotionClip>& baseline_all,
                               const std::vector<int>& reference_indices,
                               const std::vector<MotionClip>& synthetic,
                               const std::vector<int>& synth_reference_index,
                               const PipelineConfig& config);

}  // namespace mocap
