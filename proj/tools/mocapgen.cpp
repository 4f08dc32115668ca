#include <CLI11.hpp>
#include <iostream>

#include "mocap/pipeline.hpp"

namespace {

struct Overrides {
  std::vector<std::pair<std::string, std::string>> entries;
};

void add_common_options(CLI::App* cmd, std::string& config_path, Overrides& overrides) {
  cmd->add_option("--config", config_path, "pipeline config file (flat JSON keys)");
  auto add = [cmd, &overrides](const std::string& flag, const std::string& key) {
    cmd->add_option_function<std::string>(
        flag,
        [&overrides, key](const std::string& value) { overrides.entries.emplace_back(key, value); },
        "overrides config key " + key);
  };
  add("--data", "data_dir");
  add("--out", "out_dir");
  add("--seed", "seed");
  add("--classes", "classes");
  add("--n-per-class", "ngn.samples_per_class");
  add("--target-frames", "target_frames");
  add("--references-per-class", "references_per_class");
  add("--neurons", "ngn.neurons");
  add("--iterations", "ngn.iterations");
  add("--epsilon-initial", "ngn.epsilon_initial");
  add("--epsilon-final", "ngn.epsilon_final");
  add("--lambda-initial", "ngn.lambda_initial");
  add("--lambda-final", "ngn.lambda_final");
  add("--noise-std", "ngn.noise_std");
  add("--smoothing-sigma", "ngn.smoothing_sigma");
  add("--trees", "forest.trees");
  add("--cv-runs", "cv.runs");
  add("--train-fraction", "cv.train_fraction");
}

mocap::PipelineConfig resolve_config(const std::string& config_path, const Overrides& overrides) {
  mocap::PipelineConfig config;
  if (!config_path.empty()) config = mocap::load_config(config_path);
  for (const auto& [key, value] : overrides.entries) {
    mocap::apply_config_key(config, key, value);
  }
  if (config.data_dir.empty()) throw mocap::Error("data_dir is required (--data or config)");
  if (config.out_dir.empty()) throw mocap::Error("out_dir is required (--out or config)");
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NGN motion-capture synthetic data toolkit"};
  app.require_subcommand(1);

  std::string inspect_path;
  CLI::App* inspect = app.add_subcommand("inspect", "summarize BVH files");
  inspect->add_option("path", inspect_path, "BVH file or directory")->required();

  std::string config_path;
  Overrides overrides;
  CLI::App* train = app.add_subcommand("train", "train one neuron field per class");
  CLI::App* generate = app.add_subcommand("generate", "synthesize BVH clips from trained fields");
  CLI::App* evaluate = app.add_subcommand("evaluate", "metrics + classification arms");
  CLI::App* pipeline = app.add_subcommand("pipeline", "train, generate, evaluate");
  for (CLI::App* cmd : {train, generate, evaluate, pipeline}) {
    add_common_options(cmd, config_path, overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? mocap::kExitOk : mocap::kExitUsage;
  }

  try {
    if (inspect->parsed()) return mocap::cmd_inspect(inspect_path);
    mocap::PipelineConfig config = resolve_config(config_path, overrides);
    if (train->parsed()) return mocap::cmd_train(config);
    if (generate->parsed()) return mocap::cmd_generate(config);
    if (evaluate->parsed()) return mocap::cmd_evaluate(config);
    if (pipeline->parsed()) return mocap::cmd_pipeline(config);
  } catch (const mocap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mocap::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return mocap::kExitInternal;
  }
  return mocap::kExitUsage;
}
