#include "mocap/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mocap/features.hpp"

namespace mocap {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kFieldArtifactVersion = 1;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-to-temp then rename: an interrupted run leaves no partial file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::vector<std::string> split_csv_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> list_classes(const PipelineConfig& config) {
  if (!fs::is_directory(config.data_dir)) {
    throw Error("data directory not found: " + config.data_dir.string());
  }
  if (!config.classes.empty()) return config.classes;
  std::vector<std::string> classes;
  for (const auto& entry : fs::directory_iterator(config.data_dir)) {
    if (entry.is_directory()) classes.push_back(entry.path().filename().string());
  }
  std::sort(classes.begin(), classes.end());
  if (classes.empty()) throw Error("no class subdirectories in " + config.data_dir.string());
  return classes;
}

std::vector<fs::path> list_bvh_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bvh") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Reference files held out for synthesis: explicit list if configured,
// otherwise the first references_per_class files in sorted order.
std::set<std::string> reference_set(const PipelineConfig& config, const std::string& class_name,
                                    const std::vector<fs::path>& files) {
  std::set<std::string> refs;
  auto it = config.reference_files.find(class_name);
  if (it != config.reference_files.end()) {
    refs.insert(it->second.begin(), it->second.end());
    return refs;
  }
  for (std::size_t i = 0; i < files.size() && i < static_cast<std::size_t>(config.references_per_class); ++i) {
    refs.insert(files[i].filename().string());
  }
  return refs;
}

struct LoadedClass {
  std::string name;
  Skeleton skeleton;
  std::vector<MotionClip> clips;       // resampled + unwrapped, file order
  std::vector<bool> is_reference;      // aligned with clips
  std::vector<std::string> filenames;  // aligned with clips
};

LoadedClass load_class(const PipelineConfig& config, const std::string& class_name) {
  fs::path dir = config.data_dir / class_name;
  std::vector<fs::path> files = list_bvh_files(dir);
  if (files.empty()) throw Error("class directory " + dir.string() + " has no .bvh files");
  std::set<std::string> refs = reference_set(config, class_name, files);

  LoadedClass loaded;
  loaded.name = class_name;
  bool first = true;
  for (const fs::path& file : files) {
    BvhFile parsed = parse_bvh(read_file(file));
    if (first) {
      loaded.skeleton = parsed.skeleton;
      first = false;
    }
    MotionClip clip = std::move(parsed.clip);
    clip.label = class_name;
    clip.source_id = file.filename().string();
    clip = resample(clip, config.target_frames);
    clip = unwrap_angles(loaded.skeleton, clip);
    loaded.filenames.push_back(file.filename().string());
    loaded.is_reference.push_back(refs.count(file.filename().string()) > 0);
    loaded.clips.push_back(std::move(clip));
  }
  return loaded;
}

json config_to_json(const TrainConfig& c) {
  return json{{"neuron_count", c.neuron_count},
              {"iterations", c.iterations},
              {"epsilon_initial", c.epsilon_initial},
              {"epsilon_final", c.epsilon_final},
              {"lambda_initial", c.lambda_initial},
              {"lambda_final", c.lambda_final},
              {"noise_std", c.noise_std},
              {"samples_per_class", c.samples_per_class},
              {"smoothing_sigma", c.smoothing_sigma},
              {"seed", c.seed},
              {"convergence_tol", c.convergence_tol}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.neuron_count = j.at("neuron_count");
  c.iterations = j.at("iterations");
  c.epsilon_initial = j.at("epsilon_initial");
  c.epsilon_final = j.at("epsilon_final");
  c.lambda_initial = j.at("lambda_initial");
  c.lambda_final = j.at("lambda_final");
  c.noise_std = j.at("noise_std");
  c.samples_per_class = j.at("samples_per_class");
  c.smoothing_sigma = j.at("smoothing_sigma");
  c.seed = j.at("seed");
  c.convergence_tol = j.at("convergence_tol");
  return c;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

std::string arm_filename(const std::string& arm) {
  std::string name;
  for (char c : arm) name += (c == '+') ? '_' : static_cast<char>(std::tolower(c));
  return name;
}

std::vector<FeatureVector> features_of(const Skeleton& skeleton,
                                       const std::vector<MotionClip>& clips) {
  std::vector<FeatureVector> out;
  out.reserve(clips.size());
  for (const MotionClip& clip : clips) out.push_back(extract_features(skeleton, clip));
  return out;
}

CvResult cv_on_features(const std::vector<FeatureVector>& features,
                        const std::vector<std::string>& class_names,
                        const PipelineConfig& config) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(features.size()), kFeatureCount);
  std::vector<int> y(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = features[i].values().transpose();
    auto it = std::find(class_names.begin(), class_names.end(), features[i].label);
    if (it == class_names.end()) throw Error("unknown class label " + features[i].label);
    y[i] = static_cast<int>(it - class_names.begin());
  }
  return monte_carlo_cv(x, y, static_cast<int>(class_names.size()), config.cv_runs,
                        config.train_fraction, config.forest, config.seed);
}

}  // namespace

void apply_config_key(PipelineConfig& config, const std::string& key, const std::string& value) {
  if (key == "data_dir") config.data_dir = value;
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "classes") config.classes = split_csv_list(value);
  else if (key == "target_frames") config.target_frames = std::stoi(value);
  else if (key == "references_per_class") config.references_per_class = std::stoi(value);
  else if (key == "seed") config.seed = std::stoull(value);
  else if (key == "cv.runs") config.cv_runs = std::stoi(value);
  else if (key == "cv.train_fraction") config.train_fraction = std::stod(value);
  else if (key == "ngn.neurons") config.train.neuron_count = std::stoi(value);
  else if (key == "ngn.iterations") config.train.iterations = std::stoi(value);
  else if (key == "ngn.epsilon_initial") config.train.epsilon_initial = std::stod(value);
  else if (key == "ngn.epsilon_final") config.train.epsilon_final = std::stod(value);
  else if (key == "ngn.lambda_initial") config.train.lambda_initial = std::stod(value);
  else if (key == "ngn.lambda_final") config.train.lambda_final = std::stod(value);
  else if (key == "ngn.noise_std") config.train.noise_std = std::stod(value);
  else if (key == "ngn.samples_per_class") config.train.samples_per_class = std::stoi(value);
  else if (key == "ngn.smoothing_sigma") config.train.smoothing_sigma = std::stod(value);
  else if (key == "ngn.convergence_tol") config.train.convergence_tol = std::stod(value);
  else if (key == "forest.trees") config.forest.tree_count = std::stoi(value);
  else if (key == "forest.max_depth") config.forest.max_depth = std::stoi(value);
  else if (key == "forest.min_samples_split") config.forest.min_samples_split = std::stoi(value);
  else if (key.rfind("references.", 0) == 0) {
    config.reference_files[key.substr(11)] = split_csv_list(value);
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

PipelineConfig load_config(const fs::path& path) {
  json doc = json::parse(read_file(path));
  PipelineConfig config;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const json& v = it.value();
    std::string value;
    if (v.is_string()) {
      value = v.get<std::string>();
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& item : v) {
        if (!joined.empty()) joined += ',';
        joined += item.get<std::string>();
      }
      value = joined;
    } else {
      value = v.dump();
    }
    apply_config_key(config, it.key(), value);
  }
  return config;
}

void save_field(const FieldArtifact& artifact, const fs::path& path) {
  json doc;
  doc["version"] = kFieldArtifactVersion;
  doc["class_label"] = artifact.field.class_label;
  doc["config"] = config_to_json(artifact.field.config);
  doc["weights"] = matrix_to_json(artifact.field.weights);
  doc["error_history"] = artifact.field.error_history;
  if (artifact.field.converged_at) {
    doc["converged_at"] = *artifact.field.converged_at;
  } else {
    doc["converged_at"] = nullptr;
  }
  json model;
  for (Eigen::Index i = 0; i < artifact.model.mean.size(); ++i) {
    model["mean"].push_back(artifact.model.mean(i));
    model["std"].push_back(artifact.model.std(i));
  }
  doc["standardization"] = std::move(model);
  write_file_atomic(path, doc.dump(2) + "\n");
}

FieldArtifact load_field(const fs::path& path) {
  json doc = json::parse(read_file(path));
  if (doc.at("version") != kFieldArtifactVersion) {
    throw Error("unsupported field artifact version in " + path.string());
  }
  FieldArtifact artifact;
  artifact.field.class_label = doc.at("class_label");
  artifact.field.config = config_from_json(doc.at("config"));
  artifact.field.weights = matrix_from_json(doc.at("weights"));
  artifact.field.error_history = doc.at("error_history").get<std::vector<double>>();
  if (!doc.at("converged_at").is_null()) {
    artifact.field.converged_at = doc.at("converged_at").get<int>();
  }
  const json& model = doc.at("standardization");
  std::vector<double> mean = model.at("mean").get<std::vector<double>>();
  std::vector<double> stdv = model.at("std").get<std::vector<double>>();
  artifact.model.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  artifact.model.std = Eigen::Map<Eigen::VectorXd>(stdv.data(), static_cast<Eigen::Index>(stdv.size()));
  return artifact;
}

int cmd_inspect(const fs::path& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    files = list_bvh_files(path);
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_directory()) {
        auto nested = list_bvh_files(entry.path());
        files.insert(files.end(), nested.begin(), nested.end());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  if (files.empty()) {
    std::cerr << "no .bvh files under " << path << "\n";
    return kExitUsage;
  }

  int failures = 0;
  for (const fs::path& file : files) {
    try {
      BvhFile parsed = parse_bvh(read_file(file));
      double duration = parsed.clip.frame_time * static_cast<double>(parsed.clip.frames.rows());
      std::cout << file.string() << ": joints=" << parsed.skeleton.joint_index.size()
                << " channels=" << parsed.skeleton.total_channels
                << " frames=" << parsed.clip.frames.rows()
                << " frame_time=" << fmt(parsed.clip.frame_time) << "s"
                << " duration=" << fmt(duration) << "s\n";
    } catch (const MalformedHierarchy& e) {
      std::cerr << file.string() << ": line " << e.line << ": " << e.what() << "\n";
      ++failures;
    } catch (const NonNumericValue& e) {
      std::cerr << file.string() << ": line " << e.line << ": " << e.what() << "\n";
      ++failures;
    } catch (const Error& e) {
      std::cerr << file.string() << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitData;
}

int cmd_train(const PipelineConfig& config) {
  std::vector<std::string> classes = list_classes(config);
  fs::create_directories(config.out_dir / "fields");

  std::ostringstream error_csv;
  error_csv << "class,iteration,error\n";
  for (std::size_t class_idx = 0; class_idx < classes.size(); ++class_idx) {
    const std::string& class_name = classes[class_idx];
    LoadedClass loaded = load_class(config, class_name);

    // Per-class standardization over the full class pool.
    StandardizationModel model = fit_standardization(loaded.clips);
    std::vector<MotionClip> standardized;
    standardized.reserve(loaded.clips.size());
    for (const MotionClip& clip : loaded.clips) standardized.push_back(standardize(clip, model));

    TrainConfig train_config = config.train;
    train_config.seed = derive_rng(config.seed, 100 + class_idx)();
    NeuronField field = train(standardized, train_config, class_name);

    for (std::size_t t = 0; t < field.error_history.size(); ++t) {
      error_csv << class_name << "," << t << "," << fmt(field.error_history[t]) << "\n";
    }
    save_field({std::move(field), std::move(model)},
               config.out_dir / "fields" / (class_name + ".field.json"));
  }
  write_file_atomic(config.out_dir / "training_error.csv", error_csv.str());
  return kExitOk;
}

int cmd_generate(const PipelineConfig& config) {
  std::vector<std::string> classes = list_classes(config);
  fs::path synth_dir = config.out_dir / "synthetic";
  fs::create_directories(synth_dir);

  json manifest = json::array();
  for (std::size_t class_idx = 0; class_idx < classes.size(); ++class_idx) {
    const std::string& class_name = classes[class_idx];
    FieldArtifact artifact =
        load_field(config.out_dir / "fields" / (class_name + ".field.json"));

    LoadedClass loaded = load_class(config, class_name);
    ClassPool pool;
    pool.field = std::move(artifact.field);
    pool.model = std::move(artifact.model);
    std::vector<std::string> ref_names;
    for (std::size_t i = 0; i < loaded.clips.size(); ++i) {
      if (!loaded.is_reference[i]) continue;
      pool.references.push_back(standardize(loaded.clips[i], pool.model));
      ref_names.push_back(loaded.filenames[i]);
    }
    if (pool.references.empty()) {
      throw MissingClass("class '" + class_name + "' has no reference clips configured");
    }

    const int n = config.train.samples_per_class;
    std::vector<MotionClip> clips = generate_dataset({pool}, n, derive_rng(config.seed, 200 + class_idx)());
    for (int i = 0; i < n; ++i) {
      char name[128];
      std::snprintf(name, sizeof(name), "%s_%03d.bvh", class_name.c_str(), i);
      const MotionClip& clip = clips[static_cast<std::size_t>(i)];
      write_file_atomic(synth_dir / name, write_bvh(loaded.skeleton, clip));
      manifest.push_back({{"file", name},
                          {"class", class_name},
                          {"reference", ref_names[static_cast<std::size_t>(i) % ref_names.size()]},
                          {"seed", config.seed}});
    }
  }
  write_file_atomic(synth_dir / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

EvalReport run_experiment_arms(const Skeleton& skeleton,
                               const std::vector<MotionClip>& baseline_all,
                               const std::vector<int>& reference_indices,
                               const std::vector<MotionClip>& synthetic,
                               const std::vector<int>& synth_reference_index,
                               const PipelineConfig& config) {
  if (baseline_all.empty() || synthetic.empty()) {
    throw EmptyInput("experiment arms need both baseline and synthetic pools");
  }
  std::set<int> refs(reference_indices.begin(), reference_indices.end());

  EvalReport report;
  std::set<std::string> labels;
  for (const MotionClip& clip : baseline_all) labels.insert(clip.label);
  report.class_names.assign(labels.begin(), labels.end());

  std::vector<FeatureVector> real_features = features_of(skeleton, baseline_all);
  std::vector<FeatureVector> synth_features = features_of(skeleton, synthetic);
  std::vector<FeatureVector> base_features;
  for (std::size_t i = 0; i < real_features.size(); ++i) {
    if (!refs.count(static_cast<int>(i))) base_features.push_back(real_features[i]);
  }

  report.fid = fid(real_features, synth_features);
  report.diversity_real = diversity(real_features);
  report.diversity_synth = diversity(synth_features);
  report.fidelity = fidelity(real_features, synth_features);
  report.dtw_mean = dtw_population(baseline_all, synthetic, synth_reference_index, &report.dtw_pairs);

  // MPJPE paired like DTW, over FK world positions.
  std::vector<JointPositions> real_positions(baseline_all.size());
  double mpjpe_total = 0.0;
  for (const DtwPair& pair : report.dtw_pairs) {
    JointPositions& ref = real_positions[static_cast<std::size_t>(pair.real_index)];
    if (ref.frames.empty()) {
      ref = forward_kinematics(skeleton, baseline_all[static_cast<std::size_t>(pair.real_index)]);
    }
    double err = mpjpe(forward_kinematics(skeleton, synthetic[static_cast<std::size_t>(pair.synth_index)]), ref);
    report.mpjpe_pairs.push_back(err);
    mpjpe_total += err;
  }
  report.mpjpe_mean = mpjpe_total / static_cast<double>(report.dtw_pairs.size());

  std::vector<FeatureVector> mixed = base_features;
  mixed.insert(mixed.end(), synth_features.begin(), synth_features.end());

  report.arms.push_back({"Base", static_cast<int>(base_features.size()),
                         cv_on_features(base_features, report.class_names, config)});
  report.arms.push_back({"Syn", static_cast<int>(synth_features.size()),
                         cv_on_features(synth_features, report.class_names, config)});
  report.arms.push_back({"Syn+Base", static_cast<int>(mixed.size()),
                         cv_on_features(mixed, report.class_names, config)});

  // Feature importances from a forest over the full mixed pool.
  Eigen::MatrixXd x(static_cast<Eigen::Index>(mixed.size()), kFeatureCount);
  std::vector<int> y(mixed.size());
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = mixed[i].values().transpose();
    y[i] = static_cast<int>(std::find(report.class_names.begin(), report.class_names.end(),
                                      mixed[i].label) -
                            report.class_names.begin());
  }
  ForestConfig importance_config = config.forest;
  importance_config.seed = config.seed;
  report.importances =
      feature_importance(train_forest(x, y, static_cast<int>(report.class_names.size()),
                                      importance_config));
  return report;
}

namespace {

void write_reports(const EvalReport& report, const Skeleton& skeleton,
                   const std::vector<MotionClip>& baseline_all,
                   const std::vector<MotionClip>& synthetic, const PipelineConfig& config) {
  fs::path dir = config.out_dir / "reports";
  fs::create_directories(dir);

  auto metric_lines = [](std::ostringstream& out, const std::string& prefix,
                         const ClassificationMetrics& m) {
    out << prefix << ".accuracy = " << fmt(m.accuracy) << "\n";
    out << prefix << ".precision_macro = " << fmt(m.precision) << "\n";
    out << prefix << ".recall_macro = " << fmt(m.recall) << "\n";
    out << prefix << ".f1_macro = " << fmt(m.f1) << "\n";
    out << prefix << ".mcc = " << fmt(m.mcc) << "\n";
    out << prefix << ".precision_micro = " << fmt(m.precision_micro) << "\n";
    out << prefix << ".recall_micro = " << fmt(m.recall_micro) << "\n";
    out << prefix << ".f1_micro = " << fmt(m.f1_micro) << "\n";
  };

  // Per-arm reports plus one combined document; FID is computed on the 7
  // kinematic features ("FID-K"), not on deep embeddings.
  std::ostringstream combined;
  combined << "fid_kinematic = " << fmt(report.fid) << "\n";
  combined << "diversity_real = " << fmt(report.diversity_real) << "\n";
  combined << "diversity_synth = " << fmt(report.diversity_synth) << "\n";
  combined << "fidelity = " << fmt(report.fidelity) << "\n";
  combined << "dtw_mean = " << fmt(report.dtw_mean) << "\n";
  combined << "mpjpe_mean = " << fmt(report.mpjpe_mean) << "\n";
  for (const ArmReport& arm : report.arms) {
    std::ostringstream out;
    out << "arm = " << arm.arm << "\n";
    out << "samples = " << arm.sample_count << "\n";
    out << "cv_runs = " << arm.cv.runs.size() << "\n";
    metric_lines(out, "mean", arm.cv.mean);
    metric_lines(out, "std", arm.cv.stddev);
    write_file_atomic(dir / ("report_" + arm_filename(arm.arm) + ".txt"), out.str());
    combined << "arm." << arm.arm << ".samples = " << arm.sample_count << "\n";
    combined << "arm." << arm.arm << ".accuracy_mean = " << fmt(arm.cv.mean.accuracy) << "\n";
    combined << "arm." << arm.arm << ".accuracy_std = " << fmt(arm.cv.stddev.accuracy) << "\n";
  }
  write_file_atomic(dir / "report.txt", combined.str());

  // Violin-plot data: one row per (arm, run, metric).
  std::ostringstream cv_csv;
  cv_csv << "arm,run,metric,value\n";
  static const char* kMetricNames[] = {"accuracy", "precision_macro", "recall_macro", "f1_macro",
                                       "mcc"};
  for (const ArmReport& arm : report.arms) {
    for (std::size_t run = 0; run < arm.cv.runs.size(); ++run) {
      const ClassificationMetrics& m = arm.cv.runs[run];
      const double values[] = {m.accuracy, m.precision, m.recall, m.f1, m.mcc};
      for (int k = 0; k < 5; ++k) {
        cv_csv << arm.arm << "," << run << "," << kMetricNames[k] << "," << fmt(values[k]) << "\n";
      }
    }
  }
  write_file_atomic(dir / "cv_runs.csv", cv_csv.str());

  std::ostringstream imp_csv;
  imp_csv << "feature,importance\n";
  for (int k = 0; k < kFeatureCount; ++k) {
    imp_csv << kFeatureNames[static_cast<std::size_t>(k)] << "," << fmt(report.importances(k))
            << "\n";
  }
  write_file_atomic(dir / "feature_importance.csv", imp_csv.str());

  // Feature table (density-plot substrate) and correlation matrix.
  std::vector<FeatureVector> all = features_of(skeleton, baseline_all);
  std::vector<FeatureVector> synth_features = features_of(skeleton, synthetic);
  all.insert(all.end(), synth_features.begin(), synth_features.end());
  std::ostringstream feat_csv;
  for (int k = 0; k < kFeatureCount; ++k) feat_csv << kFeatureNames[static_cast<std::size_t>(k)] << ",";
  feat_csv << "label,provenance\n";
  Eigen::MatrixXd table(static_cast<Eigen::Index>(all.size()), kFeatureCount);
  for (std::size_t i = 0; i < all.size(); ++i) {
    Eigen::VectorXd v = all[i].values();
    table.row(static_cast<Eigen::Index>(i)) = v.transpose();
    for (int k = 0; k < kFeatureCount; ++k) feat_csv << fmt(v(k)) << ",";
    feat_csv << all[i].label << ","
             << (all[i].provenance == Provenance::Real ? "real" : "synthetic") << "\n";
  }
  write_file_atomic(dir / "features.csv", feat_csv.str());

  Eigen::RowVectorXd mean = table.colwise().mean();
  Eigen::MatrixXd centered = table.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(table.rows());
  std::ostringstream corr_csv;
  corr_csv << "feature";
  for (int k = 0; k < kFeatureCount; ++k) corr_csv << "," << kFeatureNames[static_cast<std::size_t>(k)];
  corr_csv << "\n";
  for (int r = 0; r < kFeatureCount; ++r) {
    corr_csv << kFeatureNames[static_cast<std::size_t>(r)];
    for (int c = 0; c < kFeatureCount; ++c) {
      double denom = std::sqrt(cov(r, r) * cov(c, c));
      corr_csv << "," << fmt(denom > 0.0 ? cov(r, c) / denom : 0.0);
    }
    corr_csv << "\n";
  }
  write_file_atomic(dir / "feature_correlation.csv", corr_csv.str());

  // Root X/Z trajectories (walking-path plot substrate).
  std::ostringstream traj_csv;
  traj_csv << "source,label,provenance,frame,x,z\n";
  auto emit_trajectory = [&](const MotionClip& clip) {
    JointPositions positions = forward_kinematics(skeleton, clip);
    for (int f = 0; f < positions.frame_count(); ++f) {
      traj_csv << clip.source_id << "," << clip.label << ","
               << (clip.provenance == Provenance::Real ? "real" : "synthetic") << "," << f << ","
               << fmt(positions.frames[static_cast<std::size_t>(f)](0, 0)) << ","
               << fmt(positions.frames[static_cast<std::size_t>(f)](2, 0)) << "\n";
    }
  };
  for (const MotionClip& clip : baseline_all) emit_trajectory(clip);
  for (const MotionClip& clip : synthetic) emit_trajectory(clip);
  write_file_atomic(dir / "trajectories.csv", traj_csv.str());

  // Per-pair DTW/MPJPE values.
  std::ostringstream pair_csv;
  pair_csv << "synth_source,real_source,dtw,mpjpe\n";
  for (std::size_t i = 0; i < report.dtw_pairs.size(); ++i) {
    const DtwPair& pair = report.dtw_pairs[i];
    pair_csv << synthetic[static_cast<std::size_t>(pair.synth_index)].source_id << ","
             << baseline_all[static_cast<std::size_t>(pair.real_index)].source_id << ","
             << fmt(pair.cost) << "," << fmt(report.mpjpe_pairs[i]) << "\n";
  }
  write_file_atomic(dir / "pair_metrics.csv", pair_csv.str());
}

}  // namespace

int cmd_evaluate(const PipelineConfig& config) {
  std::vector<std::string> classes = list_classes(config);

  Skeleton skeleton;
  std::vector<MotionClip> baseline_all;
  std::vector<int> reference_indices;
  std::map<std::string, int> baseline_by_name;  // "<class>/<file>" -> index
  bool first = true;
  for (const std::string& class_name : classes) {
    LoadedClass loaded = load_class(config, class_name);
    if (first) {
      skeleton = loaded.skeleton;
      first = false;
    }
    for (std::size_t i = 0; i < loaded.clips.size(); ++i) {
      int index = static_cast<int>(baseline_all.size());
      if (loaded.is_reference[i]) reference_indices.push_back(index);
      baseline_by_name[class_name + "/" + loaded.filenames[i]] = index;
      baseline_all.push_back(std::move(loaded.clips[i]));
    }
  }

  fs::path synth_dir = config.out_dir / "synthetic";
  json manifest = json::parse(read_file(synth_dir / "manifest.json"));
  std::vector<MotionClip> synthetic;
  std::vector<int> synth_reference_index;
  for (const json& entry : manifest) {
    BvhFile parsed = parse_bvh(read_file(synth_dir / entry.at("file").get<std::string>()));
    MotionClip clip = std::move(parsed.clip);
    clip.label = entry.at("class");
    clip.provenance = Provenance::Synthetic;
    clip.source_id = entry.at("file");
    clip = resample(clip, config.target_frames);
    clip = unwrap_angles(skeleton, clip);
    auto it = baseline_by_name.find(entry.at("class").get<std::string>() + "/" +
                                    entry.at("reference").get<std::string>());
    synth_reference_index.push_back(it == baseline_by_name.end() ? -1 : it->second);
    synthetic.push_back(std::move(clip));
  }
  if (synthetic.empty()) throw EmptyInput("no synthetic clips listed in the manifest");

  EvalReport report = run_experiment_arms(skeleton, baseline_all, reference_indices, synthetic,
                                          synth_reference_index, config);
  write_reports(report, skeleton, baseline_all, synthetic, config);
  return kExitOk;
}

int cmd_pipeline(const PipelineConfig& config) {
  struct Stage {
    const char* name;
    int (*run)(const PipelineConfig&);
  };
  const Stage stages[] = {{"train", cmd_train}, {"generate", cmd_generate},
                          {"evaluate", cmd_evaluate}};
  for (const Stage& stage : stages) {
    try {
      int code = stage.run(config);
      if (code != kExitOk) return code;
    } catch (const Error& e) {
      std::cerr << "stage " << stage.name << ": " << e.what() << "\n";
      return kExitData;
    }
  }
  return kExitOk;
}

}  // namespace mocap
