// Copyright 2026 The Perturbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// perturbench: generate corruption suites, train and evaluate the baseline
// classifier, ingest external predictions, analyze runs and draw mCV plots.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <algorithm>
#include <atomic>
#include <exception>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "perturbench/baseline.hpp"
#include "perturbench/error.hpp"
#include "perturbench/image_io.hpp"
#include "perturbench/mcvplot.hpp"
#include "perturbench/report.hpp"
#include "perturbench/suite.hpp"
#include "perturbench/synth.hpp"

namespace {

using nlohmann::json;
using namespace perturbench;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

struct DatasetOptions {
  bool synthetic = false;
  std::string cifar;
  std::size_t dataset_size = 1000;
  std::uint64_t data_seed = 0;
  bool data_seed_set = false;
  int classes = 3;
  int channels = 3;
};

void add_dataset_options(CLI::App* cmd, DatasetOptions& d) {
  auto* synthetic = cmd->add_flag("--synthetic", d.synthetic, "Use the built-in synthetic shape dataset");
  auto* cifar = cmd->add_option("--cifar", d.cifar, "CIFAR-10 binary batch file");
  synthetic->excludes(cifar);
  cmd->add_option("--dataset-size", d.dataset_size, "Synthetic dataset size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option_function<std::uint64_t>(
      "--data-seed", [&d](std::uint64_t v) { d.data_seed = v, d.data_seed_set = true; },
      "Synthetic dataset seed (defaults to --seed)");
  cmd->add_option("--classes", d.classes, "Synthetic class count (2-5)")->check(CLI::Range(2, 5));
  cmd->add_option("--channels", d.channels, "Synthetic channel count (1 or 3)")->check(CLI::IsMember({1, 3}));
}

std::pair<LabeledDataset, std::string> load_dataset(const DatasetOptions& d, std::uint64_t seed) {
  if (d.synthetic) {
    const std::uint64_t data_seed = d.data_seed_set ? d.data_seed : seed;
    SynthSpec spec;
    spec.classes = d.classes;
    spec.channels = d.channels;
    std::ostringstream id;
    id << "synthetic:classes=" << d.classes << ",channels=" << d.channels << ",count=" << d.dataset_size
       << ",seed=" << data_seed;
    return {synth_dataset(spec, d.dataset_size, SeedSpec{data_seed}), id.str()};
  }
  if (!d.cifar.empty()) {
    return {load_cifar10_batch(d.cifar), "cifar10:" + std::filesystem::path(d.cifar).filename().string()};
  }
  throw UsageError("choose a dataset with --synthetic or --cifar <file>");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::filesystem::path require_out(const GlobalOptions& g, const char* what) {
  if (g.out.empty()) throw UsageError(std::string("--out is required for ") + what);
  return g.out;
}

/// Clean-trained summary of `classifier` in a report, or the only summary.
ReferencePoint reference_from_report(const std::filesystem::path& path, const std::string& classifier) {
  const auto report = load_report(path);
  for (const auto& s : report.summaries) {
    if (s.classifier_name == classifier && s.training_group == "clean") return s.reference();
  }
  if (report.summaries.size() == 1) return report.summaries.front().reference();
  throw UsageError("no clean-trained summary for '" + classifier + "' in " + path.string());
}

RobustnessSummary summarize_with_reference(const ClassifierRun& run, const std::string& reference_path) {
  if (!reference_path.empty()) return summarize(run, reference_from_report(reference_path, run.classifier_name));
  if (run.training_group == "clean") return summarize_as_reference(run);
  throw UsageError("--reference <summary.json> of the clean-trained run is required for training group '" +
                   run.training_group + "'");
}

// --- generate ---------------------------------------------------------------

struct GenerateOptions {
  DatasetOptions data;
  std::size_t n = 20;
  std::uint64_t sampling_seed = 0;
  std::size_t offset = 0;
  unsigned threads = 1;
  std::string aliases;
};

int run_generate(const GlobalOptions& g, const GenerateOptions& o) {
  const auto out = require_out(g, "generate");
  const auto [dataset, dataset_id] = load_dataset(o.data, g.seed);
  SuiteParams params;
  params.master_seed = g.seed;
  params.images_per_group = o.n;
  params.sampling_seed = o.sampling_seed;
  params.sample_offset = o.offset;
  params.dataset_id = dataset_id;
  params.threads = o.threads;
  if (!o.aliases.empty()) params.aliases = load_group_aliases(o.aliases);
  const auto manifest = generate_suite(dataset, params, out);
  std::cout << "wrote " << manifest.groups.size() << " groups x " << manifest.images_per_group << " images to "
            << out.string() << "\n";
  return kExitOk;
}

// --- train ------------------------------------------------------------------

struct TrainOptions {
  DatasetOptions data;
  std::size_t n = 500;
  std::uint64_t sampling_seed = 0;
  std::size_t offset = 0;
  std::string training_group = "clean";
  TrainConfig cfg;
};

int run_train(const GlobalOptions& g, const TrainOptions& o) {
  const auto out = require_out(g, "train");
  const auto& group = find_group(o.training_group);
  const auto [dataset, dataset_id] = load_dataset(o.data, g.seed);
  SuiteParams window;
  window.images_per_group = o.n;
  window.sampling_seed = o.sampling_seed;
  window.sample_offset = o.offset;
  const auto source = dataset.subset(sample_indices(dataset.size(), window));
  TrainConfig cfg = o.cfg;
  cfg.seed = g.seed;
  auto model = train(corrupt_dataset(source, group, SeedSpec{g.seed}), cfg);
  model.training_group = group.name;
  save_model(model, out);
  std::cout << "trained on " << source.size() << " images of " << dataset_id << " corrupted as " << group.name
            << "; model written to " << out.string() << "\n";
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateOptions {
  std::string model;
  std::string suite;
  std::string name = "Softmax";
  std::string reference;
  unsigned threads = 1;
};

int run_evaluate(const GlobalOptions& g, const EvaluateOptions& o) {
  const auto out = require_out(g, "evaluate");
  const auto model = load_model(o.model);
  const auto manifest = load_manifest(std::filesystem::path(o.suite) / "manifest.json");

  std::vector<Evaluation> results(manifest.groups.size());
  std::vector<std::exception_ptr> errors(manifest.groups.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto k = next.fetch_add(1); k < manifest.groups.size(); k = next.fetch_add(1)) {
      try {
        results[k] = evaluate_group(model, o.suite, manifest, manifest.groups[k].spec);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::max(1u, o.threads); ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<PredictionRecord> records;
  std::vector<double> accuracies;
  for (const auto& r : results) {
    records.insert(records.end(), r.records.begin(), r.records.end());
    accuracies.push_back(r.accuracy);
  }
  const auto run = make_run(o.name, model.training_group, accuracies);
  const auto summary = summarize_with_reference(run, o.reference);

  std::filesystem::create_directories(out);
  std::ostringstream csv;
  write_predictions_csv(records, csv);
  write_text(out / "predictions.csv", csv.str());

  ReportDocument report;
  report.config = {{"command", "evaluate"}, {"model", o.model},         {"suite", o.suite},
                   {"name", o.name},        {"reference", o.reference}, {"training_group", model.training_group},
                   {"master_seed", manifest.master_seed}};
  report.summaries.push_back(summary);
  write_report(report, out / "summary.json");
  std::cout << summary.label() << ": mean " << summary.mean_accu << "% cv " << summary.cv << "% clean "
            << summary.clean_accu << "% " << to_string(summary.quadrant) << "\n";
  return kExitOk;
}

// --- ingest -----------------------------------------------------------------

struct IngestOptions {
  std::string predictions;
  std::string name;
  std::string training_group = "clean";
  std::string reference;
};

int run_ingest(const GlobalOptions& g, const IngestOptions& o) {
  const auto out = require_out(g, "ingest");
  find_group(o.training_group);
  const auto records = ingest_predictions(o.predictions, kGroupCount);
  std::cerr << "ingested " << records.size() << " predictions over " << kGroupCount << " groups\n";
  const auto run = make_run(o.name, o.training_group, accuracy_by_group(records, kGroupCount));
  ReportDocument report;
  report.config = {{"command", "ingest"},
                   {"predictions", o.predictions},
                   {"name", o.name},
                   {"training_group", o.training_group},
                   {"reference", o.reference}};
  report.summaries.push_back(summarize_with_reference(run, o.reference));
  write_report(report, out);
  return kExitOk;
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeOptions {
  std::vector<std::string> reports;
};

std::vector<RobustnessSummary> gather(const std::vector<std::string>& paths) {
  std::vector<RobustnessSummary> summaries;
  std::optional<std::string> version;
  for (const auto& path : paths) {
    const auto report = load_report(path);
    if (version && *version != report.spec_version) {
      throw ValidationError("report " + path + " has version " + report.spec_version + " but earlier inputs have " +
                            *version);
    }
    version = report.spec_version;
    summaries.insert(summaries.end(), report.summaries.begin(), report.summaries.end());
  }
  if (summaries.empty()) throw ValidationError("no summaries in the given reports");
  return summaries;
}

int run_analyze(const GlobalOptions& g, const AnalyzeOptions& o) {
  auto summaries = gather(o.reports);
  assign_quadrants(summaries);
  ReportDocument report;
  report.config = {{"command", "analyze"}, {"inputs", o.reports}};
  report.summaries = summaries;
  report.aggregate = aggregate(summaries);
  if (summaries.size() >= 2) {
    try {
      report.correlations = correlate(summaries);
    } catch (const DomainError& e) {
      std::cerr << "correlations skipped: " << e.what() << "\n";
    }
  }

  std::string text;
  if (g.format == "csv") {
    std::ostringstream csv;
    csv << "label,training_category,cv,mean_accu,clean_accu,min_accu,max_accu,quadrant\n";
    for (const auto& s : summaries) {
      csv << s.label() << ',' << to_string(s.training_category) << ',' << s.cv << ',' << s.mean_accu << ','
          << s.clean_accu << ',' << s.min_accu << ',' << s.max_accu << ',' << to_string(s.quadrant) << '\n';
    }
    text = csv.str();
  } else {
    text = report_to_json(report).dump(2) + "\n";
  }
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text(g.out, text);
  }
  return kExitOk;
}

// --- plot -------------------------------------------------------------------

struct PlotOptions {
  std::vector<std::string> reports;
  std::string reference;
  std::string classifier;
  bool no_whiskers = false;
  bool no_clean_ring = false;
  std::vector<double> cv_range;
  std::vector<double> accu_range;
  PlotStyle style;
};

int run_plot(const GlobalOptions& g, PlotOptions o) {
  const auto out = require_out(g, "plot");
  auto summaries = gather(o.reports);
  if (!o.classifier.empty()) {
    std::erase_if(summaries, [&](const RobustnessSummary& s) { return s.classifier_name != o.classifier; });
  }
  const auto ref = std::find_if(summaries.begin(), summaries.end(),
                                [&](const RobustnessSummary& s) { return s.label() == o.reference; });
  if (ref == summaries.end()) throw UsageError("reference '" + o.reference + "' is not among the plotted runs");

  std::vector<McvPoint> points;
  for (const auto& s : summaries) points.push_back(to_mcv_point(s, &s == &*ref));
  o.style.whiskers = !o.no_whiskers;
  o.style.clean_ring = !o.no_clean_ring;
  if (o.cv_range.size() == 2) o.style.cv_range = AxisRange{o.cv_range[0], o.cv_range[1]};
  if (o.accu_range.size() == 2) o.style.accu_range = AxisRange{o.accu_range[0], o.accu_range[1]};
  write_text(out, render_mcv(points, o.style));
  for (const auto& p : points) {
    std::cout << p.label << ": " << to_string(quadrant_of_rendered_point(p, to_mcv_point(*ref, true))) << "\n";
  }
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

int run_verify(const std::string& suite) {
  const auto manifest = load_manifest(std::filesystem::path(suite) / "manifest.json");
  const auto mismatches = verify_suite(manifest, suite);
  for (const auto& m : mismatches) {
    std::cout << "MISMATCH " << m.group_id << "_" << m.name << ": " << m.reason << "\n";
  }
  std::cout << mismatches.size() << " of " << manifest.groups.size() << " groups differ from the manifest\n";
  return mismatches.empty() ? kExitOk : kExitRuntime;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PERTURBENCH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("PERTURBENCH_SEED is not an unsigned integer");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-factor corruption benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  try {
    global.seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  app.add_option("--seed", global.seed, "Master seed (default: $PERTURBENCH_SEED or 0)");
  app.add_option("--out", global.out, "Output path");
  app.add_option("--format", global.format, "Structured output format")->check(CLI::IsMember({"json", "csv"}));

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Generate the 69-group corruption suite");
  add_dataset_options(generate, gen.data);
  generate->add_option("--n", gen.n, "Images per group")->check(CLI::PositiveNumber)->capture_default_str();
  generate->add_option("--sampling-seed", gen.sampling_seed, "Seed of the source permutation");
  generate->add_option("--offset", gen.offset, "First permutation position used");
  generate->add_option("--threads", gen.threads, "Worker threads")->check(CLI::PositiveNumber);
  generate->add_option("--aliases", gen.aliases, "JSON map from group names to external type numbers");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train the softmax baseline on one corrupted training group");
  add_dataset_options(train_cmd, tr.data);
  train_cmd->add_option("--n", tr.n, "Training images")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--sampling-seed", tr.sampling_seed, "Seed of the source permutation");
  train_cmd->add_option("--offset", tr.offset, "First permutation position used");
  train_cmd->add_option("--training-group", tr.training_group, "Canonical group name, e.g. SP0.1RL30")
      ->capture_default_str();
  train_cmd->add_option("--epochs", tr.cfg.epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--lr", tr.cfg.learning_rate)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--l2", tr.cfg.l2)->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--batch", tr.cfg.batch_size)->check(CLI::PositiveNumber)->capture_default_str();

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a baseline model on every group of a suite");
  evaluate_cmd->add_option("--model", ev.model)->required();
  evaluate_cmd->add_option("--suite", ev.suite)->required();
  evaluate_cmd->add_option("--name", ev.name, "Classifier name")->capture_default_str();
  evaluate_cmd->add_option("--reference", ev.reference, "Report holding the clean-trained run");
  evaluate_cmd->add_option("--threads", ev.threads)->check(CLI::PositiveNumber);

  IngestOptions in;
  auto* ingest_cmd = app.add_subcommand("ingest", "Summarize an external predictions CSV");
  ingest_cmd->add_option("--predictions", in.predictions)->required();
  ingest_cmd->add_option("--name", in.name, "Classifier name")->required();
  ingest_cmd->add_option("--training-group", in.training_group)->capture_default_str();
  ingest_cmd->add_option("--reference", in.reference, "Report holding the clean-trained run");

  AnalyzeOptions an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Aggregate summaries and correlate their columns");
  analyze_cmd->add_option("reports", an.reports, "Report JSON files")->required();

  PlotOptions pl;
  auto* plot_cmd = app.add_subcommand("plot", "Render an mCV plot as SVG");
  plot_cmd->add_option("reports", pl.reports, "Report JSON files")->required();
  plot_cmd->add_option("--reference", pl.reference, "Label of the reference run, e.g. 'AlexNet(clean)'")
      ->required();
  plot_cmd->add_option("--classifier", pl.classifier, "Only plot runs of this classifier");
  plot_cmd->add_flag("--no-whiskers", pl.no_whiskers);
  plot_cmd->add_flag("--no-clean-ring", pl.no_clean_ring);
  plot_cmd->add_option("--cv-range", pl.cv_range)->expected(2);
  plot_cmd->add_option("--accu-range", pl.accu_range)->expected(2);
  plot_cmd->add_option("--width", pl.style.width)->check(CLI::PositiveNumber);
  plot_cmd->add_option("--height", pl.style.height)->check(CLI::PositiveNumber);
  plot_cmd->add_option("--title", pl.style.title);

  std::string verify_dir;
  auto* verify_cmd = app.add_subcommand("verify", "Re-hash a suite and report digest drift");
  verify_cmd->add_option("--suite", verify_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(global, gen);
    if (*train_cmd) return run_train(global, tr);
    if (*evaluate_cmd) return run_evaluate(global, ev);
    if (*ingest_cmd) return run_ingest(global, in);
    if (*analyze_cmd) return run_analyze(global, an);
    if (*plot_cmd) return run_plot(global, pl);
    if (*verify_cmd) return run_verify(verify_dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
