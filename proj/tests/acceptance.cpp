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

// Acceptance checks. Each criterion prints one PASS or FAIL line.
//
//   acceptance            run every criterion
//   acceptance <name>     run one criterion (exit 1 on FAIL)
//   acceptance --list     print criterion names

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "perturbench/baseline.hpp"
#include "perturbench/image_io.hpp"
#include "perturbench/mcvplot.hpp"
#include "perturbench/perturb.hpp"
#include "perturbench/report.hpp"
#include "perturbench/stats.hpp"
#include "perturbench/suite.hpp"
#include "perturbench/synth.hpp"
#include "svg_probe.hpp"
#include "test_support.hpp"

namespace {

using namespace perturbench;
using Clock = std::chrono::steady_clock;

// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok) failures_.push_back(what);
  }
  void near(double actual, double expected, double tol, const std::string& what) {
    std::ostringstream msg;
    msg.precision(6);
    msg << what << " = " << actual << " (want " << expected << " +- " << tol << ")";
    expect(std::fabs(actual - expected) <= tol, msg.str());
  }
  void within_seconds(Clock::time_point start, double limit) {
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    std::ostringstream msg;
    msg << "runtime " << s << " s (limit " << limit << " s)";
    expect(s < limit, msg.str());
  }
  bool ok() const { return failures_.empty(); }
  std::size_t count() const { return count_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::size_t count_ = 0;
  std::vector<std::string> failures_;
};

std::vector<RobustnessSummary> fixture_rows() {
  return load_report(testing::fixture("benchmark_runs.json")).summaries;
}

// --- correlation table ------------------------------------------------------

void correlation_table(Check& c) {
  const auto start = Clock::now();
  const auto rows = fixture_rows();
  c.expect(rows.size() == 27, "fixture has 27 rows");
  const auto t = correlate(rows);
  constexpr double kPearsonTol = 0.01;
  constexpr double kSpearmanTol = 0.03;
  c.near(t.cv_mean.pearson, 0.096, kPearsonTol, "pearson(CV, mean)");
  c.near(t.cv_clean.pearson, 0.365, kPearsonTol, "pearson(CV, clean)");
  c.near(t.mean_clean.pearson, 0.052, kPearsonTol, "pearson(mean, clean)");
  c.near(t.cv_mean.spearman, 0.202, kSpearmanTol, "spearman(CV, mean)");
  c.near(t.cv_clean.spearman, 0.345, kSpearmanTol, "spearman(CV, clean)");
  c.near(t.mean_clean.spearman, 0.057, kSpearmanTol, "spearman(mean, clean)");
  c.within_seconds(start, 1.0);
}

// --- category aggregates ----------------------------------------------------

void category_aggregates(Check& c) {
  const auto start = Clock::now();
  const auto agg = aggregate(fixture_rows());
  constexpr double kTol = 0.01;
  const auto& clean = agg.at(TrainingCategory::kClean);
  const auto& single = agg.at(TrainingCategory::kSingleFactor);
  const auto& two = agg.at(TrainingCategory::kTwoFactor);
  c.near(clean.mean_cv, 2.94, kTol, "clean mean CV");
  c.near(single.mean_cv, 1.82, kTol, "single-factor mean CV");
  c.near(two.mean_cv, 1.42, kTol, "two-factor mean CV");
  c.near(clean.mean_mean_accu, 88.31, kTol, "clean mean accuracy");
  c.near(single.mean_mean_accu, 87.10, kTol, "single-factor mean accuracy");
  c.near(two.mean_mean_accu, 87.36, kTol, "two-factor mean accuracy");
  c.near(clean.mean_min_accu, 85.01, kTol, "clean mean-of-min");
  c.near(single.mean_min_accu, 84.76, kTol, "single-factor mean-of-min");
  c.near(two.mean_min_accu, 85.38, kTol, "two-factor mean-of-min");
  c.near(clean.mean_max_accu, 92.83, kTol, "clean mean-of-max");
  c.near(single.mean_max_accu, 90.01, kTol, "single-factor mean-of-max");
  c.near(two.mean_max_accu, 89.57, kTol, "two-factor mean-of-max");
  c.expect(agg.cv_reduction_percent.has_value(), "CV reduction present");
  if (agg.cv_reduction_percent) c.near(*agg.cv_reduction_percent, 28.9, 0.2, "CV reduction percent");
  c.within_seconds(start, 1.0);
}

// --- quadrant golden cases --------------------------------------------------

void quadrant_golden(Check& c) {
  const ReferencePoint alexnet{85.25, 2.28};
  c.expect(identify_group(88.39, 1.92, alexnet) == QuadrantLabel::kGroupI, "(88.39, 1.92) is Group I");
  c.expect(identify_group(85.75, 3.33, alexnet) == QuadrantLabel::kGroupII, "(85.75, 3.33) is Group II");

  const ReferencePoint r{80.0, 2.0};
  const double hi = std::nextafter(80.0, 100.0), lo = std::nextafter(80.0, 0.0);
  const double right = std::nextafter(2.0, 10.0), left = std::nextafter(2.0, 0.0);
  struct Case {
    double ma, cv;
    QuadrantLabel want;
  };
  const Case cases[] = {
      {80.0, 2.0, QuadrantLabel::kGroupI},     {80.0, left, QuadrantLabel::kGroupI},
      {hi, 2.0, QuadrantLabel::kGroupI},       {80.0, right, QuadrantLabel::kGroupII},
      {hi, right, QuadrantLabel::kGroupII},    {lo, 2.0, QuadrantLabel::kGroupIII},
      {lo, left, QuadrantLabel::kGroupIII},    {lo, right, QuadrantLabel::kGroupIV},
      {0.0, 100.0, QuadrantLabel::kGroupIV},   {100.0, 0.0, QuadrantLabel::kGroupI},
  };
  for (const auto& k : cases) {
    std::ostringstream what;
    what.precision(17);
    what << "(" << k.ma << ", " << k.cv << ") -> " << to_string(k.want);
    c.expect(identify_group(k.ma, k.cv, r) == k.want, what.str());
  }
}

// --- suite shape ------------------------------------------------------------

bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) files.push_back(std::filesystem::relative(e.path(), a));
  }
  std::size_t other = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(b)) other += e.is_regular_file();
  if (files.size() != other) return false;
  return std::all_of(files.begin(), files.end(), [&](const auto& f) { return read_file(a / f) == read_file(b / f); });
}

void suite_shape(Check& c) {
  const auto start = Clock::now();
  const auto& groups = enumerate_groups();
  c.expect(groups.size() == 69, "69 groups");
  std::map<Family, int> sizes;
  for (const auto& g : groups) ++sizes[g.family];
  c.expect(sizes[Family::kClean] == 1 && sizes[Family::kSpGa] == 15 && sizes[Family::kGaSp] == 15 &&
               sizes[Family::kSpRo] == 19 && sizes[Family::kRoSp] == 19,
           "family sizes 1/15/15/19/19");
  c.expect(groups[0].name == "clean" && groups[0].chain.empty(), "id 1 is clean");
  c.expect(groups[4].name == "SP0.1", "id 5 is SP0.1");
  c.expect(groups[5].name == "SP0.1GA0.1", "id 6 is SP0.1GA0.1");

  const auto dataset = synth_dataset(SynthSpec{}, 100, SeedSpec{42});
  SuiteParams params;
  params.master_seed = 42;
  params.images_per_group = 20;
  params.dataset_id = "synthetic";
  testing::ScratchDir a("acc_a"), b("acc_b"), p("acc_p");
  generate_suite(dataset, params, a.path());
  generate_suite(dataset, params, b.path());
  params.threads = 4;
  generate_suite(dataset, params, p.path());
  c.expect(same_tree(a.path(), b.path()), "two serial runs are byte-identical");
  c.expect(same_tree(a.path(), p.path()), "serial and parallel runs are byte-identical");
  c.within_seconds(start, 30.0);
}

// --- operator statistics ----------------------------------------------------

void operator_statistics(Check& c) {
  const RasterImage gray(1000, 1000, 1, std::vector<std::uint8_t>(1000000, 128));
  for (double d : {0.1, 0.15, 0.2}) {
    RandomStream s(derive_stream_seed(1, 2, 0, 0));
    const auto out = apply_salt_pepper(gray, d, s);
    std::size_t changed = 0, salt = 0;
    for (std::size_t i = 0; i < out.bytes().size(); ++i) {
      if (out.bytes()[i] == gray.bytes()[i]) continue;
      ++changed;
      salt += out.bytes()[i] == 255;
    }
    const std::string tag = "salt & pepper d=" + format_severity(d);
    c.near(static_cast<double>(changed) / 1e6, d, 0.01, tag + " changed fraction");
    c.near(static_cast<double>(salt) / static_cast<double>(changed), 0.5, 0.02, tag + " salt share");
  }

  const std::uint64_t seed = derive_stream_seed(1, 3, 0, 0);
  RandomStream replay(seed);
  double sum = 0.0, sq = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = gaussian_noise_sample(replay, 0.1);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  c.near(mean, 0.0, 0.005, "gaussian pre-clamp mean");
  c.near(sq / n - mean * mean, 0.1, 0.005, "gaussian pre-clamp variance");
  // The operator consumes exactly these samples.
  RandomStream s(seed);
  const auto noisy = apply_gaussian(gray, 0.1, s);
  RandomStream again(seed);
  bool consistent = true;
  for (std::size_t i = 0; i < 1000 && consistent; ++i) {
    consistent = noisy.bytes()[i] == quantize_unit(128.0 / 255.0 + gaussian_noise_sample(again, 0.1));
  }
  c.expect(consistent, "apply_gaussian uses the replayed samples");
}

// --- operator identities ----------------------------------------------------

void operator_identities(Check& c) {
  const auto img = synth_dataset(SynthSpec{}, 1, SeedSpec{3}).image(0);
  const StreamKey key{SeedSpec{42}, 7, 0};
  RandomStream s1(5), s2(5);
  c.expect(apply_salt_pepper(img, 0.0, s1) == img, "SP 0 is identity");
  c.expect(apply_gaussian(img, 0.0, s2) == img, "GA 0 is identity");
  c.expect(rotate(img, 0.0) == img, "rotate 0 is identity");
  c.expect(apply_chain(img, PerturbationChain{}, key) == img, "empty chain is identity");
  c.expect(apply_chain(img, PerturbationChain{{SaltPepper{0}, Gaussian{0}, Rotation{0}}}, key) == img,
           "zero-severity chain is identity");
  const PerturbationChain sp_ro{{SaltPepper{0.1}, Rotation{30}}};
  const PerturbationChain ro_sp{{Rotation{30}, SaltPepper{0.1}}};
  c.expect(apply_chain(img, sp_ro, key) != apply_chain(img, ro_sp, key), "SP->RO differs from RO->SP");

  RandomStream r(9);
  std::vector<std::uint8_t> data(33 * 33 * 3);
  for (auto& v : data) v = static_cast<std::uint8_t>(r.next_u64());
  const RasterImage odd(33, 33, 3, data);
  bool fixed = true;
  for (double deg : {-60.0, -30.0, 30.0, 60.0, 45.0, 90.0, 137.0}) {
    const auto out = rotate(odd, deg);
    for (int ch = 0; ch < 3; ++ch) fixed &= out.at(16, 16, ch) == odd.at(16, 16, ch);
  }
  c.expect(fixed, "center pixel invariant under rotation");
}

// --- oracle equivalence -----------------------------------------------------

long double brute_mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return s / static_cast<long double>(v.size());
}

long double brute_std(const std::vector<double>& v) {
  const long double m = brute_mean(v);
  long double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<long double>(v.size()));
}

long double brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double mx = brute_mean(x), my = brute_mean(y);
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

long double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto rank = [](const std::vector<double>& v, std::size_t i) {
    std::size_t below = 0;
    for (double w : v) below += w < v[i];
    return static_cast<long double>(below + 1);
  };
  long double d2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = rank(x, i) - rank(y, i);
    d2 += d * d;
  }
  const long double nn = static_cast<long double>(n);
  return 1.0L - 6.0L * d2 / (nn * (nn * nn - 1.0L));
}

void oracle_equivalence(Check& c) {
  constexpr double kRel = 1e-9;
  RandomStream s(777);
  double worst[5] = {0, 0, 0, 0, 0};
  auto rel = [](double a, long double b) {
    return static_cast<double>(std::fabs(a - b) / std::max<long double>(std::fabs(b), 1e-12L));
  };
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + s.uniform_index(99);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = 100.0 * s.uniform();
    for (auto& v : y) v = 100.0 * s.uniform();
    worst[0] = std::max(worst[0], rel(std_pop(x), brute_std(x)));
    worst[1] = std::max(worst[1], rel(cv_percent(x), 100.0L * brute_std(x) / brute_mean(x)));
    worst[2] = std::max(worst[2], rel(mean_accuracy(AccuracyVector(x)), brute_mean(x)));
    worst[3] = std::max(worst[3], rel(spearman(x, y), brute_spearman(x, y)));
    worst[4] = std::max(worst[4], rel(pearson(x, y), brute_pearson(x, y)));
  }
  const char* names[] = {"std_pop", "cv_percent", "mean_accuracy", "spearman", "pearson"};
  for (int i = 0; i < 5; ++i) {
    std::ostringstream what;
    what << names[i] << " worst relative error " << worst[i];
    c.expect(worst[i] <= kRel, what.str());
  }
}

// --- gradient check ---------------------------------------------------------

void gradient_check_criterion(Check& c) {
  constexpr double kLimit = 1e-5;
  SynthSpec spec;
  spec.width = 12;
  spec.height = 12;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto batch = make_batch(synth_dataset(spec, 20, SeedSpec{seed}));
    auto model = initialize_model(3, 12, 12, 3, seed);
    for (std::size_t k = 0; k < model.bias.size(); ++k) model.bias[k] = 0.2 * static_cast<double>(k) - 0.2;
    const double err = gradient_check(model, batch, 1e-3, 400, seed);
    std::ostringstream what;
    what << "seed " << seed << " max relative error " << err;
    c.expect(err <= kLimit, what.str());
  }
}

// --- directional protocol ---------------------------------------------------

void directional_protocol(Check& c) {
  const auto start = Clock::now();
  constexpr std::uint64_t kSeed = 7;
  ProtocolConfig cfg;
  cfg.train_images = 500;
  cfg.test_images_per_group = 60;
  cfg.sampling_seed = kSeed;
  cfg.train_corruption_seed = kSeed + 2;
  cfg.test_corruption_seed = kSeed + 1;
  cfg.train.seed = kSeed;
  const auto dataset = synth_dataset(SynthSpec{}, cfg.train_images + cfg.test_images_per_group, SeedSpec{kSeed});
  const auto summaries = run_protocol(dataset, cfg, protocol_training_groups());

  const RobustnessSummary* clean = nullptr;
  double corrupted_cv = 0.0;
  std::size_t corrupted = 0;
  for (const auto& s : summaries) {
    if (s.training_group == "clean") {
      clean = &s;
    } else {
      corrupted_cv += s.cv;
      ++corrupted;
    }
  }
  c.expect(clean != nullptr && corrupted == 8, "nine runs with one clean run");
  if (!clean) return;
  corrupted_cv /= static_cast<double>(corrupted);
  std::ostringstream what;
  what << "mean corrupted-trained CV " << corrupted_cv << " < clean-trained CV " << clean->cv;
  c.expect(corrupted_cv < clean->cv, what.str());
  for (const auto& s : summaries) {
    if (&s == clean) continue;
    std::ostringstream w;
    w << "clean-test accuracy clean " << clean->clean_accu << " >= " << s.label() << " " << s.clean_accu;
    c.expect(clean->clean_accu >= s.clean_accu, w.str());
  }
  c.within_seconds(start, 300.0);
}

// --- plot consistency -------------------------------------------------------

void plot_consistency(Check& c) {
  RandomStream s(4242);
  std::vector<McvPoint> pts;
  const McvPoint ref{"ref", 2.5, 85.0, 78.0, 92.0, 91.0, true};
  pts.push_back(ref);
  for (int i = 0; i < 1000; ++i) {
    McvPoint p;
    p.label = "r" + std::to_string(i);
    p.cv = i % 25 == 0 ? ref.cv : 0.2 + 5.0 * s.uniform();
    p.mean_accu = i % 25 == 12 ? ref.mean_accu : 70.0 + 25.0 * s.uniform();
    p.min_accu = p.mean_accu - 6.0 * s.uniform();
    p.max_accu = p.mean_accu + 4.0 * s.uniform();
    p.clean_accu = p.max_accu;
    pts.push_back(p);
  }
  PlotStyle style;
  style.whiskers = false;
  const auto svg = render_mcv(pts, style);
  const auto probe = testing::probe_svg(svg);
  c.expect(probe.markers.size() == pts.size(), "one marker per point");
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < pts.size() && i < probe.markers.size(); ++i) {
    const auto& m = probe.markers[i];
    const bool left = m.x <= probe.divider_x;
    const bool up = m.y <= probe.divider_y;
    const QuadrantLabel screen = up ? (left ? QuadrantLabel::kGroupI : QuadrantLabel::kGroupII)
                                    : (left ? QuadrantLabel::kGroupIII : QuadrantLabel::kGroupIV);
    disagreements += screen != identify_group(pts[i].mean_accu, pts[i].cv, {ref.mean_accu, ref.cv});
  }
  c.expect(disagreements == 0, std::to_string(disagreements) + " rendered quadrants disagree with identify_group");
  c.expect(render_mcv(pts, style) == svg, "repeat render is byte-identical");

  std::vector<McvPoint> alexnet;
  for (const auto& r : fixture_rows()) {
    if (r.classifier_name == "AlexNet") alexnet.push_back(to_mcv_point(r, r.training_group == "clean"));
  }
  PlotStyle titled;
  titled.title = "AlexNet";
  const auto golden = read_file(testing::fixture("alexnet_mcv.svg"));
  c.expect(render_mcv(alexnet, titled) == std::string(golden.begin(), golden.end()),
           "fixture plot matches the stored SVG");
}

const std::vector<std::pair<std::string, std::function<void(Check&)>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<void(Check&)>>> all = {
      {"correlation_table", correlation_table},
      {"category_aggregates", category_aggregates},
      {"quadrant_golden", quadrant_golden},
      {"suite_shape", suite_shape},
      {"operator_statistics", operator_statistics},
      {"operator_identities", operator_identities},
      {"oracle_equivalence", oracle_equivalence},
      {"gradient_check", gradient_check_criterion},
      {"directional_protocol", directional_protocol},
      {"plot_consistency", plot_consistency},
  };
  return all;
}

bool run_one(const std::string& name, const std::function<void(Check&)>& fn) {
  Check c;
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  if (c.ok()) {
    std::printf("PASS %s (%zu checks)\n", name.c_str(), c.count());
  } else {
    std::printf("FAIL %s (%zu of %zu checks failed)\n", name.c_str(), c.failures().size(), c.count());
    for (const auto& f : c.failures()) std::printf("  - %s\n", f.c_str());
  }
  std::fflush(stdout);
  return c.ok();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 1 && args[0] == "--list") {
    for (const auto& [name, fn] : criteria()) std::printf("%s\n", name.c_str());
    return 0;
  }
  bool ok = true;
  std::size_t ran = 0;
  for (const auto& [name, fn] : criteria()) {
    if (!args.empty() && std::find(args.begin(), args.end(), name) == args.end()) continue;
    ok &= run_one(name, fn);
    ++ran;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion\n");
    return 2;
  }
  return ok ? 0 : 1;
}
