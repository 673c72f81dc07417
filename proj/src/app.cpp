#include "nsgvd/app.hpp"

#include "nsgvd/config.hpp"
#include "nsgvd/detector.hpp"
#include "nsgvd/error.hpp"
#include "nsgvd/manifest.hpp"
#include "nsgvd/parallel.hpp"
#include "nsgvd/rng.hpp"
#include "nsgvd/theory_suite.hpp"
#include "nsgvd/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <numeric>

namespace nsgvd {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunContext {
  Config cfg;
  fs::path out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

RunContext setup(const CommandOptions& opt) {
  std::vector<std::string> overrides = opt.overrides;
  if (opt.seed) overrides.push_back("run.seed=" + std::to_string(*opt.seed));
  if (opt.threads) overrides.push_back("run.threads=" + std::to_string(*opt.threads));
  if (opt.out) overrides.push_back("run.out=" + opt.out->string());
  RunContext ctx{Config::load(opt.config, overrides), {}, 0, 1};
  ctx.seed = ctx.cfg.get<std::uint64_t>("run.seed", 0);
  ctx.threads = ctx.cfg.get<unsigned>("run.threads", 1);
  ctx.out = ctx.cfg.get_string("run.out", "out");
  if (ctx.threads < 1) throw ValidationError("run.threads must be >= 1");
  if (ctx.out.empty()) throw ValidationError("run.out must not be empty");
  return ctx;
}

/// Rejects unknown keys, prepares the output directory and echoes the config.
void begin(RunContext& ctx, const std::string& section) {
  ctx.cfg.reject_unknown({"run", section});
  set_thread_count(ctx.threads);
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw DataError("cannot create output directory '" + ctx.out.string() + "': " + ec.message());
  ctx.cfg.write_effective(ctx.out / "effective_config.ini");
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::string record_name(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu", i);
  return std::string(prefix) + "_" + buf;
}

/// Path of `p` as seen from `base` (for manifests written into `base`).
std::string relative_to(const fs::path& p, const fs::path& base) {
  if (p.empty()) return {};
  return fs::proximate(p, base).generic_string();
}

Matrix load_matrix(const fs::path& path, const std::string& what) {
  if (path.empty()) throw DataError(what + " path is empty");
  return read_matrix(path);
}

NsgFeature load_feature(const Manifest& m, const ManifestRecord& r) {
  if (r.feature_path.empty()) throw DataError("record '" + r.id + "' has no feature_path");
  const fs::path p = m.resolve(r.feature_path);
  try {
    NsgFeature f = read_feature(p);
    if (!f.values.allFinite()) throw DataError("non-finite values");
    return f;
  } catch (const Error& e) {
    throw DataError("feature '" + p.string() + "': " + e.what());
  }
}

/// Runs body(i) over n items; rethrows the lowest-index failure.
void for_each_item(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SigmaSchedule make_schedule(const std::string& kind, double a, double b) {
  switch (SigmaSchedule::parse_kind(kind)) {
    case SigmaSchedule::Kind::kConstant:
      return SigmaSchedule::constant(a);
    case SigmaSchedule::Kind::kLinear:
      return SigmaSchedule::linear(a, b);
    case SigmaSchedule::Kind::kExponential:
      return SigmaSchedule::exponential(a, b);
  }
  throw ValidationError("unknown schedule");
}

std::vector<double> parse_sweep(const std::string& text) {
  if (text.empty()) return {};
  if (text.find(':') == std::string::npos) return parse_double_list(text);
  std::vector<double> parts;
  std::string item;
  for (char c : text + ":") {
    if (c == ':') {
      parts.push_back(parse_double_list(item).at(0));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ValidationError("sweep must be a list or lo:hi:step with step > 0 and hi >= lo");
  }
  std::vector<double> taus;
  const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  for (std::size_t k = 0; k < n; ++k) taus.push_back(parts[0] + static_cast<double>(k) * parts[2]);
  return taus;
}

json metrics_json(const MetricsReport& m) {
  json j = {{"tau", m.tau},           {"tp", m.tp},         {"fp", m.fp},
            {"tn", m.tn},             {"fn", m.fn},         {"precision", m.precision},
            {"recall", m.recall},     {"accuracy", m.accuracy}, {"f1", m.f1}};
  if (m.auroc) {
    j["auroc"] = *m.auroc;
  } else {
    j["auroc"] = nullptr;
    j["auroc_error"] = m.auroc_error;
  }
  return j;
}

json objective_json(const std::optional<ObjectiveValue>& v) {
  if (!v) return nullptr;
  return {{"objective", v->objective}, {"mpp", v->mpp}, {"variance", v->variance}};
}

}  // namespace

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

// ---------------------------------------------------------------------------

int cmd_synth_gen(const CommandOptions& opt, CommandStreams io) {
  RunContext ctx = setup(opt);
  auto& c = ctx.cfg;
  GaussianProcessSpec base;
  base.d = c.get<long>("synth.d", 16);
  base.T = c.get<long>("synth.T", 8);
  const auto n_real = c.get<std::size_t>("synth.real", 100);
  const auto n_fake = c.get<std::size_t>("synth.fake", 100);
  const double mu_norm = c.get<double>("synth.mu_norm", 1.0);
  const std::string kind = c.get_string("synth.schedule", "constant");
  const double a = c.get<double>("synth.sigma_a", 1.0);
  const double b = c.get<double>("synth.sigma_b", 0.0);
  const bool with_scores = c.get<bool>("synth.scores", true);
  base.schedule = make_schedule(kind, a, b);
  base.validate();
  if (base.T < 2) throw ValidationError("synth.T must be >= 2");
  if (!(mu_norm >= 0.0)) throw ValidationError("synth.mu_norm must be >= 0");
  begin(ctx, "synth");

  // Fake-class shift spread evenly over all coordinates.
  const Vector mu = Vector::Constant(base.d, mu_norm / std::sqrt(static_cast<double>(base.d)));

  struct Item {
    std::string id;
    Label label;
    std::uint64_t seed;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < n_real; ++i) {
    items.push_back({record_name("real", i), Label::kReal, Rng::derive(ctx.seed, "synth.gen.real", i).next_u64()});
  }
  for (std::size_t i = 0; i < n_fake; ++i) {
    items.push_back({record_name("fake", i), Label::kFake, Rng::derive(ctx.seed, "synth.gen.fake", i).next_u64()});
  }

  fs::create_directories(ctx.out / "videos");
  if (with_scores) fs::create_directories(ctx.out / "scores");
  std::vector<ManifestRecord> records(items.size());
  for_each_item(items.size(), [&](std::size_t i) {
    GaussianProcessSpec spec = base;
    spec.seed = items[i].seed;
    if (items[i].label == Label::kFake) spec.mu = mu;
    const VideoTensor video = sample_video(spec);
    ManifestRecord& r = records[i];
    r.id = items[i].id;
    r.label = items[i].label;
    r.video_path = "videos/" + r.id + ".nsgt";
    write_matrix(ctx.out / r.video_path, video.frames());
    if (with_scores) {
      r.score_path = "scores/" + r.id + ".nsgt";
      write_matrix(ctx.out / r.score_path, oracle_score_field(video, spec).scores());
    }
  });
  write_manifest(ctx.out / "manifest.tsv", records);
  json seeds = json::array();
  for (const auto& it : items) seeds.push_back({{"id", it.id}, {"seed", it.seed}});
  write_json(ctx.out / "seeds.json", seeds);
  io.out << "synth gen: wrote " << items.size() << " videos to " << ctx.out.string() << '\n';
  return kExitOk;
}

int cmd_nsg_extract(const CommandOptions& opt, CommandStreams io) {
  RunContext ctx = setup(opt);
  auto& c = ctx.cfg;
  const std::string manifest_path = c.get_string("nsg.manifest", "");
  NsgConfig nc;
  nc.lambda_nsg = c.get<double>("nsg.lambda", nc.lambda_nsg);
  nc.delta_t = c.get<double>("nsg.delta_t", nc.delta_t);
  nc.last_frame_rule = parse_last_frame_rule(c.get_string("nsg.last_frame", to_string(nc.last_frame_rule)));
  nc.denominator_floor = c.get<double>("nsg.floor", nc.denominator_floor);
  nc.validate();
  if (manifest_path.empty()) throw ValidationError("nsg.manifest is required");
  begin(ctx, "nsg");

  const Manifest m = read_manifest(manifest_path);
  fs::create_directories(ctx.out / "features");
  std::vector<ManifestRecord> records(m.records.size());
  std::vector<NsgFeature> features(m.records.size());
  for_each_item(m.records.size(), [&](std::size_t i) {
    const ManifestRecord& in = m.records[i];
    if (in.video_path.empty()) throw DataError("record '" + in.id + "' has no video_path");
    if (in.score_path.empty()) throw DataError("record '" + in.id + "' has no score_path");
    const fs::path vp = m.resolve(in.video_path);
    const fs::path sp = m.resolve(in.score_path);
    std::optional<VideoTensor> video;
    std::optional<PrecomputedScoreProvider> provider;
    try {
      video.emplace(load_matrix(vp, "video"));
    } catch (const Error& e) {
      throw DataError("video '" + vp.string() + "': " + e.what());
    }
    try {
      provider.emplace(ScoreField(load_matrix(sp, "score")));
    } catch (const Error& e) {
      throw DataError("score file '" + sp.string() + "': " + e.what());
    }
    try {
      features[i] = nsg_feature(*video, *provider, nc);
    } catch (const DataError& e) {
      throw DataError("record '" + in.id + "' (" + sp.string() + "): " + e.what());
    } catch (const DegenerateError& e) {
      throw DegenerateError("record '" + in.id + "': " + e.what());
    }
    ManifestRecord& r = records[i];
    r = in;
    r.video_path = relative_to(vp, ctx.out);
    r.score_path = relative_to(sp, ctx.out);
    r.feature_path = "features/" + in.id + ".nsgt";
    write_feature(ctx.out / r.feature_path, features[i]);
  });
  write_manifest(ctx.out / "manifest.tsv", records);

  std::size_t flagged = 0;
  for (const auto& f : features) flagged += f.flagged_count();
  const json report = {{"videos", features.size()},
                       {"flagged_frames", flagged},
                       {"near_lambda_fraction", near_lambda_fraction(features, nc.lambda_nsg)}};
  write_json(ctx.out / "nsg_report.json", report);
  io.out << "nsg extract: " << features.size() << " features, " << flagged << " flagged frames\n";
  return kExitOk;
}

int cmd_kernel_train(const CommandOptions& opt, CommandStreams io) {
  RunContext ctx = setup(opt);
  auto& c = ctx.cfg;
  const std::string manifest_path = c.get_string("train.manifest", "");
  TrainConfig tc;
  tc.lambda_reg = c.get<double>("train.lambda_reg", tc.lambda_reg);
  tc.learning_rate = c.get<double>("train.learning_rate", tc.learning_rate);
  tc.weight_decay = c.get<double>("train.weight_decay", tc.weight_decay);
  tc.batch_size = c.get<std::size_t>("train.batch_size", tc.batch_size);
  tc.max_iters = c.get<std::size_t>("train.iters", tc.max_iters);
  tc.seed = ctx.seed;
  const auto hidden = c.get_ints("train.hidden", {32});
  const auto output_dim = c.get<long>("train.output_dim", 300);
  const auto reference_size = c.get<std::size_t>("train.reference_size", kDefaultReferenceSize);
  const double eps = c.get<double>("train.epsilon", 0.5);
  const double sigma_phi = c.get<double>("train.sigma_phi", 0.1);
  const double sigma_Phi = c.get<double>("train.sigma_Phi", 100.0);
  tc.validate();
  if (manifest_path.empty()) throw ValidationError("train.manifest is required");
  if (output_dim < 1) throw ValidationError("train.output_dim must be >= 1");
  for (auto h : hidden) {
    if (h < 1) throw ValidationError("train.hidden widths must be >= 1");
  }
  begin(ctx, "train");

  const Manifest m = read_manifest(manifest_path);
  std::vector<std::size_t> real_idx;
  std::vector<std::size_t> fake_idx;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    (m.records[i].label == Label::kFake ? fake_idx : real_idx).push_back(i);
  }

  // Reserve a reference set of reals, disjoint from training when the pool allows.
  Rng rng = Rng::derive(ctx.seed, "train.reference");
  for (std::size_t i = real_idx.size(); i > 1; --i) std::swap(real_idx[i - 1], real_idx[rng.below(i)]);
  std::vector<std::size_t> reference_idx;
  std::vector<std::size_t> train_real_idx = real_idx;
  bool overlap = false;
  if (reference_size > 0) {
    if (real_idx.size() >= reference_size + tc.batch_size) {
      reference_idx.assign(real_idx.begin(), real_idx.begin() + static_cast<std::ptrdiff_t>(reference_size));
      train_real_idx.assign(real_idx.begin() + static_cast<std::ptrdiff_t>(reference_size), real_idx.end());
      std::sort(train_real_idx.begin(), train_real_idx.end());
    } else {
      reference_idx.assign(real_idx.begin(),
                           real_idx.begin() + static_cast<std::ptrdiff_t>(std::min(reference_size, real_idx.size())));
      overlap = true;
      io.err << "warning: real pool too small for a disjoint reference set; reference overlaps training\n";
    }
    std::sort(reference_idx.begin(), reference_idx.end());
  }

  const auto load = [&](const std::vector<std::size_t>& idx) {
    std::vector<NsgFeature> out(idx.size());
    for_each_item(idx.size(), [&](std::size_t k) { out[k] = load_feature(m, m.records[idx[k]]); });
    return out;
  };
  const auto real = load(train_real_idx);
  const auto fake = load(fake_idx);
  if (real.empty() || fake.empty()) throw DataError("training needs both real and fake features");

  std::vector<Eigen::Index> widths = {real.front().flat_size()};
  for (auto h : hidden) widths.push_back(static_cast<Eigen::Index>(h));
  widths.push_back(static_cast<Eigen::Index>(output_dim));
  const KernelParams init =
      KernelParams::make(KernelParams::initial(widths, ctx.seed).net, eps, sigma_phi, sigma_Phi);

  const TrainReport rep = train_kernel(real, fake, tc, init);

  write_checkpoint(ctx.out / "kernel.nsgk", rep.params);
  std::vector<ManifestRecord> ref_records;
  for (auto i : reference_idx) {
    ManifestRecord r = m.records[i];
    r.video_path = relative_to(m.resolve(r.video_path), ctx.out);
    r.score_path = relative_to(m.resolve(r.score_path), ctx.out);
    r.feature_path = relative_to(m.resolve(r.feature_path), ctx.out);
    ref_records.push_back(std::move(r));
  }
  write_manifest(ctx.out / "reference_manifest.tsv", ref_records);

  json steps = json::array();
  for (const auto& s : rep.steps) {
    steps.push_back({{"iteration", s.iteration},
                     {"objective", s.objective},
                     {"mpp", s.mpp},
                     {"variance", s.variance},
                     {"seconds", s.seconds}});
  }
  json report = {{"train_real", real.size()},
                 {"train_fake", fake.size()},
                 {"reference", reference_idx.size()},
                 {"reference_overlaps_training", overlap},
                 {"widths", widths},
                 {"initial_full", objective_json(rep.initial_full)},
                 {"final_full", objective_json(rep.final_full)},
                 {"final_kernel",
                  {{"epsilon", rep.params.epsilon()},
                   {"sigma_phi", rep.params.sigma_phi()},
                   {"sigma_Phi", rep.params.sigma_Phi()}}},
                 {"aborted_at", rep.aborted_at ? json(*rep.aborted_at) : json(nullptr)},
                 {"steps", steps}};
  if (rep.aborted_at) report["abort_reason"] = rep.abort_reason;
  write_json(ctx.out / "train_report.json", report);

  if (rep.aborted_at) {
    io.err << "error: training aborted at iteration " << *rep.aborted_at << ": " << rep.abort_reason << '\n';
    return kExitData;
  }
  io.out << "kernel train: " << rep.steps.size() << " iterations";
  if (rep.initial_full && rep.final_full) {
    io.out << ", objective " << rep.initial_full->objective << " -> " << rep.final_full->objective;
  }
  io.out << '\n';
  return kExitOk;
}

int cmd_detect(const CommandOptions& opt, CommandStreams io) {
  RunContext ctx = setup(opt);
  auto& c = ctx.cfg;
  const std::string checkpoint = c.get_string("detect.checkpoint", "");
  const std::string reference_path = c.get_string("detect.reference", "");
  const std::string test_path = c.get_string("detect.test", "");
  const double tau = c.get<double>("detect.tau", kDefaultTau);
  const auto reference_size = c.get<std::size_t>("detect.reference_size", kDefaultReferenceSize);
  const auto taus = parse_sweep(c.get_string("detect.sweep", ""));
  if (checkpoint.empty()) throw ValidationError("detect.checkpoint is required");
  if (reference_path.empty()) throw ValidationError("detect.reference is required");
  if (test_path.empty()) throw ValidationError("detect.test is required");
  if (reference_size < 1) throw ValidationError("detect.reference_size must be >= 1");
  if (!std::isfinite(tau)) throw ValidationError("detect.tau must be finite");
  begin(ctx, "detect");

  if (!fs::exists(checkpoint)) throw DataError("checkpoint '" + checkpoint + "' does not exist");
  KernelParams params = read_checkpoint(checkpoint);

  const Manifest ref_m = read_manifest(reference_path);
  std::vector<NsgFeature> reference;
  for (const auto& r : ref_m.records) {
    if (r.label != Label::kReal) continue;
    if (reference.size() == reference_size) break;
    reference.push_back(load_feature(ref_m, r));
  }
  if (reference.empty()) throw DataError("reference manifest has no real features");
  if (reference.size() < reference_size) {
    io.err << "warning: reference set has " << reference.size() << " videos (requested " << reference_size << ")\n";
  }

  const Manifest test_m = read_manifest(test_path);
  std::vector<NsgFeature> tests(test_m.records.size());
  for_each_item(tests.size(), [&](std::size_t i) { tests[i] = load_feature(test_m, test_m.records[i]); });

  const DetectorState state(std::move(reference), std::move(params), tau);
  const auto results = detect_batch(tests, state);

  std::ofstream lines(ctx.out / "detections.jsonl", std::ios::binary);
  if (!lines) throw DataError("cannot write detections");
  std::vector<double> q(results.size());
  std::vector<bool> is_fake(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    json flags = json::array();
    for (std::size_t f = 0; f < tests[i].flags.size(); ++f) {
      if (tests[i].flags[f]) flags.push_back(f);
    }
    const json line = {{"video_id", test_m.records[i].id},
                       {"Q", results[i].q},
                       {"decision", to_string(results[i].decision)},
                       {"flags", flags}};
    lines << line.dump() << '\n';
    q[i] = results[i].q;
    is_fake[i] = test_m.records[i].label == Label::kFake;
  }

  json report = {{"reference_size", state.reference().size()}, {"tests", results.size()}};
  if (!results.empty()) {
    const MetricsReport m = compute_metrics(q, is_fake, tau);
    report["metrics"] = metrics_json(m);
    io.out << "detect: " << results.size() << " videos, accuracy " << m.accuracy << ", f1 " << m.f1;
    if (m.auroc) io.out << ", auroc " << *m.auroc;
    io.out << '\n';
    if (!taus.empty()) {
      json sweep = json::array();
      for (const auto& s : threshold_sweep(q, is_fake, taus)) sweep.push_back(metrics_json(s));
      report["sweep"] = sweep;
    }
  } else {
    io.out << "detect: no test videos\n";
  }
  write_json(ctx.out / "metrics.json", report);
  return kExitOk;
}

int cmd_theory_verify(const CommandOptions& opt, CommandStreams io) {
  RunContext ctx = setup(opt);
  auto& c = ctx.cfg;
  TheorySuiteConfig tc;
  const std::string checks = c.get_string("theory.checks", "all");
  if (checks == "all") {
    tc.checks = theory_check_names();
  } else {
    tc.checks.clear();
    std::string item;
    for (char ch : checks + ",") {
      if (ch == ',') {
        const auto b = item.find_first_not_of(' ');
        if (b != std::string::npos) tc.checks.push_back(item.substr(b, item.find_last_not_of(' ') - b + 1));
        item.clear();
      } else {
        item.push_back(ch);
      }
    }
  }
  tc.seed = ctx.seed;
  tc.trials = c.get<std::uint64_t>("theory.trials", tc.trials);
  tc.theorem_trials = c.get<std::uint64_t>("theory.theorem_trials", tc.theorem_trials);
  const bool csv = c.get<bool>("theory.csv", false);
  tc.keep_samples = csv;
  tc.chi2_d = c.get_ints("theory.chi2_d", tc.chi2_d);
  tc.chi2_phi = c.get_doubles("theory.chi2_phi", tc.chi2_phi);
  tc.chi2_t = c.get_doubles("theory.chi2_t", tc.chi2_t);
  tc.corollary_d = c.get<long>("theory.corollary_d", tc.corollary_d);
  tc.corollary_phi = c.get<double>("theory.corollary_phi", tc.corollary_phi);
  tc.corollary_delta = c.get<double>("theory.corollary_delta", tc.corollary_delta);
  tc.component_d = c.get<long>("theory.component_d", tc.component_d);
  tc.component_sigma_a = c.get<double>("theory.component_sigma_a", tc.component_sigma_a);
  tc.component_sigma_b = c.get<double>("theory.component_sigma_b", tc.component_sigma_b);
  tc.component_t = c.get<double>("theory.component_t", tc.component_t);
  tc.component_phi = c.get<double>("theory.component_phi", tc.component_phi);
  tc.component_lambda = c.get<double>("theory.component_lambda", tc.component_lambda);
  tc.a6_d = c.get<long>("theory.a6_d", tc.a6_d);
  tc.a6_sigma = c.get<double>("theory.a6_sigma", tc.a6_sigma);
  tc.a6_sigma_dot = c.get<double>("theory.a6_sigma_dot", tc.a6_sigma_dot);
  tc.a6_phi = c.get<double>("theory.a6_phi", tc.a6_phi);
  tc.a6_lambda = c.get<double>("theory.a6_lambda", tc.a6_lambda);
  tc.a6_delta = c.get<double>("theory.a6_delta", tc.a6_delta);
  tc.a7_d = c.get<long>("theory.a7_d", tc.a7_d);
  tc.a7_phi = c.get<double>("theory.a7_phi", tc.a7_phi);
  tc.a7_delta = c.get<double>("theory.a7_delta", tc.a7_delta);
  tc.a8_d = c.get<long>("theory.a8_d", tc.a8_d);
  tc.a8_sigma = c.get<double>("theory.a8_sigma", tc.a8_sigma);
  tc.a8_sigma_dot = c.get_doubles("theory.a8_sigma_dot", tc.a8_sigma_dot);
  tc.a8_phi = c.get<double>("theory.a8_phi", tc.a8_phi);
  tc.a8_lambda = c.get<double>("theory.a8_lambda", tc.a8_lambda);
  tc.a8_delta = c.get<double>("theory.a8_delta", tc.a8_delta);
  tc.theorem_d = c.get<long>("theory.theorem_d", tc.theorem_d);
  tc.theorem_T = c.get<long>("theory.theorem_T", tc.theorem_T);
  tc.theorem_phi = c.get_doubles("theory.theorem_phi", tc.theorem_phi);
  tc.theorem_sigma = c.get<double>("theory.theorem_sigma", tc.theorem_sigma);
  tc.theorem_sigma_dot = c.get<double>("theory.theorem_sigma_dot", tc.theorem_sigma_dot);
  tc.theorem_lambda = c.get<double>("theory.theorem_lambda", tc.theorem_lambda);
  tc.theorem_delta = c.get<double>("theory.theorem_delta", tc.theorem_delta);
  const auto theorem_c = c.get_doubles("theory.theorem_c", {});
  if (theorem_c.size() > 1) throw ValidationError("theory.theorem_c takes a single value");
  if (!theorem_c.empty()) tc.theorem_c = theorem_c.front();
  tc.ordering_alpha = c.get<double>("theory.ordering_alpha", tc.ordering_alpha);
  begin(ctx, "theory");

  const TheorySuiteResult res = run_theory_suite(tc);
  write_json(ctx.out / "theory_report.json", res.bundle);
  if (csv) {
    std::ofstream out(ctx.out / "theory_trials.csv", std::ios::binary);
    if (!out) throw DataError("cannot write theory_trials.csv");
    write_samples_csv(out, res.samples);
  }
  io.out << "theory verify: " << tc.checks.size() << " checks, " << (res.pass ? "all pass" : "FAILED") << '\n';
  return res.pass ? kExitOk : kExitVerification;
}

}  // namespace nsgvd
