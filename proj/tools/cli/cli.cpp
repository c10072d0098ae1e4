// Copyright 2026 The dailoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dailoc/common/errors.hpp"
#include "dailoc/eval/report.hpp"
#include "dailoc/eval/timeline.hpp"
#include "dailoc/io/checkpoint.hpp"
#include "dailoc/model/gradcheck_suite.hpp"
#include "dailoc/sim/scenario.hpp"

namespace dailoc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

// Training flags shared by pretrain, onboard, adapt and run.
struct TrainFlags {
  incremental::AdaptationConfig config;
  bool no_cesa = false;
  bool no_disentangle = false;
  bool no_stage1 = false;
  bool strict_staging = false;
  bool stage1_decoder = false;

  void bind(CLI::App* app) {
    app->add_option("--pretrain-epochs", config.pretrain_epochs)->capture_default_str();
    app->add_option("--onboard-epochs", config.onboard_epochs)->capture_default_str();
    app->add_option("--stage1-epochs", config.stage1_epochs)->capture_default_str();
    app->add_option("--stage2-epochs", config.stage2_epochs)->capture_default_str();
    app->add_option("--batch-size", config.batch_size)->capture_default_str();
    app->add_option("--lr", config.learning_rate, "Adam learning rate")->capture_default_str();
    app->add_option("--tau", config.tau, "pseudo-label confidence threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--train-seed", config.seed, "seed for shuffling and sampled noise")
        ->capture_default_str();
    app->add_option("--w-rec", config.weights.rec)->capture_default_str();
    app->add_option("--w-kl", config.weights.kl)->capture_default_str();
    app->add_option("--w-align", config.weights.align)->capture_default_str();
    app->add_option("--w-cls", config.weights.cls)->capture_default_str();
    app->add_flag("--no-cesa", no_cesa, "disable class-latent alignment to the memory");
    app->add_flag("--no-disentangle", no_disentangle,
                  "per-sample random noise instead of the domain noise buffer");
    app->add_flag("--no-stage1", no_stage1, "skip encoder adaptation before pseudo-labeling");
    app->add_flag("--strict-staging", strict_staging,
                  "stage 1 minimizes L_rec + L_KL only (no L_align on the encoder)");
    app->add_flag("--stage1-decoder", stage1_decoder, "also update the decoder in stage 1");
  }

  incremental::AdaptationConfig resolve() const {
    auto c = config;
    if (no_cesa) c.use_cesa = false;
    if (no_disentangle) c.disentangle = false;
    if (no_stage1) c.run_stage1 = false;
    if (strict_staging) c.align_in_stage1 = false;
    if (stage1_decoder) c.stage1_updates_decoder = true;
    c.validate();
    return c;
  }
};

json key_json(const DomainKey& k) { return {{"device", k.device}, {"epoch", k.epoch}}; }

// Run manifests sit next to file artifacts ("<file>.manifest.json") or
// inside directory artifacts ("run-manifest.json").
void write_manifest(const fs::path& artifact, bool is_dir, const std::string& command,
                    json config, json results = json::object()) {
  json m{{"schema", "dailoc-run-manifest"},
         {"version", 1},
         {"tool_version", kToolVersion},
         {"command", command},
         {"config", std::move(config)},
         {"results", std::move(results)}};
  const fs::path path =
      is_dir ? artifact / "run-manifest.json" : fs::path(artifact.string() + ".manifest.json");
  eval::write_json(path, m);
}

json scenario_echo(const sim::Scenario& s) {
  return {{"scenario_seed", s.spec.seed},
          {"building", s.spec.building.id},
          {"n_epochs", s.spec.n_epochs},
          {"samples_per_rp", s.spec.samples_per_rp},
          {"test_samples_per_rp", s.spec.test_samples_per_rp},
          {"drift_magnitude", s.spec.drift.magnitude}};
}

json learner_echo(const incremental::LearnerState& st) {
  json history = json::array();
  for (const auto& e : st.registry.history()) {
    history.push_back({{"key", key_json(e.key)}, {"event", incremental::to_string(e.type)}});
  }
  return {{"learner_seed", st.seed},
          {"memory_capacity", st.memory.capacity()},
          {"memory_seed", st.memory.seed()},
          {"noise_seed", st.noise.seed()},
          {"history", history}};
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void check_exists(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw IoError(std::string(what) + " not found: " + p.string());
}

sim::Scenario open_scenario(const fs::path& dir) {
  check_exists(dir / "manifest.json", "scenario manifest");
  return sim::load_scenario(dir);
}

incremental::LearnerState open_checkpoint(const fs::path& p) {
  check_exists(p, "checkpoint");
  return io::load_checkpoint(p);
}

incremental::DomainBatch split_batch(const sim::Scenario& s, sim::SplitKind kind,
                                     const DomainKey& key, incremental::LabelUse labels) {
  return incremental::make_batch(key, s.split(kind, key).records, labels);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dailoc: domain-incremental Wi-Fi RSS localization toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a synthetic multi-domain scenario");
  std::string preset = "toy";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  sim::ScenarioSpec spec;
  std::size_t n_devices = 0;
  gen->add_option("--preset", preset, "toy, building1 or building2")
      ->check(CLI::IsMember({"toy", "building1", "building2"}))
      ->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--samples-per-rp", spec.samples_per_rp)->capture_default_str();
  gen->add_option("--test-samples-per-rp", spec.test_samples_per_rp)->capture_default_str();
  gen->add_option("--epochs", spec.n_epochs)->capture_default_str();
  gen->add_option("--devices", n_devices, "use the first N roster devices (0 = all)");
  gen->add_option("--drift-magnitude", spec.drift.magnitude)->capture_default_str();

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "offline training on the base device at epoch 0");
  std::string scenario_dir, ckpt_in, ckpt_out;
  std::uint64_t learner_seed = 0;
  std::size_t memory_capacity = 1;
  TrainFlags pre_flags;
  pre->add_option("--scenario", scenario_dir)->required();
  pre->add_option("--out", ckpt_out, "checkpoint file")->required();
  pre->add_option("--learner-seed", learner_seed)->capture_default_str();
  pre->add_option("--memory-capacity", memory_capacity, "prototypes per RP")->capture_default_str();
  pre_flags.bind(pre);

  // onboard / adapt
  std::string device;
  std::uint32_t epoch = 0;
  auto* onb = app.add_subcommand("onboard", "supervised onboarding of an unknown device");
  TrainFlags onb_flags;
  onb->add_option("--scenario", scenario_dir)->required();
  onb->add_option("--checkpoint", ckpt_in)->required();
  onb->add_option("--device", device)->required();
  onb->add_option("--epoch", epoch)->required();
  onb->add_option("--out", ckpt_out)->required();
  onb_flags.bind(onb);

  auto* ada = app.add_subcommand("adapt", "two-stage unsupervised adaptation of a known device");
  TrainFlags ada_flags;
  bool no_probe = false;
  ada->add_option("--scenario", scenario_dir)->required();
  ada->add_option("--checkpoint", ckpt_in)->required();
  ada->add_option("--device", device)->required();
  ada->add_option("--epoch", epoch)->required();
  ada->add_option("--out", ckpt_out)->required();
  ada->add_flag("--no-probe", no_probe, "skip pseudo-label error on the held-out test split");
  ada_flags.bind(ada);

  // evaluate / report
  auto* evl = app.add_subcommand("evaluate", "mean/percentile ED on every test split");
  std::string eval_out;
  std::vector<std::string> adapt_logs;
  evl->add_option("--scenario", scenario_dir)->required();
  evl->add_option("--checkpoint", ckpt_in)->required();
  evl->add_option("--out", eval_out, "eval JSON file")->required();
  evl->add_option("--adapt-manifest", adapt_logs,
                  "adapt run manifests whose pseudo-label errors are included");

  auto* rep = app.add_subcommand("report", "render report.txt and report.tsv");
  std::string eval_in, report_dir;
  rep->add_option("--eval", eval_in)->required();
  rep->add_option("--out", report_dir, "output directory")->required();

  // gradcheck
  auto* gck = app.add_subcommand("gradcheck", "finite-difference check of every loss gradient");
  model::GradCheckSuiteOptions gc_options;
  std::string gc_out;
  gck->add_option("--seed", gc_options.seed)->capture_default_str();
  gck->add_option("--coords-per-block", gc_options.check.max_coords_per_block,
                  "0 checks every coordinate")
      ->capture_default_str();
  gck->add_option("--tolerance", gc_options.check.tolerance)->capture_default_str();
  gck->add_option("--out", gc_out, "optional JSON result file");

  // run
  auto* tl = app.add_subcommand("run", "full timeline: pretrain, onboard, adapt, evaluate, report");
  std::string run_out, order;
  std::size_t run_epochs = 0;
  bool no_forgetting = false;
  TrainFlags run_flags;
  tl->add_option("--scenario", scenario_dir)->required();
  tl->add_option("--out", run_out, "output directory")->required();
  tl->add_option("--order", order, "comma-separated onboarding order of non-base devices");
  tl->add_option("--epochs", run_epochs, "limit the number of epochs (0 = all)");
  tl->add_option("--learner-seed", learner_seed)->capture_default_str();
  tl->add_option("--memory-capacity", memory_capacity)->capture_default_str();
  tl->add_flag("--no-forgetting", no_forgetting, "skip the forgetting matrix");
  run_flags.bind(tl);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error maps to kExitError.
    return app.exit(e, out, err) == 0 ? 0 : kExitError;
  }

  try {
    if (*gen) {
      spec.seed = gen_seed;
      spec.building = sim::building_preset(preset);
      if (n_devices > 0) {
        if (n_devices > spec.roster.size()) {
          throw InputError("--devices exceeds the roster size " +
                           std::to_string(spec.roster.size()));
        }
        spec.roster.resize(n_devices);
      }
      const auto scenario = sim::generate_scenario(spec);
      sim::save_scenario(gen_out, scenario);
      write_manifest(gen_out, true, "generate",
                     {{"preset", preset}, {"scenario", scenario_echo(scenario)}},
                     {{"splits", scenario.splits.size()}});
      out << "generated " << scenario.splits.size() << " splits in " << gen_out << "\n";
      return 0;
    }

    if (*pre) {
      const auto scenario = open_scenario(scenario_dir);
      const auto cfg = pre_flags.resolve();
      model::ArchConfig arch;
      arch.input_dim = scenario.layout.aps.size();
      arch.n_rps = scenario.layout.rps.size();
      auto state = incremental::make_learner(arch, learner_seed, memory_capacity);
      const DomainKey key{scenario.base_device(), 0};
      const auto report = incremental::pretrain(
          state, split_batch(scenario, sim::SplitKind::kTrain, key, incremental::LabelUse::kKeep),
          cfg);
      io::save_checkpoint(ckpt_out, state);
      write_manifest(ckpt_out, false, "pretrain",
                     {{"scenario", scenario_echo(scenario)},
                      {"learner", learner_echo(state)},
                      {"train", eval::to_json(cfg)}},
                     eval::to_json(report));
      out << "pretrained " << key.to_string() << ": training accuracy "
          << fixed(report.train_accuracy) << "\n";
      return 0;
    }

    if (*onb || *ada) {
      const auto scenario = open_scenario(scenario_dir);
      auto state = open_checkpoint(ckpt_in);
      const DomainKey key{device, epoch};
      if (*onb) {
        const auto cfg = onb_flags.resolve();
        const auto report = incremental::onboard_device(
            state,
            split_batch(scenario, sim::SplitKind::kOnboard, key, incremental::LabelUse::kKeep),
            cfg);
        io::save_checkpoint(ckpt_out, state);
        write_manifest(ckpt_out, false, "onboard",
                       {{"scenario", scenario_echo(scenario)},
                        {"learner", learner_echo(state)},
                        {"key", key_json(key)},
                        {"train", eval::to_json(cfg)}},
                       eval::to_json(report));
        out << "onboarded " << key.to_string() << ": " << report.prototypes_stored
            << " prototypes stored\n";
        for (const auto& w : report.warnings) err << "warning: " << w << "\n";
        return 0;
      }
      const auto cfg = ada_flags.resolve();
      const auto coords = scenario.coordinates();
      std::optional<incremental::DomainBatch> probe;
      if (!no_probe) probe = eval::test_batch(scenario, key);
      eval::PseudoLabelErrors pl{key, 0.0, 0.0};
      incremental::AdaptObserver observer;
      if (probe) {
        observer = [&](incremental::AdaptPoint p, const model::MlvaeModel& m) {
          const double e = eval::pseudo_label_error(m, *probe, coords, cfg.tau);
          (p == incremental::AdaptPoint::kBeforeStage1 ? pl.before : pl.after) = e;
        };
      }
      const auto report = incremental::adapt_unsupervised(
          state, split_batch(scenario, sim::SplitKind::kAdapt, key, incremental::LabelUse::kDrop),
          cfg, observer);
      io::save_checkpoint(ckpt_out, state);
      json results = eval::to_json(report);
      if (probe && !report.skipped) {
        results["pseudo_label_error"] = {{"before", pl.before}, {"after", pl.after}};
      }
      write_manifest(ckpt_out, false, "adapt",
                     {{"scenario", scenario_echo(scenario)},
                      {"learner", learner_echo(state)},
                      {"key", key_json(key)},
                      {"train", eval::to_json(cfg)}},
                     results);
      out << "adapted " << key.to_string() << ": " << report.pseudo_labels << " pseudo-labels";
      if (probe && !report.skipped) {
        out << ", pseudo-label error " << fixed(pl.before) << " -> " << fixed(pl.after) << " m";
      }
      out << "\n";
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      return 0;
    }

    if (*evl) {
      const auto scenario = open_scenario(scenario_dir);
      const auto state = open_checkpoint(ckpt_in);
      json config{{"scenario", scenario_echo(scenario)}, {"learner", learner_echo(state)}};
      auto report = eval::evaluate_state(state, scenario, config);
      for (const auto& path : adapt_logs) {
        check_exists(path, "adapt manifest");
        const auto m = eval::read_json(path);
        if (m.value("command", "") != "adapt") throw InputError(path + " is not an adapt manifest");
        const auto& r = m.at("results");
        if (!r.contains("pseudo_label_error")) continue;
        report.pseudo.push_back({{r.at("key").at("device").get<std::string>(),
                                  r.at("key").at("epoch").get<std::uint32_t>()},
                                 r.at("pseudo_label_error").at("before").get<double>(),
                                 r.at("pseudo_label_error").at("after").get<double>()});
      }
      eval::write_json(eval_out, eval::to_json(report));
      write_manifest(eval_out, false, "evaluate", config,
                     {{"mean_ed", report.mean_ed()}, {"worst_case_ed", report.worst_case_ed()}});
      out << "mean ED " << fixed(report.mean_ed()) << " m, worst case "
          << fixed(report.worst_case_ed()) << " m over " << report.cells.size() << " domains\n";
      return 0;
    }

    if (*rep) {
      check_exists(eval_in, "eval file");
      const auto report = eval::report_from_json(eval::read_json(eval_in));
      eval::write_report(report_dir, report);
      write_manifest(report_dir, true, "report", report.config);
      out << "wrote report.txt and report.tsv to " << report_dir << "\n";
      return 0;
    }

    if (*gck) {
      gc_options.check.seed = gc_options.seed;
      const auto cases = model::run_gradcheck_suite(gc_options);
      bool ok = true;
      json results = json::array();
      for (const auto& c : cases) {
        ok = ok && c.report.passed;
        out << (c.report.passed ? "PASS " : "FAIL ") << c.name << ": max rel err "
            << c.report.max_rel_error << " at " << c.report.worst_param << " ("
            << c.report.coords_checked << " coords)\n";
        results.push_back({{"name", c.name},
                           {"max_rel_error", c.report.max_rel_error},
                           {"worst_param", c.report.worst_param},
                           {"coords_checked", c.report.coords_checked},
                           {"passed", c.report.passed}});
      }
      out << (ok ? "PASS" : "FAIL") << " gradient check (tolerance " << gc_options.check.tolerance
          << ")\n";
      if (!gc_out.empty()) {
        json config{{"seed", gc_options.seed},
                    {"n_aps", gc_options.n_aps},
                    {"n_rps", gc_options.n_rps},
                    {"batch", gc_options.batch},
                    {"step", gc_options.check.step},
                    {"tolerance", gc_options.check.tolerance},
                    {"coords_per_block", gc_options.check.max_coords_per_block}};
        eval::write_json(gc_out, {{"config", config}, {"cases", results}});
        write_manifest(gc_out, false, "gradcheck", config, {{"passed", ok}});
      }
      return ok ? 0 : kExitFailure;
    }

    if (*tl) {
      const auto scenario = open_scenario(scenario_dir);
      eval::TimelineOptions options;
      options.train = run_flags.resolve();
      options.learner_seed = learner_seed;
      options.memory_capacity = memory_capacity;
      options.order = split_list(order);
      options.n_epochs = run_epochs;
      options.track_forgetting = !no_forgetting;
      auto result = eval::run_timeline(scenario, options);
      result.report.config["scenario"] = scenario_echo(scenario);
      fs::create_directories(run_out);
      eval::write_json(fs::path(run_out) / "eval.json", eval::to_json(result.report));
      eval::write_report(run_out, result.report);
      io::save_checkpoint(fs::path(run_out) / "checkpoint.json", result.state);
      json events = json::array();
      events.push_back({{"event", "pretrain"}, {"report", eval::to_json(result.pretrain)}});
      for (const auto& r : result.onboarded) {
        events.push_back({{"event", "onboard"}, {"report", eval::to_json(r)}});
      }
      for (const auto& r : result.adapted) {
        events.push_back({{"event", "adapt"}, {"report", eval::to_json(r)}});
      }
      write_manifest(run_out, true, "run", result.report.config,
                     {{"final_mean_ed", result.report.final_mean_ed()},
                      {"mean_ed", result.report.mean_ed()},
                      {"worst_case_ed", result.report.worst_case_ed()},
                      {"events", events}});
      out << "final-epoch mean ED " << fixed(result.report.final_mean_ed()) << " m, worst case "
          << fixed(result.report.worst_case_ed()) << " m; report in " << run_out << "\n";
      return 0;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitError;
}

}  // namespace dailoc::cli
