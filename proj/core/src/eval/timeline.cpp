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

#include "dailoc/eval/timeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dailoc/common/errors.hpp"

namespace dailoc::eval {
namespace {

using incremental::DomainBatch;
using incremental::LabelUse;
using nlohmann::json;
using sim::SplitKind;

DomainBatch batch_of(const sim::Scenario& s, SplitKind kind, const DomainKey& key,
                     LabelUse labels) {
  return incremental::make_batch(key, s.split(kind, key).records, labels);
}

std::vector<std::string> onboarding_order(const sim::Scenario& s, const TimelineOptions& o) {
  const std::string& base = s.base_device();
  if (o.order.empty()) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i < s.spec.roster.size(); ++i) out.push_back(s.spec.roster[i].id);
    return out;
  }
  std::set<std::string> seen;
  for (const auto& d : o.order) {
    s.device(d);  // throws for unknown ids
    if (d == base) throw InputError("onboarding order must not contain the base device " + base);
    if (!seen.insert(d).second) throw InputError("device " + d + " appears twice in the order");
  }
  return o.order;
}

json arch_json(const model::ArchConfig& a) {
  return {{"input_dim", a.input_dim},   {"n_rps", a.n_rps},
          {"trunk1", a.trunk1},         {"trunk2", a.trunk2},
          {"latent_dim", a.latent_dim}, {"class_hidden", a.class_hidden},
          {"decoder1", a.decoder1},     {"decoder2", a.decoder2},
          {"classifier_hidden", a.classifier_hidden}};
}

json curve_json(const std::vector<incremental::EpochLoss>& curve) {
  json out = json::array();
  for (const auto& e : curve) {
    json j{{"kl", e.kl}};
    if (e.rec) j["rec"] = *e.rec;
    if (e.align) j["align"] = *e.align;
    if (e.cls) j["cls"] = *e.cls;
    out.push_back(j);
  }
  return out;
}

json key_json(const DomainKey& k) { return {{"device", k.device}, {"epoch", k.epoch}}; }

}  // namespace

DomainBatch test_batch(const sim::Scenario& scenario, const DomainKey& key) {
  return batch_of(scenario, SplitKind::kTest, key, LabelUse::kKeep);
}

EvalReport evaluate_state(const incremental::LearnerState& state, const sim::Scenario& scenario,
                          json config) {
  const auto coords = scenario.coordinates();
  EvalReport report;
  report.config = std::move(config);
  for (const auto& d : scenario.spec.roster) report.devices.push_back(d.id);
  report.epoch_labels = scenario.drift.labels();
  for (const auto& split : scenario.splits) {
    if (split.kind != SplitKind::kTest) continue;
    const auto batch = test_batch(scenario, split.key);
    report.cells.push_back({split.key, state.registry.is_known(split.key.device),
                            evaluate_domain(state.model, batch, coords)});
  }
  std::sort(report.cells.begin(), report.cells.end(),
            [](const CellStats& a, const CellStats& b) { return a.key < b.key; });
  return report;
}

TimelineResult run_timeline(const sim::Scenario& scenario, const TimelineOptions& options) {
  const auto coords = scenario.coordinates();
  model::ArchConfig arch = options.arch;
  arch.input_dim = scenario.layout.aps.size();
  arch.n_rps = coords.size();
  const std::size_t n_epochs =
      options.n_epochs == 0 ? scenario.spec.n_epochs
                            : std::min(options.n_epochs, scenario.spec.n_epochs);
  const auto order = onboarding_order(scenario, options);
  const std::string& base = scenario.base_device();
  const auto& cfg = options.train;

  TimelineResult result{.report = {},
                        .pretrain = {},
                        .onboarded = {},
                        .adapted = {},
                        .state = incremental::make_learner(arch, options.learner_seed,
                                                           options.memory_capacity)};
  auto& state = result.state;
  auto& report = result.report;

  // Devices in evaluation order: base, onboarding order, then the rest.
  std::vector<std::string> devices{base};
  devices.insert(devices.end(), order.begin(), order.end());
  for (const auto& d : scenario.spec.roster) {
    if (std::find(devices.begin(), devices.end(), d.id) == devices.end()) devices.push_back(d.id);
  }
  report.devices = devices;
  report.epoch_labels = scenario.drift.labels();
  report.epoch_labels.resize(n_epochs);
  report.config = {{"scenario_seed", scenario.spec.seed},
                   {"building", scenario.spec.building.id},
                   {"learner_seed", options.learner_seed},
                   {"memory_capacity", options.memory_capacity},
                   {"n_epochs", n_epochs},
                   {"order", order},
                   {"arch", arch_json(arch)},
                   {"train", to_json(cfg)}};

  std::map<DomainKey, DomainBatch> tests;
  const auto test_of = [&](const DomainKey& key) -> const DomainBatch& {
    auto it = tests.find(key);
    if (it == tests.end()) it = tests.emplace(key, test_batch(scenario, key)).first;
    return it->second;
  };

  std::vector<TimelineCheckpoint> checkpoints;
  std::vector<DomainKey> onboarded;
  const auto checkpoint = [&](std::string event) {
    if (options.track_forgetting) checkpoints.push_back({std::move(event), state.model, onboarded});
  };
  const auto evaluate_epoch = [&](std::uint32_t t) {
    for (const auto& d : devices) {
      const DomainKey key{d, t};
      report.cells.push_back(
          {key, state.registry.is_known(d), evaluate_domain(state.model, test_of(key), coords)});
    }
  };

  const DomainKey base_key{base, 0};
  result.pretrain = incremental::pretrain(
      state, batch_of(scenario, SplitKind::kTrain, base_key, LabelUse::kKeep), cfg);
  onboarded.push_back(base_key);
  checkpoint("pretrain " + base_key.to_string());
  evaluate_epoch(0);

  for (std::uint32_t t = 1; t < n_epochs; ++t) {
    // Known devices adapt to epoch t before a newcomer is onboarded, so every
    // adaptation meets the epoch's drift unseen.
    for (const auto& d : devices) {
      if (!state.registry.is_known(d)) continue;
      const DomainKey key{d, t};
      PseudoLabelErrors pl{key, 0.0, 0.0};
      incremental::AdaptObserver observer;
      if (options.track_pseudo_labels) {
        const DomainBatch& probe = test_of(key);
        observer = [&](incremental::AdaptPoint point, const model::MlvaeModel& m) {
          const double err = pseudo_label_error(m, probe, coords, cfg.tau);
          (point == incremental::AdaptPoint::kBeforeStage1 ? pl.before : pl.after) = err;
        };
      }
      result.adapted.push_back(incremental::adapt_unsupervised(
          state, batch_of(scenario, SplitKind::kAdapt, key, LabelUse::kDrop), cfg, observer));
      if (options.track_pseudo_labels) report.pseudo.push_back(pl);
      checkpoint("adapt " + key.to_string());
    }
    if (t - 1 < order.size()) {
      const DomainKey key{order[t - 1], t};
      result.onboarded.push_back(incremental::onboard_device(
          state, batch_of(scenario, SplitKind::kOnboard, key, LabelUse::kKeep), cfg));
      onboarded.push_back(key);
      checkpoint("onboard " + key.to_string());
    }
    evaluate_epoch(t);
  }

  if (options.track_forgetting) {
    report.forgetting = forgetting_report(
        checkpoints, [&](const DomainKey& k) { return &test_of(k); }, coords);
  }
  return result;
}

json to_json(const incremental::AdaptationConfig& c) {
  return {{"pretrain_epochs", c.pretrain_epochs},
          {"onboard_epochs", c.onboard_epochs},
          {"stage1_epochs", c.stage1_epochs},
          {"stage2_epochs", c.stage2_epochs},
          {"batch_size", c.batch_size},
          {"weights",
           {{"rec", c.weights.rec},
            {"kl", c.weights.kl},
            {"align", c.weights.align},
            {"cls", c.weights.cls}}},
          {"tau", c.tau},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"kernel",
           {{"median_heuristic", c.kernel.median_heuristic},
            {"multipliers", c.kernel.multipliers},
            {"bandwidths", c.kernel.bandwidths}}},
          {"use_cesa", c.use_cesa},
          {"disentangle", c.disentangle},
          {"run_stage1", c.run_stage1},
          {"align_in_stage1", c.align_in_stage1},
          {"stage1_updates_decoder", c.stage1_updates_decoder}};
}

incremental::AdaptationConfig adaptation_config_from_json(const json& j) {
  try {
    incremental::AdaptationConfig c;
    c.pretrain_epochs = j.at("pretrain_epochs").get<std::size_t>();
    c.onboard_epochs = j.at("onboard_epochs").get<std::size_t>();
    c.stage1_epochs = j.at("stage1_epochs").get<std::size_t>();
    c.stage2_epochs = j.at("stage2_epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    const auto& w = j.at("weights");
    c.weights = {w.at("rec").get<double>(), w.at("kl").get<double>(),
                 w.at("align").get<double>(), w.at("cls").get<double>()};
    c.tau = j.at("tau").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& k = j.at("kernel");
    c.kernel.median_heuristic = k.at("median_heuristic").get<bool>();
    c.kernel.multipliers = k.at("multipliers").get<std::vector<double>>();
    c.kernel.bandwidths = k.at("bandwidths").get<std::vector<double>>();
    c.use_cesa = j.at("use_cesa").get<bool>();
    c.disentangle = j.at("disentangle").get<bool>();
    c.run_stage1 = j.at("run_stage1").get<bool>();
    c.align_in_stage1 = j.at("align_in_stage1").get<bool>();
    c.stage1_updates_decoder = j.at("stage1_updates_decoder").get<bool>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("adaptation config: ") + e.what());
  }
}

json to_json(const incremental::AdaptReport& r) {
  return {{"key", key_json(r.key)},
          {"skipped", r.skipped},
          {"warnings", r.warnings},
          {"stage1_curve", curve_json(r.stage1_curve)},
          {"stage2_curve", curve_json(r.stage2_curve)},
          {"pseudo_labels", r.pseudo_labels},
          {"rejected", r.rejected},
          {"rejected_fraction", r.rejected_fraction},
          {"drift_linf",
           {{"encoder", r.encoder_drift_linf},
            {"decoder", r.decoder_drift_linf},
            {"classifier", r.classifier_drift_linf}}},
          {"classifier_frozen_in_stage1", r.classifier_frozen_in_stage1},
          {"encoder_decoder_frozen_in_stage2", r.encoder_decoder_frozen_in_stage2},
          {"total_loss", r.total_loss}};
}

json to_json(const incremental::OnboardReport& r) {
  return {{"key", key_json(r.key)},
          {"curve", curve_json(r.curve)},
          {"prototypes_offered", r.prototypes_offered},
          {"prototypes_stored", r.prototypes_stored},
          {"warnings", r.warnings}};
}

json to_json(const incremental::PretrainReport& r) {
  return {{"key", key_json(r.key)},
          {"curve", curve_json(r.curve)},
          {"train_accuracy", r.train_accuracy}};
}

}  // namespace dailoc::eval
