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

#include "dailoc/sim/scenario.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "dailoc/common/errors.hpp"

namespace dailoc::sim {
namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;

std::uint64_t kind_tag(SplitKind kind) { return static_cast<std::uint64_t>(kind) + 1; }

Split make_split(const Scenario& sc, SplitKind kind, const DeviceProfile& device,
                 std::uint32_t epoch, std::size_t per_rp, std::uint64_t& next_id) {
  Split split;
  split.kind = kind;
  split.key = {device.id, epoch};
  split.labeled = kind != SplitKind::kAdapt;
  split.name = split_name(kind, split.key);
  const std::uint64_t stream = mix_seed(
      mix_seed(mix_seed(mix_seed(sc.spec.seed, 0x73616d706c65ULL), hash_string(device.id)), epoch),
      kind_tag(kind));
  for (std::size_t rp = 0; rp < sc.layout.rps.size(); ++rp) {
    for (std::size_t j = 0; j < per_rp; ++j) {
      Rng rng(mix_seed(stream, rp * 1'000'003ULL + j));
      io::FingerprintRecord r;
      r.sample_id = next_id++;
      r.device_id = device.id;
      r.epoch = epoch;
      if (split.labeled) r.rp = rp;
      r.rss = sample_fingerprint(sc.layout, rp, device, epoch, sc.drift, rng);
      split.records.push_back(std::move(r));
    }
  }
  return split;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }
Point3 point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kTrain:
      return "train";
    case SplitKind::kOnboard:
      return "onboard";
    case SplitKind::kAdapt:
      return "adapt";
    case SplitKind::kTest:
      return "test";
  }
  return "train";
}

SplitKind split_kind_from_string(std::string_view name) {
  if (name == "train") return SplitKind::kTrain;
  if (name == "onboard") return SplitKind::kOnboard;
  if (name == "adapt") return SplitKind::kAdapt;
  if (name == "test") return SplitKind::kTest;
  throw ParseError("unknown split kind '" + std::string(name) + "'");
}

std::string split_name(SplitKind kind, const DomainKey& key) {
  return std::string(to_string(kind)) + "_" + key.device + "_e" + std::to_string(key.epoch);
}

io::CoordinateTable Scenario::coordinates() const { return io::CoordinateTable{layout.rps}; }

const Split* Scenario::find_split(SplitKind kind, const DomainKey& key) const {
  for (const auto& s : splits) {
    if (s.kind == kind && s.key == key) return &s;
  }
  return nullptr;
}

const Split& Scenario::split(SplitKind kind, const DomainKey& key) const {
  if (const auto* s = find_split(kind, key)) return *s;
  throw InputError("scenario has no split " + split_name(kind, key));
}

const DeviceProfile& Scenario::device(std::string_view id) const {
  for (const auto& d : spec.roster) {
    if (d.id == id) return d;
  }
  throw InputError("device '" + std::string(id) + "' is not in the scenario roster");
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  if (spec.roster.empty()) throw InputError("device roster must not be empty");
  if (spec.samples_per_rp == 0 || spec.test_samples_per_rp == 0) {
    throw InputError("samples per RP must be positive");
  }
  if (spec.n_epochs == 0) throw InputError("at least one epoch is required");
  for (std::size_t i = 0; i < spec.roster.size(); ++i) {
    const auto& d = spec.roster[i];
    if (d.noise_sigma_db < 0.0) throw InputError("device " + d.id + ": negative noise sigma");
    if (d.detection_floor_dbm < io::kRssFloorDbm) {
      throw InputError("device " + d.id + ": detection floor below -100 dBm");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.roster[j].id == d.id) throw InputError("duplicate device id " + d.id);
    }
  }

  Scenario sc;
  sc.spec = spec;
  if (sc.spec.epoch_labels.empty()) sc.spec.epoch_labels = default_epoch_labels(spec.n_epochs);
  sc.layout = generate_building(mix_seed(spec.seed, 1), spec.building);
  sc.drift = generate_drift(mix_seed(spec.seed, 2), sc.layout.aps.size(), spec.n_epochs,
                            spec.drift, sc.spec.epoch_labels);

  std::uint64_t next_id = 0;
  const auto& base = spec.roster.front();
  sc.splits.push_back(make_split(sc, SplitKind::kTrain, base, 0, spec.samples_per_rp, next_id));
  for (std::uint32_t t = 0; t < spec.n_epochs; ++t) {
    for (std::size_t d = 0; d < spec.roster.size(); ++d) {
      const auto& dev = spec.roster[d];
      if (t >= 1 && d != 0) {
        sc.splits.push_back(make_split(sc, SplitKind::kOnboard, dev, t, spec.samples_per_rp, next_id));
      }
      if (t >= 1) {
        sc.splits.push_back(make_split(sc, SplitKind::kAdapt, dev, t, spec.samples_per_rp, next_id));
      }
      sc.splits.push_back(make_split(sc, SplitKind::kTest, dev, t, spec.test_samples_per_rp, next_id));
    }
  }
  return sc;
}

void save_scenario(const std::filesystem::path& dir, const Scenario& sc) {
  std::filesystem::create_directories(dir / "splits");
  json m;
  m["schema"] = "dailoc-scenario";
  m["version"] = kManifestVersion;
  m["seed"] = sc.spec.seed;
  m["n_epochs"] = sc.spec.n_epochs;
  m["samples_per_rp"] = sc.spec.samples_per_rp;
  m["test_samples_per_rp"] = sc.spec.test_samples_per_rp;
  m["epoch_labels"] = sc.spec.epoch_labels;
  const auto& b = sc.spec.building;
  m["building_spec"] = {{"id", b.id},         {"n_rps", b.n_rps},         {"n_aps", b.n_aps},
                        {"width", b.width},   {"depth", b.depth},         {"ap_margin", b.ap_margin},
                        {"ap_height", b.ap_height}, {"min_tx_dbm", b.min_tx_dbm},
                        {"max_tx_dbm", b.max_tx_dbm}};
  m["drift_spec"] = {{"shift_fraction", sc.spec.drift.shift_fraction},
                     {"shift_sigma_db", sc.spec.drift.shift_sigma_db},
                     {"dropout_fraction", sc.spec.drift.dropout_fraction},
                     {"ambient_step_db", sc.spec.drift.ambient_step_db},
                     {"magnitude", sc.spec.drift.magnitude}};
  json layout;
  layout["id"] = sc.layout.id;
  layout["rp_spacing"] = sc.layout.rp_spacing;
  layout["rps"] = json::array();
  for (const auto& p : sc.layout.rps) layout["rps"].push_back(point_json(p));
  layout["aps"] = json::array();
  for (const auto& ap : sc.layout.aps) {
    layout["aps"].push_back({{"position", point_json(ap.position)},
                             {"tx_power_dbm", ap.tx_power_dbm},
                             {"path_loss_exponent", ap.path_loss_exponent}});
  }
  m["layout"] = layout;
  m["roster"] = json::array();
  for (const auto& d : sc.spec.roster) {
    m["roster"].push_back({{"id", d.id},
                           {"gain", d.gain},
                           {"offset_db", d.offset_db},
                           {"noise_sigma_db", d.noise_sigma_db},
                           {"detection_floor_dbm", d.detection_floor_dbm},
                           {"resolution_db", d.resolution_db}});
  }
  m["drift_schedule"] = json::array();
  for (const auto& e : sc.drift.epochs) {
    json deltas = json::array();
    for (const auto& [ap, delta] : e.power_deltas) deltas.push_back(json::array({ap, delta}));
    m["drift_schedule"].push_back({{"label", e.label},
                                   {"power_deltas", deltas},
                                   {"dropped_aps", e.dropped_aps},
                                   {"ambient_noise_db", e.ambient_noise_db}});
  }
  m["coordinates"] = "coords.csv";
  m["splits"] = json::array();
  for (const auto& s : sc.splits) {
    const std::string file = "splits/" + s.name + ".fp";
    m["splits"].push_back({{"name", s.name},
                           {"kind", std::string(to_string(s.kind))},
                           {"device", s.key.device},
                           {"epoch", s.key.epoch},
                           {"labeled", s.labeled},
                           {"file", file},
                           {"count", s.records.size()}});
    io::save_dataset(dir / file, io::FingerprintFile{sc.layout.id, sc.layout.aps.size(), s.records});
  }
  io::save_coordinates(dir / "coords.csv", sc.coordinates());
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Scenario load_scenario(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("cannot open scenario manifest in '" + dir.string() + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("scenario manifest: " + std::string(e.what()));
  }
  try {
    if (m.at("schema") != "dailoc-scenario") throw SchemaError("not a scenario manifest");
    if (m.at("version").get<int>() != kManifestVersion) {
      throw SchemaError("unsupported scenario manifest version");
    }
    Scenario sc;
    sc.spec.seed = m.at("seed").get<std::uint64_t>();
    sc.spec.n_epochs = m.at("n_epochs").get<std::size_t>();
    sc.spec.samples_per_rp = m.at("samples_per_rp").get<std::size_t>();
    sc.spec.test_samples_per_rp = m.at("test_samples_per_rp").get<std::size_t>();
    sc.spec.epoch_labels = m.at("epoch_labels").get<std::vector<std::string>>();
    const auto& b = m.at("building_spec");
    sc.spec.building = {b.at("id"),          b.at("n_rps"),      b.at("n_aps"),
                        b.at("width"),       b.at("depth"),      b.at("ap_margin"),
                        b.at("ap_height"),   b.at("min_tx_dbm"), b.at("max_tx_dbm")};
    const auto& ds = m.at("drift_spec");
    sc.spec.drift = {ds.at("shift_fraction"), ds.at("shift_sigma_db"), ds.at("dropout_fraction"),
                     ds.at("ambient_step_db"), ds.at("magnitude")};
    const auto& l = m.at("layout");
    sc.layout.id = l.at("id");
    sc.layout.rp_spacing = l.at("rp_spacing");
    for (const auto& p : l.at("rps")) sc.layout.rps.push_back(point_from(p));
    for (const auto& a : l.at("aps")) {
      sc.layout.aps.push_back(
          {point_from(a.at("position")), a.at("tx_power_dbm"), a.at("path_loss_exponent")});
    }
    sc.spec.roster.clear();
    for (const auto& d : m.at("roster")) {
      sc.spec.roster.push_back({d.at("id"), d.at("gain"), d.at("offset_db"), d.at("noise_sigma_db"),
                                d.at("detection_floor_dbm"), d.at("resolution_db")});
    }
    for (const auto& e : m.at("drift_schedule")) {
      DriftEpoch epoch;
      epoch.label = e.at("label");
      for (const auto& pd : e.at("power_deltas")) {
        epoch.power_deltas.emplace_back(pd.at(0).get<std::size_t>(), pd.at(1).get<double>());
      }
      epoch.dropped_aps = e.at("dropped_aps").get<std::vector<std::size_t>>();
      epoch.ambient_noise_db = e.at("ambient_noise_db");
      sc.drift.epochs.push_back(std::move(epoch));
    }
    const auto coords = io::load_coordinates(dir / m.at("coordinates").get<std::string>());
    if (coords.coords != sc.layout.rps) {
      throw SchemaError("coordinate file disagrees with the manifest layout");
    }
    for (const auto& sj : m.at("splits")) {
      Split s;
      s.name = sj.at("name");
      s.kind = split_kind_from_string(sj.at("kind").get<std::string>());
      s.key = {sj.at("device").get<std::string>(), sj.at("epoch").get<std::uint32_t>()};
      s.labeled = sj.at("labeled");
      auto file = io::load_dataset(dir / sj.at("file").get<std::string>());
      if (file.n_aps != sc.layout.aps.size()) {
        throw SchemaError("split " + s.name + " declares " + std::to_string(file.n_aps) +
                          " APs, layout has " + std::to_string(sc.layout.aps.size()));
      }
      s.records = std::move(file.records);
      if (s.records.size() != sj.at("count").get<std::size_t>()) {
        throw SchemaError("split " + s.name + " record count disagrees with the manifest");
      }
      sc.splits.push_back(std::move(s));
    }
    return sc;
  } catch (const json::exception& e) {
    throw SchemaError("scenario manifest: " + std::string(e.what()));
  }
}

}  // namespace dailoc::sim
