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

#include "dailoc/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dailoc/common/errors.hpp"
#include "dailoc/io/dataset.hpp"

namespace dailoc::eval {
namespace {

using nlohmann::json;

json key_json(const DomainKey& k) { return {{"device", k.device}, {"epoch", k.epoch}}; }

DomainKey key_from(const json& j) {
  return {j.at("device").get<std::string>(), j.at("epoch").get<std::uint32_t>()};
}

json stats_json(const ErrorStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"p90", s.p90},
          {"max", s.max}};
}

ErrorStats stats_from(const json& j) {
  return {j.at("count").get<std::size_t>(), j.at("mean").get<double>(),
          j.at("median").get<double>(), j.at("p90").get<double>(), j.at("max").get<double>()};
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string epoch_label(const EvalReport& r, std::uint32_t epoch) {
  return epoch < r.epoch_labels.size() ? r.epoch_labels[epoch] : "T" + std::to_string(epoch);
}

std::vector<std::uint32_t> epochs_of(const EvalReport& r) {
  std::vector<std::uint32_t> out;
  for (const auto& c : r.cells) out.push_back(c.key.epoch);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

const CellStats* EvalReport::find(const DomainKey& key) const {
  for (const auto& c : cells) {
    if (c.key == key) return &c;
  }
  return nullptr;
}

double EvalReport::mean_ed() const {
  if (cells.empty()) throw MetricError("report has no evaluated cells");
  double sum = 0.0;
  for (const auto& c : cells) sum += c.stats.mean;
  return sum / static_cast<double>(cells.size());
}

double EvalReport::worst_case_ed() const {
  if (cells.empty()) throw MetricError("report has no evaluated cells");
  double worst = 0.0;
  for (const auto& c : cells) worst = std::max(worst, c.stats.max);
  return worst;
}

double EvalReport::final_mean_ed() const {
  const auto epochs = epochs_of(*this);
  if (epochs.empty()) throw MetricError("report has no evaluated cells");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.key.epoch == epochs.back()) sum += c.stats.mean, ++n;
  }
  return sum / static_cast<double>(n);
}

json to_json(const EvalReport& r) {
  json j;
  j["schema"] = "dailoc-eval";
  j["version"] = 1;
  j["config"] = r.config;
  j["devices"] = r.devices;
  j["epoch_labels"] = r.epoch_labels;
  j["cells"] = json::array();
  for (const auto& c : r.cells) {
    j["cells"].push_back({{"key", key_json(c.key)}, {"known", c.known}, {"ed", stats_json(c.stats)}});
  }
  j["pseudo_label_error"] = json::array();
  for (const auto& p : r.pseudo) {
    j["pseudo_label_error"].push_back(
        {{"key", key_json(p.key)}, {"before", p.before}, {"after", p.after}});
  }
  if (r.forgetting) {
    json f;
    f["events"] = r.forgetting->events;
    f["domains"] = json::array();
    for (const auto& d : r.forgetting->domains) f["domains"].push_back(key_json(d));
    f["cells"] = json::array();
    for (const auto& row : r.forgetting->cells) {
      json jr = json::array();
      for (const auto& v : row) jr.push_back(v ? json(*v) : json(nullptr));
      f["cells"].push_back(jr);
    }
    j["forgetting"] = f;
  }
  if (!r.cells.empty()) {
    j["summary"] = {{"mean_ed", r.mean_ed()},
                    {"final_mean_ed", r.final_mean_ed()},
                    {"worst_case_ed", r.worst_case_ed()}};
  }
  return j;
}

EvalReport report_from_json(const json& j) {
  try {
    if (j.at("schema") != "dailoc-eval" || j.at("version") != 1) {
      throw SchemaError("not a dailoc-eval v1 document");
    }
    EvalReport r;
    r.config = j.at("config");
    r.devices = j.at("devices").get<std::vector<std::string>>();
    r.epoch_labels = j.at("epoch_labels").get<std::vector<std::string>>();
    for (const auto& c : j.at("cells")) {
      r.cells.push_back({key_from(c.at("key")), c.at("known").get<bool>(), stats_from(c.at("ed"))});
    }
    for (const auto& p : j.at("pseudo_label_error")) {
      r.pseudo.push_back(
          {key_from(p.at("key")), p.at("before").get<double>(), p.at("after").get<double>()});
    }
    if (j.contains("forgetting")) {
      const auto& f = j.at("forgetting");
      ForgettingMatrix m;
      m.events = f.at("events").get<std::vector<std::string>>();
      for (const auto& d : f.at("domains")) m.domains.push_back(key_from(d));
      for (const auto& row : f.at("cells")) {
        std::vector<std::optional<double>> cells;
        for (const auto& v : row) {
          cells.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
        }
        m.cells.push_back(std::move(cells));
      }
      r.forgetting = std::move(m);
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("eval report: ") + e.what());
  }
}

std::string render_text(const EvalReport& r) {
  std::ostringstream os;
  os << "dailoc evaluation report\n";
  os << "config: " << r.config.dump() << "\n\n";

  const auto epochs = epochs_of(r);
  std::size_t w = 8;
  for (const auto& d : r.devices) w = std::max(w, d.size() + 2);

  os << "mean ED (m) by device and epoch; * = device unknown to the model\n";
  os << pad("device", w);
  for (auto e : epochs) os << pad(epoch_label(r, e), 10);
  os << "\n";
  for (const auto& d : r.devices) {
    os << pad(d, w);
    for (auto e : epochs) {
      const auto* c = r.find({d, e});
      os << pad(c ? fixed(c->stats.mean) + (c->known ? "" : "*") : "-", 10);
    }
    os << "\n";
  }
  if (!r.cells.empty()) {
    os << "\nmean ED (m): " << fixed(r.mean_ed()) << "\n";
    os << "final-epoch mean ED (m): " << fixed(r.final_mean_ed()) << "\n";
    os << "worst-case ED (m): " << fixed(r.worst_case_ed()) << "\n";
  }

  os << "\nED distribution per domain (m)\n";
  os << pad("domain", w + 6) << pad("n", 6) << pad("mean", 10) << pad("median", 10)
     << pad("p90", 10) << "max\n";
  for (const auto& c : r.cells) {
    os << pad(c.key.to_string(), w + 6) << pad(std::to_string(c.stats.count), 6)
       << pad(fixed(c.stats.mean), 10) << pad(fixed(c.stats.median), 10)
       << pad(fixed(c.stats.p90), 10) << fixed(c.stats.max) << "\n";
  }

  if (!r.pseudo.empty()) {
    os << "\npseudo-label error (m) before / after stage 1\n";
    double before = 0.0, after = 0.0;
    for (const auto& p : r.pseudo) {
      os << pad(p.key.to_string(), w + 6) << pad(fixed(p.before), 10) << fixed(p.after) << "\n";
      before += p.before;
      after += p.after;
    }
    const double n = static_cast<double>(r.pseudo.size());
    os << pad("mean", w + 6) << pad(fixed(before / n), 10) << fixed(after / n) << "\n";
  }

  if (r.forgetting) {
    const auto& f = *r.forgetting;
    std::size_t ew = 8;
    for (const auto& e : f.events) ew = std::max(ew, e.size() + 2);
    os << "\nforgetting matrix: mean ED (m) on each onboarded domain after each event\n";
    os << pad("event", ew);
    for (const auto& d : f.domains) os << pad(d.to_string(), std::max<std::size_t>(10, d.to_string().size() + 2));
    os << "\n";
    for (std::size_t e = 0; e < f.events.size(); ++e) {
      os << pad(f.events[e], ew);
      for (std::size_t d = 0; d < f.domains.size(); ++d) {
        const auto& v = f.cells[e][d];
        os << pad(v ? fixed(*v) : "-",
                  std::max<std::size_t>(10, f.domains[d].to_string().size() + 2));
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string render_tsv(const EvalReport& r) {
  std::ostringstream os;
  os << "table\tdevice\tepoch\tepoch_label\tevent\tmetric\tvalue\n";
  const auto row = [&](std::string_view table, const DomainKey& k, std::string_view event,
                       std::string_view metric, double v) {
    os << table << '\t' << k.device << '\t' << k.epoch << '\t' << epoch_label(r, k.epoch) << '\t'
       << event << '\t' << metric << '\t' << io::format_real(v) << '\n';
  };
  for (const auto& c : r.cells) {
    row("heatmap", c.key, "-", "count", static_cast<double>(c.stats.count));
    row("heatmap", c.key, "-", "known", c.known ? 1.0 : 0.0);
    row("heatmap", c.key, "-", "mean", c.stats.mean);
    row("heatmap", c.key, "-", "median", c.stats.median);
    row("heatmap", c.key, "-", "p90", c.stats.p90);
    row("heatmap", c.key, "-", "max", c.stats.max);
  }
  for (const auto& p : r.pseudo) {
    row("pseudo_label", p.key, "-", "before", p.before);
    row("pseudo_label", p.key, "-", "after", p.after);
  }
  if (r.forgetting) {
    const auto& f = *r.forgetting;
    for (std::size_t e = 0; e < f.events.size(); ++e) {
      for (std::size_t d = 0; d < f.domains.size(); ++d) {
        if (f.cells[e][d]) row("forgetting", f.domains[d], f.events[e], "mean", *f.cells[e][d]);
      }
    }
  }
  return os.str();
}

void write_report(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : {std::pair{"report.txt", render_text(report)},
                                   std::pair{"report.tsv", render_tsv(report)}}) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << text;
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace dailoc::eval
