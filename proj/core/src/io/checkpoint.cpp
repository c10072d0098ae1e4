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

#include "dailoc/io/checkpoint.hpp"

#include <fstream>

#include "dailoc/common/errors.hpp"

namespace dailoc::io {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "dailoc-checkpoint";
constexpr int kVersion = 1;

json key_json(const DomainKey& k) { return {{"device", k.device}, {"epoch", k.epoch}}; }
DomainKey key_from(const json& j) {
  return {j.at("device").get<std::string>(), j.at("epoch").get<std::uint32_t>()};
}

}  // namespace

json checkpoint_to_json(const incremental::LearnerState& state) {
  const auto& a = state.model.arch;
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["seed"] = state.seed;
  j["arch"] = {{"input_dim", a.input_dim},   {"n_rps", a.n_rps},
               {"trunk1", a.trunk1},         {"trunk2", a.trunk2},
               {"latent_dim", a.latent_dim}, {"class_hidden", a.class_hidden},
               {"decoder1", a.decoder1},     {"decoder2", a.decoder2},
               {"classifier_hidden", a.classifier_hidden}};

  j["layers"] = json::array();
  for (std::size_t i = 0; i < model::kLayerCount; ++i) {
    const auto& l = state.model.layers[i];
    j["layers"].push_back({{"name", model::layer_name(static_cast<model::LayerId>(i))},
                           {"activation", nn::to_string(l.activation)},
                           {"out", l.weights.rows()},
                           {"in", l.weights.cols()},
                           {"weights", l.weights.values()},
                           {"bias", l.bias}});
  }

  json noise{{"seed", state.noise.seed()}, {"dim", state.noise.dim()}, {"entries", json::array()}};
  for (const auto& [key, eps] : state.noise.entries()) {
    noise["entries"].push_back({{"key", key_json(key)}, {"eps", eps}});
  }
  j["noise_buffer"] = noise;

  const auto& m = state.memory;
  json slots = json::array();
  json seen = json::array();
  for (std::size_t rp = 0; rp < m.n_rps(); ++rp) {
    slots.push_back(m.prototypes(rp));
    seen.push_back(m.seen(rp));
  }
  j["memory"] = {{"n_rps", m.n_rps()},       {"latent_dim", m.latent_dim()},
                 {"capacity", m.capacity()}, {"seed", m.seed()},
                 {"rng", m.rng().serialize()}, {"slots", slots},
                 {"seen", seen}};

  json history = json::array();
  for (const auto& e : state.registry.history()) {
    history.push_back({{"key", key_json(e.key)}, {"event", incremental::to_string(e.type)}});
  }
  j["registry"] = history;
  return j;
}

incremental::LearnerState checkpoint_from_json(const json& j) {
  try {
    if (j.at("format") != kFormat) throw SchemaError("not a dailoc checkpoint");
    if (j.at("version") != kVersion) {
      throw SchemaError("unsupported checkpoint version " + j.at("version").dump());
    }
    const auto& ja = j.at("arch");
    model::ArchConfig arch;
    arch.input_dim = ja.at("input_dim").get<std::size_t>();
    arch.n_rps = ja.at("n_rps").get<std::size_t>();
    arch.trunk1 = ja.at("trunk1").get<std::size_t>();
    arch.trunk2 = ja.at("trunk2").get<std::size_t>();
    arch.latent_dim = ja.at("latent_dim").get<std::size_t>();
    arch.class_hidden = ja.at("class_hidden").get<std::size_t>();
    arch.decoder1 = ja.at("decoder1").get<std::size_t>();
    arch.decoder2 = ja.at("decoder2").get<std::size_t>();
    arch.classifier_hidden = ja.at("classifier_hidden").get<std::size_t>();

    incremental::LearnerState state;
    state.seed = j.at("seed").get<std::uint64_t>();
    // make_model fixes every shape; the stored values then overwrite it.
    state.model = model::make_model(arch, 0);
    const auto& layers = j.at("layers");
    if (layers.size() != model::kLayerCount) {
      throw SchemaError("checkpoint has " + std::to_string(layers.size()) + " layers, expected " +
                        std::to_string(model::kLayerCount));
    }
    for (std::size_t i = 0; i < model::kLayerCount; ++i) {
      const auto& jl = layers[i];
      auto& l = state.model.layers[i];
      const auto name = model::layer_name(static_cast<model::LayerId>(i));
      if (jl.at("name").get<std::string>() != name) {
        throw SchemaError("layer " + std::to_string(i) + " should be " + std::string(name));
      }
      auto w = jl.at("weights").get<std::vector<double>>();
      auto b = jl.at("bias").get<std::vector<double>>();
      if (jl.at("out").get<std::size_t>() != l.weights.rows() ||
          jl.at("in").get<std::size_t>() != l.weights.cols() || w.size() != l.weights.size() ||
          b.size() != l.bias.size()) {
        throw SchemaError("layer " + std::string(name) + " does not match the architecture");
      }
      if (nn::activation_from_string(jl.at("activation").get<std::string>()) != l.activation) {
        throw SchemaError("layer " + std::string(name) + " has an unexpected activation");
      }
      l.weights = nn::Matrix(l.weights.rows(), l.weights.cols(), std::move(w));
      l.bias = std::move(b);
    }

    const auto& jn = j.at("noise_buffer");
    state.noise = model::DomainNoiseBuffer(jn.at("seed").get<std::uint64_t>(),
                                           jn.at("dim").get<std::size_t>());
    for (const auto& e : jn.at("entries")) {
      state.noise.restore(key_from(e.at("key")), e.at("eps").get<std::vector<double>>());
    }

    const auto& jm = j.at("memory");
    state.memory = cesa::RepresentationMemory::restore(
        jm.at("latent_dim").get<std::size_t>(), jm.at("capacity").get<std::size_t>(),
        jm.at("seed").get<std::uint64_t>(), Rng::deserialize(jm.at("rng").get<std::string>()),
        jm.at("slots").get<std::vector<std::vector<std::vector<double>>>>(),
        jm.at("seen").get<std::vector<std::uint64_t>>());
    if (state.memory.n_rps() != arch.n_rps) {
      throw SchemaError("memory covers " + std::to_string(state.memory.n_rps()) +
                        " RPs but the model has " + std::to_string(arch.n_rps));
    }

    for (const auto& e : j.at("registry")) {
      state.registry.record(key_from(e.at("key")),
                            incremental::event_type_from_string(e.at("event").get<std::string>()));
    }
    return state;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const incremental::LearnerState& state) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(state).dump() << '\n';
}

incremental::LearnerState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace dailoc::io
