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

#include "dailoc/incremental/registry.hpp"

#include "dailoc/common/errors.hpp"

namespace dailoc::incremental {

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::kPretrain: return "pretrain";
    case EventType::kOnboard: return "onboard";
    case EventType::kAdapt: return "adapt";
  }
  return "?";
}

EventType event_type_from_string(std::string_view name) {
  if (name == "pretrain") return EventType::kPretrain;
  if (name == "onboard") return EventType::kOnboard;
  if (name == "adapt") return EventType::kAdapt;
  throw ParseError("unknown lifecycle event type '" + std::string(name) + "'");
}

bool DomainRegistry::is_known(std::string_view device) const {
  return known_.find(device) != known_.end();
}

void DomainRegistry::record(const DomainKey& key, EventType type) {
  history_.push_back({key, type});
  if (type != EventType::kAdapt) known_.insert(key.device);
}

}  // namespace dailoc::incremental
