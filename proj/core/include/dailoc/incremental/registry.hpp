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

#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dailoc/common/domain_key.hpp"

namespace dailoc::incremental {

enum class EventType { kPretrain, kOnboard, kAdapt };

std::string_view to_string(EventType type);
EventType event_type_from_string(std::string_view name);

struct LifecycleEvent {
  DomainKey key;
  EventType type = EventType::kPretrain;

  bool operator==(const LifecycleEvent&) const = default;
};

// Known devices and the append-only history of lifecycle events. A device is
// known once it has been through a supervised event (offline pretraining or
// onboarding).
class DomainRegistry {
 public:
  bool is_known(std::string_view device) const;
  void record(const DomainKey& key, EventType type);

  const std::set<std::string, std::less<>>& known_devices() const { return known_; }
  const std::vector<LifecycleEvent>& history() const { return history_; }

  bool operator==(const DomainRegistry&) const = default;

 private:
  std::set<std::string, std::less<>> known_;
  std::vector<LifecycleEvent> history_;
};

}  // namespace dailoc::incremental
