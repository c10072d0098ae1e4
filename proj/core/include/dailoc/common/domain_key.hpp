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

#include <compare>
#include <cstdint>
#include <string>

namespace dailoc {

// One domain = (device, time epoch). Epoch 0 is the offline collection.
struct DomainKey {
  std::string device;
  std::uint32_t epoch = 0;

  auto operator<=>(const DomainKey&) const = default;
  bool operator==(const DomainKey&) const = default;

  std::string to_string() const { return device + "@" + std::to_string(epoch); }
};

}  // namespace dailoc
