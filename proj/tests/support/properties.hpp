// Copyright 2026 The gridrank Authors.
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


#pragma once

#include <cstdint>
#include <string>

namespace gridrank::testing {

/// Outcome of one randomized property: how many cases ran and the first
/// counterexample, if any.
struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  [[nodiscard]] bool ok() const { return failures == 0 && cases > 0; }
};

PropertyResult ra_monotone_and_capped(std::uint64_t seed, std::size_t cases);
PropertyResult js_closed_form(std::uint64_t seed, std::size_t cases);
PropertyResult argmax_dominance(std::uint64_t seed, std::size_t cases);
PropertyResult scale_invariance(std::uint64_t seed, std::size_t cases);
PropertyResult single_weight_selection(std::uint64_t seed, std::size_t cases);

}  // namespace gridrank::testing
