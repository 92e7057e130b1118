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

#include <span>
#include <vector>

#include "gridrank/domain.hpp"

namespace gridrank {

/// Fresh vector entry: ca = nflops * ncores, js = js_init, ra = rbase.
[[nodiscard]] GrvState init_entry(const ResourceRecord& resource, const GrvParams& params,
                                  SimTime now);

/// A resource that comes back restarts its availability score at rbase with
/// a new uptime anchor. Job success is history, so it is kept.
[[nodiscard]] GrvState rejoin(GrvState state, const GrvParams& params, SimTime now);

/// ra = min(rbase + ra_rate * uptime_hours, ra_max). Throws
/// std::invalid_argument if now precedes the uptime anchor.
[[nodiscard]] GrvState refresh_ra(GrvState state, const GrvParams& params, SimTime now);

/// Reward on completion, penalty on any interruption; js is clamped to
/// [js_min, js_max].
[[nodiscard]] GrvState apply_outcome(GrvState state, Outcome outcome, const GrvParams& params);

/// Per-attribute minimum and maximum over one candidate set.
struct NormalizationContext {
  double ra_min, ra_max;
  double js_min, js_max;
  double ca_min, ca_max;
};

/// Throws std::invalid_argument on an empty candidate list.
[[nodiscard]] NormalizationContext normalize_context(std::span<const GrvState> candidates);

/// Min-max normalized weighted sum. An attribute that is constant over the
/// context normalizes to 0 for everyone.
[[nodiscard]] double score(const GrvState& state, const WeightVector& weights,
                           const NormalizationContext& norm);

/// The metascheduler's per-resource record, indexed by catalog position.
class GrvTable {
 public:
  GrvTable(std::span<const ResourceRecord> resources, GrvParams params, WeightVector weights,
           SimTime now = 0);

  [[nodiscard]] const GrvParams& params() const { return params_; }
  [[nodiscard]] const WeightVector& weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  [[nodiscard]] const GrvState& at(ResourceId r) const { return entries_.at(r.value); }
  [[nodiscard]] std::span<const GrvState> entries() const { return entries_; }

  void on_join(ResourceId r, SimTime now);
  void refresh(ResourceId r, SimTime now);
  void record(ResourceId r, Outcome outcome);

 private:
  GrvParams params_;
  WeightVector weights_;
  std::vector<GrvState> entries_;
};

}  // namespace gridrank
