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

#include "gridrank/grv.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace gridrank {

GrvState init_entry(const ResourceRecord& resource, const GrvParams& params, SimTime now) {
  return GrvState{.ra = params.rbase,
                  .js = params.js_init,
                  .ca = resource.nflops * resource.ncores,
                  .uptime_anchor = now};
}

GrvState rejoin(GrvState state, const GrvParams& params, SimTime now) {
  state.ra = params.rbase;
  state.uptime_anchor = now;
  return state;
}

GrvState refresh_ra(GrvState state, const GrvParams& params, SimTime now) {
  if (now < state.uptime_anchor) {
    throw std::invalid_argument(
        fmt::format("clock regression: now {} precedes uptime anchor {}", now, state.uptime_anchor));
  }
  const double hours = (now - state.uptime_anchor) / kSecondsPerHour;
  state.ra = std::min(params.rbase + params.ra_rate * hours, params.ra_max);
  return state;
}

GrvState apply_outcome(GrvState state, Outcome outcome, const GrvParams& params) {
  const double delta = is_failure(outcome) ? -params.penalty : params.reward;
  state.js = std::clamp(state.js + delta, params.js_min, params.js_max);
  return state;
}

NormalizationContext normalize_context(std::span<const GrvState> candidates) {
  if (candidates.empty()) throw std::invalid_argument("normalization over an empty candidate set");
  const auto& first = candidates.front();
  NormalizationContext n{first.ra, first.ra, first.js, first.js, first.ca, first.ca};
  for (const auto& s : candidates.subspan(1)) {
    n.ra_min = std::min(n.ra_min, s.ra);
    n.ra_max = std::max(n.ra_max, s.ra);
    n.js_min = std::min(n.js_min, s.js);
    n.js_max = std::max(n.js_max, s.js);
    n.ca_min = std::min(n.ca_min, s.ca);
    n.ca_max = std::max(n.ca_max, s.ca);
  }
  return n;
}

namespace {

double unit(double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }

}  // namespace

double score(const GrvState& state, const WeightVector& weights, const NormalizationContext& norm) {
  return weights.w1 * unit(state.ra, norm.ra_min, norm.ra_max) +
         weights.w2 * unit(state.js, norm.js_min, norm.js_max) +
         weights.w3 * unit(state.ca, norm.ca_min, norm.ca_max);
}

GrvTable::GrvTable(std::span<const ResourceRecord> resources, GrvParams params,
                   WeightVector weights, SimTime now)
    : params_(params), weights_(weights) {
  validate(params_);
  validate(weights_);
  entries_.reserve(resources.size());
  for (const auto& r : resources) entries_.push_back(init_entry(r, params_, now));
}

void GrvTable::on_join(ResourceId r, SimTime now) {
  entries_.at(r.value) = rejoin(entries_.at(r.value), params_, now);
}

void GrvTable::refresh(ResourceId r, SimTime now) {
  entries_.at(r.value) = refresh_ra(entries_.at(r.value), params_, now);
}

void GrvTable::record(ResourceId r, Outcome outcome) {
  entries_.at(r.value) = apply_outcome(entries_.at(r.value), outcome, params_);
}

}  // namespace gridrank
