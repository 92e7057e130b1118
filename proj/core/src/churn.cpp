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

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gridrank/rng.hpp"
#include "gridrank/simulator.hpp"

namespace gridrank {

const ChurnClassModel& ChurnModel::for_class(const ResourceClass& c) const {
  auto it = per_class.find(c.label);
  return it == per_class.end() ? fallback : it->second;
}

namespace {

void validate_class(const std::string& who, const ChurnClassModel& m) {
  if (!(m.mean_up >= 0) || !(m.mean_down >= 0)) {
    throw std::invalid_argument(fmt::format("churn '{}': mean durations must be >= 0", who));
  }
  if (!(m.shape > 0)) throw std::invalid_argument(fmt::format("churn '{}': shape must be > 0", who));
  if (!(m.heterogeneity >= 0)) {
    throw std::invalid_argument(fmt::format("churn '{}': heterogeneity must be >= 0", who));
  }
}

constexpr std::uint64_t kChurnStream = 0xC4u;

}  // namespace

void validate(const ChurnModel& model) {
  validate_class("default", model.fallback);
  for (const auto& [label, m] : model.per_class) validate_class(label, m);
}

std::vector<AvailabilitySchedule> generate_churn(std::span<const ResourceRecord> catalog,
                                                 const ChurnModel& model, SimTime horizon,
                                                 std::uint64_t seed) {
  if (!(horizon > 0)) throw std::invalid_argument("churn horizon must be > 0");
  validate(model);
  std::vector<AvailabilitySchedule> out;
  out.reserve(catalog.size());
  for (const auto& r : catalog) {
    const ChurnClassModel& m = model.for_class(r.resource_class);
    if (r.dedicated || m.family == ChurnFamily::kAlways || m.mean_down == 0) {
      out.push_back(AvailabilitySchedule::always(horizon));
      continue;
    }
    if (m.mean_up == 0) {
      out.emplace_back();
      continue;
    }

    std::mt19937_64 rng = make_rng(seed, kChurnStream, r.id.value);
    std::normal_distribution<double> z;
    const double sigma = m.heterogeneity;
    const double mean_up = sigma > 0 ? m.mean_up * std::exp(sigma * z(rng) - 0.5 * sigma * sigma)
                                     : m.mean_up;
    std::exponential_distribution<double> down(1.0 / m.mean_down);
    std::exponential_distribution<double> up_exp(1.0 / mean_up);
    std::weibull_distribution<double> up_weibull(m.shape,
                                                 mean_up / std::tgamma(1.0 + 1.0 / m.shape));
    std::uniform_real_distribution<double> unit;
    auto draw = [&](bool up) {
      double d = !up ? down(rng)
                     : (m.family == ChurnFamily::kWeibull ? up_weibull(rng) : up_exp(rng));
      return d > 0 ? d : 1e-6;
    };

    bool up = true;
    double first = 0;
    if (m.random_phase) {
      up = unit(rng) < mean_up / (mean_up + m.mean_down);
      first = draw(up);
      // Residual life of the phase in progress; exact for the memoryless case.
      if (up && m.family == ChurnFamily::kWeibull) first *= unit(rng);
    } else {
      first = draw(true);
    }

    std::vector<Interval> windows;
    SimTime t = 0;
    double d = first;
    while (t < horizon) {
      if (up) windows.push_back({t, std::min(t + d, horizon)});
      t += d;
      up = !up;
      d = draw(up);
    }
    out.emplace_back(std::move(windows));
  }
  return out;
}

}  // namespace gridrank
