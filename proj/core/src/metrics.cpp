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

#include "gridrank/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gridrank/traces.hpp"

namespace gridrank {

MetricsReport compute_report(const SimResult& result, std::string label) {
  MetricsReport r;
  r.label = std::move(label);
  r.policy = result.policy;
  r.total = result.jobs.size();
  for (const auto& job : result.jobs) {
    if (job.restarts > 0) ++r.restarted;
    r.evictions += static_cast<std::size_t>(job.restarts);
    switch (final_state(job)) {
      case JobState::kCompleted:
        if (job.restarts == 0) ++r.completed;
        break;
      case JobState::kAbandoned: ++r.abandoned; break;
      case JobState::kQueued: ++r.queued; break;
    }
  }
  r.throughput_pct = r.total == 0 ? 0.0 : 100.0 * static_cast<double>(r.completed) / r.total;
  return r;
}

std::string format_pct(double pct) {
  // The epsilon keeps exact decimal halves that land a hair below .x5 in
  // binary rounding upward.
  const double tenths = std::floor(pct * 10.0 + 0.5 + 1e-9);
  return fmt::format("{:.1f}", tenths / 10.0);
}

std::string format_delta(double delta) {
  const std::string body = format_pct(std::fabs(delta));
  if (body == "0.0") return "+0.0";
  return (delta < 0 ? "-" : "+") + body;
}

void write_report(std::ostream& out, const MetricsReport& r) {
  fmt::print(out, "{}\n{},{},{},{},{},{}\n", kReportColumns, r.label, r.total, r.completed,
             r.restarted, r.abandoned, format_pct(r.throughput_pct));
}

ArmSummary summarize(std::span<const MetricsReport> per_seed) {
  if (per_seed.empty()) throw std::invalid_argument("no reports to summarize");
  ArmSummary s;
  s.label = per_seed.front().label;
  s.policy = per_seed.front().policy;
  s.seeds = per_seed.size();
  const double n = static_cast<double>(per_seed.size());
  for (const auto& r : per_seed) {
    if (r.label != s.label || r.policy != s.policy) {
      throw std::invalid_argument("summarize over reports from different arms");
    }
    s.total += r.total / n;
    s.completed += r.completed / n;
    s.restarted += r.restarted / n;
    s.abandoned += r.abandoned / n;
    s.evictions += r.evictions / n;
    s.throughput_mean += r.throughput_pct / n;
  }
  if (per_seed.size() > 1) {
    double ss = 0;
    for (const auto& r : per_seed) ss += (r.throughput_pct - s.throughput_mean) * (r.throughput_pct - s.throughput_mean);
    s.throughput_stddev = std::sqrt(ss / (n - 1));
  }
  return s;
}

ComparisonTable compare(std::span<const ArmSummary> rows) {
  ComparisonTable t;
  t.rows.assign(rows.begin(), rows.end());
  for (const auto& r : t.rows) {
    if (r.total != t.rows.front().total) {
      throw std::invalid_argument(fmt::format("arm '{}' has {} jobs, arm '{}' has {}", r.label,
                                              r.total, t.rows.front().label, t.rows.front().total));
    }
  }
  auto first_of = [&](PolicyKind k) {
    return std::ranges::find(t.rows, k, &ArmSummary::policy);
  };
  auto grv = first_of(PolicyKind::kGrv);
  auto fcfs = first_of(PolicyKind::kFcfs);
  if (grv != t.rows.end() && fcfs != t.rows.end()) {
    t.delta = grv->throughput_mean - fcfs->throughput_mean;
  }
  return t;
}

ComparisonTable compare(std::span<const MetricsReport> reports) {
  std::vector<ArmSummary> rows;
  for (const auto& r : reports) rows.push_back(summarize(std::span(&r, 1)));
  return compare(rows);
}

std::string render(const ComparisonTable& table) {
  std::string out = fmt::format("{:<12} {:>8} {:>6} {:>9} {:>10} {:>10} {:>10} {:>10} {:>11} {:>7}\n",
                                "policy", "kind", "seeds", "total", "completed", "restarted",
                                "abandoned", "evictions", "throughput", "stddev");
  for (const auto& r : table.rows) {
    out += fmt::format(
        "{:<12} {:>8} {:>6} {:>9.1f} {:>10.1f} {:>10.1f} {:>10.1f} {:>10.1f} {:>11} {:>7.2f}\n",
        r.label, to_string(r.policy), r.seeds, r.total, r.completed, r.restarted, r.abandoned,
        r.evictions, format_pct(r.throughput_mean), r.throughput_stddev);
  }
  if (table.delta) out += fmt::format("delta (grv - fcfs): {}\n", format_delta(*table.delta));
  return out;
}

void write_aggregate(std::ostream& out, const ComparisonTable& table) {
  fmt::print(out,
             "policy,kind,seeds,total,completed_mean,restarted_mean,abandoned_mean,"
             "evictions_mean,throughput_mean,throughput_stddev\n");
  for (const auto& r : table.rows) {
    fmt::print(out, "{},{},{},{:.1f},{:.2f},{:.2f},{:.2f},{:.2f},{},{:.3f}\n", r.label,
               to_string(r.policy), r.seeds, r.total, r.completed, r.restarted, r.abandoned,
               r.evictions, format_pct(r.throughput_mean), r.throughput_stddev);
  }
  if (table.delta) fmt::print(out, "# delta_grv_minus_fcfs={}\n", format_delta(*table.delta));
}

// ---------------------------------------------------------------------------
// Result files

namespace {

constexpr std::string_view kResultMagic = "# gridrank-result v1";

char reason_code(Interruption r) {
  switch (r) {
    case Interruption::kEvicted: return 'e';
    case Interruption::kRequeued: return 'r';
    case Interruption::kCheckpointed: return 'c';
  }
  return 'e';
}

std::string encode_history(const JobRecord& job) {
  std::string out;
  for (const auto& e : job.history) {
    if (!out.empty()) out += ';';
    switch (e.kind) {
      case JobEvent::Kind::kDispatched: out += fmt::format("D{}@{}", e.resource.value, e.time); break;
      case JobEvent::Kind::kInterrupted: out += fmt::format("I{}@{}", reason_code(e.reason), e.time); break;
      case JobEvent::Kind::kCompleted: out += fmt::format("C@{}", e.time); break;
    }
  }
  return out;
}

std::vector<std::string> split_all(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

struct LineParser {
  const std::string& source;
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source, line, what); }

  double number(std::string_view s) const {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail(fmt::format("bad number '{}'", s));
    return v;
  }
  std::uint64_t count(std::string_view s) const {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail(fmt::format("bad integer '{}'", s));
    return v;
  }
};

}  // namespace

void write_result(std::ostream& out, const SimResult& result, const std::string& label,
                  std::uint64_t seed) {
  fmt::print(out, "{}\n", kResultMagic);
  fmt::print(out, "label,{}\nseed,{}\npolicy,{}\nhorizon_s,{}\nelapsed_s,{}\nevents,{}\n", label,
             seed, to_string(result.policy), result.horizon, result.elapsed, result.events);
  for (std::size_t i = 0; i < result.resource_names.size(); ++i) {
    if (result.grv.empty()) {
      fmt::print(out, "resource,{}\n", result.resource_names[i]);
    } else {
      const auto& g = result.grv[i];
      fmt::print(out, "resource,{},{},{},{},{}\n", result.resource_names[i], g.ra, g.js, g.ca,
                 g.uptime_anchor);
    }
  }
  for (const auto& j : result.jobs) {
    fmt::print(out, "job,{},{},{},{},{},{},{}\n", j.name, j.submit_time, j.work,
               j.required_class ? j.required_class->label : std::string(),
               j.runtime_estimate ? fmt::format("{}", *j.runtime_estimate) : std::string(),
               j.restarts, encode_history(j));
  }
}

StoredResult read_result(std::istream& in, const std::string& source) {
  StoredResult stored;
  SimResult& r = stored.result;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kResultMagic) {
    throw ParseError(source, 1, fmt::format("expected header '{}'", kResultMagic));
  }
  bool saw_policy = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const LineParser p{source, line_no};
    const auto f = split_all(line, ',');
    const std::string& key = f[0];
    auto need = [&](std::size_t n) {
      if (f.size() != n) p.fail(fmt::format("'{}' expects {} fields, found {}", key, n, f.size()));
    };
    if (key == "label") {
      need(2);
      stored.label = f[1];
    } else if (key == "seed") {
      need(2);
      stored.seed = p.count(f[1]);
    } else if (key == "policy") {
      need(2);
      try {
        r.policy = parse_policy_kind(f[1]);
      } catch (const std::invalid_argument& e) {
        p.fail(e.what());
      }
      saw_policy = true;
    } else if (key == "horizon_s") {
      need(2);
      r.horizon = p.number(f[1]);
    } else if (key == "elapsed_s") {
      need(2);
      r.elapsed = p.number(f[1]);
    } else if (key == "events") {
      need(2);
      r.events = p.count(f[1]);
    } else if (key == "resource") {
      if (f.size() == 2) {
        r.resource_names.push_back(f[1]);
      } else {
        need(6);
        r.resource_names.push_back(f[1]);
        r.grv.push_back(GrvState{p.number(f[2]), p.number(f[3]), p.number(f[4]), p.number(f[5])});
      }
    } else if (key == "job") {
      need(8);
      JobRecord j;
      j.id = JobId{static_cast<std::uint32_t>(r.jobs.size())};
      j.name = f[1];
      j.submit_time = p.number(f[2]);
      j.work = p.number(f[3]);
      if (!f[4].empty()) j.required_class = ResourceClass{f[4]};
      if (!f[5].empty()) j.runtime_estimate = p.number(f[5]);
      const auto restarts = p.count(f[6]);
      if (!f[7].empty()) {
        for (const auto& tok : split_all(f[7], ';')) {
          const auto at = tok.find('@');
          if (tok.empty() || at == std::string::npos) p.fail(fmt::format("bad history entry '{}'", tok));
          const double t = p.number(std::string_view(tok).substr(at + 1));
          try {
            if (tok[0] == 'D') {
              j.record_dispatch(ResourceId{static_cast<std::uint32_t>(p.count(std::string_view(tok).substr(1, at - 1)))}, t);
            } else if (tok[0] == 'I' && at == 2) {
              const char c = tok[1];
              const Interruption reason = c == 'c'   ? Interruption::kCheckpointed
                                          : c == 'r' ? Interruption::kRequeued
                                                     : Interruption::kEvicted;
              if (c != 'c' && c != 'r' && c != 'e') p.fail(fmt::format("bad interruption '{}'", tok));
              j.record_interruption(t, reason);
            } else if (tok[0] == 'C' && at == 1) {
              j.record_completion(t);
            } else {
              p.fail(fmt::format("bad history entry '{}'", tok));
            }
          } catch (const std::logic_error& e) {
            p.fail(e.what());
          }
        }
      }
      if (static_cast<std::uint64_t>(j.restarts) != restarts) p.fail("restart count disagrees with history");
      r.jobs.push_back(std::move(j));
    } else {
      p.fail(fmt::format("unknown record '{}'", key));
    }
  }
  if (!saw_policy) throw ParseError(source, 0, "missing policy line");
  if (!r.grv.empty() && r.grv.size() != r.resource_names.size()) {
    throw ParseError(source, 0, "vector entries missing for some resources");
  }
  return stored;
}

}  // namespace gridrank
