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

#include "gridrank/traces.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string_view>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gridrank/rng.hpp"

namespace gridrank {

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", source, line, what)
                                  : fmt::format("{}: {}", source, what)),
      source_(std::move(source)),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Reads the magic line and the column header; returns data lines with their
// 1-based line numbers.
class TableReader {
 public:
  TableReader(std::istream& in, std::string source, std::string_view magic,
              std::string_view columns)
      : in_(in), source_(std::move(source)) {
    std::string line;
    if (!std::getline(in_, line) || trim(line) != magic) {
      throw ParseError(source_, 1, fmt::format("expected header '{}'", magic));
    }
    line_no_ = 1;
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      if (t != columns) throw ParseError(source_, line_no_, fmt::format("expected columns '{}'", columns));
      return;
    }
    throw ParseError(source_, line_no_, fmt::format("missing column line '{}'", columns));
  }

  bool next(std::vector<std::string_view>& fields, std::size_t expected) {
    while (std::getline(in_, current_)) {
      ++line_no_;
      const auto t = trim(current_);
      if (t.empty() || t.front() == '#') continue;
      fields = split(t);
      if (fields.size() != expected) {
        fail(fmt::format("expected {} fields, found {}", expected, fields.size()));
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  double number(std::string_view field, std::string_view name) const {
    double v = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || p != field.data() + field.size() || !std::isfinite(v)) {
      fail(fmt::format("{}: '{}' is not a number", name, field));
    }
    return v;
  }

  long long integer(std::string_view field, std::string_view name) const {
    long long v = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || p != field.data() + field.size()) {
      fail(fmt::format("{}: '{}' is not an integer", name, field));
    }
    return v;
  }

  std::size_t line() const { return line_no_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::string current_;
  std::size_t line_no_ = 0;
};

constexpr std::string_view kCatalogColumns = "id,class,nflops,ncores,dedicated";
constexpr std::string_view kWorkloadColumns =
    "id,submit_time_s,work_flops,required_class,runtime_estimate_s";

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
  return out;
}

}  // namespace

std::vector<ResourceRecord> read_catalog(std::istream& in, const std::string& source) {
  TableReader reader(in, source, kCatalogMagic, kCatalogColumns);
  std::vector<ResourceRecord> out;
  std::unordered_set<std::string> names;
  std::vector<std::string_view> f;
  while (reader.next(f, 5)) {
    ResourceRecord r;
    r.id = ResourceId{static_cast<std::uint32_t>(out.size())};
    r.name = std::string(f[0]);
    if (r.name.empty()) reader.fail("id is empty");
    if (!names.insert(r.name).second) reader.fail(fmt::format("duplicate id '{}'", r.name));
    r.resource_class = ResourceClass{std::string(f[1])};
    if (f[1].empty()) reader.fail("class is empty");
    r.nflops = reader.number(f[2], "nflops");
    if (!(r.nflops > 0)) reader.fail(fmt::format("nflops must be > 0, got {}", f[2]));
    const long long cores = reader.integer(f[3], "ncores");
    if (cores < 1 || cores > 1'000'000) reader.fail(fmt::format("ncores must be >= 1, got {}", f[3]));
    r.ncores = static_cast<int>(cores);
    if (f[4] != "0" && f[4] != "1") reader.fail("dedicated must be 0 or 1");
    r.dedicated = f[4] == "1";
    out.push_back(std::move(r));
  }
  if (auto v = validate_catalog(out); !v.empty()) {
    throw ParseError(source, 0, fmt::format("resource {}: {}: {}", v[0].resource, v[0].field, v[0].message));
  }
  return out;
}

std::vector<ResourceRecord> load_catalog(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_catalog(in, path.string());
}

void write_catalog(std::ostream& out, std::span<const ResourceRecord> resources) {
  fmt::print(out, "{}\n{}\n", kCatalogMagic, kCatalogColumns);
  for (const auto& r : resources) {
    fmt::print(out, "{},{},{},{},{}\n", r.name, r.resource_class.label, r.nflops, r.ncores,
               r.dedicated ? 1 : 0);
  }
}

void save_catalog(const std::filesystem::path& path, std::span<const ResourceRecord> resources) {
  auto out = open_out(path);
  write_catalog(out, resources);
}

std::vector<JobRecord> read_workload(std::istream& in, const std::string& source,
                                     std::optional<std::span<const ResourceClass>> known_classes) {
  TableReader reader(in, source, kWorkloadMagic, kWorkloadColumns);
  std::vector<JobRecord> out;
  std::unordered_set<std::string> names;
  std::vector<std::string_view> f;
  while (reader.next(f, 5)) {
    JobRecord j;
    j.name = std::string(f[0]);
    if (j.name.empty()) reader.fail("id is empty");
    if (!names.insert(j.name).second) reader.fail(fmt::format("duplicate job id '{}'", j.name));
    j.submit_time = reader.number(f[1], "submit_time_s");
    if (j.submit_time < 0) reader.fail("submit_time_s must be >= 0");
    j.work = reader.number(f[2], "work_flops");
    if (!(j.work > 0)) reader.fail("work_flops must be > 0");
    if (!f[3].empty()) {
      ResourceClass c{std::string(f[3])};
      if (known_classes && std::ranges::find(*known_classes, c) == known_classes->end()) {
        reader.fail(fmt::format("unknown required_class '{}'", c.label));
      }
      j.required_class = std::move(c);
    }
    if (!f[4].empty()) {
      const double est = reader.number(f[4], "runtime_estimate_s");
      if (!(est > 0)) reader.fail("runtime_estimate_s must be > 0");
      j.runtime_estimate = est;
    }
    out.push_back(std::move(j));
  }
  std::ranges::stable_sort(out, {}, &JobRecord::submit_time);
  for (std::uint32_t i = 0; i < out.size(); ++i) out[i].id = JobId{i};
  return out;
}

std::vector<JobRecord> load_workload(const std::filesystem::path& path,
                                     std::optional<std::span<const ResourceClass>> known_classes) {
  auto in = open_in(path);
  return read_workload(in, path.string(), known_classes);
}

void write_workload(std::ostream& out, std::span<const JobRecord> jobs) {
  fmt::print(out, "{}\n{}\n", kWorkloadMagic, kWorkloadColumns);
  for (const auto& j : jobs) {
    fmt::print(out, "{},{},{},{},{}\n", j.name, j.submit_time, j.work,
               j.required_class ? j.required_class->label : std::string(),
               j.runtime_estimate ? fmt::format("{}", *j.runtime_estimate) : std::string());
  }
}

void save_workload(const std::filesystem::path& path, std::span<const JobRecord> jobs) {
  auto out = open_out(path);
  write_workload(out, jobs);
}

std::vector<ResourceClass> classes_of(std::span<const ResourceRecord> resources) {
  std::vector<ResourceClass> out;
  for (const auto& r : resources) {
    if (std::ranges::find(out, r.resource_class) == out.end()) out.push_back(r.resource_class);
  }
  return out;
}

namespace {

constexpr std::uint64_t kCatalogStream = 0xCA7u;
constexpr std::uint64_t kWorkloadStream = 0x3077u;

std::string slug(std::string_view label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "res" : out;
}

}  // namespace

std::vector<ResourceRecord> generate_catalog(const CatalogSpec& spec, std::uint64_t seed) {
  std::vector<ResourceRecord> out;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const ClassSpec& cls = spec.classes[c];
    if (cls.label.empty()) throw std::invalid_argument("catalog class with empty label");
    if (cls.count < 0 || !(cls.nflops > 0) || cls.ncores < 1 || cls.nflops_jitter < 0 ||
        cls.nflops_jitter >= 1) {
      throw std::invalid_argument(fmt::format("catalog class '{}' has invalid parameters", cls.label));
    }
    auto rng = make_rng(seed, kCatalogStream, c);
    std::uniform_real_distribution<double> jitter(-cls.nflops_jitter, cls.nflops_jitter);
    const std::string prefix = cls.name_prefix.empty() ? slug(cls.label) : cls.name_prefix;
    for (int i = 0; i < cls.count; ++i) {
      ResourceRecord r;
      r.id = ResourceId{static_cast<std::uint32_t>(out.size())};
      r.name = fmt::format("{}-{:04d}", prefix, i);
      r.resource_class = ResourceClass{cls.label};
      // Rounded to whole Mflop/s so the catalog file stays readable.
      const double raw = cls.nflops * (1.0 + (cls.nflops_jitter > 0 ? jitter(rng) : 0.0));
      r.nflops = std::round(raw / 1e6) * 1e6;
      r.ncores = cls.ncores;
      r.dedicated = cls.dedicated;
      out.push_back(std::move(r));
    }
  }
  if (auto v = validate_catalog(out); !v.empty()) {
    throw std::invalid_argument(fmt::format("generated catalog invalid: {} {}", v[0].resource, v[0].message));
  }
  return out;
}

void validate(const WorkloadSpec& spec) {
  if (spec.jobs > 0 && !(spec.work_median > 0)) throw std::invalid_argument("work median must be > 0");
  if (!(spec.work_sigma >= 0)) throw std::invalid_argument("work sigma must be >= 0");
  if (spec.arrival != ArrivalMode::kBatch && !(spec.mean_interarrival > 0)) {
    throw std::invalid_argument("mean interarrival must be > 0 for spread arrivals");
  }
  if (spec.arrival == ArrivalMode::kSweeps && spec.sweep_size < 1) {
    throw std::invalid_argument("sweep size must be >= 1");
  }
}

std::vector<JobRecord> generate_workload(const WorkloadSpec& spec, std::uint64_t seed) {
  validate(spec);
  auto rng = make_rng(seed, kWorkloadStream);
  std::lognormal_distribution<double> work(std::log(spec.work_median > 0 ? spec.work_median : 1.0),
                                           spec.work_sigma);
  std::exponential_distribution<double> gap(spec.mean_interarrival > 0 ? 1.0 / spec.mean_interarrival : 1.0);

  std::vector<JobRecord> out;
  out.reserve(spec.jobs);
  SimTime t = 0;
  for (std::size_t i = 0; i < spec.jobs; ++i) {
    switch (spec.arrival) {
      case ArrivalMode::kBatch: break;
      case ArrivalMode::kPoisson: t += gap(rng); break;
      case ArrivalMode::kSweeps:
        if (i % spec.sweep_size == 0 && i > 0) t += gap(rng);
        break;
    }
    JobRecord j;
    j.id = JobId{static_cast<std::uint32_t>(i)};
    j.name = fmt::format("job-{:06d}", i);
    j.submit_time = t;
    j.work = spec.work_sigma > 0 ? work(rng) : spec.work_median;
    j.required_class = spec.required_class;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace gridrank
