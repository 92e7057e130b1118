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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridrank/domain.hpp"

namespace gridrank {

/// Malformed input. `line()` is 1-based, 0 when no single line is to blame.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::size_t line_;
};

inline constexpr std::string_view kCatalogMagic = "# gridrank-catalog v1";
inline constexpr std::string_view kWorkloadMagic = "# gridrank-workload v1";

// Catalog files:
//   # gridrank-catalog v1
//   id,class,nflops,ncores,dedicated
//   linux-0000,INTEL/LINUX,2.4e+09,2,0
// Blank lines and further '#' lines are ignored. File order is catalog order.

[[nodiscard]] std::vector<ResourceRecord> read_catalog(std::istream& in,
                                                       const std::string& source = "<stream>");
[[nodiscard]] std::vector<ResourceRecord> load_catalog(const std::filesystem::path& path);
void write_catalog(std::ostream& out, std::span<const ResourceRecord> resources);
void save_catalog(const std::filesystem::path& path, std::span<const ResourceRecord> resources);

// Workload files:
//   # gridrank-workload v1
//   id,submit_time_s,work_flops,required_class,runtime_estimate_s
//   job-000000,0,5.76e+13,,
// Jobs come back sorted by submit time (stable), with ids renumbered to
// match. When `known_classes` is given, an unknown required_class is an
// error.

[[nodiscard]] std::vector<JobRecord> read_workload(
    std::istream& in, const std::string& source = "<stream>",
    std::optional<std::span<const ResourceClass>> known_classes = std::nullopt);
[[nodiscard]] std::vector<JobRecord> load_workload(
    const std::filesystem::path& path,
    std::optional<std::span<const ResourceClass>> known_classes = std::nullopt);
void write_workload(std::ostream& out, std::span<const JobRecord> jobs);
void save_workload(const std::filesystem::path& path, std::span<const JobRecord> jobs);

/// Distinct classes of a catalog in first-appearance order.
[[nodiscard]] std::vector<ResourceClass> classes_of(std::span<const ResourceRecord> resources);

// ---------------------------------------------------------------------------
// Synthetic generators

struct ClassSpec {
  std::string label;
  int count = 0;
  double nflops = 0;
  int ncores = 1;
  bool dedicated = false;
  /// Per-resource nflops drawn uniformly within +/- this fraction.
  double nflops_jitter = 0;
  std::string name_prefix;  // defaults to a slug of the label
};

struct CatalogSpec {
  std::vector<ClassSpec> classes;
};

/// Resources class by class, in spec order. Deterministic in `seed`.
[[nodiscard]] std::vector<ResourceRecord> generate_catalog(const CatalogSpec& spec,
                                                           std::uint64_t seed);

enum class ArrivalMode : std::uint8_t {
  kBatch,    // every job at t = 0
  kPoisson,  // independent arrivals
  kSweeps,   // Poisson-spaced sweeps of sweep_size jobs submitted together
};

struct WorkloadSpec {
  std::size_t jobs = 0;
  ArrivalMode arrival = ArrivalMode::kBatch;
  double mean_interarrival = 0;  // seconds, between jobs or between sweeps
  std::size_t sweep_size = 1;
  double work_median = 0;  // flop
  double work_sigma = 0;   // log-normal shape
  std::optional<ResourceClass> required_class;
};

void validate(const WorkloadSpec& spec);

/// Jobs sorted by submit time, ids 0..n-1. Deterministic in `seed`.
[[nodiscard]] std::vector<JobRecord> generate_workload(const WorkloadSpec& spec,
                                                       std::uint64_t seed);

}  // namespace gridrank
