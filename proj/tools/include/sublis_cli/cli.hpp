#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sublis/instances.hpp"
#include "sublis/reslis.hpp"

namespace sublis::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kViolation = 3 };

struct RunConfig {
  std::string name;
  InstanceSpec spec;
  double lambda = 0.125;
  double epsilon = 0.25;
  unsigned beta = 0;
  std::size_t trials = 1;
  bool exact = true;
  EstimatorParams params{};
};

// A JSON object whose fields may be scalars or arrays; arrays expand as a cartesian product.
// Also accepts an array of such objects.
std::vector<RunConfig> parse_bench_config(const std::string& json_text);

struct Row {
  std::string config;
  std::string family;
  std::size_t n = 0;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  EstimateReport report;
};

std::string csv_header();
std::string csv_row(const Row& row, bool timing = true);

std::vector<Row> run_bench(const std::vector<RunConfig>& configs, unsigned jobs);
// `#` lines: per config mean estimate, mean and p95 reads and tests, violation count.
std::string bench_summary(const std::vector<Row>& rows);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sublis::cli
