#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace scalenet {

enum class Scale { kTiny = 0, kSmall = 1, kMedium = 2 };

Scale parse_scale(const std::string& name);
std::string to_string(Scale scale);

enum class Outcome { kPass, kFail, kSkip };

struct PropertyReport {
  std::string id;
  std::string instance;  // replay config, seed included
  Outcome outcome = Outcome::kSkip;
  std::string detail;    // counterexample on failure
};

struct SuiteOptions {
  Scale scale = Scale::kTiny;
  std::uint64_t seed = 42;
  /// Rel factor used when the suite builds forests; lets tests inject a mutant.
  double rel_factor = 14.0;
};

struct Property {
  std::string id;       // "<module>.<name>"
  Scale min_scale;      // skipped below this scale
  std::function<PropertyReport(const SuiteOptions&)> run;
};

/// Every module invariant, once each.
const std::vector<Property>& property_registry();

std::vector<PropertyReport> run_suite(const SuiteOptions& options);
/// Runs only the properties whose id starts with `prefix`.
std::vector<PropertyReport> run_suite(const SuiteOptions& options, const std::string& prefix);

std::size_t failure_count(const std::vector<PropertyReport>& reports);
void write_reports_tsv(std::ostream& out, const std::vector<PropertyReport>& reports);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Largest c such that P(Binomial(trials, p) < c) <= alpha.
int binomial_lower_band(int trials, double p, double alpha);

}  // namespace scalenet
