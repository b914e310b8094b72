#pragma once

// Verification suites: each runs a group of numerical checks of the theory
// against the implementation and reports pass/fail per check.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "invms/exponent.hpp"

namespace invms {

/// Three parameter settings per catalog family.
std::vector<ExponentFamily> catalog_settings();
/// One representative setting per catalog family.
std::vector<ExponentFamily> catalog_representatives();

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  bool pass = false;
  std::vector<CheckResult> checks;
};

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  // sampler suite
  std::size_t sampler_reps = 100;
  std::size_t sampler_n = 1000;  // pooled joint check uses reps * n draws
  // quantile study suite
  std::size_t study_reps = 100;
  std::size_t study_n = 1000;
  double study_threshold = 0.935;
};

/// moment, eta, lemma1, convergence, variation, sampler, fig2
std::vector<std::string> suite_names();

/// DomainError for an unknown suite name.
SuiteResult run_suite(std::string_view name, const VerifyOptions& opts = {});

std::string suites_to_json(const std::vector<SuiteResult>& suites);

}  // namespace invms
