#pragma once

// Deterministic invariant suites over a configured model. Every suite reports
// pass | fail | skip together with its residuals.

#include <cstdint>
#include <string>
#include <vector>

#include "singext/config.hpp"

namespace singext {

struct SuiteResult {
  std::string name;
  std::string status;  // pass | fail | skip
  std::string note;
  nlohmann::json metrics = nlohmann::json::object();
};

struct VerifyOutcome {
  nlohmann::json report;
  bool passed = true;
  std::vector<SuiteResult> suites;
};

// Header shared by all reports: schema, command, config hash, N, seed.
nlohmann::json report_header(const ModelConfig& cfg, const std::string& command, std::size_t n,
                             std::uint64_t seed);

VerifyOutcome run_verify(const ModelConfig& cfg, std::uint64_t seed);

// Random inputs used by the suites (finitely supported regular parts).
ModelVector random_model_vector(const SingularFamily& fam, Rng& rng, int support = 40);
DomainElementA random_domain_element(const SingularFamily& fam, Rng& rng, int support = 40);

}  // namespace singext
