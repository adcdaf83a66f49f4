#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "llob/config.hpp"
#include "llob/csv.hpp"

namespace llob {

std::string_view version() noexcept;

struct ExperimentResult {
  std::string name;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, CsvTable>> tables;        // file stem, table
  std::vector<std::pair<std::string, std::string>> documents;  // file name, contents
  std::vector<std::pair<std::string, std::string>> config;     // effective settings
  double runtime_seconds = 0.0;
  std::optional<std::string> breach;  // set when a model invariant failed

  [[nodiscard]] double scalar(std::string_view key) const;
};

const std::vector<std::string>& experiment_names();

// Runs a named experiment; UnknownExperiment for anything else.
ExperimentResult run(std::string_view name, const Config& config, unsigned jobs = 1);

// Writes <stem>.csv for every table, the extra documents and
// <name>_manifest.json. Returns the paths written.
std::vector<std::filesystem::path> emit(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace llob
