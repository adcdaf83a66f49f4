#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "llob/error.hpp"
#include "llob/experiments.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNonConvergence = 3;
constexpr int kInvariantBreach = 4;

int exit_code(llob::ErrorCode code) {
  using llob::ErrorCode;
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownExperiment:
    case ErrorCode::NonPositiveParameter:
    case ErrorCode::InconsistentCurrent:
    case ErrorCode::InvalidDistribution:
    case ErrorCode::InvalidSchedule:
    case ErrorCode::ParameterOutOfRange:
    case ErrorCode::SignChange:
    case ErrorCode::IoError:
      return kConfigError;
    case ErrorCode::InvariantBreach:
      return kInvariantBreach;
    default:
      return kNonConvergence;
  }
}

std::string key_help() {
  std::string s = "Config keys (key = default: meaning):\n";
  for (const auto& k : llob::config_keys())
    s += "  " + k.name + " = " + (k.default_value.empty() ? "<unset>" : k.default_value) + ": " + k.doc + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent order book impact experiments"};
  app.footer(key_help());
  app.set_version_flag("--version", std::string(llob::version()));

  std::string experiment;
  std::string config_file;
  std::string out_dir = ".";
  std::optional<long> seed;
  unsigned jobs = 1;
  std::vector<std::string> assignments;

  std::string names;
  for (const auto& n : llob::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "One of: " + names)->required();
  app.add_option("--config", config_file, "Flat key=value config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Random seed (overrides the seed key)");
  app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--set", assignments, "key=value override, repeatable");
  // audit conveniences mapping onto config keys
  std::optional<long> trials, segments_max;
  app.add_option("--trials", trials, "manipulate: number of random closed schedules");
  app.add_option("--segments-max", segments_max, "manipulate: most pieces per schedule");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    llob::Config config;
    if (!config_file.empty()) config.load_file(config_file);
    for (const auto& a : assignments) config.set_assignment(a);
    if (seed) config.set("seed", std::to_string(*seed));
    if (trials) config.set("manipulate.trials", std::to_string(*trials));
    if (segments_max) config.set("manipulate.segments_max", std::to_string(*segments_max));

    const auto result = llob::run(experiment, config, jobs);
    for (const auto& path : llob::emit(result, out_dir)) std::cout << path.string() << '\n';
    for (const auto& [k, v] : result.scalars) std::cout << k << " = " << v << '\n';
    if (result.breach) {
      std::cerr << "invariant breach: " << *result.breach << '\n';
      return kInvariantBreach;
    }
    return kOk;
  } catch (const llob::Error& e) {
    std::cerr << "error [" << llob::to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  }
}
