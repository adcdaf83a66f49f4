#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "llob/book_pde.hpp"
#include "llob/model.hpp"
#include "llob/price_solver.hpp"
#include "llob/schedule.hpp"

namespace llob {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string doc;
};

// Every recognised key with its default, in documentation order.
const std::vector<ConfigKey>& config_keys();

// Flat key=value settings. Unknown keys are rejected with ConfigError.
class Config {
 public:
  Config();

  // Lines of `key = value`; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text, std::string_view origin = "<text>");
  void set(std::string_view key, std::string_view value);
  void set_assignment(std::string_view assignment);  // "key=value"

  [[nodiscard]] bool is_set(std::string_view key) const;  // given explicitly
  [[nodiscard]] const std::string& text(std::string_view key) const;
  [[nodiscard]] double number(std::string_view key) const;
  [[nodiscard]] long integer(std::string_view key) const;
  [[nodiscard]] std::vector<double> numbers(std::string_view key) const;  // comma separated

  // Every key with its effective value, sorted by key.
  [[nodiscard]] const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::map<std::string, bool, std::less<>> explicit_;
};

double parse_number(std::string_view text, std::string_view what);

// "t0:t1:c0,c1,...;t0:t1:..." with m = sum c_j (t - t0)^j on each piece.
TradingSchedule parse_segments(std::string_view text);

ModelParams model_params(const Config& config);
SolverConfig solver_config(const Config& config);
PdeConfig pde_config(const Config& config);

}  // namespace llob
