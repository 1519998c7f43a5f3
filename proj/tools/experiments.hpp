#pragma once

// The experiment commands behind the `ising` executable. Each returns a
// report; printing and exit codes live in cli.cpp.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ising/gibbs.hpp"
#include "ising/sampler.hpp"

namespace ising::experiments {

inline constexpr const char* kVersion = "0.1.0";

struct Report {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::ordered_json>> rows;
  // Derived flags and norms, e.g. the regime and whether the trend matches.
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> failures;
  double wall_seconds = 0.0;

  bool passed() const { return failures.empty(); }
  // Cell (row, column name).
  const nlohmann::ordered_json& at(std::size_t row, const std::string& column) const;
};

void write_table(const Report& r, std::ostream& out);
// Metadata goes into '#' lines; the wall-clock line is the only one that
// changes between runs.
void write_csv(const Report& r, std::ostream& out);
nlohmann::ordered_json to_json(const Report& r);

enum class Regime { summable, liminf_positive, neither };
std::string to_string(Regime r);
Regime classify(const ModelParams& params);

struct ExactGapOptions {
  int box_min = 4;
  int box_max = 12;
  double beta = 1.0;
  double J = 1.0;
  std::string field = "uniform:h=0";
  std::optional<Site> site;
  Method method = Method::transfer;
};
Report exact_gap(const ExactGapOptions& o);

struct ContourVerifyOptions {
  int box = 3;
  std::vector<double> betas{0.5};
  double J = 1.0;
  std::string field = "uniform:h=0";
  std::string dump_path;
};
Report contour_verify(const ContourVerifyOptions& o);

struct PeierlsOptions {
  std::vector<double> betas{1.5, 2.0, 3.0};
  double J = 1.0;
  std::string field = "uniform:h=0";
  int box = 4;
  std::optional<Site> site;
  Method method = Method::transfer;
};
Report peierls(const PeierlsOptions& o);

struct CorollaryOptions {
  int zero_window = 3;
  ExactGapOptions gap;
};
Report corollary(const CorollaryOptions& o);

struct McGapOptions {
  int box = 16;
  double beta = 1.0;
  double J = 1.0;
  std::string field = "uniform:h=0";
  std::optional<Site> site;
  ChainConfig chains;
  // Optional exact transfer gap on a nested smaller box for comparison.
  std::optional<int> reference_box;
  std::string trace_path;
};
Report mc_gap(const McGapOptions& o);

}  // namespace ising::experiments
