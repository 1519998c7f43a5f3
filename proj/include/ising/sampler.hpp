#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ising/gibbs.hpp"

namespace ising {

enum class StartState { hot, cold };

struct ChainConfig {
  std::int64_t sweeps = 2000;
  std::int64_t burn_in = 500;
  int chains = 8;
  std::uint64_t seed = 1;
  int thinning = 1;
  // hot: uniformly random interior; cold: interior aligned with the
  // majority boundary spin.
  StartState start = StartState::hot;

  void validate() const;
};

// Counter-based generator: a uniform double in [0, 1) determined entirely by
// (seed, chain, sweep, site).
double counter_uniform(std::uint64_t seed, std::uint64_t chain, std::uint64_t sweep, std::uint64_t site);
inline constexpr const char* kGeneratorName = "splitmix64-counter";

// Energy change of flipping site i in `config`: 2 s_i (J sum_nb s_j + h_i).
double flip_energy_change(const SpinConfiguration& config, const ModelParams& params, Site i);

// Metropolis acceptance probability min(1, exp(-beta dE)).
double acceptance_probability(double beta, double energy_change);

struct SampledEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> chain_means;
  std::string generator = kGeneratorName;
};

// Optional per-chain trace of (sweep, box-averaged magnetization), burn-in
// included.
struct TraceRow {
  std::string boundary;
  int chain = 0;
  std::int64_t sweep = 0;
  double magnetization = 0.0;
};

SampledEstimate sample_magnetization(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                                     const ChainConfig& config, Site i, std::vector<TraceRow>* trace = nullptr);

struct SampledGap {
  double gap = 0.0;
  double std_error = 0.0;
  SampledEstimate plus;
  SampledEstimate minus;
};

SampledGap sample_gap(const Region& region, const ModelParams& params, const ChainConfig& config, Site i,
                      std::vector<TraceRow>* trace = nullptr);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace ising
