#include "ising/sampler.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "ising/error.hpp"
#include "ising/kernels.hpp"

namespace ising {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int start_spin(const Region& region, const BoundaryCondition& bc) {
  int total = 0;
  for (Site s : region.boundary()) total += bc.spin_at(s);
  return total >= 0 ? 1 : -1;
}

struct ChainResult {
  double mean = 0.0;
  std::vector<TraceRow> trace;
};

ChainResult run_chain(const Region& region, const BoundaryCondition& bc, const kernels::CompiledModel& model,
                      const ChainConfig& cfg, std::size_t site, std::uint64_t chain_id, int chain_label,
                      bool want_trace) {
  const int L = model.side;
  const std::size_t n = model.size();
  std::vector<std::int8_t> spin(n);
  const int cold = start_spin(region, bc);
  for (std::size_t k = 0; k < n; ++k) {
    if (model.pin[k] != 0) {
      spin[k] = model.pin[k];
    } else if (cfg.start == StartState::cold) {
      spin[k] = static_cast<std::int8_t>(cold);
    } else {
      // Sweep index 0 is reserved for initialization; updates use 1..sweeps.
      spin[k] = counter_uniform(cfg.seed, chain_id, 0, k) < 0.5 ? 1 : -1;
    }
  }

  ChainResult out;
  double sum = 0.0;
  std::int64_t samples = 0;
  for (std::int64_t sweep = 1; sweep <= cfg.sweeps; ++sweep) {
    for (int r = 0; r < L; ++r) {
      for (int c = 0; c < L; ++c) {
        const std::size_t k = static_cast<std::size_t>(r) * L + c;
        if (model.pin[k] != 0) continue;
        int nb = 0;
        if (c > 0) nb += spin[k - 1];
        if (c + 1 < L) nb += spin[k + 1];
        if (r > 0) nb += spin[k - L];
        if (r + 1 < L) nb += spin[k + L];
        const double dE = 2.0 * spin[k] * (model.linear[k] + model.J * nb);
        const double u = counter_uniform(cfg.seed, chain_id, static_cast<std::uint64_t>(sweep), k);
        if (u < acceptance_probability(model.beta, dE)) spin[k] = static_cast<std::int8_t>(-spin[k]);
      }
    }
    if (sweep > cfg.burn_in && (sweep - cfg.burn_in) % cfg.thinning == 0) {
      sum += spin[site];
      ++samples;
    }
    // Traces include burn-in so equilibration is visible.
    if (want_trace) {
      double m = 0.0;
      for (auto s : spin) m += s;
      out.trace.push_back({"", chain_label, sweep, m / static_cast<double>(n)});
    }
  }
  out.mean = samples > 0 ? sum / static_cast<double>(samples) : 0.0;
  return out;
}

SampledEstimate run(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                    const ChainConfig& cfg, Site i, std::uint64_t chain_offset, std::vector<TraceRow>* trace) {
  cfg.validate();
  if (!region.contains(i)) throw DomainError("site " + to_string(i) + " is outside the box");
  const kernels::CompiledModel model = kernels::compile(region, bc, params);
  const std::size_t site = region.index(i);

  std::vector<ChainResult> results(cfg.chains);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < cfg.chains; ++c)
    results[c] = run_chain(region, bc, model, cfg, site, chain_offset + c, c, trace != nullptr);
  const std::string label = bc.describe();

  SampledEstimate est;
  double total = 0.0;
  for (const auto& r : results) {
    est.chain_means.push_back(r.mean);
    total += r.mean;
    if (trace)
      for (auto row : r.trace) {
        row.boundary = label;
        trace->push_back(std::move(row));
      }
  }
  const double C = cfg.chains;
  est.mean = total / C;
  double ss = 0.0;
  for (double m : est.chain_means) ss += (m - est.mean) * (m - est.mean);
  est.std_error = std::sqrt(ss / (C - 1.0) / C);
  return est;
}

}  // namespace

void ChainConfig::validate() const {
  if (sweeps < 1) throw DomainError("sweeps must be positive");
  if (burn_in < 1 || burn_in >= sweeps) throw DomainError("burn-in must be positive and below the number of sweeps");
  if (chains < 2) throw DomainError("at least two chains are needed for an error estimate");
  if (thinning < 1) throw DomainError("thinning must be positive");
}

double counter_uniform(std::uint64_t seed, std::uint64_t chain, std::uint64_t sweep, std::uint64_t site) {
  std::uint64_t z = splitmix64(seed);
  z = splitmix64(z ^ (chain * 0xd1b54a32d192ed03ULL));
  z = splitmix64(z ^ (sweep * 0x8cb92ba72f3d8dd7ULL));
  z = splitmix64(z ^ site);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double flip_energy_change(const SpinConfiguration& config, const ModelParams& params, Site i) {
  if (!config.region().contains(i)) throw DomainError("site " + to_string(i) + " is outside the box");
  double nb = 0.0;
  for (Site d : kNeighborOffsets) nb += config.spin(i + d);
  return 2.0 * config.spin(i) * (params.J * nb + params.field.at(i));
}

double acceptance_probability(double beta, double energy_change) {
  return energy_change <= 0.0 ? 1.0 : std::exp(-beta * energy_change);
}

SampledEstimate sample_magnetization(const Region& region, const BoundaryCondition& bc, const ModelParams& params,
                                     const ChainConfig& config, Site i, std::vector<TraceRow>* trace) {
  return run(region, bc, params, config, i, 0, trace);
}

SampledGap sample_gap(const Region& region, const ModelParams& params, const ChainConfig& config, Site i,
                      std::vector<TraceRow>* trace) {
  SampledGap g;
  g.plus = run(region, BoundaryCondition::plus(), params, config, i, 0, trace);
  // Disjoint chain streams for the minus run.
  g.minus = run(region, BoundaryCondition::minus(), params, config, i, 1ULL << 32, trace);
  g.gap = g.plus.mean - g.minus.mean;
  g.std_error = std::hypot(g.plus.std_error, g.minus.std_error);
  return g;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace file " + path);
  out << "boundary,chain,sweep,magnetization\n";
  out.precision(17);
  for (const auto& row : trace)
    out << row.boundary << ',' << row.chain << ',' << row.sweep << ',' << row.magnetization << '\n';
}

}  // namespace ising
