#include <algorithm>

#include "ising/kernels.hpp"

namespace ising::kernels {

std::size_t CompiledModel::free_count() const {
  return static_cast<std::size_t>(std::count(pin.begin(), pin.end(), 0));
}

CompiledModel compile(const Region& region, const BoundaryCondition& bc, const ModelParams& params) {
  bc.validate(region);
  CompiledModel m;
  m.side = region.side();
  m.J = params.J;
  m.beta = params.beta;
  m.linear = params.field.on(region);
  m.pin.assign(region.size(), 0);
  for (std::size_t k = 0; k < region.size(); ++k) {
    Site s = region.site(k);
    for (Site d : kNeighborOffsets) {
      Site nb = s + d;
      if (!region.contains(nb)) m.linear[k] += params.J * bc.spin_at(nb);
    }
  }
  for (const auto& [s, v] : bc.interior_pins(region)) m.pin[region.index(s)] = static_cast<std::int8_t>(v);
  return m;
}

double energy_of_bits(const CompiledModel& m, std::uint64_t bits) {
  const int L = m.side;
  auto spin = [&](int k) { return ((bits >> k) & 1U) ? 1.0 : -1.0; };
  double bonds = 0.0;
  double field = 0.0;
  for (int r = 0; r < L; ++r) {
    for (int c = 0; c < L; ++c) {
      int k = r * L + c;
      if (c + 1 < L) bonds += spin(k) * spin(k + 1);
      if (r + 1 < L) bonds += spin(k) * spin(k + L);
      field += m.linear[k] * spin(k);
    }
  }
  return -m.J * bonds - field;
}

}  // namespace ising::kernels
