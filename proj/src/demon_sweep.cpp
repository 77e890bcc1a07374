#include "demonscatter/demon.hpp"
#include "demonscatter/effective_kernel.hpp"
#include "demonscatter/errors.hpp"
#include "demonscatter/parallel.hpp"

namespace demonscatter {

namespace {
void check_velocities(const std::vector<double>& velocities) {
  for (double v : velocities)
    if (!(v > 0)) throw Error(ErrorCode::InvalidRange, "sweep velocities must be positive");
}
}  // namespace

std::vector<DemonReport> sweep_demon(const LocalPotentialModel& model, const std::vector<double>& velocities,
                                     std::size_t i0) {
  check_velocities(velocities);
  std::vector<DemonReport> out(velocities.size());
  parallel_for(velocities.size(), [&](std::size_t i) {
    const ScatterSolution sol = solve_local(model, velocity_to_energy(velocities[i]));
    out[i] = make_report(extract_channel(sol.S, i0), velocities[i]);
  });
  return out;
}

std::vector<DemonReport> sweep_demon(const NonlocalKernel& kernel, const std::vector<double>& velocities) {
  check_velocities(velocities);
  std::vector<DemonReport> out(velocities.size());
  parallel_for(velocities.size(), [&](std::size_t i) {
    const double v = velocities[i];
    const ChannelAmplitudes a = kernel.descriptor ? solve_nonlocal(regenerate(kernel, velocity_to_energy(v)), v)
                                                  : solve_nonlocal(kernel, v);
    out[i] = make_report(a, v);
  });
  return out;
}

}  // namespace demonscatter
