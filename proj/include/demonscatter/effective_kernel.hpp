#pragma once

#include "demonscatter/coupled_solver.hpp"
#include "demonscatter/nonlocal_solver.hpp"

namespace demonscatter {

struct BranchedWavenumber {
  cplx q;
  cplx mu;
};

/// mu = (2 delta + i gamma) / (2E)
cplx compute_mu(double delta, double gamma, double E);

/// q = sqrt(2E) (1 + mu)^{1/2} on the branch with Im q >= 0.
BranchedWavenumber compute_q(double E, cplx mu);

/// Effective ground-state kernel after eliminating the excited state,
///   V(x, y) = exp(i q |x - y|) / (4 i q) * Omega(x) conj(Omega(y)).
NonlocalKernel build_kernel(const OpticalParameters& params, const Grid& grid);

/// Rebuilds a kernel that carries a descriptor on another grid or energy.
NonlocalKernel regenerate(const NonlocalKernel& kernel, const Grid& grid);
NonlocalKernel regenerate(const NonlocalKernel& kernel, double energy);

/// Numerical Feshbach projection of a two-channel model onto channel i0:
///   V = V_00 delta(x - y) + V_01(x) G_1(x, y) V_10(y),
/// with G_1 the outgoing Green's function of the eliminated channel built from
/// its left/right outgoing solutions and their Wronskian.
NonlocalKernel feshbach_reference(const LocalPotentialModel& model, double E, std::size_t i0);

}  // namespace demonscatter
