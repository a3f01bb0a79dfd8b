#pragma once

#include "mpsawave/boundary.hpp"
#include "mpsawave/grid.hpp"
#include "mpsawave/linear_system.hpp"
#include "mpsawave/material.hpp"
#include "mpsawave/mpsa.hpp"
#include "mpsawave/types.hpp"

#include <functional>

namespace mpsaw {

struct NewmarkParams {
  double beta = 0.25;
  double gamma = 0.5;
  double dt = 0.0;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  }
  /// The scheme is used with 2 beta <= 1; other choices are accepted but
  /// callers may want to warn.
  bool outside_standard_range() const { return 2.0 * beta > 1.0; }
};

/// Cell displacement/velocity/acceleration plus the two-step boundary
/// displacement history the absorbing condition needs.
struct WaveState {
  double t = 0.0;
  long step = 0;
  VecX u, v, a;         ///< cells * D
  VecX bnd_u1, bnd_u2;  ///< boundary faces * D, at steps n-1 and n-2 of the next step
  /// Boundary data consistent with this state's time level; pair it with u
  /// when evaluating face tractions.
  VecX bnd_values;
};

/// Cell source evaluated at cell centers.
using SourceFn = std::function<Vec3(double t, const Vec3& x)>;

/// Everything a time step needs; all references must outlive the stepping.
struct StepContext {
  const Grid& grid;
  const StiffnessField& field;
  const StressOperators& ops;
  const BoundarySpec& bc;
  const AbcWeight& abc;
  const GlobalSystem& system;
  NewmarkParams params;
  SourceFn source;  ///< may be null (no body force)
};

/// State at n = 0 with both boundary history slots filled from the trace of
/// the initial data.
WaveState initialize(const StepContext& ctx, const VecX& u0, const VecX& v0, const VecX& a0,
                     double t0 = 0.0);

/// State at n = 0 with analytic boundary history: u(x_f, t0) and u(x_f, t0-dt).
WaveState initialize_analytic(const StepContext& ctx, const VecX& u0, const VecX& v0,
                              const VecX& a0, const std::function<Vec3(const Vec3&, double)>& u_exact,
                              double t0 = 0.0);

/// Advances one step: solves for u^n, updates velocity/acceleration, shifts
/// the boundary displacement history.
WaveState step(const WaveState& state, const StepContext& ctx);

/// Velocity and acceleration updates for the displacement-only form.
std::pair<VecX, VecX> update_kinematics(const VecX& u_prev, const VecX& v_prev, const VecX& a_prev,
                                        const VecX& u_new, const NewmarkParams& params);

}  // namespace mpsaw
