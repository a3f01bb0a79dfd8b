#pragma once

#include "mpsawave/analytic.hpp"
#include "mpsawave/grid.hpp"
#include "mpsawave/material.hpp"
#include "mpsawave/types.hpp"

namespace mpsaw {

/// ( sum_K m_K |u_K|^2 )^{1/2}
double cell_l2_norm(const Grid& grid, const VecX& cell_field);

/// Face norm with weights (1/D) m_f (d_L - d_R) . n_f, where d_L, d_R point
/// from the face center to the two cell centers (one is zero on the
/// boundary). Takes face-averaged tractions.
double face_l2_norm(const Grid& grid, const VecX& face_field);

struct RelativeErrors {
  double displacement = 0.0;
  double traction = 0.0;
};

/// Relative errors of cell displacements and face tractions against the
/// point-projected exact solution at time t. `tractions` holds integrated
/// (measure-weighted) face tractions as produced by face_tractions().
RelativeErrors relative_errors(const Grid& grid, const StiffnessField& field, const VecX& u_cells,
                               const VecX& tractions, const AnalyticSolution& exact, double t);

/// E = sum_K m_K rho_K |v_K|^2 (kinetic measure used by the decay studies).
double system_energy(const Grid& grid, const StiffnessField& field, const VecX& velocity);

}  // namespace mpsaw
