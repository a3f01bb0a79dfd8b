#pragma once

#include "mpsawave/boundary.hpp"
#include "mpsawave/grid.hpp"
#include "mpsawave/material.hpp"
#include "mpsawave/types.hpp"

#include <vector>

namespace mpsaw {

/// Minimal compressed-sparse-row matrix. Rows keep their columns sorted.
struct SparseOp {
  int rows = 0;
  int cols = 0;
  std::vector<std::size_t> outer;  ///< size rows+1
  std::vector<int> inner;
  std::vector<double> vals;

  VecX apply(const VecX& x) const;
  /// Dense copy of one row (for tests and small diagnostics).
  VecX row(int r) const;
  std::size_t nnz() const { return vals.size(); }
};

struct MpsaOptions {
  /// Fraction from the face center toward the vertex at which displacement
  /// continuity is imposed on interior subfaces. Boundary subfaces use the
  /// face center so that per-face boundary data is reproduced exactly.
  double eta = 1.0 / 3.0;
  /// Relative pivot tolerance classifying a local system as singular.
  double pivot_rel_tol = 1e-12;
  /// Scale of the divergence-free flux augmentation alpha (tr(G) I - G^T)
  /// used in the conservative flux, relative to the mean shear modulus.
  /// The augmentation leaves the continuum balance and any piecewise-linear
  /// interface field untouched but frees the local systems from the
  /// symmetric-gradient rigidity that otherwise limits simplex grids to
  /// first order.
  double gauge_scale = 1.0;
};

/// Sparse maps from cell displacements and boundary data to integrated face
/// tractions (oriented with the stored face normal) and to boundary
/// displacement traces at face centers. `stress`/`bound_stress` report the
/// physical tractions; `stress_cons`/`bound_stress_cons` carry the augmented
/// conservative flux that the global balance operator divergences. The two
/// coincide in the continuum limit and for rigid-body fields.
struct StressOperators {
  int dim = 0;
  SparseOp stress;             ///< (faces*D) x (cells*D)
  SparseOp bound_stress;       ///< (faces*D) x (boundary faces*D)
  SparseOp stress_cons;        ///< same layout, conservative flux
  SparseOp bound_stress_cons;  ///< same layout, conservative flux
  SparseOp trace_cell;         ///< (boundary faces*D) x (cells*D)
  SparseOp trace_data;         ///< (boundary faces*D) x (boundary faces*D)
  /// Interaction regions whose local system stayed rank-deficient after the
  /// tangential selection (all-Neumann corners, degenerate tensors).
  std::vector<int> deficient_vertices;
};

/// Builds the multi-point stress operators by solving one local continuity
/// system per grid vertex and condensing the subcell gradients into traction
/// weights. Absorbing faces are assembled as Robin faces with weight D_dt.
StressOperators discretize(const Grid& grid, const StiffnessField& field, const BoundarySpec& bc,
                           const AbcWeight& abc, const MpsaOptions& opts = {});

/// T = STRESS u + BOUND_STRESS g (integrated tractions per face).
VecX face_tractions(const StressOperators& ops, const VecX& u_cells, const VecX& boundary_values);

/// Per absorbing face g: D_dt (4/3 u_g^{n-1} - 1/3 u_g^{n-2}) + F_A(t, x_g);
/// zero on all other boundary faces.
VecX assemble_abc_rhs(const Grid& grid, const BoundarySpec& bc, const AbcWeight& abc,
                      const VecX& u_hist1, const VecX& u_hist2, double t);

/// Full boundary data vector at time t: prescribed data plus the absorbing
/// history terms.
VecX assemble_boundary_values(const Grid& grid, const BoundarySpec& bc, const AbcWeight& abc,
                              const VecX& u_hist1, const VecX& u_hist2, double t);

/// Displacement at boundary face centers reconstructed from the local
/// systems; equals the Dirichlet data exactly on Dirichlet faces.
VecX boundary_displacement_trace(const StressOperators& ops, const VecX& u_cells,
                                 const VecX& boundary_values);

/// Signed sum of face values over each cell: out_K = sum_{f in F_K} sign(K,f) t_f.
VecX cell_divergence(const Grid& grid, const VecX& face_values);

}  // namespace mpsaw
