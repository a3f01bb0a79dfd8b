#pragma once

#include "mpsawave/grid.hpp"
#include "mpsawave/material.hpp"
#include "mpsawave/types.hpp"

#include <functional>
#include <vector>

namespace mpsaw {

enum class BcKind { Dirichlet, Neumann, Robin, Absorbing };

/// Time-dependent boundary data evaluated at a face center. Traction units
/// for Neumann/Robin/Absorbing faces, displacement for Dirichlet faces.
using BoundaryDataFn = std::function<Vec3(double t, const Vec3& x)>;

/// Per-boundary-face condition kind, Robin weights and data. Boundary faces
/// are numbered by compact slots in ascending face-id order; the assembled
/// boundary data vector is indexed slot*D + component.
class BoundarySpec {
 public:
  explicit BoundarySpec(const Grid& grid);

  void set_face(int face, BcKind kind, BoundaryDataFn data = nullptr);
  void set_face_robin(int face, const MatX& weight, BoundaryDataFn data = nullptr);
  /// Assigns every boundary face whose center lies on the given side of the
  /// domain box (axis in {0,1,2}; max_side picks hi vs lo).
  void set_side(const Grid& grid, int axis, bool max_side, BcKind kind,
                BoundaryDataFn data = nullptr);
  void set_all(BcKind kind, BoundaryDataFn data = nullptr);

  int num_boundary_faces() const { return static_cast<int>(bfaces_.size()); }
  const std::vector<int>& faces() const { return bfaces_; }
  int slot(int face) const { return slot_of_face_[face]; }
  int face_of_slot(int s) const { return bfaces_[s]; }
  BcKind kind(int slot) const { return kind_[slot]; }
  const MatX& robin_weight(int slot) const { return robin_[slot]; }

  Vec3 eval_data(int slot, double t, const Vec3& x) const {
    return data_[slot] ? data_[slot](t, x) : Vec3::Zero();
  }

  /// Assembled static boundary data at time t (absorbing slots get only
  /// their forcing term; the history part is added separately).
  VecX assemble_data(const Grid& grid, double t) const;

 private:
  int dim_;
  std::vector<int> bfaces_;
  std::vector<int> slot_of_face_;
  std::vector<BcKind> kind_;
  std::vector<MatX> robin_;
  std::vector<BoundaryDataFn> data_;
};

/// Impedance matrices of the first-order absorbing condition,
///   D = sqrt(rho(lambda+2mu)) n n^T + sqrt(rho mu)(I - n n^T),
/// and the time-discrete Robin weight D_dt = 3/(2 dt) D.
struct AbcWeight {
  double dt = 0.0;
  std::vector<MatX> impedance;       ///< per boundary slot, empty if not absorbing
  std::vector<MatX> robin_weight;    ///< D_dt, same layout

  bool has(int slot) const {
    return slot < static_cast<int>(impedance.size()) && impedance[slot].size() > 0;
  }
};

/// Builds the per-face absorbing weights from the unique adjacent cell's
/// isotropic parameters. Throws DiscretizationError for absorbing faces on
/// cells without isotropic parameters.
AbcWeight compute_abc_weights(const Grid& grid, const StiffnessField& field,
                              const BoundarySpec& bc, double dt);

}  // namespace mpsaw
