#pragma once

#include "mpsawave/grid.hpp"
#include "mpsawave/types.hpp"

#include <optional>
#include <vector>

namespace mpsaw {

/// Fourth-order stiffness tensor stored as a dense D^2 x D^2 matrix acting on
/// flattened displacement gradients (row-major index i*D + j for entry ij).
class StiffnessTensor {
 public:
  StiffnessTensor() = default;
  StiffnessTensor(int dim, MatX mat) : dim_(dim), mat_(std::move(mat)) {}

  int dim() const { return dim_; }
  const MatX& matrix() const { return mat_; }

  double entry(int i, int j, int k, int l) const { return mat_(i * dim_ + j, k * dim_ + l); }
  void set_entry(int i, int j, int k, int l, double v) { mat_(i * dim_ + j, k * dim_ + l) = v; }

  /// sigma = C : grad  (minor symmetries make this C : sym(grad)).
  MatX apply(const MatX& grad) const;

 private:
  int dim_ = 0;
  MatX mat_;
};

struct IsotropicParams {
  double lambda = 0.0;
  double mu = 0.0;
};

struct TransverseIsotropyParams {
  double lambda = 0.0;
  double lambda_par = 0.0;   // transverse compressive
  double lambda_perp = 0.0;  // perpendicular compressive
  double mu_par = 0.0;       // transverse shear
  double mu_perp = 0.0;      // transverse-to-perpendicular shear
  Vec3 axis = Vec3(0, 0, 1);
};

StiffnessTensor isotropic_stiffness(const IsotropicParams& p, int dim);

/// Transversely isotropic stiffness with symmetry axis p.axis (3D only).
StiffnessTensor transversely_isotropic_stiffness(const TransverseIsotropyParams& p, int dim);

/// sigma = C : eps(grad_u) with eps the symmetric gradient.
MatX apply_hooke(const StiffnessTensor& C, const MatX& grad_u);

/// Removes the coupling between distinct normal strains (entries C_iikk with
/// i != k). Diagonal normal and shear entries are retained, so the filtered
/// tensor carries one decoupled longitudinal wave per axis with unchanged
/// speed sqrt((lambda+2mu)/rho).
StiffnessTensor quasi1d_filter(const StiffnessTensor& C);

/// C'_ijkl = R_ia R_jb R_kc R_ld C_abcd.
StiffnessTensor rotate_tensor(const StiffnessTensor& C, const MatX& R);

struct MaterialRegion {
  StiffnessTensor C;
  double rho = 1.0;
  /// Set for isotropic regions (also after the quasi-1D filter); absorbing
  /// boundary impedances require these.
  std::optional<IsotropicParams> iso;
};

MaterialRegion isotropic_region(const IsotropicParams& p, int dim, double rho = 1.0);
MaterialRegion transversely_isotropic_region(const TransverseIsotropyParams& p, int dim,
                                             double rho = 1.0);

/// Per-cell stiffness and density, backed by a small set of shared regions.
class StiffnessField {
 public:
  static StiffnessField uniform(const Grid& grid, MaterialRegion region);

  /// Cells whose center falls in a box get that box's region (first match
  /// wins); all remaining cells get the default region.
  static StiffnessField from_boxes(const Grid& grid, MaterialRegion default_region,
                                   const std::vector<std::pair<Box, MaterialRegion>>& boxes);

  const StiffnessTensor& tensor(int cell) const { return regions_[region_of_cell_[cell]].C; }
  double rho(int cell) const { return regions_[region_of_cell_[cell]].rho; }
  const std::optional<IsotropicParams>& iso(int cell) const {
    return regions_[region_of_cell_[cell]].iso;
  }
  int region(int cell) const { return region_of_cell_[cell]; }
  int num_regions() const { return static_cast<int>(regions_.size()); }
  const MaterialRegion& region_data(int r) const { return regions_[r]; }

 private:
  std::vector<MaterialRegion> regions_;
  std::vector<int> region_of_cell_;
};

}  // namespace mpsaw
