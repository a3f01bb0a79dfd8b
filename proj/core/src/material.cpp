#include "mpsawave/material.hpp"

#include <cmath>

namespace mpsaw {

namespace {

double kron(int a, int b) { return a == b ? 1.0 : 0.0; }

}  // namespace

MatX StiffnessTensor::apply(const MatX& grad) const {
  VecX flat(dim_ * dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) flat(i * dim_ + j) = grad(i, j);
  VecX s = mat_ * flat;
  MatX sigma(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) sigma(i, j) = s(i * dim_ + j);
  return sigma;
}

StiffnessTensor isotropic_stiffness(const IsotropicParams& p, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
  if (!(p.mu > 0.0) && !(p.mu == 0.0 && p.lambda == 0.0))
    throw std::invalid_argument("shear modulus must be positive");
  if (p.lambda + 2.0 * p.mu / dim < 0.0)
    throw std::invalid_argument("isotropic stiffness is not positive definite");
  MatX m = MatX::Zero(dim * dim, dim * dim);
  StiffnessTensor C(dim, m);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          C.set_entry(i, j, k, l,
                      p.lambda * kron(i, j) * kron(k, l) +
                          p.mu * (kron(i, k) * kron(j, l) + kron(i, l) * kron(j, k)));
  return C;
}

StiffnessTensor transversely_isotropic_stiffness(const TransverseIsotropyParams& p, int dim) {
  if (dim != 3) throw std::invalid_argument("transverse isotropy requires dimension 3");
  if (std::abs(p.axis.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("symmetry axis must be a unit vector");
  if (!(p.mu_par > 0.0) || !(p.mu_perp > 0.0))
    throw std::invalid_argument("shear parameters must be positive");
  const Vec3& v = p.axis;
  MatX m = MatX::Zero(9, 9);
  StiffnessTensor C(3, m);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double c = (p.lambda + p.lambda_par) * kron(i, j) * kron(k, l) +
                     p.mu_par * (kron(i, k) * kron(j, l) + kron(i, l) * kron(j, k)) -
                     p.lambda_par * (kron(i, j) * v(k) * v(l) + kron(k, l) * v(i) * v(j)) +
                     (p.mu_perp - p.mu_par) *
                         (kron(i, k) * v(j) * v(l) + kron(j, k) * v(i) * v(l) +
                          kron(i, l) * v(j) * v(k) + kron(j, l) * v(i) * v(k)) +
                     (p.lambda_par + p.lambda_perp + 2.0 * p.mu_par - 2.0 * p.mu_perp) * v(i) *
                         v(j) * v(k) * v(l);
          C.set_entry(i, j, k, l, c);
        }
  return C;
}

MatX apply_hooke(const StiffnessTensor& C, const MatX& grad_u) {
  return C.apply(grad_u);
}

StiffnessTensor quasi1d_filter(const StiffnessTensor& C) {
  StiffnessTensor F = C;
  const int d = C.dim();
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      if (i != k) F.set_entry(i, i, k, k, 0.0);
  return F;
}

StiffnessTensor rotate_tensor(const StiffnessTensor& C, const MatX& R) {
  const int d = C.dim();
  MatX m = MatX::Zero(d * d, d * d);
  StiffnessTensor out(d, m);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              for (int c = 0; c < d; ++c)
                for (int e = 0; e < d; ++e)
                  s += R(i, a) * R(j, b) * R(k, c) * R(l, e) * C.entry(a, b, c, e);
          out.set_entry(i, j, k, l, s);
        }
  return out;
}

MaterialRegion isotropic_region(const IsotropicParams& p, int dim, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
  return MaterialRegion{isotropic_stiffness(p, dim), rho, p};
}

MaterialRegion transversely_isotropic_region(const TransverseIsotropyParams& p, int dim,
                                             double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
  return MaterialRegion{transversely_isotropic_stiffness(p, dim), rho, std::nullopt};
}

StiffnessField StiffnessField::uniform(const Grid& grid, MaterialRegion region) {
  StiffnessField f;
  f.regions_.push_back(std::move(region));
  f.region_of_cell_.assign(grid.num_cells(), 0);
  return f;
}

StiffnessField StiffnessField::from_boxes(const Grid& grid, MaterialRegion default_region,
                                          const std::vector<std::pair<Box, MaterialRegion>>& boxes) {
  StiffnessField f;
  f.regions_.push_back(std::move(default_region));
  for (const auto& [box, region] : boxes) {
    (void)box;
    f.regions_.push_back(region);
  }
  f.region_of_cell_.assign(grid.num_cells(), 0);
  for (int c = 0; c < grid.num_cells(); ++c) {
    const Vec3& x = grid.cells[c].center;
    for (int r = 0; r < static_cast<int>(boxes.size()); ++r) {
      const Box& b = boxes[r].first;
      bool in = true;
      for (int a = 0; a < grid.dim; ++a)
        in = in && x[a] >= b.lo[a] && x[a] <= b.hi[a];
      if (in) {
        f.region_of_cell_[c] = r + 1;
        break;
      }
    }
  }
  return f;
}

}  // namespace mpsaw
