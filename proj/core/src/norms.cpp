#include "mpsawave/norms.hpp"

#include <cmath>

namespace mpsaw {

double cell_l2_norm(const Grid& grid, const VecX& cell_field) {
  const int d = grid.dim;
  if (cell_field.size() != static_cast<Eigen::Index>(grid.num_cells()) * d)
    throw std::invalid_argument("cell field size mismatch");
  double s = 0.0;
  for (int c = 0; c < grid.num_cells(); ++c)
    s += grid.cells[c].volume * cell_field.segment(c * d, d).squaredNorm();
  return std::sqrt(s);
}

namespace {

double face_weight(const Grid& grid, int f) {
  const Face& fc = grid.faces[f];
  Vec3 dL = Vec3::Zero();
  if (fc.cells[1] >= 0) dL = grid.cells[fc.cells[1]].center - fc.center;
  const Vec3 dR = grid.cells[fc.cells[0]].center - fc.center;
  return fc.measure * (dL - dR).dot(fc.normal) / grid.dim;
}

}  // namespace

double face_l2_norm(const Grid& grid, const VecX& face_field) {
  const int d = grid.dim;
  if (face_field.size() != static_cast<Eigen::Index>(grid.num_faces()) * d)
    throw std::invalid_argument("face field size mismatch");
  double s = 0.0;
  for (int f = 0; f < grid.num_faces(); ++f)
    s += face_weight(grid, f) * face_field.segment(f * d, d).squaredNorm();
  return std::sqrt(s);
}

RelativeErrors relative_errors(const Grid& grid, const StiffnessField& field, const VecX& u_cells,
                               const VecX& tractions, const AnalyticSolution& exact, double t) {
  const int d = grid.dim;
  VecX u_exact(static_cast<Eigen::Index>(grid.num_cells()) * d);
  for (int c = 0; c < grid.num_cells(); ++c) {
    const Vec3 val = exact.u(grid.cells[c].center, t);
    for (int i = 0; i < d; ++i) u_exact(c * d + i) = val(i);
  }
  VecX t_exact(static_cast<Eigen::Index>(grid.num_faces()) * d);
  VecX t_avg(t_exact.size());
  for (int f = 0; f < grid.num_faces(); ++f) {
    const Face& fc = grid.faces[f];
    const MatX sigma = apply_hooke(field.tensor(fc.cells[0]), exact.grad_u(fc.center, t));
    VecX n(d);
    for (int i = 0; i < d; ++i) n(i) = fc.normal[i];
    const VecX tr = sigma * n;
    for (int i = 0; i < d; ++i) {
      t_exact(f * d + i) = tr(i);
      t_avg(f * d + i) = tractions(f * d + i) / fc.measure;
    }
  }

  const double nu = cell_l2_norm(grid, u_exact);
  const double nt = face_l2_norm(grid, t_exact);
  if (nu == 0.0 || nt == 0.0)
    throw std::domain_error("relative error undefined: exact solution norm is zero");
  RelativeErrors e;
  e.displacement = cell_l2_norm(grid, VecX(u_cells - u_exact)) / nu;
  e.traction = face_l2_norm(grid, VecX(t_avg - t_exact)) / nt;
  return e;
}

double system_energy(const Grid& grid, const StiffnessField& field, const VecX& velocity) {
  const int d = grid.dim;
  if (velocity.size() != static_cast<Eigen::Index>(grid.num_cells()) * d)
    throw std::invalid_argument("velocity size mismatch");
  double e = 0.0;
  for (int c = 0; c < grid.num_cells(); ++c)
    e += grid.cells[c].volume * field.rho(c) * velocity.segment(c * d, d).squaredNorm();
  return e;
}

}  // namespace mpsaw
