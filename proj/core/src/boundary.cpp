#include "mpsawave/boundary.hpp"

#include <cmath>

namespace mpsaw {

BoundarySpec::BoundarySpec(const Grid& grid) : dim_(grid.dim) {
  bfaces_ = grid.boundary_faces();
  slot_of_face_.assign(grid.num_faces(), -1);
  for (int s = 0; s < static_cast<int>(bfaces_.size()); ++s) slot_of_face_[bfaces_[s]] = s;
  kind_.assign(bfaces_.size(), BcKind::Neumann);
  robin_.assign(bfaces_.size(), MatX());
  data_.assign(bfaces_.size(), nullptr);
}

void BoundarySpec::set_face(int face, BcKind kind, BoundaryDataFn data) {
  const int s = slot_of_face_.at(face);
  if (s < 0) throw std::invalid_argument("not a boundary face");
  if (kind == BcKind::Robin) throw std::invalid_argument("Robin faces need a weight matrix");
  kind_[s] = kind;
  robin_[s] = MatX();
  data_[s] = std::move(data);
}

void BoundarySpec::set_face_robin(int face, const MatX& weight, BoundaryDataFn data) {
  const int s = slot_of_face_.at(face);
  if (s < 0) throw std::invalid_argument("not a boundary face");
  if (weight.rows() != dim_ || weight.cols() != dim_)
    throw std::invalid_argument("Robin weight must be D x D");
  kind_[s] = BcKind::Robin;
  robin_[s] = weight;
  data_[s] = std::move(data);
}

void BoundarySpec::set_side(const Grid& grid, int axis, bool max_side, BcKind kind,
                            BoundaryDataFn data) {
  const Box& box = grid.recipe.box;
  const double target = max_side ? box.hi[axis] : box.lo[axis];
  const double tol = 1e-9 * grid.spacing;
  for (int f : bfaces_)
    if (std::abs(grid.faces[f].center[axis] - target) < tol) set_face(f, kind, data);
}

void BoundarySpec::set_all(BcKind kind, BoundaryDataFn data) {
  for (int f : bfaces_) set_face(f, kind, data);
}

VecX BoundarySpec::assemble_data(const Grid& grid, double t) const {
  const int d = dim_;
  VecX out = VecX::Zero(static_cast<Eigen::Index>(bfaces_.size()) * d);
  for (int s = 0; s < static_cast<int>(bfaces_.size()); ++s) {
    const Vec3 v = eval_data(s, t, grid.faces[bfaces_[s]].center);
    for (int c = 0; c < d; ++c) out(s * d + c) = v(c);
  }
  return out;
}

AbcWeight compute_abc_weights(const Grid& grid, const StiffnessField& field,
                              const BoundarySpec& bc, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const int d = grid.dim;
  AbcWeight w;
  w.dt = dt;
  w.impedance.assign(bc.num_boundary_faces(), MatX());
  w.robin_weight.assign(bc.num_boundary_faces(), MatX());
  for (int s = 0; s < bc.num_boundary_faces(); ++s) {
    if (bc.kind(s) != BcKind::Absorbing) continue;
    const int f = bc.face_of_slot(s);
    const int cell = grid.faces[f].cells[0];
    const auto& iso = field.iso(cell);
    if (!iso)
      throw DiscretizationError("absorbing face " + std::to_string(f) +
                                " adjoins a cell without isotropic parameters");
    const double rho = field.rho(cell);
    VecX n(d);
    for (int a = 0; a < d; ++a) n(a) = grid.faces[f].normal[a];
    const double zp = std::sqrt(rho * (iso->lambda + 2.0 * iso->mu));
    const double zs = std::sqrt(rho * iso->mu);
    MatX nn = n * n.transpose();
    w.impedance[s] = zp * nn + zs * (MatX::Identity(d, d) - nn);
    w.robin_weight[s] = (3.0 / (2.0 * dt)) * w.impedance[s];
  }
  return w;
}

}  // namespace mpsaw
