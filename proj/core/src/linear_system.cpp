#include "mpsawave/linear_system.hpp"

#include <vector>

namespace mpsaw {

GlobalSystem::GlobalSystem(const Grid& grid, const StiffnessField& field,
                           const StressOperators& ops, double beta, double dt, SolverKind solver,
                           double tolerance)
    : kind_(solver), tol_(tolerance) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const int d = grid.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(grid.num_cells()) * d;

  mass_ = VecX::Zero(n);
  for (int c = 0; c < grid.num_cells(); ++c)
    for (int i = 0; i < d; ++i) mass_(c * d + i) = field.rho(c) * grid.cells[c].volume;

  std::vector<Eigen::Triplet<double>> trips;
  std::size_t est = 0;
  for (int c = 0; c < grid.num_cells(); ++c)
    for (int f : grid.cells[c].faces)
      est += ops.stress_cons.outer[f * d + 1] - ops.stress_cons.outer[f * d];
  trips.reserve(est * d + n);

  const double mscale = 1.0 / (beta * dt * dt);
  for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(i, i, mass_(i) * mscale);

  for (int c = 0; c < grid.num_cells(); ++c)
    for (int f : grid.cells[c].faces) {
      const double s = grid.orientation(c, f);
      for (int i = 0; i < d; ++i) {
        const int r = c * d + i;
        for (std::size_t k = ops.stress_cons.outer[f * d + i];
             k < ops.stress_cons.outer[f * d + i + 1]; ++k)
          trips.emplace_back(r, ops.stress_cons.inner[k], -s * ops.stress_cons.vals[k]);
      }
    }

  A_.resize(n, n);
  A_.setFromTriplets(trips.begin(), trips.end());
  A_.makeCompressed();
  trips.clear();
  trips.shrink_to_fit();

  if (kind_ == SolverKind::Direct) {
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->compute(A_);
    if (lu_->info() != Eigen::Success)
      throw SolverError("global matrix factorization failed (singular discrete system)");
  } else {
    bicg_ = std::make_unique<
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>();
    bicg_->setTolerance(std::min(tol_ * 1e-2, 1e-12));
    bicg_->setMaxIterations(2000);
    bicg_->compute(A_);
    if (bicg_->info() != Eigen::Success)
      throw SolverError("iterative solver setup failed");
  }
  factorizations_ = 1;
}

VecX GlobalSystem::solve(const VecX& rhs) const {
  if (!rhs.allFinite()) throw std::invalid_argument("right-hand side contains non-finite values");
  if (rhs.size() != A_.rows()) throw std::invalid_argument("right-hand side size mismatch");
  ++solves_;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return VecX::Zero(rhs.size());

  VecX x = kind_ == SolverKind::Direct ? lu_->solve(rhs) : bicg_->solve(rhs).eval();
  // One step of iterative refinement keeps the relative residual in spec.
  for (int pass = 0; pass < 2; ++pass) {
    const VecX r = rhs - A_ * x;
    if (r.norm() <= tol_ * bnorm) return x;
    x += kind_ == SolverKind::Direct ? lu_->solve(r).eval() : bicg_->solve(r).eval();
  }
  if ((rhs - A_ * x).norm() <= tol_ * bnorm) return x;
  throw SolverError("linear solve did not reach the requested residual");
}

}  // namespace mpsaw
