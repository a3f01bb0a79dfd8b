#pragma once

#include "mpsawave/grid.hpp"
#include "mpsawave/material.hpp"
#include "mpsawave/mpsa.hpp"
#include "mpsawave/types.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>

namespace mpsaw {

enum class SolverKind { Direct, Iterative };

/// Global matrix of the fully discrete step,
///   A = M/(beta dt^2) - div(STRESS),
/// with the diagonal lumped mass M_K = rho_K m_K per component. The
/// factorization is computed once and reused for every step.
class GlobalSystem {
 public:
  GlobalSystem(const Grid& grid, const StiffnessField& field, const StressOperators& ops,
               double beta, double dt, SolverKind solver = SolverKind::Direct,
               double tolerance = 1e-10);

  VecX solve(const VecX& rhs) const;

  const VecX& mass_diagonal() const { return mass_; }
  const Eigen::SparseMatrix<double>& matrix() const { return A_; }
  int factorization_count() const { return factorizations_; }
  int solve_count() const { return solves_; }
  double tolerance() const { return tol_; }

 private:
  Eigen::SparseMatrix<double> A_;
  VecX mass_;
  SolverKind kind_;
  double tol_;
  int factorizations_ = 0;
  mutable int solves_ = 0;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
  std::unique_ptr<
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>
      bicg_;
};

inline GlobalSystem assemble_global(const Grid& grid, const StiffnessField& field,
                                    const StressOperators& ops, double beta, double dt,
                                    SolverKind solver = SolverKind::Direct,
                                    double tolerance = 1e-10) {
  return GlobalSystem(grid, field, ops, beta, dt, solver, tolerance);
}

}  // namespace mpsaw
