#pragma once

#include "mpsawave/types.hpp"

#include <functional>

namespace mpsaw {

/// Closed-form displacement/velocity/acceleration/source fields used by the
/// verification setups. Functions take a point and a time.
struct AnalyticSolution {
  int dim = 0;
  std::function<Vec3(const Vec3&, double)> u;
  std::function<Vec3(const Vec3&, double)> v;
  std::function<Vec3(const Vec3&, double)> a;
  std::function<Vec3(const Vec3&, double)> q;       ///< null means zero source
  std::function<MatX(const Vec3&, double)> grad_u;  ///< displacement gradient
  double c_p = 0.0;
  double theta = 0.0;
};

/// Trigonometric-polynomial solution on the unit cube with homogeneous
/// Dirichlet boundary, unit isotropic material. The source makes it an exact
/// solution of the elastic wave equation.
AnalyticSolution manufactured_solution_3d();

/// Same construction restricted to the unit square.
AnalyticSolution manufactured_solution_2d();

/// Plane longitudinal wave u = [sin(t - x/c_p), 0] with c_p = sqrt((lambda+2mu)/rho).
AnalyticSolution quasi1d_solution(double lambda, double mu, double rho);

/// Plane wave rotated by theta; at t = 0 it provides the initial fields of
/// the oblique-incidence energy decay setup.
AnalyticSolution rotated_wave_initial(double theta, double c_p);

/// Radial pulse velocity field: exp(-pi^2 |x-c|^2 / width^2) (x - c).
std::function<Vec3(const Vec3&)> ricker_velocity(const Vec3& center, double width);

}  // namespace mpsaw
