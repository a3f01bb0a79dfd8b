#include "mpsawave/analytic.hpp"

#include <cmath>

namespace mpsaw {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bump(double s) { return s * (1.0 - s); }     // s(1-s)
double dbump(double s) { return 1.0 - 2.0 * s; }    // d/ds

}  // namespace

AnalyticSolution manufactured_solution_3d() {
  AnalyticSolution sol;
  sol.dim = 3;
  const double w = 2.5 * kPi;

  auto p = [](const Vec3& x) { return bump(x.x()) * bump(x.y()) * bump(x.z()); };
  auto gp = [](const Vec3& x) {
    return Vec3(dbump(x.x()) * bump(x.y()) * bump(x.z()), bump(x.x()) * dbump(x.y()) * bump(x.z()),
                bump(x.x()) * bump(x.y()) * dbump(x.z()));
  };

  sol.u = [=](const Vec3& x, double t) { return Vec3::Ones().eval() * (std::sin(w * t) * p(x)); };
  sol.v = [=](const Vec3& x, double t) {
    return Vec3::Ones().eval() * (w * std::cos(w * t) * p(x));
  };
  sol.a = [=](const Vec3& x, double t) {
    return Vec3::Ones().eval() * (-w * w * std::sin(w * t) * p(x));
  };
  sol.grad_u = [=](const Vec3& x, double t) {
    MatX g(3, 3);
    const Vec3 gr = gp(x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = std::sin(w * t) * gr(j);
    return g;
  };
  sol.q = [=](const Vec3& xyz, double t) {
    const double x = xyz.x(), y = xyz.y(), z = xyz.z();
    const double s = std::sin(w * t);
    const double core = -w * w * x * y * z * (1 - x) * (1 - y) * (1 - z);
    const double qx = core - 2.0 * x * y * z * (1 - y) - 2.0 * x * y * z * (1 - z) +
                      2.0 * x * y * (1 - x) * (1 - y) + 2.0 * x * y * (1 - y) * (1 - z) +
                      2.0 * x * z * (1 - x) * (1 - z) + 2.0 * x * z * (1 - y) * (1 - z) +
                      2.0 * y * z * (1 - x) * (1 - y) + 2.0 * y * z * (1 - x) * (1 - z) +
                      6.0 * y * z * (1 - y) * (1 - z) - 2.0 * y * (1 - x) * (1 - y) * (1 - z) -
                      2.0 * z * (1 - x) * (1 - y) * (1 - z);
    const double qy = core - 2.0 * x * y * z * (1 - x) - 2.0 * x * y * z * (1 - z) +
                      2.0 * x * y * (1 - x) * (1 - y) + 2.0 * x * y * (1 - x) * (1 - z) +
                      2.0 * x * z * (1 - x) * (1 - y) + 6.0 * x * z * (1 - x) * (1 - z) +
                      2.0 * x * z * (1 - y) * (1 - z) - 2.0 * x * (1 - x) * (1 - y) * (1 - z) +
                      2.0 * y * z * (1 - x) * (1 - z) + 2.0 * y * z * (1 - y) * (1 - z) -
                      2.0 * z * (1 - x) * (1 - y) * (1 - z);
    const double qz = core - 2.0 * x * y * z * (1 - x) - 2.0 * x * y * z * (1 - y) +
                      6.0 * x * y * (1 - x) * (1 - y) + 2.0 * x * y * (1 - x) * (1 - z) +
                      2.0 * x * y * (1 - y) * (1 - z) + 2.0 * x * z * (1 - x) * (1 - y) +
                      2.0 * x * z * (1 - x) * (1 - z) - 2.0 * x * (1 - x) * (1 - y) * (1 - z) +
                      2.0 * y * z * (1 - x) * (1 - y) + 2.0 * y * z * (1 - y) * (1 - z) -
                      2.0 * y * (1 - x) * (1 - y) * (1 - z);
    return Vec3(s * qx, s * qy, s * qz);
  };
  return sol;
}

AnalyticSolution manufactured_solution_2d() {
  AnalyticSolution sol;
  sol.dim = 2;
  const double w = 2.5 * kPi;

  auto p = [](const Vec3& x) { return bump(x.x()) * bump(x.y()); };

  sol.u = [=](const Vec3& x, double t) {
    const double f = std::sin(w * t) * p(x);
    return Vec3(f, f, 0.0);
  };
  sol.v = [=](const Vec3& x, double t) {
    const double f = w * std::cos(w * t) * p(x);
    return Vec3(f, f, 0.0);
  };
  sol.a = [=](const Vec3& x, double t) {
    const double f = -w * w * std::sin(w * t) * p(x);
    return Vec3(f, f, 0.0);
  };
  sol.grad_u = [=](const Vec3& x, double t) {
    MatX g(2, 2);
    const double px = dbump(x.x()) * bump(x.y());
    const double py = bump(x.x()) * dbump(x.y());
    for (int i = 0; i < 2; ++i) {
      g(i, 0) = std::sin(w * t) * px;
      g(i, 1) = std::sin(w * t) * py;
    }
    return g;
  };
  // q = rho a - (lambda+mu) grad(div u) - mu lap(u) with unit parameters.
  sol.q = [=](const Vec3& xv, double t) {
    const double s = std::sin(w * t);
    const double X = bump(xv.x()), Y = bump(xv.y());
    const double Xp = dbump(xv.x()), Yp = dbump(xv.y());
    // div u = s (X'Y + XY'); lap u_i = s (X''Y + XY'') with X'' = Y'' = -2.
    const double qx = -w * w * s * X * Y - 2.0 * s * (-2.0 * Y + Xp * Yp) - s * (-2.0 * Y - 2.0 * X);
    const double qy = -w * w * s * X * Y - 2.0 * s * (Xp * Yp - 2.0 * X) - s * (-2.0 * Y - 2.0 * X);
    return Vec3(qx, qy, 0.0);
  };
  return sol;
}

AnalyticSolution quasi1d_solution(double lambda, double mu, double rho) {
  if (!(rho > 0.0) || !(lambda + 2.0 * mu > 0.0))
    throw std::invalid_argument("quasi-1D solution needs positive rho and lambda + 2 mu");
  AnalyticSolution sol;
  sol.dim = 2;
  const double cp = std::sqrt((lambda + 2.0 * mu) / rho);
  sol.c_p = cp;
  sol.u = [=](const Vec3& x, double t) { return Vec3(std::sin(t - x.x() / cp), 0.0, 0.0); };
  sol.v = [=](const Vec3& x, double t) { return Vec3(std::cos(t - x.x() / cp), 0.0, 0.0); };
  sol.a = [=](const Vec3& x, double t) { return Vec3(-std::sin(t - x.x() / cp), 0.0, 0.0); };
  sol.grad_u = [=](const Vec3& x, double t) {
    MatX g = MatX::Zero(2, 2);
    g(0, 0) = -std::cos(t - x.x() / cp) / cp;
    return g;
  };
  return sol;
}

AnalyticSolution rotated_wave_initial(double theta, double c_p) {
  if (!(c_p > 0.0)) throw std::invalid_argument("wave speed must be positive");
  AnalyticSolution sol;
  sol.dim = 2;
  sol.c_p = c_p;
  sol.theta = theta;
  const double ct = std::cos(theta), st = std::sin(theta);
  auto phase = [=](const Vec3& x, double t) { return t - (ct * x.x() + st * x.y()) / c_p; };
  sol.u = [=](const Vec3& x, double t) {
    const double s = std::sin(phase(x, t));
    return Vec3(ct * s, st * s, 0.0);
  };
  sol.v = [=](const Vec3& x, double t) {
    const double c = std::cos(phase(x, t));
    return Vec3(ct * c, st * c, 0.0);
  };
  sol.a = [=](const Vec3& x, double t) {
    const double s = std::sin(phase(x, t));
    return Vec3(-ct * s, -st * s, 0.0);
  };
  sol.grad_u = [=](const Vec3& x, double t) {
    const double c = std::cos(phase(x, t));
    MatX g(2, 2);
    g(0, 0) = ct * c * (-ct / c_p);
    g(0, 1) = ct * c * (-st / c_p);
    g(1, 0) = st * c * (-ct / c_p);
    g(1, 1) = st * c * (-st / c_p);
    return g;
  };
  return sol;
}

std::function<Vec3(const Vec3&)> ricker_velocity(const Vec3& center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("pulse width must be positive");
  return [=](const Vec3& x) {
    const Vec3 r = x - center;
    return Vec3(std::exp(-kPi * kPi * r.squaredNorm() / (width * width)) * r);
  };
}

}  // namespace mpsaw
