#include "doctest.h"

#include "mpsawave/boundary.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace mpsaw;

namespace {

Box unit_box() { return Box{Vec3(0, 0, 0), Vec3(1, 1, 1)}; }

}  // namespace

TEST_CASE("side assignment covers the boundary") {
  Grid g = build_cartesian_grid(unit_box(), {4, 4});
  BoundarySpec bc(g);
  bc.set_side(g, 0, false, BcKind::Dirichlet);
  bc.set_side(g, 0, true, BcKind::Absorbing);
  int dirichlet = 0, absorbing = 0, neumann = 0;
  for (int s = 0; s < bc.num_boundary_faces(); ++s) {
    switch (bc.kind(s)) {
      case BcKind::Dirichlet: ++dirichlet; break;
      case BcKind::Absorbing: ++absorbing; break;
      case BcKind::Neumann: ++neumann; break;
      default: break;
    }
  }
  CHECK(dirichlet == 4);
  CHECK(absorbing == 4);
  CHECK(neumann == 8);
}

TEST_CASE("absorbing impedance for the quasi-1d parameters") {
  Grid g = build_cartesian_grid(unit_box(), {2, 2});
  auto field = StiffnessField::uniform(g, isotropic_region({0.01, 0.01}, 2));
  BoundarySpec bc(g);
  bc.set_side(g, 0, true, BcKind::Absorbing);
  AbcWeight abc = compute_abc_weights(g, field, bc, 0.5);
  bool checked = false;
  for (int s = 0; s < bc.num_boundary_faces(); ++s) {
    if (bc.kind(s) != BcKind::Absorbing) {
      CHECK(!abc.has(s));
      continue;
    }
    checked = true;
    const MatX& D = abc.impedance[s];
    CHECK(D(0, 0) == doctest::Approx(std::sqrt(0.03)));  // ~0.17321
    CHECK(D(1, 1) == doctest::Approx(std::sqrt(0.01)));  // 0.1
    CHECK(D(0, 1) == doctest::Approx(0.0));
    CHECK((abc.robin_weight[s] - (3.0 / (2.0 * 0.5)) * D).norm() == doctest::Approx(0.0));
  }
  CHECK(checked);

  // Doubling dt halves D_dt exactly.
  AbcWeight abc2 = compute_abc_weights(g, field, bc, 1.0);
  for (int s = 0; s < bc.num_boundary_faces(); ++s)
    if (abc.has(s))
      CHECK((abc2.robin_weight[s] - 0.5 * abc.robin_weight[s]).norm() == doctest::Approx(0.0));
}

TEST_CASE("impedance spectrum for mu = lambda") {
  // Eigenvalues sqrt(3 rho lambda) along n and sqrt(rho lambda) tangentially.
  Grid g = build_simplex_grid(unit_box(), 0.5, 2);
  const double lam = 0.25, rho = 2.0;
  auto field = StiffnessField::uniform(g, isotropic_region({lam, lam}, 2, rho));
  BoundarySpec bc(g);
  bc.set_all(BcKind::Absorbing);
  AbcWeight abc = compute_abc_weights(g, field, bc, 0.1);
  for (int s = 0; s < bc.num_boundary_faces(); ++s) {
    REQUIRE(abc.has(s));
    Eigen::SelfAdjointEigenSolver<MatX> es(abc.impedance[s]);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(std::sqrt(rho * lam)));
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(std::sqrt(3.0 * rho * lam)));
    CHECK(es.eigenvalues().minCoeff() > 0.0);  // SPD

    const int f = bc.face_of_slot(s);
    VecX n(2);
    n << g.faces[f].normal.x(), g.faces[f].normal.y();
    CHECK((abc.impedance[s] * n - std::sqrt(3.0 * rho * lam) * n).norm() < 1e-12);
  }
}

TEST_CASE("absorbing faces on anisotropic cells are rejected") {
  Grid g = build_cartesian_grid(unit_box(), {2, 2, 2});
  auto field = StiffnessField::uniform(
      g, transversely_isotropic_region({1.0, 5.0, 5.0, 1.0, 2.0, Vec3(0, 0, 1)}, 3));
  BoundarySpec bc(g);
  bc.set_all(BcKind::Absorbing);
  CHECK_THROWS_AS(compute_abc_weights(g, field, bc, 0.1), DiscretizationError);
}

TEST_CASE("boundary data assembly") {
  Grid g = build_cartesian_grid(unit_box(), {2, 2});
  BoundarySpec bc(g);
  bc.set_all(BcKind::Dirichlet,
             [](double t, const Vec3& x) { return Vec3(t + x.x(), 2.0 * x.y(), 0.0); });
  VecX data = bc.assemble_data(g, 3.0);
  for (int s = 0; s < bc.num_boundary_faces(); ++s) {
    const Vec3& x = g.faces[bc.face_of_slot(s)].center;
    CHECK(data(2 * s) == doctest::Approx(3.0 + x.x()));
    CHECK(data(2 * s + 1) == doctest::Approx(2.0 * x.y()));
  }
}
