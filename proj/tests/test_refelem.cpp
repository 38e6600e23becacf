#include "wadg/reference_element.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wadg;

namespace {

double line_integral(int p) { return p % 2 == 1 ? 0.0 : 2.0 / (p + 1); }

// Exact integral of r^a s^b over the reference element. On the triangle the
// inner s-integral runs over [-1, -r], leaving two line integrals.
double monomial_integral(ElementShape shape, int a, int b) {
  if (shape == ElementShape::Quadrilateral) return line_integral(a) * line_integral(b);
  const double sign = (b + 1) % 2 == 0 ? 1.0 : -1.0;
  return sign * (line_integral(a + b + 1) - line_integral(a)) / (b + 1);
}

// Composite Simpson on [-1, 1] with n panels.
template <class F>
double simpson(F f, int n = 4000) {
  const double h = 2.0 / n;
  double s = f(-1.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(-1.0 + i * h);
  return s * h / 3.0;
}

double reference_area(ElementShape shape) { return shape == ElementShape::Triangle ? 2.0 : 4.0; }

const ElementShape kShapes[] = {ElementShape::Triangle, ElementShape::Quadrilateral};

} // namespace

TEST(MonomialOracle, MatchesKnownValues) {
  EXPECT_DOUBLE_EQ(monomial_integral(ElementShape::Triangle, 0, 0), 2.0);
  EXPECT_NEAR(monomial_integral(ElementShape::Triangle, 1, 0), -2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(monomial_integral(ElementShape::Quadrilateral, 2, 2), 4.0 / 9.0);
}

TEST(Jacobi, OrthonormalAgainstSimpson) {
  for (auto [alpha, beta] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.0}, std::pair{2.0, 0.0}}) {
    for (int i = 0; i <= 5; ++i)
      for (int j = 0; j <= 5; ++j) {
        auto f = [&](double x) {
          Eigen::ArrayXd xx = Eigen::ArrayXd::Constant(1, x);
          return jacobi_p(xx, alpha, beta, i)(0) * jacobi_p(xx, alpha, beta, j)(0) * std::pow(1 - x, alpha) *
                 std::pow(1 + x, beta);
        };
        EXPECT_NEAR(simpson(f), i == j ? 1.0 : 0.0, 1e-9) << "alpha " << alpha << " i " << i << " j " << j;
      }
  }
}

TEST(Jacobi, GradientMatchesFiniteDifference) {
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(7, -0.9, 0.9);
  const double eps = 1e-6;
  for (int n = 1; n <= 6; ++n) {
    const Eigen::ArrayXd fd = (jacobi_p(x + eps, 1.0, 0.0, n) - jacobi_p(x - eps, 1.0, 0.0, n)) / (2 * eps);
    EXPECT_LT((grad_jacobi_p(x, 1.0, 0.0, n) - fd).abs().maxCoeff(), 1e-6);
  }
}

TEST(GaussRules, LegendreKnownValues) {
  const auto g2 = gauss_legendre_1d(2);
  EXPECT_NEAR(std::abs(g2.points(0)), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g2.weights(0), 1.0, 1e-15);
  const auto g3 = gauss_legendre_1d(3);
  Eigen::ArrayXd p = g3.points;
  std::sort(p.begin(), p.end());
  EXPECT_NEAR(p(0), -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(p(1), 0.0, 1e-15);
  EXPECT_NEAR(g3.weights.sum(), 2.0, 1e-14);
  EXPECT_EQ(g3.exactness_degree, 5);
}

TEST(GaussRules, JacobiIntegratesWeightedMonomials) {
  // int_{-1}^{1} x^k (1-x) dx by Simpson versus the 1-point-per-degree rule.
  for (int n = 1; n <= 10; ++n) {
    const auto g = gauss_jacobi_1d(n, 1.0, 0.0);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      const double exact = simpson([&](double x) { return std::pow(x, k) * (1 - x); });
      const double q = (g.weights * g.points.pow(k)).sum();
      EXPECT_NEAR(q, exact, 1e-11) << "n " << n << " k " << k;
    }
  }
  EXPECT_THROW(gauss_jacobi_1d(0, 0.0, 0.0), std::invalid_argument);
}

TEST(GaussRules, LobattoKnownValues) {
  Eigen::ArrayXd x = gauss_lobatto_points(4);
  std::sort(x.begin(), x.end());
  EXPECT_NEAR(x(0), -1.0, 1e-15);
  EXPECT_NEAR(x(1), -1.0 / std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(x(3), 1.0, 1e-15);
}

// Property: each rule integrates every monomial up to its exactness degree.
TEST(Quadrature, ExactnessPropertyAllDegrees) {
  for (auto shape : kShapes)
    for (int degree = 0; degree <= 20; ++degree) {
      const QuadratureRule q = build_quadrature(shape, degree);
      ASSERT_GE(q.exactness_degree, degree);
      for (int a = 0; a <= q.exactness_degree; ++a)
        for (int b = 0; a + b <= q.exactness_degree; ++b) {
          const double exact = monomial_integral(shape, a, b);
          const double approx = (q.weights * q.r.pow(a) * q.s.pow(b)).sum();
          EXPECT_NEAR(approx, exact, 1e-12 * std::max(1.0, std::abs(exact)))
              << to_string(shape) << " degree " << degree << " r^" << a << " s^" << b;
        }
    }
}

TEST(Quadrature, PositiveWeightsInsideElement) {
  for (auto shape : kShapes)
    for (int degree : {1, 5, 11, 17}) {
      const QuadratureRule q = build_quadrature(shape, degree);
      EXPECT_GT(q.weights.minCoeff(), 0.0);
      EXPECT_NEAR(q.weights.sum(), reference_area(shape), 1e-13);
      EXPECT_GE(q.r.minCoeff(), -1.0);
      EXPECT_GE(q.s.minCoeff(), -1.0);
      if (shape == ElementShape::Triangle) {
        EXPECT_LE((q.r + q.s).maxCoeff(), 1e-14);
      }
    }
  EXPECT_THROW(build_quadrature(ElementShape::Triangle, -1), std::invalid_argument);
}

TEST(Nodes, CountFacesAndVertices) {
  for (auto shape : kShapes)
    for (int N = 1; N <= 8; ++N) {
      const NodalBasis b(shape, N);
      EXPECT_EQ(b.size(), basis_dim(shape, N));
      for (const auto& f : b.face_nodes()) EXPECT_EQ(static_cast<int>(f.size()), N + 1);
      const auto verts = reference_vertices(shape);
      const auto vn = b.vertex_nodes();
      for (std::size_t v = 0; v < verts.size(); ++v) {
        EXPECT_NEAR(b.r()(vn[v]), verts[v][0], 1e-14);
        EXPECT_NEAR(b.s()(vn[v]), verts[v][1], 1e-14);
      }
      // Reported, and far from the singularity threshold at desk-scale degrees.
      EXPECT_LT(b.vandermonde_condition(), 1e3) << to_string(shape) << " N " << N;
    }
}

TEST(Nodes, FaceNodesSortedByParameter) {
  for (auto shape : kShapes) {
    const NodalBasis b(shape, 4);
    const auto fn = b.face_nodes();
    for (int f = 0; f < num_faces(shape); ++f)
      for (std::size_t i = 1; i < fn[f].size(); ++i)
        EXPECT_LT(face_parameter(shape, f, b.r()(fn[f][i - 1]), b.s()(fn[f][i - 1])),
                  face_parameter(shape, f, b.r()(fn[f][i]), b.s()(fn[f][i])));
  }
}

TEST(Nodes, FacesRunCounterclockwise) {
  for (auto shape : kShapes) {
    const auto verts = reference_vertices(shape);
    const int Nf = num_faces(shape);
    for (int f = 0; f < Nf; ++f) {
      const auto a = face_point(shape, f, -1.0), b = face_point(shape, f, 1.0);
      EXPECT_NEAR(a[0], verts[f][0], 1e-15);
      EXPECT_NEAR(a[1], verts[f][1], 1e-15);
      EXPECT_NEAR(b[0], verts[(f + 1) % Nf][0], 1e-15);
      EXPECT_NEAR(b[1], verts[(f + 1) % Nf][1], 1e-15);
    }
  }
}

// Property: nodal interpolation reproduces polynomials of degree N.
TEST(NodalBasis, InterpolationReproducesPolynomials) {
  const Eigen::ArrayXd r = Eigen::ArrayXd::LinSpaced(9, -0.95, -0.05), s = -0.5 * (r + 1.0) + 0.1;
  for (auto shape : kShapes)
    for (int N = 1; N <= 6; ++N) {
      const NodalBasis b(shape, N);
      const Eigen::MatrixXd I = b.interpolation_matrix(r, s);
      for (int a = 0; a <= N; ++a)
        for (int c = 0; a + c <= N; ++c) {
          const Eigen::VectorXd nodal = (b.r().pow(a) * b.s().pow(c)).matrix();
          const Eigen::VectorXd exact = (r.pow(a) * s.pow(c)).matrix();
          EXPECT_LT((I * nodal - exact).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(ReferenceElement, ProjectionIdentityAndMass) {
  for (auto shape : kShapes)
    for (int N = 1; N <= 6; ++N) {
      const auto ref = build_reference_element(N, shape, 2 * N + 1, 2 * N + 1);
      EXPECT_LT((ref.Pq * ref.Vq - Eigen::MatrixXd::Identity(ref.Np, ref.Np)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(Eigen::VectorXd::Ones(ref.Np).dot(ref.Mhat * Eigen::VectorXd::Ones(ref.Np)),
                  reference_area(shape), 1e-12);
      EXPECT_LT((ref.Mhat * ref.Mhat_inv - Eigen::MatrixXd::Identity(ref.Np, ref.Np)).cwiseAbs().maxCoeff(), 1e-11);
      // Mass matrix from quadrature agrees with the Vandermonde form.
      const Eigen::MatrixXd Mq = ref.Vq.transpose() * ref.vol_quad.weights.matrix().asDiagonal() * ref.Vq;
      EXPECT_LT((Mq - ref.Mhat).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(ReferenceElement, DerivativesExactOnPolynomials) {
  for (auto shape : kShapes)
    for (int N = 1; N <= 6; ++N) {
      const auto ref = build_reference_element(N, shape, 2 * N + 1, 2 * N + 1);
      const auto& r = ref.basis.r();
      const auto& s = ref.basis.s();
      for (int a = 0; a <= N; ++a)
        for (int b = 0; a + b <= N; ++b) {
          const Eigen::VectorXd f = (r.pow(a) * s.pow(b)).matrix();
          const Eigen::VectorXd fr = a == 0 ? Eigen::VectorXd::Zero(ref.Np).eval() : (a * r.pow(a - 1) * s.pow(b)).matrix().eval();
          const Eigen::VectorXd fs = b == 0 ? Eigen::VectorXd::Zero(ref.Np).eval() : (b * r.pow(a) * s.pow(b - 1)).matrix().eval();
          EXPECT_LT((ref.Dr * f - fr).cwiseAbs().maxCoeff(), 1e-10);
          EXPECT_LT((ref.Ds * f - fs).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(ReferenceElement, FaceQuadratureIntegratesEdges) {
  for (auto shape : kShapes) {
    const int N = 4;
    const auto ref = build_reference_element(N, shape, 2 * N + 1, 2 * N + 1);
    for (int f = 0; f < ref.Nfaces; ++f) {
      double len = 0.0;
      for (int i = 0; i < ref.Nfq; ++i) {
        const int q = f * ref.Nfq + i;
        EXPECT_TRUE(on_face(shape, f, ref.rf(q), ref.sf(q)));
        len += ref.wf(q);
      }
      EXPECT_NEAR(len, 2.0, 1e-14); // parameter length, scaled later by Jf
    }
    // Face interpolation of a degree-N polynomial is exact.
    const Eigen::VectorXd nodal = (ref.basis.r().pow(2) * ref.basis.s().pow(2)).matrix();
    const Eigen::VectorXd exact = (ref.rf.pow(2) * ref.sf.pow(2)).matrix();
    EXPECT_LT((ref.Vfq * nodal - exact).cwiseAbs().maxCoeff(), 1e-12);
  }
}
