#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "arlab/armap.hpp"
#include "arlab/fibers.hpp"
#include "support.hpp"

using namespace arlab;
using testsupport::F3;
using testsupport::half_norm_sum;
using testsupport::random_quadric_point;

namespace {

const Complex I{0.0, 1.0};

// All w4' with F(w1, (1 - w3 w4')/w1, w3, w4') = F(W): roots of a cubic in w4',
// interpolated at four nodes and solved through its companion matrix.
std::vector<Complex> cubic_oracle_roots(const Vec4c& w) {
  const Complex target = F3(w);
  auto g = [&](Complex x) { return w[0] * (F3({w[0], (1.0 - w[2] * x) / w[0], w[2], x}) - target); };
  const std::array<Complex, 4> nodes{Complex(-1.0), Complex(0.0), Complex(1.0), Complex(0.0, 1.0)};
  Eigen::Matrix4cd v;
  Eigen::Vector4cd rhs;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) v(r, c) = std::pow(nodes[static_cast<std::size_t>(r)], c);
    rhs(r) = g(nodes[static_cast<std::size_t>(r)]);
  }
  const Eigen::Vector4cd coef = v.fullPivLu().solve(rhs);
  Eigen::Matrix3cd comp = Eigen::Matrix3cd::Zero();
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  for (int k = 0; k < 3; ++k) comp(k, 2) = -coef(k) / coef(3);
  const Eigen::Vector3cd ev = comp.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

bool contains(const std::vector<Complex>& xs, Complex x, double tol) {
  return std::any_of(xs.begin(), xs.end(), [&](Complex y) { return std::abs(x - y) <= tol; });
}

}  // namespace

TEST_CASE("complete fiber of (1, 1, 1, 0)") {
  const FiberSet fs = fiber({1.0, 1.0, 1.0, 0.0});
  REQUIRE(fs.partners.size() == 2);
  CHECK(fs.cardinality() == 3);
  const Vec4c b{1.0, 0.0, 1.0, 1.0};
  const Vec4c c{1.0, (1.0 + I) / 2.0, 1.0, (1.0 - I) / 2.0};
  bool has_b = false, has_c = false;
  for (const auto& p : fs.partners) {
    has_b |= max_abs_diff(p.point, b) < 1e-15;
    has_c |= max_abs_diff(p.point, c) < 1e-15;
    CHECK(p.quadric_residual <= 1e-12);
    CHECK(p.map_residual == 0.0);
    CHECK(half_norm_sum(p.point) == doctest::Approx(1.5).epsilon(1e-15));
  }
  CHECK(has_b);
  CHECK(has_c);
}

TEST_CASE("fiber quadratic equals w1 times the PHI Jacobian at w4") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const Vec4c w = random_quadric_point(rng);
    const Complex q = eval_fiber_quadratic(w[2], w[3], w[3]);
    CHECK(std::abs(q - w[0] * jacobian_phi(w)) < 1e-9 * (1 + std::abs(q)));
  }
}

TEST_CASE("property: fibers on 10^4 random points") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 10000; ++k) {
    Vec4c w;
    if (k % 2 == 0) {
      w = random_quadric_point(rng);
    } else {
      const double t = 1.0 + 2.0 * u(rng);
      w = sample_mt(3, t, 1, static_cast<std::uint64_t>(k))[0].w();
    }
    const FiberSet fs = fiber(w);
    const double scale = std::max(1.0, norm_sum(w));
    if (fs.degenerate || fs.double_root) continue;
    REQUIRE(fs.partners.size() == 2);
    for (const auto& p : fs.partners) {
      CHECK(p.quadric_residual <= 1e-10 * scale);
      CHECK(p.map_residual <= 1e-9 * scale * scale * scale);
      CHECK(max_abs_diff(p.point, w) > kRootDedupTol);
      CHECK(p.point[0] == w[0]);
      CHECK(p.point[2] == w[2]);
    }
    if (k < 2000 && std::abs(w[0]) > 0.2 && std::abs(w[2]) > 0.2 && scale < 20) {
      const auto roots = cubic_oracle_roots(w);
      CHECK(contains(roots, w[3], 1e-6 * scale));
      for (const auto& p : fs.partners) CHECK(contains(roots, p.point[3], 1e-6 * scale));
      ++checked;
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("w4 = 0 gives the partners 1/w3 and (1-i)/(2 w3)") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const Complex w1 = testsupport::random_complex(rng);
    const Complex w3 = testsupport::random_complex(rng);
    const FiberSet fs = fiber({w1, 1.0 / w1, w3, 0.0});
    REQUIRE(fs.partners.size() == 2);
    std::vector<Complex> got{fs.partners[0].point[3], fs.partners[1].point[3]};
    CHECK(contains(got, 1.0 / w3, 1e-10 * (1 + std::abs(1.0 / w3))));
    CHECK(contains(got, (1.0 - I) / (2.0 * w3), 1e-10 * (1 + std::abs(1.0 / w3))));
  }
}

TEST_CASE("degenerate and singleton branches") {
  CHECK(fiber({1.0, 1.0, 0.0, 0.0}).cardinality() == 1);
  CHECK(fiber({0.0, 3.0, 2.0, 0.5}).cardinality() == 1);
  // At a degeneracy product, W's own w4 is a root.
  const Complex p = (3.0 + std::sqrt(2.0) - I) / 6.0;
  const FiberSet fs = fiber({1.0, 1.0 - p, 1.0, p});
  CHECK(fs.degenerate);
  CHECK(fs.partners.size() == 1);
  CHECK_THROWS_AS(fiber({1.0, 1.0, 1.0, 1.0}), std::domain_error);
}

TEST_CASE("double roots at zeros of the discriminant") {
  // 6i p^2 - (2 + 6i) p + 1 = 0 by the quadratic formula.
  const Complex a = 6.0 * I, b = -(2.0 + 6.0 * I), c = 1.0;
  const Complex s = std::sqrt(b * b - 4.0 * a * c);
  for (const Complex p : {(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)}) {
    CHECK(std::abs(discriminant(p)) < 1e-14);
    const FiberSet fs = fiber({1.0, 1.0 - p, 1.0, p});
    CHECK(fs.double_root);
    REQUIRE(fs.partners.size() == 1);
    CHECK(fs.partners[0].multiplicity == 2);
    // Smallest half norm sum on the double-root locus, from |w1|,|w3| scaling.
    const double h = std::abs(1.0 - p) + std::abs(p);
    CHECK(h >= 2.0 / std::sqrt(3.0) - 1e-12);
  }
}

TEST_CASE("triple points on M_t^3 share the image (u, u, 0)") {
  for (double u : {1.0, 2.0, 0.5, 0.8}) {
    const TriplePoint tp = triple_point(u);
    CHECK(tp.t == doctest::Approx(u * u + 1.0 / (2 * u * u)));
    for (const QuadricPoint* p : {&tp.a, &tp.b, &tp.c}) {
      CHECK(quadric_residual(*p) <= 1e-12);
      CHECK(half_norm_sum(*p) == doctest::Approx(tp.t).epsilon(1e-14));
      const MapValue img = eval_F(*p);
      CHECK(std::abs(img[0] - u) == 0.0);
      CHECK(std::abs(img[1] - u) == 0.0);
      CHECK(std::abs(img[2]) < 1e-15);
    }
    CHECK(partner_collision_distance(fiber(tp.a), tp.t) < 1e-14);
  }
  CHECK_THROWS(triple_point(0.0));
  const auto us = triple_point_parameters(1.5);
  REQUIRE(us.size() == 2);
  CHECK(contains({us[0], us[1]}, 1.0, 1e-15));
  CHECK(triple_point_parameters(1.4).empty());
  CHECK(triple_point_parameters(std::sqrt(2.0)).size() == 1);
}

TEST_CASE("partner excess is positive near S^3") {
  for (double t : {1.01, 1.0 + 1e-8}) {
    for (const auto& p : sample_mt(3, t, 500, 10)) {
      CHECK(partner_norm_excess(p.w(), t) > 0.0);
    }
  }
  CHECK_THROWS_AS(partner_norm_excess(Vec4c{1.0, 1.0, 1.0, 0.0}, 1.2), std::domain_error);
}

TEST_CASE("fiber json lists both partners") {
  const auto j = to_json(fiber({1.0, 1.0, 1.0, 0.0}));
  CHECK(j["cardinality"] == 3);
  CHECK(j["partners"].size() == 2);
}
