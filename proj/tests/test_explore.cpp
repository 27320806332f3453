#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "arlab/armap.hpp"
#include "arlab/explore.hpp"
#include "arlab/fibers.hpp"
#include "support.hpp"

using namespace arlab;

namespace {

ScanConfig quick(std::vector<double> grid, int starts = 16, int evals = 800) {
  ScanConfig c;
  c.t_grid = std::move(grid);
  c.multistart_count = starts;
  c.max_evals = evals;
  c.samples_per_t = 128;
  c.seed = 2024;
  return c;
}

double sampled_min_abs_jacobian(double t, int count) {
  double best = 1e9;
  for (const auto& p : sample_mt(3, t, count, 77)) {
    const Vec4c w = p.w();
    const Complex j = std::abs(w[0]) >= std::abs(w[2]) ? jacobian_phi(w) : jacobian_psi(w);
    best = std::min(best, std::abs(j));
  }
  return best;
}

}  // namespace

TEST_CASE("grids") {
  const auto g = make_grid(1.01, 1.20, 0.002);
  CHECK(g.size() == 96);
  CHECK(g.back() == doctest::Approx(1.20).epsilon(1e-12));
  CHECK(parse_grid("1.5") == std::vector<double>{1.5});
  CHECK(parse_grid("1:1.2:0.1").size() == 3);
  CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("a:b:c"), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 2, 0), std::invalid_argument);
}

TEST_CASE("config validation") {
  ScanConfig c = quick({1.1, 1.2});
  CHECK_NOTHROW(c.validate());
  c.t_grid = {1.2, 1.1};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.t_grid = {0.9};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = quick({1.1});
  c.multistart_count = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(degeneracy_scan(1.0, quick({1.1})), std::invalid_argument);
  CHECK(quick({1.1}).to_json()["map_source"] == "BUILTIN_F");
}

TEST_CASE("chart stays on M_t^3 and has full rank") {
  for (const auto& p : sample_mt(3, 1.3, 20, 4)) {
    const MtChart chart(p, 1.3);
    const std::vector<double> zero(5, 0.0);
    CHECK(max_abs_diff(chart.at(zero), p.w()) < 1e-14);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> v(5);
      for (auto& x : v) x = g(rng);
      const Vec4c w = chart.at(v);
      CHECK(quadric_residual(w) <= 1e-10);
      CHECK(norm_sum(w) / 2.0 == doctest::Approx(1.3).epsilon(1e-12));
      CHECK(max_abs_diff(chart.frame_at(v).w(), w) < 1e-12);
    }
    // Tangent directions are independent: FD derivatives have full rank 5.
    Eigen::Matrix<double, 8, 5> d;
    for (int i = 0; i < 5; ++i) {
      std::vector<double> a(5, 0.0), b(5, 0.0);
      a[static_cast<std::size_t>(i)] = 1e-6;
      b[static_cast<std::size_t>(i)] = -1e-6;
      const Vec4c wa = chart.at(a), wb = chart.at(b);
      for (int k = 0; k < 4; ++k) {
        d(2 * k, i) = (wa[static_cast<std::size_t>(k)] - wb[static_cast<std::size_t>(k)]).real() / 2e-6;
        d(2 * k + 1, i) = (wa[static_cast<std::size_t>(k)] - wb[static_cast<std::size_t>(k)]).imag() / 2e-6;
      }
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 5>> svd(d);
    CHECK(svd.singularValues()(4) > 0.1);
  }
}

TEST_CASE("verdict precedence") {
  CHECK(combine(Verdict::EmbeddingEvidence, Verdict::Collision) == Verdict::Collision);
  CHECK(combine(Verdict::Degenerate, Verdict::Collision) == Verdict::Collision);
  CHECK(combine(Verdict::Unknown, Verdict::Degenerate) == Verdict::Degenerate);
  CHECK(combine(Verdict::EmbeddingEvidence, Verdict::Unknown) == Verdict::Unknown);
  CHECK(combine(Verdict::EmbeddingEvidence, Verdict::EmbeddingEvidence) == Verdict::EmbeddingEvidence);
}

TEST_CASE("degeneracy scan below, at and above the threshold") {
  const ScanConfig c = quick({1.05});
  const DegeneracyResult low = degeneracy_scan(1.05, c);
  CHECK(low.verdict == Verdict::EmbeddingEvidence);
  // the optimizer must beat plain sampling and sits at the dense-scan floor
  CHECK(low.min_abs_jacobian <= sampled_min_abs_jacobian(1.05, 20000));
  CHECK(low.min_abs_jacobian == doctest::Approx(0.0536).epsilon(2e-3));
  CHECK(low.witness.reverified == std::abs(jacobian_restricted(low.witness.point).value));
  CHECK(on_mt(low.witness.point, 1.05, 1e-10));

  CHECK(degeneracy_scan(1.0669, c).min_abs_jacobian <= 1e-3);
  const DegeneracyResult at = degeneracy_scan(degeneracy_threshold(), c);
  CHECK(at.min_abs_jacobian <= 1e-6);
  const DegeneracyResult high = degeneracy_scan(1.08, c);
  CHECK(high.verdict == Verdict::Degenerate);
  CHECK(high.min_abs_jacobian < 1e-10);
}

TEST_CASE("projected gradient optimizer also works") {
  ScanConfig c = quick({1.07});
  c.optimizer = Optimizer::ProjectedGradient;
  CHECK(degeneracy_scan(1.07, c).verdict == Verdict::Degenerate);
  CHECK(degeneracy_scan(1.03, c).min_abs_jacobian == doctest::Approx(0.1297).epsilon(0.02));
}

TEST_CASE("scans are deterministic, also across worker counts") {
  ScanConfig a = quick({1.06});
  ScanConfig b = a;
  b.workers = 3;
  const auto r1 = injectivity_scan(1.06, a);
  const auto r2 = injectivity_scan(1.06, a);
  const auto r3 = injectivity_scan(1.06, b);
  CHECK(r1.min_collision_distance == r2.min_collision_distance);
  CHECK(r1.min_collision_distance == r3.min_collision_distance);
  CHECK(max_abs_diff(r1.witness.point, r3.witness.point) == 0.0);
  CHECK(r1.cardinality_histogram == r3.cardinality_histogram);
  ScanConfig other = a;
  other.seed = 5;
  CHECK(injectivity_scan(1.06, other).witness.start_index >= 0);
}

TEST_CASE("injectivity scan") {
  const ScanConfig c = quick({1.01});
  const InjectivityResult r = injectivity_scan(1.01, c);
  CHECK(r.verdict == Verdict::EmbeddingEvidence);
  CHECK(r.min_collision_distance == doctest::Approx(0.1595).epsilon(5e-3));
  CHECK(r.min_signed_excess > 0.0);
  int total = 0;
  for (const auto& [k, v] : r.cardinality_histogram) total += v;
  CHECK(total == c.samples_per_t + 1);
  // no double roots below 2/sqrt 3, so the discriminant witness is generic too
  CHECK(r.cardinality_histogram.at("3") == c.samples_per_t + 1);

  const InjectivityResult hi = injectivity_scan(1.5, c);
  CHECK(hi.verdict == Verdict::Collision);
  CHECK(hi.min_collision_distance < 1e-8);
  const FiberSet fs = fiber(hi.witness.point);
  CHECK(fs.cardinality() == 3);
  CHECK(on_mt(hi.closest_partner, 1.5, 1e-8));
}

TEST_CASE("double roots appear beyond 2/sqrt 3") {
  const ScanConfig c = quick({1.15});
  CHECK_FALSE(double_root_scan(1.15, c).double_root);
  CHECK(double_root_scan(1.15, c).min_abs_discriminant > 1e-3);
  const DoubleRootResult r = double_root_scan(1.17, c);
  CHECK(r.double_root);
  CHECK(fiber(r.witness.point).double_root);
}

TEST_CASE("pair search: built-in F agrees with the closed-form fiber scan") {
  const ScanConfig c = quick({1.05});
  const PolarizedMap g = ahern_rudin_G();
  const auto pair = pair_collision_scan(g, 1.05, c, false);
  CHECK(pair.verdict == injectivity_scan(1.05, c).verdict);
  CHECK(pair.verdict == Verdict::EmbeddingEvidence);
  CHECK(pair.pair_separation >= kPairSeparation);
}

TEST_CASE("pair search: radial q collides at (W_u, W_u')") {
  ScanConfig c = quick({1.5});
  c.arfamily_q = parse_poly("z*zb*w*wb + 2*z*zb");
  const ScanReport rep = arfamily_scan(c);
  REQUIRE(rep.records.size() == 1);
  const auto& pair = *rep.records[0].pair;
  CHECK(pair.verdict == Verdict::Collision);
  CHECK(pair.min_pair_distance < 1e-8);
  CHECK(on_mt(pair.pair_partner, 1.5, 1e-10));
  CHECK(rep.config["known_collision_seeds"] == true);
}

TEST_CASE("pair search: q = w is not an embedding") {
  // G = (w1, w3, w2) forgets w4 on the circle w3 = 0 of M_t^3.
  ScanConfig c = quick({1.05, 1.5});
  c.arfamily_q = parse_poly("w");
  for (const auto& rec : arfamily_scan(c).records) {
    CHECK(rec.verdict != Verdict::EmbeddingEvidence);
    CHECK(rec.pair->min_abs_jacobian < kDegenerateThreshold);
  }
}

TEST_CASE("empirical t0 bracket on a coarse grid") {
  const ScanReport rep = empirical_t0(quick(make_grid(1.04, 1.10, 0.02), 16, 600), 1e-3);
  REQUIRE(rep.empirical_t0);
  REQUIRE(rep.empirical_t0->t_low);
  REQUIRE(rep.empirical_t0->t_high);
  const double lo = *rep.empirical_t0->t_low, hi = *rep.empirical_t0->t_high;
  CHECK(hi - lo <= 1e-3);
  CHECK(lo <= degeneracy_threshold());
  CHECK(hi >= degeneracy_threshold() - 1e-3);
  CHECK(lo >= 1.0 + 1e-6);
  for (std::size_t k = 1; k < rep.records.size(); ++k) CHECK(rep.records[k].t > rep.records[k - 1].t);

  const auto j = rep.to_json();
  CHECK(j["kind"] == "t0");
  CHECK(j["records"].size() == rep.records.size());
  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("t,min_abs_J,min_excess,verdict\n", 0) == 0);
}

TEST_CASE("monotonicity evidence near the threshold") {
  const ScanConfig c = quick({1.04});
  double prev = 1e9;
  int violations = 0;
  for (double t : make_grid(1.04, 1.066, 0.002)) {
    const double v = degeneracy_scan(t, c).min_abs_jacobian;
    if (v > prev * (1 + 1e-6)) ++violations;
    prev = v;
  }
  if (violations > 0) MESSAGE("min |J| not monotone on the grid: " << violations << " violations");
  CHECK(violations <= 1);
}
