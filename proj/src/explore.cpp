#include "arlab/explore.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <mutex>
#include <random>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "arlab/armap.hpp"
#include "arlab/fibers.hpp"
#include "arlab/optimize.hpp"

namespace arlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWitnessTol = 1e-10;
constexpr int kRefineCount = 4;
constexpr double kSeedExact = 1e-14;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeds depend only on (config seed, t, scan kind), so a t's result does not
// depend on the rest of the grid.
std::uint64_t derive_seed(std::uint64_t seed, double t, std::uint64_t kind) {
  return mix(mix(seed) ^ mix(std::bit_cast<std::uint64_t>(t)) ^ mix(kind * 0x51ed270b27ULL));
}

enum Kind : std::uint64_t { kDegeneracy = 1, kInjectivity = 2, kSigned = 3, kDoubleRoot = 4,
                            kPair = 5, kPairDegeneracy = 6 };

void require_t(double t) {
  if (!(t > 1.0)) throw std::invalid_argument("t must exceed 1");
}

template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto count = static_cast<std::size_t>(std::max(1, workers));
  if (count == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t k = 0; k < std::min(count, n); ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// |J| with the chart choice of jacobian_restricted, without the quadric check.
double abs_jacobian(const Vec4c& w) {
  return std::abs(std::abs(w[0]) >= std::abs(w[2]) ? jacobian_phi(w) : jacobian_psi(w));
}

using PointObjective = std::function<double(const Vec4c&, std::span<const double>)>;

struct Start {
  RealFramePoint frame;
  std::vector<double> extra;
  Provenance provenance = Provenance::RandomStart;
};

struct LocalMin {
  RealFramePoint frame;
  Vec4c point{};
  std::vector<double> extra;
  double value = kInf;
  int evaluations = 0;
};

// Minimizes f over M_t^3 (times extra free parameters) by chart-based local
// search, re-centring the chart at the incumbent between rounds.
LocalMin minimize_on_mt(const PointObjective& f, const Start& start, double t,
                        const ScanConfig& cfg) {
  LocalMin best;
  best.frame = project_to_mt(start.frame, t);
  best.point = best.frame.w();
  best.extra = start.extra;
  best.value = f(best.point, best.extra);
  best.evaluations = 1;

  // A seed that is already an exact collision is kept as is.
  if (start.provenance != Provenance::RandomStart && best.value < kSeedExact) return best;

  double step = 0.25;
  const std::size_t dim = MtChart::kDim + start.extra.size();
  for (int round = 0; round < 4; ++round) {
    const int budget = cfg.max_evals - best.evaluations;
    if (budget < 20) break;
    const MtChart chart(best.frame, t);
    const Objective chart_objective = [&](std::span<const double> v) {
      return f(chart.at(v.first(MtChart::kDim)), v.subspan(MtChart::kDim));
    };
    std::vector<double> x0(dim, 0.0);
    std::copy(best.extra.begin(), best.extra.end(), x0.begin() + MtChart::kDim);
    const MinimizeResult r = cfg.optimizer == Optimizer::NelderMeadOnChart
                                 ? nelder_mead(chart_objective, x0, step, budget)
                                 : gradient_descent(chart_objective, x0, 0.1 * step, budget);
    best.evaluations += r.evaluations;
    if (!(r.value < best.value)) break;
    const std::span<const double> rv(r.x);
    best.frame = chart.frame_at(rv.first(MtChart::kDim));
    best.point = best.frame.w();
    best.extra.assign(r.x.begin() + MtChart::kDim, r.x.end());
    best.value = f(best.point, best.extra);
    step *= 0.1;
  }
  return best;
}

std::vector<LocalMin> multistart(const PointObjective& f, const std::vector<Start>& starts,
                                 double t, const ScanConfig& cfg) {
  std::vector<LocalMin> out(starts.size());
  parallel_for(starts.size(), cfg.workers,
               [&](std::size_t i) { out[i] = minimize_on_mt(f, starts[i], t, cfg); });
  return out;
}

// Index of the smallest value; ties go to the earliest start.
std::vector<std::size_t> ranking(const std::vector<LocalMin>& mins) {
  std::vector<std::size_t> idx(mins.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return mins[a].value < mins[b].value; });
  return idx;
}

// Best index, except that a seeded start below `hit` wins over random ones:
// collisions form a hypersurface, and the seeded witnesses are the explicit ones.
std::size_t pick_witness(const std::vector<LocalMin>& mins, const std::vector<Start>& starts, double hit) {
  const auto order = ranking(mins);
  for (std::size_t i : order) {
    if (mins[i].value >= hit) break;
    if (starts[i].provenance != Provenance::RandomStart) return i;
  }
  return order.front();
}

std::vector<Start> random_starts(double t, int count, std::uint64_t seed) {
  std::vector<Start> out;
  for (auto& p : sample_mt(3, t, count, seed)) out.push_back({std::move(p), {}, Provenance::RandomStart});
  return out;
}

// Polishes a near-zero of the complex function h(W) with Gauss-Newton in a
// chart around `m`. Returns the refined point when it improves |J|-style
// objective f.
void refine_zero(LocalMin& m, double t, const std::function<Complex(const Vec4c&)>& h,
                 const std::function<double(const Vec4c&)>& f) {
  const MtChart chart(m.frame, t);
  const PlanarResidual g = [&](std::span<const double> v) {
    const Complex c = h(chart.at(v));
    return std::array<double, 2>{c.real(), c.imag()};
  };
  const ZeroResult z = gauss_newton_zero(g, std::vector<double>(MtChart::kDim, 0.0));
  m.evaluations += z.iterations * (2 * static_cast<int>(MtChart::kDim) + 1);
  const RealFramePoint frame = chart.frame_at(z.x);
  const Vec4c point = frame.w();
  const double value = f(point);
  if (value < m.value) {
    m.frame = frame;
    m.point = point;
    m.value = value;
  }
}

void require_on_mt(const Vec4c& w, double t, const char* what) {
  if (!(quadric_residual(w) <= kWitnessTol && std::abs(norm_sum(w) / 2.0 - t) <= kWitnessTol)) {
    std::ostringstream os;
    os << what << ": witness is not on M_t^3 for t = " << t;
    throw InvariantViolation(os.str());
  }
}

Verdict threshold_verdict(double value, double threshold, Verdict hit) {
  if (value < threshold) return hit;
  if (value > kEvidenceFactor * threshold) return Verdict::EmbeddingEvidence;
  return Verdict::Unknown;
}

Witness make_witness(const LocalMin& m, const std::vector<Start>& starts, std::size_t index) {
  Witness w;
  w.point = m.point;
  w.value = m.value;
  w.provenance = starts[index].provenance;
  w.start_index = static_cast<int>(index);
  w.evaluations = m.evaluations;
  return w;
}

std::string cardinality_key(const FiberSet& fs) {
  if (fs.partners.empty()) return fs.double_root || fs.degenerate ? "2:degenerate" : "1";
  if (fs.double_root) return "2:double_root";
  if (fs.degenerate) return "2:degenerate";
  return std::to_string(fs.cardinality());
}

// Second point W' with the same (w1, w3) and the same norm sum, on the circle
// parametrized by theta; returns its separation |W - W'|.
Vec4c circle_partner(const Vec4c& w, double theta, double& separation) {
  const double d = std::norm(w[0]) + std::norm(w[2]);
  const Complex k = std::conj(w[1]) * w[2] - std::conj(w[3]) * w[0];
  const Complex e = std::polar(1.0, theta);
  const Complex s = (-2.0 * (e * k).real() / d) * e;
  separation = std::abs(s) * std::sqrt(d);
  return {w[0], w[1] + w[2] * s, w[2], w[3] - w[0] * s};
}

nlohmann::json finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

const char* to_string(Optimizer o) {
  return o == Optimizer::NelderMeadOnChart ? "NELDER_MEAD_ON_CHART" : "PROJECTED_GRADIENT";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::EmbeddingEvidence: return "EMBEDDING_EVIDENCE";
    case Verdict::Degenerate: return "DEGENERATE";
    case Verdict::Collision: return "COLLISION";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::RandomStart: return "random_start";
    case Provenance::TriplePointSeed: return "triple_point_seed";
    case Provenance::KnownCollisionSeed: return "known_collision_seed";
  }
  return "random_start";
}

void ScanConfig::validate() const {
  if (t_grid.empty()) throw std::invalid_argument("t grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 1.0)) throw std::invalid_argument("t must exceed 1");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("t grid must be strictly increasing");
    }
  }
  if (samples_per_t < 1 || multistart_count < 1 || max_evals < 1 || workers < 1) {
    throw std::invalid_argument("sample, start, evaluation and worker counts must be at least 1");
  }
}

nlohmann::json ScanConfig::to_json() const {
  return {{"t_grid", t_grid},
          {"samples_per_t", samples_per_t},
          {"multistart_count", multistart_count},
          {"max_evals", max_evals},
          {"optimizer", arlab::to_string(optimizer)},
          {"seed", seed},
          {"workers", workers},
          {"map_source", arfamily_q ? "ARFAMILY(" + arfamily_q->to_string() + ")" : "BUILTIN_F"}};
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (stop < start) throw std::invalid_argument("grid stop must not precede start");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + 1e-12) break;
    out.push_back(std::min(v, std::max(stop, v - 1e-12)));
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed grid '" + text + "'");
    }
    if (used != item.size()) throw std::invalid_argument("malformed grid '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:step");
  return make_grid(parts[0], parts[1], parts[2]);
}

MtChart::MtChart(const RealFramePoint& center, double t) : t_(t) {
  const RealFramePoint c = project_to_mt(center, t);
  std::array<double, 4> xh{}, yh{};
  const double rx = c.x_norm();
  const double ry = c.y_norm();
  for (std::size_t i = 0; i < 4; ++i) {
    x0_[i] = c.x[i];
    y0_[i] = c.y[i];
    xh[i] = c.x[i] / rx;
    yh[i] = c.y[i] / ry;
  }
  // Complete {xh, yh} with the two standard basis vectors that survive
  // Gram-Schmidt best.
  std::vector<std::array<double, 4>> frame{xh, yh};
  std::array<std::pair<double, std::array<double, 4>>, 4> candidates;
  for (std::size_t k = 0; k < 4; ++k) {
    std::array<double, 4> e{};
    e[k] = 1.0;
    for (const auto& f : frame) {
      const double d = std::inner_product(e.begin(), e.end(), f.begin(), 0.0);
      for (std::size_t i = 0; i < 4; ++i) e[i] -= d * f[i];
    }
    candidates[k] = {std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0)), e};
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < 2; ++k) {
    auto e = candidates[static_cast<std::size_t>(k)].second;
    for (const auto& f : frame) {
      const double d = std::inner_product(e.begin(), e.end(), f.begin(), 0.0);
      for (std::size_t i = 0; i < 4; ++i) e[i] -= d * f[i];
    }
    const double len = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
    for (auto& v : e) v /= len;
    frame.push_back(e);
  }
  const auto& e1 = frame[2];
  const auto& e2 = frame[3];
  const double rot = std::hypot(rx, ry);
  for (std::size_t i = 0; i < 4; ++i) {
    basis_[0][i] = e1[i];
    basis_[1][i] = e2[i];
    basis_[2][4 + i] = e1[i];
    basis_[3][4 + i] = e2[i];
    basis_[4][i] = rx * yh[i] / rot;
    basis_[4][4 + i] = -ry * xh[i] / rot;
  }
}

RealFramePoint MtChart::frame_at(std::span<const double> v) const {
  std::array<double, 8> p{};
  for (std::size_t i = 0; i < 4; ++i) {
    p[i] = x0_[i];
    p[4 + i] = y0_[i];
  }
  for (std::size_t k = 0; k < kDim && k < v.size(); ++k) {
    for (std::size_t i = 0; i < 8; ++i) p[i] += v[k] * basis_[k][i];
  }
  RealFramePoint f;
  f.n = 3;
  f.x.assign(p.begin(), p.begin() + 4);
  f.y.assign(p.begin() + 4, p.end());
  return project_to_mt(f, t_);
}

Vec4c MtChart::at(std::span<const double> v) const {
  std::array<double, 8> p{};
  for (std::size_t i = 0; i < 4; ++i) {
    p[i] = x0_[i];
    p[4 + i] = y0_[i];
  }
  for (std::size_t k = 0; k < kDim && k < v.size(); ++k) {
    for (std::size_t i = 0; i < 8; ++i) p[i] += v[k] * basis_[k][i];
  }
  double xx = 0.0;
  for (std::size_t i = 0; i < 4; ++i) xx += p[i] * p[i];
  const double xn = std::sqrt(xx);
  double along = 0.0;
  for (std::size_t i = 0; i < 4; ++i) along += p[4 + i] * p[i] / xn;
  double yy = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    p[4 + i] -= along * p[i] / xn;
    yy += p[4 + i] * p[4 + i];
  }
  const double sx = mt_x_radius(t_) / xn;
  const double sy = yy > 0.0 ? mt_y_radius(t_) / std::sqrt(yy) : 0.0;
  Vec4c z;
  for (std::size_t i = 0; i < 4; ++i) z[i] = Complex{p[i] * sx, p[4 + i] * sy};
  return to_w_coords(z);
}

nlohmann::json to_json(const Witness& w) {
  return {{"point", to_json(w.point)},
          {"value", finite_or_null(w.value)},
          {"reverified", finite_or_null(w.reverified)},
          {"provenance", to_string(w.provenance)},
          {"start_index", w.start_index},
          {"evaluations", w.evaluations},
          {"quadric_residual", quadric_residual(w.point)},
          {"half_norm_sum", norm_sum(w.point) / 2.0}};
}

Verdict combine(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::Collision: return 3;
      case Verdict::Degenerate: return 2;
      case Verdict::Unknown: return 1;
      case Verdict::EmbeddingEvidence: return 0;
    }
    return 1;
  };
  return rank(a) >= rank(b) ? a : b;
}

DegeneracyResult degeneracy_scan(double t, const ScanConfig& cfg) {
  require_t(t);
  const auto starts = random_starts(t, cfg.multistart_count, derive_seed(cfg.seed, t, kDegeneracy));
  const PointObjective f = [](const Vec4c& w, std::span<const double>) { return abs_jacobian(w); };
  auto mins = multistart(f, starts, t, cfg);
  const auto order = ranking(mins);
  for (std::size_t k = 0; k < std::min<std::size_t>(kRefineCount, order.size()); ++k) {
    refine_zero(mins[order[k]], t, [](const Vec4c& w) { return degeneracy_polynomial(w[2] * w[3]); },
                abs_jacobian);
  }
  const auto best = ranking(mins).front();

  DegeneracyResult r;
  r.t = t;
  r.witness = make_witness(mins[best], starts, best);
  require_on_mt(r.witness.point, t, "degeneracy_scan");
  r.witness.reverified = std::abs(jacobian_restricted(r.witness.point).value);
  r.min_abs_jacobian = r.witness.reverified;
  r.verdict = threshold_verdict(r.min_abs_jacobian, kDegenerateThreshold, Verdict::Degenerate);
  return r;
}

DoubleRootResult double_root_scan(double t, const ScanConfig& cfg) {
  require_t(t);
  const auto starts = random_starts(t, cfg.multistart_count, derive_seed(cfg.seed, t, kDoubleRoot));
  auto disc_abs = [](const Vec4c& w) { return std::abs(discriminant(w[2] * w[3])); };
  const PointObjective f = [&](const Vec4c& w, std::span<const double>) { return disc_abs(w); };
  auto mins = multistart(f, starts, t, cfg);
  const auto order = ranking(mins);
  for (std::size_t k = 0; k < std::min<std::size_t>(kRefineCount, order.size()); ++k) {
    refine_zero(mins[order[k]], t, [](const Vec4c& w) { return discriminant(w[2] * w[3]); },
                disc_abs);
  }
  const auto best = ranking(mins).front();

  DoubleRootResult r;
  r.t = t;
  r.witness = make_witness(mins[best], starts, best);
  require_on_mt(r.witness.point, t, "double_root_scan");
  r.witness.reverified = disc_abs(r.witness.point);
  r.min_abs_discriminant = r.witness.reverified;
  r.double_root = fiber(r.witness.point).double_root;
  return r;
}

InjectivityResult injectivity_scan(double t, const ScanConfig& cfg) {
  require_t(t);
  std::vector<Start> starts;
  for (double u : triple_point_parameters(t)) {
    const TriplePoint tp = triple_point(u);
    for (const QuadricPoint* p : {&tp.a, &tp.b, &tp.c}) {
      starts.push_back({RealFramePoint::from_w(p->w()), {}, Provenance::TriplePointSeed});
    }
  }
  for (auto& s : random_starts(t, cfg.multistart_count, derive_seed(cfg.seed, t, kInjectivity))) {
    starts.push_back(std::move(s));
  }

  const PointObjective f = [t](const Vec4c& w, std::span<const double>) {
    return partner_collision_distance(fiber(w), t);
  };
  const auto mins = multistart(f, starts, t, cfg);
  const auto best = pick_witness(mins, starts, kCollisionThreshold);

  InjectivityResult r;
  r.t = t;
  r.witness = make_witness(mins[best], starts, best);
  require_on_mt(r.witness.point, t, "injectivity_scan");
  const FiberSet fs = fiber(r.witness.point);
  r.witness.reverified = partner_collision_distance(fs, t);
  r.min_collision_distance = r.witness.reverified;
  for (const auto& p : fs.partners) {
    if (std::abs(norm_sum(p.point) / 2.0 - t) == r.min_collision_distance) r.closest_partner = p.point;
  }

  if (r.min_collision_distance < kCollisionThreshold) {
    const double scale = std::max(1.0, norm_sum(r.witness.point));
    const bool ok = std::any_of(fs.partners.begin(), fs.partners.end(), [&](const FiberPartner& p) {
      return std::abs(norm_sum(p.point) / 2.0 - t) < kCollisionThreshold &&
             p.quadric_residual <= kWitnessTol * scale && p.map_residual <= kWitnessTol * scale * scale;
    });
    if (!ok) throw InvariantViolation("injectivity_scan: collision witness failed re-verification");
    r.verdict = Verdict::Collision;
  } else {
    r.verdict = threshold_verdict(r.min_collision_distance, kCollisionThreshold, Verdict::Collision);
  }

  // Diagnostics: signed excess and fiber cardinalities over independent samples.
  r.min_signed_excess = kInf;
  auto consider_signed = [&](const Vec4c& w, const FiberSet& s) {
    const double e = partner_norm_excess(s, t);
    if (e < r.min_signed_excess) {
      r.min_signed_excess = e;
      r.signed_excess_point = w;
    }
  };
  for (const auto& p : sample_mt(3, t, cfg.samples_per_t, derive_seed(cfg.seed, t, kSigned))) {
    const Vec4c w = p.w();
    const FiberSet s = fiber(w);
    consider_signed(w, s);
    ++r.cardinality_histogram[cardinality_key(s)];
  }
  for (const auto& m : mins) consider_signed(m.point, fiber(m.point));

  r.double_root = double_root_scan(t, cfg);
  ++r.cardinality_histogram[cardinality_key(fiber(r.double_root->witness.point))];
  return r;
}

PairCollisionResult pair_collision_scan(const PolarizedMap& g, double t, const ScanConfig& cfg,
                                        bool inject_known_collisions) {
  require_t(t);
  PairCollisionResult r;
  r.t = t;

  // Degeneracy of G restricted to Q^3, by finite differences.
  {
    const auto starts = random_starts(t, cfg.multistart_count, derive_seed(cfg.seed, t, kPairDegeneracy));
    const PointObjective f = [&g](const Vec4c& w, std::span<const double>) {
      return std::abs(g.restricted_jacobian_fd(w).value);
    };
    const auto mins = multistart(f, starts, t, cfg);
    const auto best = ranking(mins).front();
    r.degeneracy_witness = make_witness(mins[best], starts, best);
    require_on_mt(r.degeneracy_witness.point, t, "pair_collision_scan");
    r.degeneracy_witness.reverified = std::abs(g.restricted_jacobian_fd(r.degeneracy_witness.point).value);
    r.min_abs_jacobian = r.degeneracy_witness.reverified;
  }

  // Pairs (W, W') with equal (w1, w3) on M_t^3, W' on the circle through W.
  std::vector<Start> starts;
  if (inject_known_collisions) {
    for (double u : triple_point_parameters(t)) {
      starts.push_back({RealFramePoint::from_w(triple_point(u).a.w()), {std::numbers::pi},
                        Provenance::KnownCollisionSeed});
    }
  }
  {
    auto rng = make_stream(derive_seed(cfg.seed, t, kPair), 0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (auto& s : random_starts(t, cfg.multistart_count, derive_seed(cfg.seed, t, kPair))) {
      s.extra = {angle(rng)};
      starts.push_back(std::move(s));
    }
  }
  const PointObjective f = [&g](const Vec4c& w, std::span<const double> extra) {
    double sep = 0.0;
    const Vec4c other = circle_partner(w, extra[0], sep);
    if (sep < kPairSeparation) return 1e3 + (kPairSeparation - sep);
    return std::abs(g.third().evaluate(w) - g.third().evaluate(other));
  };
  const auto mins = multistart(f, starts, t, cfg);
  const auto best = pick_witness(mins, starts, kCollisionThreshold);
  r.pair_witness = make_witness(mins[best], starts, best);
  require_on_mt(r.pair_witness.point, t, "pair_collision_scan");
  r.pair_partner = circle_partner(r.pair_witness.point, mins[best].extra.at(0), r.pair_separation);
  require_on_mt(r.pair_partner, t, "pair_collision_scan partner");
  {
    const MapValue a = g(r.pair_witness.point);
    const MapValue b = g(r.pair_partner);
    double d = 0.0;
    for (std::size_t k = 0; k < 3; ++k) d = std::max(d, std::abs(a[k] - b[k]));
    r.pair_witness.reverified = r.pair_separation >= kPairSeparation ? d : kInf;
  }
  r.min_pair_distance = r.pair_witness.reverified;

  const Verdict collision =
      threshold_verdict(r.min_pair_distance, kCollisionThreshold, Verdict::Collision);
  const Verdict degenerate =
      threshold_verdict(r.min_abs_jacobian, kDegenerateThreshold, Verdict::Degenerate);
  r.verdict = combine(collision, degenerate);
  return r;
}

namespace {

TRecord evaluate_t(double t, const ScanConfig& cfg) {
  TRecord rec;
  rec.t = t;
  rec.degeneracy = degeneracy_scan(t, cfg);
  rec.injectivity = injectivity_scan(t, cfg);
  rec.verdict = combine(rec.degeneracy->verdict, rec.injectivity->verdict);
  return rec;
}

}  // namespace

ScanReport run_degeneracy_grid(const ScanConfig& cfg) {
  cfg.validate();
  ScanReport rep{"degeneracy", cfg.to_json(), {}, std::nullopt};
  for (double t : cfg.t_grid) {
    TRecord rec;
    rec.t = t;
    rec.degeneracy = degeneracy_scan(t, cfg);
    rec.verdict = rec.degeneracy->verdict;
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

ScanReport run_injectivity_grid(const ScanConfig& cfg) {
  cfg.validate();
  ScanReport rep{"injectivity", cfg.to_json(), {}, std::nullopt};
  for (double t : cfg.t_grid) {
    TRecord rec;
    rec.t = t;
    rec.injectivity = injectivity_scan(t, cfg);
    rec.verdict = rec.injectivity->verdict;
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

ScanReport empirical_t0(const ScanConfig& cfg, double resolution) {
  cfg.validate();
  ScanReport rep{"t0", cfg.to_json(), {}, T0Bracket{}};
  rep.config["resolution"] = resolution;
  for (double t : cfg.t_grid) rep.records.push_back(evaluate_t(t, cfg));

  T0Bracket bracket;
  std::size_t flip = rep.records.size();
  for (std::size_t k = 0; k < rep.records.size(); ++k) {
    if (rep.records[k].verdict != Verdict::EmbeddingEvidence) {
      flip = k;
      break;
    }
    bracket.t_low = rep.records[k].t;
  }
  if (flip < rep.records.size()) {
    bracket.t_high = rep.records[flip].t;
    if (bracket.t_low) {
      double lo = *bracket.t_low;
      double hi = *bracket.t_high;
      while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        TRecord rec = evaluate_t(mid, cfg);
        if (rec.verdict == Verdict::EmbeddingEvidence) {
          lo = mid;
        } else {
          hi = mid;
        }
        rep.records.push_back(std::move(rec));
      }
      bracket.t_low = lo;
      bracket.t_high = hi;
    }
  }
  std::stable_sort(rep.records.begin(), rep.records.end(),
                   [](const TRecord& a, const TRecord& b) { return a.t < b.t; });
  rep.empirical_t0 = bracket;
  return rep;
}

ScanReport arfamily_scan(const ScanConfig& cfg) {
  cfg.validate();
  ScanReport rep{"arfamily", cfg.to_json(), {}, std::nullopt};
  bool inject = false;
  PolarizedMap g = ahern_rudin_G();
  if (cfg.arfamily_q) {
    g = build_G(*cfg.arfamily_q);
    try {
      inject = divisibility_check(*cfg.arfamily_q);
    } catch (const ArFamilyError&) {
      // Not in C[|z|^2, |w|^2]; W_u and W_u' still collide when zb*wb divides P.
      const HarmonicPoly p = ar_operator(*cfg.arfamily_q);
      inject = std::all_of(p.terms().begin(), p.terms().end(),
                           [](const auto& kv) { return kv.first[1] >= 1 && kv.first[3] >= 1; });
    }
  }
  rep.config["known_collision_seeds"] = inject;
  rep.config["third_component"] = g.third().to_string();
  for (double t : cfg.t_grid) {
    TRecord rec;
    rec.t = t;
    rec.pair = pair_collision_scan(g, t, cfg, inject);
    rec.verdict = rec.pair->verdict;
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

nlohmann::json ScanReport::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j{{"t", r.t}, {"verdict", arlab::to_string(r.verdict)}};
    if (r.degeneracy) {
      j["degeneracy"] = {{"min_abs_jacobian", r.degeneracy->min_abs_jacobian},
                         {"witness", arlab::to_json(r.degeneracy->witness)},
                         {"verdict", arlab::to_string(r.degeneracy->verdict)}};
    }
    if (r.injectivity) {
      const auto& in = *r.injectivity;
      nlohmann::json ij{{"min_collision_distance", finite_or_null(in.min_collision_distance)},
                        {"witness", arlab::to_json(in.witness)},
                        {"closest_partner", arlab::to_json(in.closest_partner)},
                        {"min_signed_excess", finite_or_null(in.min_signed_excess)},
                        {"signed_excess_point", arlab::to_json(in.signed_excess_point)},
                        {"fiber_cardinality_histogram", in.cardinality_histogram},
                        {"verdict", arlab::to_string(in.verdict)}};
      if (in.double_root) {
        ij["double_root"] = {{"min_abs_discriminant", in.double_root->min_abs_discriminant},
                             {"witness", arlab::to_json(in.double_root->witness)},
                             {"double_root", in.double_root->double_root}};
      }
      j["injectivity"] = ij;
    }
    if (r.pair) {
      const auto& p = *r.pair;
      j["pair_collision"] = {{"min_abs_jacobian", p.min_abs_jacobian},
                             {"degeneracy_witness", arlab::to_json(p.degeneracy_witness)},
                             {"min_pair_distance", finite_or_null(p.min_pair_distance)},
                             {"pair_witness", arlab::to_json(p.pair_witness)},
                             {"pair_partner", arlab::to_json(p.pair_partner)},
                             {"pair_separation", p.pair_separation},
                             {"verdict", arlab::to_string(p.verdict)}};
    }
    recs.push_back(std::move(j));
  }
  nlohmann::json out{{"kind", kind}, {"config", config}, {"records", recs}};
  if (empirical_t0) {
    out["empirical_t0"] = {{"t_low", empirical_t0->t_low ? nlohmann::json(*empirical_t0->t_low) : nullptr},
                           {"t_high", empirical_t0->t_high ? nlohmann::json(*empirical_t0->t_high) : nullptr}};
  }
  return out;
}

std::string ScanReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,min_abs_J,min_excess,verdict\n";
  for (const auto& r : records) {
    os << r.t << ',';
    if (r.degeneracy) {
      os << r.degeneracy->min_abs_jacobian;
    } else if (r.pair) {
      os << r.pair->min_abs_jacobian;
    }
    os << ',';
    if (r.injectivity) {
      os << r.injectivity->min_collision_distance;
    } else if (r.pair) {
      os << r.pair->min_pair_distance;
    }
    os << ',' << arlab::to_string(r.verdict) << '\n';
  }
  return os.str();
}

}  // namespace arlab
