#pragma once

// Multistart scans over M_t^3: degeneracy of the restricted Jacobian,
// fiber collisions (injectivity), double roots of the fiber quadratic, and
// pairwise collision search for general family maps G.
//
// Scans produce evidence with re-verified witnesses, never proofs.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arlab/arfamily.hpp"
#include "arlab/quadric.hpp"

namespace arlab {

inline constexpr double kDegenerateThreshold = 1e-6;
inline constexpr double kCollisionThreshold = 1e-8;
inline constexpr double kEvidenceFactor = 10.0;
inline constexpr double kPairSeparation = 1e-3;

enum class Optimizer { NelderMeadOnChart, ProjectedGradient };
enum class Verdict { EmbeddingEvidence, Degenerate, Collision, Unknown };
enum class Provenance { RandomStart, TriplePointSeed, KnownCollisionSeed };

const char* to_string(Optimizer o);
const char* to_string(Verdict v);
const char* to_string(Provenance p);

/// A witness failed independent re-verification.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanConfig {
  std::vector<double> t_grid;
  int samples_per_t = 256;
  int multistart_count = 64;
  int max_evals = 2000;
  Optimizer optimizer = Optimizer::NelderMeadOnChart;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Unset: the built-in map F. Set: G built from this Q.
  std::optional<HarmonicPoly> arfamily_q;

  /// Throws std::invalid_argument on a non-increasing grid, grid values <= 1 or counts < 1.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Inclusive grid start:stop:step with 1e-12 slack at the end point.
std::vector<double> make_grid(double start, double stop, double step);
/// Parses "start:stop:step" or a single value.
std::vector<double> parse_grid(const std::string& text);

/// A 5-dimensional chart of M_t^3 around a centre point: tangent coordinates
/// followed by projection back to M_t^3.
class MtChart {
 public:
  MtChart(const RealFramePoint& center, double t);
  static constexpr std::size_t kDim = 5;

  /// Point of M_t^3 (w-coordinates) at chart coordinates v.
  Vec4c at(std::span<const double> v) const;
  RealFramePoint frame_at(std::span<const double> v) const;
  double t() const { return t_; }

 private:
  double t_;
  std::array<double, 4> x0_{}, y0_{};
  std::array<std::array<double, 8>, kDim> basis_{};
};

struct Witness {
  Vec4c point{};
  /// Objective value reported by the optimizer.
  double value = 0.0;
  /// Same quantity recomputed from scratch at `point`.
  double reverified = 0.0;
  Provenance provenance = Provenance::RandomStart;
  int start_index = -1;
  int evaluations = 0;
};

nlohmann::json to_json(const Witness& w);

struct DegeneracyResult {
  double t = 0.0;
  double min_abs_jacobian = 0.0;
  Witness witness;
  Verdict verdict = Verdict::Unknown;
};

struct DoubleRootResult {
  double t = 0.0;
  double min_abs_discriminant = 0.0;
  Witness witness;
  /// fiber(witness) reports a double root.
  bool double_root = false;
};

struct InjectivityResult {
  double t = 0.0;
  /// min over scanned points of min_partner |norm_sum(partner)/2 - t|.
  double min_collision_distance = 0.0;
  Witness witness;
  /// Partner of the witness closest to M_t^3.
  Vec4c closest_partner{};
  /// Smallest signed partner_norm_excess seen (samples and optimizer ends).
  double min_signed_excess = 0.0;
  Vec4c signed_excess_point{};
  /// Fiber cardinality over the random samples and the double-root witness,
  /// keyed "3", "2:double_root", "2:degenerate", "1".
  std::map<std::string, int> cardinality_histogram;
  std::optional<DoubleRootResult> double_root;
  Verdict verdict = Verdict::Unknown;
};

struct PairCollisionResult {
  double t = 0.0;
  double min_abs_jacobian = 0.0;
  Witness degeneracy_witness;
  double min_pair_distance = 0.0;  // min |G(W) - G(W')| with |W - W'| >= 1e-3
  Witness pair_witness;
  Vec4c pair_partner{};
  double pair_separation = 0.0;
  Verdict verdict = Verdict::Unknown;
};

struct TRecord {
  double t = 0.0;
  std::optional<DegeneracyResult> degeneracy;
  std::optional<InjectivityResult> injectivity;
  std::optional<PairCollisionResult> pair;
  Verdict verdict = Verdict::Unknown;
};

struct T0Bracket {
  /// Largest t with EMBEDDING_EVIDENCE below the flip (nullopt if none).
  std::optional<double> t_low;
  /// Smallest t above t_low whose verdict is not EMBEDDING_EVIDENCE (nullopt if none).
  std::optional<double> t_high;
};

struct ScanReport {
  std::string kind;
  nlohmann::json config;
  std::vector<TRecord> records;
  std::optional<T0Bracket> empirical_t0;

  nlohmann::json to_json() const;
  /// One row per t: t, min_abs_J, min_excess, verdict.
  std::string to_csv() const;
};

/// Combined verdict, COLLISION > DEGENERATE > UNKNOWN > EMBEDDING_EVIDENCE.
Verdict combine(Verdict a, Verdict b);

DegeneracyResult degeneracy_scan(double t, const ScanConfig& config);
InjectivityResult injectivity_scan(double t, const ScanConfig& config);
DoubleRootResult double_root_scan(double t, const ScanConfig& config);
PairCollisionResult pair_collision_scan(const PolarizedMap& g, double t, const ScanConfig& config,
                                        bool inject_known_collisions);

/// Per-t degeneracy and injectivity verdicts over config.t_grid, then
/// bisection (to `resolution`) on the first flip away from EMBEDDING_EVIDENCE.
ScanReport empirical_t0(const ScanConfig& config, double resolution = 1e-4);

ScanReport run_degeneracy_grid(const ScanConfig& config);
ScanReport run_injectivity_grid(const ScanConfig& config);
/// Pairwise-collision scan of G = build_G(q) (or the built-in F when the
/// config carries no q) over config.t_grid.
ScanReport arfamily_scan(const ScanConfig& config);

}  // namespace arlab
