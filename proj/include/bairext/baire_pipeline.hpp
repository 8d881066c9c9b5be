#pragma once

// Turns a pointwise-convergent sequence {h_n} on Y into bounded, locally
// Lipschitz approximants {f_n} with uniform convergence at continuity points
// and local uniform boundedness.
//
// Y is always a finite sample set, so every item is a value table over the
// samples of Y. Lipschitz bounds of derived items are exact difference
// quotients over those samples.

#include "bairext/metric_core.hpp"
#include "bairext/normed_target.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bairext {

enum class LipCertificate {
  analytic,          // closed-form bound supplied with the item
  exact_on_samples,  // max difference quotient over samples of a finite Y
  estimate,          // sampled quotient standing in for a continuum bound
};

const char* certificate_name(LipCertificate c) noexcept;
inline bool is_certified(LipCertificate c) noexcept { return c != LipCertificate::estimate; }

/// (center sample of Y, radius) -> bound on Lip over the open ball, in [0, inf].
using LipOracle = std::function<double(std::size_t, double)>;

/// Max of |v(i) - v(j)| / d(i, j) over distinct samples i, j of the open ball.
double sampled_lipschitz(const SampledSpace& y, std::span<const TargetVector> values,
                         std::size_t center, double radius);

struct FunSeqItem {
  int index = 0;
  std::vector<TargetVector> values;  // one per sample of Y
  LipOracle lip_oracle;              // optional
  LipCertificate certificate = LipCertificate::exact_on_samples;
  double sup_bound = inf;

  const TargetVector& eval(std::size_t y) const { return values.at(y); }
  double lip_bound(const SampledSpace& y, std::size_t center, double radius) const;
};

struct FunctionBundle {
  std::vector<FunSeqItem> raw;               // h_1, ..., h_N
  std::vector<TargetVector> f;               // the limit, one value per sample of Y
  std::optional<std::vector<bool>> converges;  // certified h_n(y) -> f(y)
  bool raw_ucpc_certified = false;
  std::size_t dim = 1;
  Norm norm = Norm::linf;
};

struct StageDiagnostic {
  std::string stage;
  int n = 0;
  double max_violation = 0.0;
  bool certified = true;
};

// --- radial bounds ---------------------------------------------------------

std::vector<FunSeqItem> bound_sequence(std::vector<FunSeqItem> seq);

/// r(y) = min over n of (n+1) + 1/dist(y, Y \ O_n), +inf when y is in no O_n,
/// where O_n is the interior (scale delta in sampled mode) of
/// {y : convergence certified and |f(y)| < n}.
double local_bound_radius(const SampledSpace& y_space, std::span<const TargetVector> f,
                          const std::optional<std::vector<bool>>& converges, std::size_t y);
std::vector<double> local_bound_radii(const SampledSpace& y_space, std::span<const TargetVector> f,
                                      const std::optional<std::vector<bool>>& converges);

std::vector<FunSeqItem> enforce_local_uniform_boundedness(const SampledSpace& y_space,
                                                          std::vector<FunSeqItem> seq,
                                                          std::span<const double> radii);

// --- selection transform (finite mode) -------------------------------------

struct SelectionLevel {
  int k = 0;
  CoverSystem raw;      // largest balls around each sample inside a 2^-k preimage
  CoverSystem refined;  // greedy refinement of `raw`
  std::vector<TargetVector> centers;  // z_{k,G} for each refined ball
  /// members[y] lists (refined ball, dist(y, Y \ G)) for every G containing y.
  std::vector<std::vector<std::pair<std::size_t, double>>> members;
};

struct SelectionState {
  std::vector<SelectionLevel> levels;  // levels[k-1]
  std::vector<std::vector<bool>> in_c;  // in_c[k-1][y]: y in C_k

  /// Constraint balls of the intersection at level k for sample y. With
  /// `j` unset every containing ball counts; otherwise only balls G with
  /// dist(y, Y \ G) >= 1/j.
  std::vector<TargetBall> constraints(int k, std::optional<int> j, std::size_t y) const;
};

struct UcpcResult {
  std::vector<FunSeqItem> items;
  SelectionState state;
};

UcpcResult ucpc_transform(const SampledSpace& y_space, const std::vector<FunSeqItem>& seq,
                          std::span<const TargetVector> f);

// --- mollification ---------------------------------------------------------

struct MollifyOptions {
  bool allow_sampling_fallback = true;
};

struct MollifyResult {
  FunSeqItem item;
  CoverSystem cover;           // refined balls with weights
  std::vector<double> radius;  // delta(x) per sample
  double max_deviation = 0.0;  // max |f_n - input| over samples
};

/// Partition-of-unity blend over the greedy refinement of {B(x, delta(x))}
/// with delta(x) = min(1/n, 1/(n Lip(x, 1/n))), raised to the sample
/// separation when that keeps the ball a singleton.
MollifyResult lipschitz_mollify(const SampledSpace& y_space, const FunSeqItem& item, int n,
                                const MollifyOptions& options = {});

/// Independent evaluation of the blend at sample y from a weighted cover.
TargetVector evaluate_blend(const CoverSystem& cover, std::span<const TargetVector> anchor_values,
                            std::size_t point_position);

// --- orchestration ---------------------------------------------------------

struct PipelineOptions {
  MollifyOptions mollify;
};

struct PipelineResult {
  std::vector<FunSeqItem> items;   // f_1..f_N, sup_bound n + 2
  std::vector<FunSeqItem> hat;     // the bounded sequence fed to mollification
  std::vector<double> radii;       // r(y)
  std::optional<SelectionState> selection;
  std::optional<std::vector<FunSeqItem>> selected;  // ucpc_transform output
  std::vector<StageDiagnostic> diagnostics;
  std::vector<std::string> warnings;
  bool certified = true;
};

PipelineResult baire_approximate(const SampledSpace& y_space, const FunctionBundle& bundle,
                                 const PipelineOptions& options = {});

} // namespace bairext
