#pragma once

// Finite certification checks: limit properties become decay checks along
// geometric approach paths, inequalities become exact assertions.

#include "bairext/baire_pipeline.hpp"
#include "bairext/extension_op.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bairext {

enum class CertStatus { pass, fail, inconclusive, not_applicable };
const char* status_name(CertStatus s) noexcept;

struct TraceRow {
  int step = 0;
  double d_xa = 0.0;
  double dist_h = 0.0;
  int n = 0;
  double value = 0.0;  // quotient or deviation measured at this step
  double bound = inf;  // upper envelope where one applies
};

struct CertReport {
  std::string property;  // NT, NT-smooth, C, B, UCPC, or an invariant name
  std::string target;
  CertStatus status = CertStatus::pass;
  double tolerance = 0.0;
  std::string detail;    // first violating datum on failure
  std::vector<TraceRow> trace;
  std::vector<std::pair<std::string, double>> metrics;
  std::size_t checked = 0;
};

enum class PathKind { radial, tangential, mixed };
const char* path_kind_name(PathKind k) noexcept;

struct ApproachPath {
  std::size_t anchor = npos;          // H sample
  PathKind kind = PathKind::radial;
  double eps = 0.0;                   // tangential bound on dist(x, H) / d(x, a)
  std::vector<std::size_t> samples;   // x_j, all outside H
  std::string label;
};

/// Throws invalid_input when a point lies in H, distances to the anchor do
/// not strictly decrease, or a tangential point breaks its ratio bound.
void validate_path(const SampledSpace& space, const ApproachPath& path);

/// pass iff every value in the last third is < tol; fail iff the largest
/// value overall sits in the last third and is >= tol; inconclusive otherwise.
CertStatus decay_status(std::span<const double> values, double tol, std::size_t* first_bad = nullptr);

/// q_j = |g(x_j) - f(a)| dist(x_j, H) / d(x_j, a). With smoothed = false the
/// trace also carries the pointwise bound 1/n + |f(a)|/n + |f_n(a) - f(a)|
/// and a step above it turns the report into a failure.
CertReport check_nt(const ExtensionField& field, const Extender& ext, const ApproachPath& path,
                    const TargetVector& f_a, double tol, bool smoothed);

/// |g~(x_j) - f(a)| < tol for every step past the first third.
CertReport check_continuity(const ExtensionField& field, const Extender& ext, const ApproachPath& path,
                            const TargetVector& f_a, bool declared_continuous, double tol);

struct SupCertificate {
  bool bounded = false;  // false: f is unbounded on the ball
  double sup = 0.0;      // sup |f| over B(a, 12 r) cap H when bounded
};

/// max |g~| over sampled B(a, r) \ H against p0 + 1 + 1/r + 2/n_min with
/// p0 = floor(sup) + 1 and n_min the smallest positive n(x_alpha) among
/// contributing centers. not_applicable when the certificate says unbounded.
CertReport check_boundedness(const ExtensionField& field, const Extender& ext, const Point& a, double r,
                             const std::optional<SupCertificate>& certificate);

struct UcpcWitness {
  double eps = 0.0;
  double rho = 0.0;
  int k0 = 0;
};

/// For each eps: the first rho in 2^-1..2^-10 (balls holding a sample other
/// than y0, unless y0 is declared isolated) and the smallest k0 <= items.size() with |h_k(y) - f(y0)| < eps
/// for every sampled y in B(y0, rho) and k0 <= k <= items.size().
CertReport check_ucpc(const SampledSpace& y_space, const std::vector<FunSeqItem>& items,
                      const TargetVector& f_y0, std::size_t y0, std::span<const double> eps_grid,
                      bool isolated = false, std::vector<UcpcWitness>* witnesses = nullptr);

/// Max pairwise |v(y1) - v(y2)| over samples of the open ball B(y, radius).
double oscillation(const SampledSpace& space, std::span<const TargetVector> values, std::size_t y,
                   double radius);

// --- exact invariants --------------------------------------------------------

/// dist(x, H) <= d(x, a), d(x, u) <= 2 dist(x, H) and d(a, u) <= 3 d(a, x).
CertReport check_general_inequality(const ExtensionField& field, const Extender& ext);
/// n(x) satisfies the selection inequality and no larger admissible n does.
CertReport check_select_maximality(const ExtensionField& field, const Extender& ext);
/// |g(x) - f(a)| dist/d <= 1/n + |f(a)|/n + |f_n(a) - f(a)| + 1e-12 for a in `anchors`.
CertReport check_alp5(const ExtensionField& field, const Extender& ext, std::span<const TargetVector> f_h,
                      std::span<const std::size_t> anchors);
/// dist/d(x, a) > 1/(n M_n) implies d(u, a) < 1/(n K), skipped when K = inf.
CertReport check_rho_branch(const ExtensionField& field, const Extender& ext);
/// dist(x,H)/d(x,a) and dist(c,H)/d(c,a) agree within a factor 4 for every
/// contributing center c and H sample a.
CertReport check_factor4(const ExtensionField& field, const Extender& ext);
/// g~(x) lies in the coordinate hull of its contributors and |g~(x)| is at
/// most their largest norm.
CertReport check_convexity(const ExtensionField& field, double slack = 1e-12);

/// f(G) inside B(z_G, 2^-k) for every level and refined ball.
CertReport check_fg(const SelectionState& selection, const SampledSpace& y_space,
                    std::span<const TargetVector> f);
/// |selected_k(y) - h_k(y)| < 2^-k on C_k.
CertReport check_approx_on_ck(const SelectionState& selection, const std::vector<FunSeqItem>& raw,
                              const std::vector<FunSeqItem>& selected);
/// |f_n - hat_n| <= 2/n at every sample.
CertReport check_blizko(const std::vector<FunSeqItem>& items, const std::vector<FunSeqItem>& hat);

} // namespace bairext
