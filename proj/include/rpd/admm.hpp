#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rpd/problems.hpp"
#include "rpd/schedules.hpp"
#include "rpd/vec.hpp"

namespace rpd {

// Linearly constrained separable problem
//   min sum_i f_i(x_i)  s.t.  sum_i A_i x_i = b,  x_i in X_i,
// with the A_i stored as column blocks of one dense m x n matrix.
struct LcpInstance {
  int m = 0;
  std::vector<int> block_dims;
  Vector a;  // row-major m x n_total
  Vector b;
  std::vector<SeparableFunction> f;
  std::vector<FeasibleSet> sets;
  std::optional<Vector> x_star;

  int p() const { return static_cast<int>(block_dims.size()); }
  int n_total() const;
  int col_offset(int i) const;  // blocks are 1-based

  std::span<const double> block(const Vector& x, int i) const;
  void set_block(Vector& x, int i, std::span<const double> v) const;

  // A_i x_i and A_i^T v.
  Vector apply_block(int i, std::span<const double> xi) const;
  Vector adjoint_block(int i, std::span<const double> v) const;
  // sum_i A_i x_i - b, accumulated block by block in index order.
  Vector residual(const Vector& x) const;

  // Operator norm of the stacked (A_1 ... A_p).
  double coupling_norm() const;

  void check() const;
};

// Homogeneous pattern-family system sum_i A_i x_i = 0 with scalar free
// blocks, f = 0, and unique solution x* = 0.
LcpInstance counterexample_lcp(int p);

// Deterministic random instance with a reachable right-hand side; block i
// alternates between a strongly convex free block and a box-constrained
// zero objective. Used by the equivalence suite.
LcpInstance random_lcp_instance(std::uint64_t seed, int m,
                                const std::vector<int>& dims);

struct AdmmOptions {
  Vector x0;  // empty: zeros
  Vector y0;  // empty: zeros
  std::vector<int> checkpoints;
  bool record_iterates = false;
  bool record_residuals = false;
};

struct AdmmTrace {
  Vector x_final, y_final;
  std::vector<int> checkpoint_t;
  std::vector<double> dist_at_checkpoint;  // ||x^t - x*|| (x* or zero)
  std::vector<double> residual_norms;      // per iteration, when recorded
  std::vector<Vector> x_history, y_history;
  std::vector<Vector> residual_history;
};

// Single-random-block primal-dual iteration for the constrained problem:
// block i_t prox against the extrapolated multiplier, exact multiplier step,
// multiplier extrapolation. The schedule is read with its saddle-point
// roles: tau drives the randomized block prox, eta the multiplier step.
AdmmTrace rpd_lcp_run(const LcpInstance& lcp, const Schedule& sched,
                      std::uint64_t seed, const AdmmOptions& opts = {});

// Deterministic Gauss-Seidel proximal ADMM: each block exactly minimizes
// f_i + <y, A_i x_i> + (rho/2)||A_i x_i + (partial residual)||^2
// + (eta_t/2)||x_i - x_i^t||^2, then y^{t+1} = y^t + rho (sum A_i x_i - b).
// eta_t = 0 gives the direct multi-block extension of ADMM.
AdmmTrace proximal_admm_run(const LcpInstance& lcp, double rho,
                            const Vector& eta_seq, int iters,
                            const AdmmOptions& opts = {});

// proximal_admm_run with eta identically zero.
AdmmTrace vanilla_admm_run(const LcpInstance& lcp, double rho, int iters,
                           const AdmmOptions& opts = {});

// Single-random-block proximal ADMM with the linearized coupling term: the
// block linear point is y^t + rho_t (sum A_j x_j^t - b) with
// rho_t = q_{t-1} / tau^{mult}_{t-1} (zero at t = 1), and the multiplier
// step has size 1 / tau^{mult}_t. Under a shared seed this reproduces
// rpd_lcp_run's iterates.
AdmmTrace randomized_proximal_admm_run(const LcpInstance& lcp,
                                       const Schedule& sched,
                                       std::uint64_t seed,
                                       const AdmmOptions& opts = {});

}  // namespace rpd
