#include "rpd/admm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpd/errors.hpp"
#include "rpd/linops.hpp"
#include "rpd/rng.hpp"

namespace rpd {

int LcpInstance::n_total() const {
  return std::accumulate(block_dims.begin(), block_dims.end(), 0);
}

int LcpInstance::col_offset(int i) const {
  int off = 0;
  for (int k = 0; k < i - 1; ++k) off += block_dims[k];
  return off;
}

std::span<const double> LcpInstance::block(const Vector& x, int i) const {
  return std::span<const double>(x).subspan(col_offset(i), block_dims[i - 1]);
}

void LcpInstance::set_block(Vector& x, int i, std::span<const double> v) const {
  std::copy(v.begin(), v.end(), x.begin() + col_offset(i));
}

Vector LcpInstance::apply_block(int i, std::span<const double> xi) const {
  const int n = n_total();
  const int off = col_offset(i);
  const int d = block_dims[i - 1];
  if (xi.size() != static_cast<std::size_t>(d))
    throw DimensionError("LcpInstance::apply_block", d, xi.size());
  Vector out(m, 0.0);
  for (int r = 0; r < m; ++r) {
    const double* row = a.data() + static_cast<std::size_t>(r) * n + off;
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += row[c] * xi[c];
    out[r] = s;
  }
  return out;
}

Vector LcpInstance::adjoint_block(int i, std::span<const double> v) const {
  const int n = n_total();
  const int off = col_offset(i);
  const int d = block_dims[i - 1];
  if (v.size() != static_cast<std::size_t>(m))
    throw DimensionError("LcpInstance::adjoint_block", m, v.size());
  Vector out(d, 0.0);
  for (int r = 0; r < m; ++r) {
    const double* row = a.data() + static_cast<std::size_t>(r) * n + off;
    for (int c = 0; c < d; ++c) out[c] += row[c] * v[r];
  }
  return out;
}

Vector LcpInstance::residual(const Vector& x) const {
  if (x.size() != static_cast<std::size_t>(n_total()))
    throw DimensionError("LcpInstance::residual", n_total(), x.size());
  const int n = n_total();
  Vector r(m);
  for (int row = 0; row < m; ++row) {
    const double* ar = a.data() + static_cast<std::size_t>(row) * n;
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += ar[c] * x[c];
    r[row] = s - b[row];
  }
  return r;
}

double LcpInstance::coupling_norm() const {
  return spectral_norm(BlockLinearOperator::dense(m, n_total(), a));
}

void LcpInstance::check() const {
  if (b.size() != static_cast<std::size_t>(m))
    throw DimensionError("LcpInstance: b", m, b.size());
  if (f.size() != block_dims.size() || sets.size() != block_dims.size())
    throw DimensionError("LcpInstance: need one f and one set per block");
  if (a.size() != static_cast<std::size_t>(m) * n_total())
    throw DimensionError("LcpInstance: matrix",
                         static_cast<std::size_t>(m) * n_total(), a.size());
  for (int i = 1; i <= p(); ++i)
    if (sets[i - 1].dim() != block_dims[i - 1])
      throw DimensionError("LcpInstance: set dim for block " + std::to_string(i));
  if (x_star && x_star->size() != static_cast<std::size_t>(n_total()))
    throw DimensionError("LcpInstance: x_star", n_total(), x_star->size());
}

LcpInstance counterexample_lcp(int p) {
  const BlockLinearOperator m = counterexample_matrix(p);
  LcpInstance lcp;
  lcp.m = p;
  lcp.block_dims.assign(p, 1);
  lcp.a = m.matrix();
  lcp.b.assign(p, 0.0);
  for (int i = 0; i < p; ++i) {
    lcp.f.push_back(SeparableFunction::zero(1));
    lcp.sets.push_back(FeasibleSet::free(1));
  }
  lcp.x_star = Vector(p, 0.0);
  lcp.check();
  return lcp;
}

LcpInstance random_lcp_instance(std::uint64_t seed, int m,
                                const std::vector<int>& dims) {
  RngStream rng(seed);
  auto u01 = [&rng]() {
    return static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53;
  };
  LcpInstance lcp;
  lcp.m = m;
  lcp.block_dims = dims;
  const int n = lcp.n_total();
  lcp.a.resize(static_cast<std::size_t>(m) * n);
  for (double& v : lcp.a) v = 2.0 * u01() - 1.0;
  Vector x_feas(n);
  for (double& v : x_feas) v = u01();
  lcp.b.assign(m, 0.0);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) lcp.b[r] += lcp.a[r * n + c] * x_feas[c];
  bool strongly_convex = (rng.next_u64() & 1) != 0;
  for (int d : dims) {
    if (strongly_convex) {
      lcp.f.push_back(SeparableFunction::quadratic(d, 0.5 + u01()));
      lcp.sets.push_back(FeasibleSet::free(d));
    } else {
      lcp.f.push_back(SeparableFunction::zero(d));
      lcp.sets.push_back(FeasibleSet::box(Vector(d, -2.0), Vector(d, 2.0)));
    }
    strongly_convex = !strongly_convex;
  }
  lcp.check();
  return lcp;
}

namespace {

const DistanceGenerating kEuclid = DistanceGenerating::euclidean();

struct TraceRecorder {
  const LcpInstance& lcp;
  const AdmmOptions& opts;
  AdmmTrace& trace;

  void record(int iterate_index, const Vector& x, const Vector& y) {
    const bool wanted =
        std::find(opts.checkpoints.begin(), opts.checkpoints.end(),
                  iterate_index) != opts.checkpoints.end();
    if (wanted) {
      trace.checkpoint_t.push_back(iterate_index);
      const Vector zero(x.size(), 0.0);
      const Vector& ref = lcp.x_star ? *lcp.x_star : zero;
      trace.dist_at_checkpoint.push_back(vec::dist2(x, ref));
    }
    if (opts.record_iterates) {
      trace.x_history.push_back(x);
      trace.y_history.push_back(y);
    }
  }
};

Vector start_or_zero(const Vector& given, int dim, const char* what) {
  if (given.empty()) return Vector(dim, 0.0);
  if (given.size() != static_cast<std::size_t>(dim))
    throw DimensionError(what, dim, given.size());
  return given;
}

// Minimizer over X_i of f_i(u) + <g, u> + (rho/2)||A_i u + s||^2
// + (eta/2)||u - center||^2. Free blocks of any dimension solve the SPD
// system directly; box blocks are supported for scalar dimension.
Vector admm_block_solve(const LcpInstance& lcp, int i, const Vector& g,
                        double rho, const Vector& s, double eta,
                        std::span<const double> center) {
  const int d = lcp.block_dims[i - 1];
  const SeparableFunction& f = lcp.f[i - 1];
  const FeasibleSet& set = lcp.sets[i - 1];
  double mu = 0.0;
  Vector lin = g;  // accumulates all linear coefficients
  switch (f.kind()) {
    case FnKind::zero:
      break;
    case FnKind::linear:
      for (int k = 0; k < d; ++k) lin[k] += f.linear_coeff()[k];
      break;
    case FnKind::quadratic:
      mu = f.mu();
      break;
    case FnKind::neg_entropy:
      throw NoClosedFormError("admm block solve: neg_entropy unsupported");
  }
  const Vector ats = lcp.adjoint_block(i, s);
  for (int k = 0; k < d; ++k) lin[k] += rho * ats[k] - eta * center[k];

  if (set.kind() == SetKind::free_space || d == 1) {
    // Hessian H = rho A_i^T A_i + (mu + eta) I; solve H u = -lin.
    const int n = lcp.n_total();
    const int off = lcp.col_offset(i);
    std::vector<double> h(static_cast<std::size_t>(d) * d, 0.0);
    for (int r = 0; r < lcp.m; ++r) {
      const double* row = lcp.a.data() + static_cast<std::size_t>(r) * n + off;
      for (int c1 = 0; c1 < d; ++c1)
        for (int c2 = 0; c2 < d; ++c2)
          h[static_cast<std::size_t>(c1) * d + c2] += rho * row[c1] * row[c2];
    }
    for (int c = 0; c < d; ++c) h[static_cast<std::size_t>(c) * d + c] += mu + eta;

    if (d == 1) {
      if (h[0] <= 0.0)
        throw NoClosedFormError(
            "admm block solve: subproblem is not strongly convex (need "
            "eta > 0, a strongly convex f, or a nonzero column)");
      const double u = -lin[0] / h[0];
      if (set.kind() == SetKind::box)
        return {std::clamp(u, set.lower()[0], set.upper()[0])};
      return {u};
    }

    // Dense Cholesky factorization of the small SPD block.
    for (int c = 0; c < d; ++c) {
      double diag = h[static_cast<std::size_t>(c) * d + c];
      for (int k = 0; k < c; ++k) {
        const double l = h[static_cast<std::size_t>(c) * d + k];
        diag -= l * l;
      }
      if (diag <= 0.0)
        throw NoClosedFormError(
            "admm block solve: subproblem is not strongly convex (need "
            "eta > 0 or a strongly convex f)");
      const double lcc = std::sqrt(diag);
      h[static_cast<std::size_t>(c) * d + c] = lcc;
      for (int r = c + 1; r < d; ++r) {
        double v = h[static_cast<std::size_t>(r) * d + c];
        for (int k = 0; k < c; ++k)
          v -= h[static_cast<std::size_t>(r) * d + k] *
               h[static_cast<std::size_t>(c) * d + k];
        h[static_cast<std::size_t>(r) * d + c] = v / lcc;
      }
    }
    Vector u(d);
    for (int r = 0; r < d; ++r) {
      double v = -lin[r];
      for (int k = 0; k < r; ++k)
        v -= h[static_cast<std::size_t>(r) * d + k] * u[k];
      u[r] = v / h[static_cast<std::size_t>(r) * d + r];
    }
    for (int r = d - 1; r >= 0; --r) {
      double v = u[r];
      for (int k = r + 1; k < d; ++k)
        v -= h[static_cast<std::size_t>(k) * d + r] * u[k];
      u[r] = v / h[static_cast<std::size_t>(r) * d + r];
    }
    return u;
  }
  throw NoClosedFormError(
      "admm block solve: box-constrained blocks supported only in dimension 1");
}

}  // namespace

AdmmTrace rpd_lcp_run(const LcpInstance& lcp, const Schedule& sched,
                      std::uint64_t seed, const AdmmOptions& opts) {
  lcp.check();
  if (sched.regime != Regime::unbounded)
    throw RegimeError("rpd_lcp_run: multiplier space is free; use the "
                      "unbounded schedule regime");
  AdmmTrace trace;
  TraceRecorder rec{lcp, opts, trace};

  Vector x = start_or_zero(opts.x0, lcp.n_total(), "rpd_lcp_run x0");
  Vector y = start_or_zero(opts.y0, lcp.m, "rpd_lcp_run y0");
  Vector r = lcp.residual(x);
  Vector y_bar = y;
  RngStream rng(seed);
  rec.record(1, x, y);

  for (int t = 1; t <= sched.steps(); ++t) {
    const int i = rng.draw_block(lcp.p());

    const Vector gi = lcp.adjoint_block(i, y_bar);
    const Vector xi_old(lcp.block(x, i).begin(), lcp.block(x, i).end());
    const Vector xi_new = prox_step(lcp.f[i - 1], lcp.sets[i - 1], kEuclid, gi,
                                    xi_old, sched.tau(t));
    lcp.set_block(x, i, xi_new);
    const Vector delta = vec::sub(xi_new, xi_old);
    vec::axpy(1.0, lcp.apply_block(i, delta), r);

    // Exact multiplier step, then extrapolation for the next block prox.
    const double inv_step = 1.0 / sched.eta(t);
    const double q = sched.q(t);
    for (int k = 0; k < lcp.m; ++k) {
      const double y_new = y[k] + inv_step * r[k];
      y_bar[k] = q * (y_new - y[k]) + y_new;
      y[k] = y_new;
    }

    if (opts.record_residuals) {
      trace.residual_norms.push_back(vec::norm2(r));
      trace.residual_history.push_back(r);
    }
    rec.record(t + 1, x, y);
  }

  trace.x_final = std::move(x);
  trace.y_final = std::move(y);
  return trace;
}

AdmmTrace proximal_admm_run(const LcpInstance& lcp, double rho,
                            const Vector& eta_seq, int iters,
                            const AdmmOptions& opts) {
  lcp.check();
  if (rho <= 0.0) throw Error("proximal_admm_run: rho must be positive");
  AdmmTrace trace;
  TraceRecorder rec{lcp, opts, trace};

  Vector x = start_or_zero(opts.x0, lcp.n_total(), "proximal_admm_run x0");
  Vector y = start_or_zero(opts.y0, lcp.m, "proximal_admm_run y0");
  Vector r = lcp.residual(x);
  rec.record(1, x, y);

  for (int t = 1; t <= iters; ++t) {
    const double eta = eta_seq.empty() ? 0.0 : eta_seq[std::min<std::size_t>(
                                             t - 1, eta_seq.size() - 1)];
    for (int i = 1; i <= lcp.p(); ++i) {
      const Vector xi_old(lcp.block(x, i).begin(), lcp.block(x, i).end());
      // Partial residual with block i removed: sum_{j<i} A_j x_j^{new}
      // + sum_{j>i} A_j x_j^{old} - b.
      Vector s = r;
      vec::axpy(-1.0, lcp.apply_block(i, xi_old), s);
      const Vector g = lcp.adjoint_block(i, y);
      const Vector xi_new = admm_block_solve(lcp, i, g, rho, s, eta, xi_old);
      lcp.set_block(x, i, xi_new);
      vec::axpy(1.0, lcp.apply_block(i, vec::sub(xi_new, xi_old)), r);
    }
    // Fresh residual for the multiplier step keeps the update identity
    // y^{t+1} - y^t = rho (sum A_i x_i^{t+1} - b) exact.
    r = lcp.residual(x);
    for (int k = 0; k < lcp.m; ++k) y[k] += rho * r[k];

    if (opts.record_residuals) {
      trace.residual_norms.push_back(vec::norm2(r));
      trace.residual_history.push_back(r);
    }
    rec.record(t + 1, x, y);
  }

  trace.x_final = std::move(x);
  trace.y_final = std::move(y);
  return trace;
}

AdmmTrace vanilla_admm_run(const LcpInstance& lcp, double rho, int iters,
                           const AdmmOptions& opts) {
  return proximal_admm_run(lcp, rho, Vector{}, iters, opts);
}

AdmmTrace randomized_proximal_admm_run(const LcpInstance& lcp,
                                       const Schedule& sched,
                                       std::uint64_t seed,
                                       const AdmmOptions& opts) {
  lcp.check();
  AdmmTrace trace;
  TraceRecorder rec{lcp, opts, trace};

  Vector x = start_or_zero(opts.x0, lcp.n_total(), "randomized_proximal_admm x0");
  Vector y = start_or_zero(opts.y0, lcp.m, "randomized_proximal_admm y0");
  Vector r = lcp.residual(x);
  RngStream rng(seed);
  rec.record(1, x, y);

  for (int t = 1; t <= sched.steps(); ++t) {
    const int i = rng.draw_block(lcp.p());

    // Linearized coupling: the block sees y^t + rho_t (sum A_j x_j^t - b),
    // with rho_1 = 0 so the first step matches the plain multiplier.
    const double rho_t = t == 1 ? 0.0 : sched.q(t - 1) / sched.eta(t - 1);
    Vector w(lcp.m);
    for (int k = 0; k < lcp.m; ++k) w[k] = y[k] + rho_t * r[k];

    const Vector gi = lcp.adjoint_block(i, w);
    const Vector xi_old(lcp.block(x, i).begin(), lcp.block(x, i).end());
    const Vector xi_new = prox_step(lcp.f[i - 1], lcp.sets[i - 1], kEuclid, gi,
                                    xi_old, sched.tau(t));
    lcp.set_block(x, i, xi_new);
    vec::axpy(1.0, lcp.apply_block(i, vec::sub(xi_new, xi_old)), r);

    const double inv_step = 1.0 / sched.eta(t);
    for (int k = 0; k < lcp.m; ++k) y[k] += inv_step * r[k];

    if (opts.record_residuals) {
      trace.residual_norms.push_back(vec::norm2(r));
      trace.residual_history.push_back(r);
    }
    rec.record(t + 1, x, y);
  }

  trace.x_final = std::move(x);
  trace.y_final = std::move(y);
  return trace;
}

}  // namespace rpd
