#include "rpd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "rpd/errors.hpp"
#include "rpd/rng.hpp"

namespace rpd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// --- FeasibleSet ----------------------------------------------------------

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size())
    throw DimensionError("box bounds", lower.size(), upper.size());
  if (lower.empty()) throw DimensionError("box: empty bounds");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i])
      throw Error("box: lower > upper at coordinate " + std::to_string(i));
  FeasibleSet s(SetKind::box, static_cast<int>(lower.size()));
  s.diameter_ = vec::dist2(upper, lower);
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::simplex(int dim) {
  if (dim < 1) throw DimensionError("simplex: dimension must be >= 1");
  FeasibleSet s(SetKind::simplex, dim);
  s.diameter_ = dim >= 2 ? std::sqrt(2.0) : 0.0;
  return s;
}

FeasibleSet FeasibleSet::free(int dim) {
  if (dim < 1) throw DimensionError("free: dimension must be >= 1");
  FeasibleSet s(SetKind::free_space, dim);
  s.diameter_ = kInf;
  return s;
}

Vector project_simplex(std::span<const double> v) {
  const int d = static_cast<int>(v.size());
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (v[a] != v[b]) return v[a] > v[b];
    return a < b;
  });
  double cum = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int j = 0; j < d; ++j) {
    cum += v[idx[j]];
    const double t = (cum - 1.0) / (j + 1);
    if (v[idx[j]] - t > 0.0) {
      rho = j + 1;
      theta = t;
    }
  }
  (void)rho;
  Vector out(d);
  for (int j = 0; j < d; ++j) out[j] = std::max(v[j] - theta, 0.0);
  return out;
}

Vector FeasibleSet::project(std::span<const double> v) const {
  if (v.size() != static_cast<std::size_t>(dim_))
    throw DimensionError("project", dim_, v.size());
  switch (kind_) {
    case SetKind::box: {
      Vector out(v.begin(), v.end());
      for (int i = 0; i < dim_; ++i)
        out[i] = std::clamp(out[i], lower_[i], upper_[i]);
      return out;
    }
    case SetKind::simplex:
      return project_simplex(v);
    case SetKind::free_space:
      return Vector(v.begin(), v.end());
  }
  throw Error("project: unknown set kind");
}

bool FeasibleSet::contains(std::span<const double> v, double tol) const {
  if (v.size() != static_cast<std::size_t>(dim_)) return false;
  switch (kind_) {
    case SetKind::box:
      for (int i = 0; i < dim_; ++i)
        if (v[i] < lower_[i] - tol || v[i] > upper_[i] + tol) return false;
      return true;
    case SetKind::simplex: {
      double sum = 0.0;
      for (double x : v) {
        if (x < -tol) return false;
        sum += x;
      }
      return std::abs(sum - 1.0) <= tol * std::max(1.0, double(dim_));
    }
    case SetKind::free_space:
      return true;
  }
  return false;
}

Vector FeasibleSet::canonical_start() const {
  switch (kind_) {
    case SetKind::box: {
      Vector out(dim_);
      for (int i = 0; i < dim_; ++i) out[i] = 0.5 * (lower_[i] + upper_[i]);
      return out;
    }
    case SetKind::simplex:
      return Vector(dim_, 1.0 / dim_);
    case SetKind::free_space:
      return Vector(dim_, 0.0);
  }
  throw Error("canonical_start: unknown set kind");
}

// --- SeparableFunction -----------------------------------------------------

SeparableFunction SeparableFunction::zero(int dim) {
  SeparableFunction f(FnKind::zero, dim);
  return f;
}

SeparableFunction SeparableFunction::linear(Vector c) {
  SeparableFunction f(FnKind::linear, static_cast<int>(c.size()));
  f.c_ = std::move(c);
  return f;
}

SeparableFunction SeparableFunction::quadratic(int dim, double mu) {
  if (mu < 0.0) throw Error("quadratic: mu must be nonnegative");
  SeparableFunction f(FnKind::quadratic, dim);
  f.mu_ = mu;
  f.modulus_ = mu;
  return f;
}

SeparableFunction SeparableFunction::neg_entropy(int dim) {
  SeparableFunction f(FnKind::neg_entropy, dim);
  // 1-strongly convex on the simplex: (u ln u)'' = 1/u >= 1 for u <= 1.
  f.modulus_ = 1.0;
  return f;
}

double SeparableFunction::value(std::span<const double> v) const {
  if (v.size() != static_cast<std::size_t>(dim_))
    throw DimensionError("SeparableFunction::value", dim_, v.size());
  switch (kind_) {
    case FnKind::zero:
      return 0.0;
    case FnKind::linear:
      return vec::dot(c_, v);
    case FnKind::quadratic:
      return 0.5 * mu_ * vec::norm2_sq(v);
    case FnKind::neg_entropy: {
      double s = 0.0;
      for (double x : v)
        if (x > 0.0) s += x * std::log(x);
      return s;
    }
  }
  throw Error("SeparableFunction::value: unknown kind");
}

Vector SeparableFunction::gradient(std::span<const double> v) const {
  switch (kind_) {
    case FnKind::zero:
      return Vector(v.size(), 0.0);
    case FnKind::linear:
      return c_;
    case FnKind::quadratic:
      return vec::scaled(v, mu_);
    case FnKind::neg_entropy: {
      Vector g(v.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        g[i] = std::log(std::max(v[i], 1e-300)) + 1.0;
      return g;
    }
  }
  throw Error("SeparableFunction::gradient: unknown kind");
}

// --- DistanceGenerating ----------------------------------------------------

double DistanceGenerating::divergence(std::span<const double> u,
                                      std::span<const double> center) const {
  if (u.size() != center.size())
    throw DimensionError("divergence", center.size(), u.size());
  if (kind == DgfKind::euclidean) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = u[i] - center[i];
      s += d * d;
    }
    return 0.5 * s;
  }
  // KL(u || center); conventions 0 ln 0 = 0, positive mass against a zero
  // center coordinate is infeasible.
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] <= 0.0) continue;
    if (center[i] <= 0.0) return kInf;
    s += u[i] * std::log(u[i] / center[i]);
  }
  return s;
}

double DistanceGenerating::diameter_for(const FeasibleSet& set) const {
  if (kind == DgfKind::euclidean) {
    const double omega = set.diameter();
    return 0.5 * omega * omega;
  }
  if (set.kind() != SetKind::simplex)
    throw NoClosedFormError("entropy DGF requires a simplex set");
  return set.dim() >= 2 ? std::log(static_cast<double>(set.dim())) : 0.0;
}

Vector DistanceGenerating::center_for(const FeasibleSet& set) const {
  if (kind == DgfKind::entropy) {
    if (set.kind() != SetKind::simplex)
      throw NoClosedFormError("entropy DGF requires a simplex set");
    return Vector(set.dim(), 1.0 / set.dim());
  }
  return set.canonical_start();
}

// --- prox table -------------------------------------------------------------

namespace {

const char* kSupportedTriples =
    "supported (function, set, dgf) triples: "
    "{zero, linear, quadratic} x {box, simplex, free} x euclidean; "
    "{zero, linear, neg_entropy} x simplex x entropy";

Vector euclidean_prox(const SeparableFunction& f, const FeasibleSet& set,
                      std::span<const double> g, std::span<const double> center,
                      double w) {
  const int d = set.dim();
  Vector base(d);
  switch (f.kind()) {
    case FnKind::zero:
      for (int i = 0; i < d; ++i) base[i] = center[i] - g[i] / w;
      break;
    case FnKind::linear: {
      const Vector& c = f.linear_coeff();
      for (int i = 0; i < d; ++i) base[i] = center[i] - (g[i] + c[i]) / w;
      break;
    }
    case FnKind::quadratic: {
      const double mu = f.mu();
      for (int i = 0; i < d; ++i) base[i] = (w * center[i] - g[i]) / (mu + w);
      break;
    }
    case FnKind::neg_entropy:
      throw NoClosedFormError(
          std::string("no closed-form prox for neg_entropy with euclidean "
                      "distance; ") +
          kSupportedTriples);
  }
  return set.project(base);
}

Vector entropy_prox(const SeparableFunction& f, const FeasibleSet& set,
                    std::span<const double> g, std::span<const double> center,
                    double w) {
  if (set.kind() != SetKind::simplex)
    throw NoClosedFormError(
        std::string("entropy prox needs a simplex set; ") + kSupportedTriples);
  const int d = set.dim();
  // Work in the log domain; zero center coordinates carry zero mass forever.
  Vector logits(d, -kInf);
  switch (f.kind()) {
    case FnKind::zero:
    case FnKind::linear: {
      const Vector* c = f.kind() == FnKind::linear ? &f.linear_coeff() : nullptr;
      for (int i = 0; i < d; ++i) {
        if (center[i] <= 0.0) continue;
        const double gi = g[i] + (c ? (*c)[i] : 0.0);
        logits[i] = std::log(center[i]) - gi / w;
      }
      break;
    }
    case FnKind::neg_entropy: {
      for (int i = 0; i < d; ++i) {
        if (center[i] <= 0.0) continue;
        logits[i] = (w * std::log(center[i]) - g[i]) / (1.0 + w);
      }
      break;
    }
    case FnKind::quadratic:
      throw NoClosedFormError(
          std::string("no closed-form prox for quadratic with entropy "
                      "distance; ") +
          kSupportedTriples);
  }
  double lmax = -kInf;
  for (double l : logits) lmax = std::max(lmax, l);
  if (lmax == -kInf) throw Error("entropy prox: center has no mass");
  Vector out(d, 0.0);
  double z = 0.0;
  for (int i = 0; i < d; ++i) {
    if (logits[i] == -kInf) continue;
    out[i] = std::exp(logits[i] - lmax);
    z += out[i];
  }
  for (double& x : out) x /= z;
  return out;
}

}  // namespace

Vector prox_step(const SeparableFunction& f, const FeasibleSet& set,
                 const DistanceGenerating& dgf, std::span<const double> linear_term,
                 std::span<const double> center, double weight) {
  if (weight <= 0.0) throw Error("prox_step: weight must be positive");
  if (linear_term.size() != static_cast<std::size_t>(set.dim()))
    throw DimensionError("prox_step linear term", set.dim(), linear_term.size());
  if (center.size() != static_cast<std::size_t>(set.dim()))
    throw DimensionError("prox_step center", set.dim(), center.size());
  if (dgf.kind == DgfKind::euclidean)
    return euclidean_prox(f, set, linear_term, center, weight);
  return entropy_prox(f, set, linear_term, center, weight);
}

Vector prox_dual_block(const SaddleInstance& inst, int i,
                       std::span<const double> linear_term,
                       std::span<const double> center, double tau) {
  return prox_step(inst.J[i - 1], inst.Y[i - 1], inst.dgf_y[i - 1], linear_term,
                   center, tau);
}

Vector prox_primal(const SaddleInstance& inst, std::span<const double> linear_term,
                   std::span<const double> center, double eta) {
  const SeparableFunction& h = inst.h;
  return prox_step(h, inst.X, inst.dgf_x, linear_term, center, eta);
}

// --- concave maximization ---------------------------------------------------

Vector concave_argmax(std::span<const double> g, const SeparableFunction& f,
                      const FeasibleSet& set) {
  const int d = set.dim();
  if (g.size() != static_cast<std::size_t>(d))
    throw DimensionError("concave_argmax", d, g.size());

  Vector g_eff(g.begin(), g.end());
  if (f.kind() == FnKind::linear)
    for (int i = 0; i < d; ++i) g_eff[i] -= f.linear_coeff()[i];

  if (f.kind() == FnKind::quadratic && f.mu() > 0.0) {
    // <g,u> - (mu/2)||u||^2 peaks at g/mu; projection solves the
    // set-constrained version since the Hessian is a multiple of I.
    Vector peak(d);
    for (int i = 0; i < d; ++i) peak[i] = g_eff[i] / f.mu();
    return set.project(peak);
  }
  if (f.kind() == FnKind::neg_entropy) {
    if (set.kind() != SetKind::simplex)
      throw NoClosedFormError("neg_entropy maximizer needs a simplex set");
    double lmax = -kInf;
    for (double v : g_eff) lmax = std::max(lmax, v);
    Vector out(d);
    double z = 0.0;
    for (int i = 0; i < d; ++i) {
      out[i] = std::exp(g_eff[i] - lmax);
      z += out[i];
    }
    for (double& x : out) x /= z;
    return out;
  }

  // Linear objective (zero / linear / quadratic with mu = 0).
  switch (set.kind()) {
    case SetKind::simplex: {
      int best = 0;
      for (int i = 1; i < d; ++i)
        if (g_eff[i] > g_eff[best]) best = i;
      Vector out(d, 0.0);
      out[best] = 1.0;
      return out;
    }
    case SetKind::box: {
      Vector out(d);
      for (int i = 0; i < d; ++i)
        out[i] = g_eff[i] > 0.0 ? set.upper()[i] : set.lower()[i];
      return out;
    }
    case SetKind::free_space:
      throw UnboundedError(
          "linear maximization over a free set is unbounded; use a bounded "
          "or strongly convex dual block");
  }
  throw Error("concave_argmax: unknown set kind");
}

double concave_max_value(std::span<const double> g, const SeparableFunction& f,
                         const FeasibleSet& set) {
  const Vector u = concave_argmax(g, f, set);
  return vec::dot(g, u) - f.value(u);
}

// --- SaddleInstance ---------------------------------------------------------

bool SaddleInstance::smooth() const {
  for (const auto& j : J)
    if (j.modulus() < 1.0) return false;
  return true;
}

bool SaddleInstance::dual_bounded() const {
  for (const auto& y : Y)
    if (!y.bounded()) return false;
  return true;
}

double SaddleInstance::J_value(std::span<const double> y) const {
  double s = 0.0;
  for (int i = 1; i <= p(); ++i) s += J[i - 1].value(block(y, i));
  return s;
}

double SaddleInstance::omega_y() const {
  double s = 0.0;
  for (const auto& set : Y) {
    if (!set.bounded()) return kInf;
    s += set.diameter() * set.diameter();
  }
  return std::sqrt(s);
}

double SaddleInstance::bregman_diameter_y() const {
  double s = 0.0;
  for (int i = 0; i < p(); ++i) s += dgf_y[i].diameter_for(Y[i]);
  return s;
}

std::span<const double> SaddleInstance::block(std::span<const double> y,
                                              int i) const {
  return y.subspan(A.row_offset(i), A.block_dim(i));
}

void SaddleInstance::set_block(Vector& y, int i,
                               std::span<const double> v) const {
  std::copy(v.begin(), v.end(), y.begin() + A.row_offset(i));
}

namespace {

// Q_0 evaluated locally to keep this module independent of quality.
double gap_q0_local(const SaddleInstance& inst, const Vector& xh,
                    const Vector& yh, const Vector& x, const Vector& y) {
  const Vector axh = inst.A.apply(xh);
  const Vector ax = inst.A.apply(x);
  return (inst.h.value(xh) + vec::dot(axh, y) - inst.J_value(y)) -
         (inst.h.value(x) + vec::dot(ax, yh) - inst.J_value(yh));
}

std::vector<Vector> probe_points(const FeasibleSet& set, RngStream& rng) {
  std::vector<Vector> probes;
  probes.push_back(set.canonical_start());
  const int d = set.dim();
  const int axes = std::min(d, 4);
  for (int i = 0; i < axes; ++i) {
    Vector e(d, 0.0);
    e[i] = 1.0;
    probes.push_back(set.project(e));
    e[i] = -1.0;
    probes.push_back(set.project(e));
  }
  for (int k = 0; k < 4; ++k) {
    Vector v(d);
    for (int i = 0; i < d; ++i)
      v[i] = 2.0 * (static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53) - 1.0;
    probes.push_back(set.project(v));
  }
  return probes;
}

}  // namespace

void SaddleInstance::certify_optimum(double tol) const {
  if (!optimum) return;
  const Vector& xs = optimum->x;
  const Vector& ys = optimum->y;
  if (!X.contains(xs, 1e-9)) throw Error("certify_optimum: x* infeasible");
  RngStream rng(12345);
  std::vector<Vector> x_probes = probe_points(X, rng);
  std::vector<Vector> y_probes;
  {
    // Blockwise probe products, keeping the count small.
    std::vector<std::vector<Vector>> per_block;
    for (int i = 0; i < p(); ++i) per_block.push_back(probe_points(Y[i], rng));
    const std::size_t count = per_block[0].size();
    for (std::size_t k = 0; k < count; ++k) {
      Vector y;
      for (int i = 0; i < p(); ++i) {
        const auto& list = per_block[i];
        const Vector& piece = list[k % list.size()];
        y.insert(y.end(), piece.begin(), piece.end());
      }
      y_probes.push_back(std::move(y));
    }
    y_probes.push_back(ys);
  }
  for (const auto& x : x_probes)
    for (const auto& y : y_probes) {
      const double q = gap_q0_local(*this, xs, ys, x, y);
      if (q > tol)
        throw Error("certify_optimum: Q0(z*, z) = " + std::to_string(q) +
                    " exceeds " + std::to_string(tol));
    }
}

// --- initial dual -----------------------------------------------------------

Vector initial_dual(const SaddleInstance& inst, std::span<const double> x1) {
  if (!inst.X.contains(x1))
    throw Error("initial_dual: start point infeasible");
  Vector y(inst.dual_dim(), 0.0);
  for (int i = 1; i <= inst.p(); ++i) {
    const Vector g = inst.A.apply_block(i, x1);
    const Vector yi = concave_argmax(g, inst.J[i - 1], inst.Y[i - 1]);
    inst.set_block(y, i, yi);
  }
  return y;
}

// --- builders ---------------------------------------------------------------

namespace {

// Exact equilibrium of a 2x2 zero-sum game min_x max_y y'Mx over simplices.
SaddlePoint solve_2x2_game(const BlockLinearOperator& m) {
  const double a = m.entry(0, 0), b = m.entry(0, 1);
  const double c = m.entry(1, 0), d = m.entry(1, 1);
  // Pure saddle: entry maximal in its column, minimal in its row.
  const double col_max[2] = {std::max(a, c), std::max(b, d)};
  const double row_min[2] = {std::min(a, b), std::min(c, d)};
  const double entries[2][2] = {{a, b}, {c, d}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (entries[i][j] == col_max[j] && entries[i][j] == row_min[i]) {
        SaddlePoint s;
        s.x = {j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0};
        s.y = {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0};
        s.value = entries[i][j];
        return s;
      }
  const double denom = a - b - c + d;
  SaddlePoint s;
  s.x = {(d - b) / denom, (a - c) / denom};
  s.y = {(d - c) / denom, (a - b) / denom};
  s.value = (a * d - b * c) / denom;
  return s;
}

}  // namespace

SaddleInstance build_matrix_game(const BlockLinearOperator& payoff, int p,
                                 std::optional<SaddlePoint> known) {
  const BlockLinearOperator a = payoff.with_blocks(p);
  SaddleInstance inst{
      a,
      SeparableFunction::zero(a.n()),
      FeasibleSet::simplex(a.n()),
      {},
      {},
      DistanceGenerating::euclidean(),
      {},
      std::nullopt,
      std::nullopt,
      "matrix_game"};
  for (int i = 1; i <= p; ++i) {
    inst.J.push_back(SeparableFunction::zero(a.block_dim(i)));
    inst.Y.push_back(FeasibleSet::simplex(a.block_dim(i)));
    inst.dgf_y.push_back(DistanceGenerating::euclidean());
  }
  if (known) {
    inst.optimum = std::move(known);
  } else if (a.m() == 2 && a.n() == 2 && p == 1) {
    inst.optimum = solve_2x2_game(a);
  }
  inst.certify_optimum();
  return inst;
}

BlockLinearOperator counterexample_matrix(int p) {
  if (p < 2) throw Error("counterexample_matrix: p must be >= 2");
  Vector data(static_cast<std::size_t>(p) * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      data[static_cast<std::size_t>(i) * p + j] = (i + j + 2 > p + 1) ? 2.0 : 1.0;
  return BlockLinearOperator::dense(p, p, std::move(data));
}

SaddleInstance build_counterexample_lcp(int p) {
  const BlockLinearOperator m = counterexample_matrix(p).with_blocks(p);
  SaddleInstance inst{
      m,
      SeparableFunction::zero(p),
      FeasibleSet::free(p),
      {},
      {},
      DistanceGenerating::euclidean(),
      {},
      SaddlePoint{Vector(p, 0.0), Vector(p, 0.0), 0.0},
      Vector(p, 1.0),
      "counterexample_lcp"};
  for (int i = 0; i < p; ++i) {
    inst.J.push_back(SeparableFunction::zero(1));
    inst.Y.push_back(FeasibleSet::free(1));
    inst.dgf_y.push_back(DistanceGenerating::euclidean());
  }
  inst.certify_optimum();
  return inst;
}

SaddleInstance build_regularized_loss_toy(const BlockLinearOperator& a,
                                          bool smooth, double box_lo,
                                          double box_hi) {
  SaddleInstance inst{
      a,
      SeparableFunction::quadratic(a.n(), 1.0),
      FeasibleSet::box(Vector(a.n(), box_lo), Vector(a.n(), box_hi)),
      {},
      {},
      DistanceGenerating::euclidean(),
      {},
      std::nullopt,
      std::nullopt,
      smooth ? "regularized_loss_smooth" : "regularized_loss_nonsmooth"};
  for (int i = 1; i <= a.p(); ++i) {
    const int d = a.block_dim(i);
    inst.J.push_back(smooth ? SeparableFunction::quadratic(d, 1.0)
                            : SeparableFunction::zero(d));
    inst.Y.push_back(FeasibleSet::box(Vector(d, box_lo), Vector(d, box_hi)));
    inst.dgf_y.push_back(DistanceGenerating::euclidean());
  }
  if (smooth && box_lo < 0.0 && box_hi > 0.0) {
    // Unconstrained stationary point (0, 0) is interior, hence the saddle.
    inst.optimum = SaddlePoint{Vector(a.n(), 0.0), Vector(a.m(), 0.0), 0.0};
    inst.certify_optimum();
  }
  return inst;
}

// --- JSON -------------------------------------------------------------------

namespace {

using nlohmann::json;

SeparableFunction fn_from_json(const json& j) {
  const std::string v = j.at("variant").get<std::string>();
  if (v == "zero") return SeparableFunction::zero(j.at("dim").get<int>());
  if (v == "linear")
    return SeparableFunction::linear(j.at("c").get<Vector>());
  if (v == "quadratic")
    return SeparableFunction::quadratic(j.at("dim").get<int>(),
                                        j.at("mu").get<double>());
  if (v == "neg_entropy")
    return SeparableFunction::neg_entropy(j.at("dim").get<int>());
  throw ConfigError("unknown function variant: " + v);
}

FeasibleSet set_from_json(const json& j) {
  const std::string v = j.at("variant").get<std::string>();
  if (v == "box")
    return FeasibleSet::box(j.at("lower").get<Vector>(),
                            j.at("upper").get<Vector>());
  if (v == "simplex") return FeasibleSet::simplex(j.at("dim").get<int>());
  if (v == "free") return FeasibleSet::free(j.at("dim").get<int>());
  throw ConfigError("unknown set variant: " + v);
}

DistanceGenerating dgf_from_json(const json& j) {
  const std::string v = j.get<std::string>();
  if (v == "euclidean") return DistanceGenerating::euclidean();
  if (v == "entropy") return DistanceGenerating::entropy();
  throw ConfigError("unknown dgf: " + v);
}

}  // namespace

SaddleInstance instance_from_json_text(const std::string& text) {
  json j = json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "matrix_game") {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    auto payoff = BlockLinearOperator::dense(rows, cols, j.at("matrix").get<Vector>());
    return build_matrix_game(payoff, j.value("p", 1));
  }
  if (kind == "counterexample_lcp")
    return build_counterexample_lcp(j.at("p").get<int>());
  if (kind == "regularized_loss") {
    auto op = BlockLinearOperator(
        j.at("operator").at("n").get<int>(),
        j.at("operator").at("block_dims").get<std::vector<int>>(),
        j.at("operator").at("matrix").get<Vector>());
    return build_regularized_loss_toy(op, j.value("smooth", true),
                                      j.value("box_lo", -4.0),
                                      j.value("box_hi", 16.0));
  }
  if (kind == "custom") {
    auto op = BlockLinearOperator(
        j.at("operator").at("n").get<int>(),
        j.at("operator").at("block_dims").get<std::vector<int>>(),
        j.at("operator").at("matrix").get<Vector>());
    SaddleInstance inst{op,
                        fn_from_json(j.at("h")),
                        set_from_json(j.at("X")),
                        {},
                        {},
                        DistanceGenerating::euclidean(),
                        {},
                        std::nullopt,
                        std::nullopt,
                        "custom"};
    for (const auto& je : j.at("J")) inst.J.push_back(fn_from_json(je));
    for (const auto& je : j.at("Y")) inst.Y.push_back(set_from_json(je));
    if (j.contains("dgf_x")) inst.dgf_x = dgf_from_json(j.at("dgf_x"));
    if (j.contains("dgf_y"))
      for (const auto& je : j.at("dgf_y")) inst.dgf_y.push_back(dgf_from_json(je));
    else
      inst.dgf_y.assign(inst.Y.size(), DistanceGenerating::euclidean());
    if (inst.J.size() != static_cast<std::size_t>(op.p()) ||
        inst.Y.size() != static_cast<std::size_t>(op.p()))
      throw ConfigError("custom instance: J/Y must have one entry per block");
    for (int i = 1; i <= op.p(); ++i)
      if (inst.Y[i - 1].dim() != op.block_dim(i))
        throw ConfigError("custom instance: Y block dimension mismatch");
    return inst;
  }
  throw ConfigError("unknown instance kind: " + kind);
}

}  // namespace rpd
