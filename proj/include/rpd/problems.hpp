#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpd/linops.hpp"
#include "rpd/vec.hpp"

namespace rpd {

enum class SetKind { box, simplex, free_space };

// Closed convex feasible set with exact Euclidean projection and a cached
// diameter (+inf for free space, sqrt(2) for a standard simplex of dimension
// >= 2, 0 for the one-point simplex of dimension 1).
class FeasibleSet {
 public:
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet simplex(int dim);
  static FeasibleSet free(int dim);

  SetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double diameter() const { return diameter_; }
  bool bounded() const { return kind_ != SetKind::free_space; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  Vector project(std::span<const double> v) const;
  bool contains(std::span<const double> v, double tol = 1e-9) const;
  // Canonical deterministic start: box midpoint, simplex uniform, origin.
  Vector canonical_start() const;

 private:
  FeasibleSet(SetKind kind, int dim) : kind_(kind), dim_(dim) {}
  SetKind kind_;
  int dim_;
  double diameter_ = 0.0;
  Vector lower_, upper_;  // box only
};

// Euclidean projection onto the standard simplex by sort-and-threshold;
// sorting ties broken by coordinate index.
Vector project_simplex(std::span<const double> v);

enum class FnKind { zero, linear, quadratic, neg_entropy };

// Separable closed convex function used for h and the J_i:
//   zero, <c, .>, (mu/2)||.||^2, or sum_j u_j ln u_j (tests only).
class SeparableFunction {
 public:
  static SeparableFunction zero(int dim);
  static SeparableFunction linear(Vector c);
  static SeparableFunction quadratic(int dim, double mu);
  static SeparableFunction neg_entropy(int dim);

  FnKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double modulus() const { return modulus_; }
  double mu() const { return mu_; }
  const Vector& linear_coeff() const { return c_; }

  double value(std::span<const double> v) const;
  Vector gradient(std::span<const double> v) const;

 private:
  SeparableFunction(FnKind kind, int dim) : kind_(kind), dim_(dim) {}
  FnKind kind_;
  int dim_;
  double mu_ = 0.0;
  double modulus_ = 0.0;
  Vector c_;
};

enum class DgfKind { euclidean, entropy };

// Distance generating function and its Bregman divergence. Euclidean gives
// V(u, c) = ||u - c||^2 / 2; entropy (simplex only) gives KL(u || c).
struct DistanceGenerating {
  DgfKind kind = DgfKind::euclidean;

  static DistanceGenerating euclidean() { return {DgfKind::euclidean}; }
  static DistanceGenerating entropy() { return {DgfKind::entropy}; }

  double divergence(std::span<const double> u, std::span<const double> center) const;
  // Diameter D = max omega - min omega over the set: Omega^2/2 (euclidean),
  // ln d (entropy on the d-simplex).
  double diameter_for(const FeasibleSet& set) const;
  // argmin of omega over the set (prox center): uniform point for entropy.
  Vector center_for(const FeasibleSet& set) const;
};

struct SaddlePoint {
  Vector x;
  Vector y;
  double value = 0.0;
};

// The bilinear saddle point model: min over X of h(x) + max over Y of
// <Ax, y> - J(y) with Y a product of p blocks. Immutable after construction;
// oracles are pure functions.
struct SaddleInstance {
  BlockLinearOperator A;
  SeparableFunction h;
  FeasibleSet X;
  std::vector<SeparableFunction> J;
  std::vector<FeasibleSet> Y;
  DistanceGenerating dgf_x = DistanceGenerating::euclidean();
  std::vector<DistanceGenerating> dgf_y;
  std::optional<SaddlePoint> optimum;
  // Designated y^1 for instances where the exact dual maximizer is
  // degenerate (free blocks with J = 0).
  std::optional<Vector> start_dual;
  std::string name;

  int p() const { return A.p(); }
  int primal_dim() const { return A.n(); }
  int dual_dim() const { return A.m(); }
  // true iff every J_i has strong convexity modulus >= 1
  bool smooth() const;
  bool dual_bounded() const;

  double J_value(std::span<const double> y) const;
  // Euclidean diameters; the dual diameter is the exact product-set value
  // sqrt(sum_i Omega_i^2). +inf when any factor is unbounded.
  double omega_x() const { return X.diameter(); }
  double omega_y() const;
  // Bregman diameters D_X and D_Y = sum_i D_i for the attached DGFs.
  double bregman_diameter_x() const { return dgf_x.diameter_for(X); }
  double bregman_diameter_y() const;

  std::span<const double> block(std::span<const double> y, int i) const;
  void set_block(Vector& y, int i, std::span<const double> v) const;

  // Construction-time certificate: Q_0(z*, z) <= 1e-9 on a deterministic
  // grid of probe points.
  void certify_optimum(double tol = 1e-9) const;
};

// Minimizer of <linear_term, u> + f(u) + weight * V(u, center) over the set,
// in closed form per (f variant, set variant, DGF variant). Throws
// NoClosedFormError for unsupported triples.
Vector prox_step(const SeparableFunction& f, const FeasibleSet& set,
                 const DistanceGenerating& dgf, std::span<const double> linear_term,
                 std::span<const double> center, double weight);

// Dual block prox for block i (uses the instance's block DGF).
Vector prox_dual_block(const SaddleInstance& inst, int i,
                       std::span<const double> linear_term,
                       std::span<const double> center, double tau);

// Primal prox (uses the instance's primal DGF).
Vector prox_primal(const SaddleInstance& inst, std::span<const double> linear_term,
                   std::span<const double> center, double eta);

// argmax of <g, u> - f(u) over the set; ties on linear maximization over
// simplex/box broken toward the lowest coordinate index. Throws
// UnboundedError when the maximizer does not exist.
Vector concave_argmax(std::span<const double> g, const SeparableFunction& f,
                      const FeasibleSet& set);
double concave_max_value(std::span<const double> g, const SeparableFunction& f,
                         const FeasibleSet& set);

// Exact dual initializer: per-block argmax of <A_i x1, y_i> - J_i(y_i).
Vector initial_dual(const SaddleInstance& inst, std::span<const double> x1);

// Canonical instances ----------------------------------------------------

// Two-player zero-sum game min over the column simplex, max over row-block
// simplices: h = J = 0, A = payoff. Rows must divide into p equal blocks.
// A closed-form equilibrium is attached for 2x2 payoffs; callers with an
// external solve may pass one explicitly.
SaddleInstance build_matrix_game(const BlockLinearOperator& payoff, int p,
                                 std::optional<SaddlePoint> known = std::nullopt);

// The p x p pattern matrix (1; ...; 1), (1; ...; 1; 2), ..., (1; 2; ...; 2)
// stacked as columns: entry(i, j) = 2 when i + j > p, else 1 (0-based).
BlockLinearOperator counterexample_matrix(int p);

// Saddle reformulation of the homogeneous system sum_i A_i x_i = 0 over the
// pattern family: p scalar free dual blocks, free multiplier space, known
// solution at the origin, designated dual start (1, ..., 1).
SaddleInstance build_counterexample_lcp(int p);

// Small regularized-loss saddle: h quadratic over a box, J_i quadratic with
// modulus 1 over boxes (smooth) or zero over boxes (nonsmooth). The box is
// offset so the canonical start differs from the saddle at the origin.
SaddleInstance build_regularized_loss_toy(const BlockLinearOperator& a,
                                          bool smooth, double box_lo = -4.0,
                                          double box_hi = 16.0);

// Instance JSON: {"kind": "matrix_game"|"counterexample_lcp"|
// "regularized_loss"|"custom", kind-specific fields, "p": ...}.
SaddleInstance instance_from_json_text(const std::string& text);

}  // namespace rpd
