// Independent brute-force oracles used only by tests. Everything here is
// deliberately written without calling the library's own solution paths.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rpd/linops.hpp"
#include "rpd/problems.hpp"
#include "rpd/vec.hpp"

namespace oracle {

using rpd::Vector;

// Largest eigenvalue of a symmetric 3x3 matrix via the characteristic
// polynomial (trigonometric cubic formula).
double sym3_max_eigenvalue(const double m[3][3]);

// Determinant by LU factorization with partial pivoting.
double lu_determinant(const std::vector<Vector>& rows);

// Simplex projection by bisection on the shift threshold (independent of
// the library's sort-and-threshold routine).
Vector project_simplex_bisect(const Vector& v);

// Exhaustive minimizer of fn over a box grid, then a refined pass around
// the coarse argmin. Returns the refined argmin.
Vector grid_minimize_box(const Vector& lo, const Vector& hi,
                         const std::function<double(const Vector&)>& fn,
                         int coarse_per_dim, int refine_per_dim);

// Exhaustive minimizer over a fine grid on the probability simplex
// (barycentric grid with `resolution` subdivisions).
Vector grid_minimize_simplex(int dim,
                             const std::function<double(const Vector&)>& fn,
                             int resolution);

// Value and equilibrium of the zero-sum game min over the column simplex,
// max over contiguous row-block simplices, by reducing block maxima to a
// composite-row matrix game and solving both LPs with a dense tableau
// simplex method.
struct GameSolution {
  double value = 0.0;
  Vector x;  // column player
  Vector y;  // concatenated block strategies
};
GameSolution solve_blocked_game_lp(const rpd::BlockLinearOperator& payoff, int p);

// Straight-line deterministic primal-dual reference for p = 1 instances
// with Euclidean prox terms (h, J in {zero, linear, quadratic}; sets box,
// simplex, or free). Returns the weighted-average output and the final
// iterates; arrays are the same 1-based sequences the solver consumes.
struct ReferenceRun {
  Vector x_hat, y_hat;
  std::vector<Vector> x_iterates;  // x^1 ... x^N
  std::vector<Vector> y_iterates;  // y^1 ... y^N
};
ReferenceRun deterministic_primal_dual(const rpd::SaddleInstance& inst,
                                       const Vector& tau, const Vector& eta,
                                       const Vector& q, const Vector& gamma,
                                       const Vector& x1, const Vector& y1);

}  // namespace oracle
