#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "rpd/errors.hpp"
#include "rpd/linops.hpp"
#include "rpd/problems.hpp"
#include "rpd/rng.hpp"

using namespace rpd;

namespace {

BlockLinearOperator two_block_rows() {
  // A_1 = [1 1], A_2 = [1 -1]
  return BlockLinearOperator(2, {1, 1}, {1.0, 1.0, 1.0, -1.0});
}

BlockLinearOperator random_operator(RngStream& rng, int m, int n,
                                    std::vector<int> dims) {
  Vector data(static_cast<std::size_t>(m) * n);
  for (double& v : data)
    v = 2.0 * (static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53) - 1.0;
  return BlockLinearOperator(n, std::move(dims), std::move(data));
}

Vector random_vector(RngStream& rng, int n) {
  Vector v(n);
  for (double& x : v)
    x = 2.0 * (static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53) - 1.0;
  return v;
}

}  // namespace

TEST_CASE("apply: identity and hand-computed block cases") {
  const auto id = BlockLinearOperator::identity(2);
  CHECK(id.apply(Vector{1.0, 2.0}) == Vector{1.0, 2.0});

  const auto a = two_block_rows();
  CHECK(a.apply(Vector{3.0, 4.0}) == Vector{7.0, -1.0});

  const auto ce = counterexample_matrix(3);
  CHECK(ce.apply(Vector{1.0, 1.0, 1.0}) == Vector{3.0, 4.0, 5.0});
}

TEST_CASE("apply rejects dimension mismatch with sizes in the message") {
  const auto a = two_block_rows();
  CHECK_THROWS_WITH_AS(a.apply(Vector{1.0, 2.0, 3.0}),
                       doctest::Contains("expected size 2"), DimensionError);
}

TEST_CASE("apply_block equals the matching slice of apply, bit-exact") {
  const auto id2 = BlockLinearOperator::identity(2).with_blocks(2);
  CHECK(id2.apply_block(2, Vector{5.0, 7.0}) == Vector{7.0});

  const auto a = two_block_rows();
  CHECK(a.apply_block(1, Vector{3.0, 4.0}) == Vector{7.0});

  // p = 1 degenerate blocking
  const auto whole = BlockLinearOperator::dense(2, 2, {1.0, 1.0, 1.0, -1.0});
  CHECK(whole.apply_block(1, Vector{3.0, 4.0}) == whole.apply(Vector{3.0, 4.0}));

  RngStream rng(7);
  const auto r = random_operator(rng, 6, 4, {2, 3, 1});
  const Vector x = random_vector(rng, 4);
  const Vector full = r.apply(x);
  for (int i = 1; i <= 3; ++i) {
    const Vector bi = r.apply_block(i, x);
    for (int k = 0; k < r.block_dim(i); ++k)
      CHECK(bi[k] == full[r.row_offset(i) + k]);
  }

  CHECK_THROWS_AS(r.apply_block(0, x), DimensionError);
  CHECK_THROWS_AS(r.apply_block(4, x), DimensionError);
}

TEST_CASE("adjoint_apply hand cases and the adjoint identity") {
  const auto id = BlockLinearOperator::identity(2);
  CHECK(id.adjoint_apply(Vector{1.0, 2.0}) == Vector{1.0, 2.0});

  const auto a = two_block_rows();
  CHECK(a.adjoint_apply(Vector{2.0, 1.0}) == Vector{3.0, 1.0});

  RngStream rng(99);
  for (int rep = 0; rep < 25; ++rep) {
    const auto r = random_operator(rng, 5, 3, {2, 2, 1});
    const Vector x = random_vector(rng, 3);
    const Vector y = random_vector(rng, 5);
    const double lhs = vec::dot(r.apply(x), y);
    const double rhs = vec::dot(x, r.adjoint_apply(y));
    CHECK(std::abs(lhs - rhs) <=
          1e-12 * std::max({std::abs(lhs), std::abs(rhs), 1.0}));
  }
}

TEST_CASE("spectral norm: identity, diagonal, and the 3x3 eigen oracle") {
  CHECK(spectral_norm(BlockLinearOperator::identity(2)) ==
        doctest::Approx(1.0).epsilon(1e-10));

  const auto diag = BlockLinearOperator::dense(2, 2, {3.0, 0.0, 0.0, 4.0});
  CHECK(spectral_norm(diag) == doctest::Approx(4.0).epsilon(1e-10));

  const auto ce = counterexample_matrix(3);
  double gram[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      gram[i][j] = 0.0;
      for (int r = 0; r < 3; ++r) gram[i][j] += ce.entry(r, i) * ce.entry(r, j);
    }
  const double expected = std::sqrt(oracle::sym3_max_eigenvalue(gram));
  CHECK(spectral_norm(ce) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("spectral norm invariances: transpose and scaling") {
  RngStream rng(5);
  const auto r = random_operator(rng, 5, 3, {5});
  const double s = spectral_norm(r, 1e-11);
  CHECK(spectral_norm(r.transposed(), 1e-11) == doctest::Approx(s).epsilon(2e-11));
  CHECK(spectral_norm(r.scaled(-2.5), 1e-11) ==
        doctest::Approx(2.5 * s).epsilon(2e-11));
}

TEST_CASE("spectral norm: zero operator and null-space restart") {
  const auto zero = BlockLinearOperator::dense(2, 2, {0.0, 0.0, 0.0, 0.0});
  CHECK(spectral_norm(zero) == 0.0);

  // All-ones start is annihilated by [1 -1]; the ramp restart recovers.
  const auto a = BlockLinearOperator::dense(1, 2, {1.0, -1.0});
  CHECK(spectral_norm(a) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("spectral norm error carries the last estimate") {
  const auto diag = BlockLinearOperator::dense(2, 2, {1.0, 0.0, 0.0, 0.999});
  try {
    spectral_norm(diag, 1e-16, 3);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_estimate > 0.9);
    CHECK(e.last_estimate <= 1.001);
  }
}

TEST_CASE("operator JSON round trip") {
  const auto a = two_block_rows();
  const auto b = operator_from_json_text(operator_to_json_text(a));
  CHECK(b.n() == a.n());
  CHECK(b.block_dims() == a.block_dims());
  CHECK(b.matrix() == a.matrix());
  CHECK_THROWS_AS(operator_from_json_text("{\"n\": 2}"), ConfigError);
}

TEST_CASE("counterexample matrix family: pattern and nonsingularity") {
  const auto m2 = counterexample_matrix(2);
  CHECK(m2.matrix() == Vector{1.0, 1.0, 1.0, 2.0});

  const auto m3 = counterexample_matrix(3);
  CHECK(m3.matrix() == Vector{1, 1, 1, 1, 1, 2, 1, 2, 2});

  const auto m10 = counterexample_matrix(10);
  std::vector<Vector> rows(10, Vector(10));
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) rows[r][c] = m10.entry(r, c);
  CHECK(std::abs(oracle::lu_determinant(rows)) > 0.5);
}
