#include "doctest.h"

#include <random>

#include "cgns/errors.hpp"
#include "cgns/linalg.hpp"
#include "cgns/rng.hpp"

using namespace cgns;

TEST_CASE("psd_sqrt of the identity is the identity") {
  CHECK((psd_sqrt(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("psd_sqrt of diag(4, 9) is diag(2, 3)") {
  Matrix m = Vector((Vector(2) << 4.0, 9.0).finished()).asDiagonal();
  Matrix s = psd_sqrt(m);
  CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(s(0, 1)) < 1e-14);
}

TEST_CASE("psd_sqrt reconstructs random positive definite matrices") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 50; ++rep) {
    Matrix a(3, 3);
    for (int i = 0; i < 9; ++i) a(i) = n(gen);
    Matrix m = a * a.transpose() + 0.1 * Matrix::Identity(3, 3);
    Matrix s = psd_sqrt(m);
    CHECK((s * s - m).norm() <= 1e-10 * m.norm());
    CHECK((s - s.transpose()).norm() == 0.0);
  }
}

TEST_CASE("psd_sqrt clamps tiny negative eigenvalues and rejects large ones") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1e-12;
  Matrix s = psd_sqrt(m);
  CHECK(s(1, 1) == 0.0);
  m(1, 1) = -1e-6;
  CHECK_THROWS_AS(psd_sqrt(m, kTolPsd, 2.5), NotPsd);
  try {
    psd_sqrt(m, kTolPsd, 2.5);
  } catch (const NotPsd& e) {
    CHECK(e.time() == 2.5);
    CHECK(e.min_eigenvalue() == doctest::Approx(-1e-6));
  }
}

TEST_CASE("clamp_psd leaves PSD input untouched and flags reconstructions") {
  Matrix m(2, 2);
  m << 2.0, 0.5, 0.5, 1.0;
  bool clamped = true;
  Matrix out = clamp_psd(m, kTolPsd, "m", 0.0, &clamped);
  CHECK_FALSE(clamped);
  CHECK(out == m);

  Matrix n(2, 2);
  n << 1.0, 1.0, 1.0, 1.0 - 1e-11;
  out = clamp_psd(n, kTolPsd, "n", 0.0, &clamped);
  CHECK(clamped);
  CHECK(min_eigenvalue(out) >= -1e-15);
  CHECK_THROWS_AS(clamp_psd(-Matrix::Identity(2, 2), kTolPsd, "neg", 0.0), NotPsd);
}

TEST_CASE("eigenvalue ranges") {
  Matrix m(2, 2);
  m << 3.0, 1.0, 1.0, 3.0;
  auto r = symmetric_eigen_range(m);
  CHECK(r.min == doctest::Approx(2.0));
  CHECK(r.max == doctest::Approx(4.0));

  Matrix rot(2, 2);
  rot << -1.0, 2.0, -2.0, -1.0;  // eigenvalues -1 +- 2i
  auto rr = real_part_range(rot);
  CHECK(rr.min == doctest::Approx(-1.0));
  CHECK(rr.max == doctest::Approx(-1.0));
}

TEST_CASE("all_finite") {
  Matrix m = Matrix::Ones(2, 2);
  CHECK(all_finite(m));
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(all_finite(m));
}

TEST_CASE("NormalRng is reproducible and roughly standard normal") {
  NormalRng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    (void)c;
  }
  NormalRng g(7);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.normal();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));

  NormalRng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x > 0.0 && x < 1.0));
  }
}

TEST_CASE("seed derivation separates streams and members") {
  CHECK(sub_seed(1, 0) != sub_seed(1, 1));
  CHECK(sub_seed(1, 0) != sub_seed(2, 0));
  CHECK(sub_seed(5, 3) == sub_seed(5, 3));
  CHECK(stream_seed(0, StreamLabel::Truth) != stream_seed(0, StreamLabel::ForwardSampler));
  CHECK(stream_seed(0, StreamLabel::ForwardSampler) !=
        stream_seed(0, StreamLabel::BackwardSampler));
  CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
}
