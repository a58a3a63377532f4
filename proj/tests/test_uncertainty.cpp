#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flexcert/error.hpp"
#include "flexcert/rng.hpp"
#include "flexcert/uncertainty.hpp"

using namespace flexcert;

namespace {

Matrix zeros_like(const Matrix& m) { return Matrix(m.rows(), m.cols()); }

Matrix random_cloud(Rng& rng, std::size_t t, std::size_t n) {
  // Correlated cloud: random linear mix of independent normals.
  Matrix mix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mix(i, j) = rng.uniform(-1.0, 1.0);
  Matrix w(t, n);
  for (std::size_t r = 0; r < t; ++r) {
    Vector z(n);
    for (double& v : z) v = rng.normal();
    const Vector e = mix * z;
    for (std::size_t i = 0; i < n; ++i) w(r, i) = 10.0 + 3.0 * e[i];
  }
  return w;
}

template <typename F>
ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("center_data: identical series give zeros") {
  Rng rng(1);
  const Matrix w = random_cloud(rng, 5, 3);
  CHECK(center_data(w, w).max_abs() == 0.0);
}

TEST_CASE("center_data removes a constant bias") {
  Matrix w(4, 2), mu(4, 2);
  const double e[4] = {1.0, -2.0, 0.5, 0.5};
  for (std::size_t t = 0; t < 4; ++t) {
    mu(t, 0) = 100.0;
    mu(t, 1) = 50.0;
    w(t, 0) = 100.0 + e[t];
    w(t, 1) = 50.0 + 5.0;  // pure bias column
  }
  const Matrix wc = center_data(w, mu);
  double sum0 = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    sum0 += wc(t, 0);
    CHECK(wc(t, 1) == doctest::Approx(0.0));
  }
  CHECK(sum0 == doctest::Approx(0.0));
}

TEST_CASE("center_data hand-computed 4x2 case") {
  const Matrix w = Matrix::from_rows({{1, 2}, {3, 5}, {2, 2}, {6, 3}});
  const Matrix mu = Matrix::from_rows({{0, 1}, {1, 1}, {1, 1}, {2, 1}});
  // differences (1,1),(2,4),(1,1),(4,2); column means (2,2)
  const Matrix expected = Matrix::from_rows({{-1, -1}, {0, 2}, {-1, -1}, {2, 0}});
  CHECK((center_data(w, mu) - expected).max_abs() <= 1e-12);
}

TEST_CASE("center_data shape errors") {
  CHECK(error_of([] { center_data(Matrix(3, 2), Matrix(3, 3)); }) == ErrorKind::ShapeMismatch);
  CHECK(error_of([] { center_data(Matrix(1, 2), Matrix(1, 2)); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("covariance examples") {
  CHECK(covariance(Matrix(5, 3)).max_abs() == 0.0);
  const Matrix single = Matrix::from_rows({{-1}, {0}, {1}});
  CHECK(covariance(single)(0, 0) == doctest::Approx(1.0));
  const Matrix twin = Matrix::from_rows({{-1, -1}, {0, 0}, {1, 1}});
  const Matrix s = covariance(twin);
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(0, 1) == doctest::Approx(1.0));
  CHECK(s(1, 1) == doctest::Approx(1.0));
  CHECK(error_of([] { covariance(Matrix(1, 2)); }) == ErrorKind::TooFewSamples);
}

TEST_CASE("project_scores examples") {
  const Matrix wc = Matrix::from_rows({{1, 2}, {-3, 4}, {2, -6}});
  const Matrix id = Matrix::identity(2);
  const Vector z = project_scores(wc, id, 0);
  CHECK(z == Vector{1, -3, 2});

  const Matrix along = Matrix::from_rows({{1, 1}, {-2, -2}});
  const double r = 1.0 / std::sqrt(2.0);
  const Matrix v = Matrix::from_rows({{r, r}, {r, -r}});
  const Vector orth = project_scores(along, v, 1);
  CHECK(norm_inf(orth) <= 1e-12);

  // 45-degree rotation: (1,2).(r,r) = 3r, (-3,4).(r,r) = r, (2,-6).(r,r) = -4r
  const Vector rotated = project_scores(wc, v, 0);
  CHECK(rotated[0] == doctest::Approx(3 * r));
  CHECK(rotated[1] == doctest::Approx(r));
  CHECK(rotated[2] == doctest::Approx(-4 * r));
  CHECK(error_of([&] { project_scores(wc, id, 2); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("extremal_magnitude examples") {
  CHECK(extremal_magnitude(Vector{1, -3, 2}) == 3.0);
  CHECK(extremal_magnitude(Vector{0, 0, 0}) == 0.0);
  CHECK(extremal_magnitude(Vector{-5.5, 5.4}) == 5.5);
  CHECK(error_of([] { extremal_magnitude(Vector{}); }) == ErrorKind::Empty);
}

TEST_CASE("build_pus in one dimension is an interval") {
  const Matrix w = Matrix::from_rows({{12}, {8}, {11}, {9}});
  const Matrix mu = Matrix::from_rows({{10}, {10}, {10}, {10}});
  const Pus p = build_pus(w, mu, 1, {10.0});
  REQUIRE(p.components() == 1);
  CHECK(p.magnitudes[0] == doctest::Approx(2.0));
  const HPolyhedron h = pus_to_hrep(p);
  REQUIRE(h.num_rows() == 2);
  CHECK(h.contains(Vector{8.0}));
  CHECK(h.contains(Vector{12.0}));
  CHECK_FALSE(h.contains(Vector{12.01}));
  CHECK_FALSE(h.contains(Vector{7.99}));
}

TEST_CASE("build_pus on a symmetric rhombus cloud") {
  const Matrix w = Matrix::from_rows({{1, 0}, {-1, 0}, {0, 2}, {0, -2}});
  const Matrix mu(4, 2);
  // Oracle: the covariance is diag(2/3, 8/3), so the leading component is the
  // y axis with extreme 2 and the second the x axis with extreme 1.
  const Matrix s = covariance(center_data(w, mu));
  CHECK(s(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(s(1, 1) == doctest::Approx(8.0 / 3.0));
  CHECK(s(0, 1) == doctest::Approx(0.0));
  const Pus p = build_pus(w, mu, 2, {0.0, 0.0});
  CHECK(p.magnitudes[0] == doctest::Approx(2.0));
  CHECK(p.magnitudes[1] == doctest::Approx(1.0));
  CHECK(std::abs(p.directions[0][1]) == doctest::Approx(1.0));
  CHECK(std::abs(p.directions[1][0]) == doctest::Approx(1.0));

  // Hull facets by hand: 2|x| + |y| <= 2.
  const HPolyhedron h = pus_to_hrep(p);
  CHECK(h.num_rows() == 4);
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const Vector d{rng.uniform(-1.5, 1.5), rng.uniform(-2.5, 2.5)};
    const double lhs = 2 * std::abs(d[0]) + std::abs(d[1]);
    if (std::abs(lhs - 2.0) < 1e-9) continue;
    CHECK(h.contains(d) == (lhs < 2.0));
  }
}

TEST_CASE("build_pus shifted to a forecast centre") {
  Rng rng(5);
  const Matrix w = random_cloud(rng, 200, 2);
  Matrix mu(200, 2);
  for (std::size_t t = 0; t < 200; ++t) mu(t, 0) = mu(t, 1) = 10.0;
  const Vector d0{2.5, 3.0};
  const Pus p = build_pus(w, mu, d0);
  CHECK(p.center == d0);
  CHECK(p.components() == 2);
  // Opposite vertices are symmetric about d0.
  for (std::size_t k = 0; k < 2; ++k) {
    const Vector a = p.vertex(k, 1.0), b = p.vertex(k, -1.0);
    CHECK((a[0] + b[0]) / 2 == doctest::Approx(2.5));
    CHECK((a[1] + b[1]) / 2 == doctest::Approx(3.0));
  }
}

TEST_CASE("degenerate component is an error") {
  // All variation along x; y error identically zero.
  const Matrix w = Matrix::from_rows({{1, 0}, {-1, 0}, {2, 0}, {-2, 0}});
  const Matrix mu(4, 2);
  CHECK(error_of([&] { build_pus(w, mu, 2, {0, 0}); }) == ErrorKind::DegenerateComponent);
  const Pus p = build_pus(w, mu, 1, {0, 0});
  CHECK(p.magnitudes[0] == doctest::Approx(2.0));
  // Default K drops the zero-variance component.
  CHECK(build_pus(w, mu, {0, 0}).components() == 1);
}

TEST_CASE("pus_contains examples") {
  const Matrix w = Matrix::from_rows({{1, 0}, {-1, 0}, {0, 2}, {0, -2}});
  const Pus p = build_pus(w, Matrix(4, 2), 2, {5.0, 5.0});
  const auto centre = pus_contains(p, p.center);
  REQUIRE(centre.inside);
  double total = 0.0;
  for (std::size_t k = 0; k < 2; ++k) total += centre.omega_plus[k] + centre.omega_minus[k];
  CHECK(total == doctest::Approx(1.0));

  const auto vertex = pus_contains(p, p.vertex(0, 1.0));
  REQUIRE(vertex.inside);
  CHECK(vertex.omega_plus[0] == doctest::Approx(1.0));

  Vector outside = p.center;
  for (std::size_t i = 0; i < 2; ++i) outside[i] += 1.01 * p.magnitudes[0] * p.directions[0][i];
  CHECK_FALSE(pus_contains(p, outside).inside);
}

TEST_CASE("V-rep LP and H-rep membership agree on random points") {
  Rng rng(6);
  for (std::size_t n : {2u, 3u, 4u}) {
    const Matrix w = random_cloud(rng, 300, n);
    Matrix mu(300, n);
    for (std::size_t t = 0; t < 300; ++t)
      for (std::size_t i = 0; i < n; ++i) mu(t, i) = 10.0;
    Vector d0(n, 50.0);
    const Pus p = build_pus(w, mu, n, d0);
    const HPolyhedron h = pus_to_hrep(p);
    CHECK(h.num_rows() == (std::size_t{1} << n));
    const BoxSet box = pus_bounding_box(p);
    int disagreements = 0, inside = 0;
    for (int i = 0; i < 1000; ++i) {
      Vector d(n);
      for (std::size_t c = 0; c < n; ++c) d[c] = rng.uniform(box.lower[c], box.upper[c]);
      if (std::abs(h.min_slack(d)) < 1e-7) continue;  // on a facet within tolerance
      const bool by_lp = pus_contains(p, d).inside;
      const bool by_h = h.contains(d, 1e-7);
      if (by_lp != by_h) ++disagreements;
      if (by_h) ++inside;
    }
    CHECK(disagreements == 0);
    CHECK(inside > 0);
  }
}

TEST_CASE("extremal points are vertices of the H-representation") {
  Rng rng(8);
  const std::size_t n = 3;
  const Matrix w = random_cloud(rng, 100, n);
  const Pus p = build_pus(w, Matrix(100, n), n, Vector(n, 0.0));
  const HPolyhedron h = pus_to_hrep(p);
  for (std::size_t k = 0; k < n; ++k)
    for (double s : {-1.0, 1.0}) {
      const Vector v = p.vertex(k, s);
      CHECK(h.min_slack(v) >= -1e-9);
      std::size_t tight = 0;
      for (std::size_t j = 0; j < h.num_rows(); ++j)
        if (std::abs(h.slack(j, v)) <= 1e-9) ++tight;
      CHECK(tight >= n);
    }
}

TEST_CASE("PUS lies inside its bounding box") {
  Rng rng(9);
  const std::size_t n = 3;
  const Matrix w = random_cloud(rng, 100, n);
  const Pus p = build_pus(w, Matrix(100, n), n, Vector(n, 1.0));
  const BoxSet box = pus_bounding_box(p);
  for (int i = 0; i < 500; ++i) {
    // Random convex combination of the 2K extremal points.
    Vector weights(2 * n);
    double total = 0.0;
    for (double& x : weights) total += (x = rng.uniform());
    Vector d(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (int s = 0; s < 2; ++s) {
        const Vector v = p.vertex(k, s ? -1.0 : 1.0);
        for (std::size_t c = 0; c < n; ++c) d[c] += weights[2 * k + s] / total * v[c];
      }
    CHECK(box.contains(d, 1e-9));
  }
}

TEST_CASE("reduced K keeps the affine span with slabs") {
  Rng rng(10);
  // Planar cloud in 3-D plus tiny noise off-plane.
  Matrix w(200, 3);
  for (std::size_t t = 0; t < 200; ++t) {
    const double a = rng.normal(), b = rng.normal();
    w(t, 0) = a + b;
    w(t, 1) = a - b;
    w(t, 2) = 1e-3 * rng.normal();
  }
  const Pus p = build_pus(w, Matrix(200, 3), 2, Vector(3, 0.0));
  const HPolyhedron h = pus_to_hrep(p);
  CHECK(h.num_rows() == 4 + 2);
  CHECK(h.contains(p.vertex(0, 1.0), 1e-9));
  CHECK(pus_contains(p, p.vertex(1, -1.0)).inside);
  Vector off = p.center;
  off[2] += 0.1;
  CHECK_FALSE(h.contains(off, 1e-9));
  CHECK_FALSE(pus_contains(p, off).inside);
}

TEST_CASE("facet cap") {
  Pus p;
  p.center = Vector(21, 0.0);
  for (std::size_t k = 0; k < 21; ++k) {
    Vector e(21, 0.0);
    e[k] = 1.0;
    p.directions.push_back(e);
    p.magnitudes.push_back(1.0);
  }
  CHECK(error_of([&] { pus_to_hrep(p); }) == ErrorKind::TooManyComponents);
}

TEST_CASE("box_from_data examples") {
  const Matrix w = Matrix::from_rows({{12}, {8}, {10}});
  const Matrix mu = Matrix::from_rows({{10}, {10}, {10}});
  const BoxSet b = box_from_data(w, mu, {10.0});
  CHECK(b.lower[0] == doctest::Approx(8.0));
  CHECK(b.upper[0] == doctest::Approx(12.0));

  const BoxSet z = box_from_data(mu, mu, {10.0});
  CHECK(z.lower[0] == 10.0);
  CHECK(z.upper[0] == 10.0);
  CHECK(z.volume() == 0.0);

  // Columns demeaned first: errors (1,-1),(3,0),(-1,2),(1,1),(1,3) have means
  // (1,1), so centered columns are {0,2,-2,0,0} and {-2,-1,1,0,2}.
  const Matrix w2 = Matrix::from_rows({{1, -1}, {3, 0}, {-1, 2}, {1, 1}, {1, 3}});
  const BoxSet b2 = box_from_data(w2, Matrix(5, 2), {100.0, 200.0});
  CHECK(b2.lower == Vector{98.0, 198.0});
  CHECK(b2.upper == Vector{102.0, 202.0});
  CHECK(error_of([] { box_from_data(Matrix(3, 1), Matrix(3, 2), {0.0}); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("grouped PUS facet count is the sum over groups") {
  Rng rng(12);
  const Matrix w = random_cloud(rng, 200, 5);
  Matrix mu = zeros_like(w);
  const GroupedPus g = build_grouped_pus(w, mu, {{0, 2, 4}, {1, 3}}, Vector(5, 0.0));
  const HPolyhedron h = grouped_pus_to_hrep(g);
  CHECK(h.num_rows() == 8 + 4);
  CHECK(h.contains(Vector(5, 0.0)));
  CHECK(error_of([&] { build_grouped_pus(w, mu, {{0, 1}, {1, 2, 3, 4}}, Vector(5, 0.0)); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("synthetic generator: zero uncertainty reproduces the forecast") {
  const auto s = synth_generate(Vector{320, 50}, 0.0, 0.8, 50, 1);
  CHECK(s.observed == s.forecast);
  for (std::size_t t = 0; t < 50; ++t) CHECK(s.forecast(t, 0) == 320.0);
}

TEST_CASE("synthetic generator: single node standard deviation") {
  const auto s = synth_generate(Vector{100}, 0.1, 0.0, 4000, 17);
  const Matrix c = covariance(center_data(s.observed, s.forecast));
  CHECK(std::abs(std::sqrt(c(0, 0)) - 10.0) <= 0.5);
}

TEST_CASE("synthetic generator: correlation and covariance") {
  const Vector profile{320, 50};
  const auto s = synth_generate(profile, 0.067, 0.8, 4000, 2024);
  const Matrix c = covariance(center_data(s.observed, s.forecast));
  const double corr = c(0, 1) / std::sqrt(c(0, 0) * c(1, 1));
  CHECK(std::abs(corr - 0.8) <= 0.05);
  const Matrix target = synth_covariance(profile, 0.067, 0.8);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      num += std::pow(c(i, j) - target(i, j), 2);
      den += std::pow(target(i, j), 2);
    }
  CHECK(std::sqrt(num / den) <= 0.10);
}

TEST_CASE("synthetic generator: determinism and argument checks") {
  const auto a = synth_generate(Vector{10, 20, 30}, 0.1, 0.5, 100, 7);
  const auto b = synth_generate(Vector{10, 20, 30}, 0.1, 0.5, 100, 7);
  CHECK(a.observed == b.observed);
  CHECK(error_of([] { synth_generate(Vector{10, 20, 30}, 0.1, -0.9, 10, 1); }) == ErrorKind::NotPSD);
  CHECK(error_of([] { synth_generate(Vector{10, -1}, 0.1, 0.5, 10, 1); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { synth_generate(Vector{10}, 1.5, 0.5, 10, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("fraction of historical errors inside the PUS is reported") {
  const auto s = synth_generate(Vector{320, 50}, 0.067, 0.8, 4000, 99);
  const Pus p = build_pus(s.observed, s.forecast, Vector{320, 50});
  const double f = fraction_inside(p, center_data(s.observed, s.forecast));
  MESSAGE("fraction inside PUS: " << f);
  CHECK(f > 0.0);
  CHECK(f <= 1.0);
}
