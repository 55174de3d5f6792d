#include "support.hpp"

#include "passive/errors.hpp"
#include "passive/field_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace passive;
using testing::random_scalar;
using testing::random_velocity;

namespace {

bool scalar_real(const FourierScalarField& f) {
  const auto& L = f.lattice();
  for (std::size_t i = 0; i < L.size(); ++i)
    if (std::conj(f.coeffs()[i]) != f.coeffs()[L.conjugate(i)])
      return false;
  return true;
}

bool velocity_real(const FourierVelocityField& v) {
  const auto& L = v.lattice();
  for (std::size_t i = 0; i < L.size(); ++i)
    if (std::conj(v.amps()[i]) + v.amps()[L.conjugate(i)] != Complex(0.0))
      return false;
  return true;
}

std::vector<Point> random_points(std::size_t n, std::uint64_t seed) {
  Philox rng(seed, "points");
  std::vector<Point> p(n);
  for (auto& x : p)
    x = {rng.uniform(), rng.uniform()};
  return p;
}

} // namespace

TEST_CASE("lattice enumeration") {
  ModeLattice L(2);
  CHECK(L.size() == 24);
  for (std::size_t i = 0; i < L.size(); ++i) {
    const Mode k = L.mode(i);
    CHECK_FALSE((k.k1 == 0 && k.k2 == 0));
    CHECK(L.index(k.k1, k.k2) == i);
    const Mode c = L.mode(L.conjugate(i));
    CHECK(c.k1 == -k.k1);
    CHECK(c.k2 == -k.k2);
  }
  CHECK(ModeLattice(2).modes() == L.modes());
  CHECK(ModeLattice(0).size() == 0);
}

TEST_CASE("sobolev norm") {
  FourierVelocityField v(1);
  v.set(1, 0, 1.0);
  CHECK(v.amp(-1, 0) == Complex(-1.0));
  CHECK(sobolev_norm(v, {2.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sobolev_norm(FourierVelocityField(3), {2.0}) == 0.0);
  CHECK(sobolev_norm(FourierScalarField(0), {2.0}) == 0.0);

  // five random modes against a direct loop over the wave vectors
  Philox rng(7, "five-modes");
  FourierScalarField f(3);
  const int ks[5][2] = {{1, 0}, {2, -1}, {0, 3}, {3, 3}, {-1, 2}};
  for (const auto& k : ks)
    f.set(k[0], k[1], Complex(rng.normal(), rng.normal()));
  double direct = 0.0;
  for (int k1 = -3; k1 <= 3; ++k1)
    for (int k2 = -3; k2 <= 3; ++k2) {
      if (k1 == 0 && k2 == 0)
        continue;
      const double kk = double(k1 * k1 + k2 * k2);
      direct += kk * kk * std::norm(f.coeff(k1, k2));
    }
  CHECK(sobolev_norm(f, {2.0}) == doctest::Approx(std::sqrt(direct)).epsilon(1e-14));
}

TEST_CASE("Parseval: H^0 norm equals the grid L2 norm") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto f = random_scalar(5, seed);
    const auto g = synthesize(f, 16);
    double ss = 0.0;
    for (double x : g)
      ss += x * x;
    const double grid = std::sqrt(ss / double(g.size()));
    CHECK(std::abs(sobolev_norm(f, {0.0}) - grid) <= 1e-10 * grid);
  }
}

TEST_CASE("evaluate") {
  const Point x0{0.0, 0.3};
  CHECK(evaluate(FourierScalarField(2), x0) == 0.0);
  FourierScalarField c(1);
  c.set(1, 0, 0.5);
  CHECK(evaluate(c, x0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evaluate(c, Point{1.0, 1.3}) == doctest::Approx(1.0).epsilon(1e-14));

  // exact summation agrees with FFT synthesis at grid nodes
  const auto f = random_scalar(6, 11);
  const int n = 32;
  const auto grid = synthesize(f, n);
  Philox rng(5, "nodes");
  for (int t = 0; t < 16; ++t) {
    const int i1 = int(rng() % n), i2 = int(rng() % n);
    const double direct = evaluate(f, Point{double(i1) / n, double(i2) / n});
    CHECK(direct == doctest::Approx(grid[std::size_t(i1) * n + i2]).epsilon(1e-12));
  }
}

TEST_CASE("evaluate is linear") {
  const auto f = random_scalar(4, 1), g = random_scalar(4, 2);
  const auto pts = random_points(20, 3);
  const double a = 0.7, b = -2.3;
  const auto lhs = evaluate(a * f + b * g, pts);
  const auto ef = evaluate(f, pts), eg = evaluate(g, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(std::abs(lhs[i] - (a * ef[i] + b * eg[i])) <= 1e-12);
}

TEST_CASE("velocity evaluation and incompressibility") {
  const auto pts = random_points(8, 4);
  for (const auto& u : velocity_at(FourierVelocityField(2), pts)) {
    CHECK(u.u1 == 0.0);
    CHECK(u.u2 == 0.0);
  }
  // stream function sin(2 pi x2) / (2 pi)
  FourierVelocityField shear(1);
  shear.set(0, 1, -0.5);
  const Point p{0.1, 0.0};
  const auto u = velocity_at(shear, std::span(&p, 1));
  CHECK(u[0].u1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(u[0].u2) <= 1e-15);

  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto v = random_velocity(4, seed);
    const auto div = synthesize(divergence(v), 16);
    for (double d : div)
      CHECK(std::abs(d) <= 1e-10);
    CHECK(velocity_real(v));
  }
}

TEST_CASE("reality is preserved by every constructor and operation") {
  const auto f = random_scalar(3, 9), g = random_scalar(3, 10);
  CHECK(scalar_real(f));
  CHECK(scalar_real(f + g));
  CHECK(scalar_real(2.5 * f - g));
  CHECK(scalar_real(f.embedded(6)));
  std::vector<Complex> raw(ModeLattice(2).size());
  Philox rng(1, "raw");
  for (auto& c : raw)
    c = Complex(rng.normal(), rng.normal());
  CHECK(scalar_real(FourierScalarField(ModeLattice(2), raw)));
  CHECK(velocity_real(FourierVelocityField(ModeLattice(2), raw)));
  const auto v = random_velocity(2, 3), w = random_velocity(2, 4);
  CHECK(velocity_real(v - 3.0 * w));
  CHECK(velocity_real(v.embedded(5)));
}

TEST_CASE("distance_H") {
  const auto v1 = random_velocity(3, 1), v2 = random_velocity(3, 2);
  CHECK(distance_H(v1, v1, {2.0}) == 0.0);
  CHECK(distance_H(v1, FourierVelocityField(3), {2.0}) == doctest::Approx(sobolev_norm(v1, {2.0})));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = random_velocity(3, 100 + seed), b = random_velocity(2, 200 + seed);
    CHECK(distance_H(a, b, {2.0}) <= distance_H(a, b, {3.0}) * (1 + 1e-15));
  }
  // embedding the smaller truncation
  CHECK(distance_H(v1, v1.embedded(5), {2.0}) == 0.0);
  CHECK_THROWS_AS(distance_H(v1, v1.embedded(5), {2.0}, EmbedPolicy::strict), LatticeMismatch);
}

TEST_CASE("sobolev scale validation") {
  CHECK_NOTHROW(SobolevScale{}.validate());
  CHECK_THROWS_AS((SobolevScale{1.0, 3.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((SobolevScale{2.0, 2.0, 2.0}.validate()), ConfigError);
  CHECK_THROWS_AS((SobolevScale{2.0, 3.0, 2.5}.validate()), ConfigError);
}

TEST_CASE("field CSV round trip is bit exact") {
  const auto f = random_scalar(4, 21);
  std::stringstream ss;
  write_field(ss, f);
  const auto g = read_scalar_field(ss);
  CHECK(g.K() == f.K());
  for (std::size_t i = 0; i < f.coeffs().size(); ++i)
    CHECK(g.coeffs()[i] == f.coeffs()[i]);

  const auto v = random_velocity(3, 22);
  std::stringstream sv;
  write_field(sv, v);
  const std::string text = sv.str();
  CHECK(text.rfind("lattice_K=3,kind=velocity\nk1,k2,re,im\n", 0) == 0);
  const auto w = read_velocity_field(sv);
  for (std::size_t i = 0; i < v.amps().size(); ++i)
    CHECK(w.amps()[i] == v.amps()[i]);

  std::stringstream wrong(text);
  CHECK_THROWS_AS(read_scalar_field(wrong), FormatError);
}

TEST_CASE("format_double round trips") {
  Philox rng(3, "doubles");
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.normal()) * std::pow(10.0, double(int(rng() % 40)) - 20);
    CHECK(parse_double(format_double(x)) == x);
  }
}
