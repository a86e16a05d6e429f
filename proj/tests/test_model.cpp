#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "lcqmc/model.hpp"
#include "lcqmc/rng.hpp"

using namespace lcqmc;

namespace {

SpinConfig random_config(int n, Rng& rng) {
  SpinConfig c(n);
  for (auto& s : c) s = static_cast<std::int8_t>(rng.sign());
  return c;
}

SpinConfig neel_config(const NativeProblem& p) {
  SpinConfig c(p.num_sites);
  for (int i = 0; i < p.num_sites; ++i)
    c[i] = ((p.coords[i][0] + p.coords[i][1]) % 2 == 0) ? 1 : -1;
  return c;
}

}  // namespace

TEST_CASE("square lattice site and bond counts") {
  const NativeProblem p2 = square_lattice_afm(2);
  CHECK(p2.num_sites == 4);
  CHECK(p2.bonds.size() == 4);
  const NativeProblem p3 = square_lattice_afm(3);
  CHECK(p3.num_sites == 9);
  CHECK(p3.bonds.size() == 12);
  const NativeProblem p10 = square_lattice_afm(10);
  CHECK(p10.num_sites == 100);
  CHECK(p10.bonds.size() == 180);
  CHECK_THROWS_AS(square_lattice_afm(1), std::invalid_argument);
}

TEST_CASE("bonds connect nearest neighbours with positive couplings") {
  const NativeProblem p = square_lattice_afm(5);
  for (const Bond& b : p.bonds) {
    const auto& ca = p.coords[b.a];
    const auto& cb = p.coords[b.b];
    CHECK(std::abs(ca[0] - cb[0]) + std::abs(ca[1] - cb[1]) == 1);
    CHECK(b.j > 0.0);
  }
}

TEST_CASE("diagonal energy of polarized and Neel states") {
  const NativeProblem p = square_lattice_afm(2);
  const ModelParams params{0.0, 1.0, 1.0};
  CHECK(diagonal_energy(p, SpinConfig{1, 1, 1, 1}, params) == doctest::Approx(4.0));
  CHECK(diagonal_energy(p, neel_config(p), params) == doctest::Approx(-4.0));
  CHECK_THROWS_AS(diagonal_energy(p, SpinConfig{1, 1}, params), std::invalid_argument);
}

TEST_CASE("diagonal energy matches brute-force bond sum") {
  const NativeProblem p = square_lattice_afm(3);
  const ModelParams params{0.0, 1.0, 1.0};
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SpinConfig c = random_config(p.num_sites, rng);
    double expected = 0.0;
    for (const Bond& b : p.bonds) expected += b.j * c[b.a] * c[b.b];
    CHECK(diagonal_energy(p, c, params) == doctest::Approx(expected));
  }
}

TEST_CASE("energy is invariant under global spin flip") {
  const NativeProblem p = square_lattice_afm(4);
  const ModelParams params{0.0, 1.0, 1.0};
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    SpinConfig c = random_config(p.num_sites, rng);
    const double e = diagonal_energy(p, c, params);
    for (auto& s : c) s = -s;
    CHECK(diagonal_energy(p, c, params) == doctest::Approx(e));
  }
}

TEST_CASE("ground state energy by exhaustive search") {
  const ModelParams params{0.0, 1.0, 1.0};
  for (int side : {2, 3, 4}) {
    const NativeProblem p = square_lattice_afm(side);
    double best = 1e300;
    int ground_count = 0;
    const double target = -2.0 * side * (side - 1);
    for (long z = 0; z < (1L << p.num_sites); ++z) {
      SpinConfig c(p.num_sites);
      for (int i = 0; i < p.num_sites; ++i) c[i] = ((z >> i) & 1) ? -1 : 1;
      const double e = diagonal_energy(p, c, params);
      if (e < best) best = e;
      if (e == target) ++ground_count;
    }
    CHECK(best == doctest::Approx(target));
    CHECK(ground_count == 2);  // the two Neel states
  }
}

TEST_CASE("delta scales the energy") {
  const NativeProblem p = square_lattice_afm(2);
  const SpinConfig up(4, 1);
  CHECK(diagonal_energy(p, up, ModelParams{0.0, 1.0, 0.5}) == doctest::Approx(2.0));
  CHECK(diagonal_energy(p, up, ModelParams{0.0, 1.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("problem JSON round trip") {
  const NativeProblem p = square_lattice_afm(3);
  const NativeProblem q = problem_from_json(problem_to_json(p));
  CHECK(q.side == p.side);
  CHECK(q.num_sites == p.num_sites);
  REQUIRE(q.bonds.size() == p.bonds.size());
  for (std::size_t i = 0; i < p.bonds.size(); ++i) {
    CHECK(q.bonds[i].a == p.bonds[i].a);
    CHECK(q.bonds[i].b == p.bonds[i].b);
    CHECK(q.bonds[i].j == p.bonds[i].j);
  }
  CHECK(q.coords == p.coords);
}

TEST_CASE("model params validation") {
  CHECK_THROWS_AS((ModelParams{-0.1, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{1.0, 0.0, 1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((ModelParams{0.0, 2.0, 1.0}.validate()));
}
