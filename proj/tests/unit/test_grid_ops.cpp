#include <doctest.h>

#include <cmath>

#include "modvar/error.hpp"
#include "modvar/grid_ops.hpp"
#include "modvar/states.hpp"

using namespace modvar;

TEST_CASE("integer momentum lattice on a commensurate box") {
  const ModularScale scale(1.0);
  const GridSpec g = GridSpec::commensurate(0.0, 1.0, 4, 16);  // M = 4
  const auto n = integer_momentum_lattice(g, scale);
  const auto p = observable_values(g, Observable::p, scale);
  for (std::size_t i = 0; i < g.points(); ++i) {
    // Slot momentum is j 2 pi / 4; bins of width 2 pi centred on integers.
    const double exact = std::floor(p[i] / (2.0 * kPi) + 0.5 + 1e-9);
    CHECK(n[i] == exact);
  }
  CHECK_THROWS_AS(integer_momentum_lattice(GridSpec(64, 0.0, 3.3), scale), Error);
}

TEST_CASE("modular operators act pointwise") {
  const ModularScale scale(1.0);
  const GridSpec g = GridSpec::commensurate(0.0, 1.0, 4, 16);
  std::vector<cplx> a(g.points());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(-g.node(i) * g.node(i));
  const GridState s(g, a);
  const GridState xs = apply_modular_operator(s, Observable::x_bar, scale);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(xs[i] - modular_decompose(g.node(i), 1.0).modular_part * a[i]) < 1e-14);
}

TEST_CASE("SMP variances on the grid approach the closed forms") {
  const ModularScale scale(1.0);
  for (int n = 1; n <= 5; ++n) {
    const SuperposedState s = build_smp(n, 0.0, 0, 1.0, Envelope::gaussian(2.0));
    const GridState g = discretize(s, GridSpec::commensurate(0.0, 1.0, 32, 512));
    CHECK(observable_variance(g, Observable::n_p, scale) ==
          doctest::Approx(smp_integer_momentum_variance(n)).epsilon(1e-9));
    CHECK(observable_variance(g, Observable::x_bar, scale) ==
          doctest::Approx(smp_modular_position_variance(n, scale)).epsilon(1e-5));
  }
}

TEST_CASE("commutator on the grid") {
  const ModularScale scale(1.0);
  for (int n = 1; n <= 4; ++n) {
    const SuperposedState s = build_smp(n, 0.0, 0, 1.0, Envelope::gaussian(2.0));
    const GridState g = discretize(s, GridSpec::commensurate(0.0, 1.0, 32, 256));
    const cplx c = commutator_expectation(g, CommutatorPair::x_bar_n_p, scale);
    CHECK(std::abs(c.real()) < 1e-12);
    CHECK(std::abs(c) == doctest::Approx(smp_commutator_expectation(n, scale)).epsilon(1e-4));
  }
}

TEST_CASE("two-particle moments agree between product and dense storage") {
  const ModularScale scale(1.0);
  const TwoParticleState s = build_mpe(2, 0.0, 0, 1.0, Envelope::gaussian(2.0));
  const GridSpec g = GridSpec::commensurate(0.0, 1.0, 32, 32);
  const ProductGridState p = discretize(s, g, g);
  const DenseGrid2D d = DenseGrid2D::from_product(p);
  for (Observable o : {Observable::x_bar_rel, Observable::n_p_tot, Observable::n_x_tot,
                       Observable::p_bar_rel}) {
    const Moments a = observable_moments(p, o, scale);
    const Moments b = observable_moments(d, o, scale);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-10));
    CHECK(a.second == doctest::Approx(b.second).epsilon(1e-10));
  }
}

TEST_CASE("MPE relative variance on the grid") {
  const ModularScale scale(1.0);
  const TwoParticleState s = build_mpe(2, 0.0, 0, 1.0, Envelope::gaussian(2.0));
  const GridSpec g = make_grid(support_of(s, 0), 1.0, {});
  const ProductGridState p = discretize(s, g, g);
  CHECK(observable_variance(p, Observable::x_bar_rel, scale) ==
        doctest::Approx(mpe_modular_relative_variance(2, scale)).epsilon(1e-4));
  CHECK(observable_variance(p, Observable::n_p_tot, scale) < 1e-20);
}

TEST_CASE("law of total variance") {
  const Moments a{1.0, 3.0}, b{-2.0, 5.0};
  const Moments c = combine_moments({0.25, 0.75}, {a, b});
  CHECK(c.mean == doctest::Approx(0.25 * 1.0 + 0.75 * -2.0));
  const double within = 0.25 * a.variance() + 0.75 * b.variance();
  const double between = 0.25 * 0.75 * 9.0;
  CHECK(c.variance() == doctest::Approx(within + between));
  CHECK_THROWS_AS(combine_moments({0.5}, {a, b}), Error);
}
