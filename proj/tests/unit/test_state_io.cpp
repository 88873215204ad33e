#include <doctest.h>

#include <sstream>

#include "modvar/error.hpp"
#include "modvar/state_io.hpp"

using namespace modvar;
using nlohmann::json;

TEST_CASE("envelope JSON round trip") {
  for (const Envelope& e : {Envelope::gaussian(1.5), Envelope::sinc(0.4),
                            Envelope::tabulated(-1.0, 0.5, {{0.0, 0.0}, {1.0, 0.5}, {0.5, -0.2}, {0.0, 0.0}})}) {
    const Envelope back = envelope_from_json(to_json(e));
    CHECK(back.kind() == e.kind());
    CHECK(back.width() == doctest::Approx(e.width()));
    for (double x : {-0.3, 0.1, 0.2}) CHECK(std::abs(back.amplitude(x) - e.amplitude(x)) < 1e-14);
  }
  CHECK_THROWS_AS(envelope_from_json(json{{"kind", "lorentzian"}}), Error);
  CHECK_THROWS_AS(envelope_from_json(json{{"kind", "gaussian"}, {"sigma_x", 1.0}, {"extra", 1}}), Error);
  CHECK_THROWS_AS(envelope_from_json(json{{"kind", "gaussian"}}), Error);
}

TEST_CASE("state descriptors") {
  const json j = json::parse(R"({"kind": "mpe", "N": 3, "x0": 0.5, "lambda": 2.0,
                                 "envelope": {"kind": "gaussian", "sigma_x": 4.0}})");
  const StateDescriptor d = descriptor_from_json(j);
  CHECK(d.kind == StateKind::mpe);
  CHECK(d.n == 3);
  CHECK(d.scale == 2.0);
  CHECK(descriptor_from_json(to_json(d)).x0 == 0.5);
  CHECK(descriptor_hash(d) == descriptor_hash(descriptor_from_json(to_json(d))));
  CHECK(descriptor_hash(d).size() == 16);
  StateDescriptor e = d;
  e.n = 4;
  CHECK(descriptor_hash(d) != descriptor_hash(e));

  CHECK(norm_squared(build_pair(d)) == doctest::Approx(1.0));
  CHECK(build_ensemble(d).components.size() == 1);
  CHECK_THROWS_AS(build_single(d), Error);

  json bad = j;
  bad["L"] = 1.0;
  CHECK_THROWS_AS(descriptor_from_json(bad), Error);
  bad = j;
  bad["kind"] = "ghz";
  CHECK_THROWS_AS(descriptor_from_json(bad), Error);
  bad = j;
  bad["N"] = "three";
  CHECK_THROWS_AS(descriptor_from_json(bad), Error);

  const StateDescriptor ms = descriptor_from_json(json::parse(
      R"({"kind": "multislit", "N": 2, "L": 1.0, "envelope": {"kind": "gaussian", "sigma_x": 0.1}})"));
  CHECK(build_single(ms).terms.size() == 2);
  CHECK(to_json(ms).contains("L"));
}

TEST_CASE("grid state CSV round trip") {
  const GridSpec g(16, -1.0, 1.0);
  std::vector<cplx> a(16);
  for (int i = 0; i < 16; ++i) a[i] = cplx(0.1 * i, -0.3 * i + 1.0 / 3.0);
  const GridState s(g, a);
  std::stringstream out;
  write_csv(out, s);
  const GridState back = read_grid_state_csv(out);
  CHECK(back.spec().points() == 16);
  CHECK(back.spec().min() == doctest::Approx(-1.0));
  for (int i = 0; i < 16; ++i) CHECK(back[i] == a[i]);

  std::stringstream bad("x,re,im\n0,1,2\n0.1,1,2\n0.3,1,2\n");
  CHECK_THROWS_AS(read_grid_state_csv(bad), Error);
  std::stringstream header("x;re;im\n");
  CHECK_THROWS_AS(read_grid_state_csv(header), Error);
}

TEST_CASE("dense grid CSV round trip") {
  const GridSpec g1(16, 0.0, 1.0), g2(16, -2.0, 2.0);
  std::vector<cplx> a(256);
  for (int i = 0; i < 256; ++i) a[i] = cplx(i, -i);
  const DenseGrid2D d(g1, g2, a);
  std::stringstream out;
  write_csv(out, d);
  const DenseGrid2D back = read_dense_grid_csv(out);
  CHECK(back.spec1().points() == 16);
  CHECK(back.spec2().max() == doctest::Approx(2.0));
  CHECK(back.at(3, 7) == d.at(3, 7));
}
