#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "balmet/geometry/eval_table.hpp"
#include "balmet/geometry/model.hpp"
#include "balmet/geometry/quadrature.hpp"
#include "balmet/geometry/volume_map.hpp"
#include "balmet/linalg/herm_product.hpp"
#include "balmet/quantization/kernel.hpp"
#include "test_support.hpp"

using namespace balmet;
using namespace balmet::testing;

namespace {

cxd node_z(const EvalTable& t, long i, int coord = 0) {
  return cxd(t.nodes(i, 2 * coord), t.nodes(i, 2 * coord + 1));
}

}  // namespace

TEST_CASE("model construction validates its parameters") {
  CHECK_THROWS_WITH_AS(build_model(ModelKind::ProjectiveLine, 2, 0),
                       "p must be >= 1", invalid_input);
  CHECK_THROWS_AS(build_model(ModelKind::ProjectiveLine, 3, 2), invalid_input);
  CHECK_THROWS_AS(build_model(ModelKind::ProjectivePlane, 2, 2), invalid_input);
  CHECK_THROWS_AS(build_model(ModelKind::CustomTable, 2, 1), invalid_input);
}

TEST_CASE("section space dimensions") {
  for (int p = 1; p <= 6; ++p) {
    const PolarizedModel line = build_model(ModelKind::ProjectiveLine, 2, p);
    CHECK(line.n == 1);
    CHECK(line.n_p == 2 * p + 1);
    const PolarizedModel plane = build_model(ModelKind::ProjectivePlane, 3, p);
    CHECK(plane.n == 2);
    CHECK(plane.n_p == (3 * p + 1) * (3 * p + 2) / 2);
  }
}

TEST_CASE("quadrature layout and weights") {
  const PolarizedModel m = build_model(ModelKind::ProjectiveLine, 2, 2);
  CHECK_THROWS_AS(make_quadrature(m, 1), invalid_input);

  const Quadrature q = make_quadrature(m, 16);
  CHECK(q.nodes.rows() == 16 * 16);
  CHECK(q.nodes.cols() == 2);
  CHECK(q.weights.size() == 16 * 16);
  CHECK(q.weights.minCoeff() > 0.0);
  CHECK(q.tolerance >= 1e-15);
  CHECK(q.tolerance < 1e-8);

  const PolarizedModel m2 = build_model(ModelKind::ProjectivePlane, 3, 1);
  const Quadrature q2 = make_quadrature(m2, 6);
  CHECK(q2.nodes.rows() == 6 * 6 * 6 * 6);
  CHECK(q2.nodes.cols() == 4);
}

TEST_CASE("chart quadrature reproduces closed-form integrals") {
  const PolarizedModel m = build_model(ModelKind::ProjectiveLine, 2, 2);
  const Quadrature q = make_quadrature(m, 24);
  const long N = q.weights.size();

  // int (1+|z|^2)^{-(s+1)} over C equals pi/s.
  for (int s = 1; s <= 6; ++s) {
    double acc = 0.0;
    for (long i = 0; i < N; ++i) {
      const double u = q.nodes(i, 0) * q.nodes(i, 0) + q.nodes(i, 1) * q.nodes(i, 1);
      acc += q.weights(i) * std::pow(1.0 + u, -(s + 1));
    }
    CHECK(acc == doctest::Approx(M_PI / s).epsilon(1e-12));
  }

  // int |z|^2 (1+|z|^2)^{-4} = pi/6.
  double acc = 0.0;
  for (long i = 0; i < N; ++i) {
    const double u = q.nodes(i, 0) * q.nodes(i, 0) + q.nodes(i, 1) * q.nodes(i, 1);
    acc += q.weights(i) * u * std::pow(1.0 + u, -4);
  }
  CHECK(acc == doctest::Approx(M_PI / 6).epsilon(1e-12));

  CHECK(reference_chart_integral(m, 64) == doctest::Approx(M_PI).epsilon(1e-13));

  // The plane rule is a product of two line charts; the radial coupling
  // limits it to algebraic (~order^-4) convergence, so the checks here are
  // a loose absolute band plus an order-scaling ratio.
  const PolarizedModel m2 = build_model(ModelKind::ProjectivePlane, 3, 1);
  const Quadrature q2 = make_quadrature(m2, 16);
  double acc2 = 0.0;
  for (long i = 0; i < q2.weights.size(); ++i) {
    const double u = q2.nodes.row(i).squaredNorm();
    acc2 += q2.weights(i) * std::pow(1.0 + u, -3);
  }
  const double exact2 = M_PI * M_PI / 2;
  CHECK(acc2 == doctest::Approx(exact2).epsilon(1e-3));
  const double e12 = std::abs(reference_chart_integral(m2, 12) - exact2);
  const double e24 = std::abs(reference_chart_integral(m2, 24) - exact2);
  CHECK(e24 < e12 / 4.0);
}

TEST_CASE("phi ring integrates angular frequencies to zero") {
  const PolarizedModel m = build_model(ModelKind::ProjectiveLine, 2, 2);
  const Quadrature q = make_quadrature(m, 12);
  const long N = q.weights.size();
  for (int freq : {1, 2, 3, 5}) {
    cxd acc(0, 0);
    for (long i = 0; i < N; ++i) {
      const cxd z(q.nodes(i, 0), q.nodes(i, 1));
      const double u = std::norm(z);
      acc += q.weights(i) * std::pow(z, freq) * std::pow(1.0 + u, -4.0);
    }
    CHECK(std::abs(acc) < 1e-13);
  }
}

TEST_CASE("line frame values are monomials with their scale folded out") {
  LineFixture f = make_line(2, 8);
  const EvalTable& t = f.table;
  CHECK(t.n_p == 5);
  const long N = t.node_count();
  for (long i : {0L, N / 2, N - 1}) {
    const cxd z = node_z(t, i);
    const double u = std::norm(z);
    CHECK(t.scale(i) == doctest::Approx(2.0 * std::log1p(u)).epsilon(1e-14));
    for (int j = 0; j < t.n_p; ++j) {
      const cxd expect = std::pow(z, j);
      CHECK(std::abs(t.value_at(i, j) - expect) <= 1e-12 * std::abs(expect));
      const cxd dexpect = (j == 0) ? cxd(0, 0) : double(j) * std::pow(z, j - 1);
      CHECK(std::abs(t.deriv_at(0, i, j) - dexpect) <=
            1e-12 * (1.0 + std::abs(dexpect)));
    }
  }
}

TEST_CASE("scaled rows stay bounded at high power") {
  LineFixture f = make_line(15, 64);  // raw monomials reach ~1e90 here
  CHECK(f.table.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  CHECK(f.table.values.allFinite());
  CHECK(f.table.derivs[0].allFinite());
}

TEST_CASE("plane frame enumerates monomials a-major") {
  LineFixture f = make_plane(1, 6);
  const EvalTable& t = f.table;
  CHECK(t.n_p == 10);
  const long i = t.node_count() / 3;
  const cxd z1 = node_z(t, i, 0), z2 = node_z(t, i, 1);
  int j = 0;
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 3 - a; ++b, ++j) {
      const cxd expect = std::pow(z1, a) * std::pow(z2, b);
      CHECK(std::abs(t.value_at(i, j) - expect) <= 1e-12 * std::abs(expect));
      const cxd d1 = (a == 0) ? cxd(0, 0)
                              : double(a) * std::pow(z1, a - 1) * std::pow(z2, b);
      const cxd d2 = (b == 0) ? cxd(0, 0)
                              : double(b) * std::pow(z1, a) * std::pow(z2, b - 1);
      CHECK(std::abs(t.deriv_at(0, i, j) - d1) <= 1e-12 * (1.0 + std::abs(d1)));
      CHECK(std::abs(t.deriv_at(1, i, j) - d2) <= 1e-12 * (1.0 + std::abs(d2)));
    }
  }
}

TEST_CASE("custom tables round-trip and feed the pipeline unchanged") {
  CustomTableData d;
  d.n = 1;
  d.n_p = 2;
  d.p = 3;
  d.coords.resize(3, 2);
  d.coords << 0.25, -0.5, 1.0, 0.0, -0.75, 2.0;
  d.weights.resize(3);
  d.weights << 0.5, 1.0, 2.0;
  d.values.resize(3, 2);
  d.values << cxd(1, 0), cxd(0.25, -0.5), cxd(1, 0), cxd(1, 0), cxd(1, 0),
      cxd(-0.75, 2.0);
  d.derivs.assign(1, CMat(3, 2));
  d.derivs[0] << cxd(0, 0), cxd(1, 0), cxd(0, 0), cxd(1, 0), cxd(0, 0),
      cxd(1, 0);

  std::stringstream ss;
  write_custom_table(ss, d);
  const CustomTableData back = read_custom_table(ss, "roundtrip");
  CHECK(back.n == d.n);
  CHECK(back.n_p == d.n_p);
  CHECK(back.p == d.p);
  CHECK((back.coords - d.coords).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.weights - d.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.values - d.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.derivs[0] - d.derivs[0]).cwiseAbs().maxCoeff() == 0.0);

  const std::string path = "custom_roundtrip_test.table";
  {
    std::ofstream out(path);
    write_custom_table(out, d);
  }
  const PolarizedModel m = build_model(path);
  std::remove(path.c_str());
  CHECK(m.kind == ModelKind::CustomTable);
  CHECK(m.n_p == 2);
  const Quadrature q = make_quadrature(m, 999);  // order ignored for tables
  CHECK(q.weights.size() == 3);
  CHECK(q.tolerance == 1e-9);
  const EvalTable t = eval_frame(m, q);
  CHECK(t.scale.cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.values - d.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("custom table parser rejects malformed input") {
  const auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return read_custom_table(ss, "test");
  };
  CHECK_THROWS_AS(parse("1 2"), invalid_input);                // short header
  CHECK_THROWS_AS(parse("1 2 3 oops"), invalid_input);         // non-numeric
  CHECK_THROWS_AS(parse("1 1 1 1\n0 0 1 1 0"), invalid_input); // short node row
  // One complete node (7 numbers for n=1, n_p=1) but weight <= 0.
  CHECK_THROWS_AS(parse("1 1 1 1\n0 0 -1 1 0 0 0"), invalid_input);
}

TEST_CASE("anticanonical density at the round product") {
  const int p = 3;
  LineFixture f = make_line(p, 32);
  const HermProduct H(balanced_line_product(p));
  const VolumeDensity vd = volume_density(VolumeMapSpec::anticanonical(), H, f.table);
  CHECK(vd.volume == doctest::Approx(M_PI).epsilon(1e-12));
  const long N = f.table.node_count();
  for (long i : {0L, N / 4, N / 2, N - 1}) {
    const double u = std::norm(node_z(f.table, i));
    CHECK(vd.density(i) ==
          doctest::Approx(std::pow(1.0 + u, -2)).epsilon(1e-11));
  }

  // K_{cH} = K_H / c, so the anticanonical density scales by c^{1/p}.
  const HermProduct H2(CMat(2.0 * balanced_line_product(p)));
  const VolumeDensity vd2 = volume_density(VolumeMapSpec::anticanonical(), H2, f.table);
  CHECK(vd2.density(0) / vd.density(0) ==
        doctest::Approx(std::pow(2.0, 1.0 / p)).epsilon(1e-13));
}

TEST_CASE("supplied density ignores the product") {
  LineFixture f = make_line(2, 16);
  const RVec ref = reference_density(f.table);
  const VolumeMapSpec vm = VolumeMapSpec::constant(ref);
  const HermProduct Ha(balanced_line_product(2));
  const HermProduct Hb(CMat(3.0 * balanced_line_product(2)));
  const VolumeDensity va = volume_density(vm, Ha, f.table);
  const VolumeDensity vb = volume_density(vm, Hb, f.table);
  CHECK((va.density - vb.density).cwiseAbs().maxCoeff() == 0.0);
  // The density travels through the log domain, so allow one rounding ulp.
  CHECK((va.density - ref).cwiseAbs().maxCoeff() <= 1e-15 * ref.maxCoeff());
  CHECK(va.volume == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("liouville density of the round metric") {
  const int p = 3;
  LineFixture f = make_line(p, 32);
  const HermProduct H(balanced_line_product(p));
  const VolumeDensity vd = liouville_density(H, f.table);
  CHECK(vd.volume == doctest::Approx(2.0).epsilon(1e-11));
  const long N = f.table.node_count();
  for (long i : {0L, N / 3, N - 1}) {
    const double u = std::norm(node_z(f.table, i));
    CHECK(vd.density(i) ==
          doctest::Approx((2.0 / M_PI) * std::pow(1.0 + u, -2)).epsilon(1e-10));
  }

  // Scale invariance: the Liouville form only sees the metric, not the scale.
  const HermProduct H5(CMat(5.0 * balanced_line_product(p)));
  const VolumeDensity vd5 = liouville_density(H5, f.table);
  CHECK(vd5.density(0) == doctest::Approx(vd.density(0)).epsilon(1e-12));

  // Plane: pointwise the density is exact; the volume integral carries the
  // algebraic plane-quadrature error (~2.5e-4 relative at order 16).
  LineFixture g = make_plane(1, 16);
  const HermProduct Hp(balanced_plane_product(1));
  const VolumeDensity vdp = liouville_density(Hp, g.table);
  CHECK(vdp.volume == doctest::Approx(4.5).epsilon(1e-3));
  const double u0 = g.table.nodes.row(0).squaredNorm();
  CHECK(vdp.density(0) ==
        doctest::Approx(9.0 / (M_PI * M_PI) * std::pow(1.0 + u0, -3))
            .epsilon(1e-9));
}

TEST_CASE("density validation and range errors") {
  LineFixture f = make_line(1, 16);
  const HermProduct H(balanced_line_product(1));

  RVec short_density = RVec::Ones(7);
  CHECK_THROWS_AS(
      volume_density(VolumeMapSpec::constant(short_density), H, f.table),
      invalid_input);

  RVec with_zero = RVec::Ones(f.table.node_count());
  with_zero(3) = 0.0;
  CHECK_THROWS_AS(
      volume_density(VolumeMapSpec::constant(with_zero), H, f.table),
      invalid_input);

  // K_{cH} = K_H / c: a tiny product inflates the canonical density
  // K^{+1/p} past the double range at far-out nodes.
  const HermProduct tiny(CMat(std::exp(-705.0) * balanced_line_product(1)));
  CHECK_THROWS_AS(
      volume_density(VolumeMapSpec::canonical(RVec::Ones(f.table.node_count())),
                     tiny, f.table),
      numerical_error);
}

TEST_CASE("volume density working-frame overload agrees with the direct one") {
  LineFixture f = make_line(2, 16);
  CMat Hm = balanced_line_product(2);
  Hm(1, 3) = cxd(0.05, 0.02);
  Hm(3, 1) = cxd(0.05, -0.02);
  const HermProduct H(Hm);
  const WorkingFrame wf = working_frame(H, f.table);
  const VolumeDensity a = volume_density(VolumeMapSpec::anticanonical(), H, f.table);
  const VolumeDensity b =
      volume_density(VolumeMapSpec::anticanonical(), H, wf, f.table);
  CHECK((a.density - b.density).cwiseAbs().maxCoeff() <=
        1e-15 * a.density.maxCoeff());
  CHECK(a.volume == doctest::Approx(b.volume).epsilon(1e-15));
}

TEST_CASE("reference density matches its formula") {
  LineFixture f = make_line(2, 12);
  const RVec ref = reference_density(f.table);
  for (long i : {0L, (long)f.table.node_count() - 1}) {
    const double u = std::norm(node_z(f.table, i));
    CHECK(ref(i) == doctest::Approx(std::pow(1.0 + u, -2)).epsilon(1e-14));
  }
  LineFixture g = make_plane(1, 8);
  const RVec refp = reference_density(g.table);
  const double u0 = g.table.nodes.row(0).squaredNorm();
  CHECK(refp(0) == doctest::Approx(std::pow(1.0 + u0, -3)).epsilon(1e-14));
}
