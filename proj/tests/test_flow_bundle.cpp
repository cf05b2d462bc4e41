#include <doctest.h>

#include "margulis/flow_bundle.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace margulis;
using namespace margulis::testutil;

namespace {

UTBPoint random_utb(Rng& rng) {
  return UTBPoint(random_so21(rng, 1.2));
}

AffIso boost_with_neutral_shift(double t, double shift) {
  Mat3 A = Mat3::Identity();
  A(1, 1) = std::cosh(t);
  A(1, 2) = std::sinh(t);
  A(2, 1) = std::sinh(t);
  A(2, 2) = std::cosh(t);
  const AffIso lin(A, Vec3::Zero());
  return AffIso(A, shift * hyperbolic_eigendata(lin).x0);
}

}  // namespace

TEST_CASE("base point of the tangent bundle") {
  const UTBPoint p = UTBPoint::base();
  CHECK(bdd_dist(base_point(p), DirPoint::embed_dir(Vec3(0, 0, 1))) == 0.0);
  CHECK((base_direction(p) - Vec3(0, 1, 0)).norm() == 0.0);

  const FiberFrame f = frame_at(p);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK((f.v_plus - Vec3(0, s, s)).norm() < 1e-15);
  CHECK((f.v_minus - Vec3(0, -s, s)).norm() < 1e-15);
  CHECK((f.v_zero - Vec3(-1, 0, 0)).norm() < 1e-15);

  CHECK_THROWS_AS(UTBPoint(2.0 * Mat3::Identity()), InputError);
  CHECK_THROWS_AS(UTBPoint(Mat3(-Mat3::Identity())), InputError);
}

TEST_CASE("fiber frame identities and equivariance") {
  Rng rng(61);
  for (int i = 0; i < 50; ++i) {
    const UTBPoint p = random_utb(rng);
    const FiberFrame f = frame_at(p);
    CHECK(std::abs(bform(f.v_plus, f.v_plus)) < 1e-12);
    CHECK(std::abs(bform(f.v_minus, f.v_minus)) < 1e-12);
    CHECK(bform(f.v_zero, f.v_zero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(bform(f.v_zero, f.v_plus)) < 1e-12);
    CHECK(std::abs(bform(f.v_zero, f.v_minus)) < 1e-12);
    CHECK(bform(f.v_plus, f.v_minus) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(causal_class(f.v_plus) == CausalClass::NullFuture);
    CHECK(causal_class(f.v_minus) == CausalClass::NullFuture);

    const Mat3 h = random_so21(rng, 1.0);
    const FiberFrame fh = frame_at(UTBPoint(Mat3(h * p.g)));
    CHECK((fh.v_plus - h * f.v_plus).norm() < 1e-9);
    CHECK((fh.v_minus - h * f.v_minus).norm() < 1e-9);
    CHECK((fh.v_zero - h * f.v_zero).norm() < 1e-9);
  }
}

TEST_CASE("frame coordinates reconstruct the vector") {
  Rng rng(62);
  for (int i = 0; i < 50; ++i) {
    const UTBPoint p = random_utb(rng);
    const FiberFrame f = frame_at(p);
    const Vec3 w = random_vec3(rng, 4.0);
    const Vec3 c = frame_coordinates(f, w);
    const Vec3 back = c(0) * f.v_plus + c(1) * f.v_zero + c(2) * f.v_minus;
    CHECK((back - w).norm() < 1e-9 * std::max(1.0, w.norm()));
  }
}

TEST_CASE("geodesic flow is a one-parameter group") {
  Rng rng(63);
  const UTBPoint p = random_utb(rng);
  CHECK((flow(p, 0.0).g - p.g).norm() == 0.0);
  const UTBPoint q = flow(flow(p, 0.7), -1.9);
  CHECK((q.g - flow(p, -1.2).g).norm() < 1e-12);

  // Unit speed: the base point moves hyperbolic distance |t|.
  for (double t : {0.3, 1.0, 4.0}) {
    const double d = klein_dist(p.g.col(2), flow(p, t).g.col(2));
    CHECK(d == doctest::Approx(t).epsilon(1e-9));
  }

  // Far flows stay numerically on the group.
  const UTBPoint far = flow(p, 18.0);
  CHECK_NOTHROW(UTBPoint{far.g});
}

TEST_CASE("flowing scales the frame coordinates exactly") {
  Rng rng(64);
  for (int trial = 0; trial < 10; ++trial) {
    const UTBPoint p = random_utb(rng);
    const Vec3 w = random_vec3(rng, 2.0);
    const Vec3 c0 = frame_coordinates(frame_at(p), w);
    // The contracted coordinate is read back out of a matrix whose entries
    // carry the opposite exponential, costing e^{2|t|} times eps.
    for (double t : {-5.0, -2.0, 0.5, 3.0, 5.0}) {
      const Vec3 ct = frame_coordinates(frame_at(flow(p, t)), w);
      CHECK(ct(0) == doctest::Approx(std::exp(-t) * c0(0)).epsilon(1e-9));
      CHECK(ct(1) == doctest::Approx(c0(1)).epsilon(1e-9));
      CHECK(ct(2) == doctest::Approx(std::exp(t) * c0(2)).epsilon(1e-9));
    }
  }
}

TEST_CASE("half-plane and Klein charts agree") {
  CHECK((halfplane_to_klein3(0, 1) - Vec3(0, 0, 1)).norm() == 0.0);
  CHECK((halfplane_to_klein3(1, 0) - Vec3(1, 0, 1)).norm() == 0.0);
  CHECK(halfplane_dist(Vec2(0, 1), Vec2(0, std::exp(1.0))) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(klein_dist(halfplane_to_klein3(0, 1), halfplane_to_klein3(0, std::exp(1.0))) ==
        doctest::Approx(1.0).epsilon(1e-9));

  Rng rng(65);
  for (int i = 0; i < 32; ++i) {
    const Vec2 z1(uniform(rng, -3.0, 3.0), uniform(rng, 0.05, 5.0));
    const Vec2 z2(uniform(rng, -3.0, 3.0), uniform(rng, 0.05, 5.0));
    const double dh = halfplane_dist(z1, z2);
    const double dk =
        klein_dist(halfplane_to_klein3(z1(0), z1(1)), halfplane_to_klein3(z2(0), z2(1)));
    CHECK(dh == doctest::Approx(dk).epsilon(1e-9));
  }

  CHECK((klein_chart(halfplane_to_klein(0, 1)) - Vec2::Zero()).norm() < 1e-12);
  const Vec2 chart = klein_chart(halfplane_to_klein(0.4, 2.0));
  CHECK(chart.norm() < 1.0);

  CHECK_THROWS_AS(halfplane_to_klein(0, -1.0), InputError);
  CHECK_THROWS_AS(halfplane_dist(Vec2(0, 0), Vec2(0, 1)), InputError);
  CHECK_THROWS_AS(klein_chart(DirPoint::embed_dir(Vec3(1, 0, 0))), InputError);
}

TEST_CASE("axis frame of a standard boost is the identity") {
  const AffIso g = boost_with_neutral_shift(0.9, 0.0);
  const AxisBasis ab = axis_point_nearest_origin(g);
  CHECK((ab.F - Mat3::Identity()).norm() < 1e-10);
  CHECK((ab.p - Vec3(0, 0, 1)).norm() < 1e-10);
  CHECK((ab.u - Vec3(0, 1, 0)).norm() < 1e-10);
  CHECK_THROWS_AS(axis_point_nearest_origin(AffIso::identity()), InputError);
}

TEST_CASE("cocycle decomposition of a neutral translation") {
  const AffIso g = boost_with_neutral_shift(0.9, 3.0);
  const CocycleDecomp d = cocycle_decompose(g);
  CHECK(std::abs(d.b_plus) < 1e-12);
  CHECK(d.b_zero == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(d.b_minus) < 1e-12);
  CHECK(d.norm_zero_E == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("neutral coordinate equals the Margulis invariant") {
  const GroupSpec G = reference_deformation();
  for (const char* text : {"a", "b", "ab", "aB", "abb", "aabAB"}) {
    const Word w = parse_word(G, text);
    const AffIso g = evaluate(G, w);
    const CocycleDecomp d = cocycle_decompose(G, w);
    CHECK(std::abs(d.b_zero - alpha(g)) < 1e-8);

    // The coordinates reconstruct the translation part.
    const Vec3 back = d.b_plus * d.frame.v_plus + d.b_zero * d.frame.v_zero +
                      d.b_minus * d.frame.v_minus;
    CHECK((back - g.b).norm() < 1e-8);
    CHECK((d.b - g.b).norm() == 0.0);

    // Sliding the base point along the axis cannot move the neutral part.
    for (double off : {-2.0, 1.0}) {
      CHECK(std::abs(cocycle_decompose(G, w, off).b_zero - d.b_zero) < 1e-8);
    }
  }
  CHECK_THROWS_AS(cocycle_decompose(G, parse_word(G, "abAB")), InputError);
}

TEST_CASE("conjugating by a translation preserves the neutral coordinate") {
  Rng rng(66);
  const GroupSpec G = reference_deformation();
  const Word w = parse_word(G, "ab");
  const double b0 = cocycle_decompose(G, w).b_zero;
  for (int i = 0; i < 8; ++i) {
    const AffIso shift(Mat3::Identity(), random_vec3(rng, 3.0));
    const AffIso g = compose(shift, compose(evaluate(G, w), inverse(shift)));
    CHECK(std::abs(cocycle_decompose(g).b_zero - b0) < 1e-9);
  }
}

TEST_CASE("cocycle integral matches the translation part") {
  const GroupSpec G = reference_deformation();
  for (const char* text : {"a", "b", "ab"}) {
    const Word w = parse_word(G, text);
    const AffIso g = evaluate(G, w);
    const Vec3 q = integrate_cocycle(G, w, 2048);
    CHECK((q - g.b).norm() < 1e-6);
  }

  // A linear isometry has zero cocycle and zero integral.
  const AffIso lin(evaluate(G, parse_word(G, "a")).A, Vec3::Zero());
  CHECK(integrate_cocycle(lin, 256).norm() < 1e-10);
}

TEST_CASE("cusp projections obey the entry-point laws") {
  const double k = 0.7;
  for (double R : {2.0, 5.0, 10.0, 50.0}) {
    const CuspProjections pr = cusp_projections(R, k);
    // Neutral frame coordinate is exactly k/R up to sign.
    CHECK(std::abs(pr.c_zero) * R == doctest::Approx(k).epsilon(1e-10));
    // Contracting projection decays exactly like 1/R^2.
    CHECK(pr.normm * 2.0 * std::sqrt(2.0) * R * R ==
          doctest::Approx(k).epsilon(1e-9));
    // Expanding projection stays pinched between |k| and a fixed multiple.
    CHECK(pr.normp >= k * (1.0 - 1e-9));
    CHECK(pr.normp <= 3.0 * k);
    CHECK(pr.norm0 > 0.0);

    // Linearity in k.
    const CuspProjections pr2 = cusp_projections(R, 2.0 * k);
    CHECK(pr2.norm0 == doctest::Approx(2.0 * pr.norm0).epsilon(1e-12));
    CHECK(pr2.normm == doctest::Approx(2.0 * pr.normm).epsilon(1e-12));
    CHECK(pr2.normp == doctest::Approx(2.0 * pr.normp).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cusp_projections(1.0, 1.0), InputError);
  CHECK_THROWS_AS(cusp_projections(0.5, 1.0), InputError);
}

TEST_CASE("cusp segment closed forms match quadrature") {
  const double k = 1.3;
  for (double R : {2.0, 5.0, 10.0, 50.0}) {
    const CuspSegment seg = cusp_segment_integrals(R, k);
    CHECK((seg.b_minus_vec - seg.b_minus_quad).norm() < 1e-7);
    CHECK(std::abs(seg.alpha_contrib - seg.alpha_quad) < 1e-7);
    // The contracting projection of the form is constant along the segment.
    CHECK(seg.frame_residual < 1e-9);
  }

  // Both contributions vanish as the geodesic grazes the horodisk.
  const CuspSegment graze = cusp_segment_integrals(1.0 + 1e-8, k, 64);
  CHECK(graze.b_minus_vec.norm() < 1e-3);
  CHECK(std::abs(graze.alpha_contrib) < 1e-3);
  CHECK_THROWS_AS(cusp_segment_integrals(0.9, 1.0), InputError);
}

TEST_CASE("direction limit experiment tabulates filtered words") {
  const GroupSpec G = reference_deformation();
  const LimitTable tab = direction_limit_experiment(G, reference_disk(), 3, 4, true);
  REQUIRE(tab.bands.size() == 2);
  CHECK(tab.bands[0].length == 3);
  CHECK(tab.bands[1].length == 4);
  size_t total = 0;
  for (const auto& band : tab.bands) {
    CHECK(band.count > 0);
    CHECK(band.min_norm_E > 0.0);
    total += static_cast<size_t>(band.count);
  }
  CHECK(tab.rows.size() == total);

  for (const auto& row : tab.rows) {
    const AffIso g = evaluate(G, parse_word(G, row.word));
    const HyperbolicData e = hyperbolic_eigendata(g);
    CHECK(row.l_klein == doctest::Approx(e.ell_klein).epsilon(1e-10));
    CHECK(row.norm_b_E == doctest::Approx(g.b.norm()).epsilon(1e-10));
    CHECK(row.dist_to_zeta ==
          doctest::Approx(dist_to_accordant(g.b, e.xp)).epsilon(1e-9));
    CHECK(static_cast<int>(row.word.size()) == row.length);
  }

  CHECK_THROWS_AS(
      direction_limit_experiment(G, KleinDisk{Vec2(0.97, 0.0), 1e-6}, 3, 3),
      InputError);
  CHECK_THROWS_AS(direction_limit_experiment(G, reference_disk(), 4, 3),
                  InputError);
}
