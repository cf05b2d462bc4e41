#include <doctest.h>

#include "margulis/parabolic.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace margulis;
using namespace margulis::testutil;

namespace {

Mat3 standard_nilpotent() {
  Mat3 N;
  N << 0, 1, 1, -1, 0, 0, 1, 0, 0;
  return N;
}

// Conjugates of the standard nilpotent stay skew-adjoint and three-step.
Mat3 random_nilpotent(Rng& rng) {
  const Mat3 L = random_so21(rng, 1.0);
  const double s = uniform(rng, 0.2, 5.0);
  return s * L * standard_nilpotent() * L.inverse();
}

double frame_identity_residual(const Mat3& N, const ParabolicFrame& fr) {
  double r = 0.0;
  r = std::max(r, std::abs(bform(fr.a, fr.b)));
  r = std::max(r, std::abs(bform(fr.b, fr.c)));
  r = std::max(r, std::abs(bform(fr.a, fr.c) + 1.0));
  r = std::max(r, std::abs(bform(fr.b, fr.b) - 1.0));
  r = std::max(r, std::abs(bform(fr.a, fr.a)));
  r = std::max(r, std::abs(bform(fr.c, fr.c)));
  r = std::max(r, (N * fr.a - fr.b).norm());
  r = std::max(r, (N * fr.b - fr.c).norm());
  return r;
}

Vec3 apply_mat4(const Mat4& M, const Vec3& p) {
  Vec4 q;
  q << p, 1.0;
  return (M * q).head<3>();
}

}  // namespace

TEST_CASE("canonical frame of the standard nilpotent") {
  const Mat3 N = standard_nilpotent();
  const ParabolicFrame fr = canonical_frame(N);
  CHECK((fr.c - Vec3(0, -1, 1)).norm() < 1e-12);
  CHECK((fr.b - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK((fr.a - Vec3(0, 0.5, 0.5)).norm() < 1e-12);
  CHECK(frame_identity_residual(N, fr) < 1e-12);
  CHECK(causal_class(fr.c) == CausalClass::NullFuture);
  // changeOfBasis columns are (c, b, a).
  CHECK((fr.changeOfBasis.col(0) - fr.c).norm() == 0.0);
  CHECK((fr.changeOfBasis.col(2) - fr.a).norm() == 0.0);
}

TEST_CASE("canonical frame identities for random conjugated nilpotents") {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const Mat3 N = random_nilpotent(rng);
    const ParabolicFrame fr = canonical_frame(N);
    CHECK(frame_identity_residual(N, fr) < 1e-8);
    CHECK(causal_class(fr.c) == CausalClass::NullFuture);
  }
}

TEST_CASE("canonical frame is equivariant up to the shear gauge") {
  // Frames of N form a one-parameter family: the flow of N itself shears
  // a and b while fixing c, so no frame choice commutes with conjugation
  // exactly. c is equivariant on the nose; a and b are equivariant after
  // matching the shear parameter z read off the b difference.
  Rng rng(32);
  const Mat3 N = standard_nilpotent();
  const ParabolicFrame fr = canonical_frame(N);
  for (int i = 0; i < 20; ++i) {
    const Mat3 L = random_so21(rng, 1.0);
    const ParabolicFrame moved = canonical_frame(Mat3(L * N * L.inverse()));
    CHECK((moved.c - L * fr.c).norm() < 1e-7);

    const Vec3 db = L * fr.b - moved.b;
    const double z = db.dot(moved.c) / moved.c.squaredNorm();
    CHECK((db - z * moved.c).norm() < 1e-7);
    CHECK((L * fr.a - (moved.a + z * moved.b + 0.5 * z * z * moved.c)).norm() <
          1e-7);
  }
}

TEST_CASE("canonical frame under rescaling of the nilpotent") {
  const Mat3 N = standard_nilpotent();
  const double s = 4.0;
  const ParabolicFrame fr = canonical_frame(N);
  const ParabolicFrame frs = canonical_frame(Mat3(s * N));
  // b stays the unit spacelike middle vector; c = (sN) b scales with s.
  CHECK((frs.b - fr.b).norm() < 1e-10);
  CHECK((frs.c - s * fr.c).norm() < 1e-10);
  CHECK(frame_identity_residual(Mat3(s * N), frs) < 1e-10);
}

TEST_CASE("rejects invalid nilpotents") {
  CHECK_THROWS_AS(canonical_frame(Mat3::Identity()), InputError);
  CHECK_THROWS_AS(canonical_frame(Mat3::Zero()), InputError);
  Mat3 rank1;
  rank1 << 0, 1, 1, 0, 0, 0, 0, 0, 0;
  CHECK_THROWS_AS(canonical_frame(rank1), InputError);
}

TEST_CASE("one-parameter group matrix") {
  const Mat4 M = phi_mat4(1.0, 1.0);
  CHECK(M(0, 0) == 1.0);
  CHECK(M(0, 1) == 1.0);
  CHECK(M(0, 2) == doctest::Approx(0.5));
  CHECK(M(0, 3) == doctest::Approx(1.0 / 6.0));
  CHECK((phi_mat4(1.0, 0.0) - Mat4::Identity()).norm() == 0.0);

  Rng rng(33);
  for (int i = 0; i < 32; ++i) {
    const double mu = uniform(rng, 0.2, 3.0);
    const double s = uniform(rng, -4.0, 4.0), t = uniform(rng, -4.0, 4.0);
    const Mat4 prod = phi_mat4(mu, s) * phi_mat4(mu, t);
    CHECK((prod - phi_mat4(mu, s + t)).norm() < 1e-10);
  }
}

TEST_CASE("ambient one-parameter group through a frame") {
  const ParabolicFrame fr = canonical_frame(standard_nilpotent());
  const AffIso id = phi_t(fr, 1.0, 0.0);
  CHECK((id.A - Mat3::Identity()).norm() < 1e-12);
  CHECK(id.b.norm() < 1e-12);

  const AffIso g1 = phi_t(fr, 1.0, 0.7);
  const AffIso g2 = phi_t(fr, 1.0, -0.3);
  const AffIso g12 = compose(g1, g2);
  const AffIso want = phi_t(fr, 1.0, 0.4);
  CHECK((g12.A - want.A).norm() < 1e-10);
  CHECK((g12.b - want.b).norm() < 1e-10);
  CHECK(classify(g1).tag == IsoClassTag::Parabolic);
}

TEST_CASE("invariant polynomials") {
  Rng rng(34);
  for (int i = 0; i < 64; ++i) {
    const double mu = uniform(rng, 0.2, 3.0);
    const Vec3 p = random_vec3(rng, 3.0);
    const double t = uniform(rng, -5.0, 5.0);
    const Vec3 q = apply_mat4(phi_mat4(mu, t), p);
    CHECK(std::abs(F2(q, mu) - F2(p, mu)) < 1e-8);
    CHECK(std::abs(F3(q, mu) - F3(p, mu)) < 1e-8);
  }
  const double y0 = 1.7, mu = 2.0;
  CHECK(F2(Vec3(0, y0, 0), mu) == doctest::Approx(-2.0 * mu * y0));
}

TEST_CASE("straightening conjugates the flow to a shift") {
  Rng rng(35);
  for (int i = 0; i < 32; ++i) {
    const double mu = uniform(rng, 0.3, 2.5);
    const Vec3 p = random_vec3(rng, 2.0);
    const double t = uniform(rng, -3.0, 3.0);
    const Vec3 s1 = straighten(apply_mat4(phi_mat4(mu, t), p), mu);
    const Vec3 s0 = straighten(p, mu);
    CHECK((s1 - (s0 + Vec3(0, 0, mu * t))).norm() < 1e-8);
    CHECK((unstraighten(s0, mu) - p).norm() < 1e-9);
  }
  CHECK_THROWS_AS(unstraighten(Vec3(1, 1, 1), 0.0), InputError);
}

TEST_CASE("orbit curves are twisted cubics on cylinders") {
  const auto orbit = orbit_curve(Vec3::Zero(), 1.0, 0.0, 3.0, 31);
  REQUIRE(orbit.size() == 31);
  for (const auto& [t, p] : orbit) {
    CHECK((p - Vec3(t * t * t / 6.0, t * t / 2.0, t)).norm() < 1e-12);
    CHECK(std::abs(F2(p, 1.0) - 0.0) < 1e-9);
  }

  Rng rng(36);
  const Vec3 p0 = random_vec3(rng, 2.0);
  const double mu = 1.3;
  const double f2 = F2(p0, mu);
  for (const auto& [t, p] : orbit_curve(p0, mu, -6.0, 6.0, 121))
    CHECK(std::abs(F2(p, mu) - f2) < 1e-9);

  // Orbit directions approach the fixed null direction of the flow.
  const Vec3 far = apply_mat4(phi_mat4(1.0, 400.0), p0);
  CHECK(bdd_dist(DirPoint::embed_affine(far), DirPoint::embed_dir(Vec3(1, 0, 0))) <
        0.01);
}

TEST_CASE("displacement identity") {
  const Vec3 sp = apply_mat4(phi_mat4(1.0, 1.0), Vec3::Zero());
  CHECK(bform(sp, sp, MetricSignature::parabolic()) ==
        doctest::Approx(-1.0 / 12.0).epsilon(1e-12));
  CHECK(displacement_identity_residual(Vec3::Zero(), 1.0, 1.0) < 1e-12);
  CHECK(displacement_identity_residual(Vec3(1, 2, 3), 2.0, 0.0) == 0.0);

  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p = random_vec3(rng, 10.0);
    const double mu = uniform(rng, 0.1, 3.0);
    const double t = uniform(rng, -10.0, 10.0);
    CHECK(displacement_identity_residual(p, mu, t) < 1e-8);
  }
}

TEST_CASE("parabolic normal form round trips") {
  const ParabolicFrame fr = canonical_frame(standard_nilpotent());

  const ParabolicNormalForm nf1 = parabolic_normal_form(phi_t(fr, 1.0, 1.0));
  CHECK(nf1.mu == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nf1.t == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nf1.tSignRaw == 1.0);

  // Scaling mu trades into the normalized flow time.
  const ParabolicNormalForm nf4 = parabolic_normal_form(phi_t(fr, 4.0, 1.0));
  CHECK(nf4.mu == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nf4.t == doctest::Approx(2.0).epsilon(1e-10));

  const ParabolicNormalForm nfm = parabolic_normal_form(phi_t(fr, -1.0, 1.0));
  CHECK(nfm.mu == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(nfm.t == doctest::Approx(1.0).epsilon(1e-10));

  const ParabolicNormalForm nfi = parabolic_normal_form(inverse(phi_t(fr, 1.0, 1.0)));
  CHECK(nfi.mu == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nfi.t == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nfi.tSignRaw == -1.0);
}

TEST_CASE("normal form is conjugation invariant and exact") {
  Rng rng(38);
  const ParabolicFrame fr = canonical_frame(standard_nilpotent());
  const AffIso g0 = phi_t(fr, 1.0, 1.25);
  for (int i = 0; i < 12; ++i) {
    const AffIso eta(random_so21(rng, 1.0), random_vec3(rng));
    const AffIso g = compose(eta, compose(g0, inverse(eta)));
    const ParabolicNormalForm nf = parabolic_normal_form(g);
    CHECK(std::abs(nf.mu - 1.0) < 1e-8);
    CHECK(std::abs(nf.t - 1.25) < 1e-8);

    // In frame coordinates g acts exactly as the model flow.
    const Mat4 M = phi_mat4(nf.mu, nf.tSignRaw * nf.t);
    for (int k = 0; k < 4; ++k) {
      const Vec3 p = random_vec3(rng, 2.0);
      const Vec3 lhs = normal_form_to_frame(nf, apply(g, p));
      const Vec3 rhs = apply_mat4(M, normal_form_to_frame(nf, p));
      CHECK((lhs - rhs).norm() < 1e-8);
      CHECK((normal_form_to_ambient(nf, normal_form_to_frame(nf, p)) - p).norm() <
            1e-9);
    }
  }
}

TEST_CASE("normal form rejects improper input") {
  Mat2 d;
  d << 2, 0, 0, 0.5;
  CHECK_THROWS_AS(parabolic_normal_form(from_sl2(d)), InputError);
  Mat2 u;
  u << 1, 1, 0, 1;
  // Linear parabolic fixes the origin: no proper normal form.
  CHECK_THROWS_AS(parabolic_normal_form(from_sl2(u)), InputError);
}

TEST_CASE("cyclic properness") {
  const ParabolicFrame fr = canonical_frame(standard_nilpotent());
  CHECK(cyclic_properness(phi_t(fr, 1.0, 1.0)));
  Mat2 u;
  u << 1, 1, 0, 1;
  CHECK_FALSE(cyclic_properness(from_sl2(u)));
}

TEST_CASE("orbit escapes every dyadic annulus") {
  Rng rng(39);
  const Vec3 p = random_vec3(rng, 2.0);
  const double mu = 1.0;
  double prev = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const int N = 1 << k;
    double m = 1e300;
    for (int n = N; n < 2 * N; ++n) {
      m = std::min(m, (apply_mat4(phi_mat4(mu, n), p) - p).norm());
      m = std::min(m, (apply_mat4(phi_mat4(mu, -n), p) - p).norm());
    }
    CHECK(m > prev);
    prev = m;
  }
  CHECK(prev > 1e6);
}
