#include "margulis/parabolic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace margulis {

namespace {

const Mat3& Jm() { return MetricSignature::standard().J; }

}  // namespace

ParabolicFrame canonical_frame(const Mat3& N) {
  const double scale = N.norm();
  if (!(scale > 0.0) || !N.allFinite())
    throw InputError("canonical_frame: invalid nilpotent");
  if ((Jm() * N + (Jm() * N).transpose()).norm() > 1e-9 * scale)
    throw InputError("canonical_frame: not skew-adjoint");
  if ((N * N * N).norm() > 1e-9 * scale * scale * scale)
    throw InputError("canonical_frame: not three-step nilpotent");

  if ((N * N).norm() <= 1e-12 * scale * scale)
    throw InputError("canonical_frame: rank(N) != 2");

  // Start from the principal axis of bform(N w, N w) = w' (N' J N) w, a
  // rank-one positive semidefinite form: the maximizer keeps the spacelike
  // normalization below as large as the input allows, which is what keeps
  // the construction conditioned for strongly conjugated nilpotents.
  const Mat3 Q = N.transpose() * Jm() * N;
  Eigen::SelfAdjointEigenSolver<Mat3> eq(Q);
  if (eq.eigenvalues()(2) <= 1e-10 * scale * scale)
    throw InputError("canonical_frame: rank(N) != 2");

  Vec3 a = eq.eigenvectors().col(2);
  Vec3 b = N * a;
  Vec3 c = N * b;
  const double q = bform(b, b);
  if (q <= 0.0)
    throw NumericalError("canonical_frame: middle vector not spacelike");
  double s = 1.0 / std::sqrt(q);
  if (bform(s * c, MetricSignature::standard().future) > 0.0) s = -s;
  a *= s;
  b *= s;
  c *= s;

  // Pin the one-parameter gauge a -> a + z b + z^2/2 c, b -> b + z c by the
  // Euclidean condition <b(z), c> = 0, linear in z with a unique root. The
  // shear stays bounded by |b|/|c|, so it cannot amplify rounding the way a
  // large root of a nonlinear pin would.
  const double z = -b.dot(c) / c.dot(c);
  a += z * b + 0.5 * z * z * c;
  b += z * c;

  // Null shift: bform(a + u0 c, a + u0 c) = bform(a,a) - 2 u0.
  const double u0 = 0.5 * bform(a, a);
  a += u0 * c;

  ParabolicFrame fr;
  fr.a = a;
  fr.b = b;
  fr.c = c;
  fr.changeOfBasis.col(0) = c;
  fr.changeOfBasis.col(1) = b;
  fr.changeOfBasis.col(2) = a;
  return fr;
}

Mat4 phi_mat4(double mu, double t) {
  Mat4 M = Mat4::Identity();
  M(0, 1) = t;
  M(0, 2) = 0.5 * t * t;
  M(0, 3) = mu * t * t * t / 6.0;
  M(1, 2) = t;
  M(1, 3) = 0.5 * mu * t * t;
  M(2, 3) = mu * t;
  return M;
}

AffIso phi_t(const ParabolicFrame& fr, double mu, double t) {
  const Mat4 M = phi_mat4(mu, t);
  const Mat3& C = fr.changeOfBasis;
  const Mat3 A = C * M.topLeftCorner<3, 3>() * C.inverse();
  const Vec3 w = C * M.topRightCorner<3, 1>();
  return AffIso(reproject_so21(A, 1), w, false);
}

double F2(const Vec3& p, double mu) { return p(2) * p(2) - 2.0 * mu * p(1); }

double F3(const Vec3& p, double mu) {
  return p(2) * p(2) * p(2) - 3.0 * mu * p(1) * p(2) + 3.0 * mu * mu * p(0);
}

Vec3 straighten(const Vec3& p, double mu) {
  return Vec3(F3(p, mu), F2(p, mu), p(2));
}

Vec3 unstraighten(const Vec3& q, double mu, double tau) {
  if (std::abs(mu) < tau)
    throw InputError("unstraighten: mu too small to invert");
  const double z = q(2);
  const double y = (z * z - q(1)) / (2.0 * mu);
  const double x = (q(0) - z * z * z + 3.0 * mu * y * z) / (3.0 * mu * mu);
  return Vec3(x, y, z);
}

std::vector<std::pair<double, Vec3>> orbit_curve(const Vec3& p, double mu,
                                                 double t0, double t1, int n) {
  if (n < 2) throw InputError("orbit_curve: need at least 2 samples");
  std::vector<std::pair<double, Vec3>> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
    const Mat4 M = phi_mat4(mu, t);
    const Vec3 q = M.topLeftCorner<3, 3>() * p + M.topRightCorner<3, 1>();
    out.emplace_back(t, q);
  }
  return out;
}

double displacement_identity_residual(const Vec3& p, double mu, double t) {
  const Mat4 M = phi_mat4(mu, t);
  const Vec3 S = M.topLeftCorner<3, 3>() * p + M.topRightCorner<3, 1>() - p;
  const double lhs = bform(S, S, MetricSignature::parabolic());
  const double rhs = t * t * (F2(p, mu) - mu * mu * t * t / 12.0);
  return std::abs(lhs - rhs);
}

ParabolicNormalForm parabolic_normal_form(const AffIso& g, double tau) {
  const IsoClass cls = classify(g);
  if (cls.tag != IsoClassTag::Parabolic)
    throw InputError("parabolic_normal_form: isometry is not parabolic");

  const Mat3 D = g.A - Mat3::Identity();
  const Mat3 M = D - 0.5 * D * D;  // exact log of a 3-step unipotent

  ParabolicFrame fr = canonical_frame(M);
  const double detC = fr.changeOfBasis.determinant();
  const double tsign = (detC > 0.0) ? 1.0 : -1.0;
  if (detC <= 0.0) fr = canonical_frame(Mat3(-M));

  const Mat3& C0 = fr.changeOfBasis;
  const Vec3 wf0 = C0.partialPivLu().solve(g.b);
  const double mu_raw = wf0(2) / tsign;
  if (std::abs(mu_raw) < tau)
    throw InputError("parabolic_normal_form: not a proper parabolic");

  const double l = 1.0 / std::sqrt(std::abs(mu_raw));
  const double mu_n = (mu_raw > 0.0) ? 1.0 : -1.0;
  const double t_n = tsign / l;

  ParabolicNormalForm nf;
  nf.frame.a = fr.a / l;
  nf.frame.b = fr.b;
  nf.frame.c = fr.c * l;
  nf.frame.mu = mu_n;
  nf.frame.t = std::abs(t_n);
  nf.frame.changeOfBasis.col(0) = nf.frame.c;
  nf.frame.changeOfBasis.col(1) = nf.frame.b;
  nf.frame.changeOfBasis.col(2) = nf.frame.a;
  nf.mu = mu_n;
  nf.t = std::abs(t_n);
  nf.tSignRaw = (t_n >= 0.0) ? 1.0 : -1.0;

  const Mat3& Cn = nf.frame.changeOfBasis;
  const Eigen::PartialPivLU<Mat3> lu(Cn);
  const Mat3 Af = lu.solve(g.A * Cn);
  const Mat4 target = phi_mat4(mu_n, t_n);
  if ((Af - target.topLeftCorner<3, 3>()).norm() > 1e-8)
    throw NumericalError("parabolic_normal_form: frame reduction failed");

  // Translation conjugation forcing the x component to mu t^3 / 6:
  // (Af - I) d = target_translation - wf has a solution since the defect
  // lies in the range; take the minimal-norm one.
  const Vec3 wf = lu.solve(g.b);
  const Vec3 rhs = target.topRightCorner<3, 1>() - wf;
  const Mat3 Df = Af - Mat3::Identity();
  const Vec3 d = Df.completeOrthogonalDecomposition().solve(rhs);
  if ((Df * d - rhs).norm() > 1e-9)
    throw NumericalError("parabolic_normal_form: translation gauge failed");
  nf.shift = d;
  return nf;
}

Vec3 normal_form_to_frame(const ParabolicNormalForm& nf, const Vec3& ambient) {
  return nf.frame.changeOfBasis.partialPivLu().solve(ambient) - nf.shift;
}

Vec3 normal_form_to_ambient(const ParabolicNormalForm& nf, const Vec3& frame) {
  return nf.frame.changeOfBasis * (frame + nf.shift);
}

bool cyclic_properness(const AffIso& g, double tau) {
  try {
    parabolic_normal_form(g, tau);
    return true;
  } catch (const InputError& e) {
    if (std::string(e.what()).find("not a proper parabolic") !=
        std::string::npos)
      return false;
    throw;
  }
}

}  // namespace margulis
