#include "margulis/invariants.hpp"

#include <cmath>

namespace margulis {

double alpha(const AffIso& g) { return alpha_at(g, Vec3::Zero()); }

double alpha_at(const AffIso& g, const Vec3& basePoint) {
  const HyperbolicData e = hyperbolic_eigendata(g);
  return bform(apply(g, basePoint) - basePoint, e.x0);
}

double alpha_tilde(const AffIso& g, const Vec3& v, double fixTol) {
  if ((g.A * v - v).norm() > fixTol * std::max(1.0, v.norm()))
    throw InputError("alpha_tilde: vector is not fixed by the linear part");
  return bform(g.b, v);
}

CDReport cd_sign(const AffIso& g, double tau) {
  const IsoClass cls = classify(g);
  if (cls.tag == IsoClassTag::Elliptic)
    throw InputError("cd_sign: elliptic isometry has no sign invariant");

  Vec3 v = eigenvector_of(g.A, 1.0).normalized();
  Vec3 x(0.0, 0.0, 1.0);
  if ((g.A * x - x).norm() < 1e-8 || v.cross(x).norm() < 1e-8)
    x += Vec3(1e-3, 0.0, 0.0);
  Mat3 O;
  O.col(0) = v;
  O.col(1) = x;
  O.col(2) = g.A * x;
  double d = O.determinant();
  if (std::abs(d) < 1e-12) {
    x += Vec3(0.0, 1e-3, 0.0);
    O.col(1) = x;
    O.col(2) = g.A * x;
    d = O.determinant();
  }
  if (d < 0.0) {
    v = -v;
    d = -d;
  }

  CDReport r;
  r.witness = v;
  r.orientationDet = d;
  r.value = bform(g.b, v);
  const double threshold = tau * std::max(1.0, g.b.norm());
  if (r.value > threshold)
    r.sign = CDSign::Positive;
  else if (r.value < -threshold)
    r.sign = CDSign::Negative;
  else
    r.sign = CDSign::Zero;
  return r;
}

const char* to_string(CDSign s) {
  switch (s) {
    case CDSign::Positive: return "positive";
    case CDSign::Negative: return "negative";
    case CDSign::Zero: return "zero";
  }
  return "unknown";
}

}  // namespace margulis
