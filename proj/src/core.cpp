#include "margulis/core.hpp"

#include <algorithm>
#include <limits>

namespace margulis {

namespace {

double clamp_unit(double x) { return std::min(1.0, std::max(-1.0, x)); }

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

const MetricSignature& MetricSignature::standard() {
  static const MetricSignature sig = [] {
    MetricSignature s;
    s.J = Vec3(1.0, 1.0, -1.0).asDiagonal();
    s.future = Vec3(0.0, 0.0, 1.0);
    return s;
  }();
  return sig;
}

const MetricSignature& MetricSignature::parabolic() {
  static const MetricSignature sig = [] {
    MetricSignature s;
    s.J << 0, 0, -1, 0, 1, 0, -1, 0, 0;
    s.future = Vec3(1.0, 0.0, 1.0) / std::sqrt(2.0);
    return s;
  }();
  return sig;
}

CausalClass causal_class(const Vec3& v, const MetricSignature& sig,
                         double tau_null) {
  if (!finite(v)) throw InputError("causal_class: nonfinite vector");
  const double n2 = v.squaredNorm();
  if (n2 == 0.0) return CausalClass::Zero;
  const double q = bform(v, v, sig);
  const bool future = bform(v, sig.future, sig) < 0.0;
  if (std::abs(q) <= tau_null * n2)
    return future ? CausalClass::NullFuture : CausalClass::NullPast;
  if (q < 0.0)
    return future ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
  return CausalClass::Spacelike;
}

const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::TimelikeFuture: return "timelike-future";
    case CausalClass::TimelikePast: return "timelike-past";
    case CausalClass::NullFuture: return "null-future";
    case CausalClass::NullPast: return "null-past";
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Zero: return "zero";
  }
  return "unknown";
}

DirPoint::DirPoint(const Vec4& v) {
  if (!v.allFinite()) throw InputError("DirPoint: nonfinite representative");
  const double n = v.norm();
  if (n < 1e-300) throw InputError("DirPoint: zero representative");
  v_ = v / n;
}

DirPoint DirPoint::embed_affine(const Vec3& p) {
  Vec4 v;
  v << p, 1.0;
  return DirPoint(v);
}

DirPoint DirPoint::embed_dir(const Vec3& v) {
  Vec4 u;
  u << v, 0.0;
  return DirPoint(u);
}

DirPoint DirPoint::antipode() const { return DirPoint(Vec4(-v_)); }

double bdd_dist(const DirPoint& p, const DirPoint& q) {
  // Chord form: exact at coincident and antipodal pairs, where acos of the
  // dot product loses half the working precision.
  const double chord = (p.rep() - q.rep()).norm();
  if (chord <= std::sqrt(2.0))
    return 2.0 * std::asin(clamp_unit(0.5 * chord));
  const double cochord = (p.rep() + q.rep()).norm();
  return M_PI - 2.0 * std::asin(clamp_unit(0.5 * cochord));
}

double bdd_dist(const DirPoint& p, const std::vector<DirPoint>& A) {
  if (A.empty()) throw InputError("bdd_dist: empty point set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : A) best = std::min(best, bdd_dist(p, a));
  return best;
}

double hausdorff_dist(const std::vector<DirPoint>& A,
                      const std::vector<DirPoint>& B) {
  if (A.empty() || B.empty()) throw InputError("hausdorff_dist: empty set");
  double h = 0.0;
  for (const auto& a : A) h = std::max(h, bdd_dist(a, B));
  for (const auto& b : B) h = std::max(h, bdd_dist(b, A));
  return h;
}

Vec3 accordant_departure(const Vec3& xnull, const MetricSignature& sig) {
  const Vec3 xh = xnull.normalized();
  Vec3 d = xh.cross(Vec3(sig.J * xh));
  const double n = d.norm();
  if (n < 1e-12)
    throw InputError("accordant_departure: direction is not null");
  d /= n;
  Mat3 O;
  O.col(0) = xh;
  O.col(1) = d;
  O.col(2) = sig.future;
  if (O.determinant() < 0.0) d = -d;
  return d;
}

GreatSegment accordant_segment(const DirPoint& x, int n,
                               const MetricSignature& sig) {
  if (n < 2) throw InputError("accordant_segment: need at least 2 samples");
  const Vec3 s = x.spatial();
  const double tau = 1e-8;
  if (std::abs(x.w()) > tau)
    throw InputError("accordant_segment: point is not at infinity");
  if (std::abs(bform(s, s, sig)) > tau * s.squaredNorm())
    throw InputError("accordant_segment: direction is not null");
  if (bform(s, sig.future, sig) >= 0.0)
    throw InputError("accordant_segment: direction is not future-pointing");

  const Vec3 xh = s.normalized();
  const Vec3 d = accordant_departure(xh, sig);
  GreatSegment seg{x, x.antipode(), {}};
  seg.samples.reserve(static_cast<size_t>(n));
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    const double t = pi * static_cast<double>(i) / static_cast<double>(n - 1);
    const Vec3 p = std::cos(t) * xh + std::sin(t) * d;
    seg.samples.push_back(DirPoint::embed_dir(p));
  }
  return seg;
}

double dist_to_accordant(const Vec3& u, const Vec3& attractor,
                         const MetricSignature& sig) {
  const Vec3 uh = u.normalized();
  const Vec3 xh = attractor.normalized();
  const Vec3 d = accordant_departure(xh, sig);
  const double p1 = uh.dot(xh);
  const double p2 = uh.dot(d);
  // Max of p1 cos(s) + p2 sin(s) over s in [0, pi]: the interior optimum when
  // p2 >= 0, otherwise an endpoint.
  const double m = (p2 >= 0.0) ? std::hypot(p1, p2) : std::abs(p1);
  return std::acos(clamp_unit(m));
}

}  // namespace margulis
