#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace margulis {

template <class Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat2 = Eigen::Matrix2d;

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A signature (2,1) symmetric form together with a future-pointing timelike
// reference vector that selects the positive cone side.
struct MetricSignature {
  Mat3 J;
  Vec3 future;

  // diag(1,1,-1), future along the third axis.
  static const MetricSignature& standard();
  // the form y^2 - 2xz on coordinates (x,y,z), future along (1,0,1).
  static const MetricSignature& parabolic();
};

template <class DU, class DV>
typename DU::Scalar bform(const Eigen::MatrixBase<DU>& u,
                          const Eigen::MatrixBase<DV>& v) {
  return u(0) * v(0) + u(1) * v(1) - u(2) * v(2);
}

template <class DU, class DV, class DJ>
typename DU::Scalar bform(const Eigen::MatrixBase<DU>& u,
                          const Eigen::MatrixBase<DV>& v,
                          const Eigen::MatrixBase<DJ>& J) {
  return u.dot(J * v);
}

template <class DU, class DV>
typename DU::Scalar bform(const Eigen::MatrixBase<DU>& u,
                          const Eigen::MatrixBase<DV>& v,
                          const MetricSignature& sig) {
  return u.dot(sig.J * v);
}

// Unique w with bform(w, z) = det[u | v | z] for all z (standard signature).
// Equals J * (u x v) since J is its own inverse.
template <class DU, class DV>
Vec3T<typename DU::Scalar> lorentz_cross(const Eigen::MatrixBase<DU>& u,
                                         const Eigen::MatrixBase<DV>& v) {
  Vec3T<typename DU::Scalar> c = u.cross(v);
  c(2) = -c(2);
  return c;
}

enum class CausalClass {
  TimelikeFuture,
  TimelikePast,
  NullFuture,
  NullPast,
  Spacelike,
  Zero
};

CausalClass causal_class(const Vec3& v,
                         const MetricSignature& sig = MetricSignature::standard(),
                         double tau_null = 1e-10);

const char* to_string(CausalClass c);

// A point of the sphere of directions of R^4: a Euclidean-unit representative
// of a ray. Antipodes are distinct points.
class DirPoint {
 public:
  explicit DirPoint(const Vec4& v);
  static DirPoint embed_affine(const Vec3& p);  // ray of (p, 1)
  static DirPoint embed_dir(const Vec3& v);     // ray of (v, 0), at infinity

  const Vec4& rep() const { return v_; }
  Vec3 spatial() const { return v_.head<3>(); }
  double w() const { return v_(3); }
  DirPoint antipode() const;

 private:
  Vec4 v_;
};

double bdd_dist(const DirPoint& p, const DirPoint& q);
double bdd_dist(const DirPoint& p, const std::vector<DirPoint>& A);
double hausdorff_dist(const std::vector<DirPoint>& A,
                      const std::vector<DirPoint>& B);

// Closed great semicircle tangent to the boundary circle of the timelike
// directions at x, lying in the directions at infinity.
struct GreatSegment {
  DirPoint x;
  DirPoint ax;  // antipode of x
  std::vector<DirPoint> samples;
};

// Unit tangent at the null direction xnull to its direction circle, oriented
// counterclockwise as seen from the future side.
Vec3 accordant_departure(const Vec3& xnull,
                         const MetricSignature& sig = MetricSignature::standard());

GreatSegment accordant_segment(const DirPoint& x, int n,
                               const MetricSignature& sig = MetricSignature::standard());

// Angular distance from the ray of u to the closed accordant segment of the
// future null direction `attractor`, by the closed-form infimum.
double dist_to_accordant(const Vec3& u, const Vec3& attractor,
                         const MetricSignature& sig = MetricSignature::standard());

}  // namespace margulis
