#pragma once

#include "margulis/group.hpp"

namespace margulis {

// Point of the unit tangent bundle of the disk of future timelike
// directions, represented by an SO(2,1) matrix moving the base pair
// (third axis direction, second axis tangent) to it.
struct UTBPoint {
  Mat3 g;
  explicit UTBPoint(const Mat3& m, bool validate = true);
  static UTBPoint base() { return UTBPoint(Mat3::Identity(), false); }
};

DirPoint base_point(const UTBPoint& p);
Vec3 base_direction(const UTBPoint& p);

struct FiberFrame {
  Vec3 v_plus, v_zero, v_minus;
};

FiberFrame frame_at(const UTBPoint& p);

// Geodesic flow: right multiplication by the standard boost.
Mat3 boost_mat(double t);
UTBPoint flow(const UTBPoint& p, double t);

// Coordinates of w in the fiber frame, solved with column equilibration so
// each coordinate keeps full relative accuracy.
Vec3 frame_coordinates(const FiberFrame& f, const Vec3& w);

// Half-plane chart of the disk of timelike directions.
Vec3 halfplane_to_klein3(double x, double y);  // representative with third coordinate 1
DirPoint halfplane_to_klein(double x, double y);
Vec2 klein_chart(const DirPoint& p);
double halfplane_dist(const Vec2& z1, const Vec2& z2);
double klein_dist(const Vec3& u, const Vec3& v);  // timelike representatives

// Frame adapted to the invariant geodesic of a hyperbolic isometry at the
// point nearest the chart origin: F columns are (normal, tangent toward the
// attractor, base point).
struct AxisBasis {
  Vec3 p, u, w0;
  Mat3 F;
};

AxisBasis axis_point_nearest_origin(const AffIso& g);

struct CocycleDecomp {
  double b_plus = 0.0, b_zero = 0.0, b_minus = 0.0;  // frame coordinates
  double norm_plus_E = 0.0, norm_zero_E = 0.0, norm_minus_E = 0.0;
  FiberFrame frame;
  Vec3 b = Vec3::Zero();
};

// Decomposes the translation part in the fiber frame at the axis point
// nearest the origin, moved along the axis by axisOffset.
CocycleDecomp cocycle_decompose(const AffIso& g, double axisOffset = 0.0);
CocycleDecomp cocycle_decompose(const GroupSpec& G, const Word& w,
                                double axisOffset = 0.0);

// Reconstructs the translation part as the axis segment integral of the
// one-parameter interpolation plus the section term, by composite Simpson
// quadrature. Throws when the Richardson error estimate exceeds 1e-5.
Vec3 integrate_cocycle(const AffIso& g, int nSteps);
Vec3 integrate_cocycle(const GroupSpec& G, const Word& w, int nSteps);

struct CuspProjections {
  double norm0 = 0.0, normm = 0.0, normp = 0.0;   // Euclidean projection norms
  double c_zero = 0.0, c_minus = 0.0, c_plus = 0.0;  // frame coordinates
};

// Euclidean norms of the fiber frame projections of k * (0,1,1) at the
// horodisk entry of the radius R geodesic through the standard cusp.
CuspProjections cusp_projections(double R, double k);

struct CuspSegment {
  Vec3 b_minus_vec = Vec3::Zero();
  double alpha_contrib = 0.0;
  Vec3 b_minus_quad = Vec3::Zero();
  double alpha_quad = 0.0;
  double frame_residual = 0.0;
};

// Closed-form segment contributions across the standard horodisk, with a
// Simpson quadrature cross-check.
CuspSegment cusp_segment_integrals(double R, double k, int nSteps = 4096);

struct LimitRow {
  std::string word;
  int length = 0;
  double l_klein = 0.0;
  double b_plus = 0.0, b_zero = 0.0, b_minus = 0.0;
  double norm_b_E = 0.0;
  double dist_to_zeta = 0.0;
};

struct BandSummary {
  int length = 0;
  int count = 0;
  double max_bminus_E = 0.0;
  double min_norm_E = 0.0;
  double max_dist = 0.0;
};

struct LimitTable {
  std::vector<LimitRow> rows;
  std::vector<BandSummary> bands;
};

// For every filtered hyperbolic word of length in [minLen, maxLen]:
// translation length, frame coordinates of the translation part, Euclidean
// norm, and distance of its direction to the accordant segment of the
// attractor. Band summaries aggregate per length.
LimitTable direction_limit_experiment(const GroupSpec& G, const KleinDisk& disk,
                                      int minLen, int maxLen,
                                      bool keepRows = false);

}  // namespace margulis
