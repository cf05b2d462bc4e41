#include "margulis/ruled.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace margulis {

namespace {

double chord_height(double mu, double r) {
  return mu * r / std::sqrt(1.0 - r * r);
}

Vec3 apply_phi_coords(const Vec3& p, double mu, double t) {
  const Mat4 m = phi_mat4(mu, t);
  return (m * p.homogeneous()).head<3>();
}

}  // namespace

RuledSpec::RuledSpec(double mu_, double kappa1_, double kappa2_, double s0_,
                     double r0_, std::vector<Vec2> table_)
    : mu(mu_), kappa1(kappa1_), kappa2(kappa2_), s0(s0_), r0(r0_),
      table(std::move(table_)) {
  if (!(mu > 0.0)) throw InputError("RuledSpec: mu must be positive");
  if (!(0.0 < kappa1 && kappa1 <= kappa2 && kappa2 < 1.0)) {
    throw InputError("RuledSpec: need 0 < kappa1 <= kappa2 < 1");
  }
  if (!(s0 > 0.0)) throw InputError("RuledSpec: s0 must be positive");
  if (!(0.0 < r0 && r0 < 1.0)) throw InputError("RuledSpec: r0 must lie in (0,1)");
  if (table.empty()) return;
  if (table.size() < 2) throw InputError("RuledSpec: profile table needs >= 2 rows");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double r = table[i](0);
    if (!(0.0 < r && r < 1.0)) {
      throw InputError("RuledSpec: table radii must lie in (0,1)");
    }
    if (i > 0 && !(table[i](0) > table[i - 1](0))) {
      throw InputError("RuledSpec: table radii must be strictly increasing");
    }
    if (i > 0 && !(table[i](1) > table[i - 1](1))) {
      throw InputError("RuledSpec: profile must be strictly increasing");
    }
  }
  for (const Vec2& row : table) {
    const double lo = kappa1 * chord_height(mu, row(0));
    const double hi = kappa2 * chord_height(mu, row(0));
    if (row(1) < lo || row(1) > hi) {
      valid = false;
      std::ostringstream os;
      os << "profile leaves the band at r = " << row(0) << ": f = " << row(1)
         << ", band [" << lo << ", " << hi << "]";
      violation = os.str();
      break;
    }
  }
}

RuledSpec RuledSpec::standard(double mu_) {
  return RuledSpec(mu_, 0.25, 0.75, 1.0, 0.5);
}

double RuledSpec::f(double r) const {
  if (!(0.0 < r && r < 1.0)) throw InputError("RuledSpec::f: r must lie in (0,1)");
  if (table.empty()) return midline_coef() * chord_height(mu, r);
  if (r < table.front()(0) || r > table.back()(0)) {
    throw InputError("RuledSpec::f: r outside the profile table range");
  }
  auto it = std::lower_bound(table.begin(), table.end(), r,
                             [](const Vec2& row, double x) { return row(0) < x; });
  if (it == table.begin()) return (*it)(1);
  const Vec2& hi = *it;
  const Vec2& lo = *(it - 1);
  const double w = (r - lo(0)) / (hi(0) - lo(0));
  return lo(1) + w * (hi(1) - lo(1));
}

double RuledSpec::fprime(double r) const {
  if (table.empty()) {
    return midline_coef() * mu * std::pow(1.0 - r * r, -1.5);
  }
  const double lo = table.front()(0), hi = table.back()(0);
  double h = 1e-5;
  h = std::min({h, (r - lo) > 0 ? (r - lo) : h, (hi - r) > 0 ? (hi - r) : h});
  if (!(h > 0.0)) h = 1e-7;
  const double a = std::max(lo, r - h), b = std::min(hi, r + h);
  return (f(b) - f(a)) / (b - a);
}

std::optional<double> RuledSpec::finv(double y) const {
  if (table.empty()) {
    if (!(y > 0.0)) return std::nullopt;
    const double K = midline_coef() * mu;
    return y / std::sqrt(K * K + y * y);
  }
  if (y < table.front()(1) || y > table.back()(1)) return std::nullopt;
  double lo = table.front()(0), hi = table.back()(0);
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Vec3 line_l(const RuledSpec& spec, double r, double s) {
  if (!(0.0 < r && r < 1.0)) throw InputError("line_l: r must lie in (0,1)");
  return Vec3(s * r, spec.f(r), s * std::sqrt(1.0 - r * r));
}

double triple_product(const RuledSpec& spec, double r, double s) {
  const double c = std::sqrt(1.0 - r * r);
  return c * (spec.mu * r / c - spec.f(r)) * spec.fprime(r) + s * s;
}

namespace {

SurfaceMesh grid_mesh(int nu, int nv,
                      const std::function<Vec3(int, int)>& vertex,
                      const std::function<Vec3(int, int)>& attribute) {
  if (nu < 2 || nv < 2) throw InputError("mesh sampling counts must be >= 2");
  SurfaceMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nu) * nv);
  mesh.attributes.reserve(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      mesh.vertices.push_back(vertex(i, j));
      mesh.attributes.push_back(attribute(i, j));
    }
  }
  for (int i = 0; i + 1 < nu; ++i) {
    for (int j = 0; j + 1 < nv; ++j) {
      const int k = i * nv + j;
      mesh.triangles.push_back({k, k + nv, k + 1});
      mesh.triangles.push_back({k + 1, k + nv, k + nv + 1});
    }
  }
  return mesh;
}

}  // namespace

SurfaceMesh surface_sample(const RuledSpec& spec, double r, const Vec2& tRange,
                           const Vec2& sRange, int nt, int ns) {
  if (!(0.0 < r && r < 1.0)) throw InputError("surface_sample: r must lie in (0,1)");
  auto tAt = [&](int i) {
    return tRange(0) + (tRange(1) - tRange(0)) * i / double(nt - 1);
  };
  auto sAt = [&](int j) {
    return sRange(0) + (sRange(1) - sRange(0)) * j / double(ns - 1);
  };
  return grid_mesh(
      nt, ns,
      [&](int i, int j) {
        return apply_phi_coords(line_l(spec, r, sAt(j)), spec.mu, tAt(i));
      },
      [&](int i, int j) { return Vec3(r, tAt(i), sAt(j)); });
}

SurfaceMesh leaf_D(const RuledSpec& spec, double t, const Vec2& rRange,
                   const Vec2& sRange, int nr, int ns) {
  if (!(0.0 < rRange(0) && rRange(0) <= rRange(1) && rRange(1) < 1.0)) {
    throw InputError("leaf_D: radius range must lie in (0,1)");
  }
  auto rAt = [&](int i) {
    return rRange(0) + (rRange(1) - rRange(0)) * i / double(nr - 1);
  };
  auto sAt = [&](int j) {
    return sRange(0) + (sRange(1) - sRange(0)) * j / double(ns - 1);
  };
  return grid_mesh(
      nr, ns,
      [&](int i, int j) {
        return apply_phi_coords(line_l(spec, rAt(i), sAt(j)), spec.mu, t);
      },
      [&](int i, int j) { return Vec3(rAt(i), t, sAt(j)); });
}

EmbedCertificate embeddedness_check(const RuledSpec& spec, double r, int grid) {
  if (!(0.0 < r && r < 1.0)) {
    throw InputError("embeddedness_check: r must lie in (0,1)");
  }
  if (grid < 1) throw InputError("embeddedness_check: grid must be positive");
  EmbedCertificate cert;
  const double a = r, c = std::sqrt(1.0 - r * r);
  cert.y0 = spec.f(r);
  cert.bound = chord_height(spec.mu, r);
  cert.heightBelowChord = cert.y0 < cert.bound;
  if (!cert.heightBelowChord) {
    std::ostringstream os;
    os << "anchor height " << cert.y0 << " reaches the chord bound "
       << cert.bound << " at r = " << r;
    cert.note = os.str();
  }
  // On the cylinder F2 = (s c)^2 - 2 mu y0 the line crosses at +-s; the two
  // crossings separate exactly when the cubic values differ.
  cert.minDeltaF3 = std::numeric_limits<double>::infinity();
  const double mu = spec.mu;
  for (int k = 1; k <= grid; ++k) {
    const double s = 2.0 * spec.s0 * k / grid;
    const double delta =
        std::abs(2.0 * s * (s * s * c * c * c - 3.0 * mu * cert.y0 * c +
                            3.0 * mu * mu * a));
    cert.minDeltaF3 = std::min(cert.minDeltaF3, delta);
  }
  cert.passed = cert.heightBelowChord && cert.minDeltaF3 > 0.0;
  if (cert.passed) cert.note = "separation certified on sampled levels";
  return cert;
}

namespace {

// Alignment defect of the pulled-back point with the ruling line of the
// radius matching its height; nullopt when the height leaves the profile.
std::optional<double> leaf_defect(const RuledSpec& spec, const Vec3& p,
                                  double t) {
  const Vec3 q = apply_phi_coords(p, spec.mu, -t);
  const std::optional<double> r = spec.finv(q(1));
  if (!r) return std::nullopt;
  return q(0) * std::sqrt(1.0 - *r * *r) - q(2) * *r;
}

}  // namespace

std::vector<double> leaf_solve(const RuledSpec& spec, const Vec3& p) {
  if (!p.allFinite()) throw InputError("leaf_solve: nonfinite point");
  const double tMax = 40.0;
  const int nScan = 4001;
  std::vector<double> roots;
  std::optional<double> prev;
  double prevT = -tMax;
  for (int i = 0; i < nScan; ++i) {
    const double t = -tMax + 2.0 * tMax * i / (nScan - 1);
    const std::optional<double> d = leaf_defect(spec, p, t);
    if (prev && d && ((*prev <= 0.0) != (*d <= 0.0))) {
      double lo = prevT, hi = t, dlo = *prev;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const std::optional<double> dm = leaf_defect(spec, p, mid);
        if (!dm) break;
        if ((dlo <= 0.0) == (*dm <= 0.0)) {
          lo = mid;
          dlo = *dm;
        } else {
          hi = mid;
        }
      }
      const double tRoot = 0.5 * (lo + hi);
      const Vec3 q = apply_phi_coords(p, spec.mu, -tRoot);
      const std::optional<double> r = spec.finv(q(1));
      if (r) {
        bool dup = false;
        for (double known : roots) dup = dup || std::abs(known - *r) < 1e-8;
        if (!dup) roots.push_back(*r);
      }
    }
    prev = d;
    prevT = t;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

Membership region_membership(const RuledSpec& spec, const Vec3& p) {
  const std::vector<double> roots = leaf_solve(spec, p);
  Membership m;
  if (roots.empty()) {
    m.inside = false;
    m.note = "outside foliation";
    return m;
  }
  m.r = roots.back();
  m.inside = m.r >= spec.r0 - 1e-12;
  m.note = roots.size() == 1 ? "unique leaf" : "multiple leaf radii";
  return m;
}

std::vector<DirPoint> line_dirpoints(const RuledSpec& spec, double r,
                                     int nSigma) {
  if (nSigma < 2) throw InputError("line_dirpoints: need >= 2 samples");
  std::vector<DirPoint> pts;
  pts.reserve(nSigma);
  const double y = spec.f(r);
  for (int k = 0; k < nSigma; ++k) {
    const double sigma = M_PI * (k + 0.5) / nSigma;
    pts.push_back(DirPoint::embed_affine(line_l(spec, r, y / std::tan(sigma))));
  }
  return pts;
}

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void mesh_export_obj(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("mesh_export_obj: cannot open " + path);
  for (const Vec3& v : mesh.vertices) {
    out << "v " << format_g17(v(0)) << ' ' << format_g17(v(1)) << ' '
        << format_g17(v(2)) << '\n';
  }
  for (const std::array<int, 3>& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out.flush()) throw InputError("mesh_export_obj: write failed");
}

void mesh_export_csv(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("mesh_export_csv: cannot open " + path);
  out << "r,t,s,x,y,z\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 a = i < mesh.attributes.size() ? mesh.attributes[i] : Vec3::Zero();
    const Vec3& v = mesh.vertices[i];
    out << format_g17(a(0)) << ',' << format_g17(a(1)) << ',' << format_g17(a(2))
        << ',' << format_g17(v(0)) << ',' << format_g17(v(1)) << ','
        << format_g17(v(2)) << '\n';
  }
  if (!out.flush()) throw InputError("mesh_export_csv: write failed");
}

SurfaceMesh mesh_import_obj(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("mesh_import_obj: cannot open " + path);
  SurfaceMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v(0) >> v(1) >> v(2))) {
        throw InputError("mesh_import_obj: malformed vertex line");
      }
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> t{};
      if (!(ls >> t[0] >> t[1] >> t[2])) {
        throw InputError("mesh_import_obj: malformed face line");
      }
      for (int& idx : t) idx -= 1;
      mesh.triangles.push_back(t);
    }
  }
  return mesh;
}

}  // namespace margulis
