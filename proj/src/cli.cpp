#include "margulis/cli.hpp"

#include "margulis/flow_bundle.hpp"
#include "margulis/ruled.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace margulis {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<double> split_numbers(const std::string& text, std::size_t count,
                                  const char* what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": cannot parse number '" + item + "'");
    }
  }
  if (vals.size() != count) {
    throw InputError(std::string(what) + ": expected " + std::to_string(count) +
                     " comma separated numbers");
  }
  return vals;
}

Vec3 parse_vec3(const std::string& text, const char* what) {
  const std::vector<double> v = split_numbers(text, 3, what);
  return Vec3(v[0], v[1], v[2]);
}

KleinDisk parse_disk(const std::string& text) {
  const std::vector<double> v = split_numbers(text, 3, "--khat");
  KleinDisk d;
  d.center = Vec2(v[0], v[1]);
  d.radius = v[2];
  return d;
}

ordered_json json_vec(const Vec3& v) {
  return ordered_json::array({v(0), v(1), v(2)});
}

std::string fmt(double x) { return format_g17(x); }

struct GroupOpts {
  std::string file;
  std::string example = "reference";
  std::uint64_t seed = 1;
};

void add_group_options(CLI::App* sub, GroupOpts& o) {
  sub->add_option("--group", o.file, "group spec JSON file");
  sub->add_option("--example", o.example,
                  "bundled example: reference, punctured-torus, thrice-punctured");
  sub->add_option("--seed", o.seed, "cocycle search seed for generated examples");
}

GroupSpec load_group(const GroupOpts& o) {
  if (!o.file.empty()) {
    std::ifstream in(o.file, std::ios::binary);
    if (!in) throw InputError("cannot open group file " + o.file);
    std::ostringstream buf;
    buf << in.rdbuf();
    return group_from_json(buf.str());
  }
  if (o.example == "reference") return reference_deformation();
  if (o.example == "punctured-torus") {
    return example_group(ExampleKind::PuncturedTorus, o.seed);
  }
  if (o.example == "thrice-punctured") {
    return example_group(ExampleKind::ThricePunctured, o.seed);
  }
  throw InputError("unknown example '" + o.example + "'");
}

struct RuledOpts {
  double mu = 1.0, kappa1 = 0.25, kappa2 = 0.75, s0 = 1.0, r0 = 0.5;
};

void add_ruled_options(CLI::App* sub, RuledOpts& o) {
  sub->add_option("--mu", o.mu, "parabolic parameter, positive");
  sub->add_option("--kappa1", o.kappa1, "lower band constant");
  sub->add_option("--kappa2", o.kappa2, "upper band constant");
  sub->add_option("--s0", o.s0, "line parameter scale");
  sub->add_option("--r0", o.r0, "region boundary radius");
}

// Writes to `out` when path is "-", else to the file.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& out) {
    if (path == "-") {
      stream_ = &out;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw InputError("cannot open output file " + path);
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }
  void finish(const char* what) {
    if (&file_ == stream_ && !file_.flush()) {
      throw InputError(std::string("write failed for ") + what);
    }
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

void emit(std::ostream& out, const ordered_json& j, bool jsonMode) {
  if (jsonMode) {
    out << j.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : j.items()) {
    if (value.is_number_float()) {
      out << key << ": " << fmt(value.get<double>()) << '\n';
    } else if (value.is_string()) {
      out << key << ": " << value.get<std::string>() << '\n';
    } else {
      out << key << ": " << value.dump() << '\n';
    }
  }
}

int run_classify(const GroupOpts& go, const std::string& wordText, bool jsonMode,
                 std::ostream& out) {
  const GroupSpec G = load_group(go);
  const Word w = parse_word(G, wordText);
  const AffIso g = evaluate(G, w);
  const IsoClass cls = classify(g);
  ordered_json j;
  j["word"] = word_label(G, w);
  j["class"] = to_string(cls.tag);
  j["identity"] = cls.identity;
  j["trace"] = cls.trace;
  j["confidence"] = cls.confidence;
  if (cls.tag == IsoClassTag::Hyperbolic) {
    const HyperbolicData eig = hyperbolic_eigendata(g);
    j["lambda1"] = eig.lambda1;
    j["ell_klein"] = eig.ell_klein;
    j["ell_ratio"] = eig.ell_ratio;
    j["alpha"] = alpha(g);
    j["xp"] = json_vec(eig.xp);
    j["xm"] = json_vec(eig.xm);
    j["x0"] = json_vec(eig.x0);
  } else if (cls.tag == IsoClassTag::Parabolic && !cls.identity) {
    j["xgamma"] = json_vec(cls.xgamma);
    const CDReport cd = cd_sign(g);
    j["cd_sign"] = to_string(cd.sign);
    try {
      const ParabolicNormalForm nf = parabolic_normal_form(g);
      j["mu"] = nf.mu;
      j["t"] = nf.t;
      j["t_sign"] = nf.tSignRaw;
      j["cyclic_properness"] = true;
    } catch (const InputError& e) {
      j["cyclic_properness"] = false;
      j["normal_form_error"] = e.what();
    }
  }
  emit(out, j, jsonMode);
  return 0;
}

int run_frame(const std::string& nilpotentText, const GroupOpts& go,
              const std::string& wordText, bool jsonMode, std::ostream& out) {
  ordered_json j;
  if (!nilpotentText.empty()) {
    const std::vector<double> v = split_numbers(nilpotentText, 9, "--nilpotent");
    Mat3 N;
    N << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    const ParabolicFrame fr = canonical_frame(N);
    j["a"] = json_vec(fr.a);
    j["b"] = json_vec(fr.b);
    j["c"] = json_vec(fr.c);
    j["det_change_of_basis"] = fr.changeOfBasis.determinant();
  } else if (!wordText.empty()) {
    const GroupSpec G = load_group(go);
    const AffIso g = evaluate(G, parse_word(G, wordText));
    const ParabolicNormalForm nf = parabolic_normal_form(g);
    j["word"] = wordText;
    j["mu"] = nf.mu;
    j["t"] = nf.t;
    j["t_sign"] = nf.tSignRaw;
    j["a"] = json_vec(nf.frame.a);
    j["b"] = json_vec(nf.frame.b);
    j["c"] = json_vec(nf.frame.c);
    j["shift"] = json_vec(nf.shift);
  } else {
    throw InputError("frame: pass --nilpotent or --word");
  }
  emit(out, j, jsonMode);
  return 0;
}

int run_orbit(double mu, const std::string& pointText, double t0, double t1,
              int n, const std::string& outPath, std::ostream& out) {
  const Vec3 p = parse_vec3(pointText, "--point");
  const auto samples = orbit_curve(p, mu, t0, t1, n);
  OutputTarget target(outPath, out);
  std::ostream& os = target.stream();
  os << "t,x,y,z,F2,F3\n";
  for (const auto& [t, q] : samples) {
    os << fmt(t) << ',' << fmt(q(0)) << ',' << fmt(q(1)) << ',' << fmt(q(2))
       << ',' << fmt(F2(q, mu)) << ',' << fmt(F3(q, mu)) << '\n';
  }
  target.finish("orbit table");
  return 0;
}

ordered_json scan_summary_json(const ScanReport& rep) {
  ordered_json j;
  j["max_length"] = rep.maxLen;
  j["hyperbolic_classes"] = rep.hyperbolicCount;
  j["parabolic_classes"] = rep.parabolicCount;
  j["elliptic_classes"] = rep.ellipticCount;
  j["min_alpha_hyperbolic"] = rep.minAlphaHyperbolic;
  j["min_alpha_word"] = rep.minAlphaWord;
  j["violations"] = ordered_json(rep.violations);
  return j;
}

int run_invariants(const GroupOpts& go, int maxLen, bool jsonMode,
                   std::ostream& out) {
  const GroupSpec G = load_group(go);
  const ScanReport rep = positivity_scan(G, maxLen, true);
  if (jsonMode) {
    ordered_json j = scan_summary_json(rep);
    ordered_json rows = ordered_json::array();
    for (const ScanRow& r : rep.rows) {
      rows.push_back(ordered_json{{"word", r.word},
                                  {"class", r.cls},
                                  {"lambda1_or_mu", r.lambda1_or_mu},
                                  {"alpha_or_sign", r.alpha_or_sign}});
    }
    j["rows"] = rows;
    out << j.dump(2) << '\n';
    return 0;
  }
  out << "word,class,lambda1_or_mu,alpha_or_sign\n";
  for (const ScanRow& r : rep.rows) {
    out << r.word << ',' << r.cls << ',' << fmt(r.lambda1_or_mu) << ','
        << fmt(r.alpha_or_sign) << '\n';
  }
  out << "min alpha " << fmt(rep.minAlphaHyperbolic) << " at "
      << rep.minAlphaWord << ", violations: " << rep.violations.size() << '\n';
  return 0;
}

int run_scan(const GroupOpts& go, int maxLen, bool jsonMode, std::ostream& out) {
  const GroupSpec G = load_group(go);
  const ScanReport rep = positivity_scan(G, maxLen, false);
  emit(out, scan_summary_json(rep), jsonMode);
  return 0;
}

int run_cocycle(const GroupOpts& go, const std::string& wordText, int steps,
                bool jsonMode, std::ostream& out) {
  const GroupSpec G = load_group(go);
  const Word w = parse_word(G, wordText);
  const AffIso g = evaluate(G, w);
  const CocycleDecomp dec = cocycle_decompose(g);
  const double a = alpha(g);
  const Vec3 quad = integrate_cocycle(g, steps);
  ordered_json j;
  j["word"] = word_label(G, w);
  j["b_plus"] = dec.b_plus;
  j["b_zero"] = dec.b_zero;
  j["b_minus"] = dec.b_minus;
  j["norm_plus_E"] = dec.norm_plus_E;
  j["norm_zero_E"] = dec.norm_zero_E;
  j["norm_minus_E"] = dec.norm_minus_E;
  j["alpha"] = a;
  j["b_zero_minus_alpha"] = dec.b_zero - a;
  j["quadrature"] = json_vec(quad);
  j["quadrature_residual"] = (quad - g.b).norm();
  emit(out, j, jsonMode);
  return 0;
}

int run_cusp_study(double rMin, double rMax, int n, double k,
                   const std::string& outPath, bool jsonMode,
                   std::ostream& out) {
  if (!(1.0 < rMin && rMin < rMax) || n < 2) {
    throw InputError("cusp-study: need 1 < rmin < rmax and n >= 2");
  }
  std::vector<double> Rs, n0, nm, np, bm, ac;
  for (int i = 0; i < n; ++i) {
    const double R =
        std::exp(std::log(rMin) + (std::log(rMax) - std::log(rMin)) * i / (n - 1));
    const CuspProjections pr = cusp_projections(R, k);
    const CuspSegment seg = cusp_segment_integrals(R, k);
    Rs.push_back(R);
    n0.push_back(pr.norm0);
    nm.push_back(pr.normm);
    np.push_back(pr.normp);
    bm.push_back(seg.b_minus_vec.norm());
    ac.push_back(seg.alpha_contrib);
  }
  if (!outPath.empty()) {
    OutputTarget target(outPath, out);
    std::ostream& os = target.stream();
    os << "R,k,norm0,normm,normp,bminus_norm,alpha_contrib\n";
    for (std::size_t i = 0; i < Rs.size(); ++i) {
      os << fmt(Rs[i]) << ',' << fmt(k) << ',' << fmt(n0[i]) << ',' << fmt(nm[i])
         << ',' << fmt(np[i]) << ',' << fmt(bm[i]) << ',' << fmt(ac[i]) << '\n';
    }
    target.finish("cusp table");
  }
  std::vector<double> logR, log0, logm;
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    logR.push_back(std::log(Rs[i]));
    log0.push_back(std::log(n0[i]));
    logm.push_back(std::log(nm[i]));
  }
  ordered_json j;
  j["points"] = static_cast<int>(Rs.size());
  j["k"] = k;
  j["exponent_norm0"] = fit_slope(logR, log0);
  j["exponent_normm"] = fit_slope(logR, logm);
  j["max_bminus_norm_times_R"] = [&] {
    double m = 0;
    for (std::size_t i = 0; i < Rs.size(); ++i) m = std::max(m, bm[i] * Rs[i]);
    return m;
  }();
  j["max_abs_alpha_contrib"] = [&] {
    double m = 0;
    for (double v : ac) m = std::max(m, std::abs(v));
    return m;
  }();
  emit(out, j, jsonMode);
  return 0;
}

int run_limits(const GroupOpts& go, int minLen, int maxLen,
               const std::string& khat, const std::string& outPath,
               bool jsonMode, std::ostream& out) {
  const GroupSpec G = load_group(go);
  const KleinDisk disk = khat.empty() ? reference_disk() : parse_disk(khat);
  const LimitTable table = direction_limit_experiment(G, disk, minLen, maxLen, true);
  if (!outPath.empty()) {
    OutputTarget target(outPath, out);
    std::ostream& os = target.stream();
    os << "word,length,l_klein,b_plus,b_zero,b_minus,norm_b_E,dist_to_zeta\n";
    for (const LimitRow& r : table.rows) {
      os << r.word << ',' << r.length << ',' << fmt(r.l_klein) << ','
         << fmt(r.b_plus) << ',' << fmt(r.b_zero) << ',' << fmt(r.b_minus)
         << ',' << fmt(r.norm_b_E) << ',' << fmt(r.dist_to_zeta) << '\n';
    }
    target.finish("limits table");
  }
  if (jsonMode) {
    ordered_json bands = ordered_json::array();
    for (const BandSummary& b : table.bands) {
      bands.push_back(ordered_json{{"length", b.length},
                                   {"count", b.count},
                                   {"max_bminus_E", b.max_bminus_E},
                                   {"min_norm_E", b.min_norm_E},
                                   {"max_dist", b.max_dist}});
    }
    ordered_json j;
    j["rows"] = static_cast<int>(table.rows.size());
    j["bands"] = bands;
    out << j.dump(2) << '\n';
    return 0;
  }
  out << "length,count,max_bminus_E,min_norm_E,max_dist\n";
  for (const BandSummary& b : table.bands) {
    out << b.length << ',' << b.count << ',' << fmt(b.max_bminus_E) << ','
        << fmt(b.min_norm_E) << ',' << fmt(b.max_dist) << '\n';
  }
  return 0;
}

int run_surface(const RuledOpts& ro, double r, bool dLeaf, double tLeaf,
                const Vec2& tRange, const Vec2& sRange, const Vec2& rRange,
                int nt, int ns, int nr, const std::string& outPath,
                std::ostream& out) {
  const RuledSpec spec(ro.mu, ro.kappa1, ro.kappa2, ro.s0, ro.r0);
  const SurfaceMesh mesh =
      dLeaf ? leaf_D(spec, tLeaf, rRange, sRange, nr, ns)
            : surface_sample(spec, r, tRange, sRange, nt, ns);
  if (outPath.empty()) throw InputError("surface: --out is required");
  const bool csv = outPath.size() >= 4 &&
                   outPath.compare(outPath.size() - 4, 4, ".csv") == 0;
  if (csv) {
    mesh_export_csv(mesh, outPath);
  } else {
    mesh_export_obj(mesh, outPath);
  }
  out << "wrote " << mesh.vertices.size() << " vertices, "
      << mesh.triangles.size() << " triangles to " << outPath << '\n';
  return 0;
}

int run_region(const RuledOpts& ro, const std::string& pointText, bool jsonMode,
               std::ostream& out) {
  const RuledSpec spec(ro.mu, ro.kappa1, ro.kappa2, ro.s0, ro.r0);
  const Membership m = region_membership(spec, parse_vec3(pointText, "--point"));
  ordered_json j;
  j["inside"] = m.inside;
  if (m.note != "outside foliation") j["leaf_r"] = m.r;
  j["note"] = m.note;
  emit(out, j, jsonMode);
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"Margulis space-time toolkit: Lorentzian isometries, parabolic "
               "normal forms, Margulis invariants, geodesic-flow cocycles, "
               "cusp integrals and parabolic ruled surfaces"};
  app.name("margulis");
  app.require_subcommand(1);

  bool jsonMode = false;
  app.add_flag("--json", jsonMode, "machine readable JSON output");
  auto add_json_flag = [&jsonMode](CLI::App* sub) {
    sub->add_flag("--json", jsonMode, "machine readable JSON output");
  };

  GroupOpts groupOpts;
  std::string wordText, nilpotentText, pointText, khat, outPath;
  int maxLen = 6, minLen = 3, steps = 2048, n = 40, nt = 33, ns = 33, nr = 33;
  double mu = 1.0, t0 = -2.0, t1 = 2.0, rMin = 2.0, rMax = 100.0, k = 1.0;
  double r = 0.5, tLeaf = 0.0;
  Vec2 tRange(-1.0, 1.0), sRange(-2.0, 2.0), rRange(0.5, 0.9);
  RuledOpts ruledOpts;
  bool dLeaf = false;

  CLI::App* classify = app.add_subcommand("classify", "classify a group word");
  add_json_flag(classify);
  add_group_options(classify, groupOpts);
  classify->add_option("--word", wordText, "word in the generator labels")->required();

  CLI::App* frame = app.add_subcommand(
      "frame", "canonical basis of a nilpotent or the normal form of a word");
  add_json_flag(frame);
  add_group_options(frame, groupOpts);
  frame->add_option("--nilpotent", nilpotentText, "row-major 3x3 entries");
  frame->add_option("--word", wordText, "parabolic word");

  CLI::App* orbit = app.add_subcommand("orbit", "parabolic orbit curve samples");
  orbit->add_option("--mu", mu, "parabolic parameter");
  orbit->add_option("--point", pointText, "start point x,y,z")->required();
  orbit->add_option("--t0", t0, "window start");
  orbit->add_option("--t1", t1, "window end");
  orbit->add_option("--n", n, "sample count");
  orbit->add_option("--out", outPath, "CSV path, - for standard output")
      ->default_val("-");

  CLI::App* invariants = app.add_subcommand(
      "invariants", "invariant table over conjugacy class representatives");
  add_json_flag(invariants);
  add_group_options(invariants, groupOpts);
  invariants->add_option("--maxlen", maxLen, "maximum word length");

  CLI::App* scan = app.add_subcommand("scan", "positivity scan summary");
  add_json_flag(scan);
  add_group_options(scan, groupOpts);
  scan->add_option("--maxlen", maxLen, "maximum word length");

  CLI::App* cocycle = app.add_subcommand(
      "cocycle", "frame decomposition and quadrature of a translation part");
  add_json_flag(cocycle);
  add_group_options(cocycle, groupOpts);
  cocycle->add_option("--word", wordText, "hyperbolic word")->required();
  cocycle->add_option("--steps", steps, "quadrature intervals");

  CLI::App* cusp = app.add_subcommand(
      "cusp-study", "cusp form projections and segment integrals over a radius sweep");
  add_json_flag(cusp);
  cusp->add_option("--rmin", rMin, "smallest radius, > 1");
  cusp->add_option("--rmax", rMax, "largest radius");
  cusp->add_option("--n", n, "sweep points");
  cusp->add_option("--k", k, "proportionality coefficient");
  cusp->add_option("--out", outPath, "CSV path, - for standard output");

  CLI::App* limits = app.add_subcommand(
      "limits", "direction limit experiment over filtered words");
  add_json_flag(limits);
  add_group_options(limits, groupOpts);
  limits->add_option("--minlen", minLen, "smallest word length");
  limits->add_option("--maxlen", maxLen, "largest word length");
  limits->add_option("--khat", khat, "Klein disk cx,cy,r");
  limits->add_option("--out", outPath, "CSV path, - for standard output");

  CLI::App* surface = app.add_subcommand("surface", "sample a ruled surface leaf");
  add_ruled_options(surface, ruledOpts);
  surface->add_option("--r", r, "leaf radius in (0,1)");
  surface->add_flag("--dleaf", dLeaf, "sample the transversal leaf instead");
  surface->add_option("--t", tLeaf, "transversal leaf time");
  surface->add_option("--tmin", tRange(0), "flow window start");
  surface->add_option("--tmax", tRange(1), "flow window end");
  surface->add_option("--smin", sRange(0), "line window start");
  surface->add_option("--smax", sRange(1), "line window end");
  surface->add_option("--rmin", rRange(0), "radius window start (dleaf)");
  surface->add_option("--rmax", rRange(1), "radius window end (dleaf)");
  surface->add_option("--nt", nt, "flow samples");
  surface->add_option("--ns", ns, "line samples");
  surface->add_option("--nr", nr, "radius samples (dleaf)");
  surface->add_option("--out", outPath, "output path, .obj or .csv")->required();

  CLI::App* region = app.add_subcommand(
      "region", "parabolic region membership of a point");
  add_json_flag(region);
  add_ruled_options(region, ruledOpts);
  region->add_option("--point", pointText, "point x,y,z")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (classify->parsed()) return run_classify(groupOpts, wordText, jsonMode, out);
    if (frame->parsed()) {
      return run_frame(nilpotentText, groupOpts, wordText, jsonMode, out);
    }
    if (orbit->parsed()) return run_orbit(mu, pointText, t0, t1, n, outPath, out);
    if (invariants->parsed()) return run_invariants(groupOpts, maxLen, jsonMode, out);
    if (scan->parsed()) return run_scan(groupOpts, maxLen, jsonMode, out);
    if (cocycle->parsed()) {
      return run_cocycle(groupOpts, wordText, steps, jsonMode, out);
    }
    if (cusp->parsed()) {
      return run_cusp_study(rMin, rMax, n, k, outPath, jsonMode, out);
    }
    if (limits->parsed()) {
      return run_limits(groupOpts, minLen, maxLen, khat, outPath, jsonMode, out);
    }
    if (surface->parsed()) {
      return run_surface(ruledOpts, r, dLeaf, tLeaf, tRange, sRange, rRange, nt,
                         ns, nr, outPath, out);
    }
    if (region->parsed()) return run_region(ruledOpts, pointText, jsonMode, out);
    throw InputError("no command selected");
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace margulis
