#include "margulis/group.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace margulis {

namespace {

using json = nlohmann::ordered_json;

Vec3 disk_center_vec(const KleinDisk& disk) {
  const double r2 = disk.center.squaredNorm();
  if (r2 >= 1.0) throw InputError("KleinDisk: center outside the disk");
  return Vec3(disk.center(0), disk.center(1), 1.0) / std::sqrt(1.0 - r2);
}

void dfs_words(const GroupSpec& G, int lenMin, int lenMax, Word& w,
               std::vector<AffIso>& stack,
               const std::function<void(const Word&, const AffIso&)>& fn) {
  const int len = static_cast<int>(w.size());
  if (len >= lenMin) fn(w, stack.back());
  if (len == lenMax) return;
  const int nl = 2 * G.rank();
  for (int l = 0; l < nl; ++l) {
    if (!w.empty() && l == inverse_letter(w.back())) continue;
    w.push_back(l);
    stack.push_back(compose(stack[stack.size() - 1], G.letter_iso(l)));
    dfs_words(G, lenMin, lenMax, w, stack, fn);
    stack.pop_back();
    w.pop_back();
  }
}

}  // namespace

GroupSpec::GroupSpec(std::vector<Generator> gens, int certified)
    : generators(std::move(gens)), certifiedDepth(certified) {
  if (rank() < 2) throw InputError("GroupSpec: rank must be at least 2");
  std::set<std::string> labels;
  for (const auto& g : generators) {
    if (g.label.empty()) throw InputError("GroupSpec: empty label");
    if (!labels.insert(g.label).second)
      throw InputError("GroupSpec: duplicate label " + g.label);
    const IsoClass c = classify(g.g);
    if (c.tag == IsoClassTag::Elliptic)
      throw InputError("GroupSpec: generator " + g.label + " is elliptic");
  }
}

const AffIso& GroupSpec::letter_iso(int letter) const {
  if (letters_.size() != 2 * generators.size()) {
    letters_.clear();
    for (const auto& g : generators) {
      letters_.push_back(g.g);
      letters_.push_back(inverse(g.g));
    }
  }
  if (letter < 0 || letter >= static_cast<int>(letters_.size()))
    throw InputError("GroupSpec: letter out of range");
  return letters_[static_cast<size_t>(letter)];
}

Word inverse_word(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (int& l : r) l = inverse_letter(l);
  return r;
}

bool is_reduced(const Word& w) {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i + 1] == inverse_letter(w[i])) return false;
  return true;
}

bool is_cyclically_reduced(const Word& w) {
  if (!is_reduced(w)) return false;
  if (w.size() >= 2 && w.front() == inverse_letter(w.back())) return false;
  return true;
}

std::string word_label(const GroupSpec& G, const Word& w) {
  std::string s;
  for (const int l : w) {
    const std::string& label = G.generators[static_cast<size_t>(l / 2)].label;
    if (l % 2 == 0) {
      s += label;
    } else if (label.size() == 1 && std::islower(static_cast<unsigned char>(label[0]))) {
      s += static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    } else {
      s += label + "^-1";
    }
  }
  return s.empty() ? "1" : s;
}

Word parse_word(const GroupSpec& G, const std::string& text) {
  Word w;
  if (text == "1") return w;
  for (const char ch : text) {
    bool found = false;
    for (int i = 0; i < G.rank(); ++i) {
      const std::string& label = G.generators[static_cast<size_t>(i)].label;
      if (label.size() != 1)
        throw InputError("parse_word: multi-character labels not parseable");
      if (ch == label[0]) {
        w.push_back(2 * i);
        found = true;
        break;
      }
      if (ch == std::toupper(static_cast<unsigned char>(label[0]))) {
        w.push_back(2 * i + 1);
        found = true;
        break;
      }
    }
    if (!found)
      throw InputError(std::string("parse_word: unknown letter '") + ch + "'");
  }
  if (!is_reduced(w)) throw InputError("parse_word: word is not reduced");
  return w;
}

std::vector<Word> enumerate_words(int rank, int len) {
  if (len < 0) throw InputError("enumerate_words: negative length");
  std::vector<Word> out;
  if (len == 0) {
    out.push_back({});
    return out;
  }
  Word w;
  const int nl = 2 * rank;
  std::function<void()> rec = [&] {
    if (static_cast<int>(w.size()) == len) {
      out.push_back(w);
      return;
    }
    for (int l = 0; l < nl; ++l) {
      if (!w.empty() && l == inverse_letter(w.back())) continue;
      w.push_back(l);
      rec();
      w.pop_back();
    }
  };
  rec();
  return out;
}

void for_each_reduced_word(
    const GroupSpec& G, int lenMin, int lenMax,
    const std::function<void(const Word&, const AffIso&)>& fn) {
  if (lenMin < 0 || lenMax < lenMin)
    throw InputError("for_each_reduced_word: bad length range");
  Word w;
  std::vector<AffIso> stack{AffIso::identity()};
  dfs_words(G, lenMin, lenMax, w, stack, fn);
}

AffIso evaluate(const GroupSpec& G, const Word& w) {
  AffIso r;
  for (const int l : w) r = compose(r, G.letter_iso(l));
  return r;
}

std::vector<Word> conjugacy_class_reps(int rank, int maxLen) {
  std::vector<Word> reps;
  for (int len = 1; len <= maxLen; ++len) {
    for (const Word& w : enumerate_words(rank, len)) {
      if (!is_cyclically_reduced(w)) continue;
      const Word wi = inverse_word(w);
      bool minimal = true;
      for (int r = 0; r < len && minimal; ++r) {
        Word rot(w.begin() + r, w.end());
        rot.insert(rot.end(), w.begin(), w.begin() + r);
        if (rot < w && r > 0) minimal = false;
        Word roti(wi.begin() + r, wi.end());
        roti.insert(roti.end(), wi.begin(), wi.begin() + r);
        if (roti < w) minimal = false;
      }
      if (minimal) reps.push_back(w);
    }
  }
  return reps;
}

std::pair<DirPoint, DirPoint> boundary_fixed_points(const AffIso& g) {
  const IsoClass c = classify(g);
  if (c.tag == IsoClassTag::Elliptic)
    throw InputError("boundary_fixed_points: elliptic isometry");
  if (c.tag == IsoClassTag::Hyperbolic)
    return {DirPoint::embed_dir(c.xp.normalized()),
            DirPoint::embed_dir(c.xm.normalized())};
  const Vec3 x = c.xgamma.normalized();
  return {DirPoint::embed_dir(x), DirPoint::embed_dir(x)};
}

double axis_distance(const AffIso& g, const KleinDisk& disk) {
  const HyperbolicData e = hyperbolic_eigendata(g);
  const Vec3 m = disk_center_vec(disk);
  return std::asinh(std::abs(bform(m, e.x0)));
}

std::vector<Word> gamma_K_filter(const GroupSpec& G,
                                 const std::vector<Word>& words,
                                 const KleinDisk& disk,
                                 const std::vector<Horodisk>* horodisks) {
  const Vec3 m = disk_center_vec(disk);
  if (horodisks) {
    for (const auto& h : *horodisks) {
      if (h.level <= 0.0) throw InputError("Horodisk: level must be positive");
      const double inner = -bform(m, h.boundaryPoint);
      if (inner <= 0.0)
        throw InputError("Horodisk: boundary point not future null");
      if (std::log(inner / h.level) <= disk.radius)
        throw InputError("gamma_K_filter: disk meets the horodisk system");
    }
  }
  std::vector<Word> out;
  for (const Word& w : words) {
    const AffIso g = evaluate(G, w);
    if (classify(g).tag != IsoClassTag::Hyperbolic) continue;
    if (axis_distance(g, disk) <= disk.radius) out.push_back(w);
  }
  return out;
}

ScanReport positivity_scan(const GroupSpec& G, int maxLen, bool keepRows) {
  if (maxLen < 1) throw InputError("positivity_scan: maxLen must be positive");
  ScanReport rep;
  rep.maxLen = maxLen;
  rep.minAlphaHyperbolic = std::numeric_limits<double>::infinity();
  for (const Word& w : conjugacy_class_reps(G.rank(), maxLen)) {
    const AffIso g = evaluate(G, w);
    const IsoClass c = classify(g);
    ScanRow row;
    row.word = word_label(G, w);
    row.cls = to_string(c.tag);
    if (c.tag == IsoClassTag::Hyperbolic) {
      ++rep.hyperbolicCount;
      const double a = alpha(g);
      row.lambda1_or_mu = c.lambda1;
      row.alpha_or_sign = a;
      if (a < rep.minAlphaHyperbolic) {
        rep.minAlphaHyperbolic = a;
        rep.minAlphaWord = row.word;
      }
      if (a <= 1e-12) rep.violations.push_back(row.word);
    } else if (c.tag == IsoClassTag::Parabolic) {
      ++rep.parabolicCount;
      const CDReport cd = cd_sign(g);
      double mu = 0.0;
      if (cd.sign != CDSign::Zero) mu = parabolic_normal_form(g).mu;
      row.lambda1_or_mu = mu;
      row.alpha_or_sign = (cd.sign == CDSign::Positive)
                              ? 1.0
                              : (cd.sign == CDSign::Negative ? -1.0 : 0.0);
      if (cd.sign != CDSign::Positive) rep.violations.push_back(row.word);
    } else {
      ++rep.ellipticCount;
      row.lambda1_or_mu = 0.0;
      row.alpha_or_sign = 0.0;
      rep.violations.push_back(row.word);
    }
    if (keepRows) rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::pair<AffIso, AffIso> example_linear_parts(ExampleKind kind) {
  Mat2 ma, mb;
  if (kind == ExampleKind::PuncturedTorus) {
    ma << 2, 1, 1, 1;
    mb << 1, 1, 1, 2;
  } else {
    ma << 1, 2, 0, 1;
    mb << 1, 0, 2, 1;
  }
  return {from_sl2(ma), from_sl2(mb)};
}

namespace {

GroupSpec make_spec(ExampleKind kind, const Vec3& ba, const Vec3& bb,
                    int certified) {
  auto [la, lb] = example_linear_parts(kind);
  std::vector<Generator> gens;
  gens.push_back({"a", AffIso(la.A, ba)});
  gens.push_back({"b", AffIso(lb.A, bb)});
  return GroupSpec(std::move(gens), certified);
}

// Minimum Margulis invariant over hyperbolic class representatives, or
// nullopt when any parabolic representative fails positivity.
std::optional<double> cocycle_margin(const GroupSpec& G,
                                     const std::vector<Word>& reps) {
  double mn = std::numeric_limits<double>::infinity();
  for (const Word& w : reps) {
    const AffIso g = evaluate(G, w);
    const IsoClass c = classify(g);
    if (c.tag == IsoClassTag::Hyperbolic) {
      mn = std::min(mn, alpha(g));
    } else if (c.tag == IsoClassTag::Parabolic) {
      if (cd_sign(g).sign != CDSign::Positive) return std::nullopt;
    }
  }
  if (!(mn > 0.0)) return std::nullopt;
  return mn;
}

}  // namespace

GroupSpec example_group(ExampleKind kind, std::uint64_t cocycleSeed,
                        int trials) {
  std::mt19937_64 rng(cocycleSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::vector<Word> reps = conjugacy_class_reps(2, 6);

  double best = -std::numeric_limits<double>::infinity();
  Vec3 bestA = Vec3::Zero(), bestB = Vec3::Zero();
  for (int trial = 0; trial < trials; ++trial) {
    Vec3 ba, bb;
    for (int i = 0; i < 3; ++i) ba(i) = normal(rng);
    for (int i = 0; i < 3; ++i) bb(i) = normal(rng);
    const double n = std::sqrt(ba.squaredNorm() + bb.squaredNorm());
    ba /= n;
    bb /= n;
    const GroupSpec cand = make_spec(kind, ba, bb, 0);
    const auto margin = cocycle_margin(cand, reps);
    if (margin && *margin > best) {
      best = *margin;
      bestA = ba;
      bestB = bb;
    }
  }
  if (!(best > 0.0))
    throw InputError(
        "example_group: no positive cocycle found, try a different seed");

  GroupSpec G = make_spec(kind, bestA, bestB, 0);
  const ScanReport cert = positivity_scan(G, 8);
  if (!cert.violations.empty())
    throw InputError(
        "example_group: certification at depth 8 failed, try a different seed");
  G.certifiedDepth = 8;
  return G;
}

GroupSpec reference_deformation() {
  const Vec3 ba(-0.50870191, -0.38400016, -0.40201709);
  const Vec3 bb(-0.11408469, -0.64479995, -0.05801906);
  return make_spec(ExampleKind::PuncturedTorus, ba, bb, 8);
}

KleinDisk reference_disk() { return KleinDisk{Vec2::Zero(), 0.12}; }

GroupSpec group_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("group_from_json: ") + e.what());
  }
  if (!j.contains("generators") || !j["generators"].is_array())
    throw InputError("group_from_json: missing generators array");
  std::vector<Generator> gens;
  for (const auto& item : j["generators"]) {
    Generator gen;
    gen.label = item.at("label").get<std::string>();
    Mat3 A;
    const auto& rows = item.at("A");
    if (rows.size() != 3) throw InputError("group_from_json: A must be 3x3");
    for (int r = 0; r < 3; ++r) {
      if (rows[r].size() != 3)
        throw InputError("group_from_json: A must be 3x3");
      for (int c = 0; c < 3; ++c) A(r, c) = rows[r][c].get<double>();
    }
    Vec3 b;
    const auto& bj = item.at("b");
    if (bj.size() != 3) throw InputError("group_from_json: b must have 3 entries");
    for (int i = 0; i < 3; ++i) b(i) = bj[i].get<double>();
    try {
      gen.g = AffIso(A, b);
    } catch (const InputError& e) {
      throw InputError(std::string("group_from_json: generator ") + gen.label +
                       ": " + e.what());
    }
    gens.push_back(std::move(gen));
  }
  int certified = 0;
  if (j.contains("certified_depth")) certified = j["certified_depth"].get<int>();
  return GroupSpec(std::move(gens), certified);
}

std::string group_to_json(const GroupSpec& G) {
  json j;
  j["generators"] = json::array();
  for (const auto& gen : G.generators) {
    json item;
    item["label"] = gen.label;
    json A = json::array();
    for (int r = 0; r < 3; ++r) {
      json row = json::array();
      for (int c = 0; c < 3; ++c) row.push_back(gen.g.A(r, c));
      A.push_back(row);
    }
    item["A"] = A;
    json b = json::array();
    for (int i = 0; i < 3; ++i) b.push_back(gen.g.b(i));
    item["b"] = b;
    j["generators"].push_back(item);
  }
  if (G.certifiedDepth > 0) j["certified_depth"] = G.certifiedDepth;
  return j.dump(2) + "\n";
}

}  // namespace margulis
