#include "cat0/treespace.hpp"

#include <algorithm>
#include <cmath>

#include "cat0/errors.hpp"

namespace cat0 {

namespace {

constexpr uint8_t k_all = 0b11111;

int popcount5(uint8_t m) { return __builtin_popcount(m); }

std::string side_str(uint8_t m) {
  std::string s;
  for (int leaf = 1; leaf <= 5; ++leaf) {
    if (m >> (leaf - 1) & 1) s += static_cast<char>('0' + leaf);
  }
  return s;
}

}  // namespace

Split Split::parse(const std::string& text) {
  const auto bar = text.find('|');
  if (bar == std::string::npos) fail(Errc::malformed_input, "split '" + text + "' lacks '|'");
  uint8_t sides[2] = {0, 0};
  size_t pos = 0;
  for (int part = 0; part < 2; ++part) {
    const size_t end = part == 0 ? bar : text.size();
    for (; pos < end; ++pos) {
      const char ch = text[pos];
      if (ch < '1' || ch > '5')
        fail(Errc::malformed_input, "split '" + text + "' has a leaf outside 1..5");
      const uint8_t bit = 1 << (ch - '1');
      if ((sides[part] | sides[1 - part]) & bit)
        fail(Errc::malformed_input, "split '" + text + "' repeats leaf " + ch);
      sides[part] |= bit;
    }
    pos = bar + 1;
  }
  if ((sides[0] | sides[1]) != k_all)
    fail(Errc::malformed_input, "split '" + text + "' does not cover {1..5}");
  if (popcount5(sides[0]) < 2 || popcount5(sides[1]) < 2)
    fail(Errc::malformed_input, "split '" + text + "' has a side smaller than 2");
  return {static_cast<uint8_t>(sides[0] & 1 ? sides[0] : sides[1])};
}

std::string Split::str() const {
  return side_str(side1) + "|" + side_str(static_cast<uint8_t>(k_all & ~side1));
}

const std::vector<Split>& Split::all() {
  static const std::vector<Split> splits = [] {
    std::vector<Split> out;
    // Two-element subsets of {1..5} in lexicographic order; each subset or
    // its complement is the leaf-1 side.
    for (int a = 1; a <= 5; ++a) {
      for (int b = a + 1; b <= 5; ++b) {
        const uint8_t pair = static_cast<uint8_t>((1 << (a - 1)) | (1 << (b - 1)));
        out.push_back({static_cast<uint8_t>(pair & 1 ? pair : k_all & ~pair)});
      }
    }
    return out;
  }();
  return splits;
}

bool splits_compatible(Split a, Split b) {
  const uint8_t a1 = a.side1, a2 = k_all & ~a.side1;
  const uint8_t b1 = b.side1, b2 = k_all & ~b.side1;
  return (a1 & b1) == 0 || (a1 & b2) == 0 || (a2 & b1) == 0 || (a2 & b2) == 0;
}

SingleVertexComplex build_t5() {
  const auto& splits = Split::all();
  std::vector<std::string> rays;
  rays.reserve(splits.size());
  for (const auto& s : splits) rays.push_back(s.str());
  std::vector<ConeSpec> cones;
  int shape = 0;
  for (size_t i = 0; i < splits.size(); ++i) {
    for (size_t j = i + 1; j < splits.size(); ++j) {
      if (!splits_compatible(splits[i], splits[j])) continue;
      cones.push_back({"q" + std::to_string(shape++), rays[i], rays[j], k_pi / 2});
    }
  }
  return build_single_vertex(rays, cones);
}

ConePoint tree_to_point(const SingleVertexComplex& t5, const Tree5& t) {
  if (t.s1 == t.s2 || !splits_compatible(t.s1, t.s2))
    fail(Errc::incompatible_splits, "splits " + t.s1.str() + " and " + t.s2.str() +
                                        " do not form a tree shape");
  if (t.len1 < 0 || t.len2 < 0)
    fail(Errc::point_not_in_complex, "tree edge lengths must be nonnegative");
  const int r1 = t5.ray(t.s1.str());
  const int r2 = t5.ray(t.s2.str());
  int cone = -1;
  for (int ci = 0; ci < static_cast<int>(t5.cones.size()); ++ci) {
    const auto& c = t5.cones[ci];
    if ((c.r0 == r1 && c.r1 == r2) || (c.r0 == r2 && c.r1 == r1)) {
      cone = ci;
      break;
    }
  }
  if (cone < 0) fail(Errc::incompatible_splits, "no cone for the given tree shape");

  // Cartesian (len1 along ray(s1), len2 along ray(s2)) in the quadrant.
  const bool first_is_s1 = t5.cones[cone].r0 == r1;
  const double x = first_is_s1 ? t.len1 : t.len2;
  const double y = first_is_s1 ? t.len2 : t.len1;
  if (x == 0 && y == 0) return ConePoint::at_origin();
  if (y == 0) return ConePoint::on_ray(t5.cones[cone].r0, x);
  if (x == 0) return ConePoint::on_ray(t5.cones[cone].r1, y);
  return ConePoint::in_cone(cone, std::atan2(y, x), std::hypot(x, y));
}

double bhv_distance(const SingleVertexComplex& t5, const Tree5& a, const Tree5& b) {
  const ConePoint pa = tree_to_point(t5, a);
  const ConePoint pb = tree_to_point(t5, b);
  if (pa.origin && pb.origin) return 0.0;
  return geodesic(t5, pa, pb).length;
}

}  // namespace cat0
