#include "abc_rods/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>

namespace abc_rods {

BoundingSphere element_sphere(const SearchElement& e, double k_rs, double g_bar) {
  const Vec3 a = e.dofs.node_position(0);
  const Vec3 b = e.dofs.node_position(1);
  BoundingSphere s;
  s.center = 0.5 * (a + b);
  s.radius = (1.0 + k_rs) * 0.5 * (b - a).norm() + e.radius + 0.5 * g_bar;
  return s;
}

namespace {

bool share_node(const SearchElement& a, const SearchElement& b) {
  return a.nodes[0] == b.nodes[0] || a.nodes[0] == b.nodes[1] || a.nodes[1] == b.nodes[0] ||
         a.nodes[1] == b.nodes[1];
}

bool spheres_intersect(const BoundingSphere& a, const BoundingSphere& b) {
  return (a.center - b.center).norm() <= a.radius + b.radius;
}

struct Box {
  Vec3 lo;
  Vec3 hi;
  bool overlaps(const Vec3& c, double r) const {
    for (int k = 0; k < 3; ++k)
      if (c[k] + r < lo[k] || c[k] - r > hi[k]) return false;
    return true;
  }
};

struct OctreeNode {
  Box box;
  std::vector<int> items;
  std::array<std::unique_ptr<OctreeNode>, 8> children;
  bool leaf() const { return !children[0]; }
};

class Octree {
 public:
  Octree(const std::vector<BoundingSphere>& spheres, int capacity, int max_depth)
      : spheres_(spheres), capacity_(capacity), max_depth_(max_depth) {
    Box box{Vec3::Constant(1e300), Vec3::Constant(-1e300)};
    for (const auto& s : spheres) {
      box.lo = box.lo.cwiseMin(s.center - Vec3::Constant(s.radius));
      box.hi = box.hi.cwiseMax(s.center + Vec3::Constant(s.radius));
    }
    root_.box = box;
    for (int i = 0; i < static_cast<int>(spheres.size()); ++i) root_.items.push_back(i);
    split(root_, 0);
  }

  template <class F>
  void for_each_leaf(F&& f) const {
    visit(root_, f);
  }

 private:
  void split(OctreeNode& node, int depth) {
    if (static_cast<int>(node.items.size()) <= capacity_ || depth >= max_depth_) return;
    const Vec3 mid = 0.5 * (node.box.lo + node.box.hi);
    for (int c = 0; c < 8; ++c) {
      auto child = std::make_unique<OctreeNode>();
      for (int k = 0; k < 3; ++k) {
        const bool upper = (c >> k) & 1;
        child->box.lo[k] = upper ? mid[k] : node.box.lo[k];
        child->box.hi[k] = upper ? node.box.hi[k] : mid[k];
      }
      for (int i : node.items)
        if (child->box.overlaps(spheres_[i].center, spheres_[i].radius)) child->items.push_back(i);
      node.children[c] = std::move(child);
    }
    // Stop if splitting does not separate anything.
    bool useful = false;
    for (const auto& ch : node.children) useful = useful || ch->items.size() < node.items.size();
    if (!useful) {
      for (auto& ch : node.children) ch.reset();
      return;
    }
    node.items.clear();
    for (auto& ch : node.children) split(*ch, depth + 1);
  }

  template <class F>
  void visit(const OctreeNode& node, F& f) const {
    if (node.leaf()) {
      f(node.items);
      return;
    }
    for (const auto& ch : node.children) visit(*ch, f);
  }

  const std::vector<BoundingSphere>& spheres_;
  int capacity_;
  int max_depth_;
  OctreeNode root_;
};

}  // namespace

std::vector<std::pair<int, int>> stage1_octree(const std::vector<SearchElement>& elements, double k_rs, double g_bar,
                                               int leaf_capacity, int max_depth) {
  std::vector<BoundingSphere> spheres;
  spheres.reserve(elements.size());
  for (const auto& e : elements) spheres.push_back(element_sphere(e, k_rs, g_bar));
  std::set<std::pair<int, int>> found;
  if (!elements.empty()) {
    Octree tree(spheres, leaf_capacity, max_depth);
    tree.for_each_leaf([&](const std::vector<int>& items) {
      for (size_t a = 0; a < items.size(); ++a)
        for (size_t b = a + 1; b < items.size(); ++b) {
          const int i = std::min(items[a], items[b]);
          const int j = std::max(items[a], items[b]);
          if (share_node(elements[i], elements[j])) continue;
          if (spheres_intersect(spheres[i], spheres[j])) found.emplace(i, j);
        }
    });
  }
  return {found.begin(), found.end()};
}

std::vector<std::pair<int, int>> stage1_brute_force(const std::vector<SearchElement>& elements, double k_rs,
                                                    double g_bar) {
  std::vector<std::pair<int, int>> out;
  for (size_t i = 0; i < elements.size(); ++i)
    for (size_t j = i + 1; j < elements.size(); ++j) {
      if (share_node(elements[i], elements[j])) continue;
      if (spheres_intersect(element_sphere(elements[i], k_rs, g_bar), element_sphere(elements[j], k_rs, g_bar)))
        out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  return out;
}

double cylinder_radius(double k_cyl, double beta_max_deg, double segment_length) {
  return k_cyl * std::tan(deg_to_rad(beta_max_deg)) * 0.5 * segment_length;
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return rad_to_deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

}  // namespace

std::vector<SearchSegment> subdivide(const SearchElement& e, double beta_max_deg, double k_cyl, int max_segments) {
  for (int n = 1; n <= max_segments; n *= 2) {
    std::vector<SearchSegment> segs;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      SearchSegment s;
      s.element = e.id;
      s.index = j;
      s.count = n;
      s.xi_a = -1.0 + 2.0 * j / n;
      s.xi_b = j == n - 1 ? 1.0 : -1.0 + 2.0 * (j + 1) / n;
      s.a = interpolate(e.dofs, s.xi_a, 0);
      s.b = interpolate(e.dofs, s.xi_b, 0);
      const Vec3 chord = s.b - s.a;
      const double len = chord.norm();
      if (len == 0.0) throw SingularConfiguration("degenerate search segment");
      const double bl = angle_between(chord, interpolate(e.dofs, s.xi_a, 1));
      const double br = angle_between(chord, interpolate(e.dofs, s.xi_b, 1));
      s.beta_max_deg = std::max(bl, br);
      s.half_length = 0.5 * len;
      s.r_cyl = cylinder_radius(k_cyl, beta_max_deg, len);
      if (s.beta_max_deg >= beta_max_deg) ok = false;
      segs.push_back(s);
    }
    if (ok) return segs;
  }
  throw ContactEvaluationError("search segment count exceeds the cap; element deformation is pathological");
}

std::pair<double, double> segment_closest_params(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  const double c = d1.dot(r);
  const double b = d1.dot(d2);
  const double den = a * e - b * b;
  double s = den > 1e-14 * a * e ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  return {s, t};
}

std::vector<ContactCandidate> stage2_segments(const SearchElement& e1, const std::vector<SearchSegment>& s1,
                                              const SearchElement& e2, const std::vector<SearchSegment>& s2,
                                              const SearchConfig& cfg) {
  std::vector<ContactCandidate> out;
  for (const auto& a : s1) {
    for (const auto& b : s2) {
      const auto [s, t] = segment_closest_params(a.a, a.b, b.a, b.b);
      const double dist = ((a.a + s * (a.b - a.a)) - (b.a + t * (b.b - b.a))).norm();
      const double cutoff = e1.radius + e2.radius + cfg.g_bar + a.r_cyl + b.r_cyl;
      if (dist > cutoff) continue;
      ContactCandidate c;
      c.element1 = e1.id;
      c.element2 = e2.id;
      c.segment1 = a.index;
      c.segment2 = b.index;
      double g = angle_between(a.b - a.a, b.b - b.a);
      c.gamma_deg = g > 90.0 ? 180.0 - g : g;
      c.point = c.gamma_deg > cfg.alpha1_deg - 2.0 * cfg.beta_max_deg;
      c.line = c.gamma_deg < cfg.alpha2_deg + 2.0 * cfg.beta_max_deg;
      c.xi0 = 0.5 * (a.xi_a + a.xi_b);
      c.eta0 = 0.5 * (b.xi_a + b.xi_b);
      c.axis_distance = dist;
      out.push_back(c);
    }
  }
  return out;
}

SearchResult contact_search(const std::vector<SearchElement>& elements, const SearchConfig& cfg) {
  SearchResult res;
  res.stage1_pairs = stage1_octree(elements, cfg.k_rs, cfg.g_bar, cfg.leaf_capacity, cfg.max_depth);
  std::map<int, std::vector<SearchSegment>> segments;
  auto segs_of = [&](int i) -> const std::vector<SearchSegment>& {
    auto it = segments.find(i);
    if (it == segments.end())
      it = segments.emplace(i, subdivide(elements[i], cfg.beta_max_deg, cfg.k_cyl, cfg.max_segments)).first;
    return it->second;
  };
  for (const auto& [i, j] : res.stage1_pairs) {
    const auto cands = stage2_segments(elements[i], segs_of(i), elements[j], segs_of(j), cfg);
    if (cands.empty()) continue;
    PairCandidate pc;
    pc.element1 = elements[i].id;
    pc.element2 = elements[j].id;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
      pc.point = pc.point || c.point;
      pc.line = pc.line || c.line;
      pc.gamma_min = std::min(pc.gamma_min, c.gamma_deg);
      pc.gamma_max = std::max(pc.gamma_max, c.gamma_deg);
      if (c.axis_distance < best) {
        best = c.axis_distance;
        pc.xi0 = c.xi0;
        pc.eta0 = c.eta0;
      }
      res.candidates.push_back(c);
    }
    res.pairs.push_back(pc);
  }
  return res;
}

}  // namespace abc_rods
