#pragma once

#include "abc_rods/geometry.hpp"

#include <array>
#include <utility>
#include <vector>

namespace abc_rods {

struct SearchConfig {
  double k_rs = 0.1;
  double k_cyl = 1.1;
  double beta_max_deg = 1.0;
  int max_segments = 64;
  double alpha1_deg = 10.0;
  double alpha2_deg = 12.0;
  double g_bar = 0.0;  // regularization reach added to the proximity cutoff
  int leaf_capacity = 8;
  int max_depth = 12;
};

struct SearchElement {
  int id = 0;
  ElementDofs dofs;
  double radius = 0.0;
  std::array<int, 2> nodes{0, 0};
};

struct BoundingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

// r_m at the midpoint of the nodal positions, r_s = (1 + k_rs) |d2 - d1| / 2,
// inflated by the cross-section radius plus half the regularization reach so
// that surface proximity is enclosed.
BoundingSphere element_sphere(const SearchElement& e, double k_rs, double g_bar = 0.0);

// Element index pairs (i < j) whose spheres intersect; pairs sharing a node are excluded.
std::vector<std::pair<int, int>> stage1_octree(const std::vector<SearchElement>& elements, double k_rs,
                                               double g_bar = 0.0, int leaf_capacity = 8, int max_depth = 12);

// Brute-force reference for stage 1.
std::vector<std::pair<int, int>> stage1_brute_force(const std::vector<SearchElement>& elements, double k_rs,
                                                    double g_bar = 0.0);

struct SearchSegment {
  int element = 0;
  int index = 0;
  int count = 1;
  double xi_a = -1.0;
  double xi_b = 1.0;
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double half_length = 0.0;
  double r_cyl = 0.0;
  double beta_max_deg = 0.0;  // largest chord-tangent angle found
};

double cylinder_radius(double k_cyl, double beta_max_deg, double segment_length);

// Segments doubled until all chord-tangent angles are below beta_max.
std::vector<SearchSegment> subdivide(const SearchElement& e, double beta_max_deg, double k_cyl, int max_segments);

struct ContactCandidate {
  int element1 = 0;
  int element2 = 0;
  int segment1 = 0;
  int segment2 = 0;
  double gamma_deg = 0.0;
  bool point = false;
  bool line = false;
  double xi0 = 0.0;
  double eta0 = 0.0;
  double axis_distance = 0.0;
};

std::vector<ContactCandidate> stage2_segments(const SearchElement& e1, const std::vector<SearchSegment>& s1,
                                              const SearchElement& e2, const std::vector<SearchSegment>& s2,
                                              const SearchConfig& cfg);

// One entry per element pair with the union of classes and the start values
// of the closest segment pair.
struct PairCandidate {
  int element1 = 0;
  int element2 = 0;
  bool point = false;
  bool line = false;
  double xi0 = 0.0;
  double eta0 = 0.0;
  double gamma_min = 90.0;
  double gamma_max = 0.0;
};

struct SearchResult {
  std::vector<std::pair<int, int>> stage1_pairs;
  std::vector<ContactCandidate> candidates;
  std::vector<PairCandidate> pairs;
};

SearchResult contact_search(const std::vector<SearchElement>& elements, const SearchConfig& cfg);

// Closest points of two finite segments; returns (s, t) in [0, 1]^2.
std::pair<double, double> segment_closest_params(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

}  // namespace abc_rods
