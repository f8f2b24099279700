#include "texrad/directions.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <unordered_map>

#include "texrad/error.hpp"

namespace texrad {

namespace {

// Incremental Bowyer-Watson Delaunay triangulation inside a large super-triangle. Voronoi vertices
// are circumcenters of triangles that avoid the super-triangle's corners.
class Delaunay {
 public:
  Delaunay() {
    constexpr double s = 1e4;
    pts_ = {{-3 * s, -3 * s}, {3 * s, -3 * s}, {0, 3 * s}};
    tris_.push_back(make(0, 1, 2));
  }

  void insert(Vec2 p) {
    const int pi = static_cast<int>(pts_.size());
    pts_.push_back(p);
    std::vector<Tri> keep;
    std::vector<std::pair<int, int>> boundary;
    std::unordered_map<std::uint64_t, int> edge_uses;
    std::vector<Tri> bad;
    for (const Tri& t : tris_) {
      const Vec2 d = p - t.center;
      if (dot(d, d) < t.radius2) bad.push_back(t);
      else keep.push_back(t);
    }
    for (const Tri& t : bad) {
      for (int k = 0; k < 3; ++k) ++edge_uses[edge_key(t.v[k], t.v[(k + 1) % 3])];
    }
    for (const Tri& t : bad) {
      for (int k = 0; k < 3; ++k) {
        const int a = t.v[k], b = t.v[(k + 1) % 3];
        if (edge_uses[edge_key(a, b)] == 1) boundary.emplace_back(a, b);
      }
    }
    for (auto [a, b] : boundary) keep.push_back(make(a, b, pi));
    tris_ = std::move(keep);
  }

  struct Candidate {
    Vec2 point;
    double clearance;
  };

  // Voronoi vertices inside the unit disk plus Voronoi-edge crossings of the unit circle.
  std::vector<Candidate> candidates() const {
    std::vector<Candidate> out;
    std::unordered_map<std::uint64_t, std::vector<int>> edge_tris;
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      for (int k = 0; k < 3; ++k) edge_tris[edge_key(tris_[i].v[k], tris_[i].v[(k + 1) % 3])].push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const Tri& t = tris_[i];
      if (!real(t)) continue;
      if (dot(t.center, t.center) <= 1.0) out.push_back({t.center, std::sqrt(t.radius2)});
      for (int k = 0; k < 3; ++k) {
        const int a = t.v[k], b = t.v[(k + 1) % 3], c = t.v[(k + 2) % 3];
        const auto& adj = edge_tris.at(edge_key(a, b));
        const Tri* other = nullptr;
        for (int j : adj) {
          if (j != static_cast<int>(i)) other = &tris_[j];
        }
        if (other && real(*other)) {
          // Interior Voronoi edge: emit each segment once, from the lower-indexed triangle.
          if (static_cast<int>(i) > (adj[0] == static_cast<int>(i) ? adj[1] : adj[0])) continue;
          crossings(t.center, other->center - t.center, 1.0, pts_[a], out);
        } else {
          // Hull edge: ray from the circumcenter away from the opposite vertex.
          const Vec2 e = pts_[b] - pts_[a];
          Vec2 n{e.y, -e.x};
          if (dot(n, pts_[c] - pts_[a]) > 0) n = n * -1.0;
          crossings(t.center, n * (1.0 / length(n)), INFINITY, pts_[a], out);
        }
      }
    }
    return out;
  }

 private:
  struct Tri {
    int v[3];
    Vec2 center;
    double radius2;
  };

  static std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

  bool real(const Tri& t) const { return t.v[0] > 2 && t.v[1] > 2 && t.v[2] > 2; }

  Tri make(int a, int b, int c) const {
    const Vec2 pa = pts_[a], pb = pts_[b], pc = pts_[c];
    const double d = 2 * (pa.x * (pb.y - pc.y) + pb.x * (pc.y - pa.y) + pc.x * (pa.y - pb.y));
    const double a2 = dot(pa, pa), b2 = dot(pb, pb), c2 = dot(pc, pc);
    const Vec2 center{(a2 * (pb.y - pc.y) + b2 * (pc.y - pa.y) + c2 * (pa.y - pb.y)) / d,
                      (a2 * (pc.x - pb.x) + b2 * (pa.x - pc.x) + c2 * (pb.x - pa.x)) / d};
    const Vec2 r = pa - center;
    return {{a, b, c}, center, dot(r, r)};
  }

  // Points origin + t * dir (t in [0, t_max]) on the unit circle; clearance is the distance to `site`.
  static void crossings(Vec2 origin, Vec2 dir, double t_max, Vec2 site, std::vector<Candidate>& out) {
    const double a = dot(dir, dir);
    if (a == 0) return;
    const double b = 2 * dot(origin, dir);
    const double c = dot(origin, origin) - 1.0;
    const double disc = b * b - 4 * a * c;
    if (disc < 0) return;
    const double sq = std::sqrt(disc);
    for (double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
      if (t < 0 || t > t_max) continue;
      Vec2 q = origin + dir * t;
      q = q * (1.0 / length(q));
      out.push_back({q, length(q - site)});
    }
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

DirectionSet DirectionSet::prefix(std::size_t count) const {
  DirectionSet out;
  count = std::min(count, size());
  out.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(count));
  out.directions.assign(directions.begin(), directions.begin() + static_cast<std::ptrdiff_t>(count));
  return out;
}

Vec3 project_to_hemisphere(Vec2 p) {
  const double r2 = dot(p, p);
  if (r2 > 1.0 + 1e-12) fail_usage("outside-disk", "point lies outside the unit disk");
  return {p.x, p.y, std::sqrt(std::max(0.0, 1.0 - r2))};
}

DirectionSet generate_directions(int count, std::uint64_t seed, std::vector<InsertionRecord>* log) {
  if (count < 4 || count > kMaxDirections) {
    fail_usage("bad-count", "direction count must be in [4, " + std::to_string(kMaxDirections) + "]");
  }
  std::mt19937_64 rng(seed);
  DirectionSet set;
  Delaunay dt;
  while (set.points.size() < 4) {
    const Vec2 p{2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1};
    if (dot(p, p) >= 1.0) continue;
    set.points.push_back(p);
    dt.insert(p);
  }
  while (static_cast<int>(set.points.size()) < count) {
    const auto cands = dt.candidates();
    if (cands.empty()) fail_data("no-candidates", "largest-empty-circle search found no candidate site");
    std::size_t best = 0;
    for (std::size_t i = 1; i < cands.size(); ++i) {
      if (cands[i].clearance > cands[best].clearance) best = i;
    }
    double runner_up = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (i != best) runner_up = std::max(runner_up, cands[i].clearance);
    }
    if (log) log->push_back({cands[best].point, cands[best].clearance, cands.size(), runner_up});
    set.points.push_back(cands[best].point);
    dt.insert(cands[best].point);
  }
  set.directions.reserve(set.points.size());
  for (Vec2 p : set.points) set.directions.push_back(project_to_hemisphere(p));
  return set;
}

void write_directions(const DirectionSet& dirs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail_data("unwritable-file", "cannot write " + path.string());
  out << "rtdirs " << dirs.size() << "\n";
  char buf[96];
  for (const Vec3& d : dirs.directions) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", d.x, d.y, d.z);
    out << buf;
  }
}

DirectionSet read_directions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail_data("unreadable-file", "cannot open direction table " + path.string());
  std::string magic;
  std::size_t count = 0;
  if (!(in >> magic >> count) || magic != "rtdirs") fail_data("bad-header", "missing `rtdirs <count>` header");
  if (count == 0 || count > kMaxDirections) fail_data("bad-count", "direction count out of range");
  DirectionSet set;
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 d;
    if (!(in >> d.x >> d.y >> d.z)) fail_data("truncated", "direction table ends early");
    if (d.z < 0) fail_data("bad-direction", "direction below the horizon");
    d = normalize(d);
    set.points.push_back({d.x, d.y});
    set.directions.push_back(d);
  }
  return set;
}

}  // namespace texrad
