#include "bisweep/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace bisweep {

namespace {

long double orient_ld(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = static_cast<long double>(b.x()) - a.x();
  const long double aby = static_cast<long double>(b.y()) - a.y();
  const long double acx = static_cast<long double>(c.x()) - a.x();
  const long double acy = static_cast<long double>(c.y()) - a.y();
  return abx * acy - aby * acx;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 B = b - a, C = c - a;
  const double d = 2 * (B.x() * C.y() - B.y() * C.x());
  const double b2 = B.squaredNorm(), c2 = C.squaredNorm();
  return a + Vec2(C.y() * b2 - B.y() * c2, B.x() * c2 - C.x() * b2) / d;
}

std::int64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

bool point_in_loop(const std::vector<Vec2>& loop, const Vec2& p) {
  bool in = false;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    const Vec2& a = loop[j];
    const Vec2& b = loop[i];
    if ((b.y() > p.y()) != (a.y() > p.y())) {
      const double x = b.x() + (p.y() - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

struct Tri {
  std::array<int, 3> v;  // CCW; edge i is (v[i+1], v[i+2]) opposite v[i]
  std::array<int, 3> n;  // neighbor across edge i, -1 when open
  bool alive = true;
};

// Incremental Delaunay triangulation, Bowyer-Watson cavity style. Points are
// never removed; triangles are tombstoned. All queries use long double
// predicates with ties broken toward "outside the circle", which keeps the
// triangulation valid (if occasionally non-Delaunay) on cocircular input.
struct Triangulator {
  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<int> stamp;
  std::vector<int> created;  // triangles built by the most recent insert
  int epoch = 0;
  int hint = 0;
  long long budget = 2'000'000;
  double dup_tol = 0;

  void init_box(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double half = 8 * std::max(hi.x() - lo.x(), hi.y() - lo.y()) + 1;
    pts = {c + Vec2(-half, -half), c + Vec2(half, -half), c + Vec2(half, half),
           c + Vec2(-half, half)};
    tris = {Tri{{0, 1, 2}, {-1, 1, -1}, true}, Tri{{0, 2, 3}, {-1, -1, 0}, true}};
    stamp = {0, 0};
    dup_tol = 1e-12 * half;
  }

  bool in_circum(int t, const Vec2& p) const {
    const Vec2 a = pts[tris[t].v[0]] - p;
    const Vec2 b = pts[tris[t].v[1]] - p;
    const Vec2 c = pts[tris[t].v[2]] - p;
    const long double a2 = (long double)a.x() * a.x() + (long double)a.y() * a.y();
    const long double b2 = (long double)b.x() * b.x() + (long double)b.y() * b.y();
    const long double c2 = (long double)c.x() * c.x() + (long double)c.y() * c.y();
    const long double det = a.x() * ((long double)b.y() * c2 - (long double)c.y() * b2) -
                            a.y() * ((long double)b.x() * c2 - (long double)c.x() * b2) +
                            a2 * ((long double)b.x() * c.y() - (long double)c.x() * b.y());
    return det > 0;
  }

  int first_alive() const {
    for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
      if (tris[i].alive) return i;
    throw nonconvergence_error("mesh: triangulation exhausted");
  }

  int locate(const Vec2& p) {
    int t = (hint >= 0 && hint < static_cast<int>(tris.size()) && tris[hint].alive)
                ? hint
                : first_alive();
    int steps = 0;
    const int cap = static_cast<int>(tris.size()) + 64;
    while (steps++ < cap) {
      bool moved = false;
      for (int i = 0; i < 3 && !moved; ++i) {
        const Vec2& a = pts[tris[t].v[(i + 1) % 3]];
        const Vec2& b = pts[tris[t].v[(i + 2) % 3]];
        if (orient_ld(a, b, p) < 0 && tris[t].n[i] >= 0) {
          t = tris[t].n[i];
          moved = true;
        }
      }
      if (!moved) return t;
    }
    for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
      if (!tris[i].alive) continue;
      bool in = true;
      for (int e = 0; e < 3 && in; ++e)
        in = orient_ld(pts[tris[i].v[(e + 1) % 3]], pts[tris[i].v[(e + 2) % 3]], p) >= 0;
      if (in) return i;
    }
    throw nonconvergence_error("mesh: point location failed");
  }

  // True when p sits on the segment (a, b) up to roundoff; such points must
  // pull both incident triangles into the cavity even when the in-circle
  // determinant rounds to "outside".
  bool on_edge(const Vec2& a, const Vec2& b, const Vec2& p) const {
    const double len = (b - a).norm();
    return segment_distance(a, b, p) < 1e-12 * (len + 1);
  }

  // Inserts p; returns its point index. If p duplicates an existing vertex of
  // the containing triangle, returns that vertex and creates nothing.
  int insert(const Vec2& p) {
    created.clear();
    if (--budget < 0) throw nonconvergence_error("mesh: insertion budget exhausted");
    const int seed = locate(p);
    for (int i = 0; i < 3; ++i) {
      const int vi = tris[seed].v[i];
      if ((pts[vi] - p).norm() < dup_tol) return vi;
    }

    ++epoch;
    stamp.resize(tris.size(), 0);
    std::vector<int> cavity, work{seed};
    stamp[seed] = epoch;
    while (!work.empty()) {
      const int t = work.back();
      work.pop_back();
      cavity.push_back(t);
      for (int i = 0; i < 3; ++i) {
        const int nb = tris[t].n[i];
        if (nb < 0 || stamp[nb] == epoch) continue;
        const Vec2& ea = pts[tris[t].v[(i + 1) % 3]];
        const Vec2& eb = pts[tris[t].v[(i + 2) % 3]];
        if (in_circum(nb, p) || on_edge(ea, eb, p)) {
          stamp[nb] = epoch;
          work.push_back(nb);
        }
      }
    }

    // Cavity boundary as a directed ring a -> (b, outside triangle).
    std::unordered_map<int, std::pair<int, int>> ring;
    for (const int t : cavity)
      for (int i = 0; i < 3; ++i) {
        const int nb = tris[t].n[i];
        if (nb >= 0 && stamp[nb] == epoch) continue;
        const int a = tris[t].v[(i + 1) % 3], b = tris[t].v[(i + 2) % 3];
        if (!ring.emplace(a, std::make_pair(b, nb)).second)
          throw nonconvergence_error("mesh: cavity boundary is not a simple ring");
      }
    if (ring.empty()) throw nonconvergence_error("mesh: empty insertion cavity");

    const int pi = static_cast<int>(pts.size());
    pts.push_back(p);
    const int base = static_cast<int>(tris.size());
    const int m = static_cast<int>(ring.size());
    int a = ring.begin()->first;
    std::vector<std::array<int, 3>> fan;  // (a, b, outside)
    fan.reserve(m);
    for (int k = 0; k < m; ++k) {
      const auto it = ring.find(a);
      if (it == ring.end()) throw nonconvergence_error("mesh: cavity ring does not close");
      fan.push_back({a, it->second.first, it->second.second});
      a = it->second.first;
    }
    if (a != fan.front()[0]) throw nonconvergence_error("mesh: cavity ring does not close");

    for (int k = 0; k < m; ++k) {
      const auto [ea, eb, outside] = fan[k];
      if (orient_ld(pts[ea], pts[eb], p) <= 0)
        throw nonconvergence_error("mesh: degenerate cavity triangle");
      Tri nt;
      nt.v = {ea, eb, pi};
      nt.n = {base + (k + 1) % m, base + (k + m - 1) % m, outside};
      if (outside >= 0)
        for (int e = 0; e < 3; ++e) {
          const int oa = tris[outside].v[(e + 1) % 3], ob = tris[outside].v[(e + 2) % 3];
          if ((oa == ea && ob == eb) || (oa == eb && ob == ea)) tris[outside].n[e] = base + k;
        }
      tris.push_back(nt);
      created.push_back(base + k);
    }
    for (const int t : cavity) tris[t].alive = false;
    hint = base;
    return pi;
  }

  bool edge_present(int a, int b) const {
    for (const Tri& t : tris) {
      if (!t.alive) continue;
      for (int i = 0; i < 3; ++i) {
        const int u = t.v[i], w = t.v[(i + 1) % 3];
        if ((u == a && w == b) || (u == b && w == a)) return true;
      }
    }
    return false;
  }
};

double min_angle_of(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto corner = [](const Vec2& u, const Vec2& v) {
    const double d = u.dot(v) / (u.norm() * v.norm());
    return std::acos(std::clamp(d, -1.0, 1.0));
  };
  const double aa = corner(b - a, c - a);
  const double ab = corner(c - b, a - b);
  const double ac = pi - aa - ab;
  return std::min({aa, ab, ac}) * 180.0 / pi;
}

}  // namespace

double Mesh::signed_area(int t) const {
  const Vec2& a = nodes[triangles[t][0]];
  const Vec2& b = nodes[triangles[t][1]];
  const Vec2& c = nodes[triangles[t][2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double Mesh::triangle_min_angle(int t) const {
  return min_angle_of(nodes[triangles[t][0]], nodes[triangles[t][1]], nodes[triangles[t][2]]);
}

double Mesh::max_edge_length() const {
  double m = 0;
  for (const auto& tr : triangles)
    for (int i = 0; i < 3; ++i)
      m = std::max(m, (nodes[tr[i]] - nodes[tr[(i + 1) % 3]]).norm());
  return m;
}

double Mesh::min_angle() const {
  double m = 180;
  for (int t = 0; t < num_triangles(); ++t) m = std::min(m, triangle_min_angle(t));
  return m;
}

void validate_mesh(const Mesh& mesh, double min_angle_deg) {
  const int N = mesh.num_nodes(), T = mesh.num_triangles();
  if (N < 3 || T < 1) throw input_error("mesh: too few nodes or triangles");
  if (static_cast<int>(mesh.node_boundary.size()) != N ||
      static_cast<int>(mesh.tri_region.size()) != T)
    throw input_error("mesh: flag arrays do not match node/triangle counts");

  std::vector<char> used(N, 0);
  std::unordered_map<std::int64_t, int> undirected;
  std::unordered_map<std::int64_t, int> directed;
  for (int t = 0; t < T; ++t) {
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (tr[i] < 0 || tr[i] >= N) throw input_error("mesh: node index out of range");
      if (tr[i] == tr[(i + 1) % 3]) throw input_error("mesh: repeated node in triangle");
      used[tr[i]] = 1;
    }
    if (!(mesh.signed_area(t) > 0)) throw input_error("mesh: nonpositive triangle area");
    if (mesh.triangle_min_angle(t) < min_angle_deg - 1e-7)
      throw input_error("mesh: triangle angle below threshold");
    for (int i = 0; i < 3; ++i) {
      const int a = tr[i], b = tr[(i + 1) % 3];
      if (++directed[(static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b)] > 1)
        throw input_error("mesh: inconsistent triangle orientation at a shared edge");
      if (++undirected[edge_key(a, b)] > 2)
        throw input_error("mesh: edge shared by more than two triangles");
    }
  }
  for (int i = 0; i < N; ++i)
    if (!used[i]) throw input_error("mesh: isolated node");

  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return mesh.nodes[i].x() != mesh.nodes[j].x() ? mesh.nodes[i].x() < mesh.nodes[j].x()
                                                  : mesh.nodes[i].y() < mesh.nodes[j].y();
  });
  for (int i = 0; i + 1 < N; ++i)
    if (mesh.nodes[order[i]] == mesh.nodes[order[i + 1]])
      throw input_error("mesh: duplicate node coordinates");
}

Mesh generate_mesh(const Phantom& phantom, double h, double min_angle_deg) {
  if (!(h > 0)) throw input_error("mesh: target edge length must be positive");
  if (!(min_angle_deg > 0 && min_angle_deg <= 33))
    throw input_error("mesh: min angle threshold must be in (0, 33] degrees");
  const PolygonDomain& dom = phantom.domain;

  // Constraint loops: the domain boundary plus every inclusion boundary,
  // disks polygonized so the chord sagitta stays below h^2/8.
  std::vector<std::vector<Vec2>> loops{dom.vertices};
  for (const Inclusion& inc : phantom.inclusions) loops.push_back(inc.polygonize(h * h / 8));

  Vec2 lo = dom.vertices[0], hi = dom.vertices[0];
  for (const Vec2& v : dom.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  Triangulator T;
  T.init_box(lo, hi);

  struct Seg {
    int a, b;
  };
  std::vector<Seg> segs;
  for (const auto& loop : loops) {
    const int m = static_cast<int>(loop.size());
    std::vector<int> idx;
    for (int k = 0; k < m; ++k) {
      const Vec2 a = loop[k], b = loop[(k + 1) % m];
      const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h)));
      for (int j = 0; j < pieces; ++j)
        idx.push_back(T.insert(a + (static_cast<double>(j) / pieces) * (b - a)));
    }
    for (std::size_t k = 0; k < idx.size(); ++k)
      segs.push_back({idx[k], idx[(k + 1) % idx.size()]});
  }

  // Recover any constrained sub-segment missing from the triangulation by
  // splitting it at the midpoint until both halves appear.
  auto recover = [&] {
    std::vector<int> todo(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) todo[i] = static_cast<int>(i);
    while (!todo.empty()) {
      const int si = todo.back();
      todo.pop_back();
      const auto [a, b] = segs[si];
      if (T.edge_present(a, b)) continue;
      const int mi = T.insert(0.5 * (T.pts[a] + T.pts[b]));
      segs[si] = {a, mi};
      segs.push_back({mi, b});
      todo.push_back(si);
      todo.push_back(static_cast<int>(segs.size()) - 1);
    }
  };
  recover();

  // Ruppert-style refinement: fix angles below threshold and edges above h by
  // circumcenter insertion; a circumcenter that would encroach a constrained
  // sub-segment's diametral circle splits that segment instead.
  std::vector<std::int8_t> interior_cache;
  auto interior = [&](int t) {
    if (static_cast<int>(interior_cache.size()) < static_cast<int>(T.tris.size()))
      interior_cache.resize(T.tris.size(), -1);
    if (interior_cache[t] < 0) {
      const Vec2 c =
          (T.pts[T.tris[t].v[0]] + T.pts[T.tris[t].v[1]] + T.pts[T.tris[t].v[2]]) / 3.0;
      interior_cache[t] = dom.contains(c) ? 1 : 0;
    }
    return interior_cache[t] == 1;
  };
  auto needs_work = [&](int t) {
    if (!T.tris[t].alive || !interior(t)) return false;
    const Vec2& a = T.pts[T.tris[t].v[0]];
    const Vec2& b = T.pts[T.tris[t].v[1]];
    const Vec2& c = T.pts[T.tris[t].v[2]];
    const double longest = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    return longest > h * (1 + 1e-12) || min_angle_of(a, b, c) < min_angle_deg - 1e-9;
  };
  auto encroached_by = [&](const Vec2& p) {
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const Vec2 sa = T.pts[segs[i].a], sb = T.pts[segs[i].b];
      if ((p - 0.5 * (sa + sb)).norm() < 0.5 * (sb - sa).norm() * (1 - 1e-12))
        return static_cast<int>(i);
    }
    return -1;
  };
  auto split_segment = [&](int si) {
    const auto [a, b] = segs[si];
    const int mi = T.insert(0.5 * (T.pts[a] + T.pts[b]));
    segs[si] = {a, mi};
    segs.push_back({mi, b});
  };
  auto bisect_longest = [&](const std::array<int, 3>& tv) {
    int ia = tv[0], ib = tv[1];
    double best = -1;
    for (int e = 0; e < 3; ++e) {
      const double len = (T.pts[tv[(e + 1) % 3]] - T.pts[tv[e]]).norm();
      if (len > best) best = len, ia = tv[e], ib = tv[(e + 1) % 3];
    }
    T.insert(0.5 * (T.pts[ia] + T.pts[ib]));
  };

  std::vector<int> work;
  auto queue_all = [&] {
    work.clear();
    for (int t = 0; t < static_cast<int>(T.tris.size()); ++t)
      if (T.tris[t].alive) work.push_back(t);
  };
  for (int round = 0;; ++round) {
    if (round > 4) throw nonconvergence_error("mesh: constrained refinement did not settle");
    queue_all();
    while (!work.empty()) {
      const int t = work.back();
      work.pop_back();
      if (!needs_work(t)) continue;
      const std::array<int, 3> tv = T.tris[t].v;
      const Vec2 cc = circumcenter(T.pts[tv[0]], T.pts[tv[1]], T.pts[tv[2]]);
      const int enc = encroached_by(cc);
      if (enc >= 0) {
        split_segment(enc);
      } else if (dom.contains(cc)) {
        T.insert(cc);
        if (T.created.empty()) {
          // Circumcenter collided with an existing vertex; bisect the longest
          // edge instead so the triangle still shrinks.
          bisect_longest(tv);
          if (T.created.empty()) continue;
        }
      } else {
        // Circumcenter escaped the domain without registering encroachment;
        // bisect the longest edge as a safe interior fallback.
        bisect_longest(tv);
        if (T.created.empty()) continue;
      }
      for (const int nt : T.created) work.push_back(nt);
      if (T.tris[t].alive) work.push_back(t);
    }
    bool all_present = true;
    for (const auto& s : segs)
      if (!T.edge_present(s.a, s.b)) {
        all_present = false;
        break;
      }
    if (all_present) {
      bool all_good = true;
      for (int t = 0; t < static_cast<int>(T.tris.size()) && all_good; ++t)
        all_good = !needs_work(t);
      if (all_good) break;
    } else {
      recover();
    }
  }

  // Strip exterior triangles, compact node indices, label regions.
  Mesh out;
  out.min_angle_threshold = min_angle_deg;
  std::vector<int> nmap(T.pts.size(), -1);
  std::vector<int> kept;
  for (int t = 0; t < static_cast<int>(T.tris.size()); ++t)
    if (T.tris[t].alive && interior(t)) kept.push_back(t);
  for (const int t : kept)
    for (const int v : T.tris[t].v) nmap[v] = 0;
  for (std::size_t i = 0, next = 0; i < nmap.size(); ++i)
    if (nmap[i] == 0) {
      nmap[i] = static_cast<int>(next++);
      out.nodes.push_back(T.pts[i]);
    }
  const double btol = 1e-10 * (dom.diameter + 1);
  out.node_boundary.resize(out.nodes.size());
  for (std::size_t i = 0; i < out.nodes.size(); ++i)
    out.node_boundary[i] = dom.boundary_distance(out.nodes[i]) < btol ? 1 : 0;
  for (const int t : kept) {
    const auto& v = T.tris[t].v;
    out.triangles.push_back({nmap[v[0]], nmap[v[1]], nmap[v[2]]});
    const Vec2 c = (T.pts[v[0]] + T.pts[v[1]] + T.pts[v[2]]) / 3.0;
    int region = -1;
    for (std::size_t k = 1; k < loops.size() && region < 0; ++k)
      if (point_in_loop(loops[k], c)) region = static_cast<int>(k) - 1;
    out.tri_region.push_back(region);
  }
  validate_mesh(out, min_angle_deg - 1e-6);
  return out;
}

namespace {

// Reads a whitespace-token stream with '#' comments stripped.
std::vector<std::string> tokenize_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw input_error("mesh: cannot open " + path);
  std::vector<std::string> tok;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) tok.push_back(t);
  }
  return tok;
}

long take_int(const std::vector<std::string>& tok, std::size_t& cur, const std::string& what) {
  if (cur >= tok.size()) throw input_error("mesh: truncated file while reading " + what);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok[cur], &used);
  } catch (const std::exception&) {
    throw input_error("mesh: malformed integer '" + tok[cur] + "' in " + what);
  }
  if (used != tok[cur].size())
    throw input_error("mesh: malformed integer '" + tok[cur] + "' in " + what);
  ++cur;
  return v;
}

double take_real(const std::vector<std::string>& tok, std::size_t& cur, const std::string& what) {
  if (cur >= tok.size()) throw input_error("mesh: truncated file while reading " + what);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok[cur], &used);
  } catch (const std::exception&) {
    throw input_error("mesh: malformed number '" + tok[cur] + "' in " + what);
  }
  if (used != tok[cur].size())
    throw input_error("mesh: malformed number '" + tok[cur] + "' in " + what);
  ++cur;
  return v;
}

}  // namespace

void save_mesh(const Mesh& mesh, const std::string& node_path, const std::string& ele_path) {
  std::ofstream nf(node_path);
  if (!nf) throw input_error("mesh: cannot write " + node_path);
  nf << std::setprecision(17);
  nf << mesh.num_nodes() << " 2 0 1\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    nf << i + 1 << ' ' << mesh.nodes[i].x() << ' ' << mesh.nodes[i].y() << ' '
       << mesh.node_boundary[i] << '\n';
  std::ofstream ef(ele_path);
  if (!ef) throw input_error("mesh: cannot write " + ele_path);
  ef << mesh.num_triangles() << " 3 0\n";
  for (int t = 0; t < mesh.num_triangles(); ++t)
    ef << t + 1 << ' ' << mesh.triangles[t][0] + 1 << ' ' << mesh.triangles[t][1] + 1 << ' '
       << mesh.triangles[t][2] + 1 << '\n';
}

Mesh load_mesh(const std::string& node_path, const std::string& ele_path, const Phantom& phantom,
               double min_angle_deg) {
  const auto ntok = tokenize_file(node_path);
  std::size_t cur = 0;
  const long N = take_int(ntok, cur, "node header");
  const long dim = take_int(ntok, cur, "node header");
  const long nattr = take_int(ntok, cur, "node header");
  const long nmark = take_int(ntok, cur, "node header");
  if (N < 3 || dim != 2 || nattr < 0 || nmark < 0 || nmark > 1)
    throw input_error("mesh: unsupported node header");

  Mesh out;
  out.min_angle_threshold = min_angle_deg;
  long nbase = 0;
  for (long i = 0; i < N; ++i) {
    const long idx = take_int(ntok, cur, "node record");
    if (i == 0) {
      if (idx != 0 && idx != 1) throw input_error("mesh: node indices must start at 0 or 1");
      nbase = idx;
    } else if (idx != nbase + i) {
      throw input_error("mesh: node indices must be consecutive");
    }
    const double x = take_real(ntok, cur, "node record");
    const double y = take_real(ntok, cur, "node record");
    for (long a = 0; a < nattr; ++a) take_real(ntok, cur, "node attribute");
    int marker = 0;
    if (nmark == 1) marker = take_int(ntok, cur, "node marker") != 0 ? 1 : 0;
    out.nodes.emplace_back(x, y);
    out.node_boundary.push_back(marker);
  }
  if (cur != ntok.size()) throw input_error("mesh: trailing tokens in " + node_path);
  if (nmark == 0) {
    const double btol = 1e-10 * (phantom.domain.diameter + 1);
    for (int i = 0; i < out.num_nodes(); ++i)
      out.node_boundary[i] = phantom.domain.boundary_distance(out.nodes[i]) < btol ? 1 : 0;
  }

  const auto etok = tokenize_file(ele_path);
  cur = 0;
  const long M = take_int(etok, cur, "element header");
  const long npt = take_int(etok, cur, "element header");
  const long eattr = take_int(etok, cur, "element header");
  if (M < 1 || npt != 3 || eattr < 0) throw input_error("mesh: unsupported element header");
  long ebase = 0;
  for (long t = 0; t < M; ++t) {
    const long idx = take_int(etok, cur, "element record");
    if (t == 0) {
      if (idx != 0 && idx != 1) throw input_error("mesh: element indices must start at 0 or 1");
      ebase = idx;
    } else if (idx != ebase + t) {
      throw input_error("mesh: element indices must be consecutive");
    }
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      const long v = take_int(etok, cur, "element record") - nbase;
      if (v < 0 || v >= N) throw input_error("mesh: element node index out of range");
      tri[k] = static_cast<int>(v);
    }
    for (long a = 0; a < eattr; ++a) take_real(etok, cur, "element attribute");
    out.triangles.push_back(tri);
  }
  if (cur != etok.size()) throw input_error("mesh: trailing tokens in " + ele_path);

  for (int t = 0; t < out.num_triangles(); ++t) {
    if (out.signed_area(t) < 0) std::swap(out.triangles[t][1], out.triangles[t][2]);
    const Vec2 c = (out.nodes[out.triangles[t][0]] + out.nodes[out.triangles[t][1]] +
                    out.nodes[out.triangles[t][2]]) /
                   3.0;
    int region = -1;
    for (std::size_t k = 0; k < phantom.inclusions.size() && region < 0; ++k)
      if (phantom.inclusions[k].contains(c)) region = static_cast<int>(k);
    out.tri_region.push_back(region);
  }
  validate_mesh(out, min_angle_deg);
  return out;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.min_angle_threshold = mesh.min_angle_threshold;
  out.nodes = mesh.nodes;
  out.node_boundary = mesh.node_boundary;

  std::unordered_map<std::int64_t, int> edge_count;
  for (const auto& tr : mesh.triangles)
    for (int i = 0; i < 3; ++i) ++edge_count[edge_key(tr[i], tr[(i + 1) % 3])];

  std::unordered_map<std::int64_t, int> midpoint;
  auto mid = [&](int a, int b) {
    const std::int64_t key = edge_key(a, b);
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(out.nodes.size());
    out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    const bool bnd =
        edge_count.at(key) == 1 && mesh.node_boundary[a] == 1 && mesh.node_boundary[b] == 1;
    out.node_boundary.push_back(bnd ? 1 : 0);
    midpoint.emplace(key, idx);
    return idx;
  };

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto [a, b, c] = mesh.triangles[t];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
    for (int k = 0; k < 4; ++k) out.tri_region.push_back(mesh.tri_region[t]);
  }
  validate_mesh(out, std::min(out.min_angle_threshold, mesh.min_angle()) - 1e-6);
  return out;
}

}  // namespace bisweep
