// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "agfem/errors.hpp"

namespace agfem {
namespace {

constexpr int kMaxGaussPoints = 24;
constexpr int kMaxSimplexOrder = 20;

std::vector<std::pair<double, double>> compute_gauss_legendre(int n) {
  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // Map from [-1, 1] to [0, 1].
    rule[i] = {0.5 * (1.0 - z), 0.5 * w};
    rule[n - 1 - i] = {0.5 * (1.0 + z), 0.5 * w};
  }
  return rule;
}

const std::vector<std::pair<double, double>>& cached_gauss(int n) {
  static const auto table = [] {
    std::array<std::vector<std::pair<double, double>>, kMaxGaussPoints + 1> t;
    for (int k = 1; k <= kMaxGaussPoints; ++k) t[k] = compute_gauss_legendre(k);
    return t;
  }();
  if (n < 1 || n > kMaxGaussPoints) {
    throw ContractViolation("unsupported Gauss rule size " + std::to_string(n));
  }
  return table[n];
}

// Reference rule on the unit simplex of dimension 1..3 in collapsed
// coordinates; weights sum to one.
struct RefRule {
  std::vector<std::array<double, 3>> xi;
  std::vector<double> w;
};

RefRule make_simplex_rule(int dim, int n) {
  const auto& g = cached_gauss(n);
  RefRule r;
  if (dim == 1) {
    for (const auto& [x, w] : g) {
      r.xi.push_back({x, 0.0, 0.0});
      r.w.push_back(w);
    }
  } else if (dim == 2) {
    for (const auto& [u, wu] : g) {
      for (const auto& [v, wv] : g) {
        r.xi.push_back({u, v * (1.0 - u), 0.0});
        r.w.push_back(2.0 * wu * wv * (1.0 - u));
      }
    }
  } else {
    for (const auto& [u, wu] : g) {
      for (const auto& [v, wv] : g) {
        for (const auto& [s, ws] : g) {
          r.xi.push_back({u, v * (1.0 - u), s * (1.0 - u) * (1.0 - v)});
          r.w.push_back(6.0 * wu * wv * ws * (1.0 - u) * (1.0 - u) * (1.0 - v));
        }
      }
    }
  }
  return r;
}

int simplex_points_for(int order, int dim) { return (order + dim) / 2 + 1; }

const RefRule& cached_simplex_rule(int dim, int order) {
  static const auto table = [] {
    std::array<std::array<RefRule, kMaxSimplexOrder + 1>, 4> t;
    for (int d = 1; d <= 3; ++d) {
      for (int p = 0; p <= kMaxSimplexOrder; ++p) {
        t[d][p] = make_simplex_rule(d, simplex_points_for(p, d));
      }
    }
    return t;
  }();
  if (order < 0 || order > kMaxSimplexOrder) {
    throw ContractViolation("unsupported quadrature order " +
                            std::to_string(order));
  }
  return table[dim][order];
}

using Verts = std::array<Point, 4>;

// Maps a reference rule onto the simplex spanned by v[0..k].
template <typename Emit>
void map_simplex(const Verts& v, int k, double measure, const RefRule& ref,
                 Emit&& emit) {
  for (std::size_t q = 0; q < ref.w.size(); ++q) {
    Point x = v[0];
    for (int i = 0; i < k; ++i) {
      x = add(x, scale(ref.xi[q][i], sub(v[i + 1], v[0])));
    }
    emit(x, ref.w[q] * measure);
  }
}

Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double triangle_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * norm(cross(sub(b, a), sub(c, a)));
}

double tet_volume(const Point& a, const Point& b, const Point& c,
                  const Point& d) {
  return std::abs(dot(sub(b, a), cross(sub(c, a), sub(d, a)))) / 6.0;
}

Point crossing(const Point& a, double pa, const Point& b, double pb) {
  const double t = pa / (pa - pb);
  return add(a, scale(t, sub(b, a)));
}

class SimplexClipper {
 public:
  SimplexClipper(int dim, int order, CutQuadrature& out)
      : dim_(dim),
        bulk_(cached_simplex_rule(dim, order)),
        facet_(cached_simplex_rule(dim - 1, order)),
        out_(out) {}

  void clip(const Verts& v, const std::array<double, 4>& phi) {
    if (dim_ == 2) {
      clip_triangle(v, phi);
    } else {
      clip_tet(v, phi);
    }
  }

 private:
  void add_bulk_triangle(const Point& a, const Point& b, const Point& c) {
    const double m = triangle_area(a, b, c);
    if (m == 0.0) return;
    map_simplex({a, b, c, Point{}}, 2, m, bulk_, [&](const Point& x, double w) {
      out_.bulk.points.push_back(x);
      out_.bulk.weights.push_back(w);
    });
  }

  void add_bulk_tet(const Point& a, const Point& b, const Point& c,
                    const Point& d) {
    const double m = tet_volume(a, b, c, d);
    if (m == 0.0) return;
    map_simplex({a, b, c, d}, 3, m, bulk_, [&](const Point& x, double w) {
      out_.bulk.points.push_back(x);
      out_.bulk.weights.push_back(w);
    });
  }

  // Prism with triangles (a0,a1,a2), (b0,b1,b2) and lateral edges ai-bi.
  void add_bulk_prism(const Point& a0, const Point& a1, const Point& a2,
                      const Point& b0, const Point& b1, const Point& b2) {
    add_bulk_tet(a0, a1, a2, b0);
    add_bulk_tet(a1, a2, b0, b1);
    add_bulk_tet(a2, b0, b1, b2);
  }

  void add_facet(const Verts& f, int k, const Point& normal) {
    const double m = k == 1 ? norm(sub(f[1], f[0])) : triangle_area(f[0], f[1], f[2]);
    if (m == 0.0) return;
    map_simplex(f, k, m, facet_, [&](const Point& x, double w) {
      out_.boundary.points.push_back(x);
      out_.boundary.weights.push_back(w);
      out_.boundary.normals.push_back(normal);
    });
  }

  static Point unit(const Point& g) {
    const double n = norm(g);
    return n > 0.0 ? scale(1.0 / n, g) : g;
  }

  // Gradient of the linear interpolant on a triangle in the xy-plane.
  static Point triangle_gradient(const Verts& v, const std::array<double, 4>& p) {
    const Point e1 = sub(v[1], v[0]);
    const Point e2 = sub(v[2], v[0]);
    const double d1 = p[1] - p[0];
    const double d2 = p[2] - p[0];
    const double det = e1[0] * e2[1] - e1[1] * e2[0];
    return {(d1 * e2[1] - d2 * e1[1]) / det, (e1[0] * d2 - e2[0] * d1) / det,
            0.0};
  }

  static Point tet_gradient(const Verts& v, const std::array<double, 4>& p) {
    const Point e1 = sub(v[1], v[0]);
    const Point e2 = sub(v[2], v[0]);
    const Point e3 = sub(v[3], v[0]);
    const double det = dot(e1, cross(e2, e3));
    // Rows of the inverse transpose are the dual basis vectors.
    const Point g1 = scale(1.0 / det, cross(e2, e3));
    const Point g2 = scale(1.0 / det, cross(e3, e1));
    const Point g3 = scale(1.0 / det, cross(e1, e2));
    return add(add(scale(p[1] - p[0], g1), scale(p[2] - p[0], g2)),
               scale(p[3] - p[0], g3));
  }

  void clip_triangle(const Verts& v, const std::array<double, 4>& phi) {
    std::array<int, 3> in{};
    std::array<int, 3> out{};
    int ni = 0;
    int no = 0;
    for (int i = 0; i < 3; ++i) {
      if (phi[i] < 0.0) {
        in[ni++] = i;
      } else {
        out[no++] = i;
      }
    }
    if (ni == 0) return;
    if (ni == 3) {
      add_bulk_triangle(v[0], v[1], v[2]);
      return;
    }
    const Point n = unit(triangle_gradient(v, phi));
    auto x = [&](int a, int b) { return crossing(v[a], phi[a], v[b], phi[b]); };
    if (ni == 1) {
      const int a = in[0];
      const Point pb = x(a, out[0]);
      const Point pc = x(a, out[1]);
      add_bulk_triangle(v[a], pb, pc);
      add_facet({pb, pc, Point{}, Point{}}, 1, n);
    } else {
      const int a = in[0];
      const int b = in[1];
      const int c = out[0];
      const Point pac = x(a, c);
      const Point pbc = x(b, c);
      add_bulk_triangle(v[a], v[b], pbc);
      add_bulk_triangle(v[a], pbc, pac);
      add_facet({pac, pbc, Point{}, Point{}}, 1, n);
    }
  }

  void clip_tet(const Verts& v, const std::array<double, 4>& phi) {
    std::array<int, 4> in{};
    std::array<int, 4> out{};
    int ni = 0;
    int no = 0;
    for (int i = 0; i < 4; ++i) {
      if (phi[i] < 0.0) {
        in[ni++] = i;
      } else {
        out[no++] = i;
      }
    }
    if (ni == 0) return;
    if (ni == 4) {
      add_bulk_tet(v[0], v[1], v[2], v[3]);
      return;
    }
    const Point n = unit(tet_gradient(v, phi));
    auto x = [&](int a, int b) { return crossing(v[a], phi[a], v[b], phi[b]); };
    if (ni == 1) {
      const int a = in[0];
      const Point pb = x(a, out[0]);
      const Point pc = x(a, out[1]);
      const Point pd = x(a, out[2]);
      add_bulk_tet(v[a], pb, pc, pd);
      add_facet({pb, pc, pd, Point{}}, 2, n);
    } else if (ni == 3) {
      const int d = out[0];
      const Point pa = x(in[0], d);
      const Point pb = x(in[1], d);
      const Point pc = x(in[2], d);
      add_bulk_prism(v[in[0]], v[in[1]], v[in[2]], pa, pb, pc);
      add_facet({pa, pb, pc, Point{}}, 2, n);
    } else {
      const int a = in[0];
      const int b = in[1];
      const int c = out[0];
      const int d = out[1];
      const Point pac = x(a, c);
      const Point pad = x(a, d);
      const Point pbc = x(b, c);
      const Point pbd = x(b, d);
      add_bulk_prism(v[a], pac, pad, v[b], pbc, pbd);
      add_facet({pac, pad, pbd, Point{}}, 2, n);
      add_facet({pac, pbd, pbc, Point{}}, 2, n);
    }
  }

  int dim_;
  const RefRule& bulk_;
  const RefRule& facet_;
  CutQuadrature& out_;
};

}  // namespace

double BulkRule::measure() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double BoundaryRule::measure() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  return cached_gauss(n);
}

BulkRule tensor_rule(const BoundingBox& box, int dim, int order) {
  const int n = std::max(1, (order + 2) / 2);
  const auto& g = cached_gauss(n);
  BulkRule r;
  const int nz = dim == 3 ? n : 1;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        Point x{box.origin[0] + box.extent[0] * g[i].first,
                box.origin[1] + box.extent[1] * g[j].first, 0.0};
        double w = box.extent[0] * box.extent[1] * g[i].second * g[j].second;
        if (dim == 3) {
          x[2] = box.origin[2] + box.extent[2] * g[k].first;
          w *= box.extent[2] * g[k].second;
        }
        r.points.push_back(x);
        r.weights.push_back(w);
      }
    }
  }
  return r;
}

CutQuadrature clipped_quadrature(const BoundingBox& box, int dim,
                                 std::span<const double> vertex_values,
                                 int order) {
  const int nv = 1 << dim;
  if (static_cast<int>(vertex_values.size()) != nv) {
    throw ContractViolation("clipped_quadrature: expected one value per corner");
  }
  auto corner = [&](int c) {
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      x[a] = ((c >> a) & 1) ? box.origin[a] + box.extent[a] : box.origin[a];
    }
    return x;
  };
  CutQuadrature q;
  SimplexClipper clipper(dim, order, q);
  if (dim == 2) {
    // Kuhn triangles along the 0-3 diagonal.
    static constexpr std::array<std::array<int, 3>, 2> tris{{{0, 1, 3}, {0, 2, 3}}};
    for (const auto& t : tris) {
      clipper.clip({corner(t[0]), corner(t[1]), corner(t[2]), Point{}},
                   {vertex_values[t[0]], vertex_values[t[1]],
                    vertex_values[t[2]], 0.0});
    }
  } else {
    // Kuhn tetrahedra: one monotone lattice path from corner 0 to 7 per axis
    // permutation.
    std::array<int, 3> perm{0, 1, 2};
    do {
      const int c1 = 1 << perm[0];
      const int c2 = c1 | (1 << perm[1]);
      const std::array<int, 4> t{0, c1, c2, 7};
      clipper.clip({corner(t[0]), corner(t[1]), corner(t[2]), corner(t[3])},
                   {vertex_values[t[0]], vertex_values[t[1]],
                    vertex_values[t[2]], vertex_values[t[3]]});
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return q;
}

double clamp_vertex_value(double psi, double tol) {
  return psi < -tol ? psi : std::max(psi, 0.0);
}

double default_tolerance(const BackgroundGrid& grid) {
  return 1e-12 * grid.min_cell_size();
}

CutQuadrature cut_quadrature(const BackgroundGrid& grid, const LevelSet& ls,
                             const Lattice& cell, int order, double tol) {
  if (order < 1) throw ContractViolation("quadrature order must be >= 1");
  if (tol < 0.0) tol = default_tolerance(grid);
  const int nv = grid.vertices_per_cell();
  std::array<double, 8> values{};
  bool all_inside = true;
  for (int c = 0; c < nv; ++c) {
    const double psi = ls.value(grid.vertex(cell, c));
    if (!std::isfinite(psi)) {
      throw ClassificationError("level set is not finite at a vertex of cell " +
                                    std::to_string(grid.morton(cell)),
                                grid.morton(cell));
    }
    values[c] = clamp_vertex_value(psi, tol);
    all_inside = all_inside && values[c] < 0.0;
  }
  const BoundingBox box = grid.cell_box(cell);
  if (all_inside) {
    CutQuadrature q;
    q.bulk = tensor_rule(box, grid.dim(), order);
    return q;
  }
  return clipped_quadrature(box, grid.dim(),
                            std::span<const double>(values.data(), nv), order);
}

}  // namespace agfem
