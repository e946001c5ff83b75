#include "tessera/geo/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "tessera/errors.hpp"
#include "tessera/rng.hpp"

namespace tessera::geo {

namespace {

struct Vec2 {
    double x, y;
};

struct Triangle {
    int a, b, c;  // indices into the working vertex array
};

double cross(const Vec2& o, const Vec2& p, const Vec2& q) {
    return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
}

/// Strictly-inside-circumcircle test for the CCW triangle (a,b,c).
bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
    const double ax = a.x - p.x, ay = a.y - p.y;
    const double bx = b.x - p.x, by = b.y - p.y;
    const double cx = c.x - p.x, cy = c.y - p.y;
    const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                       (bx * bx + by * by) * (ax * cy - cx * ay) +
                       (cx * cx + cy * cy) * (ax * by - bx * ay);
    return det > 0.0;
}

}  // namespace

std::vector<std::uint8_t> voronoi_adjacency(const std::vector<ProjectedPoint>& centroids) {
    const int n = static_cast<int>(centroids.size());
    if (n < 3) throw GeometryError("voronoi_adjacency: need at least 3 centroids");

    // Index-keyed micro-perturbation: breaks exact cocircular/collinear ties
    // the same way on every run, without noticeably moving the sites.
    double min_x = centroids[0].x_km, max_x = min_x;
    double min_y = centroids[0].y_km, max_y = min_y;
    for (const auto& p : centroids) {
        min_x = std::min(min_x, p.x_km);
        max_x = std::max(max_x, p.x_km);
        min_y = std::min(min_y, p.y_km);
        max_y = std::max(max_y, p.y_km);
    }
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
    const double eps = span * 1e-9;

    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) {
        Rng h(mix_seed(0x5eedu + static_cast<std::uint64_t>(i)));
        pts[i] = {centroids[i].x_km + eps * (2.0 * h.uniform() - 1.0),
                  centroids[i].y_km + eps * (2.0 * h.uniform() - 1.0)};
    }

    // collinearity check (on the perturbed sites a strict zero cannot occur,
    // so test the originals with a tolerance scaled to the span)
    bool collinear = true;
    for (int i = 2; i < n && collinear; ++i) {
        const Vec2 a{centroids[0].x_km, centroids[0].y_km};
        const Vec2 b{centroids[1].x_km, centroids[1].y_km};
        const Vec2 c{centroids[i].x_km, centroids[i].y_km};
        if (std::abs(cross(a, b, c)) > span * span * 1e-12) collinear = false;
    }
    if (collinear) throw GeometryError("voronoi_adjacency: all centroids collinear");

    // super-triangle far outside the data
    const double cx = (min_x + max_x) / 2.0, cy = (min_y + max_y) / 2.0;
    const double r = 64.0 * span + 1.0;
    std::vector<Vec2> verts = pts;
    verts.push_back({cx - 2.0 * r, cy - r});
    verts.push_back({cx + 2.0 * r, cy - r});
    verts.push_back({cx, cy + 2.0 * r});
    const int s0 = n, s1 = n + 1, s2 = n + 2;

    std::vector<Triangle> triangles;
    triangles.push_back({s0, s1, s2});

    auto ccw = [&](Triangle& t) {
        if (cross(verts[t.a], verts[t.b], verts[t.c]) < 0.0) std::swap(t.b, t.c);
    };
    ccw(triangles[0]);

    for (int p = 0; p < n; ++p) {
        // cavity: triangles whose circumcircle contains the new point
        std::vector<Triangle> keep;
        std::map<std::pair<int, int>, int> edge_count;
        keep.reserve(triangles.size() + 2);
        for (const Triangle& t : triangles) {
            if (in_circumcircle(verts[t.a], verts[t.b], verts[t.c], verts[p])) {
                const std::pair<int, int> edges[3] = {{std::min(t.a, t.b), std::max(t.a, t.b)},
                                                      {std::min(t.b, t.c), std::max(t.b, t.c)},
                                                      {std::min(t.c, t.a), std::max(t.c, t.a)}};
                for (const auto& e : edges) ++edge_count[e];
            } else {
                keep.push_back(t);
            }
        }
        // boundary edges appear exactly once; fan them to the new point
        for (const auto& [edge, count] : edge_count) {
            if (count != 1) continue;
            Triangle t{edge.first, edge.second, p};
            ccw(t);
            keep.push_back(t);
        }
        triangles = std::move(keep);
    }

    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    for (const Triangle& t : triangles) {
        if (t.a >= n || t.b >= n || t.c >= n) continue;  // touches the super-triangle
        adj[static_cast<std::size_t>(t.a) * n + t.b] = 1;
        adj[static_cast<std::size_t>(t.b) * n + t.a] = 1;
        adj[static_cast<std::size_t>(t.b) * n + t.c] = 1;
        adj[static_cast<std::size_t>(t.c) * n + t.b] = 1;
        adj[static_cast<std::size_t>(t.a) * n + t.c] = 1;
        adj[static_cast<std::size_t>(t.c) * n + t.a] = 1;
    }
    return adj;
}

std::vector<int> adjacency_degrees(const std::vector<std::uint8_t>& adjacency, int n) {
    std::vector<int> degrees(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adjacency[static_cast<std::size_t>(i) * n + j]) ++degrees[i];
    return degrees;
}

}  // namespace tessera::geo
