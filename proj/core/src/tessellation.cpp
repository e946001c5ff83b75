#include "tessera/geo/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tessera/errors.hpp"
#include "tessera/geo/delaunay.hpp"

namespace tessera::geo {

using nlohmann::json;

std::vector<std::uint8_t> Tessellation::dense_adjacency() const {
    const int size = n();
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(size) * size, 0);
    for (const auto& [i, j] : edges) {
        adj[static_cast<std::size_t>(i) * size + j] = 1;
        adj[static_cast<std::size_t>(j) * size + i] = 1;
    }
    return adj;
}

std::vector<std::vector<int>> Tessellation::neighbor_lists() const {
    std::vector<std::vector<int>> lists(n());
    for (const auto& [i, j] : edges) {
        lists[i].push_back(j);
        lists[j].push_back(i);
    }
    for (auto& l : lists) std::sort(l.begin(), l.end());
    return lists;
}

std::pair<int, int> Tessellation::grid_position(int region) const {
    if (scheme != Scheme::kGeohash) throw InvalidArgument("grid_position: not a geohash tessellation");
    return {region / grid_cols, region % grid_cols};
}

int Tessellation::region_at(int row, int col) const {
    if (scheme != Scheme::kGeohash) throw InvalidArgument("region_at: not a geohash tessellation");
    if (row < 0 || row >= grid_rows || col < 0 || col >= grid_cols) return -1;
    return row * grid_cols + col;
}

std::string Tessellation::code_of(int region) const {
    if (scheme != Scheme::kGeohash) throw InvalidArgument("code_of: not a geohash tessellation");
    return geohash_encode(centroids[region], level).code;
}

int Tessellation::locate(const GeoPoint& p) const {
    if (scheme == Scheme::kVoronoi) {
        const Projection proj(projection_ref);
        // nearest centroid in the same projected space the cells were built in
        std::vector<ProjectedPoint> sites(centroids.size());
        for (std::size_t i = 0; i < centroids.size(); ++i) sites[i] = proj.project(centroids[i]);
        return assign_nearest(proj.project(p), sites);
    }
    if (centroids.empty()) return -1;
    const GeohashCell origin = geohash_encode(centroids[0], level);  // NW cell
    const double row_f = (origin.center().lat - p.lat) / origin.lat_span();
    const double col_f = (p.lon - origin.center().lon) / origin.lon_span();
    const int row = static_cast<int>(std::llround(row_f));
    const int col = static_cast<int>(std::llround(col_f));
    const int region = region_at(row, col);
    if (region < 0) return -1;
    // round-off guard: confirm by code
    return geohash_encode(p, level).code == code_of(region) ? region : -1;
}

namespace {

std::vector<std::pair<int, int>> sorted_edges_from_adjacency(const std::vector<std::uint8_t>& adj,
                                                             int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (adj[static_cast<std::size_t>(i) * n + j]) edges.emplace_back(i, j);
    return edges;
}

}  // namespace

std::string Tessellation::to_json(std::uint64_t seed, const std::string& config_hash) const {
    json doc;
    doc["scheme"] = scheme == Scheme::kGeohash ? "geohash" : "voronoi";
    if (scheme == Scheme::kGeohash) {
        doc["level"] = level;
        doc["grid"] = {{"rows", grid_rows}, {"cols", grid_cols}};
    } else {
        doc["k"] = k;
        doc["projection"] = {{"ref_lat", projection_ref.lat}, {"ref_lon", projection_ref.lon}};
    }
    json cents = json::array();
    for (const auto& c : centroids) cents.push_back(json::array({c.lat, c.lon}));
    doc["centroids"] = std::move(cents);
    json edge_list = json::array();
    for (const auto& [i, j] : edges) edge_list.push_back(json::array({i, j}));
    doc["adjacency"] = std::move(edge_list);
    doc["meta"] = {{"seed", seed}, {"config_hash", config_hash}};
    return doc.dump(2);
}

Tessellation Tessellation::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("tessellation JSON: ") + e.what());
    }
    Tessellation t;
    const std::string scheme = doc.at("scheme").get<std::string>();
    if (scheme == "geohash") {
        t.scheme = Scheme::kGeohash;
        t.level = doc.at("level").get<int>();
        t.grid_rows = doc.at("grid").at("rows").get<int>();
        t.grid_cols = doc.at("grid").at("cols").get<int>();
    } else if (scheme == "voronoi") {
        t.scheme = Scheme::kVoronoi;
        t.k = doc.at("k").get<int>();
        t.projection_ref = {doc.at("projection").at("ref_lat").get<double>(),
                            doc.at("projection").at("ref_lon").get<double>()};
    } else {
        throw ParseError("tessellation JSON: unknown scheme '" + scheme + "'");
    }
    for (const auto& c : doc.at("centroids")) t.centroids.push_back({c.at(0), c.at(1)});
    for (const auto& e : doc.at("adjacency")) {
        const int i = e.at(0).get<int>();
        const int j = e.at(1).get<int>();
        if (i < 0 || j < 0 || i >= t.n() || j >= t.n() || i == j)
            throw ParseError("tessellation JSON: bad edge");
        t.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(t.edges.begin(), t.edges.end());
    if (t.scheme == Scheme::kVoronoi) t.k = t.n();
    return t;
}

void Tessellation::save(const std::string& path, std::uint64_t seed,
                        const std::string& config_hash) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out << to_json(seed, config_hash) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Tessellation Tessellation::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

Tessellation build_geohash_tessellation(const std::vector<GeoPoint>& points, int level) {
    if (points.empty()) throw InvalidArgument("geohash tessellation: no points");
    double lat_min = points[0].lat, lat_max = lat_min;
    double lon_min = points[0].lon, lon_max = lon_min;
    for (const auto& p : points) {
        require_valid(p);
        lat_min = std::min(lat_min, p.lat);
        lat_max = std::max(lat_max, p.lat);
        lon_min = std::min(lon_min, p.lon);
        lon_max = std::max(lon_max, p.lon);
    }

    const GeohashCell nw = geohash_encode({lat_max, lon_min}, level);
    const GeohashCell se = geohash_encode({lat_min, lon_max}, level);
    const double dlat = nw.lat_span();
    const double dlon = nw.lon_span();

    Tessellation t;
    t.scheme = Tessellation::Scheme::kGeohash;
    t.level = level;
    t.grid_rows = static_cast<int>(std::llround((nw.center().lat - se.center().lat) / dlat)) + 1;
    t.grid_cols = static_cast<int>(std::llround((se.center().lon - nw.center().lon) / dlon)) + 1;

    for (int r = 0; r < t.grid_rows; ++r)
        for (int c = 0; c < t.grid_cols; ++c)
            t.centroids.push_back({nw.center().lat - r * dlat, nw.center().lon + c * dlon});

    // 8-neighbor lattice edges
    for (int r = 0; r < t.grid_rows; ++r) {
        for (int c = 0; c < t.grid_cols; ++c) {
            const int i = r * t.grid_cols + c;
            static constexpr int kDr[4] = {0, 1, 1, 1};
            static constexpr int kDc[4] = {1, -1, 0, 1};
            for (int d = 0; d < 4; ++d) {
                const int rr = r + kDr[d];
                const int cc = c + kDc[d];
                if (rr < 0 || rr >= t.grid_rows || cc < 0 || cc >= t.grid_cols) continue;
                const int j = rr * t.grid_cols + cc;
                t.edges.emplace_back(std::min(i, j), std::max(i, j));
            }
        }
    }
    std::sort(t.edges.begin(), t.edges.end());
    return t;
}

VoronoiBuild build_voronoi_tessellation(const std::vector<GeoPoint>& points, int k,
                                        std::uint64_t seed) {
    if (points.empty()) throw InvalidArgument("voronoi tessellation: no points");
    const Projection proj = Projection::about_centroid(points);
    std::vector<ProjectedPoint> projected(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) projected[i] = proj.project(points[i]);

    VoronoiBuild build;
    build.kmeans = kmeans_cluster(projected, k, seed);

    Tessellation& t = build.tessellation;
    t.scheme = Tessellation::Scheme::kVoronoi;
    t.k = k;
    t.projection_ref = proj.reference();
    for (const auto& c : build.kmeans.centroids) t.centroids.push_back(proj.unproject(c));

    if (k == 2) {
        t.edges.emplace_back(0, 1);
    } else if (k >= 3) {
        const auto adj = voronoi_adjacency(build.kmeans.centroids);
        t.edges = sorted_edges_from_adjacency(adj, k);
    }
    return build;
}

}  // namespace tessera::geo
