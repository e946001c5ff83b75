#pragma once

#include <array>
#include <string>

#include "tessera/geo/geopoint.hpp"

namespace tessera::geo {

/// One geohash rectangle. `level` equals the code length; the bounding box is
/// the dyadic cell named by the code's interleaved bits (longitude bit first).
struct GeohashCell {
    std::string code;
    int level = 0;
    double lat_min = 0.0, lat_max = 0.0;
    double lon_min = 0.0, lon_max = 0.0;

    GeoPoint center() const { return {(lat_min + lat_max) / 2.0, (lon_min + lon_max) / 2.0}; }
    double lat_span() const { return lat_max - lat_min; }
    double lon_span() const { return lon_max - lon_min; }
    bool contains(const GeoPoint& p) const {
        return p.lat >= lat_min && p.lat < lat_max && p.lon >= lon_min && p.lon < lon_max;
    }
};

inline constexpr char kGeohashAlphabet[] = "0123456789bcdefghjkmnpqrstuvwxyz";
inline constexpr int kMaxGeohashLevel = 12;

GeohashCell geohash_encode(const GeoPoint& p, int level);
GeohashCell geohash_decode(const std::string& code);

/// Compass neighbor order used throughout: N, NE, E, SE, S, SW, W, NW.
inline constexpr std::array<const char*, 8> kCompassDirections = {"N", "NE", "E", "SE",
                                                                  "S", "SW", "W", "NW"};

/// The 8 same-level cells obtained by offsetting the center by one cell
/// width/height per direction. Longitude wraps at the antimeridian; a cell
/// touching lat +-90 raises PartialNeighborhoodError naming the lost
/// directions.
std::array<std::string, 8> geohash_neighbors(const std::string& code);

/// Metric extents of a cell (width measured at the cell's center latitude).
double cell_width_km(const GeohashCell& cell);
double cell_height_km(const GeohashCell& cell);

}  // namespace tessera::geo
