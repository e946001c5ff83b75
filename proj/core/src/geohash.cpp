#include "tessera/geo/geohash.hpp"

#include <cmath>
#include <numbers>

#include "tessera/errors.hpp"

namespace tessera::geo {

namespace {

int alphabet_index(char c) {
    for (int i = 0; i < 32; ++i)
        if (kGeohashAlphabet[i] == c) return i;
    return -1;
}

}  // namespace

GeohashCell geohash_encode(const GeoPoint& p, int level) {
    require_valid(p);
    if (level < 1 || level > kMaxGeohashLevel)
        throw InvalidArgument("geohash level must be in [1, 12], got " + std::to_string(level));

    GeohashCell cell;
    cell.level = level;
    cell.lat_min = -90.0;
    cell.lat_max = 90.0;
    cell.lon_min = -180.0;
    cell.lon_max = 180.0;

    bool lon_turn = true;  // longitude bit comes first
    int bits = 0;
    int symbol = 0;
    while (static_cast<int>(cell.code.size()) < level) {
        if (lon_turn) {
            const double mid = (cell.lon_min + cell.lon_max) / 2.0;
            if (p.lon >= mid) {
                symbol = (symbol << 1) | 1;
                cell.lon_min = mid;
            } else {
                symbol <<= 1;
                cell.lon_max = mid;
            }
        } else {
            const double mid = (cell.lat_min + cell.lat_max) / 2.0;
            if (p.lat >= mid) {
                symbol = (symbol << 1) | 1;
                cell.lat_min = mid;
            } else {
                symbol <<= 1;
                cell.lat_max = mid;
            }
        }
        lon_turn = !lon_turn;
        if (++bits == 5) {
            cell.code.push_back(kGeohashAlphabet[symbol]);
            bits = 0;
            symbol = 0;
        }
    }
    return cell;
}

GeohashCell geohash_decode(const std::string& code) {
    if (code.empty()) throw ParseError("geohash: empty code");

    GeohashCell cell;
    cell.code = code;
    cell.level = static_cast<int>(code.size());
    cell.lat_min = -90.0;
    cell.lat_max = 90.0;
    cell.lon_min = -180.0;
    cell.lon_max = 180.0;

    bool lon_turn = true;
    for (char c : code) {
        const int symbol = alphabet_index(c);
        if (symbol < 0) throw ParseError(std::string("geohash: illegal character '") + c + "'");
        for (int b = 4; b >= 0; --b) {
            const int bit = (symbol >> b) & 1;
            if (lon_turn) {
                const double mid = (cell.lon_min + cell.lon_max) / 2.0;
                (bit ? cell.lon_min : cell.lon_max) = mid;
            } else {
                const double mid = (cell.lat_min + cell.lat_max) / 2.0;
                (bit ? cell.lat_min : cell.lat_max) = mid;
            }
            lon_turn = !lon_turn;
        }
    }
    return cell;
}

std::array<std::string, 8> geohash_neighbors(const std::string& code) {
    const GeohashCell cell = geohash_decode(code);
    const GeoPoint c = cell.center();
    const double dlat = cell.lat_span();
    const double dlon = cell.lon_span();

    // lat/lon steps per compass direction, N first, clockwise
    static constexpr int kLatStep[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int kLonStep[8] = {0, 1, 1, 1, 0, -1, -1, -1};

    std::array<std::string, 8> out;
    std::vector<std::string> missing;
    for (int d = 0; d < 8; ++d) {
        const double lat = c.lat + kLatStep[d] * dlat;
        double lon = c.lon + kLonStep[d] * dlon;
        if (lon >= 180.0) lon -= 360.0;
        if (lon < -180.0) lon += 360.0;
        if (lat > 90.0 || lat < -90.0) {
            missing.emplace_back(kCompassDirections[d]);
            continue;
        }
        out[d] = geohash_encode({lat, lon}, cell.level).code;
    }
    if (!missing.empty()) {
        std::string what = "geohash '" + code + "' touches a pole; missing neighbors:";
        for (const auto& m : missing) what += " " + m;
        throw PartialNeighborhoodError(what, std::move(missing));
    }
    return out;
}

double cell_width_km(const GeohashCell& cell) {
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double lat_mid = (cell.lat_min + cell.lat_max) / 2.0;
    return Projection::kEarthRadiusKm * kDegToRad * cell.lon_span() * std::cos(lat_mid * kDegToRad);
}

double cell_height_km(const GeohashCell& cell) {
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    return Projection::kEarthRadiusKm * kDegToRad * cell.lat_span();
}

}  // namespace tessera::geo
