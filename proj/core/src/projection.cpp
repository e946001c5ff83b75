#include "tessera/geo/geopoint.hpp"

#include <cmath>
#include <numbers>

#include "tessera/errors.hpp"

namespace tessera::geo {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

void require_valid(const GeoPoint& p) {
    if (!is_valid(p))
        throw InvalidArgument("coordinates out of range: lat=" + std::to_string(p.lat) +
                              " lon=" + std::to_string(p.lon));
}

Projection::Projection(GeoPoint reference) : ref_(reference) {
    require_valid(ref_);
    cos_ref_ = std::cos(ref_.lat * kDegToRad);
}

Projection Projection::about_centroid(const std::vector<GeoPoint>& points) {
    if (points.empty()) throw InvalidArgument("projection: empty point set");
    double lat = 0.0, lon = 0.0;
    for (const auto& p : points) {
        require_valid(p);
        lat += p.lat;
        lon += p.lon;
    }
    const double n = static_cast<double>(points.size());
    return Projection(GeoPoint{lat / n, lon / n});
}

ProjectedPoint Projection::project(const GeoPoint& p) const {
    require_valid(p);
    return {kEarthRadiusKm * (p.lon - ref_.lon) * kDegToRad * cos_ref_,
            kEarthRadiusKm * (p.lat - ref_.lat) * kDegToRad};
}

GeoPoint Projection::unproject(const ProjectedPoint& p) const {
    return {ref_.lat + p.y_km / (kEarthRadiusKm * kDegToRad),
            ref_.lon + p.x_km / (kEarthRadiusKm * kDegToRad * cos_ref_)};
}

}  // namespace tessera::geo
