#pragma once

#include <vector>

namespace tessera::geo {

/// WGS-style latitude/longitude pair in degrees.
struct GeoPoint {
    double lat = 0.0;  // [-90, 90]
    double lon = 0.0;  // [-180, 180]
};

/// Point in kilometers in an equirectangular projection about a reference.
struct ProjectedPoint {
    double x_km = 0.0;
    double y_km = 0.0;
};

bool is_valid(const GeoPoint& p);
void require_valid(const GeoPoint& p);

/// Equirectangular projection about a fixed reference origin:
///   x = R * dlon * cos(lat_ref), y = R * dlat   (angles in radians, R = 6371 km)
/// Distances near the reference are metric, which makes squared-error
/// clustering in km meaningful.
class Projection {
public:
    static constexpr double kEarthRadiusKm = 6371.0;

    Projection() = default;
    explicit Projection(GeoPoint reference);

    /// Reference = centroid of the dataset.
    static Projection about_centroid(const std::vector<GeoPoint>& points);

    ProjectedPoint project(const GeoPoint& p) const;
    GeoPoint unproject(const ProjectedPoint& p) const;

    const GeoPoint& reference() const { return ref_; }

private:
    GeoPoint ref_{0.0, 0.0};
    double cos_ref_ = 1.0;
};

}  // namespace tessera::geo
