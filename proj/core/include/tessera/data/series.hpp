#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tessera/data/trips.hpp"
#include "tessera/geo/tessellation.hpp"

namespace tessera::data {

/// N regions x T time steps of aggregated counts.
struct SeriesMatrix {
    Eigen::MatrixXd values;  // N x T
    int bin_minutes = 60;
    std::int64_t t0 = 0;  // first bin start
    std::vector<std::string> region_ids;

    int n() const { return static_cast<int>(values.rows()); }
    int t() const { return static_cast<int>(values.cols()); }
    int bins_per_day() const { return 24 * 60 / bin_minutes; }

    /// CSV (row = region, columns = t0..T-1) plus a JSON metadata sidecar at
    /// `path + ".meta.json"`.
    void save(const std::string& path, std::uint64_t seed, const std::string& config_hash) const;
    static SeriesMatrix load(const std::string& path);
};

struct AggregateStats {
    std::size_t accepted = 0;
    std::size_t dropped_outside = 0;  // geohash records outside the study grid
};

struct AggregateResult {
    SeriesMatrix series;
    AggregateStats stats;
};

/// Count records per (region, bin). Regions with no records stay as zero
/// rows. Voronoi assigns every record to its nearest centroid; geohash
/// records outside the study grid are dropped and counted. With `force_days`
/// set, the time axis is exactly that many days from the first bin and later
/// records are dropped.
AggregateResult aggregate_series(const std::vector<TripRecord>& records,
                                 const geo::Tessellation& tessellation, int bin_minutes = 60,
                                 int force_days = 0);

/// Heat-map emission: one CSV row (cell_id, lat, lon, count) per region.
void write_heatmap(const std::string& path, const geo::Tessellation& tessellation,
                   const SeriesMatrix& series, std::uint64_t seed, const std::string& config_hash);

}  // namespace tessera::data
