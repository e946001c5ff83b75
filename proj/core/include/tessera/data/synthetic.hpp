#pragma once

#include <cstdint>
#include <vector>

#include "tessera/data/series.hpp"
#include "tessera/geo/tessellation.hpp"

namespace tessera::data {

/// Synthetic demand generator: per region, Poisson counts around a seasonal
/// mean
///   base * scale_r + sum_k amplitude_k * sin(2 pi t / period_k + phase_r)
/// clamped at zero. `skew` > 0 concentrates mass in a few regions
/// (scale_r = exp(-skew * u_r) renormalized); skew around 20 puts over 80%
/// of the total count in the top decile.
struct SyntheticConfig {
    int regions = 25;
    int days = 60;
    int bin_minutes = 60;
    std::vector<double> periods = {12.0, 24.0, 168.0};  // in time steps
    std::vector<double> amplitudes;                     // empty: base / (2 * #periods) each
    double base = 30.0;
    double noise_std = 0.0;  // extra Gaussian jitter on the mean
    double skew = 0.0;
    std::uint64_t seed = 0;
    bool poisson_sampling = true;  // false: emit the clamped means directly

    void validate() const;
};

SeriesMatrix synthesize_series(const SyntheticConfig& cfg);

/// Companion layouts so the synthetic data can drive every model family:
/// a random Voronoi tessellation (~1 km^2 cells around a reference point)
/// or a square geohash lattice covering `regions` cells.
geo::Tessellation synthetic_voronoi_tessellation(int regions, std::uint64_t seed);
geo::Tessellation synthetic_geohash_tessellation(int regions, int level = 6);

}  // namespace tessera::data
