#include "tessera/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tessera/errors.hpp"
#include "tessera/rng.hpp"

namespace tessera::data {

void SyntheticConfig::validate() const {
    if (regions < 1) throw InvalidArgument("synth: regions must be positive");
    if (days < 1) throw InvalidArgument("synth: days must be positive");
    if (bin_minutes < 1 || 24 * 60 % bin_minutes != 0)
        throw InvalidArgument("synth: bin minutes must divide a day");
    for (double p : periods)
        if (p <= 0.0) throw InvalidArgument("synth: periods must be positive");
    if (!amplitudes.empty() && amplitudes.size() != periods.size())
        throw InvalidArgument("synth: amplitudes must match periods");
    if (base < 0.0) throw InvalidArgument("synth: base must be >= 0");
    if (noise_std < 0.0) throw InvalidArgument("synth: noise std must be >= 0");
    if (skew < 0.0) throw InvalidArgument("synth: skew must be >= 0");
}

SeriesMatrix synthesize_series(const SyntheticConfig& cfg) {
    cfg.validate();
    const int n = cfg.regions;
    const int steps = cfg.days * (24 * 60 / cfg.bin_minutes);

    std::vector<double> amps = cfg.amplitudes;
    if (amps.empty()) amps.assign(cfg.periods.size(), cfg.base / (2.0 * cfg.periods.size()));

    Rng rng(mix_seed(cfg.seed ^ 0x73796e7468ull));

    std::vector<double> phase(n);
    for (int r = 0; r < n; ++r) phase[r] = rng.uniform(0.0, 2.0 * std::numbers::pi);

    // spatial skew: exp(-skew * u) over a seeded region permutation
    std::vector<double> scale(n, 1.0);
    if (cfg.skew > 0.0 && n > 1) {
        std::vector<int> perm(n);
        for (int r = 0; r < n; ++r) perm[r] = r;
        rng.shuffle(perm);
        double total = 0.0;
        for (int r = 0; r < n; ++r) {
            scale[perm[r]] = std::exp(-cfg.skew * r / static_cast<double>(n));
            total += scale[perm[r]];
        }
        for (double& s : scale) s *= n / total;
    }

    SeriesMatrix m;
    m.bin_minutes = cfg.bin_minutes;
    m.t0 = 0;
    m.values.resize(n, steps);
    for (int r = 0; r < n; ++r) m.region_ids.push_back("v" + std::to_string(r));

    for (int r = 0; r < n; ++r) {
        for (int t = 0; t < steps; ++t) {
            double mean = cfg.base;
            for (std::size_t k = 0; k < cfg.periods.size(); ++k)
                mean += amps[k] * std::sin(2.0 * std::numbers::pi * t / cfg.periods[k] + phase[r]);
            mean *= scale[r];
            if (cfg.noise_std > 0.0) mean += cfg.noise_std * rng.normal();
            mean = std::max(mean, 0.0);
            m.values(r, t) =
                cfg.poisson_sampling ? static_cast<double>(rng.poisson(mean)) : mean;
        }
    }
    return m;
}

geo::Tessellation synthetic_voronoi_tessellation(int regions, std::uint64_t seed) {
    if (regions < 1) throw InvalidArgument("synth tessellation: regions must be positive");
    // scatter points over ~1 km^2 per region around a fixed reference, then
    // cluster them; k-means++ keeps the cells roughly even
    Rng rng(mix_seed(seed ^ 0x7465737ull));
    const double side_km = std::sqrt(static_cast<double>(regions));
    const geo::GeoPoint ref{12.9716, 77.5946};
    const geo::Projection proj(ref);

    std::vector<geo::GeoPoint> points;
    const int samples = std::max(regions * 40, 200);
    for (int i = 0; i < samples; ++i) {
        const geo::ProjectedPoint p{rng.uniform(-side_km / 2, side_km / 2),
                                    rng.uniform(-side_km / 2, side_km / 2)};
        points.push_back(proj.unproject(p));
    }
    return geo::build_voronoi_tessellation(points, regions, seed).tessellation;
}

geo::Tessellation synthetic_geohash_tessellation(int regions, int level) {
    if (regions < 1) throw InvalidArgument("synth tessellation: regions must be positive");
    const int side = std::max(1, static_cast<int>(std::llround(std::sqrt(regions))));
    if (side * side != regions)
        throw InvalidArgument("synth geohash tessellation needs a square region count");
    const geo::GeohashCell anchor = geo::geohash_encode({12.9716, 77.5946}, level);
    // span a side x side block of cells from the anchor
    const geo::GeoPoint a = anchor.center();
    const geo::GeoPoint far{a.lat - (side - 1) * anchor.lat_span(),
                            a.lon + (side - 1) * anchor.lon_span()};
    return geo::build_geohash_tessellation({a, far}, level);
}

}  // namespace tessera::data
