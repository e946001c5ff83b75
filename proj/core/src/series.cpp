#include "tessera/data/series.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tessera/errors.hpp"
#include "tessera/io/csv.hpp"

namespace tessera::data {

using nlohmann::json;

void SeriesMatrix::save(const std::string& path, std::uint64_t seed,
                        const std::string& config_hash) const {
    io::CsvWriter out(path);
    out.comment("seed=" + std::to_string(seed) + " config_hash=" + config_hash);
    std::vector<std::string> header = {"region"};
    for (int col = 0; col < t(); ++col) header.push_back("t" + std::to_string(col));
    out.row(header);
    for (int r = 0; r < n(); ++r) {
        std::vector<std::string> row = {region_ids[r]};
        for (int col = 0; col < t(); ++col) row.push_back(io::format_double(values(r, col)));
        out.row(row);
    }
    out.finish();

    json meta;
    meta["bin_minutes"] = bin_minutes;
    meta["t0"] = format_timestamp(t0);
    meta["regions"] = n();
    meta["steps"] = t();
    meta["seed"] = seed;
    meta["config_hash"] = config_hash;
    std::ofstream mf(path + ".meta.json", std::ios::binary | std::ios::trunc);
    if (!mf) throw IoError("cannot write file: " + path + ".meta.json");
    mf << meta.dump(2) << "\n";
}

SeriesMatrix SeriesMatrix::load(const std::string& path) {
    const io::CsvTable table = io::read_csv(path);
    if (table.header.empty() || table.header[0] != "region")
        throw FormatError("series CSV: expected a 'region' header column: " + path);
    SeriesMatrix m;
    const int steps = static_cast<int>(table.header.size()) - 1;
    m.values.resize(static_cast<int>(table.rows.size()), steps);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (static_cast<int>(row.size()) != steps + 1)
            throw FormatError("series CSV: ragged row " + std::to_string(r));
        m.region_ids.push_back(row[0]);
        for (int col = 0; col < steps; ++col)
            m.values(static_cast<int>(r), col) = io::parse_double(row[col + 1]);
    }

    std::ifstream mf(path + ".meta.json", std::ios::binary);
    if (mf) {
        std::ostringstream buf;
        buf << mf.rdbuf();
        try {
            const json meta = json::parse(buf.str());
            m.bin_minutes = meta.value("bin_minutes", 60);
            if (meta.contains("t0")) {
                if (auto ts = parse_timestamp(meta["t0"].get<std::string>())) m.t0 = *ts;
            }
        } catch (const json::parse_error&) {
            throw ParseError("series metadata unreadable: " + path + ".meta.json");
        }
    }
    return m;
}

AggregateResult aggregate_series(const std::vector<TripRecord>& records,
                                 const geo::Tessellation& tessellation, int bin_minutes,
                                 int force_days) {
    if (bin_minutes < 1 || 24 * 60 % bin_minutes != 0)
        throw InvalidArgument("aggregate: bin minutes must divide a day");

    AggregateResult result;
    SeriesMatrix& m = result.series;
    m.bin_minutes = bin_minutes;

    const int n = tessellation.n();
    for (int r = 0; r < n; ++r) {
        if (tessellation.scheme == geo::Tessellation::Scheme::kGeohash)
            m.region_ids.push_back(tessellation.code_of(r));
        else
            m.region_ids.push_back("v" + std::to_string(r));
    }

    if (records.empty()) {
        m.values = Eigen::MatrixXd::Zero(n, force_days > 0 ? force_days * m.bins_per_day() : 0);
        return result;
    }

    const std::int64_t bin_seconds = static_cast<std::int64_t>(bin_minutes) * 60;
    std::int64_t ts_min = records[0].timestamp, ts_max = records[0].timestamp;
    for (const auto& rec : records) {
        ts_min = std::min(ts_min, rec.timestamp);
        ts_max = std::max(ts_max, rec.timestamp);
    }
    m.t0 = (ts_min / bin_seconds) * bin_seconds;
    if (ts_min < 0 && m.t0 > ts_min) m.t0 -= bin_seconds;

    int steps;
    if (force_days > 0)
        steps = force_days * m.bins_per_day();
    else
        steps = static_cast<int>((ts_max - m.t0) / bin_seconds) + 1;
    m.values = Eigen::MatrixXd::Zero(n, steps);

    // Voronoi assignment works in the projection the tessellation was built in
    std::vector<geo::ProjectedPoint> sites;
    geo::Projection projection;
    if (tessellation.scheme == geo::Tessellation::Scheme::kVoronoi) {
        projection = geo::Projection(tessellation.projection_ref);
        sites.resize(n);
        for (int r = 0; r < n; ++r) sites[r] = projection.project(tessellation.centroids[r]);
    }

    for (const auto& rec : records) {
        const std::int64_t bin = (rec.timestamp - m.t0) / bin_seconds;
        if (bin < 0 || bin >= steps) {
            ++result.stats.dropped_outside;
            continue;
        }
        int region;
        if (tessellation.scheme == geo::Tessellation::Scheme::kVoronoi) {
            region = geo::assign_nearest(projection.project({rec.lat, rec.lon}), sites);
        } else {
            region = tessellation.locate({rec.lat, rec.lon});
            if (region < 0) {
                ++result.stats.dropped_outside;
                continue;
            }
        }
        m.values(region, static_cast<int>(bin)) += 1.0;
        ++result.stats.accepted;
    }
    return result;
}

void write_heatmap(const std::string& path, const geo::Tessellation& tessellation,
                   const SeriesMatrix& series, std::uint64_t seed, const std::string& config_hash) {
    if (tessellation.n() != series.n())
        throw InvalidArgument("heatmap: tessellation and series region counts differ");
    io::CsvWriter out(path);
    out.comment("seed=" + std::to_string(seed) + " config_hash=" + config_hash);
    out.row({"cell_id", "lat", "lon", "count"});
    for (int r = 0; r < series.n(); ++r) {
        const auto& c = tessellation.centroids[r];
        out.row({series.region_ids[r], io::format_double(c.lat), io::format_double(c.lon),
                 io::format_double(series.values.row(r).sum())});
    }
    out.finish();
}

}  // namespace tessera::data
