#include "tessera/data/trips.hpp"

#include <array>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "tessera/errors.hpp"
#include "tessera/geo/geopoint.hpp"
#include "tessera/io/csv.hpp"

namespace tessera::data {

namespace {

// Howard Hinnant's days-from-civil algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

const std::array<const char*, 4> kTimestampAliases = {"timestamp", "ts", "tpep_pickup_datetime",
                                                      "pickup_datetime"};
const std::array<const char*, 3> kLatAliases = {"lat", "latitude", "pickup_latitude"};
const std::array<const char*, 3> kLonAliases = {"lon", "longitude", "pickup_longitude"};
const std::array<const char*, 2> kKindAliases = {"kind", "type"};

template <std::size_t N>
std::optional<std::size_t> find_column(const io::CsvTable& table, const std::string& preferred,
                                       const std::array<const char*, N>& aliases) {
    if (!preferred.empty()) return table.column(preferred);
    for (const char* alias : aliases)
        if (auto col = table.column(alias)) return col;
    return std::nullopt;
}

}  // namespace

TripSchema TripSchema::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("trip schema JSON: ") + e.what());
    }
    TripSchema s;
    s.timestamp = doc.value("timestamp", "");
    s.lat = doc.value("lat", "");
    s.lon = doc.value("lon", "");
    s.kind = doc.value("kind", "");
    return s;
}

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
    int y, mo, d, h, mi, s;
    char sep;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s) != 7)
        return std::nullopt;
    if (sep != ' ' && sep != 'T') return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 60)
        return std::nullopt;
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02lld:%02lld:%02lld", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

IngestResult ingest_trips(const std::string& path, const TripSchema& schema,
                          std::optional<std::int64_t> window_begin,
                          std::optional<std::int64_t> window_end) {
    const io::CsvTable table = io::read_csv(path);
    if (table.header.empty()) throw FormatError("trip CSV has no header: " + path);

    const auto ts_col = find_column(table, schema.timestamp, kTimestampAliases);
    const auto lat_col = find_column(table, schema.lat, kLatAliases);
    const auto lon_col = find_column(table, schema.lon, kLonAliases);
    const auto kind_col = find_column(table, schema.kind, kKindAliases);
    if (!ts_col || !lat_col || !lon_col)
        throw FormatError("trip CSV is missing timestamp/lat/lon columns: " + path);

    IngestResult result;
    const std::size_t need = std::max({*ts_col, *lat_col, *lon_col}) + 1;
    for (const auto& row : table.rows) {
        if (row.size() < need) {
            ++result.report.malformed;
            continue;
        }
        const auto ts = parse_timestamp(row[*ts_col]);
        double lat, lon;
        try {
            lat = io::parse_double(row[*lat_col]);
            lon = io::parse_double(row[*lon_col]);
        } catch (const ParseError&) {
            ++result.report.malformed;
            continue;
        }
        if (!ts || !geo::is_valid({lat, lon})) {
            ++result.report.malformed;
            continue;
        }
        if ((window_begin && *ts < *window_begin) || (window_end && *ts >= *window_end)) {
            ++result.report.out_of_window;
            continue;
        }
        TripRecord rec{*ts, lat, lon, false};
        if (kind_col && row.size() > *kind_col) rec.is_supply = row[*kind_col] == "supply";
        result.records.push_back(rec);
        ++result.report.accepted;
    }

    if (!table.rows.empty() && result.report.malformed * 2 > table.rows.size())
        throw FormatError("trip CSV: " + std::to_string(result.report.malformed) + " of " +
                          std::to_string(table.rows.size()) + " rows malformed: " + path);
    return result;
}

}  // namespace tessera::data
