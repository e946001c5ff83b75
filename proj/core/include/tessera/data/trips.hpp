#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tessera::data {

/// One raw GPS event: a passenger booking (demand) or a driver log-in
/// (supply).
struct TripRecord {
    std::int64_t timestamp = 0;  // seconds since the epoch, local-naive clock
    double lat = 0.0;
    double lon = 0.0;
    bool is_supply = false;
};

/// Column-name mapping for trip CSV files. Empty fields fall back to the
/// built-in aliases (NYC yellow-taxi style names included).
struct TripSchema {
    std::string timestamp;
    std::string lat;
    std::string lon;
    std::string kind;  // optional column with values demand|supply

    static TripSchema from_json(const std::string& text);
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t malformed = 0;
    std::size_t out_of_window = 0;
};

struct IngestResult {
    std::vector<TripRecord> records;
    IngestReport report;
};

/// Parse "YYYY-MM-DD HH:MM:SS" (or with a 'T' separator) as a local-naive
/// instant. Returns nullopt on malformed input.
std::optional<std::int64_t> parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t ts);

/// Read trip records from a headered CSV. Malformed rows (bad timestamp,
/// out-of-range coordinates, missing fields) are counted and skipped; rows
/// outside [window_begin, window_end) are counted separately. Throws IoError
/// if the file is unreadable and FormatError if more than half the rows are
/// malformed.
IngestResult ingest_trips(const std::string& path, const TripSchema& schema = {},
                          std::optional<std::int64_t> window_begin = std::nullopt,
                          std::optional<std::int64_t> window_end = std::nullopt);

}  // namespace tessera::data
