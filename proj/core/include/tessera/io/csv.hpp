#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tessera::io {

/// Round-trip-exact, locale-independent double formatting (shortest form).
std::string format_double(double v);

/// Parsed CSV contents. Leading '#' lines are collected as comments so that
/// artifacts can embed seed/config metadata without breaking consumers.
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

/// Minimal writer; fields containing commas/quotes are quoted.
class CsvWriter {
public:
    explicit CsvWriter(std::string path);

    void comment(const std::string& line);
    void row(const std::vector<std::string>& fields);
    /// Flush and close; throws IoError on failure.
    void finish();

    ~CsvWriter();

private:
    std::string path_;
    std::string buffer_;
    bool finished_ = false;
};

double parse_double(const std::string& field);
long long parse_int(const std::string& field);

}  // namespace tessera::io
