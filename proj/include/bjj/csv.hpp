#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bjj {

/// Shortest decimal that round-trips to the same double. Locale independent.
std::string format_shortest(double v);
/// 17 significant digits, the fixed format of trajectory files.
std::string format_digits17(double v);

/// In-memory CSV table; cells are already formatted.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    void add_row(std::vector<std::string> cells);

    std::string str() const;
    /// Writes via a temporary file and rename, so readers never see a partial table.
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Quotes a cell when it contains a separator, quote or newline.
std::string csv_escape(const std::string& cell);

}  // namespace bjj
