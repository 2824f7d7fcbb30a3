#pragma once

#include <tpiet/error.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace tpiet {

/// A load failure pinned to a file and (1-based) row; row 0 means the whole file.
class LoadError : public Error {
public:
    LoadError(const std::filesystem::path& file, std::size_t row, const std::string& message)
        : Error(file.string() + (row > 0 ? ":" + std::to_string(row) : std::string()) + ": " +
                message),
          file_(file), row_(row) {}

    const std::filesystem::path& file() const noexcept { return file_; }
    std::size_t row() const noexcept { return row_; }

private:
    std::filesystem::path file_;
    std::size_t row_;
};

struct CsvRecord {
    std::size_t line = 0;
    std::vector<std::string> cells;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRecord> records;

    /// Index of a header column, or throws LoadError.
    std::size_t column(const std::filesystem::path& file, std::string_view name) const;
};

/// RFC 4180 subset: comma separated, double-quoted cells may contain commas,
/// quotes ("") and newlines. Blank lines are skipped.
CsvTable parse_csv(std::string_view text, const std::filesystem::path& origin = {});
CsvTable read_csv(const std::filesystem::path& file);

std::string csv_escape(std::string_view cell);
std::string csv_line(const std::vector<std::string>& cells);
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace tpiet
