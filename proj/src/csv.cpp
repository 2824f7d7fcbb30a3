#include <tpiet/csv.hpp>

#include <fstream>
#include <sstream>

namespace tpiet {

std::size_t CsvTable::column(const std::filesystem::path& file, std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw LoadError(file, 1, "missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text, const std::filesystem::path& origin) {
    std::vector<CsvRecord> rows;
    CsvRecord current;
    std::string cell;
    bool quoted = false;
    bool any = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_record = [&] {
        current.cells.push_back(std::move(cell));
        cell.clear();
        const bool blank = current.cells.size() == 1 && current.cells[0].empty() && !any;
        if (!blank) rows.push_back(std::move(current));
        current = CsvRecord{};
        any = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any = true;
                break;
            case ',':
                current.cells.push_back(std::move(cell));
                cell.clear();
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                ++line;
                current.line = line;
                break;
            default:
                cell.push_back(c);
                any = true;
        }
    }
    if (quoted) throw LoadError(origin, current.line, "unterminated quoted cell");
    if (any || !cell.empty()) end_record();

    CsvTable table;
    if (rows.empty()) throw LoadError(origin, 0, "empty file (missing header)");
    table.header = std::move(rows.front().cells);
    for (auto& h : table.header) {
        while (!h.empty() && h.front() == ' ') h.erase(h.begin());
        while (!h.empty() && h.back() == ' ') h.pop_back();
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].cells.size() != table.header.size()) {
            throw LoadError(origin, rows[i].line,
                            "expected " + std::to_string(table.header.size()) + " cells, got " +
                                std::to_string(rows[i].cells.size()));
        }
        table.records.push_back(std::move(rows[i]));
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError(file, 0, "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), file);
}

std::string csv_escape(std::string_view cell) {
    if (cell.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(cell);
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += csv_escape(cells[i]);
    }
    return out;
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError(file, 0, "cannot write file");
    out << csv_line(header) << '\n';
    for (const auto& row : rows) out << csv_line(row) << '\n';
}

}  // namespace tpiet
