#ifndef HENCHSIM_CSV_HPP
#define HENCHSIM_CSV_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace henchsim {

// Small CSV table: '#'-prefixed comment lines, one header row, data rows.
// Doubles are printed with 9 significant digits; quoting is RFC-4180 style.
struct Csv {
    using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;

    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

std::string format_cell(const Csv::Cell& cell);
std::string render_csv(const Csv& table);
void emit_csv(const Csv& table, const std::string& path);

// Reads back what emit_csv wrote (comments skipped, all cells as strings).
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvData read_csv(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

} // namespace henchsim

#endif
