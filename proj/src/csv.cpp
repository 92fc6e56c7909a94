#include "henchsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace henchsim {

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quoted(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string format_cell(const Csv::Cell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) return quoted(*s);
    if (const auto* d = std::get_if<double>(&cell)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", *d);
        return buf;
    }
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    return std::to_string(std::get<std::uint64_t>(cell));
}

std::string render_csv(const Csv& table) {
    std::string out;
    for (const auto& c : table.comments) {
        out += "# ";
        out += c;
        out += '\n';
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += quoted(table.header[i]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

void emit_csv(const Csv& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    const std::string body = render_csv(table);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("emit_csv: write failure on " + path);
}

CsvData read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_csv: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();

    CsvData data;
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool line_start = true;
    bool skipping_comment = false;
    auto flush_line = [&]() {
        fields.push_back(cur);
        cur.clear();
        if (data.header.empty())
            data.header = fields;
        else
            data.rows.push_back(fields);
        fields.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (skipping_comment) {
            if (c == '\n') {
                skipping_comment = false;
                line_start = true;
            }
            continue;
        }
        if (line_start && c == '#' && !in_quotes) {
            skipping_comment = true;
            continue;
        }
        line_start = false;
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c == '\n') {
            flush_line();
            line_start = true;
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty() || !fields.empty()) flush_line();
    return data;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

} // namespace henchsim
