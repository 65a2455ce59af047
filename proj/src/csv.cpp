#include "coclab/csv.hpp"

#include <cstdio>

#include "coclab/errors.hpp"

namespace coclab {

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_num(std::size_t v) { return std::to_string(v); }

csv_writer::csv_writer(const std::filesystem::path& path, const std::string& comment,
                       const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_)
        throw error("csv_writer: cannot open " + path.string());
    out_ << "# " << comment << "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 < header.size() ? "," : "");
    out_ << "\n";
}

void csv_writer::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw error("csv_writer: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
    out_ << "\n";
}

} // namespace coclab
