#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace coclab {

/// Numeric formatting contract for emitted CSV: 17 significant digits,
/// '.' decimal separator, LF line endings.
std::string csv_num(double v);
std::string csv_num(std::size_t v);

/// Writes one CSV file with a leading comment line (config hash provenance)
/// and a header row.
class csv_writer {
  public:
    csv_writer(const std::filesystem::path& path, const std::string& comment,
               const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);

  private:
    std::ofstream out_;
    std::size_t columns_;
};

} // namespace coclab
