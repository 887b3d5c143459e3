#pragma once

#include <string>
#include <vector>

namespace smle {

// Minimal CSV layer for this project's artifacts: comma-separated, one header
// row, no quoting or embedded commas (values are numbers or single letters).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Shortest decimal representation that parses back to exactly the same double
// (std::to_chars); integral values print without a trailing ".0".
std::string format_double(double v);
// Strict parse of a full token; returns false on any trailing garbage.
bool parse_double(const std::string& s, double& out);

}  // namespace smle
