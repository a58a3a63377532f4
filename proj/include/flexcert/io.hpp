#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flexcert/numerics.hpp"
#include "flexcert/polyhedron.hpp"

namespace flexcert {

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

// Comma-separated numbers with one header row.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values);

// Shortest text that reads back to the same double.
std::string format_number(double v);

// Rows (a_1..a_N, b) of A d >= b under a header of variable names plus "b".
void write_hpolyhedron_csv(const std::filesystem::path& path, const HPolyhedron& p,
                           const std::vector<std::string>& names);
HPolyhedron read_hpolyhedron_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace flexcert
