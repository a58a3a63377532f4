#include "flexcert/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "flexcert/error.hpp"

namespace flexcert {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    fail(ErrorKind::Io, path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorKind::Internal, "format_number failed");
  return std::string(buf, ptr);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      table.values = Matrix(0, table.header.size());
      continue;
    }
    if (cells.size() != table.header.size())
      fail(ErrorKind::ShapeMismatch, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                         std::to_string(table.header.size()) + " columns");
    Vector row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_number(cells[c], path, lineno);
    table.values.append_row(row);
  }
  if (table.header.empty()) fail(ErrorKind::Io, path.string() + ": missing header");
  return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values) {
  if (header.size() != values.cols())
    fail(ErrorKind::ShapeMismatch, "write_csv: header does not match column count");
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c)
      out << (c ? "," : "") << format_number(values(r, c));
    out << '\n';
  }
  write_text(path, out.str());
}

void write_hpolyhedron_csv(const std::filesystem::path& path, const HPolyhedron& p,
                           const std::vector<std::string>& names) {
  if (names.size() != p.dim()) fail(ErrorKind::ShapeMismatch, "write_hpolyhedron_csv: names");
  std::vector<std::string> header = names;
  header.push_back("b");
  Matrix m(p.num_rows(), p.dim() + 1);
  for (std::size_t j = 0; j < p.num_rows(); ++j) {
    for (std::size_t c = 0; c < p.dim(); ++c) m(j, c) = p.row(j)[c];
    m(j, p.dim()) = p.rhs(j);
  }
  write_csv(path, header, m);
}

HPolyhedron read_hpolyhedron_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 2 || t.header.back() != "b")
    fail(ErrorKind::Io, path.string() + ": last column must be 'b'");
  const std::size_t n = t.header.size() - 1;
  HPolyhedron p(n);
  for (std::size_t j = 0; j < t.values.rows(); ++j)
    p.add_row(t.values.row(j).first(n), t.values(j, n));
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace flexcert
