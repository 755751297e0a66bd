#include "lvglasso/matrix_io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lvglasso/errors.hpp"

namespace lvglasso {

namespace {

// Parses one numeric token; complains with the file position on failure.
double parse_token(const std::string& tok, const std::filesystem::path& path,
                   std::size_t row, std::size_t col) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  bool ok = end != begin && errno == 0;
  if (ok) {
    while (*end != '\0') {
      if (!std::isspace(static_cast<unsigned char>(*end))) {
        ok = false;
        break;
      }
      ++end;
    }
  }
  if (!ok) {
    std::ostringstream msg;
    msg << path.string() << ": cannot parse entry at row " << row << ", column " << col
        << ": '" << tok << "'";
    throw std::invalid_argument(msg.str());
  }
  return v;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;  // tolerate trailing blank lines
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t col = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string tok =
          comma == std::string::npos ? line.substr(start) : line.substr(start, comma - start);
      ++col;
      row.push_back(parse_token(tok, path, lineno, col));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << path.string() << ": row " << lineno << " has " << row.size()
          << " columns, expected " << rows.front().size();
      throw std::invalid_argument(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::invalid_argument("empty matrix file: " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_edges_csv(const std::filesystem::path& path, const EdgeSet& edges) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& [i, j] : edges.pairs()) out << i << ',' << j << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

EdgeSet read_edges_csv(const std::filesystem::path& path, int p) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  EdgeSet es(p);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      std::ostringstream msg;
      msg << path.string() << ": row " << lineno << " is not an 'i,j' pair: '" << line << "'";
      throw std::invalid_argument(msg.str());
    }
    const double di = parse_token(line.substr(0, comma), path, lineno, 1);
    const double dj = parse_token(line.substr(comma + 1), path, lineno, 2);
    es.add(static_cast<int>(di), static_cast<int>(dj));
  }
  return es;
}

}  // namespace lvglasso
