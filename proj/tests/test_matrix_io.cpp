#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "lvglasso/errors.hpp"
#include "lvglasso/matrix_io.hpp"
#include "lvglasso/rng.hpp"

using namespace lvglasso;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lvglasso_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("matrix csv round-trip is exact") {
  TempDir tmp;
  Rng rng(909);
  Eigen::MatrixXd m(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = rng.normal() * std::pow(10.0, i - 2);
  m(0, 0) = 0.0;
  m(1, 1) = -1e-300;
  m(2, 2) = 1.0 / 3.0;

  const fs::path file = tmp.path / "m.csv";
  write_matrix_csv(file, m);
  const Eigen::MatrixXd back = read_matrix_csv(file);
  REQUIRE(back.rows() == 4);
  REQUIRE(back.cols() == 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) CHECK(back(i, j) == m(i, j));  // bitwise
}

TEST_CASE("matrix csv parse errors name the entry") {
  TempDir tmp;
  const fs::path file = tmp.path / "bad.csv";
  {
    std::ofstream out(file);
    out << "1,2\n3,oops\n";
  }
  CHECK_THROWS_WITH_AS(read_matrix_csv(file),
                       doctest::Contains("row 2, column 2"), std::invalid_argument);

  const fs::path ragged = tmp.path / "ragged.csv";
  {
    std::ofstream out(ragged);
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(ragged), std::invalid_argument);

  CHECK_THROWS_AS(read_matrix_csv(tmp.path / "missing.csv"), IoError);
}

TEST_CASE("edges csv round-trip") {
  TempDir tmp;
  EdgeSet es(5);
  es.add(0, 1);
  es.add(3, 4);
  es.add(1, 2);
  const fs::path file = tmp.path / "edges.csv";
  write_edges_csv(file, es);
  const EdgeSet back = read_edges_csv(file, 5);
  CHECK(back.pairs() == es.pairs());

  // empty set round-trips too
  write_edges_csv(file, EdgeSet(5));
  CHECK(read_edges_csv(file, 5).size() == 0);
}
