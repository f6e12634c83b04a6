#include "doctest.h"

#include <sstream>
#include <string>

#include "support/oracles.hpp"
#include "support/testgen.hpp"
#include "tron/io.hpp"

using namespace tron;

namespace {

Problem parse(const std::string& text, std::size_t n_override = 0) {
  std::istringstream in(text);
  return parse_libsvm(in, n_override);
}

std::string write(const Problem& p) {
  std::ostringstream out;
  write_libsvm(p, out);
  return out.str();
}

}  // namespace

TEST_CASE("single line parses into the expected csr row") {
  auto p = parse("+1 1:0.5 3:2\n");
  CHECK(p.instances() == 1);
  CHECK(p.features() == 3);
  CHECK(p.y == RealVector{1.0});
  CHECK(p.X.row_size(0) == 2);
  CHECK(p.X.col_indices()[0] == 0);
  CHECK(p.X.col_indices()[1] == 2);
  CHECK(p.X.values()[0] == 0.5);
  CHECK(p.X.values()[1] == 2.0);
}

TEST_CASE("empty streams, blank lines and crlf endings") {
  auto empty = parse("");
  CHECK(empty.instances() == 0);
  CHECK(empty.features() == 0);

  auto p = parse("\n+1 1:1\n\n-1 2:3\r\n\n");
  CHECK(p.instances() == 2);
  CHECK(p.features() == 2);
  CHECK(p.y == RealVector{1.0, -1.0});
}

TEST_CASE("labels map and unsupported labels are rejected with the line") {
  auto p = parse("0 1:1\n1 1:2\n-1 1:3\n");
  CHECK(p.y == RealVector{-1.0, 1.0, -1.0});

  CHECK_THROWS_AS(parse("+1 1:1\n2 1:1\n"), UnsupportedLabelError);
  try {
    parse("+1 1:1\n2 1:1\n");
  } catch (const UnsupportedLabelError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("structural errors carry line numbers") {
  CHECK_THROWS_AS(parse("+1 2:1 2:2\n"), ParseError);  // duplicate
  CHECK_THROWS_AS(parse("+1 3:1 2:2\n"), ParseError);  // non-ascending
  CHECK_THROWS_AS(parse("+1 abc\n"), ParseError);      // non-numeric token
  CHECK_THROWS_AS(parse("+1 1:x\n"), ParseError);      // non-numeric value
  CHECK_THROWS_AS(parse("+1 1=3\n"), ParseError);      // missing colon
  CHECK_THROWS_AS(parse("+1 0:3\n"), ParseError);      // not 1-based
  CHECK_THROWS_AS(parse("hello\n"), ParseError);       // unparsable label
  try {
    parse("+1 1:1\n-1 1:1\n+1 5:2 4:1\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("dimension override pins the feature count") {
  auto p = parse("+1 2:1\n", 10);
  CHECK(p.features() == 10);
  CHECK_THROWS_AS(parse("+1 12:1\n", 10), ParseError);
}

TEST_CASE("writer emits signs and round-trips the single-line fixture") {
  auto p = parse("+1 1:0.5 3:2\n-1 2:-7\n");
  auto text = write(p);
  CHECK(text == "+1 1:0.5 3:2\n-1 2:-7\n");
  auto q = parse(text);
  CHECK(q.y == p.y);
  CHECK(std::vector<double>(q.X.values().begin(), q.X.values().end()) ==
        std::vector<double>(p.X.values().begin(), p.X.values().end()));

  Problem empty;
  empty.X = FeatureMatrix::csr(0, 0, {0}, {}, {});
  CHECK(write(empty).empty());
}

TEST_CASE("round-trip identity on randomized sparse problems") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto p = testgen::sparse_problem(9000 + seed, 1 + seed % 100, 1 + seed % 50, 1.0, 0.3);
    auto q = parse(write(p), p.features());
    CHECK(q.instances() == p.instances());
    CHECK(q.features() == p.features());
    CHECK(q.y == p.y);
    CHECK(std::vector<std::int64_t>(q.X.row_offsets().begin(), q.X.row_offsets().end()) ==
          std::vector<std::int64_t>(p.X.row_offsets().begin(), p.X.row_offsets().end()));
    CHECK(std::vector<std::int32_t>(q.X.col_indices().begin(), q.X.col_indices().end()) ==
          std::vector<std::int32_t>(p.X.col_indices().begin(), p.X.col_indices().end()));
    CHECK(std::vector<double>(q.X.values().begin(), q.X.values().end()) ==
          std::vector<double>(p.X.values().begin(), p.X.values().end()));
  }
}

TEST_CASE("awkward values survive the round trip bit-equal") {
  Problem p;
  p.X = FeatureMatrix::csr(1, 4, {0, 4},
                           {0, 1, 2, 3},
                           {0.1, 1e-300, -3.0000000000000004, 12345678901234567.0});
  p.y = {-1.0};
  auto q = parse(write(p), 4);
  CHECK(std::vector<double>(q.X.values().begin(), q.X.values().end()) ==
        std::vector<double>(p.X.values().begin(), p.X.values().end()));
}

TEST_CASE("dense loader parses rows and reports field-count errors") {
  std::istringstream in("+1 0.5 0 2\n-1 1 2 3\n");
  auto p = load_dense(in, 3);
  CHECK(p.instances() == 2);
  CHECK(p.X.layout() == Layout::DenseRowMajor);
  CHECK(p.X.values()[0] == 0.5);
  CHECK(p.X.values()[1] == 0.0);
  CHECK(p.X.values()[2] == 2.0);
  CHECK(p.y == RealVector{1.0, -1.0});

  std::istringstream empty("");
  CHECK(load_dense(empty, 3).instances() == 0);

  std::string seven_lines;
  for (int i = 0; i < 6; ++i) seven_lines += "+1 1 2 3\n";
  seven_lines += "+1 1 2\n";
  std::istringstream bad(seven_lines);
  try {
    load_dense(bad, 3);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("dense and sparse loads of the same data multiply identically") {
  auto sparse = testgen::sparse_problem(9100, 40, 12, 1.0, 0.4);
  auto dense_vals = oracles::to_dense(sparse.X);
  Problem dense;
  dense.X = FeatureMatrix::dense(40, 12, dense_vals);
  dense.y = sparse.y;
  auto v = testgen::random_vector(9101, 12);
  CHECK(oracles::rel_err(matvec(sparse.X, v), matvec(dense.X, v)) <= 1e-13);
}

TEST_CASE("dataset statistics") {
  auto p = parse("+1 1:0.5 3:2\n");
  auto s = dataset_stats(p);
  CHECK(s.instances == 1);
  CHECK(s.features == 3);
  CHECK(s.nonzeros == 2);
  CHECK(s.positives == 1);
  CHECK(s.negatives == 0);

  auto q = parse("+1 1:1\n0 2:1\n-1 1:1 2:1\n");
  auto sq = dataset_stats(q);
  CHECK(sq.instances == 3);
  CHECK(sq.nonzeros == 4);
  CHECK(sq.positives == 1);
  CHECK(sq.negatives == 2);

  // dense stats count actual nonzero values
  std::istringstream in("+1 0.5 0 2\n");
  auto d = dataset_stats(load_dense(in, 3));
  CHECK(d.nonzeros == 2);
}

TEST_CASE("a very long single line parses in one pass") {
  std::string line = "+1";
  for (int j = 1; j <= 20000; ++j) {
    line += ' ';
    line += std::to_string(j);
    line += ":1.5";
  }
  line += '\n';
  auto p = parse(line);
  CHECK(p.instances() == 1);
  CHECK(p.features() == 20000);
  CHECK(p.X.stored() == 20000);
}
