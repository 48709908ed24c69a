#include "lapmm/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "lapmm/error.hpp"

namespace lapmm {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_graph(std::ostream& out, const GraphFile& graph) {
  out << graph.n << ' ' << graph.edges.size() << '\n';
  for (const Edge& e : graph.edges) {
    out << e.i << ' ' << e.j << ' ' << format_double(e.weight) << '\n';
  }
}

namespace {

std::istringstream next_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
  }
  fail(ErrorCode::kParse, std::string("unexpected end of input reading ") + what);
}

void expect_end(std::istringstream& line, const char* what) {
  std::string rest;
  if (line >> rest) fail(ErrorCode::kParse, std::string("trailing text on ") + what + " line");
}

}  // namespace

GraphFile read_graph(std::istream& in) {
  GraphFile graph;
  auto header = next_line(in, "graph header");
  long long m = 0;
  if (!(header >> graph.n >> m) || graph.n < 0 || m < 0) {
    fail(ErrorCode::kParse, "graph header must be \"n m\" with nonnegative integers");
  }
  expect_end(header, "graph header");
  graph.edges.reserve(static_cast<size_t>(m));
  for (long long k = 0; k < m; ++k) {
    auto line = next_line(in, "edge");
    Edge e{};
    if (!(line >> e.i >> e.j >> e.weight)) {
      fail(ErrorCode::kParse, "edge line " + std::to_string(k + 1) + " must be \"i j w\"");
    }
    expect_end(line, "edge");
    graph.edges.push_back(e);
  }
  return graph;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  auto header = next_line(in, "matrix header");
  Index rows = 0, cols = 0;
  if (!(header >> rows >> cols) || rows < 0 || cols < 0) {
    fail(ErrorCode::kParse, "matrix header must be \"rows cols\"");
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    auto line = next_line(in, "matrix row");
    for (Index c = 0; c < cols; ++c) {
      if (!(line >> m(r, c))) {
        fail(ErrorCode::kParse, "matrix row " + std::to_string(r) + " is short");
      }
    }
    expect_end(line, "matrix row");
  }
  return m;
}

}  // namespace lapmm
