#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lapmm/laplacian.hpp"

namespace lapmm {

// Shortest round-trippable form: 17 significant digits, %g style.
std::string format_double(double value);

struct GraphFile {
  Index n = 0;
  std::vector<Edge> edges;
};

// Header "n m", then m lines "i j w" (0-indexed). Throws kParse on malformed text; the
// edges themselves are not validated here.
void write_graph(std::ostream& out, const GraphFile& graph);
GraphFile read_graph(std::istream& in);

// Header "rows cols", then one row per line, values separated by single spaces.
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

}  // namespace lapmm
