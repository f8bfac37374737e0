#ifndef CARNOT_MANIFOLD_FILE_HPP
#define CARNOT_MANIFOLD_FILE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "carnot/manifold.hpp"

namespace carnot {

/// A manifold description file (JSON):
///
///   {"coords": ["x", "y", "z"],
///    "frames": [["1", "0", "-y/2"], ["0", "1", "x/2"], ["0", "0", "1"]],
///    "horizontal_rank": 2,
///    "metric": [["1", "0"], ["0", "1"]],        optional, identity
///    "class": "contact",                         optional, generic
///    "chart_box": [[-1, 1], [-1, 1], [-1, 1]],  optional, [-1, 1]^n
///    "seed": 42, "sample_count": 10,             optional
///    "sample_points": [[0, 0, 0]]}               optional, replaces sampling
///
/// Each frame entry lists the coefficients of one field in d/dx_1..d/dx_n.
struct ManifoldFile {
  FramedManifold manifold;
  ChartBox chart_box;
  std::uint64_t seed = 42;
  int sample_count = 10;
  std::vector<std::vector<double>> sample_points;

  /// The explicit sample points if given, else sample_count seeded points
  /// from the chart box.
  std::vector<std::vector<double>> sample() const;
  /// Midpoint of the chart box.
  std::vector<double> center() const;
};

/// Throws ParseError for malformed JSON or expressions (the message names
/// the offending key) and PreconditionError for invalid contents.
ManifoldFile parse_manifold_file(const std::string& text);
ManifoldFile load_manifold_file(const std::string& path);

}  // namespace carnot

#endif
