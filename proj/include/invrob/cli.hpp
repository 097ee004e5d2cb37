// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "invrob/gsip.hpp"

namespace invrob::cli {

/// Process exit codes of `invrob`.
enum ExitCode : int {
  kOk = 0,
  kNonconvergence = 1,
  kInfeasible = 2,
  kSpecError = 3,  ///< malformed spec, expression, arguments or environment
  kIoError = 4,    ///< unreadable input or unwritable output
};

/// One epsilon axis "start:stop:step" (or a single value).
struct GridAxis {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

/// Parses "0:5:0.5,0:5:0.5". Throws SpecError.
std::vector<GridAxis> parse_grid(std::string_view text);

/// Cartesian product in row-major order: the first axis varies slowest.
std::vector<Vec> expand_grid(const std::vector<GridAxis>& axes);

/// Parses "0,0.5". Throws SpecError.
Vec parse_vector(std::string_view text);

/// Header `eps1,...,x_star,d1_star,...,V_star,rounds,max_violation` (x_star
/// becomes x1_star, x2_star, ... when n > 1), one row per cell with %.17g
/// numbers, failed cells written as nan with 0 rounds, trailing newline.
/// Decision and design dimensions are taken from the first solved cell
/// unless given (nonzero).
std::string grid_csv(const std::vector<GridCell>& cells, std::size_t n = 0, std::size_t design_dim = 0);

/// grid_csv written atomically to `path`. Throws UsageError on an empty
/// result list and IoError with the path on write failures.
void emit_grid_csv(const std::vector<GridCell>& cells, const std::string& path, std::size_t n = 0,
                   std::size_t design_dim = 0);

/// Entry point of the command-line tool. Data goes to `out` (or --out),
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace invrob::cli
