#pragma once

// Command-line front end. The commands live in a library so tests can drive
// them without spawning processes.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "csthresh/recovery.hpp"
#include "csthresh/thresholds.hpp"
#include "csthresh/width.hpp"

namespace csthresh::cli {

/// Exit codes: 0 success, 1 solver failure, 2 invalid arguments.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitUsage = 2;

/// Runs the CLI with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "start:stop:step", inclusive of stop within half a step. Throws
/// DomainError when malformed or empty.
std::vector<double> parse_grid(std::string_view spec);

/// %.17g.
std::string format_double(double v);

/// First line "m n", then m rows of n numbers.
Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix_file(const std::string& path);

std::string curve_csv(const std::vector<CurvePoint>& points);
std::string curve_json(const std::vector<CurvePoint>& points);
std::string curve_svg(const std::vector<CurvePoint>& points);
std::string phase_csv(const std::vector<PhaseCell>& cells);
std::string phase_json(const std::vector<PhaseCell>& cells);
std::string width_json(const WidthReport& r);

}  // namespace csthresh::cli
