#ifndef SLOPP_IO_HPP
#define SLOPP_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slopp/model.hpp"

namespace slopp {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThpackSuite {
  std::vector<Instance> instances;
  std::vector<std::optional<long long>> seeds;  // parallel to instances
};

/// One incumbent as seen from the outside: elapsed wall time, objective,
/// remaining item count and volume utilization.
struct ProgressRecord {
  double elapsed_s = 0.0;
  Volume objective = 0;
  int left_boxes = 0;
  double volume_utilization = 0.0;
};

/// Reads an OR-Library style suite. File dimension order is (L, W, H); the
/// canonical in-memory order is (W, L, H) with the height on axis 2, and each
/// vertical flag follows the dimension it belongs to. Instances are named
/// "<suite_name>_NNN" (1-based, zero padded). Throws ParseError with the line
/// and instance index on malformed input.
ThpackSuite parse_thpack(std::istream& in, std::string_view suite_name);

/// Same, reading from a file; the suite name is the file stem.
ThpackSuite parse_thpack_file(const std::filesystem::path& path);

std::string write_instance_json(const Instance& instance);
Instance read_instance_json(const std::string& text);

/// Serializes a validated solution. Field order is deterministic. Refuses
/// (std::invalid_argument) if the solution does not validate.
std::string write_solution_json(const Instance& instance,
                                const Solution& solution,
                                const SolveStats& stats);

struct SolutionFile {
  std::string instance_name;
  Solution solution;
  SolveStats stats;
  double stored_volume_utilization = 0.0;
  std::vector<Vec3> stored_sizes;  // parallel to solution.placed
};

SolutionFile read_solution_json(const std::string& text);

/// Header "elapsed_s,objective_cm3,left_boxes,volume_utilization"; one row per
/// record, VU with 4 decimal places.
std::string write_progress_csv(const std::vector<ProgressRecord>& records);

}  // namespace slopp

#endif  // SLOPP_IO_HPP
