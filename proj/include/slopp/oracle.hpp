#ifndef SLOPP_ORACLE_HPP
#define SLOPP_ORACLE_HPP

#include <cstdint>
#include <stdexcept>

#include "slopp/model.hpp"

namespace slopp {

struct OracleLimits {
  int max_items = 4;
  Coord max_axis = 8;
  std::uint64_t max_nodes = 50'000'000;
};

/// Thrown when an instance is outside the limits or the node guard trips.
/// The oracle refuses rather than approximate.
class OracleLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  Volume objective = 0;
  Solution witness;
  std::uint64_t nodes = 0;
};

/// Exhaustive ground truth: every subset of items, every legal rotation and
/// every integer grid position, constraints checked by definition. Intended
/// for desk-size instances only.
OracleResult brute_force_optimal(const Instance& instance,
                                 const OracleLimits& limits = {});

}  // namespace slopp

#endif  // SLOPP_ORACLE_HPP
