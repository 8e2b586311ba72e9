#ifndef SLOPP_SEARCH_HPP
#define SLOPP_SEARCH_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "slopp/model.hpp"
#include "slopp/propagate.hpp"

namespace slopp {

struct SearchConfig {
  /// Wall-clock budget; milliseconds::max() means no limit.
  std::chrono::milliseconds time_limit{std::chrono::milliseconds::max()};
  int workers = 1;
  std::uint64_t seed = 0;
  /// Stream every incumbent through the sink (the final best is always
  /// returned either way).
  bool emit_all = false;
  /// Strategy tag; "largest_volume" is the only strategy in v1.
  std::string branching = "largest_volume";
  /// Order identical items within a class (prefix packed, lexicographic
  /// positions). Disable for fidelity runs.
  bool item_symmetry = true;
};

struct Incumbent {
  Solution solution;
  std::chrono::duration<double> found_at{0};
};

using IncumbentSink = std::function<void(const Incumbent&)>;

struct SolveResult {
  Solution best;
  SolveStats stats;
};

/// Anytime branch and bound minimizing leftover payload volume. Every emitted
/// incumbent is valid and strictly better than the previous one; the empty
/// packing is the starting incumbent, so a solution is always returned. With
/// workers = 1 the run is deterministic; with more workers subtrees of a
/// shared frontier are explored in parallel under a shared bound.
SolveResult solve(const Instance& instance, const SearchConfig& config,
                  const IncumbentSink& sink = {});

/// Total volume of items currently packed in the store.
Volume packed_volume(const DomainStore& store, const Instance& instance);

/// Admissible bound: no completion of the store has leftover volume below
/// this. Volume relaxation only.
Volume lower_bound(const DomainStore& store, const Instance& instance,
                   Volume packed_volume);

/// Item the default strategy branches on: largest class volume among items
/// not yet fully placed or excluded, lowest index on ties. -1 when the store
/// is fully assigned.
int select_branch_item(const DomainStore& store, const Instance& instance);

/// Children of a stable store in exploration order: one child per canonical
/// placement (positions lexicographic, then rotation id) of the selected
/// item, then the exclusion child. The rng is reserved for strategies that
/// randomize; the default strategy ignores it.
std::vector<DomainStore> branch(const DomainStore& store,
                                const Instance& instance,
                                std::mt19937_64& rng);

/// Canonical placement candidates for one item: each coordinate is 0 or the
/// far face of an already fixed item, filtered against the item's domain,
/// container walls, the fixed boxes, and the same-class predecessor order.
/// Visits (pos, rotation id) in child order; stops early if the visitor
/// returns false. Returns false when stopped early.
bool for_each_canonical_placement(
    const DomainStore& store, const Instance& instance, int item,
    const std::function<bool(const Vec3&, int)>& visit);

}  // namespace slopp

#endif  // SLOPP_SEARCH_HPP
