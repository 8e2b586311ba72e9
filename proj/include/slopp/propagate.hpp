#ifndef SLOPP_PROPAGATE_HPP
#define SLOPP_PROPAGATE_HPP

#include <cstdint>
#include <vector>

#include "slopp/model.hpp"

namespace slopp {

enum class ItemStatus : std::uint8_t { Undecided, Packed, Excluded };

/// Interval domain of one item: position bounds per axis (inclusive), the
/// surviving rotation candidates as a bitmask over kAllRotations, and the
/// packing status.
struct ItemDomain {
  Vec3 pos_lo{};
  Vec3 pos_hi{};
  std::uint8_t rot_mask = 0;
  ItemStatus status = ItemStatus::Undecided;

  friend bool operator==(const ItemDomain&, const ItemDomain&) = default;
};

struct ClassLedger {
  int packed = 0;
  int excluded = 0;
  int undecided = 0;

  friend bool operator==(const ClassLedger&, const ClassLedger&) = default;
};

/// Per-item domains plus the class assignment and per-class status ledger.
/// Copy-on-branch; a store is confined to one search worker.
struct DomainStore {
  std::vector<ItemDomain> items;
  std::vector<int> item_class;  // resolve_classes output, fixed at load
  std::vector<ClassLedger> ledger;
  bool failed = false;
  bool item_symmetry = true;

  static DomainStore root(const Instance& instance, bool item_symmetry = true);

  /// Packed with a single position and a single rotation candidate left.
  bool fixed(int item) const;

  /// Moves an item's status, keeping the ledger in step. Packing an excluded
  /// item (or vice versa) fails the store.
  void set_status(int item, ItemStatus status);

  friend bool operator==(const DomainStore&, const DomainStore&) = default;
};

/// The unique non-decreasing class assignment with classes[k].count
/// occurrences of k; fixes the class variables at model-load time.
std::vector<int> resolve_classes(const Instance& instance);

/// Smallest oriented size of the item's surviving rotations along one axis.
Coord min_rotated_size(const DomainStore& store, const Instance& instance,
                       int item, int axis);

/// Bounds from full enclosure: clamps position intervals to the container and
/// drops rotations that cannot fit. An undecided item that fits nowhere is
/// excluded; a packed one fails the store. Returns whether anything changed.
bool prune_containment(DomainStore& store, const Instance& instance, int item);

/// Pairwise non-overlap bounds reasoning for two packed items: if the domains
/// force overlap on two axes, separation is enforced on the third. Items that
/// may have a zero oriented size on some axis are skipped (non-strict
/// semantics). Returns whether anything changed.
bool prune_nonoverlap(DomainStore& store, const Instance& instance, int i,
                      int j);

enum class PropagateOutcome { Stable, Failed };

/// Sweeps all propagators until nothing changes or a domain empties.
/// Idempotent on a stable store. Each propagator invocation increments
/// stats->propagations when stats is given.
PropagateOutcome propagate_fixpoint(DomainStore& store,
                                    const Instance& instance,
                                    SolveStats* stats = nullptr);

}  // namespace slopp

#endif  // SLOPP_PROPAGATE_HPP
