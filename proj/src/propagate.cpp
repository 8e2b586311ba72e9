#include "slopp/propagate.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <limits>

namespace slopp {

namespace {

std::uint8_t allowed_rotation_mask(const ItemClass& cls) {
  std::uint8_t mask = 0;
  for (int r = 0; r < 6; ++r) {
    if (cls.vertical_ok[kAllRotations[r].perm[kVerticalAxis]]) {
      mask |= std::uint8_t(1u << r);
    }
  }
  return mask;
}

}  // namespace

std::vector<int> resolve_classes(const Instance& instance) {
  std::vector<int> assignment;
  assignment.reserve(size_t(instance.total_items()));
  for (size_t k = 0; k < instance.classes.size(); ++k) {
    assignment.insert(assignment.end(), size_t(instance.classes[k].count),
                      int(k));
  }
  return assignment;
}

DomainStore DomainStore::root(const Instance& instance, bool item_symmetry) {
  DomainStore store;
  store.item_class = resolve_classes(instance);
  store.item_symmetry = item_symmetry;
  store.ledger.resize(instance.classes.size());
  store.items.reserve(store.item_class.size());
  for (int cls_idx : store.item_class) {
    const ItemClass& cls = instance.classes[cls_idx];
    ItemDomain dom;
    dom.pos_lo = {0, 0, 0};
    dom.pos_hi = instance.container.dims;
    dom.rot_mask = allowed_rotation_mask(cls);
    dom.status = ItemStatus::Undecided;
    store.items.push_back(dom);
    ++store.ledger[cls_idx].undecided;
  }
  return store;
}

bool DomainStore::fixed(int item) const {
  const ItemDomain& dom = items[item];
  return dom.status == ItemStatus::Packed && dom.pos_lo == dom.pos_hi &&
         std::popcount(dom.rot_mask) == 1;
}

void DomainStore::set_status(int item, ItemStatus status) {
  ItemDomain& dom = items[item];
  if (dom.status == status) return;
  if (dom.status != ItemStatus::Undecided) {
    // Packed <-> Excluded flips are contradictions, not transitions.
    failed = true;
    return;
  }
  ClassLedger& led = ledger[item_class[item]];
  --led.undecided;
  if (status == ItemStatus::Packed) {
    ++led.packed;
  } else {
    ++led.excluded;
  }
  dom.status = status;
}

Coord min_rotated_size(const DomainStore& store, const Instance& instance,
                       int item, int axis) {
  const ItemClass& cls = instance.classes[store.item_class[item]];
  Coord best = std::numeric_limits<Coord>::max();
  std::uint8_t mask = store.items[item].rot_mask;
  for (int r = 0; r < 6; ++r) {
    if (mask & (1u << r)) {
      best = std::min(best, cls.dims[kAllRotations[r].perm[axis]]);
    }
  }
  return best;
}

bool prune_containment(DomainStore& store, const Instance& instance,
                       int item) {
  if (store.failed) return false;
  ItemDomain& dom = store.items[item];
  if (dom.status == ItemStatus::Excluded) return false;

  const ItemClass& cls = instance.classes[store.item_class[item]];
  const Vec3& dims = instance.container.dims;
  bool changed = false;

  for (int u = 0; u < 3; ++u) {
    if (dom.pos_lo[u] < 0) {
      dom.pos_lo[u] = 0;
      changed = true;
    }
  }

  // Drop rotations that cannot fit between the current lower bound and the
  // container wall on some axis.
  std::uint8_t mask = dom.rot_mask;
  for (int r = 0; r < 6; ++r) {
    if (!(mask & (1u << r))) continue;
    const Vec3 size = oriented_size(cls, kAllRotations[r]);
    for (int u = 0; u < 3; ++u) {
      if (dom.pos_lo[u] + size[u] > dims[u]) {
        mask &= std::uint8_t(~(1u << r));
        break;
      }
    }
  }
  if (mask != dom.rot_mask) {
    dom.rot_mask = mask;
    changed = true;
  }

  if (mask == 0) {
    if (dom.status == ItemStatus::Packed) {
      store.failed = true;
    } else {
      store.set_status(item, ItemStatus::Excluded);
    }
    return true;
  }

  for (int u = 0; u < 3; ++u) {
    Coord hi = dims[u] - min_rotated_size(store, instance, item, u);
    if (dom.pos_hi[u] > hi) {
      dom.pos_hi[u] = hi;
      changed = true;
    }
    if (dom.pos_lo[u] > dom.pos_hi[u]) {
      if (dom.status == ItemStatus::Packed) {
        store.failed = true;
      } else {
        store.set_status(item, ItemStatus::Excluded);
      }
      return true;
    }
  }
  return changed;
}

bool prune_nonoverlap(DomainStore& store, const Instance& instance, int i,
                      int j) {
  assert(i != j);
  if (store.failed) return false;
  ItemDomain& di = store.items[i];
  ItemDomain& dj = store.items[j];
  if (di.status != ItemStatus::Packed || dj.status != ItemStatus::Packed) {
    return false;
  }

  if (di.rot_mask == 0 || dj.rot_mask == 0) {
    // A packed item with no rotation left is already a contradiction.
    store.failed = true;
    return true;
  }

  Vec3 ms_i, ms_j;
  for (int u = 0; u < 3; ++u) {
    ms_i[u] = min_rotated_size(store, instance, i, u);
    ms_j[u] = min_rotated_size(store, instance, j, u);
    // Non-strict semantics: a possibly zero-sized box constrains nothing.
    if (ms_i[u] == 0 || ms_j[u] == 0) return false;
  }

  // On each axis, can the boxes still end up separated?
  bool i_first[3], j_first[3];
  int open_axis = -1;
  int open_count = 0;
  for (int u = 0; u < 3; ++u) {
    i_first[u] = di.pos_lo[u] + ms_i[u] <= dj.pos_hi[u];
    j_first[u] = dj.pos_lo[u] + ms_j[u] <= di.pos_hi[u];
    if (i_first[u] || j_first[u]) {
      open_axis = u;
      ++open_count;
    }
  }

  if (open_count == 0) {
    store.failed = true;
    return true;
  }
  if (open_count > 1) return false;

  // Overlap is forced on the two other axes, so the boxes must be separated
  // along open_axis; enforce whichever order is still possible.
  const int u = open_axis;
  bool changed = false;
  if (i_first[u] && !j_first[u]) {
    if (dj.pos_lo[u] < di.pos_lo[u] + ms_i[u]) {
      dj.pos_lo[u] = di.pos_lo[u] + ms_i[u];
      changed = true;
    }
    if (di.pos_hi[u] > dj.pos_hi[u] - ms_i[u]) {
      di.pos_hi[u] = dj.pos_hi[u] - ms_i[u];
      changed = true;
    }
  } else if (j_first[u] && !i_first[u]) {
    if (di.pos_lo[u] < dj.pos_lo[u] + ms_j[u]) {
      di.pos_lo[u] = dj.pos_lo[u] + ms_j[u];
      changed = true;
    }
    if (dj.pos_hi[u] > di.pos_hi[u] - ms_j[u]) {
      dj.pos_hi[u] = di.pos_hi[u] - ms_j[u];
      changed = true;
    }
  }
  if ((di.pos_lo[u] > di.pos_hi[u]) || (dj.pos_lo[u] > dj.pos_hi[u])) {
    store.failed = true;
    return true;
  }
  return changed;
}

namespace {

/// Same-class chain rule: with items of a class at consecutive indices,
/// "j packed implies i packed for i < j". Forces prefixes packed and suffixes
/// excluded; an excluded item below a packed one is a contradiction.
bool prune_class_symmetry(DomainStore& store, int cls, int first, int count) {
  int highest_packed = -1;
  int lowest_excluded = count;
  for (int k = 0; k < count; ++k) {
    ItemStatus st = store.items[first + k].status;
    if (st == ItemStatus::Packed) highest_packed = k;
    if (st == ItemStatus::Excluded && k < lowest_excluded) lowest_excluded = k;
  }
  if (lowest_excluded < highest_packed) {
    store.failed = true;
    return true;
  }
  bool changed = false;
  for (int k = 0; k < highest_packed; ++k) {
    if (store.items[first + k].status == ItemStatus::Undecided) {
      store.set_status(first + k, ItemStatus::Packed);
      changed = true;
    }
  }
  for (int k = lowest_excluded + 1; k < count; ++k) {
    if (store.items[first + k].status == ItemStatus::Undecided) {
      store.set_status(first + k, ItemStatus::Excluded);
      changed = true;
    }
  }
  (void)cls;
  return changed;
}

}  // namespace

PropagateOutcome propagate_fixpoint(DomainStore& store,
                                    const Instance& instance,
                                    SolveStats* stats) {
  if (store.failed) return PropagateOutcome::Failed;
  const int n = int(store.items.size());

  bool changed = true;
  while (changed && !store.failed) {
    changed = false;

    for (int i = 0; i < n; ++i) {
      if (stats) ++stats->propagations;
      changed |= prune_containment(store, instance, i);
      if (store.failed) return PropagateOutcome::Failed;
    }

    if (store.item_symmetry) {
      int first = 0;
      for (size_t k = 0; k < instance.classes.size(); ++k) {
        if (stats) ++stats->propagations;
        changed |= prune_class_symmetry(store, int(k), first,
                                        instance.classes[k].count);
        if (store.failed) return PropagateOutcome::Failed;
        first += instance.classes[k].count;
      }
    }

    for (int i = 0; i < n; ++i) {
      if (store.items[i].status != ItemStatus::Packed) continue;
      for (int j = i + 1; j < n; ++j) {
        if (store.items[j].status != ItemStatus::Packed) continue;
        if (stats) ++stats->propagations;
        changed |= prune_nonoverlap(store, instance, i, j);
        if (store.failed) return PropagateOutcome::Failed;
      }
    }
  }
  return store.failed ? PropagateOutcome::Failed : PropagateOutcome::Stable;
}

}  // namespace slopp
