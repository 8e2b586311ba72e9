#include "slopp/search.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cassert>
#include <deque>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace slopp {

namespace {

using Clock = std::chrono::steady_clock;

struct FixedBox {
  Vec3 pos;
  Vec3 size;
  bool zero = false;  // any zero side: overlaps nothing (non-strict)
};

std::vector<FixedBox> collect_fixed_boxes(const DomainStore& store,
                                          const Instance& instance,
                                          int skip_item) {
  std::vector<FixedBox> boxes;
  for (int i = 0; i < int(store.items.size()); ++i) {
    if (i == skip_item || !store.fixed(i)) continue;
    const ItemDomain& dom = store.items[i];
    const int rot = std::countr_zero(dom.rot_mask);
    FixedBox box;
    box.pos = dom.pos_lo;
    box.size = oriented_size(instance.classes[store.item_class[i]],
                             kAllRotations[rot]);
    box.zero = box.size[0] == 0 || box.size[1] == 0 || box.size[2] == 0;
    boxes.push_back(box);
  }
  // Sorted by z so the per-column forbidden intervals come out start-sorted.
  std::sort(boxes.begin(), boxes.end(),
            [](const FixedBox& a, const FixedBox& b) {
              return a.pos[2] < b.pos[2];
            });
  return boxes;
}

/// Candidate coordinates on one axis: 0 plus the far faces of the fixed
/// boxes, restricted to the item's interval.
std::vector<Coord> axis_coordinates(const std::vector<FixedBox>& boxes,
                                    int axis, Coord lo, Coord hi) {
  std::vector<Coord> coords;
  coords.reserve(boxes.size() + 1);
  if (lo <= 0 && 0 <= hi) coords.push_back(0);
  for (const FixedBox& box : boxes) {
    Coord c = box.pos[axis] + box.size[axis];
    if (c >= lo && c <= hi) coords.push_back(c);
  }
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

struct RotationCandidate {
  int rot = 0;
  Vec3 size{};
  bool zero = false;
};

}  // namespace

bool for_each_canonical_placement(
    const DomainStore& store, const Instance& instance, int item,
    const std::function<bool(const Vec3&, int)>& visit) {
  const ItemDomain& dom = store.items[item];
  if (dom.status == ItemStatus::Excluded) return true;
  const ItemClass& cls = instance.classes[store.item_class[item]];
  const Vec3& dims = instance.container.dims;

  std::vector<RotationCandidate> rots;
  for (int r = 0; r < 6; ++r) {
    if (!(dom.rot_mask & (1u << r))) continue;
    RotationCandidate cand;
    cand.rot = r;
    cand.size = oriented_size(cls, kAllRotations[r]);
    cand.zero =
        cand.size[0] == 0 || cand.size[1] == 0 || cand.size[2] == 0;
    rots.push_back(cand);
  }
  if (rots.empty()) return true;

  const std::vector<FixedBox> boxes =
      collect_fixed_boxes(store, instance, item);

  // Same-class predecessor already fixed: positions must grow
  // lexicographically along the class chain.
  bool have_floor = false;
  Vec3 floor_pos{};
  if (store.item_symmetry && item > 0 &&
      store.item_class[item - 1] == store.item_class[item] &&
      store.fixed(item - 1)) {
    have_floor = true;
    floor_pos = store.items[item - 1].pos_lo;
  }

  const std::vector<Coord> xs =
      axis_coordinates(boxes, 0, dom.pos_lo[0], dom.pos_hi[0]);
  const std::vector<Coord> ys =
      axis_coordinates(boxes, 1, dom.pos_lo[1], dom.pos_hi[1]);
  const std::vector<Coord> zs =
      axis_coordinates(boxes, 2, dom.pos_lo[2], dom.pos_hi[2]);

  // Scratch reused across columns: per rotation, the forbidden z intervals of
  // the boxes clashing with the (x, y) column, start-sorted.
  std::vector<std::vector<std::pair<Coord, Coord>>> forbidden(rots.size());

  for (Coord x : xs) {
    if (have_floor && x < floor_pos[0]) continue;
    for (Coord y : ys) {
      if (have_floor && x == floor_pos[0] && y < floor_pos[1]) continue;

      bool any_rot = false;
      for (size_t ri = 0; ri < rots.size(); ++ri) {
        const RotationCandidate& rc = rots[ri];
        forbidden[ri].clear();
        if (x + rc.size[0] > dims[0] || y + rc.size[1] > dims[1]) {
          forbidden[ri].emplace_back(dom.pos_lo[2], dom.pos_hi[2] + 1);
          continue;
        }
        any_rot = true;
        if (rc.zero) continue;  // zero-sided candidate conflicts with nothing
        for (const FixedBox& box : boxes) {
          if (box.zero) continue;
          if (box.pos[0] + box.size[0] <= x || x + rc.size[0] <= box.pos[0]) {
            continue;
          }
          if (box.pos[1] + box.size[1] <= y || y + rc.size[1] <= box.pos[1]) {
            continue;
          }
          // z overlaps iff z > pos - size and z < pos + boxsize.
          forbidden[ri].emplace_back(box.pos[2] - rc.size[2] + 1,
                                     box.pos[2] + box.size[2]);
        }
      }
      if (!any_rot) continue;

      // Sweep the z candidates in ascending order against the intervals.
      std::vector<size_t> next(rots.size(), 0);
      std::vector<Coord> blocked_until(rots.size(),
                                       std::numeric_limits<Coord>::min());
      for (Coord z : zs) {
        if (have_floor && x == floor_pos[0] && y == floor_pos[1] &&
            z <= floor_pos[2]) {
          continue;
        }
        for (size_t ri = 0; ri < rots.size(); ++ri) {
          const RotationCandidate& rc = rots[ri];
          if (z + rc.size[2] > dims[2]) continue;
          auto& iv = forbidden[ri];
          while (next[ri] < iv.size() && iv[next[ri]].first <= z) {
            blocked_until[ri] =
                std::max(blocked_until[ri], iv[next[ri]].second);
            ++next[ri];
          }
          if (z < blocked_until[ri]) continue;
          if (!visit({x, y, z}, rc.rot)) return false;
        }
      }
    }
  }
  return true;
}

Volume packed_volume(const DomainStore& store, const Instance& instance) {
  Volume v = 0;
  for (int i = 0; i < int(store.items.size()); ++i) {
    if (store.items[i].status == ItemStatus::Packed) {
      v += instance.classes[store.item_class[i]].volume();
    }
  }
  return v;
}

Volume lower_bound(const DomainStore& store, const Instance& instance,
                   Volume packed_volume) {
  Volume undecided = 0;
  for (int i = 0; i < int(store.items.size()); ++i) {
    if (store.items[i].status == ItemStatus::Undecided) {
      undecided += instance.classes[store.item_class[i]].volume();
    }
  }
  const Volume free_volume =
      std::max<Volume>(instance.container.volume() - packed_volume, 0);
  const Volume bound = instance.payload_volume() - packed_volume -
                       std::min(free_volume, undecided);
  return std::max<Volume>(bound, 0);
}

int select_branch_item(const DomainStore& store, const Instance& instance) {
  int best = -1;
  Volume best_volume = -1;
  for (int i = 0; i < int(store.items.size()); ++i) {
    const ItemDomain& dom = store.items[i];
    const bool open = dom.status == ItemStatus::Undecided ||
                      (dom.status == ItemStatus::Packed && !store.fixed(i));
    if (!open) continue;
    const Volume v = instance.classes[store.item_class[i]].volume();
    if (v > best_volume) {
      best_volume = v;
      best = i;
    }
  }
  return best;
}

std::vector<DomainStore> branch(const DomainStore& store,
                                const Instance& instance,
                                std::mt19937_64& rng) {
  (void)rng;  // reserved for randomized strategies
  std::vector<DomainStore> children;
  const int item = select_branch_item(store, instance);
  if (item < 0 || store.failed) return children;

  for_each_canonical_placement(
      store, instance, item, [&](const Vec3& pos, int rot) {
        DomainStore child = store;
        if (child.items[item].status == ItemStatus::Undecided) {
          child.set_status(item, ItemStatus::Packed);
        }
        child.items[item].pos_lo = pos;
        child.items[item].pos_hi = pos;
        child.items[item].rot_mask = std::uint8_t(1u << rot);
        children.push_back(std::move(child));
        return true;
      });

  if (store.items[item].status == ItemStatus::Undecided) {
    DomainStore child = store;
    child.set_status(item, ItemStatus::Excluded);
    children.push_back(std::move(child));
  }
  return children;
}

namespace {

struct Shared {
  const Instance& inst;
  const SearchConfig& cfg;
  const IncumbentSink& sink;
  Clock::time_point start;
  bool has_deadline = false;
  Clock::time_point deadline;
  Volume total_payload = 0;

  std::atomic<Volume> best_obj{0};
  std::atomic<bool> stop{false};
  std::atomic<bool> timed_out{false};
  std::mutex mu;
  Solution best_sol;  // guarded by mu
};

Solution build_solution(const Shared& sh, const DomainStore& store) {
  Solution sol;
  sol.unpacked_counts.resize(sh.inst.classes.size(), 0);
  for (size_t k = 0; k < sh.inst.classes.size(); ++k) {
    sol.unpacked_counts[k] = store.ledger[k].excluded;
  }
  for (int i = 0; i < int(store.items.size()); ++i) {
    if (store.items[i].status != ItemStatus::Packed) continue;
    assert(store.fixed(i));
    const int rot = std::countr_zero(store.items[i].rot_mask);
    sol.placed.push_back(
        {i, store.item_class[i], kAllRotations[rot], store.items[i].pos_lo});
  }
  sol.objective = leftover_volume(sh.inst, sol);
  return sol;
}

class Engine {
 public:
  explicit Engine(Shared& sh) : sh_(sh) {}

  SolveStats stats;

  bool deadline_hit() {
    if (sh_.stop.load(std::memory_order_relaxed)) return true;
    if (!sh_.has_deadline) return false;
    if (Clock::now() >= sh_.deadline) {
      sh_.timed_out.store(true);
      sh_.stop.store(true);
      return true;
    }
    return false;
  }

  void record_leaf(const DomainStore& store, Volume packed) {
    const Volume obj = sh_.total_payload - packed;
    if (obj >= sh_.best_obj.load(std::memory_order_relaxed)) return;
    std::lock_guard<std::mutex> lock(sh_.mu);
    if (obj >= sh_.best_obj.load()) return;  // raced with a better incumbent

    Solution sol = build_solution(sh_, store);
    const std::vector<Violation> violations = validate(sh_.inst, sol);
    if (!violations.empty()) {
      throw std::logic_error("search produced an invalid incumbent: " +
                             violations.front().describe());
    }
    sh_.best_sol = std::move(sol);
    sh_.best_obj.store(obj);
    ++stats.solutions_found;
    if (sh_.cfg.emit_all && sh_.sink) {
      sh_.sink(Incumbent{sh_.best_sol,
                         std::chrono::duration<double>(Clock::now() - sh_.start)});
    }
    if (obj == 0) sh_.stop.store(true);  // leftover cannot go below zero
  }

  void dfs(DomainStore store) {
    if (deadline_hit()) return;
    ++stats.nodes_explored;
    if (propagate_fixpoint(store, sh_.inst, &stats) ==
        PropagateOutcome::Failed) {
      return;
    }
    const Volume packed = packed_volume(store, sh_.inst);
    if (lower_bound(store, sh_.inst, packed) >=
        sh_.best_obj.load(std::memory_order_relaxed)) {
      return;
    }
    const int item = select_branch_item(store, sh_.inst);
    if (item < 0) {
      record_leaf(store, packed);
      return;
    }

    const bool was_undecided =
        store.items[item].status == ItemStatus::Undecided;
    for_each_canonical_placement(
        store, sh_.inst, item, [&](const Vec3& pos, int rot) {
          DomainStore child = store;
          if (child.items[item].status == ItemStatus::Undecided) {
            child.set_status(item, ItemStatus::Packed);
          }
          child.items[item].pos_lo = pos;
          child.items[item].pos_hi = pos;
          child.items[item].rot_mask = std::uint8_t(1u << rot);
          dfs(std::move(child));
          return !sh_.stop.load(std::memory_order_relaxed);
        });
    if (sh_.stop.load(std::memory_order_relaxed)) return;
    if (was_undecided) {
      DomainStore child = std::move(store);
      child.set_status(item, ItemStatus::Excluded);
      dfs(std::move(child));
    }
  }
};

void merge_stats(SolveStats& into, const SolveStats& from) {
  into.nodes_explored += from.nodes_explored;
  into.propagations += from.propagations;
  into.solutions_found += from.solutions_found;
}

/// Breadth-first expansion until there are enough subtrees to hand out.
std::vector<DomainStore> expand_frontier(Shared& sh, DomainStore root,
                                         size_t target, SolveStats& agg) {
  std::deque<DomainStore> queue;
  queue.push_back(std::move(root));
  Engine engine(sh);
  while (!queue.empty() && queue.size() < target && !engine.deadline_hit()) {
    DomainStore node = std::move(queue.front());
    queue.pop_front();
    ++engine.stats.nodes_explored;
    if (propagate_fixpoint(node, sh.inst, &engine.stats) ==
        PropagateOutcome::Failed) {
      continue;
    }
    const Volume packed = packed_volume(node, sh.inst);
    if (lower_bound(node, sh.inst, packed) >=
        sh.best_obj.load(std::memory_order_relaxed)) {
      continue;
    }
    const int item = select_branch_item(node, sh.inst);
    if (item < 0) {
      engine.record_leaf(node, packed);
      continue;
    }
    const bool was_undecided =
        node.items[item].status == ItemStatus::Undecided;
    for_each_canonical_placement(
        node, sh.inst, item, [&](const Vec3& pos, int rot) {
          DomainStore child = node;
          if (child.items[item].status == ItemStatus::Undecided) {
            child.set_status(item, ItemStatus::Packed);
          }
          child.items[item].pos_lo = pos;
          child.items[item].pos_hi = pos;
          child.items[item].rot_mask = std::uint8_t(1u << rot);
          queue.push_back(std::move(child));
          return true;
        });
    if (was_undecided) {
      DomainStore child = std::move(node);
      child.set_status(item, ItemStatus::Excluded);
      queue.push_back(std::move(child));
    }
  }
  merge_stats(agg, engine.stats);
  return {std::make_move_iterator(queue.begin()),
          std::make_move_iterator(queue.end())};
}

}  // namespace

SolveResult solve(const Instance& instance, const SearchConfig& config,
                  const IncumbentSink& sink) {
  if (config.workers < 1) {
    throw std::invalid_argument("workers must be at least 1");
  }
  if (config.time_limit <= std::chrono::milliseconds::zero()) {
    throw std::invalid_argument("time_limit must be positive");
  }
  if (config.branching != "largest_volume") {
    throw std::invalid_argument("unknown branching strategy: " +
                                config.branching);
  }

  Shared sh{instance, config, sink};
  sh.start = Clock::now();
  sh.has_deadline = config.time_limit != std::chrono::milliseconds::max();
  if (sh.has_deadline) sh.deadline = sh.start + config.time_limit;
  sh.total_payload = instance.payload_volume();
  sh.best_sol = empty_solution(instance);
  sh.best_obj.store(sh.total_payload);

  SolveStats agg;
  agg.solutions_found = 1;  // the empty packing is the starting incumbent
  if (config.emit_all && sink) {
    sink(Incumbent{sh.best_sol,
                   std::chrono::duration<double>(Clock::now() - sh.start)});
  }

  DomainStore root = DomainStore::root(instance, config.item_symmetry);

  if (config.workers == 1) {
    Engine engine(sh);
    engine.dfs(std::move(root));
    merge_stats(agg, engine.stats);
  } else {
    std::vector<DomainStore> frontier = expand_frontier(
        sh, std::move(root), size_t(std::max(4 * config.workers, 16)), agg);
#ifdef _OPENMP
#pragma omp parallel num_threads(config.workers)
    {
      Engine engine(sh);
#pragma omp for schedule(dynamic, 1)
      for (std::int64_t i = 0; i < std::int64_t(frontier.size()); ++i) {
        if (!sh.stop.load(std::memory_order_relaxed)) {
          engine.dfs(std::move(frontier[size_t(i)]));
        }
      }
#pragma omp critical(slopp_stats_merge)
      merge_stats(agg, engine.stats);
    }
#else
    Engine engine(sh);
    for (DomainStore& node : frontier) {
      if (!sh.stop.load(std::memory_order_relaxed)) engine.dfs(std::move(node));
    }
    merge_stats(agg, engine.stats);
#endif
  }

  agg.wall_time = std::chrono::duration<double>(Clock::now() - sh.start);
  agg.proved_optimal = sh.best_obj.load() == 0 || !sh.timed_out.load();
  {
    std::lock_guard<std::mutex> lock(sh.mu);
    return SolveResult{std::move(sh.best_sol), agg};
  }
}

}  // namespace slopp
