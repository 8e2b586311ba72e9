#include "slopp/oracle.hpp"

#include <string>
#include <vector>

#include "slopp/propagate.hpp"

namespace slopp {

namespace {

struct OracleSearch {
  const Instance& inst;
  const OracleLimits& limits;
  std::vector<int> item_class;
  std::vector<Placement> current;
  std::vector<Vec3> current_sizes;
  Volume best = 0;
  std::vector<Placement> best_placed;
  std::uint64_t nodes = 0;

  OracleSearch(const Instance& instance, const OracleLimits& lim)
      : inst(instance), limits(lim), item_class(resolve_classes(instance)) {}

  bool placement_free(const Vec3& pos, const Vec3& size) const {
    for (size_t k = 0; k < current.size(); ++k) {
      if (boxes_overlap(pos, size, current[k].pos, current_sizes[k])) {
        return false;
      }
    }
    return true;
  }

  void recurse(int item, Volume excluded) {
    if (++nodes > limits.max_nodes) {
      throw OracleLimitError("oracle node guard exceeded (" +
                             std::to_string(limits.max_nodes) + ") on " +
                             inst.name);
    }
    if (item == int(item_class.size())) {
      if (excluded < best) {
        best = excluded;
        best_placed = current;
      }
      return;
    }

    const int cls_idx = item_class[item];
    const ItemClass& cls = inst.classes[cls_idx];
    const Vec3& dims = inst.container.dims;

    for (const Rotation& rot : allowed_rotations(cls)) {
      const Vec3 size = oriented_size(cls, rot);
      if (size[0] > dims[0] || size[1] > dims[1] || size[2] > dims[2]) {
        continue;
      }
      Vec3 pos;
      for (pos[0] = 0; pos[0] + size[0] <= dims[0]; ++pos[0]) {
        for (pos[1] = 0; pos[1] + size[1] <= dims[1]; ++pos[1]) {
          for (pos[2] = 0; pos[2] + size[2] <= dims[2]; ++pos[2]) {
            if (!placement_free(pos, size)) continue;
            current.push_back({item, cls_idx, rot, pos});
            current_sizes.push_back(size);
            recurse(item + 1, excluded);
            current.pop_back();
            current_sizes.pop_back();
          }
        }
      }
    }

    recurse(item + 1, excluded + cls.volume());
  }
};

}  // namespace

OracleResult brute_force_optimal(const Instance& instance,
                                 const OracleLimits& limits) {
  if (instance.total_items() > limits.max_items) {
    throw OracleLimitError("oracle refuses " + instance.name + ": " +
                           std::to_string(instance.total_items()) +
                           " items exceed the limit of " +
                           std::to_string(limits.max_items));
  }
  for (int u = 0; u < 3; ++u) {
    if (instance.container.dims[u] > limits.max_axis) {
      throw OracleLimitError("oracle refuses " + instance.name +
                             ": container axis exceeds " +
                             std::to_string(limits.max_axis));
    }
  }

  OracleSearch search(instance, limits);
  search.best = instance.payload_volume();
  search.recurse(0, 0);

  OracleResult result;
  result.objective = search.best;
  result.nodes = search.nodes;
  result.witness.placed = search.best_placed;
  result.witness.unpacked_counts.assign(instance.classes.size(), 0);
  for (size_t k = 0; k < instance.classes.size(); ++k) {
    result.witness.unpacked_counts[k] = instance.classes[k].count;
  }
  for (const Placement& p : result.witness.placed) {
    --result.witness.unpacked_counts[p.class_index];
  }
  result.witness.objective = leftover_volume(instance, result.witness);
  return result;
}

}  // namespace slopp
