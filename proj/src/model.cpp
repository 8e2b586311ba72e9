#include "slopp/model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace slopp {

int rotation_index(const Rotation& rot) {
  for (int r = 0; r < 6; ++r) {
    if (kAllRotations[r] == rot) return r;
  }
  return -1;
}

int Instance::total_items() const {
  int n = 0;
  for (const ItemClass& cls : classes) n += cls.count;
  return n;
}

Volume Instance::payload_volume() const {
  Volume v = 0;
  for (const ItemClass& cls : classes) v += cls.volume() * cls.count;
  return v;
}

std::vector<Rotation> allowed_rotations(const ItemClass& cls) {
  std::vector<Rotation> out;
  for (const Rotation& rot : kAllRotations) {
    if (cls.vertical_ok[rot.perm[kVerticalAxis]]) out.push_back(rot);
  }
  return out;
}

Vec3 oriented_size(const ItemClass& cls, const Rotation& rot) {
  return {cls.dims[rot.perm[0]], cls.dims[rot.perm[1]], cls.dims[rot.perm[2]]};
}

bool boxes_overlap(const Vec3& pos_a, const Vec3& size_a, const Vec3& pos_b,
                   const Vec3& size_b) {
  for (int u = 0; u < 3; ++u) {
    if (pos_a[u] + size_a[u] <= pos_b[u]) return false;
    if (pos_b[u] + size_b[u] <= pos_a[u]) return false;
  }
  return true;
}

bool overlap(const Placement& a, const Placement& b, const Vec3& sizes_a,
             const Vec3& sizes_b) {
  return boxes_overlap(a.pos, sizes_a, b.pos, sizes_b);
}

bool contains(const Container& container, const Vec3& pos, const Vec3& sizes) {
  for (int u = 0; u < 3; ++u) {
    if (pos[u] < 0) return false;
    if (pos[u] + sizes[u] > container.dims[u]) return false;
  }
  return true;
}

Volume leftover_volume(const Instance& instance, const Solution& solution) {
  Volume v = 0;
  for (size_t k = 0; k < instance.classes.size(); ++k) {
    v += Volume(solution.unpacked_counts[k]) * instance.classes[k].volume();
  }
  return v;
}

double volume_utilization(const Instance& instance, const Solution& solution) {
  Volume packed = 0;
  for (const Placement& p : solution.placed) {
    packed += instance.classes[p.class_index].volume();
  }
  return double(packed) / double(instance.container.volume());
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Structure:
      os << "structure";
      break;
    case Kind::Cardinality:
      os << "cardinality";
      break;
    case Kind::Rotation:
      os << "rotation";
      break;
    case Kind::Containment:
      os << "containment";
      break;
    case Kind::Overlap:
      os << "overlap";
      break;
  }
  os << ": " << detail;
  return os.str();
}

std::vector<Violation> validate(const Instance& instance,
                                const Solution& solution) {
  std::vector<Violation> out;
  const int num_classes = int(instance.classes.size());
  const int num_items = instance.total_items();

  if (int(solution.unpacked_counts.size()) != num_classes) {
    out.push_back({Violation::Kind::Structure, -1, -1,
                   "unpacked_counts has " +
                       std::to_string(solution.unpacked_counts.size()) +
                       " entries, expected " + std::to_string(num_classes)});
    return out;
  }

  // Structural checks first; the remaining checks assume valid indices.
  bool structure_ok = true;
  for (const Placement& p : solution.placed) {
    if (p.class_index < 0 || p.class_index >= num_classes ||
        p.item_index < 0 || p.item_index >= num_items ||
        rotation_index(p.rotation) < 0) {
      out.push_back({Violation::Kind::Structure, p.item_index, -1,
                     "placement of item " + std::to_string(p.item_index) +
                         " has out-of-range indices or a malformed rotation"});
      structure_ok = false;
    }
  }
  if (!structure_ok) return out;

  std::vector<int> placed_per_class(num_classes, 0);
  for (const Placement& p : solution.placed) ++placed_per_class[p.class_index];
  for (int k = 0; k < num_classes; ++k) {
    if (placed_per_class[k] + solution.unpacked_counts[k] !=
        instance.classes[k].count) {
      out.push_back({Violation::Kind::Cardinality, -1, -1,
                     "class " + std::to_string(k) + " has " +
                         std::to_string(placed_per_class[k]) + " placed + " +
                         std::to_string(solution.unpacked_counts[k]) +
                         " unpacked, expected " +
                         std::to_string(instance.classes[k].count)});
    }
  }

  std::vector<Vec3> sizes(solution.placed.size());
  for (size_t i = 0; i < solution.placed.size(); ++i) {
    const Placement& p = solution.placed[i];
    const ItemClass& cls = instance.classes[p.class_index];
    sizes[i] = oriented_size(cls, p.rotation);
    if (!cls.vertical_ok[p.rotation.perm[kVerticalAxis]]) {
      out.push_back({Violation::Kind::Rotation, p.item_index, -1,
                     "item " + std::to_string(p.item_index) +
                         " is oriented with a forbidden dimension up"});
    }
    if (!contains(instance.container, p.pos, sizes[i])) {
      out.push_back({Violation::Kind::Containment, p.item_index, -1,
                     "item " + std::to_string(p.item_index) +
                         " sticks out of the container"});
    }
  }

  for (size_t i = 0; i < solution.placed.size(); ++i) {
    for (size_t j = i + 1; j < solution.placed.size(); ++j) {
      if (overlap(solution.placed[i], solution.placed[j], sizes[i],
                  sizes[j])) {
        out.push_back({Violation::Kind::Overlap, solution.placed[i].item_index,
                       solution.placed[j].item_index,
                       "items " + std::to_string(solution.placed[i].item_index) +
                           " and " +
                           std::to_string(solution.placed[j].item_index) +
                           " overlap"});
      }
    }
  }
  return out;
}

Solution empty_solution(const Instance& instance) {
  Solution s;
  s.unpacked_counts.reserve(instance.classes.size());
  for (const ItemClass& cls : instance.classes) {
    s.unpacked_counts.push_back(cls.count);
  }
  s.objective = instance.payload_volume();
  return s;
}

}  // namespace slopp
