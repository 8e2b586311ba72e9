#ifndef SLOPP_MODEL_HPP
#define SLOPP_MODEL_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace slopp {

using Coord = std::int64_t;
using Volume = std::int64_t;
using Vec3 = std::array<Coord, 3>;

/// Container axis 2 is the vertical (height) axis throughout.
inline constexpr int kVerticalAxis = 2;

/// An axis permutation: perm[u] is the intrinsic item dimension lying along
/// container axis u.
struct Rotation {
  std::array<std::uint8_t, 3> perm{0, 1, 2};

  friend bool operator==(const Rotation&, const Rotation&) = default;
};

/// The six axis permutations in lexicographic order. Index into this table is
/// the rotation id used by the domain store and for tie-breaking.
inline constexpr std::array<Rotation, 6> kAllRotations{{
    {{0, 1, 2}},
    {{0, 2, 1}},
    {{1, 0, 2}},
    {{1, 2, 0}},
    {{2, 0, 1}},
    {{2, 1, 0}},
}};

/// Id of a rotation in kAllRotations, -1 if the permutation is malformed.
int rotation_index(const Rotation& rot);

struct Container {
  Vec3 dims{};

  Volume volume() const { return dims[0] * dims[1] * dims[2]; }
};

/// One class of identical boxes. vertical_ok[d] says intrinsic dimension d may
/// be oriented along the container's vertical axis.
struct ItemClass {
  Vec3 dims{};
  std::array<bool, 3> vertical_ok{};
  int count = 0;

  Volume volume() const { return dims[0] * dims[1] * dims[2]; }
};

struct Instance {
  std::string name;
  Container container;
  std::vector<ItemClass> classes;

  int total_items() const;
  Volume payload_volume() const;
};

struct Placement {
  int item_index = 0;
  int class_index = 0;
  Rotation rotation;
  Vec3 pos{};

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Solution {
  std::vector<Placement> placed;
  std::vector<int> unpacked_counts;
  Volume objective = 0;

  friend bool operator==(const Solution&, const Solution&) = default;
};

struct SolveStats {
  std::uint64_t nodes_explored = 0;
  std::uint64_t propagations = 0;
  std::uint64_t solutions_found = 0;
  std::chrono::duration<double> wall_time{0};
  bool proved_optimal = false;
};

/// Rotations whose vertical dimension is allowed up. Non-empty for any class
/// with at least one vertical_ok flag set.
std::vector<Rotation> allowed_rotations(const ItemClass& cls);

/// result[u] = cls.dims[rot.perm[u]]. Accepts any permutation.
Vec3 oriented_size(const ItemClass& cls, const Rotation& rot);

/// Separating-axis test, non-strict: boxes touching on a face do not overlap,
/// and a box with a zero side overlaps nothing.
bool boxes_overlap(const Vec3& pos_a, const Vec3& size_a, const Vec3& pos_b,
                   const Vec3& size_b);
bool overlap(const Placement& a, const Placement& b, const Vec3& sizes_a,
             const Vec3& sizes_b);

/// 0 <= pos[u] and pos[u] + sizes[u] <= dims[u] on every axis.
bool contains(const Container& container, const Vec3& pos, const Vec3& sizes);

/// Sum over classes of unpacked_counts[k] * class volume. Exact.
Volume leftover_volume(const Instance& instance, const Solution& solution);

/// Packed payload volume over container volume, in [0, 1].
double volume_utilization(const Instance& instance, const Solution& solution);

struct Violation {
  enum class Kind { Structure, Cardinality, Rotation, Containment, Overlap };

  Kind kind;
  int item_a = -1;
  int item_b = -1;
  std::string detail;

  std::string describe() const;
};

/// Checks structure, cardinality, rotation legality, containment and pairwise
/// non-overlap. Violations are data, not failures.
std::vector<Violation> validate(const Instance& instance,
                                const Solution& solution);

/// Nothing packed; objective equals the total payload volume.
Solution empty_solution(const Instance& instance);

}  // namespace slopp

#endif  // SLOPP_MODEL_HPP
