#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ccd {

/// Smoothed conformal transducer over a growing multiset of nonconformity
/// scores. Scores are stored in a treap keyed by distinct value with
/// multiplicities, so insert and rank queries are O(log n) expected.
///
/// Two scores tie iff they compare equal as doubles (which for finite values
/// other than signed zeros is bit equality; -0.0 is normalized to +0.0).
class TransducerState {
 public:
  TransducerState() = default;

  /// Inserts `score` and returns (gt(score) + tau * eq(score)) / n computed
  /// over the multiset that now includes it. Throws InputError if the score
  /// is not finite or tau is outside [0,1].
  double step(double score, double tau);

  void insert(double score);

  std::size_t size() const noexcept { return total(root_); }
  std::size_t distinct() const noexcept { return nodes_.size(); }

  std::size_t count_greater(double x) const noexcept;
  std::size_t count_equal(double x) const noexcept;
  std::size_t count_less(double x) const noexcept;

 private:
  static constexpr std::int32_t kNil = -1;

  struct Node {
    double key;
    std::uint64_t priority;
    std::uint32_t count;
    std::uint32_t subtree;  // total multiplicity in this subtree
    std::int32_t left = kNil;
    std::int32_t right = kNil;
  };

  std::uint32_t total(std::int32_t i) const noexcept { return i == kNil ? 0 : nodes_[i].subtree; }
  void pull(std::int32_t i) noexcept;
  std::int32_t insert_at(std::int32_t i, double key);
  std::int32_t rotate_right(std::int32_t i) noexcept;
  std::int32_t rotate_left(std::int32_t i) noexcept;

  std::vector<Node> nodes_;
  std::int32_t root_ = kNil;
};

}  // namespace ccd
