#include "ccd/transducer.hpp"

#include <cmath>
#include <limits>

#include "ccd/error.hpp"

namespace ccd {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void TransducerState::pull(std::int32_t i) noexcept {
  auto& n = nodes_[i];
  n.subtree = n.count + total(n.left) + total(n.right);
}

std::int32_t TransducerState::rotate_right(std::int32_t i) noexcept {
  const std::int32_t l = nodes_[i].left;
  nodes_[i].left = nodes_[l].right;
  nodes_[l].right = i;
  pull(i);
  pull(l);
  return l;
}

std::int32_t TransducerState::rotate_left(std::int32_t i) noexcept {
  const std::int32_t r = nodes_[i].right;
  nodes_[i].right = nodes_[r].left;
  nodes_[r].left = i;
  pull(i);
  pull(r);
  return r;
}

// Max-heap on priority.
std::int32_t TransducerState::insert_at(std::int32_t i, double key) {
  if (i == kNil) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{key, splitmix64(nodes_.size()), 1, 1});
    return id;
  }
  if (key < nodes_[i].key) {
    const std::int32_t child = insert_at(nodes_[i].left, key);
    nodes_[i].left = child;
    pull(i);
    if (nodes_[child].priority > nodes_[i].priority) return rotate_right(i);
  } else if (key > nodes_[i].key) {
    const std::int32_t child = insert_at(nodes_[i].right, key);
    nodes_[i].right = child;
    pull(i);
    if (nodes_[child].priority > nodes_[i].priority) return rotate_left(i);
  } else {
    ++nodes_[i].count;
    ++nodes_[i].subtree;
  }
  return i;
}

void TransducerState::insert(double score) {
  if (!std::isfinite(score)) throw InputError("transducer: score is not finite");
  if (size() == std::numeric_limits<std::uint32_t>::max()) throw InputError("transducer: capacity exceeded");
  root_ = insert_at(root_, score + 0.0);
}

std::size_t TransducerState::count_greater(double x) const noexcept {
  std::size_t result = 0;
  for (std::int32_t i = root_; i != kNil;) {
    const auto& n = nodes_[i];
    if (x < n.key) {
      result += n.count + total(n.right);
      i = n.left;
    } else if (x > n.key) {
      i = n.right;
    } else {
      return result + total(n.right);
    }
  }
  return result;
}

std::size_t TransducerState::count_equal(double x) const noexcept {
  for (std::int32_t i = root_; i != kNil;) {
    const auto& n = nodes_[i];
    if (x < n.key) {
      i = n.left;
    } else if (x > n.key) {
      i = n.right;
    } else {
      return n.count;
    }
  }
  return 0;
}

std::size_t TransducerState::count_less(double x) const noexcept {
  return size() - count_greater(x) - count_equal(x);
}

double TransducerState::step(double score, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("transducer: tau must lie in [0,1]");
  insert(score);
  const double gt = static_cast<double>(count_greater(score));
  const double eq = static_cast<double>(count_equal(score));
  return (gt + tau * eq) / static_cast<double>(size());
}

}  // namespace ccd
