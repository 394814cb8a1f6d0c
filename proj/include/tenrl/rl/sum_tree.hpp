#pragma once

#include <cstddef>
#include <vector>

namespace tenrl::rl {

/// Binary sum tree over a fixed number of leaves. Internal nodes hold the
/// exact floating-point sum of their two children.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  void set(std::size_t leaf, double priority);
  double get(std::size_t leaf) const { return nodes_[base_ + leaf]; }
  double total() const { return nodes_[1]; }

  /// Leaf whose cumulative interval contains `mass` ∈ [0, total()). Never
  /// returns a zero-priority leaf while total() > 0.
  std::size_t find(double mass) const;

  /// Heap layout: node 1 is the root, node i has children 2i and 2i+1, and
  /// leaves occupy [leaf_offset(), leaf_offset() + capacity()).
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t leaf_offset() const { return base_; }

 private:
  std::size_t capacity_;
  std::size_t base_;
  std::vector<double> nodes_;
};

}  // namespace tenrl::rl
