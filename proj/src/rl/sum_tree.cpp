#include "tenrl/rl/sum_tree.hpp"

#include <stdexcept>

namespace tenrl::rl {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity), base_(1) {
  if (capacity == 0) throw std::invalid_argument("SumTree: capacity must be positive");
  while (base_ < capacity) base_ <<= 1;
  nodes_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t leaf, double priority) {
  if (leaf >= capacity_) throw std::out_of_range("SumTree::set: leaf out of range");
  if (!(priority >= 0.0)) throw std::invalid_argument("SumTree::set: priority must be non-negative");
  std::size_t i = base_ + leaf;
  nodes_[i] = priority;
  for (i >>= 1; i >= 1; i >>= 1) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
}

std::size_t SumTree::find(double mass) const {
  if (!(total() > 0.0)) throw std::logic_error("SumTree::find on an empty tree");
  std::size_t i = 1;
  while (i < base_) {
    const std::size_t left = 2 * i;
    if (mass < nodes_[left] || nodes_[left + 1] <= 0.0) {
      i = left;
    } else {
      mass -= nodes_[left];
      i = left + 1;
    }
  }
  return i - base_;
}

}  // namespace tenrl::rl
