#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace corridor {

/// Fixed-capacity ring buffer preserving insertion order. operator[] indexes
/// logically: 0 is the oldest retained element.
template <typename T>
class RingBuffer {
public:
  explicit RingBuffer(std::size_t capacity) : data_(capacity) {
    if (capacity == 0) throw std::invalid_argument("RingBuffer capacity must be > 0");
  }

  void push(T v) {
    data_[head_] = v;
    head_ = (head_ + 1) % data_.size();
    if (size_ < data_.size()) ++size_;
  }

  bool full() const noexcept { return size_ == data_.size(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return data_.size(); }

  T operator[](std::size_t i) const {
    const std::size_t start = full() ? head_ : 0;
    return data_[(start + i) % data_.size()];
  }

private:
  std::vector<T> data_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

/// Unbiased (n-1) sample variance, accumulated in logical (chronological)
/// order so a recomputation over the same values is bit-identical.
inline double sample_variance(const RingBuffer<double>& buf) {
  const std::size_t n = buf.size();
  if (n < 2) throw std::invalid_argument("sample_variance needs at least 2 values");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += buf[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = buf[i] - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(n - 1);
}

inline double sample_variance(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("sample_variance needs at least 2 values");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(n - 1);
}

}  // namespace corridor
