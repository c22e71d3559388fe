#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace specklepuf {

struct Dims {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  bool operator==(const Dims&) const = default;
};

/// Dense row-major 2D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(Dims dims, T fill = T{}) : dims_(dims), data_(dims.size(), fill) {}
  Grid(Dims dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {}

  Dims dims() const noexcept { return dims_; }
  std::size_t rows() const noexcept { return dims_.rows; }
  std::size_t cols() const noexcept { return dims_.cols; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * dims_.cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * dims_.cols + c]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  Dims dims_;
  std::vector<T> data_;
};

}  // namespace specklepuf
