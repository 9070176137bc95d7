#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixstable/error.hpp"

namespace mixstable {

struct BatchMetadata {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::string spec;
  // Draws rejected because a heavy-tailed product overflowed to infinity.
  std::uint64_t redraws = 0;
};

/// n x d matrix of draws, row-major. d = 1 for univariate laws.
class SampleBatch {
 public:
  SampleBatch() = default;
  SampleBatch(std::size_t n, std::size_t dim) : n_(n), dim_(dim), data_(n * dim, 0.0) {
    if (dim == 0) throw ShapeError("batch dimension must be positive");
  }
  SampleBatch(std::vector<double> data, std::size_t dim) : dim_(dim), data_(std::move(data)) {
    if (dim == 0) throw ShapeError("batch dimension must be positive");
    if (data_.size() % dim != 0) throw ShapeError("flat data size is not a multiple of the dimension");
    n_ = data_.size() / dim;
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }

  // Scalar access for univariate batches.
  double& operator[](std::size_t i) noexcept { return data_[i * dim_]; }
  double operator[](std::size_t i) const noexcept { return data_[i * dim_]; }

  std::span<const double> values() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  /// Column j as a contiguous vector.
  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = data_[i * dim_ + j];
    return out;
  }

  /// Appends the rows of `other`; dimensions must agree.
  void append(const SampleBatch& other) {
    if (other.dim_ != dim_) throw DimensionMismatchError("cannot append batches of different dimension");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    n_ += other.n_;
    meta.redraws += other.meta.redraws;
  }

  BatchMetadata meta;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 1;
  std::vector<double> data_;
};

}  // namespace mixstable
