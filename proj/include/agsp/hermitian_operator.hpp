#pragma once

#include <string>
#include <vector>

#include "agsp/types.hpp"

namespace agsp {

/// Dense Hermitian matrix with provenance tags. Construction checks
/// Hermiticity to 1e-12 relative to the largest entry.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(Matrix entries, std::vector<std::string> tags = {});

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  const std::vector<std::string>& tags() const { return tags_; }
  HermitianOperator& tag(std::string t) {
    tags_.push_back(std::move(t));
    return *this;
  }

  Vector apply(const Vector& v) const { return entries_ * v; }
  Matrix apply_block(const Matrix& b) const { return entries_ * b; }

 private:
  Matrix entries_;
  std::vector<std::string> tags_;
};

}  // namespace agsp
