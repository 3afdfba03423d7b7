#include "smlab/upo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smlab {

UpoAccumulator::UpoAccumulator(int rows, int cols)
    : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("upo: empty action grid");
  const auto k = static_cast<std::size_t>(rows * cols);
  n_.assign(k, 0);
  sum_x_.assign(k, 0.0);
  pending_w_.assign(k, 0);
  sum_w_.assign(k, 0);
  sum_wx_.assign(k, 0.0);
  column_count_.assign(cols, 0);
  series_.resize(k);
}

void UpoAccumulator::on_selection(int i, int j, double reward) {
  for (int r = 0; r < rows_; ++r) ++pending_w_[r * cols_ + j];
  ++column_count_[j];
  const int k = i * cols_ + j;
  const std::int64_t w = pending_w_[k];
  ++n_[k];
  sum_x_[k] += reward;
  sum_w_[k] += w;
  sum_wx_[k] += static_cast<double>(w) * reward;
  pending_w_[k] = 0;
  const std::int64_t n = n_[k];
  if ((n & (n - 1)) == 0) series_[k].emplace_back(n, *bias(i, j));
}

std::optional<double> UpoAccumulator::plain_mean(int i, int j) const {
  const std::int64_t n = at(n_, i, j);
  if (n == 0) return std::nullopt;
  return at(sum_x_, i, j) / static_cast<double>(n);
}

std::optional<double> UpoAccumulator::weighted_mean(int i, int j) const {
  const std::int64_t w = at(sum_w_, i, j);
  if (w == 0) return std::nullopt;
  return at(sum_wx_, i, j) / static_cast<double>(w);
}

std::optional<double> UpoAccumulator::bias(int i, int j) const {
  const auto plain = plain_mean(i, j);
  if (!plain) return std::nullopt;
  return std::fabs(*plain - *weighted_mean(i, j));
}

double UpoAccumulator::max_bias() const {
  double best = 0.0;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      if (const auto b = bias(i, j)) best = std::max(best, *b);
    }
  }
  return best;
}

bool UpoAccumulator::weight_identity_holds() const {
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      if (at(sum_w_, i, j) + at(pending_w_, i, j) != column_count_[j]) return false;
    }
  }
  return true;
}

std::optional<double> suffix_max_bias(std::span<const double> series,
                                      std::size_t from_index) {
  if (from_index >= series.size()) return std::nullopt;
  return *std::max_element(series.begin() + static_cast<std::ptrdiff_t>(from_index),
                           series.end());
}

}  // namespace smlab
