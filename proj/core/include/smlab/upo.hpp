#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace smlab {

// Per-node record of realized child rewards for every joint action, with
// the weights that count how often each reward was offered to player 1
// before being consumed: w_ij(m) is the number of visits at which player 2
// chose j while (i,j) had been realized m-1 times, the realizing visit
// included.
class UpoAccumulator {
 public:
  UpoAccumulator() = default;
  UpoAccumulator(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  // One visit of the owning node: (i,j) was played and the child returned
  // `reward`.
  void on_selection(int i, int j, double reward);

  std::int64_t realized(int i, int j) const { return at(n_, i, j); }
  std::int64_t pending_weight(int i, int j) const { return at(pending_w_, i, j); }
  std::int64_t weight_sum(int i, int j) const { return at(sum_w_, i, j); }
  std::int64_t column_count(int j) const { return column_count_[j]; }
  // Arithmetic and weighted averages; empty before the first realization.
  std::optional<double> plain_mean(int i, int j) const;
  std::optional<double> weighted_mean(int i, int j) const;
  // |plain - weighted|; empty before the first realization.
  std::optional<double> bias(int i, int j) const;
  // Largest bias over realized joint actions; 0 when nothing is realized.
  double max_bias() const;

  // Sum_m w(i,j)(m) + pending(i,j) == column_count(j) for every (i,j).
  bool weight_identity_holds() const;

  // (n, bias) logged whenever the realization count n of (i,j) reaches a
  // power of two.
  std::span<const std::pair<std::int64_t, double>> bias_series(int i, int j) const {
    return series_[i * cols_ + j];
  }

 private:
  template <class T>
  const T& at(const std::vector<T>& v, int i, int j) const {
    return v[i * cols_ + j];
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int64_t> n_;
  std::vector<double> sum_x_;
  std::vector<std::int64_t> pending_w_;
  std::vector<std::int64_t> sum_w_;
  std::vector<double> sum_wx_;
  std::vector<std::int64_t> column_count_;
  std::vector<std::vector<std::pair<std::int64_t, double>>> series_;
};

// Maximum of series[from_index..]. Empty when the range is empty.
std::optional<double> suffix_max_bias(std::span<const double> series,
                                      std::size_t from_index);

}  // namespace smlab
