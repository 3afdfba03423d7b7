#include "smlab/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace smlab {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), v_(static_cast<std::size_t>(rows * cols), fill) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("empty matrix");
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), v_(std::move(entries)) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("empty matrix");
  if (v_.size() != static_cast<std::size_t>(rows * cols)) {
    throw std::invalid_argument("matrix entry count mismatch");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
  if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("empty matrix");
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) {
      throw std::invalid_argument("ragged matrix");
    }
    v_.insert(v_.end(), r.begin(), r.end());
  }
}

namespace {

constexpr double kPivotTol = 1e-12;

// Tableau for: maximize sum_j y_j  s.t.  B y <= 1, y >= 0, with B > 0.
// Columns: y_0..y_{n-1}, s_0..s_{m-1}, rhs. Last row is the objective.
class Tableau {
 public:
  explicit Tableau(const Matrix& b)
      : m_(b.rows()), n_(b.cols()), width_(n_ + m_ + 1),
        t_(static_cast<std::size_t>((m_ + 1) * width_), 0.0), basis_(m_) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) at(i, j) = b(i, j);
      at(i, n_ + i) = 1.0;
      at(i, width_ - 1) = 1.0;
      basis_[i] = n_ + i;
    }
    for (int j = 0; j < n_; ++j) at(m_, j) = -1.0;
  }

  void solve() {
    for (;;) {
      int enter = -1;
      for (int c = 0; c < n_ + m_; ++c) {
        if (at(m_, c) < -kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a > kPivotTol) best = std::min(best, at(r, width_ - 1) / a);
      }
      if (!std::isfinite(best)) throw std::logic_error("simplex: unbounded LP");
      // Bland: among minimum-ratio rows, the smallest basic variable leaves.
      int leave = -1;
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol || at(r, width_ - 1) / a > best + kPivotTol) continue;
        if (leave < 0 || basis_[r] < basis_[leave]) leave = r;
      }
      pivot(leave, enter);
    }
  }

  double objective() const { return at(m_, width_ - 1); }
  std::vector<double> primal() const {
    std::vector<double> y(n_, 0.0);
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < n_) y[basis_[r]] = at(r, width_ - 1);
    }
    return y;
  }
  std::vector<double> dual() const {
    std::vector<double> x(m_);
    for (int i = 0; i < m_; ++i) x[i] = at(m_, n_ + i);
    return x;
  }

 private:
  double& at(int r, int c) { return t_[r * width_ + c]; }
  double at(int r, int c) const { return t_[r * width_ + c]; }

  void pivot(int row, int col) {
    const double p = at(row, col);
    for (int c = 0; c < width_; ++c) at(row, c) /= p;
    for (int r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < width_; ++c) at(r, c) -= f * at(row, c);
    }
    basis_[row] = col;
  }

  int m_, n_, width_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

std::vector<double> normalized(std::vector<double> v) {
  for (double& x : v) x = std::max(x, 0.0);
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
  return v;
}

}  // namespace

MatrixSolution solve_matrix_game(const Matrix& m) {
  for (double v : m.entries()) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite payoff");
  }
  const auto [lo, hi] = std::minmax_element(m.entries().begin(), m.entries().end());
  if (*hi - *lo < 1e-15) {
    MatrixSolution s;
    s.value = *lo;
    s.profile.first.assign(m.rows(), 1.0 / m.rows());
    s.profile.second.assign(m.cols(), 1.0 / m.cols());
    return s;
  }
  // Shift to strictly positive entries; the shifted value is then positive.
  const double shift = 1.0 - *lo;
  Matrix b = m;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) b(i, j) += shift;
  }
  Tableau t(b);
  t.solve();
  MatrixSolution s;
  s.profile.first = normalized(t.dual());
  s.profile.second = normalized(t.primal());
  // Midpoint of the two certified bounds cancels most rounding.
  const double upper = best_response_value(m, s.profile.second, Player::kFirst);
  const double lower = best_response_value(m, s.profile.first, Player::kSecond);
  s.value = 0.5 * (upper + lower);
  return s;
}

double best_response_value(const Matrix& m, std::span<const double> sigma,
                           Player responder) {
  if (responder == Player::kFirst) {
    if (static_cast<int>(sigma.size()) != m.cols()) {
      throw std::invalid_argument("best_response_value: sigma has " +
                                  std::to_string(sigma.size()) +
                                  " entries, matrix has " +
                                  std::to_string(m.cols()) + " columns");
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m.rows(); ++i) {
      double row = 0.0;
      for (int j = 0; j < m.cols(); ++j) row += sigma[j] * m(i, j);
      best = std::max(best, row);
    }
    return best;
  }
  if (static_cast<int>(sigma.size()) != m.rows()) {
    throw std::invalid_argument("best_response_value: sigma has " +
                                std::to_string(sigma.size()) +
                                " entries, matrix has " +
                                std::to_string(m.rows()) + " rows");
  }
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m.cols(); ++j) {
    double col = 0.0;
    for (int i = 0; i < m.rows(); ++i) col += sigma[i] * m(i, j);
    best = std::min(best, col);
  }
  return best;
}

double expected_payoff(const Matrix& m, std::span<const double> sigma1,
                       std::span<const double> sigma2) {
  double total = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) total += sigma1[i] * sigma2[j] * m(i, j);
  }
  return total;
}

double nash_gap(const Matrix& m, const MixedProfile& profile) {
  const double u = expected_payoff(m, profile.first, profile.second);
  return std::max(best_response_value(m, profile.second, Player::kFirst) - u,
                  u - best_response_value(m, profile.first, Player::kSecond));
}

}  // namespace smlab
