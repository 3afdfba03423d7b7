#pragma once

#include <span>
#include <vector>

namespace smlab {

enum class Player { kFirst, kSecond };

// Dense row-major payoff matrix for player 1 (the maximizer).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);
  Matrix(int rows, int cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int i, int j) const { return v_[i * cols_ + j]; }
  double& operator()(int i, int j) { return v_[i * cols_ + j]; }
  std::span<const double> entries() const { return v_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

struct MixedProfile {
  std::vector<double> first;   // over rows
  std::vector<double> second;  // over columns
};

struct MatrixSolution {
  double value = 0.0;
  MixedProfile profile;
};

// Exact minimax solution by dense primal simplex (Bland's rule) on the
// standard zero-sum LP. The returned profile is an equilibrium up to 1e-9.
MatrixSolution solve_matrix_game(const Matrix& m);

// Player 1's payoff when `responder` best-responds to the opponent's mixed
// strategy `sigma`: max_i sum_j sigma(j) m(i,j) for the first player,
// min_j sum_i sigma(i) m(i,j) for the second. Throws std::invalid_argument
// on a dimension mismatch.
double best_response_value(const Matrix& m, std::span<const double> sigma,
                           Player responder);

// sigma1^T M sigma2.
double expected_payoff(const Matrix& m, std::span<const double> sigma1,
                       std::span<const double> sigma2);

// Largest gain either player gets by deviating from the profile.
double nash_gap(const Matrix& m, const MixedProfile& profile);

}  // namespace smlab
