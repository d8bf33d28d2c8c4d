#ifndef RWOGG_SPARSE_MATRIX_HPP
#define RWOGG_SPARSE_MATRIX_HPP

#include "rwogg/error.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rwogg {

/// Row-compressed square matrix. Rows are sorted by column; duplicates are
/// summed at construction.
template <class S> class SparseMatrix {
public:
  struct Entry {
    std::uint32_t col;
    S value;
  };

  SparseMatrix() = default;

  /// Builds from per-row (column, value) lists.
  explicit SparseMatrix(std::vector<std::vector<Entry>> rows) {
    row_start_.reserve(rows.size() + 1);
    row_start_.push_back(0);
    for (auto &row : rows) {
      std::sort(row.begin(), row.end(), [](const Entry &a, const Entry &b) { return a.col < b.col; });
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!entries_.empty() && entries_.size() > row_start_.back() && entries_.back().col == row[i].col) {
          entries_.back().value += row[i].value;
        } else {
          entries_.push_back(std::move(row[i]));
        }
      }
      row_start_.push_back(entries_.size());
    }
  }

  std::size_t size() const { return row_start_.empty() ? 0 : row_start_.size() - 1; }
  std::size_t nonzeros() const { return entries_.size(); }

  std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
  }

  /// Entry (i, j), zero when absent.
  S at(std::size_t i, std::size_t j) const {
    auto r = row(i);
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Entry &e, std::size_t c) { return e.col < c; });
    if (it != r.end() && it->col == j)
      return it->value;
    return S(0);
  }

  /// y = x P. Rows with zero mass are skipped, so sparse supports stay cheap.
  std::vector<S> left_multiply(std::span<const S> x) const {
    if (x.size() != size())
      throw PreconditionError("dimension mismatch: vector " + std::to_string(x.size()) +
                              " vs matrix " + std::to_string(size()));
    std::vector<S> y(size(), S(0));
    for (std::size_t i = 0; i < size(); ++i) {
      const S &xi = x[i];
      if (xi == 0)
        continue;
      for (const auto &e : row(i))
        y[e.col] += xi * e.value;
    }
    return y;
  }

  /// Product A * B, used for two-step matrices.
  SparseMatrix multiply(const SparseMatrix &other) const {
    std::vector<std::vector<Entry>> rows(size());
    std::vector<S> acc(other.size(), S(0));
    std::vector<std::uint32_t> touched;
    std::vector<char> seen(other.size(), 0);
    for (std::size_t i = 0; i < size(); ++i) {
      touched.clear();
      for (const auto &a : row(i)) {
        for (const auto &b : other.row(a.col)) {
          if (!seen[b.col]) {
            seen[b.col] = 1;
            touched.push_back(b.col);
          }
          acc[b.col] += a.value * b.value;
        }
      }
      rows[i].reserve(touched.size());
      for (auto c : touched) {
        rows[i].push_back({c, acc[c]});
        acc[c] = S(0);
        seen[c] = 0;
      }
    }
    return SparseMatrix(std::move(rows));
  }

private:
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
};

} // namespace rwogg

#endif
