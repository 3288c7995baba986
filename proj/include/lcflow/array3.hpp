#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace lcflow {

/// Dense 3D array of doubles with one ghost layer on every side.
///
/// Interior indices run over [0, n) per axis; ghosts live at -1 and n.
/// Storage is x-fastest, which is also the checkpoint ordering.
class Array3 {
 public:
  Array3() = default;
  Array3(int nx, int ny, int nz)
      : nx_(nx),
        ny_(ny),
        nz_(nz),
        sx_(nx + 2),
        sxy_(static_cast<std::size_t>(nx + 2) * (ny + 2)),
        data_(sxy_ * (nz + 2), 0.0) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nz() const noexcept { return nz_; }
  std::size_t interior_size() const noexcept {
    return static_cast<std::size_t>(nx_) * ny_ * nz_;
  }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(k + 1) * sxy_ +
           static_cast<std::size_t>(j + 1) * sx_ + static_cast<std::size_t>(i + 1);
  }
  double& operator()(int i, int j, int k) noexcept { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const noexcept { return data_[index(i, j, k)]; }

  std::span<double> storage() noexcept { return data_; }
  std::span<const double> storage() const noexcept { return data_; }

  bool same_shape(const Array3& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_;
  }

  void fill(double v) {
    for (double& x : data_) x = v;
  }

  /// Copies the periodic images into the x and y ghost layers, for every
  /// z-plane including the z ghosts (so corners are consistent).
  void fill_periodic_xy() noexcept {
    for (int k = -1; k <= nz_; ++k) {
      for (int j = 0; j < ny_; ++j) {
        (*this)(-1, j, k) = (*this)(nx_ - 1, j, k);
        (*this)(nx_, j, k) = (*this)(0, j, k);
      }
      for (int i = -1; i <= nx_; ++i) {
        (*this)(i, -1, k) = (*this)(i, ny_ - 1, k);
        (*this)(i, ny_, k) = (*this)(i, 0, k);
      }
    }
  }

  bool all_finite() const noexcept {
    for (int k = 0; k < nz_; ++k)
      for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
          if (!std::isfinite((*this)(i, j, k))) return false;
    return true;
  }

  friend bool operator==(const Array3& a, const Array3& b) {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.nz_ == b.nz_ && a.data_ == b.data_;
  }

 private:
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::size_t sx_ = 0, sxy_ = 0;
  std::vector<double> data_;
};

/// Horizontal 2D array, one value per wall face (x-fastest).
struct WallData {
  int nx = 0, ny = 0;
  std::vector<double> v;

  WallData() = default;
  WallData(int nx_, int ny_) : nx(nx_), ny(ny_), v(static_cast<std::size_t>(nx_) * ny_, 0.0) {}
  double& operator()(int i, int j) noexcept { return v[static_cast<std::size_t>(j) * nx + i]; }
  double operator()(int i, int j) const noexcept { return v[static_cast<std::size_t>(j) * nx + i]; }
};

}  // namespace lcflow
