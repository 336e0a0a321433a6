#pragma once

#include <complex>
#include <string>
#include <vector>

namespace ghostbeam {

using cplx = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Complex scalar field sampled on a regular slab grid. Storage is x-major:
// values[ix * ny + iy], so one x = const line (all y samples) is contiguous.
// origin is the position of sample (0, 0); sample (ix, iy) sits at
// (origin.x + ix*dx, origin.y + iy*dy). All lengths in nm.
class ComplexField2D {
 public:
  ComplexField2D() = default;
  ComplexField2D(int nx, int ny, double dx, double dy, Vec2 origin);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  Vec2 origin() const { return origin_; }

  double x(int ix) const { return origin_.x + ix * dx_; }
  double y(int iy) const { return origin_.y + iy * dy_; }

  cplx& at(int ix, int iy) { return values_[static_cast<size_t>(ix) * ny_ + iy]; }
  const cplx& at(int ix, int iy) const { return values_[static_cast<size_t>(ix) * ny_ + iy]; }

  cplx* line(int ix) { return values_.data() + static_cast<size_t>(ix) * ny_; }
  const cplx* line(int ix) const { return values_.data() + static_cast<size_t>(ix) * ny_; }

  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  // Total power sum |v|^2 dx dy.
  double power() const;
  // True iff power() == 1 within 1e-9.
  bool normalized() const;
  // Scales the field so that power() == target.
  void normalize(double target = 1.0);

  // Index of the grid column nearest to a physical x (clamped to range).
  int column_at(double x_pos) const;

  // Binary field file: one text header line
  //   "GHOSTBEAM-FIELD 1 <nx> <ny> <dx> <dy> <origin.x> <origin.y>\n"
  // followed by nx*ny*2 little-endian float32 (re, im interleaved), x-major
  // with y fastest. Exact layout documented in README.md.
  void save(const std::string& path) const;
  static ComplexField2D load(const std::string& path);

 private:
  int nx_ = 0;
  int ny_ = 0;
  double dx_ = 0.0;
  double dy_ = 0.0;
  Vec2 origin_;
  std::vector<cplx> values_;
};

// Uniform y-axis description shared by line-based operations.
struct YAxis {
  int n = 0;
  double dy = 0.0;
  double y0 = 0.0;  // position of sample 0

  double y(int i) const { return y0 + i * dy; }
  // Symmetric axis centered on y = 0 with an odd sample count, so the center
  // sample sits exactly on the axis.
  static YAxis centered(double half_width, double dy);
};

double line_norm(const std::vector<cplx>& v, double dy);
void normalize_line(std::vector<cplx>& v, double dy);

}  // namespace ghostbeam
