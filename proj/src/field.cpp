#include "ghostbeam/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ghostbeam/errors.hpp"

namespace ghostbeam {

ComplexField2D::ComplexField2D(int nx, int ny, double dx, double dy, Vec2 origin)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy), origin_(origin) {
  if (nx <= 0 || ny <= 0 || dx <= 0.0 || dy <= 0.0)
    throw std::invalid_argument("ComplexField2D: grid dimensions and spacings must be positive");
  values_.assign(static_cast<size_t>(nx) * ny, cplx(0.0, 0.0));
}

double ComplexField2D::power() const {
  double acc = 0.0;
  for (const cplx& v : values_) acc += std::norm(v);
  return acc * dx_ * dy_;
}

bool ComplexField2D::normalized() const { return std::abs(power() - 1.0) <= 1e-9; }

void ComplexField2D::normalize(double target) {
  double p = power();
  if (p <= 0.0) throw NumericalError("normalize: field has zero power");
  double s = std::sqrt(target / p);
  for (cplx& v : values_) v *= s;
}

int ComplexField2D::column_at(double x_pos) const {
  int ix = static_cast<int>(std::lround((x_pos - origin_.x) / dx_));
  return std::clamp(ix, 0, nx_ - 1);
}

void ComplexField2D::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open field file for writing: " + path);
  std::ostringstream header;
  header.precision(17);
  header << "GHOSTBEAM-FIELD 1 " << nx_ << ' ' << ny_ << ' ' << dx_ << ' ' << dy_ << ' '
         << origin_.x << ' ' << origin_.y << '\n';
  out << header.str();
  std::vector<float> buf(values_.size() * 2);
  for (size_t i = 0; i < values_.size(); ++i) {
    buf[2 * i] = static_cast<float>(values_[i].real());
    buf[2 * i + 1] = static_cast<float>(values_[i].imag());
  }
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw ConfigError("short write on field file: " + path);
}

ComplexField2D ComplexField2D::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open field file: " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  int version = 0, nx = 0, ny = 0;
  double dx = 0, dy = 0;
  Vec2 origin;
  hs >> magic >> version >> nx >> ny >> dx >> dy >> origin.x >> origin.y;
  if (!hs || magic != "GHOSTBEAM-FIELD")
    throw ConfigError("not a field file (bad header): " + path);
  if (version != 1) throw ConfigError("unsupported field file version in " + path);
  ComplexField2D f(nx, ny, dx, dy, origin);
  std::vector<float> buf(static_cast<size_t>(nx) * ny * 2);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
    throw ConfigError("truncated field file: " + path);
  for (size_t i = 0; i < f.values_.size(); ++i)
    f.values_[i] = cplx(buf[2 * i], buf[2 * i + 1]);
  return f;
}

YAxis YAxis::centered(double half_width, double dy) {
  if (half_width <= 0.0 || dy <= 0.0)
    throw std::invalid_argument("YAxis::centered: extent and spacing must be positive");
  int half = static_cast<int>(std::floor(half_width / dy));
  YAxis ax;
  ax.n = 2 * half + 1;
  ax.dy = dy;
  ax.y0 = -half * dy;
  return ax;
}

double line_norm(const std::vector<cplx>& v, double dy) {
  double acc = 0.0;
  for (const cplx& z : v) acc += std::norm(z);
  return std::sqrt(acc * dy);
}

void normalize_line(std::vector<cplx>& v, double dy) {
  double n = line_norm(v, dy);
  if (n <= 0.0) throw NumericalError("normalize_line: zero norm");
  for (cplx& z : v) z /= n;
}

}  // namespace ghostbeam
