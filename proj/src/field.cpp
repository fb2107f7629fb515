#include "gyra/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "gyra/theory.hpp"

namespace gyra {

namespace {

// sparse-key packing width per coordinate; lower dimensions get wider boxes
constexpr int pack_shift(int d) { return d == 1 ? 62 : d == 2 ? 31 : 21; }
constexpr std::int64_t coord_offset(int d) { return std::int64_t{1} << (pack_shift(d) - 1); }

// 15-point Gauss-Legendre rule on [-1, 1].
constexpr int kGL = 15;
constexpr double kGLx[kGL] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272, -0.7244177313601701,
    -0.5709721726085388, -0.3941513470775634, -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGLw[kGL] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719, 0.1395706779261543,
    0.1662692058169939, 0.1861610000155622, 0.1984314853271116, 0.2025782419255613,
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

struct FftCache {
  int n = 0;
  double* in = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~FftCache() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (in) fftw_free(in);
    if (freq) fftw_free(freq);
  }
  void ensure(int size) {
    if (n == size) return;
    this->~FftCache();
    n = size;
    in = fftw_alloc_real(n);
    freq = fftw_alloc_complex(n / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(n, in, freq, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, freq, in, FFTW_ESTIMATE);
  }
};

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// asymptotic integral int_z^inf cos(w) w^{-s} dw, valid for large z
double cosint_tail(double z, double s) {
  double sinz = std::sin(z), cosz = std::cos(z);
  double coeff = 1.0;
  double sk = s;
  double result = 0.0;
  double zpow = std::pow(z, -s);
  for (int iter = 0; iter < 12; ++iter) {
    double term = coeff * (-sinz * zpow + sk * cosz * zpow / z);
    result += term;
    double next_scale = std::abs(coeff * sk * (sk + 1.0) * zpow / (z * z));
    if (next_scale < 1e-17) break;
    coeff *= -sk * (sk + 1.0);
    zpow /= z * z;
    sk += 2.0;
  }
  return result;
}

// int_0^z (1 - cos w) w^{-1-q} dw by series + composite quadrature
double partial_kq_integral(double z, double q) {
  double z0 = std::min(z, 0.1);
  double result = std::pow(z0, 2.0 - q) / (2.0 * (2.0 - q)) -
                  std::pow(z0, 4.0 - q) / (24.0 * (4.0 - q)) +
                  std::pow(z0, 6.0 - q) / (720.0 * (6.0 - q));
  if (z <= z0) return result;
  int nsub = std::max(8, (int)std::ceil((z - z0) * 2.0));
  double h = (z - z0) / nsub;
  for (int i = 0; i < nsub; ++i) {
    double a = z0 + i * h;
    for (int g = 0; g < kGL; ++g) {
      double w = a + 0.5 * h * (kGLx[g] + 1.0);
      double sn = std::sin(0.5 * w);
      result += 0.5 * h * kGLw[g] * 2.0 * sn * sn * std::pow(w, -1.0 - q);
    }
  }
  return result;
}

// T(z) = int_z^inf (1 - cos w) w^{-1-q} dw
double upper_kq_integral(double z, double q) {
  if (z >= 30.0) return std::pow(z, -q) / q - cosint_tail(z, 1.0 + q);
  return theory::K_q(q) - partial_kq_integral(z, q);
}

}  // namespace

Field Field::delta(int d, int B, bool dense) {
  require(d >= 1 && d <= 3, errc::invalid, "dimension must be 1, 2 or 3");
  require(B >= 0 && (std::int64_t)B < coord_offset(d), errc::invalid,
          "box radius out of range");
  Field f;
  f.d_ = d;
  f.B_ = B;
  f.dense_ = dense;
  int origin[3] = {0, 0, 0};
  if (dense) {
    double pts = std::pow(2.0 * B + 1.0, d);
    require(pts <= (double)(1ll << 27), errc::cost_cap, "box too large for dense storage");
    f.v_.assign((std::size_t)pts, 0.0);
    f.v_[f.flat_index(std::span<const int>(origin, d))] = 1.0;
  } else {
    f.s_[pack(std::span<const int>(origin, d))] = 1.0;
  }
  return f;
}

Field Field::zeros_like(const Field& f) {
  Field g;
  g.d_ = f.d_;
  g.B_ = f.B_;
  g.t_ = f.t_;
  g.dense_ = f.dense_;
  if (g.dense_) g.v_.assign(f.v_.size(), 0.0);
  return g;
}

std::int64_t Field::pack(std::span<const int> x) {
  int d = (int)x.size();
  int shift = pack_shift(d);
  std::int64_t key = 0;
  for (int c : x) key = (key << shift) | ((std::int64_t)c + coord_offset(d));
  return key;
}

void Field::unpack(std::int64_t key, int d, int* x) {
  int shift = pack_shift(d);
  std::int64_t mask = (std::int64_t{1} << shift) - 1;
  for (int j = d - 1; j >= 0; --j) {
    x[j] = (int)((key & mask) - coord_offset(d));
    key >>= shift;
  }
}

std::size_t Field::flat_index(std::span<const int> x) const {
  std::size_t idx = 0;
  int side = 2 * B_ + 1;
  for (int j = 0; j < d_; ++j) idx = idx * side + (x[j] + B_);
  return idx;
}

double Field::at(std::span<const int> x) const {
  require((int)x.size() == d_, errc::invalid, "dimension mismatch");
  for (int j = 0; j < d_; ++j)
    if (x[j] < -B_ || x[j] > B_) return 0.0;
  if (dense_) return v_[flat_index(x)];
  auto it = s_.find(pack(x));
  return it == s_.end() ? 0.0 : it->second;
}

void Field::add(std::span<const int> x, double w) {
  for (int j = 0; j < d_; ++j)
    if (x[j] < -B_ || x[j] > B_) {
      escaped_ += w;
      return;
    }
  if (dense_)
    v_[flat_index(x)] += w;
  else
    s_[pack(x)] += w;
}

double Field::total() const {
  KahanSum sum;
  if (dense_)
    for (double v : v_) sum.add(v);
  else
    for (const auto& [k, v] : s_) sum.add(v);
  return sum.value();
}

std::size_t Field::nonzero_count() const {
  std::size_t n = 0;
  if (dense_) {
    for (double v : v_)
      if (v != 0.0) ++n;
  } else {
    for (const auto& [k, v] : s_)
      if (v != 0.0) ++n;
  }
  return n;
}

std::vector<double> Field::axis_marginal() const {
  std::vector<KahanSum> sums(2 * B_ + 1);
  for_each([&](std::span<const int> x, double v) { sums[x[0] + B_].add(v); });
  std::vector<double> m(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) m[i] = sums[i].value();
  return m;
}

void Field::scale(double factor) {
  if (dense_)
    for (double& v : v_) v *= factor;
  else
    for (auto& [k, v] : s_) v *= factor;
  escaped_ *= factor;
}

namespace {

// 1d linear convolution through FFTW; exact up to roundoff, no wraparound
// into the retained box (the padded length covers the full support).
void convolve_fft_1d(const std::vector<double>& f, int B, const std::vector<double>& ker, int R,
                     std::vector<double>& out) {
  static FftCache field_fft, kernel_fft;
  int nf = 2 * B + 1, nk = 2 * R + 1;
  int n = next_pow2(nf + nk - 1);
  field_fft.ensure(n);
  kernel_fft.ensure(n);

  std::fill(field_fft.in, field_fft.in + n, 0.0);
  std::copy(f.begin(), f.end(), field_fft.in);
  fftw_execute(field_fft.fwd);
  std::fill(kernel_fft.in, kernel_fft.in + n, 0.0);
  std::copy(ker.begin(), ker.end(), kernel_fft.in);
  fftw_execute(kernel_fft.fwd);

  for (int i = 0; i < n / 2 + 1; ++i) {
    double re = field_fft.freq[i][0] * kernel_fft.freq[i][0] -
                field_fft.freq[i][1] * kernel_fft.freq[i][1];
    double im = field_fft.freq[i][0] * kernel_fft.freq[i][1] +
                field_fft.freq[i][1] * kernel_fft.freq[i][0];
    field_fft.freq[i][0] = re;
    field_fft.freq[i][1] = im;
  }
  fftw_execute(field_fft.bwd);

  // output index m corresponds to x = m - B - R; keep x in [-B, B]
  out.assign(nf, 0.0);
  for (int i = 0; i < nf; ++i) {
    double v = field_fft.in[R + i] / n;
    out[i] = v > 0.0 ? v : 0.0;
  }
}

}  // namespace

Field convolve(const Field& f, const StepDistribution& D) {
  require(f.d_ == D.dimension(), errc::invalid, "dimension mismatch");
  require(D.truncation_radius() <= f.B_, errc::invalid,
          "kernel truncation radius exceeds field box radius");
  Field g = Field::zeros_like(f);
  g.t_ = f.t_ + 1;
  double before = f.total();

  if (f.dense_ && f.d_ == 1 &&
      (double)f.v_.size() * (2.0 * D.truncation_radius() + 1.0) > (double)(1 << 26)) {
    convolve_fft_1d(f.v_, f.B_, D.weights(), D.truncation_radius(), g.v_);
  } else {
    // scatter: g(x + y) += D(y) f(x)
    int R = D.truncation_radius();
    int d = f.d_;
    std::vector<std::array<int, 3>> sup;
    std::vector<double> supw;
    std::vector<int> y(d);
    for (std::size_t i = 0; i < D.point_count(); ++i) {
      double w = D.weights()[i];
      if (w == 0.0) continue;
      D.unflatten(i, y.data());
      std::array<int, 3> a{0, 0, 0};
      for (int j = 0; j < d; ++j) a[j] = y[j];
      sup.push_back(a);
      supw.push_back(w);
    }
    f.for_each([&](std::span<const int> x, double v) {
      int target[3];
      for (std::size_t s = 0; s < sup.size(); ++s) {
        for (int j = 0; j < d; ++j) target[j] = x[j] + sup[s][j];
        g.add(std::span<const int>(target, d), supw[s] * v);
      }
    });
  }

  double after = g.total();
  g.escaped_ = f.escaped_ + std::max(0.0, before - after);
  return g;
}

Field convolve_fields(const Field& a, const Field& b) {
  require(a.d_ == b.d_, errc::invalid, "dimension mismatch");
  Field g = Field::zeros_like(a);
  g.t_ = a.t_ + b.t_;
  int d = a.d_;
  a.for_each([&](std::span<const int> xa, double va) {
    int target[3];
    b.for_each([&](std::span<const int> xb, double vb) {
      for (int j = 0; j < d; ++j) target[j] = xa[j] + xb[j];
      g.add(std::span<const int>(target, d), va * vb);
    });
  });
  return g;
}

Moment absolute_moment(const Field& f, double r, Axis axis) {
  require(r > 0, errc::invalid, "moment order must be positive");
  KahanSum num, den;
  f.for_each([&](std::span<const int> x, double v) {
    den.add(v);
    if (axis == Axis::first_coordinate) {
      if (x[0] != 0) num.add(std::pow(std::abs((double)x[0]), r) * v);
    } else {
      double n2 = 0;
      for (int c : x) n2 += (double)c * c;
      if (n2 > 0) num.add(std::pow(n2, 0.5 * r) * v);
    }
  });
  require(den.value() > 0, errc::invalid, "all-zero field");
  return {num.value(), den.value()};
}

double gyration_radius(const Field& f, double r) {
  Moment m = absolute_moment(f, r, Axis::euclidean);
  return std::pow(m.ratio(), 1.0 / r);
}

double fractional_moment_via_integral(const Field& f, double q, double u_max, int n_quad) {
  require(q > 0 && q < 2, errc::invalid, "q must lie in (0, 2)");
  require(n_quad >= 100, errc::invalid, "n_quad must be >= 100");
  require(u_max > 0, errc::invalid, "u_max must be positive");

  // compact the axis marginal to nonzero off-origin entries
  std::vector<double> marg = f.axis_marginal();
  int B = f.box_radius();
  std::vector<double> xs, ms;
  double m2 = 0, m4 = 0, m6 = 0;
  int xmax = 1;
  for (int i = 0; i < (int)marg.size(); ++i) {
    int x1 = i - B;
    if (x1 == 0 || marg[i] == 0.0) continue;
    double ax = std::abs((double)x1);
    xs.push_back(ax);
    ms.push_back(marg[i]);
    m2 += ax * ax * marg[i];
    m4 += ax * ax * ax * ax * marg[i];
    m6 += std::pow(ax, 6) * marg[i];
    xmax = std::max(xmax, (int)ax);
  }
  if (xs.empty()) return 0.0;

  auto g = [&](double u) {
    double sum = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double sn = std::sin(0.5 * u * xs[i]);
      sum += 2.0 * sn * sn * ms[i];
    }
    return sum;
  };

  // small-u part by series of 1 - cos
  double u0 = std::min(0.1 / xmax, u_max);
  double integral = m2 / 2.0 * std::pow(u0, 2.0 - q) / (2.0 - q) -
                    m4 / 24.0 * std::pow(u0, 4.0 - q) / (4.0 - q) +
                    m6 / 720.0 * std::pow(u0, 6.0 - q) / (6.0 - q);

  if (u_max > u0) {
    int nsub = std::max(n_quad, (int)std::ceil((u_max - u0) * xmax / 2.0));
    double h = (u_max - u0) / nsub;
    KahanSum quad;
    for (int i = 0; i < nsub; ++i) {
      double a = u0 + i * h;
      for (int gi = 0; gi < kGL; ++gi) {
        double u = a + 0.5 * h * (kGLx[gi] + 1.0);
        quad.add(0.5 * h * kGLw[gi] * g(u) * std::pow(u, -1.0 - q));
      }
    }
    integral += quad.value();
  }

  // analytic tail: sum_x m(x) |x|^q T(u_max |x|)
  KahanSum tail;
  for (std::size_t i = 0; i < xs.size(); ++i)
    tail.add(ms[i] * std::pow(xs[i], q) * upper_kq_integral(u_max * xs[i], q));

  return (integral + tail.value()) / theory::K_q(q);
}

void write_field_csv(const Field& f, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  require(out != nullptr, errc::invalid, "cannot open " + path);
  for (int j = 0; j < f.dimension(); ++j) std::fprintf(out, "x%d,", j + 1);
  std::fprintf(out, "value\n");
  f.for_each([&](std::span<const int> x, double v) {
    for (int c : x) std::fprintf(out, "%d,", c);
    std::fprintf(out, "%.17g\n", v);
  });
  std::fclose(out);
}

void write_moment_series_csv(const MomentSeries& s, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  require(out != nullptr, errc::invalid, "cannot open " + path);
  std::fprintf(out, "t,numerator,denominator,ratio\n");
  for (const auto& e : s.entries)
    std::fprintf(out, "%d,%.17g,%.17g,%.17g\n", e.t, e.numerator, e.denominator, e.ratio);
  std::fclose(out);
}

}  // namespace gyra
