#include "sgns/field_transform.hpp"

#include "sgns/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

namespace sgns {

namespace {

using cplx = std::complex<double>;

// Signed wavenumber of half-complex row j2.
int signed_row(int j2, int n) { return j2 <= n / 2 ? j2 : j2 - n; }

cplx derivative_factor(int k1, int k2, int d1, int d2) {
  cplx f{1.0, 0.0};
  for (int i = 0; i < d1; ++i) f *= cplx(0.0, k1);
  for (int i = 0; i < d2; ++i) f *= cplx(0.0, k2);
  return f;
}

void format_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void write_le_doubles(std::ostream& out, const std::vector<double>& values) {
  static_assert(sizeof(double) == 8);
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
}

}  // namespace

GridField GridField::sample(int size, const std::function<double(double, double)>& f) {
  GridField out(size);
  const double h = out.spacing();
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) out(i, j) = f(i * h, j * h);
  return out;
}

VectorGridField VectorGridField::sample(int size,
                                        const std::function<std::pair<double, double>(double, double)>& f) {
  VectorGridField out(size);
  const double h = out.x.spacing();
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      auto [a, b] = f(i * h, j * h);
      out.x(i, j) = a;
      out.y(i, j) = b;
    }
  return out;
}

void require_power_of_two(int n) {
  if (n < 2 || (n & (n - 1)) != 0) throw InvalidArgument("grid size must be a power of two >= 2");
}

int dealiased_wavenumber(int n) { return (n - 1) / 3; }

std::size_t grid_capacity(int n) {
  const int kmax = dealiased_wavenumber(n);
  std::size_t count = 0;
  // Basis order is by |k|^2; the first mode leaving the square |k|_inf <= kmax
  // has |k|^2 <= (kmax+1)^2, so this probe always reaches it.
  const SpectralBasis probe = build_basis(modes_up_to_shell(static_cast<double>((kmax + 1) * (kmax + 1))));
  for (const auto& m : probe.modes()) {
    if (std::abs(m.k1) > kmax || std::abs(m.k2) > kmax) break;
    ++count;
  }
  return count;
}

bool has_headroom(const SpectralBasis& basis, int n) { return basis.max_wavenumber() <= dealiased_wavenumber(n); }

VectorGridField evaluate_mode(const WaveMode& mode, int n) {
  const double ax = kModeNormalization * mode.polarization_x();
  const double ay = kModeNormalization * mode.polarization_y();
  return VectorGridField::sample(n, [&](double x, double y) {
    const double arg = mode.k1 * x + mode.k2 * y;
    const double s = mode.phase == Phase::Cosine ? std::cos(arg) : std::sin(arg);
    return std::pair{ax * s, ay * s};
  });
}

// ---------------------------------------------------------------------------

FourierMoments::FourierMoments(RealFft2d& fft, const GridField& f)
    : n_(f.n), cell_area_(f.cell_area()), spectrum_(fft.spectral_size()) {
  if (fft.n() != f.n) throw InvalidArgument("FourierMoments: grid size mismatch");
  fft.forward(f.values, spectrum_);
}

cplx FourierMoments::at(int q1, int q2) const {
  int a = ((q1 % n_) + n_) % n_;
  int b = ((q2 % n_) + n_) % n_;
  const int w = n_ / 2 + 1;
  if (a <= n_ / 2) return spectrum_[static_cast<std::size_t>(b) * w + a];
  a = n_ - a;
  b = (n_ - b) % n_;
  return std::conj(spectrum_[static_cast<std::size_t>(b) * w + a]);
}

double FourierMoments::cos_moment(int q1, int q2) const { return cell_area_ * at(q1, q2).real(); }
double FourierMoments::sin_moment(int q1, int q2) const { return -cell_area_ * at(q1, q2).imag(); }

// ---------------------------------------------------------------------------

FieldTransform::FieldTransform(SpectralBasis basis, int n) : basis_(std::move(basis)), n_(n), fft_((require_power_of_two(n), n)) {
  if (!has_headroom(basis_, n)) {
    throw InvalidArgument("FieldTransform: grid of size " + std::to_string(n) +
                          " lacks dealiasing headroom for wavenumber " + std::to_string(basis_.max_wavenumber()));
  }
  const int w = fft_.spectral_width();
  slots_.reserve(basis_.size());
  for (const auto& m : basis_.modes()) {
    ModeSlot s;
    const int row = ((m.k2 % n) + n) % n;
    s.slot = static_cast<std::size_t>(row) * w + m.k1;
    s.on_axis = m.k1 == 0;
    s.mirror_slot = s.on_axis ? static_cast<std::size_t>((n - row) % n) * w : s.slot;
    s.ax = kModeNormalization * m.polarization_x();
    s.ay = kModeNormalization * m.polarization_y();
    s.k1 = m.k1;
    s.k2 = m.k2;
    s.phase = m.phase;
    slots_.push_back(s);
  }
  spec_a_.resize(fft_.spectral_size());
  spec_b_.resize(fft_.spectral_size());
}

void FieldTransform::fill_component_spectrum(const SpectralVelocity& v, bool x_component, int d1, int d2,
                                             std::vector<cplx>& spec) const {
  std::fill(spec.begin(), spec.end(), cplx{});
  for (std::size_t j = 0; j < v.basis_size(); ++j) {
    const auto& s = slots_[j];
    const double a = v.coefficients[static_cast<Eigen::Index>(j)] * (x_component ? s.ax : s.ay);
    if (a == 0.0) continue;
    // cos(k.x) = (e^{ik.x} + e^{-ik.x})/2,  sin(k.x) = (e^{ik.x} - e^{-ik.x})/(2i)
    const cplx hat = s.phase == Phase::Cosine ? cplx(0.5 * a, 0.0) : cplx(0.0, -0.5 * a);
    const cplx val = hat * derivative_factor(s.k1, s.k2, d1, d2);
    spec[s.slot] += val;
    if (s.on_axis) spec[s.mirror_slot] += std::conj(val);
  }
}

void FieldTransform::to_grid(const std::vector<cplx>& spec, GridField& out) {
  if (out.n != n_) out = GridField(n_);
  fft_.inverse(spec, out.values);
}

VectorGridField FieldTransform::synthesize(const SpectralVelocity& v) {
  if (v.basis_size() > basis_.size()) throw InvalidArgument("synthesize: coefficient vector longer than basis");
  VectorGridField out(n_);
  fill_component_spectrum(v, true, 0, 0, spec_a_);
  to_grid(spec_a_, out.x);
  fill_component_spectrum(v, false, 0, 0, spec_a_);
  to_grid(spec_a_, out.y);
  return out;
}

FieldTransform::VelocityWithGradient FieldTransform::synthesize_with_gradient(const SpectralVelocity& v) {
  if (v.basis_size() > basis_.size()) throw InvalidArgument("synthesize: coefficient vector longer than basis");
  VelocityWithGradient out{VectorGridField(n_), GridField(n_), GridField(n_), GridField(n_), GridField(n_)};
  fill_component_spectrum(v, true, 0, 0, spec_a_);
  to_grid(spec_a_, out.u.x);
  fill_component_spectrum(v, false, 0, 0, spec_a_);
  to_grid(spec_a_, out.u.y);
  fill_component_spectrum(v, true, 1, 0, spec_a_);
  to_grid(spec_a_, out.dux_dx);
  fill_component_spectrum(v, true, 0, 1, spec_a_);
  to_grid(spec_a_, out.dux_dy);
  fill_component_spectrum(v, false, 1, 0, spec_a_);
  to_grid(spec_a_, out.duy_dx);
  fill_component_spectrum(v, false, 0, 1, spec_a_);
  to_grid(spec_a_, out.duy_dy);
  return out;
}

GridField FieldTransform::synthesize_derivative(const SpectralVelocity& v, int component, int d1, int d2) {
  if (v.basis_size() > basis_.size()) throw InvalidArgument("synthesize: coefficient vector longer than basis");
  GridField out(n_);
  fill_component_spectrum(v, component == 0, d1, d2, spec_a_);
  to_grid(spec_a_, out);
  return out;
}

SpectralVelocity FieldTransform::analyze(const VectorGridField& f) {
  if (f.x.n != n_ || f.y.n != n_) throw InvalidArgument("analyze: grid size mismatch");
  fft_.forward(f.x.values, spec_a_);
  fft_.forward(f.y.values, spec_b_);
  const double area = f.x.cell_area();
  SpectralVelocity out(basis_.size());
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    const auto& s = slots_[j];
    const cplx fx = spec_a_[s.slot];
    const cplx fy = spec_b_[s.slot];
    const double mx = s.phase == Phase::Cosine ? fx.real() : -fx.imag();
    const double my = s.phase == Phase::Cosine ? fy.real() : -fy.imag();
    out.coefficients[static_cast<Eigen::Index>(j)] = area * (s.ax * mx + s.ay * my);
  }
  return out;
}

SpectralVelocity FieldTransform::leray_project(const VectorGridField& f) {
  if (f.n() != n_ || f.y.n != n_ || f.x.values.size() != static_cast<std::size_t>(n_) * n_) {
    throw InvalidArgument("leray_project: field is not sampled on the solver grid");
  }
  return analyze(f);
}

VectorGridField FieldTransform::gradient(const GridField& f) {
  if (f.n != n_) throw InvalidArgument("gradient: grid size mismatch");
  fft_.forward(f.values, spec_a_);
  const int w = fft_.spectral_width();
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  for (int j2 = 0; j2 < n_; ++j2) {
    const int k2 = signed_row(j2, n_);
    for (int k1 = 0; k1 < w; ++k1) {
      const std::size_t idx = static_cast<std::size_t>(j2) * w + k1;
      const cplx hat = spec_a_[idx] * scale;
      const bool nyquist = (k1 == n_ / 2) || (j2 == n_ / 2);
      spec_b_[idx] = nyquist ? cplx{} : hat * cplx(0.0, k2);
      spec_a_[idx] = nyquist ? cplx{} : hat * cplx(0.0, k1);
    }
  }
  VectorGridField out(n_);
  to_grid(spec_a_, out.x);
  to_grid(spec_b_, out.y);
  return out;
}

// ---------------------------------------------------------------------------

VectorGridField gradient(const GridField& f) {
  require_power_of_two(f.n);
  FieldTransform t(SpectralBasis{}, f.n);
  return t.gradient(f);
}

double lp_norm(const GridField& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (double v : f.values) sum += std::pow(std::abs(v), p);
  return std::pow(sum * f.cell_area(), 1.0 / p);
}

double lp_norm(const VectorGridField& f, double p) {
  if (f.x.n != f.y.n) throw InvalidArgument("lp_norm: component size mismatch");
  GridField mag(f.x.n);
  for (std::size_t i = 0; i < mag.values.size(); ++i) mag.values[i] = std::hypot(f.x.values[i], f.y.values[i]);
  return lp_norm(mag, p);
}

GridField truncate_band(const GridField& f, int kmax) {
  RealFft2d fft(f.n);
  std::vector<cplx> spec(fft.spectral_size());
  fft.forward(f.values, spec);
  const int w = fft.spectral_width();
  const double scale = 1.0 / (static_cast<double>(f.n) * f.n);
  for (int j2 = 0; j2 < f.n; ++j2) {
    const int k2 = signed_row(j2, f.n);
    for (int k1 = 0; k1 < w; ++k1) {
      auto& c = spec[static_cast<std::size_t>(j2) * w + k1];
      c = (k1 > kmax || std::abs(k2) > kmax || k1 == f.n / 2 || j2 == f.n / 2) ? cplx{} : c * scale;
    }
  }
  GridField out(f.n);
  fft.inverse(spec, out.values);
  return out;
}

GridField dealiased_product(const GridField& f, const GridField& g) {
  if (f.n != g.n) throw InvalidArgument("dealiased_product: grid size mismatch");
  const int kd = dealiased_wavenumber(f.n);
  GridField a = truncate_band(f, kd);
  const GridField b = truncate_band(g, kd);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] *= b.values[i];
  return truncate_band(a, kd);
}

GridField operator-(const GridField& a, const GridField& b) {
  if (a.n != b.n) throw InvalidArgument("GridField subtraction: size mismatch");
  GridField out(a.n);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

void write_csv(std::ostream& out, const GridField& f) {
  out << "x,y,value\n";
  const double h = f.spacing();
  for (int j = 0; j < f.n; ++j)
    for (int i = 0; i < f.n; ++i) {
      format_double(out, i * h);
      out << ',';
      format_double(out, j * h);
      out << ',';
      format_double(out, f(i, j));
      out << '\n';
    }
}

void write_csv(std::ostream& out, const VectorGridField& f) {
  out << "x,y,u,v\n";
  const double h = f.x.spacing();
  for (int j = 0; j < f.n(); ++j)
    for (int i = 0; i < f.n(); ++i) {
      format_double(out, i * h);
      out << ',';
      format_double(out, j * h);
      out << ',';
      format_double(out, f.x(i, j));
      out << ',';
      format_double(out, f.y(i, j));
      out << '\n';
    }
}

void write_binary(std::ostream& out, const GridField& f) { write_le_doubles(out, f.values); }

void write_binary(std::ostream& out, const VectorGridField& f) {
  write_le_doubles(out, f.x.values);
  write_le_doubles(out, f.y.values);
}

GridField read_binary(std::istream& in, int n) {
  GridField f(n);
  for (double& v : f.values) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw InvalidArgument("read_binary: truncated input");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(&v, &bits, 8);
  }
  return f;
}

}  // namespace sgns
