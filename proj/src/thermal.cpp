#include "kerrkit/thermal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "kerrkit/errors.hpp"

namespace kerrkit {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kDecayTol = 1e-8;
constexpr double kAliasTol = 1e-6;

Eigen::VectorXcd fft(const Eigen::VectorXcd& v) {
  Eigen::FFT<double> f;
  Eigen::VectorXcd out;
  f.fwd(out, v);
  return out;
}

Eigen::VectorXcd ifft(const Eigen::VectorXcd& v) {
  Eigen::FFT<double> f;
  Eigen::VectorXcd out;
  f.inv(out, v);
  return out;
}

// Signed frequency index of FFT bin k.
int freq_index(int k, int n) { return k < n / 2 ? k : k - n; }

bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

void check_sign(int sign) {
  if (sign != 1 && sign != -1) throw InvalidParams("sign must be +1 or -1");
}

void check_decay(const Eigen::VectorXcd& g, const char* what) {
  const double top = g.cwiseAbs().maxCoeff();
  const double ends = std::max(std::abs(g[0]), std::abs(g[g.size() - 1]));
  if (!(ends <= kDecayTol * top)) {
    std::ostringstream os;
    os << what << " does not decay at the grid ends (" << ends / top << " of its maximum)";
    throw DecayError(os.str());
  }
}

// Periodic trigonometric interpolant of the samples whose DFT is G, on the
// grid t_j = t0 + j dt, evaluated at t.
cd trig_eval(const Eigen::VectorXcd& G, double t0, double dt, double t) {
  const int n = int(G.size());
  const double th = 2 * kPi * (t - t0) / (n * dt);
  const cd w = std::polar(1.0, th);
  cd p = 1, s = G[0];
  for (int k = 1; k < n / 2; ++k) {
    p = (k % 64 == 0) ? std::polar(1.0, th * k) : p * w;
    s += G[k] * p + G[n - k] * std::conj(p);
  }
  s += G[n / 2] * std::cos(th * (n / 2));
  return s / double(n);
}

// (pi/P) cot(pi z/P) - 1/z as a power series in z/P, valid for |z| < P/2.
class WrapKernel {
 public:
  WrapKernel(double P, double zmax) : P_(P) {
    const double r = zmax / P;
    for (int k = 1; k < 40; ++k) {
      const double c = -2 * std::riemann_zeta(2.0 * k);
      c_.push_back(c);
      if (std::abs(c) * std::pow(r, 2 * k - 1) < 1e-18) break;
    }
  }
  double operator()(double z) const {
    const double t = z / P_, w = t * t;
    double s = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * w + *it;
    return s * t / P_;
  }

 private:
  double P_;
  std::vector<double> c_;
};

double window_norm(const Eigen::VectorXcd& d, double h) { return std::sqrt(d.squaredNorm() * h); }

}  // namespace

void validate(const Grid1D& g) {
  if (const auto* l = std::get_if<LineGrid>(&g)) {
    if (!power_of_two(l->N)) throw InvalidParams("grid size must be a power of two");
    if (!(l->X > 0) || !std::isfinite(l->X)) throw InvalidParams("line grid needs X > 0");
    return;
  }
  const auto& hl = std::get<HalfLineGrid>(g);
  if (!power_of_two(hl.N)) throw InvalidParams("grid size must be a power of two");
  if (!(hl.x_min > 0) || !(hl.x_max > hl.x_min) || !std::isfinite(hl.x_max))
    throw InvalidParams("half-line grid needs 0 < x_min < x_max");
}

Eigen::VectorXd SampledFunction::points() const {
  return std::visit(
      [](const auto& g) {
        Eigen::VectorXd x(g.N);
        for (int j = 0; j < g.N; ++j) x[j] = g.point(j);
        return x;
      },
      grid);
}

double SampledFunction::norm() const {
  if (const auto* l = std::get_if<LineGrid>(&grid)) return std::sqrt(values.squaredNorm() * l->spacing());
  const auto& hl = std::get<HalfLineGrid>(grid);
  const Eigen::VectorXd x = points();
  return std::sqrt((values.cwiseAbs2().cwiseProduct(x)).sum() * hl.log_spacing());
}

SampledFunction sample(const Grid1D& g, const std::function<cd(double)>& f) {
  validate(g);
  SampledFunction s{g, {}};
  const Eigen::VectorXd x = s.points();
  s.values.resize(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) s.values[j] = f(x[j]);
  return s;
}

TestFunction log_gaussian(double center, double width) {
  std::ostringstream os;
  os << "log-gaussian(" << center << "," << width << ")";
  return {os.str(), [=](double x) {
            if (!(x > 0)) return 0.0;
            const double s = (std::log(x) - center) / width;
            return std::exp(-s * s);
          }};
}

TestFunction gaussian(double center, double width) {
  std::ostringstream os;
  os << "gaussian(" << center << "," << width << ")";
  return {os.str(), [=](double x) {
            const double s = (x - center) / width;
            return std::exp(-s * s);
          }};
}

TestFunction bump(double center, double half_width) {
  std::ostringstream os;
  os << "bump(" << center << "," << half_width << ")";
  return {os.str(), [=](double x) {
            const double s = (x - center) / half_width;
            return std::abs(s) < 1 ? std::exp(-1 / (1 - s * s)) : 0.0;
          }};
}

TestFunction make_test_function(const std::string& name, double p1, double p2) {
  if (!(p2 > 0)) throw SchemaError("test function width must be positive");
  if (name == "log-gaussian") return log_gaussian(p1, p2);
  if (name == "gaussian") return gaussian(p1, p2);
  if (name == "bump") return bump(p1, p2);
  throw SchemaError("unknown test function '" + name + "'");
}

ThermalParams ThermalParams::from_kappa(double kappa) {
  if (!(kappa > 0) || !std::isfinite(kappa)) throw InvalidParams("kappa must be positive");
  return {kappa, 2 * kPi / kappa};
}

ThermalParams ThermalParams::from_horizon(const HorizonConstants& h) {
  if (!(h.T_H > 0)) throw InvalidParams("Hawking temperature must be positive");
  return {h.kappa_plus, 1 / h.T_H};
}

double fermi_factor(double beta, int sign, double lambda) {
  check_sign(sign);
  if (!(beta > 0)) throw InvalidParams("beta must be positive");
  const double t = sign * beta * lambda;
  // e^{-|t|} never overflows; the two branches are the same function
  if (t >= 0) return 1 / (1 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1 + e);
}

SampledFunction mellin(const SampledFunction& f, double resolution_tol) {
  const auto* hl = std::get_if<HalfLineGrid>(&f.grid);
  if (!hl) throw InvalidParams("mellin needs a half-line sample");
  validate(f.grid);
  const int n = hl->N;
  const double u0 = hl->log_min(), du = hl->log_spacing();
  Eigen::VectorXcd g(n);
  for (int j = 0; j < n; ++j) g[j] = std::exp(0.5 * (u0 + j * du)) * f.values[j];
  check_decay(g, "e^{u/2} f(e^u)");
  const Eigen::VectorXcd G = fft(g);
  const double top = G.cwiseAbs().maxCoeff();
  double edge = 0;
  for (int k = 0; k < n; ++k)
    if (std::abs(freq_index(k, n)) >= 3 * n / 8) edge = std::max(edge, std::abs(G[k]));
  if (edge > resolution_tol * top) {
    std::ostringstream os;
    os << "log grid too coarse: spectrum at the band edge is " << edge / top << " of its maximum";
    throw ResolutionError(os.str());
  }
  const LineGrid line{kPi / du, n};
  SampledFunction out{line, Eigen::VectorXcd(n)};
  const double c = du / std::sqrt(2 * kPi);
  for (int m = 0; m < n; ++m) {
    const int k = (m - n / 2 + n) % n;
    const double s = line.point(m);
    out.values[m] = c * std::polar(1.0, -s * u0) * G[k];
  }
  return out;
}

SampledFunction inverse_mellin(const SampledFunction& g, const HalfLineGrid& target) {
  const auto* line = std::get_if<LineGrid>(&g.grid);
  if (!line) throw InvalidParams("inverse_mellin needs a line sample");
  validate(target);
  const int n = line->N;
  const double u0 = target.log_min(), du = target.log_spacing();
  if (target.N != n || std::abs(kPi / du - line->X) > 1e-12 * line->X)
    throw InvalidParams("inverse_mellin target is not the grid dual to the sample");
  Eigen::VectorXcd G(n);
  const double c = std::sqrt(2 * kPi) / du;
  for (int m = 0; m < n; ++m) {
    const int k = (m - n / 2 + n) % n;
    G[k] = c * std::polar(1.0, line->point(m) * u0) * g.values[m];
  }
  const Eigen::VectorXcd v = ifft(G);
  SampledFunction out{target, Eigen::VectorXcd(n)};
  for (int j = 0; j < n; ++j) out.values[j] = std::exp(-0.5 * (u0 + j * du)) * v[j];
  return out;
}

SampledFunction projector_mellin(const SampledFunction& f, int sign, double resolution_tol) {
  check_sign(sign);
  SampledFunction m = mellin(f, resolution_tol);
  const auto& line = std::get<LineGrid>(m.grid);
  for (int j = 0; j < line.N; ++j) m.values[j] *= fermi_factor(2 * kPi, sign, line.point(j));
  return inverse_mellin(m, std::get<HalfLineGrid>(f.grid));
}

SampledFunction projector_fourier(const SampledFunction& f, int sign, int pad) {
  check_sign(sign);
  const auto* line = std::get_if<LineGrid>(&f.grid);
  if (!line) throw InvalidParams("the Fourier route needs a line sample");
  validate(f.grid);
  if (pad < 2) throw InvalidParams("padding factor must be at least 2");
  const int n = line->N, nb = pad * n, off = (pad - 1) * n / 2;
  const double h = line->spacing(), P = nb * h;
  const int first = n / 2 + 1;  // first grid point with x > 0

  Eigen::VectorXcd buf = Eigen::VectorXcd::Zero(nb);
  for (int j = first; j < n; ++j) buf[off + j] = f.values[j];
  Eigen::VectorXcd B = fft(buf);
  for (int k = 0; k < nb; ++k) {
    const int q = freq_index(k, nb);
    B[k] *= (q == 0 || q == -nb / 2) ? 0.5 : (sign * q > 0 ? 1.0 : 0.0);
  }
  buf = ifft(B);

  // The FFT sums the free result over the images x + mP. Outside the support
  // the free result is (i sign/2 pi) int f(y)/(x + mP - y) dy, and the image
  // sum of 1/(z + mP) over m != 0 is the smooth WrapKernel.
  const WrapKernel wrap(P, line->X);
  std::vector<int> support;
  for (int j = first; j < n; ++j)
    if (f.values[j] != cd(0)) support.push_back(j);
  const cd pre(0, sign * h / (2 * kPi));
  SampledFunction out{*line, Eigen::VectorXcd::Zero(n)};
  for (int i = first; i < n; ++i) {
    const double x = line->point(i);
    cd s = 0;
    for (int j : support) s += f.values[j] * wrap(x - line->point(j));
    out.values[i] = buf[off + i] - pre * s;
  }
  return out;
}

SampledFunction halfline_projector(const SampledFunction& f, int sign) { return projector_mellin(f, sign); }

cd analytic_kernel(double x, double y, double delta, int sign) {
  return cd(0, sign / (2 * kPi)) / cd(x - y, sign * delta);
}

SampledFunction line_projector(const SampledFunction& f, int sign) {
  check_sign(sign);
  const auto* line = std::get_if<LineGrid>(&f.grid);
  if (!line) throw InvalidParams("line_projector needs a line sample");
  validate(f.grid);
  const int n = line->N;
  Eigen::VectorXcd F = fft(f.values);
  for (int k = 0; k < n; ++k) {
    const bool plus = freq_index(k, n) >= 0;
    if (plus != (sign > 0)) F[k] = 0;
  }
  return {*line, ifft(F)};
}

Eigen::VectorXcd fourier_kernel(const LineGrid& g, int j, double delta, int sign, int pad) {
  validate(g);
  if (j <= g.N / 2 || j >= g.N) throw InvalidParams("kernel probe must sit on the positive half of the grid");
  const double y = g.point(j);
  const SampledFunction p = sample(g, [&](double x) { return cd(delta / kPi / ((x - y) * (x - y) + delta * delta)); });
  return projector_fourier(p, sign, pad).values;
}

ProjectorComparison compare_projectors(const TestFunction& f, const ProjectorGrids& g, int sign) {
  const LineGrid line{g.X, g.N};
  const HalfLineGrid half = HalfLineGrid::symmetric(g.L, g.N);
  const SampledFunction fl = sample(line, [&](double x) { return cd(x > 0 ? f(x) : 0.0); });
  const SampledFunction fh = sample(half, [&](double x) { return cd(f(x)); });
  const double norm = fh.norm();

  const SampledFunction pf = projector_fourier(fl, sign, g.pad);
  const SampledFunction pf2 = projector_fourier(fl, sign, 2 * g.pad);
  const SampledFunction pm = projector_mellin(fh, sign, g.resolution_tol);

  // e^{u/2} P f is the smooth periodic function in u = ln x
  const double u0 = half.log_min(), du = half.log_spacing();
  Eigen::VectorXcd gm(g.N);
  for (int j = 0; j < g.N; ++j) gm[j] = std::exp(0.5 * (u0 + j * du)) * pm.values[j];
  const Eigen::VectorXcd Gm = fft(gm);

  const int first = g.N / 2 + 1, nw = g.N - first;
  ProjectorComparison c;
  c.function = f.name;
  c.N = g.N;
  c.sign = sign;
  c.x.resize(nw);
  c.fourier.resize(nw);
  c.mellin.resize(nw);
  for (int i = 0; i < nw; ++i) {
    const double x = line.point(first + i), u = std::log(x);
    c.x[i] = x;
    c.fourier[i] = pf.values[first + i];
    c.mellin[i] = std::exp(-0.5 * u) * trig_eval(Gm, u0, du, u);
  }
  const double h = line.spacing();
  c.residual = window_norm(c.fourier - c.mellin, h) / norm;
  c.aliasing = window_norm(pf.values - pf2.values, h) / norm;
  if (c.aliasing > kAliasTol) {
    std::ostringstream os;
    os << "Fourier route changes by " << c.aliasing << " when the padding doubles";
    throw ResolutionError(os.str());
  }
  return c;
}

double unruh_identity_residual(double kappa, const SampledFunction& f, const UnruhOptions& o) {
  const ThermalParams tp = ThermalParams::from_kappa(kappa);
  const double beta = o.beta > 0 ? o.beta : tp.beta;
  check_sign(o.sign);
  check_sign(o.fermi_sign);
  const auto* ul = std::get_if<LineGrid>(&f.grid);
  if (!ul) throw InvalidParams("the Unruh check needs f sampled on a line");
  validate(f.grid);
  validate(o.U);
  check_decay(f.values, "f");

  const int nu = ul->N;
  const double u0 = -ul->X, du = ul->spacing();
  const Eigen::VectorXcd Fu = fft(f.values);
  Eigen::VectorXcd Gu = Fu;
  for (int k = 0; k < nu; ++k) {
    const double s = 2 * kPi * freq_index(k, nu) / (nu * du);
    Gu[k] *= fermi_factor(beta, o.fermi_sign, s);
  }

  const LineGrid& U = o.U;
  const int first = U.N / 2 + 1;
  SampledFunction FU{U, Eigen::VectorXcd::Zero(U.N)};
  Eigen::VectorXcd pulled = Eigen::VectorXcd::Zero(U.N);
  for (int i = first; i < U.N; ++i) {
    const double x = U.point(i), u = -std::log(x) / kappa;
    if (u < -ul->X || u >= ul->X) continue;  // f is negligible off its grid
    const double jac = 1 / std::sqrt(kappa * x);
    FU.values[i] = jac * trig_eval(Fu, u0, du, u);
    pulled[i] = jac * trig_eval(Gu, u0, du, u);
  }
  const SampledFunction PU = projector_fourier(FU, o.sign, o.pad);
  return window_norm(PU.values - pulled, U.spacing()) / f.norm();
}

}  // namespace kerrkit
