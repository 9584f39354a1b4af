#include "dcqe/analysis.hpp"

#include "dcqe/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dcqe {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct LinearSolution {
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();  // offset, cos amplitude, sin amplitude
  double rss = 0.0;
};

LinearSolution solve_linear(const Vec& u, const Vec& y, double k) {
  Mat x(u.size(), 3);
  x.col(0).setOnes();
  x.col(1) = (k * u.array()).cos().matrix();
  x.col(2) = (k * u.array()).sin().matrix();
  LinearSolution s;
  s.beta = x.colPivHouseholderQr().solve(y);
  s.rss = (y - x * s.beta).squaredNorm();
  return s;
}

double wrap_phase(double p) {
  p = std::remainder(p, 2.0 * kPi);
  if (p <= -kPi) p += 2.0 * kPi;
  return p;
}

}  // namespace

double FringeFit::value_at(double position) const {
  return offset + amplitude * std::cos(2.0 * kPi * position / period + phase);
}

FringeFit fit_fringe(std::span<const FringePoint> points, const FitOptions& options) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 8) throw FitError("fit_fringe needs at least 8 points", 0, 0.0);

  std::vector<double> xs;
  xs.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.position) || !std::isfinite(p.count)) {
      throw FitError("fit_fringe: non-finite input", 0, 0.0);
    }
    xs.push_back(p.position);
  }
  std::sort(xs.begin(), xs.end());
  const double span = xs.back() - xs.front();
  if (!(span > 0.0)) throw FitError("fit_fringe: positions do not span an interval", 0, 0.0);

  const double center = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  Vec u(n);
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u(i) = points[static_cast<std::size_t>(i)].position - center;
    y(i) = points[static_cast<std::size_t>(i)].count;
  }

  double k = 0.0;
  LinearSolution best;
  if (options.period) {
    if (!(*options.period > 0.0)) throw FitError("fit_fringe: fixed period must be > 0", 0, 0.0);
    if (*options.period > span * (1.0 + 1e-9)) {
      throw FitError("fit_fringe: data span less than one period", 0, 0.0);
    }
    k = 2.0 * kPi / *options.period;
    best = solve_linear(u, y, k);
  } else {
    double min_dx = span;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double dx = xs[i] - xs[i - 1];
      if (dx > 1e-12 * span) min_dx = std::min(min_dx, dx);
    }
    const double k_lo = 2.0 * kPi / span;
    const double k_hi = std::max(kPi / min_dx, k_lo);
    const double dk = 2.0 * kPi / (8.0 * span);
    const auto steps = std::min<long>(20000, static_cast<long>((k_hi - k_lo) / dk) + 1);
    best.rss = std::numeric_limits<double>::infinity();
    for (long s = 0; s <= steps; ++s) {
      const double kk = steps == 0 ? k_lo : k_lo + (k_hi - k_lo) * static_cast<double>(s) / steps;
      const LinearSolution trial = solve_linear(u, y, kk);
      if (trial.rss < best.rss) {
        best = trial;
        k = kk;
      }
    }
  }

  // Parameters: offset, a (cos), b (sin), k.
  Eigen::Vector4d theta(best.beta(0), best.beta(1), best.beta(2), k);
  double rss = best.rss;
  const bool free_period = !options.period.has_value();
  const double amp0 = std::hypot(theta(1), theta(2));
  const bool flat = amp0 <= 1e-12 * std::max(std::abs(theta(0)), 1.0);

  const auto residuals = [&](const Eigen::Vector4d& t) {
    return Vec(y.array() - (t(0) + t(1) * (t(3) * u.array()).cos() +
                            t(2) * (t(3) * u.array()).sin()));
  };
  const auto jacobian = [&](const Eigen::Vector4d& t, int cols) {
    Mat j(n, cols);
    const Eigen::ArrayXd c = (t(3) * u.array()).cos();
    const Eigen::ArrayXd s = (t(3) * u.array()).sin();
    j.col(0).setOnes();
    j.col(1) = c.matrix();
    j.col(2) = s.matrix();
    if (cols == 4) j.col(3) = (u.array() * (-t(1) * s + t(2) * c)).matrix();
    return j;
  };

  std::size_t iterations = 0;
  if (free_period && !flat) {
    bool converged = false;
    double last_step = 0.0;
    for (; iterations < options.max_iterations; ++iterations) {
      const Mat j = jacobian(theta, 4);
      const Vec r = residuals(theta);
      const Eigen::Vector4d step = j.colPivHouseholderQr().solve(r);
      double lambda = 1.0;
      Eigen::Vector4d trial = theta + step;
      double trial_rss = residuals(trial).squaredNorm();
      while (trial_rss > rss && lambda > 1e-9) {
        lambda *= 0.5;
        trial = theta + lambda * step;
        trial_rss = residuals(trial).squaredNorm();
      }
      const Eigen::Vector4d applied = trial - theta;
      const double amp = std::hypot(theta(1), theta(2));
      const Eigen::Vector4d ref(std::abs(theta(0)) + amp, amp + std::abs(theta(0)),
                                amp + std::abs(theta(0)), std::abs(theta(3)));
      last_step = (applied.cwiseAbs().array() / ref.array().max(1e-300)).maxCoeff();
      if (trial_rss <= rss) {
        theta = trial;
        rss = trial_rss;
      }
      if (last_step <= options.tolerance || (lambda <= 1e-9 && trial_rss >= rss)) {
        converged = true;
        ++iterations;
        break;
      }
    }
    if (!converged) {
      throw FitError("fit_fringe: Gauss-Newton did not converge", iterations, last_step);
    }
    if (!(theta(3) > 0.0)) theta(3) = std::abs(theta(3));
    if (2.0 * kPi / theta(3) > span * (1.0 + 1e-6)) {
      throw FitError("fit_fringe: fitted period exceeds the data span", iterations, last_step);
    }
  }

  FringeFit fit;
  fit.iterations = iterations;
  fit.offset = theta(0);
  fit.amplitude = std::hypot(theta(1), theta(2));
  fit.period = 2.0 * kPi / theta(3);
  const double phase_c = std::atan2(-theta(2), theta(1));
  fit.phase = wrap_phase(phase_c - theta(3) * center);
  fit.residual_rms = std::sqrt(rss / static_cast<double>(n));
  fit.visibility = fit.offset > 0.0 ? std::clamp(fit.amplitude / fit.offset, 0.0, 1.0) : 0.0;

  // Covariance s^2 (J^T J)^{-1} at the solution, then delta-method for the
  // derived quantities.
  const int p = (free_period && !flat) ? 4 : 3;
  if (n > p) {
    const Mat j = jacobian(theta, p);
    const double s2 = rss / static_cast<double>(n - p);
    const Mat jtj = j.transpose() * j;
    Eigen::FullPivLU<Mat> lu(jtj);
    if (lu.isInvertible()) {
      const Mat cov = s2 * lu.inverse();
      const double a = theta(1);
      const double b = theta(2);
      const double amp = fit.amplitude;
      fit.offset_sigma = std::sqrt(std::max(cov(0, 0), 0.0));
      if (amp > 0.0) {
        Vec ga = Vec::Zero(p);
        ga(1) = a / amp;
        ga(2) = b / amp;
        fit.amplitude_sigma = std::sqrt(std::max((ga.transpose() * cov * ga)(0), 0.0));
        Vec gp = Vec::Zero(p);
        gp(1) = b / (amp * amp);
        gp(2) = -a / (amp * amp);
        if (p == 4) gp(3) = -center;
        fit.phase_sigma = std::sqrt(std::max((gp.transpose() * cov * gp)(0), 0.0));
        if (fit.offset > 0.0) {
          Vec gv = Vec::Zero(p);
          gv(0) = -amp / (fit.offset * fit.offset);
          gv(1) = a / (amp * fit.offset);
          gv(2) = b / (amp * fit.offset);
          fit.visibility_sigma = std::sqrt(std::max((gv.transpose() * cov * gv)(0), 0.0));
        }
      }
      if (p == 4) {
        fit.period_sigma = 2.0 * kPi / (theta(3) * theta(3)) * std::sqrt(std::max(cov(3, 3), 0.0));
      }
    }
  }
  return fit;
}

double distinguishability(const CountTable& which_way) {
  const double sum = static_cast<double>(which_way.n_AB) + static_cast<double>(which_way.n_ApB);
  if (sum <= 0.0) throw InsufficientStatistics("distinguishability: n_AB + n_A'B is zero");
  return std::abs(static_cast<double>(which_way.n_AB) - static_cast<double>(which_way.n_ApB)) / sum;
}

double poisson_consistency(std::span<const FringePoint> points, bool detrend,
                           const FitOptions& options) {
  if (points.size() < 10) throw DomainError("poisson_consistency needs at least 10 points");
  const double n = static_cast<double>(points.size());
  double mean = 0.0;
  for (const auto& p : points) mean += p.count;
  mean /= n;
  if (!(mean > 0.0)) throw InsufficientStatistics("poisson_consistency: mean count is zero");

  double spread = 0.0;
  if (detrend) {
    const FringeFit fit = fit_fringe(points, options);
    double rss = 0.0;
    for (const auto& p : points) {
      const double r = p.count - fit.value_at(p.position);
      rss += r * r;
    }
    const double params = options.period ? 3.0 : 4.0;
    spread = std::sqrt(rss / (n - params));
  } else {
    double ss = 0.0;
    for (const auto& p : points) ss += (p.count - mean) * (p.count - mean);
    spread = std::sqrt(ss / (n - 1.0));
  }
  return spread / std::sqrt(mean);
}

std::uint64_t series_value(const CountTable& t, Series s) {
  switch (s) {
    case Series::n_AB: return t.n_AB;
    case Series::n_ApB: return t.n_ApB;
    case Series::n_ABp: return t.n_ABp;
    case Series::n_ApBp: return t.n_ApBp;
  }
  return 0;
}

std::vector<FringePoint> series(std::span<const ScanRow> rows, Series s) {
  std::vector<FringePoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({r.actuator_um, static_cast<double>(series_value(r.counts, s))});
  }
  return out;
}

ScanComparison compare_scans(std::span<const ScanRow> a, std::span<const ScanRow> b) {
  if (a.size() != b.size()) throw DomainError("compare_scans: scans have different lengths");
  ScanComparison out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].actuator_um - b[i].actuator_um) > 1e-9) {
      throw DomainError("compare_scans: actuator grids differ at row " + std::to_string(i));
    }
    for (Series s : {Series::n_AB, Series::n_ApB, Series::n_ABp, Series::n_ApBp}) {
      const double x = static_cast<double>(series_value(a[i].counts, s));
      const double y = static_cast<double>(series_value(b[i].counts, s));
      if (x + y <= 0.0) continue;
      out.chi2 += (x - y) * (x - y) / (x + y);
      ++out.dof;
    }
  }
  out.p_value = out.dof > 0 ? boost::math::gamma_q(0.5 * out.dof, 0.5 * out.chi2) : 1.0;
  return out;
}

double phase_separation(double a, double b) {
  return std::abs(wrap_phase(a - b));
}

}  // namespace dcqe
