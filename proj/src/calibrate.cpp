#include <cmath>

#include "busemann/evaluators.hpp"
#include "sampling.hpp"

namespace busemann {

namespace {

constexpr double kBallRadius = 0.05;
constexpr double kRadii[] = {2.0, 5.0, 10.0};
constexpr std::uint64_t kMinSamplesPerRadius = 2000;

/// Ratio estimate of C(n) at |x| = radius. Conditional on the atom a, the
/// hit-weighted normal has mean C(n) (u_x - u_o), so the ratio of the sample
/// means of <hit * normal, e> and <u_x - u_o, e> is consistent for C(n).
KmwRadiusFit fit_radius(std::size_t n, double radius, std::uint64_t samples, Rng rng) {
  std::vector<double> x(n, 0.0), a(n);
  x[0] = radius;
  double sy = 0.0, sg = 0.0, syy = 0.0, sgg = 0.0, syg = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Vec u = detail::uniform_direction(rng, n);
    const double r = kBallRadius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) a[k] = r * u[k];
    const Vec v = detail::uniform_direction(rng, n);
    double go = 0.0, gx = 0.0, lx2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      go += (0.0 - a[k]) * v[k];
      gx += (x[k] - a[k]) * v[k];
      lx2 += (x[k] - a[k]) * (x[k] - a[k]);
    }
    double y = 0.0;
    if (go * gx < 0.0) y = (go < 0.0 ? 1.0 : -1.0) * v[0];
    const double g = (x[0] - a[0]) / std::sqrt(lx2) - (0.0 - a[0]) / r;
    sy += y;
    sg += g;
    syy += y * y;
    sgg += g * g;
    syg += y * g;
  }
  const double N = static_cast<double>(samples);
  const double my = sy / N, mg = sg / N;
  const double c = my / mg;
  // delta method: Var(Y - c G) / (N mg^2)
  const double vy = syy / N - my * my, vg = sgg / N - mg * mg, cov = syg / N - my * mg;
  const double var = std::max(0.0, vy - 2.0 * c * cov + c * c * vg) * N / (N - 1.0);
  return {radius, c, std::sqrt(var / N) / std::abs(mg)};
}

}  // namespace

KmwConstant calibrate_kmw_constant(std::size_t n, std::uint64_t budget, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("dimension must be at least 2");
  if (budget < 3 * 2) throw InvalidArgument("calibration budget too small");
  KmwConstant k;
  k.dim = n;
  k.provenance = KmwConstant::Provenance::Oracle;
  k.budget = budget;
  k.seed = seed;
  const std::uint64_t per = budget / 3;
  const Rng root(seed);
  double wsum = 0.0, vsum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    k.fits.push_back(fit_radius(n, kRadii[i], per, root.split(i)));
    const auto& f = k.fits.back();
    const double w = f.std_error > 0.0 ? 1.0 / (f.std_error * f.std_error) : 1.0;
    wsum += w;
    vsum += w * f.value;
  }
  k.value = vsum / wsum;
  k.std_error = 1.0 / std::sqrt(wsum);
  k.half_width = 1.96 * k.std_error;
  k.independence_checked = per >= kMinSamplesPerRadius;
  k.consistent = true;
  if (k.independence_checked) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        const auto &a = k.fits[i], &b = k.fits[j];
        if (std::abs(a.value - b.value) > 4.0 * std::hypot(a.std_error, b.std_error)) k.consistent = false;
      }
    }
  }
  k.low_sample_warning = !k.independence_checked || k.half_width > 0.02 * std::abs(k.value);
  return k;
}

}  // namespace busemann
