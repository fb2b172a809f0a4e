#include "xtalk/segment_integrals.hpp"

#include <cmath>

namespace xtalk::segment {

namespace {
constexpr cplx I{0.0, 1.0};
}

cplx phi1_imag(double x) {
  if (std::abs(x) < 1e-8) return {1.0, 0.5 * x};
  const double s = std::sin(0.5 * x);
  // e^{ix} - 1 = -2 sin^2(x/2) + i sin(x)
  return cplx{-2.0 * s * s, std::sin(x)} / cplx{0.0, x};
}

cplx exp_integral(double k, double a, double b) {
  const double h = b - a;
  return std::exp(I * (k * a)) * h * phi1_imag(k * h);
}

cplx drive_integral(double nu, double w, double a, double b) {
  // sin(w t) = (e^{iwt} - e^{-iwt}) / 2i
  return (exp_integral(nu + w, a, b) - exp_integral(nu - w, a, b)) / (2.0 * I);
}

cplx triangle_integral(double p, double q, double h) {
  const double ph = p * h;
  const double qh = q * h;
  if (std::abs(qh) > 0.5) {
    // Inner integral first: int_0^x e^{iqy} dy = (e^{iqx} - 1) / (iq).
    return (exp_integral(p + q, 0.0, h) - exp_integral(p, 0.0, h)) / (I * q);
  }
  if (std::abs(ph) > 0.5) {
    // Swap the order: int_y^h e^{ipx} dx = (e^{iph} - e^{ipy}) / (ip).
    return (std::exp(I * ph) * exp_integral(q, 0.0, h) - exp_integral(p + q, 0.0, h)) / (I * p);
  }
  // Both phases small: double Taylor series,
  //   sum_{j,k} (iph)^j (iqh)^k / (j! k! (k+1)(j+k+2)) * h^2.
  cplx sum{0.0, 0.0};
  cplx pj{1.0, 0.0};
  double jfact = 1.0;
  for (int j = 0; j <= 24; ++j) {
    cplx qk{1.0, 0.0};
    double kfact = 1.0;
    for (int k = 0; j + k <= 24; ++k) {
      sum += pj * qk / (jfact * kfact * (k + 1.0) * (j + k + 2.0));
      qk *= I * qh;
      kfact *= (k + 1.0);
    }
    pj *= I * ph;
    jfact *= (j + 1.0);
  }
  return sum * h * h;
}

double exact_triangle(double nu, double w, double a, double b) {
  // sin(nu(t1-t2)) = Im[e^{i nu t1} e^{-i nu t2}] and both sines are real, so
  // the block is Im of the triangle integral of
  //   e^{i nu t1} sin(w t1) e^{-i nu t2} sin(w t2)
  // expanded into four exponentials.
  const double h = b - a;
  cplx total{0.0, 0.0};
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      const double p = nu + s1 * w;
      const double q = -nu + s2 * w;
      total += static_cast<double>(s1 * s2) * std::exp(I * ((p + q) * a)) *
               triangle_integral(p, q, h);
    }
  }
  // (1 / 2i)^2 = -1/4
  return (-0.25 * total).imag();
}

double rwa_triangle(double delta, double h) {
  return triangle_integral(delta, -delta, h).imag();
}

}  // namespace xtalk::segment
