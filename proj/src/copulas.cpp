#include "copula_lab/copulas.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <span>
#include <string>
#include <tuple>

namespace copula_lab {

namespace {

void check_unit_closed(double u, double v)
{
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw std::invalid_argument("copula argument outside [0,1]^2");
}

// Gauss-Legendre half-rules (negative nodes) with 6, 12 and 20 points.
constexpr std::array<double, 3> gl6_w{ 0.1713244923791705, 0.3607615730481384, 0.4679139345726904 };
constexpr std::array<double, 3> gl6_x{ -0.9324695142031522, -0.6612093864662647, -0.2386191860831970 };
constexpr std::array<double, 6> gl12_w{ 0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                        0.2031674267230659,  0.2334925365383547, 0.2491470458134029 };
constexpr std::array<double, 6> gl12_x{ -0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                                        -0.5873179542866171, -0.3678314989981802, -0.1252334085114692 };
constexpr std::array<double, 10> gl20_w{ 0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                         0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                         0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                                         0.1527533871307259 };
constexpr std::array<double, 10> gl20_x{ -0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                                         -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                                         -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                                         -0.07652652113349733 };

// Upper orthant P(X > dh, Y > dk), Genz (2004) BVND.
double bvn_upper(double dh, double dk, double r)
{
  std::span<const double> w, x;
  if (std::abs(r) < 0.3) {
    w = gl6_w;
    x = gl6_x;
  } else if (std::abs(r) < 0.75) {
    w = gl12_w;
    x = gl12_x;
  } else {
    w = gl20_w;
    x = gl20_x;
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (double sign : { -1.0, 1.0 }) {
        const double sn = std::sin(asr * (sign * x[i] + 1.0) / 2.0);
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * two_pi) + normal_cdf(-h) * normal_cdf(-k);
    return bvn;
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0)
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (-hk < 100.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (double sign : { -1.0, 1.0 }) {
        double xs = a * (sign * x[i] + 1.0);
        xs *= xs;
        const double rs = std::sqrt(1.0 - xs);
        asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0)
          bvn += a * w[i] * std::exp(asr) *
                 (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                  (1.0 + c * xs * (1.0 + d * xs)));
      }
    }
    bvn = -bvn / two_pi;
  }
  if (r > 0.0)
    return bvn + normal_cdf(-std::max(h, k));
  return -bvn + std::max(0.0, normal_cdf(-h) - normal_cdf(-k));
}

} // namespace

double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal quantile level outside (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bivariate_normal_cdf(double a, double b, double rho)
{
  return bvn_upper(-a, -b, rho);
}

CopulaModel::CopulaModel(CopulaFamily family, double parameter)
  : family_(family)
  , parameter_(parameter)
{
}

CopulaModel CopulaModel::independence()
{
  return CopulaModel(CopulaFamily::Independence, 0.0);
}

CopulaModel CopulaModel::clayton(double theta)
{
  if (!(theta > 0.0 && std::isfinite(theta)))
    throw std::invalid_argument("clayton theta must be > 0");
  return CopulaModel(CopulaFamily::Clayton, theta);
}

CopulaModel CopulaModel::fgm(double theta)
{
  if (!(theta >= -1.0 && theta <= 1.0))
    throw std::invalid_argument("fgm theta must lie in [-1,1]");
  return CopulaModel(CopulaFamily::FGM, theta);
}

CopulaModel CopulaModel::gaussian(double rho)
{
  if (!(rho > -1.0 && rho < 1.0))
    throw std::invalid_argument("gaussian rho must lie in (-1,1)");
  return CopulaModel(CopulaFamily::Gaussian, rho);
}

CopulaModel CopulaModel::from_name(std::string_view name, double parameter)
{
  if (name == "independence")
    return independence();
  if (name == "clayton")
    return clayton(parameter);
  if (name == "fgm")
    return fgm(parameter);
  if (name == "gaussian")
    return gaussian(parameter);
  throw std::invalid_argument("unknown copula '" + std::string(name) + "'");
}

std::string_view CopulaModel::name() const
{
  switch (family_) {
    case CopulaFamily::Independence:
      return "independence";
    case CopulaFamily::Clayton:
      return "clayton";
    case CopulaFamily::FGM:
      return "fgm";
    case CopulaFamily::Gaussian:
      return "gaussian";
  }
  throw std::logic_error("unknown copula family");
}

double CopulaModel::cdf(double u, double v) const
{
  check_unit_closed(u, v);
  if (u == 0.0 || v == 0.0)
    return 0.0;
  if (u == 1.0)
    return v;
  if (v == 1.0)
    return u;
  const double t = parameter_;
  switch (family_) {
    case CopulaFamily::Independence:
      return u * v;
    case CopulaFamily::Clayton:
      return std::pow(std::pow(u, -t) + std::pow(v, -t) - 1.0, -1.0 / t);
    case CopulaFamily::FGM:
      return u * v * (1.0 + t * (1.0 - u) * (1.0 - v));
    case CopulaFamily::Gaussian:
      return std::clamp(
        bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), t), 0.0, std::min(u, v));
  }
  throw std::logic_error("unknown copula family");
}

double CopulaModel::partial(PartialWrt wrt, double u, double v) const
{
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
    throw std::invalid_argument("partial derivative argument outside (0,1)^2");
  // C is symmetric in all four families, so C_v(u,v) = C_u(v,u).
  if (wrt == PartialWrt::V)
    std::swap(u, v);
  const double t = parameter_;
  switch (family_) {
    case CopulaFamily::Independence:
      return v;
    case CopulaFamily::Clayton:
      return std::pow(u, -t - 1.0) *
             std::pow(std::pow(u, -t) + std::pow(v, -t) - 1.0, -1.0 / t - 1.0);
    case CopulaFamily::FGM:
      return v * (1.0 + t * (1.0 - 2.0 * u) * (1.0 - v));
    case CopulaFamily::Gaussian:
      return normal_cdf((normal_quantile(v) - t * normal_quantile(u)) / std::sqrt(1.0 - t * t));
  }
  throw std::logic_error("unknown copula family");
}

std::pair<double, double> CopulaModel::draw(Rng& rng) const
{
  const double u = rng.uniform();
  const double w = rng.uniform();
  const double t = parameter_;
  double v = w;
  switch (family_) {
    case CopulaFamily::Independence:
      break;
    case CopulaFamily::Clayton:
      v = std::pow((std::pow(w, -t / (1.0 + t)) - 1.0) * std::pow(u, -t) + 1.0, -1.0 / t);
      break;
    case CopulaFamily::FGM: {
      // v (1 + a (1 - v)) = w with a = theta (1 - 2u)
      const double a = t * (1.0 - 2.0 * u);
      if (std::abs(a) > 1e-12) {
        const double b = 1.0 + a;
        v = 2.0 * w / (b + std::sqrt(b * b - 4.0 * a * w));
      }
      break;
    }
    case CopulaFamily::Gaussian:
      v = normal_cdf(t * normal_quantile(u) + std::sqrt(1.0 - t * t) * normal_quantile(w));
      break;
  }
  // keep the draw inside the open square
  constexpr double eps = 0x1.0p-60;
  v = std::clamp(v, eps, 1.0 - 0x1.0p-53);
  return { u, v };
}

double copula_cdf(const CopulaModel& model, double u, double v)
{
  return model.cdf(u, v);
}

double copula_partial(const CopulaModel& model, PartialWrt wrt, double u, double v)
{
  return model.partial(wrt, u, v);
}

UniformPairs copula_sample(const CopulaModel& model, std::size_t n, Rng& rng)
{
  if (n == 0)
    throw std::invalid_argument("sample size must be positive");
  UniformPairs pairs;
  pairs.us.resize(n);
  pairs.vs.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    std::tie(pairs.us[i], pairs.vs[i]) = model.draw(rng);
  return pairs;
}

} // namespace copula_lab
