#ifndef ESC_INTEGRATOR_HPP
#define ESC_INTEGRATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace esc
{

class IntegrationError : public std::runtime_error
{
public:
  IntegrationError(const std::string& what, double t)
    : std::runtime_error(what + " at t=" + std::to_string(t)), time_(t)
  {
  }

  double time() const { return time_; }

private:
  double time_;
};

/// floor(span / dt), snapping ratios that are within rounding of an integer.
inline std::int64_t step_count(double span, double dt)
{
  const double ratio = span / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest))
  {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::floor(ratio));
}

template <typename State>
bool all_finite(const State& x)
{
  if constexpr (std::is_arithmetic_v<State>)
  {
    return std::isfinite(x);
  }
  else
  {
    return x.allFinite();
  }
}

/**
 * Classical fixed-step RK4.
 *
 * Steps are taken at t_k = t0 + k dt for k = 0..n with
 * n = step_count(t_end - t0, dt); observer(t_k, x_k) is called for every k
 * divisible by stride, so it sees floor(n / stride) + 1 samples. Times are
 * computed from k, never accumulated, so identical inputs give
 * bit-identical output. A non-finite state aborts with IntegrationError.
 */
template <typename State, typename Rhs, typename Observer>
void integrate_rk4(Rhs&& rhs,
                   State x,
                   double t0,
                   double t_end,
                   double dt,
                   int stride,
                   Observer&& observer)
{
  if (!(dt > 0.0) || !std::isfinite(dt))
  {
    throw std::invalid_argument("integrate_rk4: dt must be finite and > 0");
  }
  if (stride < 1)
  {
    throw std::invalid_argument("integrate_rk4: stride must be >= 1");
  }
  if (!(t_end >= t0))
  {
    throw std::invalid_argument("integrate_rk4: t_end must be >= t0");
  }
  if (!all_finite(x))
  {
    throw IntegrationError("non-finite initial state", t0);
  }

  const std::int64_t n = step_count(t_end - t0, dt);
  const double half = 0.5 * dt;
  observer(t0, x);
  for (std::int64_t k = 0; k < n; ++k)
  {
    const double t = t0 + static_cast<double>(k) * dt;
    const State k1 = rhs(t, x);
    const State k2 = rhs(t + half, State(x + half * k1));
    const State k3 = rhs(t + half, State(x + half * k2));
    const State k4 = rhs(t + dt, State(x + dt * k3));
    x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = t0 + static_cast<double>(k + 1) * dt;
    if (!all_finite(x))
    {
      throw IntegrationError("non-finite state", t_next);
    }
    if ((k + 1) % stride == 0)
    {
      observer(t_next, x);
    }
  }
}

template <typename State>
struct Sample
{
  double t;
  State x;
};

template <typename State, typename Rhs>
std::vector<Sample<State>> integrate_rk4(Rhs&& rhs,
                                         const State& x0,
                                         double t0,
                                         double t_end,
                                         double dt,
                                         int stride = 1)
{
  std::vector<Sample<State>> out;
  integrate_rk4(std::forward<Rhs>(rhs), x0, t0, t_end, dt, stride,
                [&out](double t, const State& x) { out.push_back({t, x}); });
  return out;
}

}  // namespace esc

#endif  // ESC_INTEGRATOR_HPP
