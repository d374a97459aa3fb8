#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitforge/errors.hpp"

/// Adaptive Dormand-Prince 5(4) integrator with PI step control, 4th-order dense
/// output and event location by bisection on the interpolant.
namespace gaitforge::ode {

struct Options
{
  double rtol = 1e-9;
  double atol = 1e-11;
  /// initial step; 0 picks one from the problem scale
  double initial_step = 0.0;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
  /// event times are located to this absolute tolerance
  double event_tol = 1e-12;
};

struct Statistics
{
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

template<int N>
using State = Eigen::Matrix<double, N, 1>;

/// One accepted step with its continuous extension.
template<int N>
struct Step
{
  double t0 = 0.0;
  double t1 = 0.0;
  /// end of the valid range; equals t1 unless a terminal event cut the step short
  double stop = 0.0;
  State<N> y0, y1;
  State<N> r2, r3, r4, r5;

  State<N> operator()(double t) const
  {
    const double h = t1 - t0;
    const double s = h == 0.0 ? 0.0 : (t - t0) / h;
    const double s1 = 1.0 - s;
    return y0 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }
};

template<int N>
struct Event
{
  /// zero crossings of this function are detected
  std::function<double(double, const State<N> &)> fn;
  /// +1 only rising, -1 only falling, 0 both
  int direction = 0;
  bool terminal = true;
};

template<int N>
struct Result
{
  double t = 0.0;
  State<N> y;
  /// index of the terminal event that stopped integration, if any
  std::optional<int> event;
  Statistics stats;
};

template<int N>
class DormandPrince
{
public:
  using Vec = State<N>;
  using Rhs = std::function<Vec(double, const Vec &)>;
  using Observer = std::function<void(const Step<N> &)>;

  explicit DormandPrince(Options options = {}) : opt_(options) {}

  Result<N> integrate(const Rhs & f, double t0, const Vec & y0, double t_end,
                      const std::vector<Event<N>> & events = {}, const Observer & observe = {}) const
  {
    Result<N> res;
    Statistics & st = res.stats;
    const double dir = t_end >= t0 ? 1.0 : -1.0;
    double t = t0;
    Vec y = y0;
    Vec k1 = f(t, y);
    ++st.evaluations;
    if (t == t_end) {
      res.t = t;
      res.y = y;
      return res;
    }

    double h = opt_.initial_step > 0.0 ? opt_.initial_step : initial_step(f, t, y, k1, dir, st);
    h = std::min(h, opt_.max_step);
    double err_prev = 1e-4;
    bool last_rejected = false;

    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
      g_prev[e] = events[e].fn(t, y);
    }

    while (true) {
      if (st.accepted + st.rejected > opt_.max_steps) {
        throw IntegrationFailure("ode: step budget exhausted at t = " + std::to_string(t));
      }
      const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (h < hmin) {
        throw IntegrationFailure("ode: step size underflow at t = " + std::to_string(t));
      }
      bool final_step = false;
      if (dir * (t + dir * h - t_end) >= 0.0) {
        h = std::abs(t_end - t);
        final_step = true;
      }
      const double hs = dir * h;

      const Vec k2 = f(t + c2 * hs, y + hs * (a21 * k1));
      const Vec k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
      const Vec k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const double t1 = final_step ? t_end : t + hs;
      const Vec k7 = f(t1, y1);
      st.evaluations += 6;

      const Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double norm = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y(i)), std::abs(y1(i)));
        norm += (err(i) / sc) * (err(i) / sc);
      }
      norm = std::sqrt(norm / static_cast<double>(y.size()));
      if (!std::isfinite(norm)) {
        ++st.rejected;
        h *= 0.2;
        last_rejected = true;
        continue;
      }

      if (norm > 1.0) {
        ++st.rejected;
        h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
        last_rejected = true;
        continue;
      }

      ++st.accepted;
      Step<N> step;
      step.t0 = t;
      step.t1 = t1;
      step.stop = t1;
      step.y0 = y;
      step.y1 = y1;
      const Vec ydiff = y1 - y;
      const Vec bspl = hs * k1 - ydiff;
      step.r2 = ydiff;
      step.r3 = bspl;
      step.r4 = ydiff - hs * k7 - bspl;
      step.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

      // events: earliest terminal crossing in this step wins
      std::optional<int> hit;
      double t_hit = t1;
      for (std::size_t e = 0; e < events.size(); ++e) {
        const double g1 = events[e].fn(t1, y1);
        const double g0 = g_prev[e];
        g_prev[e] = g1;
        if (!crosses(g0, g1, events[e].direction)) {
          continue;
        }
        const double te = locate(events[e], step, g0);
        if (events[e].terminal && (!hit || dir * (te - t_hit) < 0.0)) {
          hit = static_cast<int>(e);
          t_hit = te;
        }
      }
      if (hit) {
        const Vec yh = step(t_hit);
        if (observe) {
          step.stop = t_hit;
          observe(step);
        }
        res.t = t_hit;
        res.y = yh;
        res.event = hit;
        return res;
      }

      if (observe) {
        observe(step);
      }
      t = t1;
      y = y1;
      k1 = k7;
      if (final_step) {
        res.t = t;
        res.y = y;
        return res;
      }

      // PI controller (Hairer & Wanner)
      constexpr double beta = 0.04;
      constexpr double expo = 0.2 - 0.75 * beta;
      double fac = std::pow(std::max(norm, 1e-10), expo) * std::pow(err_prev, -beta) / 0.9;
      fac = std::clamp(fac, 0.1, 5.0);
      double h_new = h / fac;
      if (last_rejected) {
        h_new = std::min(h_new, h);
      }
      err_prev = std::max(norm, 1e-4);
      last_rejected = false;
      h = std::min(h_new, opt_.max_step);
    }
  }

  const Options & options() const { return opt_; }

private:
  static bool crosses(double g0, double g1, int direction)
  {
    if (!(std::isfinite(g0) && std::isfinite(g1))) {
      return false;
    }
    const bool rising = g0 < 0.0 && g1 >= 0.0;
    const bool falling = g0 > 0.0 && g1 <= 0.0;
    return (direction >= 0 && rising) || (direction <= 0 && falling);
  }

  double locate(const Event<N> & ev, const Step<N> & step, double g0) const
  {
    double a = step.t0, b = step.t1;
    double ga = g0;
    while (std::abs(b - a) > opt_.event_tol) {
      const double m = 0.5 * (a + b);
      const double gm = ev.fn(m, step(m));
      if ((ga < 0.0) == (gm < 0.0) && gm != 0.0) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    return b;
  }

  double initial_step(const Rhs & f, double t, const Vec & y, const Vec & k1, double dir,
                      Statistics & st) const
  {
    auto scaled = [&](const Vec & v) {
      double n = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double sc = opt_.atol + opt_.rtol * std::abs(y(i));
        n += (v(i) / sc) * (v(i) / sc);
      }
      return std::sqrt(n / static_cast<double>(y.size()));
    };
    const double d0 = scaled(y), d1n = scaled(k1);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    const Vec y1 = y + dir * h0 * k1;
    const Vec k2 = f(t + dir * h0, y1);
    ++st.evaluations;
    const double d2 = scaled(k2 - k1) / h0;
    const double h1 = std::max(d1n, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1n, d2), 0.2);
    return std::min(100.0 * h0, h1);
  }

  Options opt_;

  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

}  // namespace gaitforge::ode
