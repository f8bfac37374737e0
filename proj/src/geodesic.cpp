#include "carnot/geodesic.hpp"

#include <cmath>

#include "carnot/errors.hpp"

namespace carnot {

namespace {

struct State {
  std::vector<double> x, p;
};

State axpy(const State& y, double s, const State& k) {
  State out = y;
  for (std::size_t i = 0; i < y.x.size(); ++i) out.x[i] += s * k.x[i];
  for (std::size_t i = 0; i < y.p.size(); ++i) out.p[i] += s * k.p[i];
  return out;
}

struct Rhs {
  const ConnectionModel& model;

  State operator()(const State& y, double* speed = nullptr) const {
    FrameConnection nabla = [&] {
      try {
        return model.at(y.x, 0);
      } catch (const DomainError& e) {
        throw NumericalError(std::string("geodesic left the chart domain: ") + e.what());
      }
    }();
    const LocalFrame& f = nabla.frame();
    int n = f.size();
    int r = f.layer_dims()[0];
    State d{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    double s2 = 0.0;
    for (int h = 0; h < r; ++h) {
      s2 += y.p[h] * y.p[h];
      for (int k = 0; k < n; ++k) d.x[k] += y.p[h] * f.field(h)[k].value();
    }
    for (int a = 0; a < n; ++a) {
      double v = 0.0;
      for (int h = 0; h < r; ++h) {
        for (int c = 0; c < n; ++c) v += y.p[h] * y.p[c] * (nabla(a, h, c).value() + f.c(h, a, c).value());
      }
      d.p[a] = v;
    }
    if (speed) *speed = std::sqrt(s2);
    return d;
  }
};

bool finite(const State& y) {
  for (double v : y.x) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : y.p) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

std::vector<GeodesicSample> normal_geodesic(const ConnectionModel& model, const std::vector<double>& x0,
                                            const std::vector<double>& p0, double t_max, double h) {
  if (!(h > 0) || !(t_max >= 0)) throw PreconditionError("step and final time must be positive");
  if (x0.size() != p0.size()) throw PreconditionError("point and covector must have the same dimension");
  Rhs rhs{model};
  State y{x0, p0};
  std::vector<GeodesicSample> out;
  long steps = std::lround(t_max / h);
  for (long i = 0;; ++i) {
    double speed = 0.0;
    State k1 = rhs(y, &speed);
    out.push_back({static_cast<double>(i) * h, y.x, y.p, speed});
    if (i == steps) break;
    State k2 = rhs(axpy(y, h / 2, k1));
    State k3 = rhs(axpy(y, h / 2, k2));
    State k4 = rhs(axpy(y, h, k3));
    y = axpy(axpy(axpy(axpy(y, h / 6, k1), h / 3, k2), h / 3, k3), h / 6, k4);
    if (!finite(y)) throw NumericalError("geodesic became non-finite");
  }
  return out;
}

}  // namespace carnot
