#ifndef CARNOT_GEODESIC_HPP
#define CARNOT_GEODESIC_HPP

#include <vector>

#include "carnot/connection.hpp"

namespace carnot {

struct GeodesicSample {
  double t = 0;
  std::vector<double> point;
  /// Covector components p_a = lambda(e_a) in the model's frame.
  std::vector<double> covector;
  /// |dgamma/dt|_g.
  double speed = 0;
};

/// Normal geodesic of a connection compatible with (E, g): the covector
/// obeys (nabla_{dgamma} lambda)(w) = -lambda(T(dgamma, w)) and
/// dgamma = sum_h lambda(e_h) e_h over the horizontal frame.  In frame
/// components dp_a/dt = sum p_h p_c (gamma(a, h, c) + c(h, a, c)).
/// Fixed-step RK4 with step h up to t_max; the covector components are
/// relative to the model frame at each point.  Throws NumericalError on
/// non-finite values or when the model cannot be evaluated (chart exit).
std::vector<GeodesicSample> normal_geodesic(const ConnectionModel& model, const std::vector<double>& x0,
                                            const std::vector<double>& p0, double t_max, double h);

}  // namespace carnot

#endif
