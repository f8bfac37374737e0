#include "carnot/models.hpp"

#include <cmath>

namespace carnot {

namespace {

Expr number(double d) {
  double scaled = std::round(d * 1e6);
  if (std::abs(scaled - d * 1e6) < 1e-9 && std::abs(scaled) < 1e15) {
    Rational q(static_cast<long>(scaled), 1000000L);
    q.canonicalize();
    return Expr::rational(q);
  }
  return Expr::real(d);
}

struct Substitution {
  const std::map<std::string, Expr>* values;
  Expr constant(double d) { return number(d); }
  Expr variable(const std::string& name) {
    auto it = values->find(name);
    return it == values->end() ? Expr::variable(name) : it->second;
  }
  Expr neg(const Expr& a) { return -a; }
  Expr add(const Expr& a, const Expr& b) { return a + b; }
  Expr mul(const Expr& a, const Expr& b) { return a * b; }
  Expr div(const Expr& a, const Expr& b) { return a / b; }
  Expr pow(const Expr& a, int k) { return carnot::pow(a, k); }
  Expr sqrt(const Expr& a) { return carnot::sqrt(a); }
  Expr exp(const Expr& a) { return carnot::exp(a); }
  Expr log(const Expr& a) { return carnot::log(a); }
  Expr sin(const Expr& a) { return carnot::sin(a); }
  Expr cos(const Expr& a) { return carnot::cos(a); }
  Expr tan(const Expr& a) { return carnot::tan(a); }
};

VectorField field(const std::vector<std::string>& coords, const std::vector<std::string>& text) {
  VectorField v;
  for (const auto& t : text) v.push_back(parse(t, coords));
  return v;
}

std::vector<std::string> heisenberg_coords(int n) {
  std::vector<std::string> c;
  for (int j = 1; j <= n; ++j) c.push_back("x" + std::to_string(j));
  for (int j = 1; j <= n; ++j) c.push_back("y" + std::to_string(j));
  c.push_back("z");
  return c;
}

FramedManifold heisenberg_scaled(const std::vector<double>& lambda, const Expr& scale) {
  int n = static_cast<int>(lambda.size());
  std::vector<std::string> coords = heisenberg_coords(n);
  int dim = 2 * n + 1;
  std::vector<VectorField> frame;
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < n; ++j) {
      VectorField v(dim, Expr(0));
      Expr s = simplify(scale / number(lambda[j]));
      if (pass == 0) {
        v[j] = s;
        v[dim - 1] = simplify(-s * Expr::variable(coords[n + j]) / Expr(2));
      } else {
        v[n + j] = s;
        v[dim - 1] = simplify(s * Expr::variable(coords[j]) / Expr(2));
      }
      frame.push_back(v);
    }
  }
  VectorField z(dim, Expr(0));
  z[dim - 1] = Expr(1);
  frame.push_back(z);
  return FramedManifold(coords, frame, 2 * n, {}, StructureClass::contact);
}

}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& values) {
  Substitution s{&values};
  return simplify(evaluate_with(e, s));
}

FramedManifold heisenberg_group(const std::vector<double>& lambda) { return heisenberg_scaled(lambda, Expr(1)); }

FramedManifold conformal_heisenberg(const std::vector<double>& lambda, const std::string& f) {
  std::vector<std::string> coords = heisenberg_coords(static_cast<int>(lambda.size()));
  return heisenberg_scaled(lambda, exp(-parse(f, coords)));
}

FramedManifold cartan_group() {
  std::vector<std::string> c = {"x1", "x2", "x3", "x4", "x5"};
  std::vector<VectorField> frame = {
      field(c, {"1", "0", "0", "0", "0"}),
      field(c, {"0", "1", "x1", "x1^2/2", "x1*x2"}),
      field(c, {"0", "0", "1", "x1", "x2"}),
      field(c, {"0", "0", "0", "1", "0"}),
      field(c, {"0", "0", "0", "0", "1"}),
  };
  return FramedManifold(c, frame, 2, {}, StructureClass::two_three_five);
}

FramedManifold cartan_perturbed(double eps) {
  FramedManifold base = cartan_group();
  const auto& c = base.coords();
  ExprMatrix g = {{simplify(Expr(1) + number(eps) * pow(Expr::variable("x4"), 2)), Expr(0)}, {Expr(0), Expr(1)}};
  return FramedManifold(c, base.frame(), 2, g, StructureClass::two_three_five);
}

FramedManifold rotate_horizontal(const FramedManifold& m, const std::string& alpha) {
  Expr a = parse(alpha, m.coords());
  Expr ca = cos(a), sa = sin(a);
  std::vector<VectorField> frame = m.orthonormal_frame();
  const VectorField& x1 = m.orthonormal_frame()[0];
  const VectorField& x2 = m.orthonormal_frame()[1];
  for (int k = 0; k < m.dimension(); ++k) {
    frame[0][k] = simplify(ca * x1[k] + sa * x2[k]);
    frame[1][k] = simplify(-sa * x1[k] + ca * x2[k]);
  }
  return FramedManifold(m.coords(), frame, m.horizontal_rank(), {}, m.structure_class());
}

FramedManifold affine_chart(const FramedManifold& m, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  int n = m.dimension();
  const auto& coords = m.coords();
  Eigen::MatrixXd ainv = a.inverse();
  // Old coordinates as functions of the new ones: x = A^{-1} (y - b).
  std::map<std::string, Expr> old;
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) {
      if (ainv(i, j) == 0.0) continue;
      terms.push_back(number(ainv(i, j)) * (Expr::variable(coords[j]) - number(b(j))));
    }
    old[coords[i]] = simplify(sum(terms));
  }
  std::vector<VectorField> frame;
  for (const VectorField& x : m.frame()) {
    VectorField pulled(n), out(n);
    for (int k = 0; k < n; ++k) pulled[k] = substitute(x[k], old);
    for (int i = 0; i < n; ++i) {
      std::vector<Expr> terms;
      for (int k = 0; k < n; ++k) {
        if (a(i, k) != 0.0 && !pulled[k].is_zero()) terms.push_back(number(a(i, k)) * pulled[k]);
      }
      out[i] = simplify(sum(terms));
    }
    frame.push_back(out);
  }
  ExprMatrix g = m.metric();
  for (auto& row : g) {
    for (auto& e : row) e = substitute(e, old);
  }
  return FramedManifold(coords, frame, m.horizontal_rank(), g, m.structure_class());
}

}  // namespace carnot
