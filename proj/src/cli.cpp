#include "carnot/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "carnot/connection.hpp"
#include "carnot/contact.hpp"
#include "carnot/errors.hpp"
#include "carnot/g235.hpp"
#include "carnot/geodesic.hpp"
#include "carnot/manifold_file.hpp"

namespace carnot {

namespace {

using json = nlohmann::ordered_json;

// Components below this size are left out of the component tables.
constexpr double kTableCutoff = 1e-12;

struct Options {
  std::string input;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int samples = 0;
  double tolerance = 1e-8;
  std::string format = "json";
  std::string base_point;
  // geodesic
  std::string covector;
  double t_max = 1.0;
  double step = 1e-2;
  std::string output;
};

struct Session {
  ManifoldFile file;
  std::vector<std::vector<double>> sample;
  std::uint64_t seed;
  std::vector<double> base;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw PreconditionError(what + ": cannot read '" + item + "' as a number");
    }
  }
  return out;
}

std::vector<double> parse_base_point(const std::string& text, const std::vector<std::string>& coords) {
  std::map<std::string, double> given;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw PreconditionError("--base-point: expected name=value, got '" + item + "'");
    std::string name = item.substr(0, eq);
    name.erase(0, name.find_first_not_of(' '));
    name.erase(name.find_last_not_of(' ') + 1);
    std::vector<double> v = parse_list(item.substr(eq + 1), "--base-point");
    if (v.size() != 1) throw PreconditionError("--base-point: bad value for '" + name + "'");
    given[name] = v[0];
  }
  std::vector<double> p;
  for (const std::string& c : coords) {
    auto it = given.find(c);
    if (it == given.end()) throw PreconditionError("--base-point: missing coordinate '" + c + "'");
    p.push_back(it->second);
    given.erase(it);
  }
  if (!given.empty()) throw PreconditionError("--base-point: unknown coordinate '" + given.begin()->first + "'");
  return p;
}

Session open_session(const Options& o) {
  Session s{load_manifold_file(o.input), {}, 0, {}};
  if (o.seed_set) s.file.seed = o.seed;
  if (o.samples > 0) s.file.sample_count = o.samples;
  s.seed = s.file.seed;
  s.sample = s.file.sample();
  s.base = o.base_point.empty() ? s.file.center() : parse_base_point(o.base_point, s.file.manifold.coords());
  for (const auto& p : s.sample) s.file.manifold.check_point(p);
  s.file.manifold.check_point(s.base);
  return s;
}

json header(const std::string& command, const Session& s) {
  json j;
  j["command"] = command;
  j["class"] = to_string(s.file.manifold.structure_class());
  j["dimension"] = s.file.manifold.dimension();
  j["horizontal_rank"] = s.file.manifold.horizontal_rank();
  j["seed"] = s.seed;
  j["samples"] = s.sample.size();
  j["base_point"] = s.base;
  return j;
}

void require_constant_symbol(const Session& s) {
  StructureClass cls = s.file.manifold.structure_class();
  if (cls == StructureClass::generic) {
    throw PreconditionError("unsupported class 'generic': needs contact or two-three-five");
  }
  std::vector<std::vector<double>> pts = s.sample;
  pts.push_back(s.base);
  SymbolVerdict v = check_constant_symbol(s.file.manifold, pts);
  if (!v.constant) throw PreconditionError("the symbol is not constant on the sample (" + v.tag + ")");
}

std::unique_ptr<ConnectionModel> morimoto_model(const FramedManifold& m) {
  switch (m.structure_class()) {
    case StructureClass::contact:
      return std::make_unique<ContactModel>(m);
    case StructureClass::two_three_five:
      return std::make_unique<Morimoto235Model>(m);
    case StructureClass::generic:
      break;
  }
  throw PreconditionError("unsupported class 'generic': needs contact or two-three-five");
}

json values_of(const JetVector& v) {
  json a = json::array();
  for (const Jet& x : v) a.push_back(x.value());
  return a;
}

json analyze(const Session& s) {
  const FramedManifold& m = s.file.manifold;
  json j = header("analyze", s);
  json flags = json::array();
  std::vector<int> first;
  bool equiregular = true;
  json jumps = json::array();
  for (const auto& p : s.sample) {
    std::vector<int> g = growth_flag(m, p, m.dimension());
    flags.push_back(g);
    if (first.empty()) first = g;
    if (g != first) {
      equiregular = false;
      jumps.push_back({{"point", p}, {"growth", g}});
    }
  }
  j["growth"] = first;
  j["growth_at_samples"] = flags;
  j["equiregular"] = equiregular;
  if (!equiregular) j["rank_jumps"] = jumps;
  bool generating = !first.empty() && first.back() == m.dimension();
  j["bracket_generating"] = generating;

  json symbol;
  if (equiregular && generating) {
    CarnotAlgebra<double> a = symbol_at(m, s.base);
    symbol["layer_dims"] = a.algebra.layer_dims();
    symbol["isometry_dim"] = isometry_algebra(a).size();
  }
  if (m.structure_class() == StructureClass::generic) {
    symbol["constant"] = nullptr;
    symbol["note"] = "constant symbol is not decided for the generic class";
  } else {
    SymbolVerdict v = check_constant_symbol(m, s.sample);
    symbol["constant"] = v.constant;
    symbol["tag"] = v.tag;
    if (m.structure_class() == StructureClass::contact) {
      symbol["lambda"] = v.lambda;
      symbol["deviation"] = v.deviation;
    }
  }
  j["symbol"] = symbol;
  return j;
}

json component_table3(const Tensor3& t) {
  json rows = json::array();
  for (int a = 0; a < t.n; ++a) {
    for (int b = 0; b < t.n; ++b) {
      for (int c = 0; c < t.n; ++c) {
        double v = t(a, b, c).value();
        if (std::abs(v) > kTableCutoff) rows.push_back({a, b, c, v});
      }
    }
  }
  return rows;
}

json component_table4(const Tensor4& t) {
  json rows = json::array();
  for (int a = 0; a < t.n; ++a) {
    for (int b = a + 1; b < t.n; ++b) {
      for (int c = 0; c < t.n; ++c) {
        for (int d = 0; d < t.n; ++d) {
          double v = t(a, b, c, d).value();
          if (std::abs(v) > kTableCutoff) rows.push_back({a, b, c, d, v});
        }
      }
    }
  }
  return rows;
}

struct SampleResiduals {
  ConnectionResiduals max;
  json table = json::array();
};

SampleResiduals sample_residuals(const ConnectionModel& model, const Session& s) {
  SampleResiduals out;
  for (const auto& p : s.sample) {
    ConnectionResiduals r = residuals(model.at(p, 1));
    out.table.push_back({{"point", p}, {"torsion_defect", r.flat_torsion}, {"curvature", r.flat_curvature}});
    out.max.grading = std::max(out.max.grading, r.grading);
    out.max.metric = std::max(out.max.metric, r.metric);
    out.max.strong = std::max(out.max.strong, r.strong);
    out.max.torsion_identity = std::max(out.max.torsion_identity, r.torsion_identity);
    out.max.rcond = std::max(out.max.rcond, r.rcond);
    out.max.tcond = std::max(out.max.tcond, r.tcond);
    out.max.flat_torsion = std::max(out.max.flat_torsion, r.flat_torsion);
    out.max.flat_curvature = std::max(out.max.flat_curvature, r.flat_curvature);
  }
  return out;
}

json connection(const Session& s, double tol) {
  require_constant_symbol(s);
  const FramedManifold& m = s.file.manifold;
  std::unique_ptr<ConnectionModel> model = morimoto_model(m);
  json j = header("connection", s);

  FrameConnection nabla = model->at(s.base, 1);
  const LocalFrame& f = nabla.frame();
  json grading = json::array();
  for (int a = 0; a < f.size(); ++a) grading.push_back({{"degree", f.degree(a)}, {"components", values_of(f.field(a))}});
  j["grading"] = grading;

  if (m.structure_class() == StructureClass::contact) {
    j["w"] = static_cast<const ContactModel&>(*model).w_at(s.base);
  } else {
    Morimoto235 d = morimoto_235(m, m.jet_point(s.base, Morimoto235Model::order(0)));
    j["upsilon"] = values_of(d.upsilon);
    j["w1"] = values_of(d.upsilon);
    j["w2"] = values_of(Jet(0.75) * d.upsilon);
    json mu = json::array();
    for (const Jet& x : d.mu) mu.push_back(x.value());
    j["mu"] = mu;
  }

  json gamma = json::array();
  for (int a = 0; a < f.size(); ++a) {
    for (int b = 0; b < f.size(); ++b) {
      for (int c = 0; c < f.size(); ++c) {
        double v = nabla(a, b, c).value();
        if (std::abs(v) > kTableCutoff) gamma.push_back({a, b, c, v});
      }
    }
  }
  j["christoffel"] = gamma;
  j["torsion"] = component_table3(torsion(nabla));
  j["curvature"] = component_table4(curvature(nabla));

  SampleResiduals r = sample_residuals(*model, s);
  j["sample_table"] = r.table;
  json res;
  res["grading_parallel"] = r.max.grading;
  res["metric"] = r.max.metric;
  res["strong"] = r.max.strong;
  res["torsion_identity"] = r.max.torsion_identity;
  res["rcond"] = r.max.rcond;
  res["tcond"] = r.max.tcond;
  res["torsion"] = r.max.flat_torsion;
  res["curvature"] = r.max.flat_curvature;
  j["residuals"] = res;
  j["tolerance"] = tol;
  double morimoto = std::max({r.max.grading, r.max.metric, r.max.strong, r.max.rcond, r.max.tcond});
  j["morimoto"] = morimoto <= tol;
  j["flat"] = morimoto <= tol && r.max.flat_torsion <= tol && r.max.flat_curvature <= tol;
  return j;
}

json flat(const Session& s, double tol) {
  require_constant_symbol(s);
  const FramedManifold& m = s.file.manifold;
  std::unique_ptr<ConnectionModel> model = morimoto_model(m);
  json j = header("flat", s);
  Report r = flatness_check(*model, s.sample, tol);
  json res;
  for (const CheckResult& c : r) res[c.name] = c.residual;
  bool verdict = all_pass(r);
  if (m.structure_class() == StructureClass::two_three_five) {
    Report canonical = flatness_235(m, s.sample, tol);
    for (const CheckResult& c : canonical) res["canonical_" + c.name] = c.residual;
  }
  j["residuals"] = res;
  j["tolerance"] = tol;
  j["flat"] = verdict;
  return j;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void geodesic(const Session& s, const Options& o, std::ostream& out) {
  const FramedManifold& m = s.file.manifold;
  std::unique_ptr<ConnectionModel> model;
  if (m.structure_class() == StructureClass::generic) {
    model = std::make_unique<ParallelFrameModel>(m);
  } else {
    require_constant_symbol(s);
    model = morimoto_model(m);
  }
  int n = m.dimension();
  std::vector<double> p0(n, 0.0);
  p0[0] = 1.0;
  if (!o.covector.empty()) p0 = parse_list(o.covector, "--covector");
  if (static_cast<int>(p0.size()) != n) throw PreconditionError("--covector: expected " + std::to_string(n) + " values");
  std::vector<GeodesicSample> path = normal_geodesic(*model, s.base, p0, o.t_max, o.step);

  std::ostringstream csv;
  csv << "t";
  for (const std::string& c : m.coords()) csv << "," << c;
  for (int a = 1; a <= n; ++a) csv << ",p" << a;
  csv << ",speed\n";
  for (const GeodesicSample& g : path) {
    csv << number(g.t);
    for (double x : g.point) csv << "," << number(x);
    for (double x : g.covector) csv << "," << number(x);
    csv << "," << number(g.speed) << "\n";
  }
  if (o.output.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(o.output);
    if (!file) throw PreconditionError("cannot write '" + o.output + "'");
    file << csv.str();
  }
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, out);
  } else {
    out << prefix << ": " << j.dump() << "\n";
  }
}

void emit(const json& j, const std::string& format, std::ostream& out) {
  if (format == "text") {
    flatten(j, "", out);
  } else {
    out << j.dump(2) << "\n";
  }
}

void common_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "Manifold file (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Sampling seed (overrides the file)")->each([&o](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--samples", o.samples, "Number of sample points (overrides the file)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", o.tolerance, "Residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--base-point", o.base_point, "Base point, e.g. \"x=0.1,y=0,z=0\" (default: box center)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sub-Riemannian symbols, Morimoto connections and flatness"};
  app.require_subcommand(1);
  Options o;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Growth vector, equiregularity and symbol");
  CLI::App* connection_cmd = app.add_subcommand("connection", "Morimoto grading, connection and residuals");
  CLI::App* flat_cmd = app.add_subcommand("flat", "Flatness verdict (exit 0 flat, 1 not flat, 2 error)");
  CLI::App* geodesic_cmd = app.add_subcommand("geodesic", "Normal geodesic as CSV");
  for (CLI::App* cmd : {analyze_cmd, connection_cmd, flat_cmd, geodesic_cmd}) common_options(cmd, o);
  geodesic_cmd->add_option("--covector", o.covector, "Initial covector in frame components, comma-separated");
  geodesic_cmd->add_option("--t-max", o.t_max, "Final time")->check(CLI::NonNegativeNumber);
  geodesic_cmd->add_option("--step", o.step, "RK4 step")->check(CLI::PositiveNumber);
  geodesic_cmd->add_option("--output", o.output, "Trajectory file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Session s = open_session(o);
    if (analyze_cmd->parsed()) {
      emit(analyze(s), o.format, out);
    } else if (connection_cmd->parsed()) {
      emit(connection(s, o.tolerance), o.format, out);
    } else if (flat_cmd->parsed()) {
      json j = flat(s, o.tolerance);
      emit(j, o.format, out);
      return j["flat"].get<bool>() ? 0 : 1;
    } else {
      geodesic(s, o, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace carnot
