#include "carnot/manifold_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "carnot/errors.hpp"

namespace carnot {

namespace {

using json = nlohmann::json;

const json& require(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw PreconditionError("missing key '" + key + "'");
  return *it;
}

const json& require_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw PreconditionError(where + ": expected an array");
  return v;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw PreconditionError(where + ": expected a number");
  return v.get<double>();
}

Expr expression(const json& v, const std::vector<std::string>& coords, const std::string& where) {
  std::string text;
  if (v.is_string()) {
    text = v.get<std::string>();
  } else if (v.is_number_integer()) {
    text = std::to_string(v.get<long long>());
  } else {
    throw PreconditionError(where + ": expected an expression string");
  }
  try {
    return parse(text, coords);
  } catch (const ParseError& e) {
    std::string what = e.what();
    std::size_t cut = what.find(": ");
    throw ParseError(e.offset(), where + ": " + (cut == std::string::npos ? what : what.substr(cut + 2)));
  } catch (const Error& e) {
    throw PreconditionError(where + ": " + e.what());
  }
}

std::string at(const std::string& key, std::size_t i) { return key + "[" + std::to_string(i) + "]"; }

}  // namespace

std::vector<std::vector<double>> ManifoldFile::sample() const {
  if (!sample_points.empty()) return sample_points;
  return carnot::sample_points(chart_box, sample_count, seed);
}

std::vector<double> ManifoldFile::center() const {
  std::vector<double> c;
  for (const auto& [lo, hi] : chart_box) c.push_back((lo + hi) / 2);
  return c;
}

ManifoldFile parse_manifold_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, "invalid JSON");
  }
  if (!doc.is_object()) throw PreconditionError("manifold file must be a JSON object");

  std::vector<std::string> coords;
  for (const json& c : require_array(require(doc, "coords"), "coords")) {
    if (!c.is_string()) throw PreconditionError("coords: expected names");
    coords.push_back(c.get<std::string>());
  }
  std::size_t n = coords.size();

  const json& rank_json = require(doc, "horizontal_rank");
  if (!rank_json.is_number_integer()) throw PreconditionError("horizontal_rank: expected an integer");
  int rank = rank_json.get<int>();
  if (rank < 1 || rank > static_cast<int>(n)) {
    throw PreconditionError("horizontal_rank " + std::to_string(rank) + " outside 1.." + std::to_string(n));
  }

  std::vector<VectorField> frame;
  const json& frames = require_array(require(doc, "frames"), "frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    VectorField field;
    for (std::size_t k = 0; k < require_array(frames[i], at("frames", i)).size(); ++k) {
      field.push_back(expression(frames[i][k], coords, at(at("frames", i), k)));
    }
    frame.push_back(std::move(field));
  }

  ExprMatrix metric;
  if (doc.contains("metric")) {
    const json& rows = require_array(doc["metric"], "metric");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<Expr> row;
      for (std::size_t j = 0; j < require_array(rows[i], at("metric", i)).size(); ++j) {
        row.push_back(expression(rows[i][j], coords, at(at("metric", i), j)));
      }
      metric.push_back(std::move(row));
    }
  }

  StructureClass cls = StructureClass::generic;
  if (doc.contains("class")) {
    if (!doc["class"].is_string()) throw PreconditionError("class: expected a string");
    cls = structure_class_from_string(doc["class"].get<std::string>());
  }

  ManifoldFile out{FramedManifold(coords, frame, rank, metric, cls), ChartBox(n, {-1.0, 1.0}), 42, 10, {}};

  if (doc.contains("chart_box")) {
    const json& box = require_array(doc["chart_box"], "chart_box");
    if (box.size() != n) throw PreconditionError("chart_box: expected one interval per coordinate");
    for (std::size_t i = 0; i < n; ++i) {
      if (!box[i].is_array() || box[i].size() != 2) throw PreconditionError(at("chart_box", i) + ": expected [lo, hi]");
      double lo = number(box[i][0], at("chart_box", i)), hi = number(box[i][1], at("chart_box", i));
      if (!(lo <= hi)) throw PreconditionError(at("chart_box", i) + ": empty interval");
      out.chart_box[i] = {lo, hi};
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw PreconditionError("seed: expected a non-negative integer");
    out.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("sample_count")) {
    if (!doc["sample_count"].is_number_integer() || doc["sample_count"].get<int>() < 1) {
      throw PreconditionError("sample_count: expected a positive integer");
    }
    out.sample_count = doc["sample_count"].get<int>();
  }
  if (doc.contains("sample_points")) {
    const json& pts = require_array(doc["sample_points"], "sample_points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!pts[i].is_array() || pts[i].size() != n) {
        throw PreconditionError(at("sample_points", i) + ": expected one value per coordinate");
      }
      std::vector<double> p;
      for (const json& v : pts[i]) p.push_back(number(v, at("sample_points", i)));
      out.sample_points.push_back(std::move(p));
    }
  }
  return out;
}

ManifoldFile load_manifold_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifold_file(text.str());
}

}  // namespace carnot
