#include "kstab/jobspec.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kstab/error.hpp"

namespace kstab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError("spec field '" + where + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }
std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

std::int64_t parse_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

QVector parse_qvector(const json& j, const std::string& where, std::optional<int> size = std::nullopt) {
  if (!j.is_array()) fail(where, "expected an array of rationals");
  QVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_rational_field(j[i], at(where, i));
  if (size && v.size() != *size) fail(where, "expected " + std::to_string(*size) + " entries");
  return v;
}

json rational_json(const Rational& r) { return r.str(); }

json qvector_json(const QVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(rational_json(v(i)));
  return a;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

void check_schema(const json& j) {
  const json& s = require(j, "schema", "");
  if (!s.is_string() || s.get<std::string>() != kSchema) fail("schema", std::string("expected \"") + kSchema + "\"");
}

}  // namespace

Rational parse_rational_field(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
  if (!j.is_string()) fail(where, "expected a rational string \"p/q\" or an integer");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

std::vector<long> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InputError(what + ": '" + item + "' is not an integer");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

QPolynomial parse_polynomial(const json& j, int nvars, const std::string& where) {
  const json& terms = require(j, "terms", where);
  const std::string tw = join(where, "terms");
  if (!terms.is_array()) fail(tw, "expected an array");
  QPolynomial p(nvars);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string w = at(tw, i);
    const json& e = require(terms[i], "exponent", w);
    if (!e.is_array() || static_cast<int>(e.size()) != nvars) {
      fail(w + ".exponent", "expected " + std::to_string(nvars) + " nonnegative integers");
    }
    Exponent ex;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const auto v = parse_int(e[k], at(w + ".exponent", k));
      if (v < 0) fail(at(w + ".exponent", k), "negative exponent");
      ex.push_back(static_cast<int>(v));
    }
    p.add_term(ex, parse_rational_field(require(terms[i], "coeff", w), w + ".coeff"));
  }
  return p;
}

json to_json(const QPolynomial& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exponent", e}, {"coeff", c.str()}});
  return {{"terms", terms}};
}

PotentialSpec parse_potential(const json& j, const std::string& where) {
  PotentialSpec s;
  if (!j.is_object()) fail(where, "expected an object");
  if (auto it = j.find("canonical"); it != j.end()) {
    if (!it->is_boolean()) fail(join(where, "canonical"), "expected true or false");
    s.canonical = it->get<bool>();
  }
  if (auto it = j.find("g"); it != j.end()) {
    const json& terms = require(*it, "terms", join(where, "g"));
    int nvars = 0;
    if (terms.is_array() && !terms.empty() && terms[0].is_object() && terms[0].contains("exponent") &&
        terms[0]["exponent"].is_array()) {
      nvars = static_cast<int>(terms[0]["exponent"].size());
    }
    s.g = parse_polynomial(*it, nvars, join(where, "g"));
  }
  return s;
}

PotentialSpec load_potential(const std::string& path) {
  const json j = parse_text(read_file(path));
  check_schema(j);
  return parse_potential(j, "");
}

json to_json(const PotentialSpec& s) {
  json j = {{"canonical", s.canonical}};
  if (!s.g.is_zero()) j["g"] = to_json(s.g);
  return j;
}

RootSystem RootSystemSpec::build() const {
  if (cartan) return RootSystem::from_cartan(*cartan);
  return RootSystem::classical(*series, rank);
}

RationalPolytope PolytopeSpec::build() const {
  if (!vertices.empty()) return RationalPolytope::from_vertices(vertices);
  return RationalPolytope::from_halfspaces(halfspaces);
}

RootSystem JobSpec::build_root_system() const {
  if (!root_system) throw InputError("spec field 'root_system': missing");
  return root_system->build();
}

PiecewiseAffine JobSpec::build_f() const {
  if (!f) throw InputError("spec field 'f': missing");
  return PiecewiseAffine(*f);
}

JobSpec parse_job(const json& j) {
  if (!j.is_object()) fail("", "top level must be an object");
  check_schema(j);
  JobSpec s;

  const json& poly = require(j, "polytope", "");
  if (poly.contains("vertices") == poly.contains("halfspaces")) {
    fail("polytope", "give exactly one of 'vertices' or 'halfspaces'");
  }
  int dim = 0;
  if (poly.contains("vertices")) {
    const json& vs = poly["vertices"];
    if (!vs.is_array() || vs.empty()) fail("polytope.vertices", "expected a nonempty array");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string w = at("polytope.vertices", i);
      s.polytope.vertices.push_back(i == 0 ? parse_qvector(vs[i], w) : parse_qvector(vs[i], w, dim));
      dim = static_cast<int>(s.polytope.vertices.front().size());
    }
  } else {
    const json& hs = poly["halfspaces"];
    if (!hs.is_array() || hs.empty()) fail("polytope.halfspaces", "expected a nonempty array");
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const std::string w = at("polytope.halfspaces", i);
      Halfspace h;
      h.normal = i == 0 ? parse_qvector(require(hs[i], "normal", w), w + ".normal")
                        : parse_qvector(require(hs[i], "normal", w), w + ".normal", dim);
      dim = static_cast<int>(h.normal.size());
      h.offset = parse_rational_field(require(hs[i], "offset", w), w + ".offset");
      s.polytope.halfspaces.push_back(h);
    }
  }
  if (dim < 1) fail("polytope", "dimension must be at least 1");

  if (auto it = j.find("root_system"); it != j.end()) {
    RootSystemSpec rs;
    if (it->contains("cartan")) {
      const json& c = (*it)["cartan"];
      if (!c.is_array() || c.empty()) fail("root_system.cartan", "expected a square integer matrix");
      const auto n = static_cast<Eigen::Index>(c.size());
      ZMatrix m(n, n);
      for (std::size_t r = 0; r < c.size(); ++r) {
        if (!c[r].is_array() || static_cast<Eigen::Index>(c[r].size()) != n) {
          fail(at("root_system.cartan", r), "expected " + std::to_string(n) + " integers");
        }
        for (std::size_t q = 0; q < c[r].size(); ++q) {
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = parse_int(c[r][q], at(at("root_system.cartan", r), q));
        }
      }
      rs.cartan = m;
      rs.rank = static_cast<int>(n);
    } else {
      const json& name = require(*it, "series", "root_system");
      if (!name.is_string()) fail("root_system.series", "expected a string");
      try {
        rs.series = parse_series(name.get<std::string>());
      } catch (const std::exception& e) {
        fail("root_system.series", e.what());
      }
      rs.rank = static_cast<int>(parse_int(require(*it, "rank", "root_system"), "root_system.rank"));
    }
    if (rs.rank != dim) fail("root_system", "rank " + std::to_string(rs.rank) + " does not match polytope dimension " + std::to_string(dim));
    s.root_system = rs;
  }

  if (auto it = j.find("f"); it != j.end()) {
    const json& pieces = require(*it, "pieces", "f");
    if (!pieces.is_array() || pieces.empty()) fail("f.pieces", "expected a nonempty array");
    std::vector<AffinePiece> out;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string w = at("f.pieces", i);
      out.push_back({parse_qvector(require(pieces[i], "a", w), w + ".a", dim),
                     parse_rational_field(require(pieces[i], "b", w), w + ".b")});
    }
    s.f = out;
  }
  if (auto it = j.find("R"); it != j.end()) s.R = parse_rational_field(*it, "R");
  if (auto it = j.find("h"); it != j.end()) s.h = parse_polynomial(*it, dim, "h");
  if (auto it = j.find("potential"); it != j.end()) {
    s.potential = parse_potential(*it);
    if (!s.potential->g.is_zero() && s.potential->g.nvars() != dim) fail("potential.g", "arity does not match polytope dimension");
  }

  if (auto it = j.find("options"); it != j.end()) {
    if (!it->is_object()) fail("options", "expected an object");
    for (const auto& [key, value] : it->items()) {
      const std::string w = "options." + key;
      if (key == "kset") {
        if (!value.is_array()) fail(w, "expected an array of positive integers");
        for (std::size_t i = 0; i < value.size(); ++i) {
          const auto k = parse_int(value[i], at(w, i));
          if (k <= 0) fail(at(w, i), "must be positive");
          s.options.kset.push_back(k);
        }
      } else if (key == "kmax") {
        s.options.kmax = parse_int(value, w);
      } else if (key == "A") {
        if (!value.is_string()) fail(w, "expected paper, csc or zero");
        s.options.a_preset = value.get<std::string>();
      } else if (key == "quad_depth") {
        s.options.quad_depth = static_cast<int>(parse_int(value, w));
      } else if (key == "quad_ratio") {
        s.options.quad_ratio = parse_rational_field(value, w);
      } else if (key == "tolerance") {
        if (value.is_number()) {
          s.options.tolerance = value.get<double>();
        } else if (value.is_string()) {
          try {
            s.options.tolerance = std::stod(value.get<std::string>());
          } catch (const std::exception&) {
            fail(w, "expected a number");
          }
        } else {
          fail(w, "expected a number");
        }
      } else {
        fail(w, "unknown option");
      }
    }
  }
  return s;
}

JobSpec parse_job_text(const std::string& text) { return parse_job(parse_text(text)); }

JobSpec load_job(const std::string& path) { return parse_job_text(read_file(path)); }

json to_json(const JobSpec& s) {
  json j;
  j["schema"] = kSchema;
  if (s.root_system) {
    if (s.root_system->cartan) {
      json rows = json::array();
      const ZMatrix& c = *s.root_system->cartan;
      for (Eigen::Index r = 0; r < c.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index q = 0; q < c.cols(); ++q) row.push_back(c(r, q));
        rows.push_back(row);
      }
      j["root_system"] = {{"cartan", rows}};
    } else {
      j["root_system"] = {{"series", to_string(*s.root_system->series)}, {"rank", s.root_system->rank}};
    }
  }
  if (!s.polytope.vertices.empty()) {
    json vs = json::array();
    for (const auto& v : s.polytope.vertices) vs.push_back(qvector_json(v));
    j["polytope"] = {{"vertices", vs}};
  } else {
    json hs = json::array();
    for (const auto& h : s.polytope.halfspaces) hs.push_back({{"normal", qvector_json(h.normal)}, {"offset", h.offset.str()}});
    j["polytope"] = {{"halfspaces", hs}};
  }
  if (s.f) {
    json pieces = json::array();
    for (const auto& p : *s.f) pieces.push_back({{"a", qvector_json(p.gradient)}, {"b", p.constant.str()}});
    j["f"] = {{"pieces", pieces}};
  }
  if (s.R) j["R"] = s.R->str();
  if (s.h) j["h"] = to_json(*s.h);
  if (s.potential) j["potential"] = to_json(*s.potential);
  json opts = json::object();
  if (!s.options.kset.empty()) opts["kset"] = s.options.kset;
  if (s.options.kmax) opts["kmax"] = *s.options.kmax;
  if (s.options.a_preset) opts["A"] = *s.options.a_preset;
  if (s.options.quad_depth) opts["quad_depth"] = *s.options.quad_depth;
  if (s.options.quad_ratio) opts["quad_ratio"] = s.options.quad_ratio->str();
  if (s.options.tolerance) opts["tolerance"] = format_double(*s.options.tolerance);
  if (!opts.empty()) j["options"] = opts;
  return j;
}

}  // namespace kstab
