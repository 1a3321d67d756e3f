#include "windlab/scenario.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace windlab {

namespace {

Vec vec_of(std::initializer_list<double> v) {
  Vec x(int64_t(v.size()));
  int64_t i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

std::vector<Vec> default_rays(int dim) {
  std::vector<Vec> rays;
  for (int k = 0; k < dim; ++k) {
    Vec e = Vec::Zero(dim);
    e[k] = 1.0;
    rays.push_back(e);
  }
  if (dim >= 2) rays.push_back(Vec::Ones(dim) / std::sqrt(double(dim)));
  return rays;
}

std::vector<Vec> default_tilts(int dim) {
  std::vector<Vec> tilts;
  for (int k = 0; k < dim; ++k) {
    Vec e = Vec::Zero(dim);
    e[k] = 1.0;
    tilts.push_back(e);
    tilts.push_back((-e).eval());
  }
  if (dim >= 2) tilts.push_back(Vec::Ones(dim));
  return tilts;
}

void finalize_defaults(Scenario& s) {
  if (s.mc.x0.size() != s.dim) s.mc.x0 = Vec::Zero(s.dim);
  if (s.rate.rays.empty()) s.rate.rays = default_rays(s.dim);
  if (s.rate.tilts.empty()) s.rate.tilts = default_tilts(s.dim);
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"S1", "S2", "S3", "S4", "flat-constant", "shear"};
}

bool is_builtin_scenario(const std::string& name) {
  for (const auto& n : builtin_scenario_names())
    if (n == name) return true;
  return false;
}

Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "S1") {
    s.dim = 1;
    s.resolution = {256, 1, 1};
    s.metric = MetricField::identity(1);
    s.drift = DriftField::constant(vec_of({0.3}));
    s.cbar = vec_of({0.3});
  } else if (name == "S2" || name == "shear") {
    s.dim = 2;
    s.resolution = {128, 128, 1};
    s.metric = MetricField::identity(2);
    // psi = -cos(2 pi y)/(2 pi) gives b = (0.2 + sin 2 pi y, 0)
    s.drift = DriftField::stream(vec_of({0.2, 0.0}),
                                 parse_expression("-cos(2*pi*y)/(2*pi)", 2));
  } else if (name == "S3") {
    s.dim = 2;
    s.resolution = {128, 128, 1};
    s.metric = MetricField::conformal(parse_expression("0.5*cos(2*pi*x)", 2));
    s.drift = DriftField::constant(Vec::Zero(2));
    s.cbar = Vec::Zero(2);
  } else if (name == "S4") {
    s.dim = 2;
    s.resolution = {128, 128, 1};
    s.metric = MetricField::conformal(parse_expression("0.5*cos(2*pi*x)", 2));
    s.drift = DriftField::sharp_closed(vec_of({0.4, 0.0}));
    s.cbar = vec_of({0.4, 0.0});
  } else if (name == "flat-constant") {
    s.dim = 2;
    s.resolution = {64, 64, 1};
    s.metric = MetricField::identity(2);
    s.drift = DriftField::constant(vec_of({0.2, 0.0}));
    s.cbar = vec_of({0.2, 0.0});
  } else {
    throw Error("unknown built-in scenario '" + name + "'");
  }
  finalize_defaults(s);
  return s;
}

// ---------------------------------------------------------------------------
// Config grammar: [section] headers and key = value lines, '#' comments.
// Call-style specs for metric and drift, e.g.
//   spec = conformal(phi="0.5*cos(2*pi*x)")
//   spec = stream(hbar=[0.2,0], psi="-cos(2*pi*y)/(2*pi)")
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
  std::string text;
  int line;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(msg, line, int(pos) + 1);
  }
  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
};

std::string parse_ident(Cursor& c) {
  c.skip_ws();
  size_t start = c.pos;
  while (c.pos < c.text.size() &&
         (std::isalnum(static_cast<unsigned char>(c.text[c.pos])) || c.text[c.pos] == '_'))
    ++c.pos;
  if (c.pos == start) c.fail("expected identifier");
  return c.text.substr(start, c.pos - start);
}

double parse_num(Cursor& c) {
  c.skip_ws();
  const char* begin = c.text.c_str() + c.pos;
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) c.fail("expected number");
  c.pos += size_t(end - begin);
  return v;
}

std::string parse_quoted(Cursor& c) {
  c.skip_ws();
  if (c.pos >= c.text.size() || c.text[c.pos] != '"') c.fail("expected quoted string");
  ++c.pos;
  size_t start = c.pos;
  while (c.pos < c.text.size() && c.text[c.pos] != '"') ++c.pos;
  if (c.pos >= c.text.size()) c.fail("unterminated string");
  std::string s = c.text.substr(start, c.pos - start);
  ++c.pos;
  return s;
}

Vec parse_vec(Cursor& c) {
  if (!c.eat('[')) c.fail("expected '['");
  std::vector<double> vals;
  if (!c.eat(']')) {
    do {
      vals.push_back(parse_num(c));
    } while (c.eat(','));
    if (!c.eat(']')) c.fail("expected ']'");
  }
  Vec v(int64_t(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[int64_t(i)] = vals[i];
  return v;
}

Mat parse_matrix(Cursor& c) {
  if (!c.eat('[')) c.fail("expected '[['");
  std::vector<Vec> rows;
  do {
    rows.push_back(parse_vec(c));
  } while (c.eat(','));
  if (!c.eat(']')) c.fail("expected ']'");
  Mat m(int64_t(rows.size()), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) c.fail("ragged matrix literal");
    m.row(int64_t(i)) = rows[i].transpose();
  }
  return m;
}

struct CallSpec {
  std::string name;
  std::map<std::string, std::string> strings;
  std::map<std::string, Vec> vectors;
  std::map<std::string, Mat> matrices;
  std::map<std::string, double> numbers;
  int line;
};

CallSpec parse_call(const std::string& value, int line) {
  Cursor c{value, line};
  CallSpec spec;
  spec.line = line;
  spec.name = parse_ident(c);
  if (!c.eat('(')) c.fail("expected '(' after spec name");
  if (!c.eat(')')) {
    do {
      std::string key = parse_ident(c);
      if (!c.eat('=')) c.fail("expected '=' after argument name");
      c.skip_ws();
      if (c.pos < c.text.size() && c.text[c.pos] == '"') {
        spec.strings[key] = parse_quoted(c);
      } else if (c.pos < c.text.size() && c.text[c.pos] == '[') {
        size_t save = c.pos;
        ++c.pos;
        c.skip_ws();
        bool is_matrix = c.pos < c.text.size() && c.text[c.pos] == '[';
        c.pos = save;
        if (is_matrix) spec.matrices[key] = parse_matrix(c);
        else spec.vectors[key] = parse_vec(c);
      } else {
        spec.numbers[key] = parse_num(c);
      }
    } while (c.eat(','));
    if (!c.eat(')')) c.fail("expected ')' or ','");
  }
  if (!c.done()) c.fail("unexpected trailing input after spec");
  return spec;
}

std::vector<Vec> parse_vec_list(const std::string& value, int line) {
  // "1,0 ; 0,1 ; 1,1"
  std::vector<Vec> out;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::vector<double> vals;
    std::stringstream ps(part);
    std::string tok;
    while (std::getline(ps, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (...) {
        throw ConfigError("malformed vector list entry '" + tok + "'", line, 1);
      }
    }
    if (!vals.empty()) {
      Vec v(int64_t(vals.size()));
      for (size_t i = 0; i < vals.size(); ++i) v[int64_t(i)] = vals[i];
      out.push_back(v);
    }
  }
  return out;
}

MetricField metric_from_spec(const CallSpec& spec, int dim) {
  if (spec.name == "flat") {
    auto it = spec.matrices.find("gram");
    if (it == spec.matrices.end())
      throw ConfigError("flat(...) needs gram=[[..]]", spec.line, 1);
    return MetricField::flat(it->second);
  }
  if (spec.name == "conformal") {
    auto it = spec.strings.find("phi");
    if (it == spec.strings.end())
      throw ConfigError("conformal(...) needs phi=\"expr\"", spec.line, 1);
    return MetricField::conformal(parse_expression(it->second, dim));
  }
  if (spec.name == "diag") {
    static const char* keys[3] = {"gxx", "gyy", "gzz"};
    std::vector<ExprPtr> gkk;
    for (int k = 0; k < dim; ++k) {
      auto it = spec.strings.find(keys[k]);
      if (it == spec.strings.end())
        throw ConfigError(std::string("diag(...) needs ") + keys[k] + "=\"expr\"", spec.line, 1);
      gkk.push_back(parse_expression(it->second, dim));
    }
    return MetricField::diagonal(std::move(gkk));
  }
  throw ConfigError("unknown metric spec '" + spec.name + "'", spec.line, 1);
}

DriftField drift_from_spec(const CallSpec& spec, int dim) {
  if (spec.name == "constant") {
    auto it = spec.vectors.find("v");
    if (it == spec.vectors.end()) throw ConfigError("constant(...) needs v=[..]", spec.line, 1);
    return DriftField::constant(it->second);
  }
  if (spec.name == "stream") {
    auto hv = spec.vectors.find("hbar");
    auto ps = spec.strings.find("psi");
    if (hv == spec.vectors.end() || ps == spec.strings.end())
      throw ConfigError("stream(...) needs hbar=[..] and psi=\"expr\"", spec.line, 1);
    return DriftField::stream(hv->second, parse_expression(ps->second, dim));
  }
  if (spec.name == "gradient") {
    auto it = spec.strings.find("V0");
    if (it == spec.strings.end()) throw ConfigError("gradient(...) needs V0=\"expr\"", spec.line, 1);
    return DriftField::gradient(parse_expression(it->second, dim));
  }
  if (spec.name == "sharp_closed") {
    auto it = spec.vectors.find("eta");
    if (it == spec.vectors.end())
      throw ConfigError("sharp_closed(...) needs eta=[..]", spec.line, 1);
    return DriftField::sharp_closed(it->second);
  }
  throw ConfigError("unknown drift spec '" + spec.name + "'", spec.line, 1);
}

}  // namespace

Scenario parse_scenario_config(const std::string& text, const std::string& name_hint) {
  Scenario s;
  s.name = name_hint;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::optional<CallSpec> metric_spec, drift_spec;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", lineno, int(b) + 1);
      section = line.substr(1, line.size() - 2);
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno, int(a) + 1);
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::string value = line.substr(eq + 1);
    size_t va = value.find_first_not_of(" \t");
    value = va == std::string::npos ? "" : value.substr(va);

    auto as_num = [&]() {
      try {
        return std::stod(value);
      } catch (...) {
        throw ConfigError("malformed number '" + value + "'", lineno, int(eq) + 2);
      }
    };

    if (section == "domain") {
      if (key == "dim") s.dim = int(as_num());
      else if (key == "resolution") {
        auto vals = parse_vec_list(value, lineno);
        if (vals.empty()) throw ConfigError("empty resolution", lineno, int(eq) + 2);
        const Vec& v = vals[0];
        for (int k = 0; k < int(v.size()) && k < 3; ++k) s.resolution[size_t(k)] = int(v[k]);
        for (int k = int(v.size()); k < 3; ++k) s.resolution[size_t(k)] = int(v[v.size() - 1]);
      } else throw ConfigError("unknown key '" + key + "' in [domain]", lineno, int(a) + 1);
    } else if (section == "metric") {
      if (key == "spec") metric_spec = parse_call(value, lineno);
      else throw ConfigError("unknown key '" + key + "' in [metric]", lineno, int(a) + 1);
    } else if (section == "drift") {
      if (key == "spec") drift_spec = parse_call(value, lineno);
      else throw ConfigError("unknown key '" + key + "' in [drift]", lineno, int(a) + 1);
    } else if (section == "solver") {
      if (key == "tol_scale") s.solver.tol_scale = as_num();
      else if (key == "c_max") s.solver.c_max = as_num();
      else if (key == "flag_tol") s.solver.flag_tol = as_num();
      else if (key == "threads") s.solver.threads = int(as_num());
      else throw ConfigError("unknown key '" + key + "' in [solver]", lineno, int(a) + 1);
    } else if (section == "mc") {
      if (key == "n_paths") s.mc.n_paths = int64_t(as_num());
      else if (key == "T") s.mc.T = as_num();
      else if (key == "dt") s.mc.dt = as_num();
      else if (key == "seed") s.mc.seed = uint64_t(as_num());
      else if (key == "hist_bins") s.mc.hist_bins = int(as_num());
      else if (key == "x0") {
        auto vals = parse_vec_list(value, lineno);
        if (!vals.empty()) s.mc.x0 = vals[0];
      } else throw ConfigError("unknown key '" + key + "' in [mc]", lineno, int(a) + 1);
    } else if (section == "rate") {
      if (key == "rays") s.rate.rays = parse_vec_list(value, lineno);
      else if (key == "tilts") s.rate.tilts = parse_vec_list(value, lineno);
      else if (key == "points") s.rate.points = int(as_num());
      else if (key == "h_max") s.rate.h_max = as_num();
      else throw ConfigError("unknown key '" + key + "' in [rate]", lineno, int(a) + 1);
    } else if (section == "scenario") {
      if (key == "name") s.name = value;
      else throw ConfigError("unknown key '" + key + "' in [scenario]", lineno, int(a) + 1);
    } else {
      throw ConfigError("unknown section '" + section + "'", lineno, 1);
    }
  }

  if (metric_spec) s.metric = metric_from_spec(*metric_spec, s.dim);
  else s.metric = MetricField::identity(s.dim);
  if (drift_spec) {
    s.drift = drift_from_spec(*drift_spec, s.dim);
    s.cbar = s.drift.closed_flat_class(s.metric, s.dim);
  } else {
    s.drift = DriftField::constant(Vec::Zero(s.dim));
    s.cbar = Vec::Zero(s.dim);
  }
  finalize_defaults(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str(), path);
}

Lab build_lab(const Scenario& scen) {
  Lab lab;
  lab.scenario = scen;
  lab.calc = std::make_unique<DiscreteCalculus>(scen.domain(), scen.metric);
  NodeVectorField b = scen.drift.sample(*lab.calc);
  lab.gen = assemble_generator(*lab.calc, b);
  lab.inv = invariant_measure(*lab.calc, lab.gen, lab.calc->nodes() <= 8192);
  lab.basis = build_harmonic_basis(*lab.calc, lab.gen, lab.inv);
  SpectralOptions opts;
  opts.c_max = scen.solver.c_max;
  lab.scgf = std::make_unique<ScgfSolver>(*lab.calc, lab.gen, opts);
  if (scen.cbar && scen.cbar->size() == scen.dim) {
    lab.cbar = *scen.cbar;
  } else {
    OneForm gb = lab.calc->flat(b);
    lab.cbar = lab.calc->loop_class(gb);
  }
  return lab;
}

}  // namespace windlab
