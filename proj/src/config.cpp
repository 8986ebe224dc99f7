#include "heatduct/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace heatduct {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

bool to_double(const std::string& w, double& out) {
  const char* b = w.data();
  const char* e = b + w.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && std::isfinite(out);
}

template <class Int>
bool to_int(const std::string& w, Int& out) {
  auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), out);
  return ec == std::errc() && p == w.data() + w.size();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A value parser returns an empty string on success, else the problem.
using Setter = std::function<std::string(const std::string&, RunConfig&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  std::string section;
  std::string name;
  bool required;
  Setter set;
  Getter get;
};

Setter real(double RunConfig::*field, const char* rule, std::function<bool(double)> ok) {
  return [=](const std::string& v, RunConfig& c) -> std::string {
    double x;
    if (!to_double(trim(v), x)) return "expected a number, got '" + trim(v) + "'";
    if (!ok(x)) return std::string("value ") + num(x) + " out of range (" + rule + ")";
    c.*field = x;
    return "";
  };
}

Setter solver_real(double SolverSettings::*field, const char* rule,
                   std::function<bool(double)> ok) {
  return [=](const std::string& v, RunConfig& c) -> std::string {
    double x;
    if (!to_double(trim(v), x)) return "expected a number, got '" + trim(v) + "'";
    if (!ok(x)) return std::string("value ") + num(x) + " out of range (" + rule + ")";
    c.solver.*field = x;
    return "";
  };
}

Setter solver_int(int SolverSettings::*field) {
  return [=](const std::string& v, RunConfig& c) -> std::string {
    int x;
    if (!to_int(trim(v), x)) return "expected an integer, got '" + trim(v) + "'";
    if (x < 1) return "value " + std::to_string(x) + " out of range (>= 1)";
    c.solver.*field = x;
    return "";
  };
}

Setter opt_real(std::optional<double> RunConfig::*field, const char* rule,
                std::function<bool(double)> ok) {
  return [=](const std::string& v, RunConfig& c) -> std::string {
    double x;
    if (!to_double(trim(v), x)) return "expected a number, got '" + trim(v) + "'";
    if (!ok(x)) return std::string("value ") + num(x) + " out of range (" + rule + ")";
    c.*field = x;
    return "";
  };
}

std::string triple_text(const std::array<int, 3>& d) {
  return std::to_string(d[0]) + " " + std::to_string(d[1]) + " " + std::to_string(d[2]);
}

std::string parse_triple(const std::string& v, std::array<int, 3>& out) {
  const auto w = words(v);
  if (w.size() != 3) return "expected three integers, got '" + trim(v) + "'";
  for (int i = 0; i < 3; ++i) {
    if (!to_int(w[i], out[i])) return "expected an integer, got '" + w[i] + "'";
    if (out[i] < 1) return "division count " + w[i] + " out of range (>= 1)";
  }
  return "";
}

std::string field_text(const FieldSpec& f) {
  std::string s = f.name;
  for (double p : f.params) s += " " + num(p);
  return s;
}

std::string parse_field(const std::string& v, FieldSpec& out, bool vector) {
  const auto w = words(v);
  if (w.empty()) return "expected a field name";
  static const std::map<std::string, std::size_t> vec_fields = {{"constant", 3}};
  static const std::map<std::string, std::size_t> scal_fields = {
      {"constant", 1}, {"linear", 4}, {"cosine_x", 2}};
  const auto& reg = vector ? vec_fields : scal_fields;
  const auto it = reg.find(w[0]);
  if (it == reg.end()) return "unknown field '" + w[0] + "'";
  if (w.size() - 1 != it->second)
    return "field '" + w[0] + "' takes " + std::to_string(it->second) + " parameter(s)";
  FieldSpec f;
  f.name = w[0];
  for (std::size_t i = 1; i < w.size(); ++i) {
    double x;
    if (!to_double(w[i], x)) return "expected a number, got '" + w[i] + "'";
    f.params.push_back(x);
  }
  out = f;
  return "";
}

const std::vector<std::string>& mms_cases() {
  static const std::vector<std::string> cases = {"stokes_trig",  "stokes_polynomial",
                                                 "heat_trig",    "heat_quadratic",
                                                 "heat_incompatible", "coupled"};
  return cases;
}

auto positive = [](double x) { return x > 0.0; };
auto nonneg = [](double x) { return x >= 0.0; };
auto anything = [](double) { return true; };

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"geometry", "dims", true,
       [](const std::string& v, RunConfig& c) -> std::string {
         const auto w = words(v);
         if (w.size() != 3) return "expected three lengths, got '" + trim(v) + "'";
         Vec3 d;
         for (int i = 0; i < 3; ++i) {
           if (!to_double(w[i], d[i])) return "expected a number, got '" + w[i] + "'";
           if (!(d[i] > 0.0)) return "length " + w[i] + " out of range (> 0)";
         }
         c.dims = d;
         return "";
       },
       [](const RunConfig& c) {
         return num(c.dims[0]) + " " + num(c.dims[1]) + " " + num(c.dims[2]);
       }},
      {"geometry", "divisions", true,
       [](const std::string& v, RunConfig& c) { return parse_triple(v, c.divisions); },
       [](const RunConfig& c) { return triple_text(c.divisions); }},
      {"geometry", "quad_order", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         int x;
         if (!to_int(trim(v), x)) return "expected an integer, got '" + trim(v) + "'";
         if (x < 3) return "quadrature order " + std::to_string(x) + " out of range (>= 3)";
         c.quad_order = x;
         return "";
       },
       [](const RunConfig& c) { return std::to_string(c.quad_order); }},

      {"material", "nu", true, real(&RunConfig::nu, "> 0", positive),
       [](const RunConfig& c) { return num(c.nu); }},
      {"material", "rho0", true, real(&RunConfig::rho0, "> 0", positive),
       [](const RunConfig& c) { return num(c.rho0); }},
      {"material", "cV", true, real(&RunConfig::cV, "> 0", positive),
       [](const RunConfig& c) { return num(c.cV); }},
      {"material", "lambda", true, real(&RunConfig::lambda, "> 0", positive),
       [](const RunConfig& c) { return num(c.lambda); }},
      {"material", "alpha1", false, real(&RunConfig::alpha1, ">= 0", nonneg),
       [](const RunConfig& c) { return num(c.alpha1); }},
      {"material", "density_law", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         try {
           c.density_law = density_law_from_string(trim(v));
         } catch (const std::exception&) {
           return "unknown density law '" + trim(v) + "'";
         }
         return "";
       },
       [](const RunConfig& c) { return to_string(c.density_law); }},
      {"material", "alpha_v", false, real(&RunConfig::alpha_v, "any", anything),
       [](const RunConfig& c) { return num(c.alpha_v); }},
      {"material", "theta_ref", false, real(&RunConfig::theta_ref, "any", anything),
       [](const RunConfig& c) { return num(c.theta_ref); }},
      {"material", "rho_min", false, opt_real(&RunConfig::rho_min, "> 0", positive),
       [](const RunConfig& c) { return c.rho_min ? num(*c.rho_min) : std::string(); }},
      {"material", "rho_sharp", false, opt_real(&RunConfig::rho_sharp, "> 0", positive),
       [](const RunConfig& c) { return c.rho_sharp ? num(*c.rho_sharp) : std::string(); }},
      {"material", "C_rho", false, opt_real(&RunConfig::C_rho, ">= 0", nonneg),
       [](const RunConfig& c) { return c.C_rho ? num(*c.C_rho) : std::string(); }},

      {"forcing", "g", true,
       [](const std::string& v, RunConfig& c) { return parse_field(v, c.g, true); },
       [](const RunConfig& c) { return field_text(c.g); }},
      {"forcing", "theta_D", false,
       [](const std::string& v, RunConfig& c) { return parse_field(v, c.theta_D, false); },
       [](const RunConfig& c) { return field_text(c.theta_D); }},

      {"solver", "inner_tol", false, solver_real(&SolverSettings::inner_tol, "> 0", positive),
       [](const RunConfig& c) { return num(c.solver.inner_tol); }},
      {"solver", "outer_tol", false, solver_real(&SolverSettings::outer_tol, "> 0", positive),
       [](const RunConfig& c) { return num(c.solver.outer_tol); }},
      {"solver", "linear_tol", false, solver_real(&SolverSettings::linear_tol, "> 0", positive),
       [](const RunConfig& c) { return num(c.solver.linear_tol); }},
      {"solver", "max_inner", false, solver_int(&SolverSettings::max_inner),
       [](const RunConfig& c) { return std::to_string(c.solver.max_inner); }},
      {"solver", "max_outer", false, solver_int(&SolverSettings::max_outer),
       [](const RunConfig& c) { return std::to_string(c.solver.max_outer); }},
      {"solver", "damping", false,
       solver_real(&SolverSettings::damping, "0 < damping <= 1",
                   [](double x) { return x > 0.0 && x <= 1.0; }),
       [](const RunConfig& c) { return num(c.solver.damping); }},

      {"certify", "samples", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         int x;
         if (!to_int(trim(v), x)) return "expected an integer, got '" + trim(v) + "'";
         if (x < 100) return "sample count " + std::to_string(x) + " out of range (>= 100)";
         c.samples = x;
         return "";
       },
       [](const RunConfig& c) { return std::to_string(c.samples); }},
      {"certify", "s", false,
       real(&RunConfig::s, "4/3 <= s < s0",
            [](double x) { return x >= 4.0 / 3.0 && x < default_regularity_bounds().s0; }),
       [](const RunConfig& c) { return num(c.s); }},
      {"certify", "r", false,
       real(&RunConfig::r, "3/2 < r < s0",
            [](double x) { return x > 1.5 && x < default_regularity_bounds().s0; }),
       [](const RunConfig& c) { return num(c.r); }},

      {"spectrum", "re_min", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         double x;
         if (!to_double(trim(v), x)) return "expected a number, got '" + trim(v) + "'";
         c.spectrum.strip.re_min = x;
         return "";
       },
       [](const RunConfig& c) { return num(c.spectrum.strip.re_min); }},
      {"spectrum", "re_max", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         double x;
         if (!to_double(trim(v), x)) return "expected a number, got '" + trim(v) + "'";
         c.spectrum.strip.re_max = x;
         return "";
       },
       [](const RunConfig& c) { return num(c.spectrum.strip.re_max); }},
      {"spectrum", "im_max", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         double x;
         if (!to_double(trim(v), x)) return "expected a number, got '" + trim(v) + "'";
         if (x < 0.0) return "value " + num(x) + " out of range (>= 0)";
         c.spectrum.strip.im_max = x;
         return "";
       },
       [](const RunConfig& c) { return num(c.spectrum.strip.im_max); }},
      {"spectrum", "k_max", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         int x;
         if (!to_int(trim(v), x)) return "expected an integer, got '" + trim(v) + "'";
         if (x < 0) return "value " + std::to_string(x) + " out of range (>= 0)";
         c.spectrum.k_max = x;
         return "";
       },
       [](const RunConfig& c) { return std::to_string(c.spectrum.k_max); }},
      {"spectrum", "tol", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         double x;
         if (!to_double(trim(v), x)) return "expected a number, got '" + trim(v) + "'";
         if (!(x > 0.0)) return "value " + num(x) + " out of range (> 0)";
         c.spectrum.tol = x;
         return "";
       },
       [](const RunConfig& c) { return num(c.spectrum.tol); }},
      {"spectrum", "csv_grid", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         const auto w = words(v);
         int a, b;
         if (w.size() != 2 || !to_int(w[0], a) || !to_int(w[1], b))
           return "expected two integers, got '" + trim(v) + "'";
         if (a < 0 || b < 0) return "grid size out of range (>= 0)";
         c.csv_nre = a;
         c.csv_nim = b;
         return "";
       },
       [](const RunConfig& c) { return std::to_string(c.csv_nre) + " " + std::to_string(c.csv_nim); }},

      {"mms", "case", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         const auto name = trim(v);
         for (const auto& k : mms_cases())
           if (k == name) {
             c.mms_case = name;
             return "";
           }
         return "unknown manufactured case '" + name + "'";
       },
       [](const RunConfig& c) { return c.mms_case; }},
      {"mms", "levels", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         std::vector<std::array<int, 3>> levels;
         std::istringstream is(v);
         for (std::string part; std::getline(is, part, ';');) {
           std::array<int, 3> d{};
           if (auto err = parse_triple(part, d); !err.empty()) return err;
           levels.push_back(d);
         }
         if (levels.empty()) return "expected at least one level";
         c.mms_levels = levels;
         return "";
       },
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.mms_levels.size(); ++i)
           s += (i ? "; " : "") + triple_text(c.mms_levels[i]);
         return s;
       }},
      {"mms", "amplitude", false, real(&RunConfig::mms_amplitude, ">= 0", nonneg),
       [](const RunConfig& c) { return num(c.mms_amplitude); }},

      {"output", "dir", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         if (trim(v).empty()) return "output directory must not be empty";
         c.out_dir = trim(v);
         return "";
       },
       [](const RunConfig& c) { return c.out_dir; }},
      {"output", "seed", false,
       [](const std::string& v, RunConfig& c) -> std::string {
         std::uint64_t x;
         if (!to_int(trim(v), x)) return "expected a nonnegative integer, got '" + trim(v) + "'";
         c.seed = x;
         return "";
       },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += e + "\n";
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error("invalid configuration:\n" + join(errs)), errors(std::move(errs)) {}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::vector<std::string> errors;
  std::map<std::pair<std::string, std::string>, int> seen;
  std::set<std::string> sections;
  for (const auto& k : keys()) sections.insert(k.section);

  std::istringstream is(text);
  std::string section;
  int line_no = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header '" + line + "'");
        section.clear();
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) {
        errors.push_back(where + "unknown section [" + section + "]");
        section = "?";
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "?") continue;
    if (section.empty()) {
      errors.push_back(where + "key '" + key + "' outside any section");
      continue;
    }
    const Key* match = nullptr;
    for (const auto& k : keys())
      if (k.section == section && k.name == key) match = &k;
    if (!match) {
      errors.push_back(where + "unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    auto [it, fresh] = seen.emplace(std::make_pair(section, key), line_no);
    if (!fresh) {
      errors.push_back(where + "duplicate key '" + key + "' (first set on line " +
                       std::to_string(it->second) + ")");
      continue;
    }
    if (auto err = match->set(value, c); !err.empty())
      errors.push_back(where + key + ": " + err);
  }

  for (const auto& k : keys())
    if (k.required && !seen.count({k.section, k.name}))
      errors.push_back("missing required key '" + k.name + "' in [" + k.section + "]");

  auto line_of = [&](const char* sec, const char* key) {
    const auto it = seen.find({sec, key});
    return it == seen.end() ? std::string() : "line " + std::to_string(it->second) + ": ";
  };
  if (c.rho_min && *c.rho_min > c.rho0)
    errors.push_back(line_of("material", "rho_min") + "rho_min must not exceed rho0");
  if (c.rho_sharp && *c.rho_sharp < c.rho0 &&
      c.density_law != DensityLawKind::Linear)
    errors.push_back(line_of("material", "rho_sharp") + "rho_sharp must be at least rho0");
  if (!(c.spectrum.strip.re_min < c.spectrum.strip.re_max))
    errors.push_back(line_of("spectrum", "re_max") + "re_min must be below re_max");
  if (c.s < 3.0 && c.r > 3.0 * c.s / (2.0 * (3.0 - c.s)))
    errors.push_back(line_of("certify", "r") + "r exceeds 3s/(2(3-s)) for the given s");

  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& config) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    const auto value = k.get(config);
    if (value.empty()) continue;
    if (k.section != section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.name << " = " << value << '\n';
  }
  return os.str();
}

MaterialModel material_from(const RunConfig& c) {
  MaterialModel m;
  m.nu = c.nu;
  m.rho0 = c.rho0;
  m.cV = c.cV;
  m.lambda = c.lambda;
  m.alpha1 = c.alpha1;
  m.rho_law.kind = c.density_law;
  m.rho_law.alpha_v = c.alpha_v;
  m.rho_law.theta_ref = c.theta_ref;
  m.rho_law.rho_min = c.rho_min.value_or(0.5 * c.rho0);
  m.rho_sharp = c.rho_sharp.value_or(c.rho0);
  m.C_rho = c.C_rho.value_or(c.density_law == DensityLawKind::Constant
                                 ? 0.0
                                 : c.rho0 * std::abs(c.alpha_v));
  return m;
}

VectorFn make_vector_field(const FieldSpec& spec) {
  if (spec.name == "constant" && spec.params.size() == 3) {
    const Vec3 v{spec.params[0], spec.params[1], spec.params[2]};
    return [v](const Vec3&) { return v; };
  }
  throw std::invalid_argument("unknown vector field '" + spec.name + "'");
}

ScalarFn make_scalar_field(const FieldSpec& spec, const Vec3& dims) {
  const auto& p = spec.params;
  if (spec.name == "constant" && p.size() == 1) {
    const double c = p[0];
    return [c](const Vec3&) { return c; };
  }
  if (spec.name == "linear" && p.size() == 4) {
    const double c0 = p[0], cx = p[1], cy = p[2], cz = p[3];
    return [=](const Vec3& x) { return c0 + cx * x[0] + cy * x[1] + cz * x[2]; };
  }
  if (spec.name == "cosine_x" && p.size() == 2) {
    const double c0 = p[0], amp = p[1], k = std::numbers::pi / dims[0];
    return [=](const Vec3& x) { return c0 + amp * std::cos(k * x[0]); };
  }
  throw std::invalid_argument("unknown scalar field '" + spec.name + "'");
}

Problem problem_from(const RunConfig& c) {
  Problem p;
  p.material = material_from(c);
  p.g = make_vector_field(c.g);
  p.theta_D = make_scalar_field(c.theta_D, c.dims);
  p.settings = c.solver;
  return p;
}

}  // namespace heatduct
