#include "abc_rods/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

namespace abc_rods {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("'" + s + "' is not a number");
  }
  if (pos != s.size()) throw InputError("'" + s + "' is not a number");
  return v;
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v)) throw InputError("'" + s + "' is not an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InputError("'" + s + "' is not a boolean");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

Vec3 to_vec3(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw InputError("'" + s + "' is not a 3-vector");
  return {to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
}

std::string vec_str(const Vec3& v) { return num(v.x()) + "," + num(v.y()) + "," + num(v.z()); }

TimeProfile to_profile(const std::string& s) {
  TimeProfile p;
  for (const auto& item : split(s, ',')) {
    const auto tv = split(item, ':');
    if (tv.size() != 2) throw InputError("profile entry '" + item + "' must be t:value");
    p.points.emplace_back(to_double(tv[0]), to_double(tv[1]));
  }
  for (size_t i = 1; i < p.points.size(); ++i)
    if (!(p.points[i].first > p.points[i - 1].first)) throw InputError("profile times must increase");
  return p;
}

std::string profile_str(const TimeProfile& p) {
  std::vector<std::string> items;
  for (const auto& [t, v] : p.points) items.push_back(num(t) + ":" + num(v));
  return items.empty() ? "0:0" : join(items, ",");
}

// "key=value key=value" tokens.
std::map<std::string, std::string> tokens(const std::string& s) {
  std::map<std::string, std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw InputError("expected key=value, got '" + tok + "'");
    if (!out.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second)
      throw InputError("duplicate attribute '" + tok.substr(0, eq) + "'");
  }
  return out;
}

void expect_only(const std::map<std::string, std::string>& t, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : t) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw InputError("unknown attribute '" + k + "'");
  }
}

const std::string& require(const std::map<std::string, std::string>& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) throw InputError("missing attribute '" + key + "'");
  return it->second;
}

template <class E>
struct EnumName {
  E value;
  const char* name;
};

template <class E, size_t N>
E to_enum(const std::string& s, const EnumName<E> (&names)[N]) {
  for (const auto& n : names)
    if (s == n.name) return n.value;
  std::vector<std::string> opts;
  for (const auto& n : names) opts.push_back(n.name);
  throw InputError("'" + s + "' is not one of " + join(opts, "|"));
}

template <class E, size_t N>
std::string enum_str(E v, const EnumName<E> (&names)[N]) {
  for (const auto& n : names)
    if (v == n.value) return n.name;
  return "?";
}

const EnumName<PenaltyVariant> kLaws[] = {{PenaltyVariant::linear, "linear"},
                                          {PenaltyVariant::quad_regularized, "quadratic"}};
const EnumName<TransitionVariant> kVariants[] = {{TransitionVariant::force_based, "force_based"},
                                                 {TransitionVariant::potential_based, "potential_based"}};
const EnumName<ContactMode> kModes[] = {
    {ContactMode::abc, "abc"}, {ContactMode::point_only, "point_only"}, {ContactMode::line_only, "line_only"}};
const EnumName<AxialTreatment> kAxial[] = {{AxialTreatment::standard, "standard"}, {AxialTreatment::mcs, "mcs"}};
const EnumName<MidAveraging> kAveraging[] = {{MidAveraging::configuration, "configuration"},
                                             {MidAveraging::forces, "forces"}};
const EnumName<PathShape> kShapes[] = {
    {PathShape::linear, "linear"}, {PathShape::sine, "sine"}, {PathShape::one_minus_cosine, "one_minus_cosine"}};

struct ScalarKey {
  const char* section;
  const char* key;
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

#define ABC_DOUBLE(sec, name, field)                                               \
  ScalarKey {                                                                      \
    sec, name, [](Scenario& s, const std::string& v) { s.field = to_double(v); }, \
        [](const Scenario& s) { return num(s.field); }                            \
  }
#define ABC_INT(sec, name, field)                                               \
  ScalarKey {                                                                   \
    sec, name, [](Scenario& s, const std::string& v) { s.field = to_int(v); }, \
        [](const Scenario& s) { return std::to_string(s.field); }              \
  }
#define ABC_BOOL(sec, name, field)                                               \
  ScalarKey {                                                                    \
    sec, name, [](Scenario& s, const std::string& v) { s.field = to_bool(v); }, \
        [](const Scenario& s) { return bool_str(s.field); }                     \
  }
#define ABC_ENUM(sec, name, field, table)                                                 \
  ScalarKey {                                                                             \
    sec, name, [](Scenario& s, const std::string& v) { s.field = to_enum(v, table); },   \
        [](const Scenario& s) { return enum_str(s.field, table); }                       \
  }

const std::vector<ScalarKey>& scalar_keys() {
  static const std::vector<ScalarKey> keys = {
      ScalarKey{"scenario", "name", [](Scenario& s, const std::string& v) { s.name = v; },
                [](const Scenario& s) { return s.name; }},
      ABC_BOOL("contact", "enabled", contact.enabled),
      ABC_ENUM("contact", "law", contact.settings.law_variant, kLaws),
      ABC_DOUBLE("contact", "g_bar", contact.settings.g_bar),
      ABC_ENUM("contact", "variant", contact.settings.transition.variant, kVariants),
      ABC_ENUM("contact", "mode", contact.settings.mode, kModes),
      ABC_DOUBLE("contact", "alpha1", contact.settings.transition.alpha1),
      ABC_DOUBLE("contact", "alpha2", contact.settings.transition.alpha2),
      ABC_DOUBLE("contact", "eps_perp", contact.settings.transition.eps_perp),
      ABC_DOUBLE("contact", "eps_par", contact.settings.transition.eps_par),
      ABC_INT("contact", "n_ii", contact.settings.n_ii),
      ABC_INT("contact", "n_gr", contact.settings.n_gr),
      ABC_DOUBLE("contact", "cpp_tol", contact.settings.cpp.tol),
      ABC_INT("contact", "cpp_max_iter", contact.settings.cpp.max_iter),
      ABC_DOUBLE("contact", "k_rs", contact.search.k_rs),
      ABC_DOUBLE("contact", "k_cyl", contact.search.k_cyl),
      ABC_DOUBLE("contact", "beta_max", contact.search.beta_max_deg),
      ABC_INT("contact", "max_segments", contact.search.max_segments),
      ABC_INT("contact", "leaf_capacity", contact.search.leaf_capacity),
      ABC_INT("contact", "max_depth", contact.search.max_depth),
      ABC_BOOL("solver", "dynamic", solver.dynamic),
      ABC_DOUBLE("solver", "dt", solver.dt),
      ABC_DOUBLE("solver", "t_end", solver.t_end),
      ABC_DOUBLE("solver", "dt_min", solver.dt_min),
      ABC_DOUBLE("solver", "tol_R", solver.tol_R),
      ABC_DOUBLE("solver", "tol_D", solver.tol_D),
      ABC_INT("solver", "max_newton", solver.max_newton),
      ABC_DOUBLE("solver", "r_cap", solver.r_cap),
      ABC_BOOL("solver", "step_size_control", solver.step_size_control),
      ABC_BOOL("solver", "penetration_guard", solver.penetration_guard),
      ABC_DOUBLE("solver", "k_pen", solver.k_pen),
      ABC_DOUBLE("solver", "alpha_f", solver.genalpha.alpha_f),
      ABC_DOUBLE("solver", "alpha_m", solver.genalpha.alpha_m),
      ABC_DOUBLE("solver", "beta", solver.genalpha.beta),
      ABC_DOUBLE("solver", "gamma", solver.genalpha.gamma),
      ScalarKey{"solver", "rho",
                [](Scenario& s, const std::string& v) {
                  const auto avg = s.solver.genalpha.averaging;
                  s.solver.genalpha = GenAlphaParams::from_spectral_radius(to_double(v));
                  s.solver.genalpha.averaging = avg;
                },
                nullptr},
      ABC_ENUM("solver", "averaging", solver.genalpha.averaging, kAveraging),
      ABC_INT("solver", "redouble_after", solver.redouble_after),
      ABC_ENUM("solver", "axial", solver.axial, kAxial),
      ABC_INT("solver", "gauss_points", solver.element_gauss_points),
      ABC_INT("solver", "threads", solver.threads),
      ABC_BOOL("output", "csv", output.csv),
      ABC_BOOL("output", "vtk", output.vtk),
      ABC_INT("output", "vtk_every", output.vtk_every),
  };
  return keys;
}

#undef ABC_DOUBLE
#undef ABC_INT
#undef ABC_BOOL
#undef ABC_ENUM

const ScalarKey* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : scalar_keys())
    if (section == k.section && key == k.key) return &k;
  return nullptr;
}

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

int resolve_node(const std::string& tok, const std::vector<FiberSpec>& fibers) {
  if (!tok.empty() && tok[0] == 'f') {
    const auto dot = tok.find('.');
    if (dot == std::string::npos) throw InputError("node reference '" + tok + "' must be fK.start or fK.end");
    const int f = to_int(tok.substr(1, dot - 1));
    if (f < 0 || f >= static_cast<int>(fibers.size())) throw InputError("fiber " + std::to_string(f) + " does not exist");
    int first = 0;
    for (int i = 0; i < f; ++i)
      first += (fibers[i].straight ? fibers[i].elements : static_cast<int>(fibers[i].lengths.size())) + 1;
    const int n_el = fibers[f].straight ? fibers[f].elements : static_cast<int>(fibers[f].lengths.size());
    const std::string where = tok.substr(dot + 1);
    if (where == "start") return first;
    if (where == "end") return first + n_el;
    if (where.rfind("node", 0) == 0) {
      const int k = to_int(where.substr(4));
      if (k < 0 || k > n_el) throw InputError("node index out of range in '" + tok + "'");
      return first + k;
    }
    throw InputError("node reference '" + tok + "' must be fK.start, fK.end or fK.nodeI");
  }
  return to_int(tok);
}

FiberSpec parse_fiber(const std::string& value) {
  const auto t = tokens(value);
  FiberSpec f;
  if (t.count("section")) f.section = t.at("section");
  if (t.count("nodes")) {
    expect_only(t, {"section", "nodes", "lengths"});
    f.straight = false;
    for (const auto& n : split(t.at("nodes"), ';')) {
      const auto c = split(n, ',');
      if (c.size() != 6) throw InputError("fiber node '" + n + "' needs 6 values (position, tangent)");
      f.nodes.push_back({Vec3(to_double(c[0]), to_double(c[1]), to_double(c[2])),
                         Vec3(to_double(c[3]), to_double(c[4]), to_double(c[5]))});
    }
    for (const auto& l : split(require(t, "lengths"), ';')) f.lengths.push_back(to_double(l));
    if (f.lengths.size() + 1 != f.nodes.size()) throw InputError("fiber needs one length per element");
  } else {
    expect_only(t, {"section", "from", "to", "elements"});
    f.from = to_vec3(require(t, "from"));
    f.to = to_vec3(require(t, "to"));
    f.elements = to_int(require(t, "elements"));
    if (f.elements < 1) throw InputError("fiber needs at least one element");
  }
  return f;
}

SectionSpec parse_section(const std::string& value) {
  const auto t = tokens(value);
  expect_only(t, {"name", "radius", "youngs", "density", "area_scale", "inertia_scale"});
  SectionSpec s;
  s.name = require(t, "name");
  s.radius = to_double(require(t, "radius"));
  s.youngs_modulus = to_double(require(t, "youngs"));
  s.density = to_double(require(t, "density"));
  if (t.count("area_scale")) s.area_scale = to_double(t.at("area_scale"));
  if (t.count("inertia_scale")) s.inertia_scale = to_double(t.at("inertia_scale"));
  return s;
}

void parse_load(Scenario& s, const Entry& e) {
  const auto t = tokens(e.value);
  if (e.key == "line") {
    expect_only(t, {"fiber", "value", "linear", "profile"});
    LineLoad l;
    l.fiber = to_int(require(t, "fiber"));
    l.value = to_vec3(require(t, "value"));
    if (t.count("linear")) l.linear_in_coordinate = to_bool(t.at("linear"));
    if (t.count("profile")) l.profile = to_profile(t.at("profile"));
    s.line_loads.push_back(l);
  } else if (e.key == "nodal") {
    expect_only(t, {"node", "force", "moment", "profile"});
    NodalLoad l;
    l.node = resolve_node(require(t, "node"), s.fibers);
    if (t.count("force")) l.force = to_vec3(t.at("force"));
    if (t.count("moment")) l.moment = to_vec3(t.at("moment"));
    if (t.count("profile")) l.profile = to_profile(t.at("profile"));
    s.nodal_loads.push_back(l);
  } else if (e.key == "dirichlet") {
    expect_only(t, {"node", "components", "amplitude", "profile", "shape"});
    const int node = resolve_node(require(t, "node"), s.fibers);
    for (const auto& c : split(require(t, "components"), ',')) {
      Prescription p;
      p.node = node;
      p.component = to_int(c);
      if (t.count("amplitude")) p.amplitude = to_double(t.at("amplitude"));
      if (t.count("profile")) p.profile = to_profile(t.at("profile"));
      if (t.count("shape")) p.shape = to_enum(t.at("shape"), kShapes);
      s.dirichlet.push_back(p);
    }
  } else {
    throw InputError("unknown key 'loads." + e.key + "'");
  }
}

}  // namespace

ParseError::ParseError(std::vector<std::string> items)
    : InputError("scenario errors:\n  " + join(items, "\n  ")), items_(std::move(items)) {}

BeamSection SectionSpec::section() const {
  BeamSection b = BeamSection::circular(radius, youngs_modulus, density);
  b.area *= area_scale;
  b.inertia *= inertia_scale;
  return b;
}

Model Scenario::build_model() const {
  Model m;
  std::map<std::string, int> ids;
  for (const auto& s : sections) ids[s.name] = m.mesh.add_section(s.section());
  for (const auto& f : fibers) {
    auto it = ids.find(f.section);
    if (it == ids.end()) throw InputError("fiber references unknown section '" + f.section + "'");
    if (f.straight)
      m.mesh.add_straight_fiber(f.from, f.to, f.elements, it->second);
    else
      m.mesh.add_fiber(f.nodes, f.lengths, it->second);
  }
  m.line_loads = line_loads;
  m.nodal_loads = nodal_loads;
  m.dirichlet = dirichlet;
  m.validate();
  return m;
}

void Scenario::validate() const {
  std::vector<std::string> names;
  for (const auto& s : sections) {
    if (std::find(names.begin(), names.end(), s.name) != names.end())
      throw InputError("section '" + s.name + "' defined twice");
    names.push_back(s.name);
    s.section().validate();
  }
  if (fibers.empty()) throw InputError("scenario defines no fibers");
  if (contact.enabled) contact.settings.validate();
  solver.validate();
  if (output.vtk_every < 1) throw InputError("output.vtk_every must be at least 1");
  build_model();
}

Scenario parse_scenario(const std::string& text) {
  std::vector<std::string> errors;
  std::map<std::string, std::vector<Entry>> entries;
  const std::vector<std::string> known = {"scenario", "section", "mesh", "contact", "solver", "loads", "output"};
  std::string current;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      current = trim(line.substr(1, line.size() - 2));
      if (std::find(known.begin(), known.end(), current) == known.end())
        errors.push_back("line " + std::to_string(line_no) + ": unknown section [" + current + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    if (current.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": key outside of a section");
      continue;
    }
    entries[current].push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
  }

  Scenario s;
  std::map<std::string, int> key_line;
  auto guarded = [&](const Entry& e, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& ex) {
      errors.push_back("line " + std::to_string(e.line) + ": " + ex.what());
    }
  };
  bool sections_seen = false;
  for (const auto& e : entries["section"])
    guarded(e, [&] {
      if (e.key != "define") throw InputError("unknown key 'section." + e.key + "'");
      if (!sections_seen) s.sections.clear();
      sections_seen = true;
      s.sections.push_back(parse_section(e.value));
    });
  for (const auto& e : entries["mesh"])
    guarded(e, [&] {
      if (e.key != "fiber") throw InputError("unknown key 'mesh." + e.key + "'");
      s.fibers.push_back(parse_fiber(e.value));
    });
  for (const char* sec : {"scenario", "contact", "solver", "output"})
    for (const auto& e : entries[sec])
      guarded(e, [&] {
        const ScalarKey* k = find_key(sec, e.key);
        if (!k) throw InputError(std::string("unknown key '") + sec + "." + e.key + "'");
        if (key_line.count(std::string(sec) + "." + e.key))
          throw InputError(std::string("key '") + sec + "." + e.key + "' given twice");
        k->set(s, e.value);
        key_line[std::string(sec) + "." + e.key] = e.line;
      });
  for (const auto& e : entries["loads"]) guarded(e, [&] { parse_load(s, e); });

  // Named-field checks that carry line numbers.
  const auto& tr = s.contact.settings.transition;
  if (!(tr.alpha2 > tr.alpha1)) {
    const int l = key_line.count("contact.alpha2") ? key_line["contact.alpha2"] : key_line["contact.alpha1"];
    errors.push_back("line " + std::to_string(l) + ": contact.alpha2 (" + num(tr.alpha2) +
                     ") must be greater than contact.alpha1 (" + num(tr.alpha1) + ")");
  }
  if (errors.empty()) {
    try {
      s.validate();
    } catch (const std::exception& ex) {
      errors.push_back(ex.what());
    }
  }
  auto line_of = [](const std::string& m) {
    return m.rfind("line ", 0) == 0 ? std::atoi(m.c_str() + 5) : std::numeric_limits<int>::max();
  };
  std::stable_sort(errors.begin(), errors.end(),
                   [&](const std::string& a, const std::string& b) { return line_of(a) < line_of(b); });
  if (!errors.empty()) throw ParseError(errors);
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  std::string current;
  auto header = [&](const std::string& sec) {
    if (current != sec) {
      os << (current.empty() ? "" : "\n") << "[" << sec << "]\n";
      current = sec;
    }
  };
  header("scenario");
  os << "name = " << s.name << "\n";
  header("section");
  for (const auto& sec : s.sections)
    os << "define = name=" << sec.name << " radius=" << num(sec.radius) << " youngs=" << num(sec.youngs_modulus)
       << " density=" << num(sec.density) << " area_scale=" << num(sec.area_scale)
       << " inertia_scale=" << num(sec.inertia_scale) << "\n";
  header("mesh");
  for (const auto& f : s.fibers) {
    os << "fiber = section=" << f.section;
    if (f.straight) {
      os << " from=" << vec_str(f.from) << " to=" << vec_str(f.to) << " elements=" << f.elements << "\n";
    } else {
      std::vector<std::string> nodes;
      for (const auto& n : f.nodes) nodes.push_back(vec_str(n.position) + "," + vec_str(n.tangent));
      std::vector<std::string> lengths;
      for (double l : f.lengths) lengths.push_back(num(l));
      os << " nodes=" << join(nodes, ";") << " lengths=" << join(lengths, ";") << "\n";
    }
  }
  for (const char* sec : {"contact", "solver", "output"})
    for (const auto& k : scalar_keys()) {
      if (std::string(k.section) != sec || !k.get) continue;
      header(sec);
      os << k.key << " = " << k.get(s) << "\n";
    }
  header("loads");
  for (const auto& l : s.line_loads)
    os << "line = fiber=" << l.fiber << " value=" << vec_str(l.value) << " linear=" << bool_str(l.linear_in_coordinate)
       << " profile=" << profile_str(l.profile) << "\n";
  for (const auto& l : s.nodal_loads)
    os << "nodal = node=" << l.node << " force=" << vec_str(l.force) << " moment=" << vec_str(l.moment)
       << " profile=" << profile_str(l.profile) << "\n";
  for (const auto& p : s.dirichlet)
    os << "dirichlet = node=" << p.node << " components=" << p.component << " amplitude=" << num(p.amplitude)
       << " profile=" << profile_str(p.profile) << " shape=" << to_string(p.shape) << "\n";
  return os.str();
}

void apply_override(Scenario& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw InputError("override '" + assignment + "' must look like section.key=value");
  const std::string sec = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const ScalarKey* k = find_key(sec, key);
  if (!k) throw InputError("unknown override key '" + sec + "." + key + "'");
  k->set(s, trim(assignment.substr(eq + 1)));
  if (sec == "contact" && !(s.contact.settings.transition.alpha2 > s.contact.settings.transition.alpha1))
    throw InputError("contact.alpha2 must be greater than contact.alpha1");
  s.validate();
}

namespace {

Scenario example1_arc() {
  Scenario s;
  s.name = "example1_arc";
  const double r = 0.01;
  s.sections = {{"arc", r, 1.0e9, 1.0, 0.01, 1.0}, {"beam", r, 1.0e9, 1.0, 0.01, 1.0}};
  // Rigid half-circle arc of radius 1 in the xz-plane, one element.
  FiberSpec arc;
  arc.section = "arc";
  arc.straight = false;
  const double t = 4.0 / kPi;
  arc.nodes = {{Vec3(1, 0, 0), Vec3(0, 0, t)}, {Vec3(-1, 0, 0), Vec3(0, 0, -t)}};
  arc.lengths = {kPi};
  FiberSpec beam;
  beam.section = "beam";
  const double z0 = 1.0 + 2.0 * r + 0.06;
  beam.from = Vec3(0, -1, z0);
  beam.to = Vec3(0, 1, z0);
  beam.elements = 3;
  s.fibers = {arc, beam};
  for (int node : {0, 1})
    for (int c = 0; c < 6; ++c) s.dirichlet.push_back({node, c, 0.0, {}, PathShape::linear});
  // Descent over t in [0, 100], quarter rotation over t in [100, 500].
  const TimeProfile descent = TimeProfile::ramp(0.0, 100.0);
  const TimeProfile theta{{{100.0, 0.0}, {500.0, 0.5 * kPi}}};
  const int left = 2;
  const int right = 5;
  const double half = 1.0;
  s.dirichlet.push_back({left, 0, half, theta, PathShape::sine});
  s.dirichlet.push_back({left, 1, half, theta, PathShape::one_minus_cosine});
  s.dirichlet.push_back({left, 2, -0.3, descent, PathShape::linear});
  s.dirichlet.push_back({right, 0, -half, theta, PathShape::sine});
  s.dirichlet.push_back({right, 1, -half, theta, PathShape::one_minus_cosine});
  s.dirichlet.push_back({right, 2, -0.3, descent, PathShape::linear});
  auto& c = s.contact;
  c.settings.law_variant = PenaltyVariant::quad_regularized;
  c.settings.g_bar = 0.1 * r;
  c.settings.transition.alpha1 = 10.0;
  c.settings.transition.alpha2 = 30.0;
  c.settings.transition.eps_par = 5.0e5;
  c.settings.transition.eps_perp = 2.0e4;
  c.settings.n_ii = 100;
  c.settings.n_gr = 5;
  c.search.max_segments = 128;
  // Pure line contact at large angles penetrates deeply with the low penalty level.
  s.solver.k_pen = 1.0;
  s.solver.dt = 1.0;
  s.solver.t_end = 500.0;
  s.solver.tol_R = 1e-7;
  s.solver.tol_D = 1e-9;
  return s;
}

Scenario example2_impact() {
  Scenario s;
  s.name = "example2_impact";
  const double r = 0.01;
  s.sections = {{"slave", r, 1.0e-6, 0.1, 0.01, 1.0}, {"master", r, 1.0e-6, 0.05, 0.01, 1.0}};
  FiberSpec b1;
  b1.section = "slave";
  b1.from = Vec3(-1, 0, 0);
  b1.to = Vec3(1, 0, 0);
  b1.elements = 8;
  FiberSpec b2 = b1;
  b2.section = "master";
  b2.from = Vec3(-1, 0, 10.0 * r);
  b2.to = Vec3(1, 0, 10.0 * r);
  s.fibers = {b1, b2};
  s.line_loads.push_back({1, Vec3(0, 0, -5.0e-7), false, TimeProfile::hat(0.0, 0.03, 0.06)});
  s.line_loads.push_back({0, Vec3(0, 2.5e-6, 0), true, TimeProfile::hat(0.0, 0.02, 0.04)});
  auto& c = s.contact;
  c.settings.law_variant = PenaltyVariant::quad_regularized;
  c.settings.g_bar = 1.0e-3;
  c.settings.transition.alpha1 = 5.0;
  c.settings.transition.alpha2 = 10.0;
  c.settings.transition.eps_par = 3.0e-3;
  c.settings.transition.eps_perp = 3.1e-4;
  c.settings.n_ii = 8;
  c.settings.n_gr = 5;
  // The beams are very soft and bend strongly after the impact.
  c.search.max_segments = 256;
  s.solver.dynamic = true;
  s.solver.genalpha = GenAlphaParams::from_spectral_radius(1.0);
  s.solver.dt = 1.0e-3;
  s.solver.t_end = 2.0;
  s.solver.tol_R = 1e-15;
  s.solver.tol_D = 1e-12;
  return s;
}

Scenario crossing_guard() {
  Scenario s;
  s.name = "crossing_guard";
  const double r = 0.01;
  s.sections = {{"default", r, 1.0e5, 1.0, 1.0, 1.0}};
  FiberSpec b1;
  b1.from = Vec3(-1, 0, 0);
  b1.to = Vec3(1, 0, 0);
  b1.elements = 5;
  FiberSpec b2;
  b2.from = Vec3(0, -1, 2.5 * r);
  b2.to = Vec3(0, 1, 2.5 * r);
  b2.elements = 5;
  s.fibers = {b1, b2};
  for (int node : {0, 5})
    for (int c = 0; c < 3; ++c) s.dirichlet.push_back({node, c, 0.0, {}, PathShape::linear});
  // Driven beam ends move down by 4R per unit time.
  for (int node : {6, 11}) {
    for (int c = 0; c < 2; ++c) s.dirichlet.push_back({node, c, 0.0, {}, PathShape::linear});
    s.dirichlet.push_back({node, 2, -4.0 * r * 6.0, TimeProfile::ramp(0.0, 6.0), PathShape::linear});
  }
  auto& c = s.contact;
  c.settings.law_variant = PenaltyVariant::quad_regularized;
  c.settings.g_bar = 0.1 * r;
  c.settings.transition.alpha1 = 10.0;
  c.settings.transition.alpha2 = 15.0;
  c.settings.transition.eps_perp = 10.0;
  c.settings.transition.eps_par = 100.0;
  s.solver.dt = 1.0;
  s.solver.t_end = 6.0;
  s.solver.tol_R = 1e-9;
  s.solver.tol_D = 1e-9;
  return s;
}

Scenario fiber_smoke() {
  Scenario s;
  s.name = "fiber_smoke";
  const double r = 0.01;
  s.sections = {{"default", r, 1.0e5, 1.0, 1.0, 1.0}};
  auto fiber = [&](const Vec3& a, const Vec3& b) {
    FiberSpec f;
    f.from = a;
    f.to = b;
    f.elements = 4;
    s.fibers.push_back(f);
  };
  // Bottom layer along x, one nearly parallel neighbour, two crossing fibers on top.
  const double top = 2.0 * r + 0.004;
  fiber(Vec3(-0.5, -0.3, 0.0), Vec3(0.5, -0.28, 0.0));
  fiber(Vec3(-0.5, 0.0, 0.0), Vec3(0.5, 0.02, 0.0));
  fiber(Vec3(-0.5, 0.3, 0.0), Vec3(0.5, 0.3, 0.0));
  fiber(Vec3(-0.5, 0.3 + 2.0 * r + 0.002, 0.0), Vec3(0.5, 0.3 + 2.0 * r + 0.004, 0.0));
  fiber(Vec3(-0.3, -0.5, top), Vec3(-0.2, 0.5, top));
  fiber(Vec3(0.25, -0.5, top), Vec3(0.15, 0.5, top));
  const TimeProfile ramp = TimeProfile::ramp(0.0, 0.05);
  for (int i = 0; i < 3; ++i) s.line_loads.push_back({i, Vec3(0, 0, 2e-4), false, ramp});
  s.line_loads.push_back({3, Vec3(0, -4e-4, 0), false, ramp});
  s.line_loads.push_back({2, Vec3(0, 4e-4, 0), false, ramp});
  for (int i = 4; i < 6; ++i) s.line_loads.push_back({i, Vec3(0, 0, -3e-4), false, ramp});
  auto& c = s.contact;
  c.settings.law_variant = PenaltyVariant::quad_regularized;
  c.settings.g_bar = 0.1 * r;
  c.settings.transition.alpha1 = 10.0;
  c.settings.transition.alpha2 = 15.0;
  c.settings.transition.eps_par = 200.0;
  c.settings.transition.eps_perp = 200.0 * penalty_ratio_analytic(r, 12.5);
  c.settings.n_ii = 4;
  c.settings.n_gr = 5;
  s.solver.dynamic = true;
  s.solver.genalpha = GenAlphaParams::from_spectral_radius(0.95);
  s.solver.dt = 5e-3;
  s.solver.t_end = 0.1;
  s.solver.tol_R = 1e-10;
  s.solver.tol_D = 1e-10;
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenarios() { return {"example1_arc", "example2_impact", "crossing_guard", "fiber_smoke"}; }

Scenario builtin_scenario(const std::string& name) {
  Scenario s;
  if (name == "example1_arc")
    s = example1_arc();
  else if (name == "example2_impact")
    s = example2_impact();
  else if (name == "crossing_guard")
    s = crossing_guard();
  else if (name == "fiber_smoke")
    s = fiber_smoke();
  else
    throw InputError("unknown built-in scenario '" + name + "' (available: " + join(builtin_scenarios(), ", ") + ")");
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& name_or_path) {
  const auto names = builtin_scenarios();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_scenario(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw InputError("cannot open scenario file '" + name_or_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<std::string> csv_columns() {
  return {"step", "t",  "E_kin", "E_int", "Pi_c", "W_con", "Lx", "Ly", "Lz", "Hx", "Hy", "Hz", "n_point", "n_line_gp",
          "n_endpoint", "alpha_min", "alpha_max", "newton_iters", "dD_inf"};
}

std::string csv_row(const StepReport& r) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(17);
  os << r.step << "," << r.t << "," << r.e_kin << "," << r.e_int << "," << r.pi_c << "," << r.w_con;
  for (int k = 0; k < 3; ++k) os << "," << r.linear_momentum[k];
  for (int k = 0; k < 3; ++k) os << "," << r.angular_momentum[k];
  os << "," << r.n_point << "," << r.n_line_gp << "," << r.n_endpoint << "," << r.alpha_min << "," << r.alpha_max
     << "," << r.newton_iterations << "," << r.dD_inf;
  return os.str();
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw InputError("cannot write '" + path + "'");
  out_ << join(csv_columns(), ",") << "\n";
}

void CsvWriter::write(const StepReport& r) {
  out_ << csv_row(r) << "\n";
  out_.flush();
  if (!out_) throw InputError("write failed for '" + path_ + "'");
}

void write_vtk_centerlines(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& d,
                           int samples_per_element) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  std::vector<Vec3> points;
  std::vector<std::vector<int>> lines;
  for (const auto& f : mesh.fibers()) {
    std::vector<int> line;
    for (int e = f.first_element; e < f.first_element + f.n_elements; ++e) {
      const ElementDofs x = mesh.element_dofs(d, e);
      for (int k = (e == f.first_element ? 0 : 1); k <= samples_per_element; ++k) {
        line.push_back(static_cast<int>(points.size()));
        points.push_back(interpolate(x, -1.0 + 2.0 * k / samples_per_element, 0));
      }
    }
    lines.push_back(line);
  }
  size_t size = 0;
  for (const auto& l : lines) size += l.size() + 1;
  out << "# vtk DataFile Version 3.0\nabc-rods centerlines\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << points.size() << " double\n" << std::setprecision(17);
  for (const auto& p : points) out << p.x() << " " << p.y() << " " << p.z() << "\n";
  out << "LINES " << lines.size() << " " << size << "\n";
  for (const auto& l : lines) {
    out << l.size();
    for (int i : l) out << " " << i;
    out << "\n";
  }
  if (!out) throw InputError("write failed for '" + path + "'");
}

void write_vtk_contact_forces(const std::string& path, const ContactSet& contact) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  std::vector<ForceRecord> recs;
  for (const auto& p : contact.pairs) recs.insert(recs.end(), p.evaluation.forces.begin(), p.evaluation.forces.end());
  out << "# vtk DataFile Version 3.0\nabc-rods contact forces\nASCII\nDATASET POLYDATA\n" << std::setprecision(17);
  out << "POINTS " << recs.size() << " double\n";
  for (const auto& r : recs) out << r.position.x() << " " << r.position.y() << " " << r.position.z() << "\n";
  out << "VERTICES " << recs.size() << " " << 2 * recs.size() << "\n";
  for (size_t i = 0; i < recs.size(); ++i) out << "1 " << i << "\n";
  out << "POINT_DATA " << recs.size() << "\nVECTORS force double\n";
  for (const auto& r : recs) out << r.force.x() << " " << r.force.y() << " " << r.force.z() << "\n";
  out << "SCALARS kind int 1\nLOOKUP_TABLE default\n";
  for (const auto& r : recs) out << static_cast<int>(r.kind) << "\n";
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace abc_rods
