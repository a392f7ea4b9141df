#include "cbf/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cbf/errors.hpp"
#include "cbf/grid.hpp"

namespace cbf {

namespace {

const char* family_tag_name(AnalyticFamily::Tag tag) {
  switch (tag) {
    case AnalyticFamily::Tag::flat: return "flat";
    case AnalyticFamily::Tag::constant_diagonal: return "constant_diagonal";
    case AnalyticFamily::Tag::conformally_flat: return "conformally_flat";
    case AnalyticFamily::Tag::doubly_warped: return "doubly_warped";
    case AnalyticFamily::Tag::off_diagonal_perturbation:
      return "off_diagonal_perturbation";
  }
  return "flat";
}

AnalyticFamily::Tag family_tag_from_string(const std::string& name) {
  for (AnalyticFamily::Tag tag :
       {AnalyticFamily::Tag::flat, AnalyticFamily::Tag::constant_diagonal,
        AnalyticFamily::Tag::conformally_flat,
        AnalyticFamily::Tag::doubly_warped,
        AnalyticFamily::Tag::off_diagonal_perturbation}) {
    if (name == family_tag_name(tag)) return tag;
  }
  throw ConfigError("unknown initial-data family '" + name + "'");
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// One key = value line, with its source line number for error anchoring.
struct Item {
  int line;
  std::string key;
  std::string value;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const Item& it) {
  const std::string v = trim(it.value);
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    fail(it.line, "expected a number for '" + it.key + "', got '" + v + "'");
  return x;
}

std::int64_t parse_int(const Item& it) {
  const std::string v = trim(it.value);
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    fail(it.line, "expected an integer for '" + it.key + "', got '" + v + "'");
  return x;
}

bool parse_bool(const Item& it) {
  const std::string v = trim(it.value);
  if (v == "true") return true;
  if (v == "false") return false;
  fail(it.line, "expected true/false for '" + it.key + "', got '" + v + "'");
}

std::vector<double> parse_doubles(const Item& it) {
  std::vector<double> out;
  std::istringstream ss(it.value);
  std::string tok;
  while (ss >> tok) {
    char* end = nullptr;
    out.push_back(std::strtod(tok.c_str(), &end));
    if (end != tok.c_str() + tok.size())
      fail(it.line, "bad number '" + tok + "' in '" + it.key + "'");
  }
  if (out.empty()) fail(it.line, "empty value for '" + it.key + "'");
  return out;
}

std::vector<std::int64_t> parse_ints(const Item& it) {
  std::vector<std::int64_t> out;
  std::istringstream ss(it.value);
  std::string tok;
  while (ss >> tok) {
    char* end = nullptr;
    out.push_back(std::strtoll(tok.c_str(), &end, 10));
    if (end != tok.c_str() + tok.size())
      fail(it.line, "bad integer '" + tok + "' in '" + it.key + "'");
  }
  if (out.empty()) fail(it.line, "empty value for '" + it.key + "'");
  return out;
}

// "k0 k1 ... : amp : phase"
WaveMode parse_mode(const Item& it) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : it.value) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3)
    fail(it.line, "mode '" + it.key + "' needs 'k... : amp : phase'");
  WaveMode m;
  Item ks{it.line, it.key, parts[0]};
  for (std::int64_t k : parse_ints(ks)) m.k.push_back(static_cast<int>(k));
  m.amp = parse_double({it.line, it.key, parts[1]});
  m.phase = parse_double({it.line, it.key, parts[2]});
  return m;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_mode(const WaveMode& m) {
  std::string s;
  for (size_t i = 0; i < m.k.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(m.k[i]);
  }
  return s + " : " + fmt(m.amp) + " : " + fmt(m.phase);
}

}  // namespace

void RunConfig::validate() const {
  if (n < 2) throw ConfigError("[grid] n must be at least 2");
  if (static_cast<int>(sizes.size()) != n)
    throw ConfigError("[grid] sizes needs exactly n entries");
  if (static_cast<int>(periods.size()) != n)
    throw ConfigError("[grid] periods needs exactly n entries");
  for (std::int64_t s : sizes)
    if (s < 1) throw ConfigError("[grid] sizes must be positive");
  for (double p : periods)
    if (!(p > 0)) throw ConfigError("[grid] periods must be positive");
  for (const auto* modes : {&family.u_modes, &family.v_modes,
                            &family.offd_modes}) {
    for (const WaveMode& m : *modes)
      if (static_cast<int>(m.k.size()) != n)
        throw ConfigError("[initial] mode wavevectors need exactly n entries");
  }
  if (!family.diag.empty() && static_cast<int>(family.diag.size()) != n)
    throw ConfigError("[initial] diag needs exactly n entries");
  family.validate();
  if (!(c_cfl > 0)) throw ConfigError("[flow] c_cfl must be positive");
  if (t_end < 0) throw ConfigError("[flow] t_end must be nonnegative");
  if (max_steps < 0) throw ConfigError("[flow] max_steps must be nonnegative");
  if (stencil_order != 2 && stencil_order != 4)
    throw ConfigError("[flow] stencil_order must be 2 or 4");
  if (!(pressure.tol > 0)) throw ConfigError("[pressure] tol must be positive");
  if (!(project_tol > 0)) throw ConfigError("[project] tol must be positive");
  if (project_max_iterations < 1)
    throw ConfigError("[project] max_iterations must be at least 1");
  if (out_dir.empty()) throw ConfigError("[output] directory must be set");
  if (record_every < 0)
    throw ConfigError("[output] record_every must be nonnegative");
  if (m_max < 0 || m_max > 4)
    throw ConfigError("[output] m_max must be between 0 and 4");
  if (checkpoint_every < 0)
    throw ConfigError("[output] checkpoint_every must be nonnegative");
  if (shi_k < 0) throw ConfigError("[output] shi_k must be nonnegative");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  c.sizes.clear();
  c.periods.clear();

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool saw_u = false, saw_v = false, saw_offd = false, saw_cf = false;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    size_t hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "grid" && section != "initial" && section != "flow" &&
          section != "pressure" && section != "project" &&
          section != "output")
        fail(line, "unknown section [" + section + "]");
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    Item it{line, trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
    if (it.key.empty()) fail(line, "empty key");
    if (section.empty()) fail(line, "key '" + it.key + "' outside any section");

    {
      if (section == "grid") {
        if (it.key == "n") c.n = static_cast<int>(parse_int(it));
        else if (it.key == "sizes") c.sizes = parse_ints(it);
        else if (it.key == "periods") c.periods = parse_doubles(it);
        else fail(line, "unknown key '" + it.key + "' in [grid]");
      } else if (section == "initial") {
        if (it.key == "family")
          c.family.tag = family_tag_from_string(trim(it.value));
        else if (it.key == "scale") c.family.scale = parse_double(it);
        else if (it.key == "diag") c.family.diag = parse_doubles(it);
        else if (it.key == "split")
          c.family.split = static_cast<int>(parse_int(it));
        else if (it.key == "u_mode") {
          if (!saw_u) c.family.u_modes.clear(), saw_u = true;
          c.family.u_modes.push_back(parse_mode(it));
        } else if (it.key == "v_mode") {
          if (!saw_v) c.family.v_modes.clear(), saw_v = true;
          c.family.v_modes.push_back(parse_mode(it));
        } else if (it.key == "mode") {
          if (!saw_cf) c.family.u_modes.clear(), saw_cf = true;
          c.family.u_modes.push_back(parse_mode(it));
        } else if (it.key == "offd_mode") {
          if (!saw_offd) c.family.offd_modes.clear(), saw_offd = true;
          c.family.offd_modes.push_back(parse_mode(it));
        } else if (it.key == "offd_i")
          c.family.offd_i = static_cast<int>(parse_int(it));
        else if (it.key == "offd_j")
          c.family.offd_j = static_cast<int>(parse_int(it));
        else if (it.key == "seed")
          c.seed = static_cast<std::uint64_t>(parse_int(it));
        else fail(line, "unknown key '" + it.key + "' in [initial]");
      } else if (section == "flow") {
        if (it.key == "variant")
          c.variant = flow_variant_from_string(trim(it.value));
        else if (it.key == "s0") c.s0 = parse_double(it);
        else if (it.key == "scheme")
          c.scheme = time_scheme_from_string(trim(it.value));
        else if (it.key == "c_cfl") c.c_cfl = parse_double(it);
        else if (it.key == "t_end") c.t_end = parse_double(it);
        else if (it.key == "max_steps") c.max_steps = parse_int(it);
        else if (it.key == "stencil_order")
          c.stencil_order = static_cast<int>(parse_int(it));
        else fail(line, "unknown key '" + it.key + "' in [flow]");
      } else if (section == "pressure") {
        if (it.key == "tol") c.pressure.tol = parse_double(it);
        else if (it.key == "max_iterations")
          c.pressure.max_iterations = parse_int(it);
        else if (it.key == "project_kernel")
          c.pressure.project_kernel = parse_bool(it);
        else if (it.key == "jacobi") c.pressure.jacobi = parse_bool(it);
        else if (it.key == "eps_inv") c.pressure.eps_inv = parse_double(it);
        else if (it.key == "compat_tol")
          c.pressure.compat_tol = parse_double(it);
        else if (it.key == "margin_steps")
          c.pressure.margin_steps = parse_int(it);
        else fail(line, "unknown key '" + it.key + "' in [pressure]");
      } else if (section == "project") {
        if (it.key == "enabled") c.project = parse_bool(it);
        else if (it.key == "tol") c.project_tol = parse_double(it);
        else if (it.key == "max_iterations")
          c.project_max_iterations = static_cast<int>(parse_int(it));
        else fail(line, "unknown key '" + it.key + "' in [project]");
      } else {  // output
        if (it.key == "directory") c.out_dir = it.value;
        else if (it.key == "record_every") c.record_every = parse_int(it);
        else if (it.key == "m_max") c.m_max = static_cast<int>(parse_int(it));
        else if (it.key == "checkpoint_every")
          c.checkpoint_every = parse_int(it);
        else if (it.key == "shi_k") c.shi_k = parse_double(it);
        else if (it.key == "k_bound")
          c.thresholds.k_bound = parse_double(it);
        else if (it.key == "margin_floor")
          c.thresholds.margin_floor = parse_double(it);
        else fail(line, "unknown key '" + it.key + "' in [output]");
      }
    }
  }

  c.family.n = c.n;
  c.family.periods = c.periods;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[grid]\n";
  o << "n = " << c.n << "\n";
  o << "sizes =";
  for (std::int64_t s : c.sizes) o << ' ' << s;
  o << "\nperiods =";
  for (double p : c.periods) o << ' ' << fmt(p);
  o << "\n\n[initial]\n";
  o << "family = " << family_tag_name(c.family.tag) << "\n";
  o << "scale = " << fmt(c.family.scale) << "\n";
  switch (c.family.tag) {
    case AnalyticFamily::Tag::flat:
      break;
    case AnalyticFamily::Tag::constant_diagonal:
      if (!c.family.diag.empty()) {
        o << "diag =";
        for (double d : c.family.diag) o << ' ' << fmt(d);
        o << "\n";
      }
      break;
    case AnalyticFamily::Tag::conformally_flat:
      for (const WaveMode& m : c.family.u_modes)
        o << "mode = " << fmt_mode(m) << "\n";
      break;
    case AnalyticFamily::Tag::doubly_warped:
      o << "split = " << c.family.split << "\n";
      for (const WaveMode& m : c.family.u_modes)
        o << "u_mode = " << fmt_mode(m) << "\n";
      for (const WaveMode& m : c.family.v_modes)
        o << "v_mode = " << fmt_mode(m) << "\n";
      break;
    case AnalyticFamily::Tag::off_diagonal_perturbation:
      o << "offd_i = " << c.family.offd_i << "\n";
      o << "offd_j = " << c.family.offd_j << "\n";
      for (const WaveMode& m : c.family.offd_modes)
        o << "offd_mode = " << fmt_mode(m) << "\n";
      break;
  }
  o << "seed = " << c.seed << "\n";
  o << "\n[flow]\n";
  o << "variant = " << to_string(c.variant) << "\n";
  o << "s0 = " << fmt(c.s0) << "\n";
  o << "scheme = " << to_string(c.scheme) << "\n";
  o << "c_cfl = " << fmt(c.c_cfl) << "\n";
  o << "t_end = " << fmt(c.t_end) << "\n";
  o << "max_steps = " << c.max_steps << "\n";
  o << "stencil_order = " << c.stencil_order << "\n";
  o << "\n[pressure]\n";
  o << "tol = " << fmt(c.pressure.tol) << "\n";
  o << "max_iterations = " << c.pressure.max_iterations << "\n";
  o << "project_kernel = " << (c.pressure.project_kernel ? "true" : "false")
    << "\n";
  o << "jacobi = " << (c.pressure.jacobi ? "true" : "false") << "\n";
  o << "eps_inv = " << fmt(c.pressure.eps_inv) << "\n";
  o << "compat_tol = " << fmt(c.pressure.compat_tol) << "\n";
  o << "margin_steps = " << c.pressure.margin_steps << "\n";
  o << "\n[project]\n";
  o << "enabled = " << (c.project ? "true" : "false") << "\n";
  o << "tol = " << fmt(c.project_tol) << "\n";
  o << "max_iterations = " << c.project_max_iterations << "\n";
  o << "\n[output]\n";
  o << "directory = " << c.out_dir << "\n";
  o << "record_every = " << c.record_every << "\n";
  o << "m_max = " << c.m_max << "\n";
  o << "checkpoint_every = " << c.checkpoint_every << "\n";
  o << "shi_k = " << fmt(c.shi_k) << "\n";
  o << "k_bound = " << fmt(c.thresholds.k_bound) << "\n";
  o << "margin_floor = " << fmt(c.thresholds.margin_floor) << "\n";
  return o.str();
}

StepPolicy step_policy(const RunConfig& c) {
  StepPolicy p;
  p.scheme = c.scheme;
  p.c_cfl = c.c_cfl;
  p.t_end = c.t_end;
  p.max_steps = c.max_steps;
  p.pressure = c.pressure;
  p.stencil_order = c.stencil_order;
  return p;
}

RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.policy = step_policy(c);
  o.record_every = c.record_every;
  o.m_max = c.m_max;
  o.shi_k = c.shi_k;
  o.thresholds = c.thresholds;
  return o;
}

MetricField initial_metric(const RunConfig& c) {
  AnalyticFamily fam = c.family;
  fam.n = c.n;
  fam.periods = c.periods;
  GridPtr grid = Grid::create(c.sizes, c.periods);
  return sample_to_grid(fam, grid);
}

}  // namespace cbf
