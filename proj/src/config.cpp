#include "fieldlab/config.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "fieldlab/text.hpp"

namespace fieldlab {

std::shared_ptr<const FieldSampler> ExperimentConfig::make_sampler(
    std::shared_ptr<const Window> w) const {
  if (model_kind == ModelKind::br)
    return std::make_shared<BrSpectralSampler>(br, std::move(w));
  SyntheticSpec s = synthetic;
  switch (model_kind) {
    case ModelKind::singleton: s.kind = SyntheticSpec::Kind::singleton; break;
    case ModelKind::geometric: s.kind = SyntheticSpec::Kind::geometric_decay; break;
    case ModelKind::constant: s.kind = SyntheticSpec::Kind::constant; break;
    default: break;
  }
  return std::make_shared<SyntheticSampler>(s, std::move(w));
}

namespace {

struct Cursor {
  std::string section;
  int line = 0;
};

using Issues = std::vector<ParseIssue>;

void err(Issues& issues, int line, std::string msg) {
  issues.push_back({line, std::move(msg)});
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_any(const std::string& s, const char* seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::strchr(seps, c)) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const std::string t = trim(s);
  if (t == "inf") {
    v = std::numeric_limits<double>::infinity();
    return true;
  }
  try {
    std::size_t pos = 0;
    v = std::stod(t, &pos);
    return pos == t.size();
  } catch (...) {
    return false;
  }
}

bool parse_ll(const std::string& s, long long& v) {
  try {
    std::size_t pos = 0;
    v = std::stoll(trim(s), &pos);
    return pos == trim(s).size();
  } catch (...) {
    return false;
  }
}

bool parse_u64(const std::string& s, std::uint64_t& v) {
  try {
    std::size_t pos = 0;
    v = std::stoull(trim(s), &pos);
    return pos == trim(s).size();
  } catch (...) {
    return false;
  }
}

std::vector<double> parse_double_list(const std::string& s, int line,
                                      Issues& issues, const std::string& key) {
  std::vector<double> out;
  for (const std::string& tok : split_any(s, ", \t")) {
    double v;
    if (!parse_double(tok, v)) {
      err(issues, line, key + ": cannot parse number '" + tok + "'");
      return {};
    }
    out.push_back(v);
  }
  return out;
}

// "(0)" "(1,0)" tuples; bare integers accepted as 1-d points
std::vector<Point> parse_point_list(const std::string& s, int line,
                                    Issues& issues, const std::string& key) {
  std::vector<Point> out;
  std::size_t i = 0;
  const std::string t = trim(s);
  while (i < t.size()) {
    while (i < t.size() && (std::isspace(static_cast<unsigned char>(t[i])) ||
                            t[i] == ','))
      ++i;
    if (i >= t.size()) break;
    if (t[i] == '(') {
      const std::size_t close = t.find(')', i);
      if (close == std::string::npos) {
        err(issues, line, key + ": unbalanced '(' in point list");
        return {};
      }
      Point p;
      for (const std::string& c : split_any(t.substr(i + 1, close - i - 1), ", ")) {
        long long v;
        if (!parse_ll(c, v)) {
          err(issues, line, key + ": bad point coordinate '" + c + "'");
          return {};
        }
        p.push_back(v);
      }
      if (p.empty()) {
        err(issues, line, key + ": empty point");
        return {};
      }
      out.push_back(std::move(p));
      i = close + 1;
    } else {
      std::size_t j = i;
      while (j < t.size() && !std::isspace(static_cast<unsigned char>(t[j])) &&
             t[j] != ',')
        ++j;
      long long v;
      if (!parse_ll(t.substr(i, j - i), v)) {
        err(issues, line, key + ": bad point '" + t.substr(i, j - i) + "'");
        return {};
      }
      out.push_back(Point{v});
      i = j;
    }
  }
  return out;
}

std::optional<FunctionalSpec> parse_functional(const std::string& name,
                                               const std::string& value,
                                               int line, Issues& issues) {
  std::vector<std::string> parts;
  {
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ';')) parts.push_back(trim(item));
  }
  if (parts.empty()) {
    err(issues, line, "functional '" + name + "': empty definition");
    return std::nullopt;
  }
  const std::string kind = parts[0];
  std::vector<Point> points;
  std::vector<double> lower, upper, exps;
  double radius = 0.0;
  bool bad = false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::size_t eq = parts[i].find('=');
    if (eq == std::string::npos) {
      err(issues, line, "functional '" + name + "': expected key=value, got '" +
                            parts[i] + "'");
      bad = true;
      continue;
    }
    const std::string k = trim(parts[i].substr(0, eq));
    const std::string v = trim(parts[i].substr(eq + 1));
    if (k == "points")
      points = parse_point_list(v, line, issues, "functional '" + name + "'");
    else if (k == "lower")
      lower = parse_double_list(v, line, issues, "functional '" + name + "'");
    else if (k == "upper")
      upper = parse_double_list(v, line, issues, "functional '" + name + "'");
    else if (k == "exps")
      exps = parse_double_list(v, line, issues, "functional '" + name + "'");
    else if (k == "radius") {
      if (!parse_double(v, radius)) {
        err(issues, line, "functional '" + name + "': bad radius");
        bad = true;
      }
    } else {
      err(issues, line, "functional '" + name + "': unknown key '" + k + "'");
      bad = true;
    }
  }
  if (bad) return std::nullopt;
  try {
    if (kind == "box") {
      if (upper.empty())
        upper.assign(points.size(), std::numeric_limits<double>::infinity());
      if (lower.empty()) lower.assign(points.size(), 0.0);
      FunctionalSpec F = FunctionalSpec::box(points, lower, upper, name);
      return F;
    }
    if (kind == "prodpow") {
      FunctionalSpec F = FunctionalSpec::product_power(points, exps, name);
      return F;
    }
    if (kind == "one") return FunctionalSpec::constant_one(name);
    if (kind == "supwin") return FunctionalSpec::sup_window(radius, name);
    if (kind == "integral") return FunctionalSpec::integral(radius, name);
  } catch (const UsageError& e) {
    err(issues, line, "functional '" + name + "': " + e.what());
    return std::nullopt;
  }
  err(issues, line, "functional '" + name + "': unknown kind '" + kind + "'");
  return std::nullopt;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  Issues issues;
  ExperimentConfig cfg;

  std::istringstream in(text);
  std::string raw;
  Cursor cur;

  // key lines seen, for window-membership checks after everything is read
  std::vector<std::pair<int, std::string>> functional_lines;

  while (std::getline(in, raw)) {
    ++cur.line;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        err(issues, cur.line, "unterminated section header");
        continue;
      }
      cur.section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"model", "lattice", "window",    "mc",
                                    "dehaan", "functionals", "test", "output"};
      bool ok = false;
      for (const char* s : known) ok = ok || cur.section == s;
      if (!ok) err(issues, cur.line, "unknown section [" + cur.section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      err(issues, cur.line, "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto want_double = [&](double& dst) {
      if (!parse_double(value, dst))
        err(issues, cur.line, key + ": cannot parse number '" + value + "'");
    };
    auto want_int = [&](int& dst) {
      long long v;
      if (!parse_ll(value, v))
        err(issues, cur.line, key + ": cannot parse integer '" + value + "'");
      else
        dst = static_cast<int>(v);
    };

    if (cur.section == "model") {
      if (key == "kind") {
        if (value == "br") cfg.model_kind = ExperimentConfig::ModelKind::br;
        else if (value == "singleton") cfg.model_kind = ExperimentConfig::ModelKind::singleton;
        else if (value == "geometric") cfg.model_kind = ExperimentConfig::ModelKind::geometric;
        else if (value == "constant") cfg.model_kind = ExperimentConfig::ModelKind::constant;
        else err(issues, cur.line, "model.kind: unknown kind '" + value + "'");
      } else if (key == "family") {
        if (value != "power")
          err(issues, cur.line, "model.family: only 'power' is available");
      } else if (key == "sigma") {
        want_double(cfg.br.variogram.sigma);
      } else if (key == "kappa") {
        want_double(cfg.br.variogram.kappa);
      } else if (key == "d") {
        int d = 1;
        want_int(d);
        cfg.br.d = d;
        cfg.synthetic.d = d;
      } else if (key == "alpha") {
        double a = 1.0;
        want_double(a);
        cfg.br.alpha = a;
        cfg.synthetic.alpha = a;
      } else if (key == "sign_mode") {
        if (value == "plus_one") cfg.br.sign_mode = SignMode::plus_one;
        else if (value == "rademacher") cfg.br.sign_mode = SignMode::rademacher;
        else err(issues, cur.line, "model.sign_mode: unknown mode '" + value + "'");
      } else if (key == "jitter") {
        want_double(cfg.br.jitter);
      } else if (key == "rho") {
        want_double(cfg.synthetic.rho);
      } else if (key == "values") {
        cfg.synthetic.values = parse_double_list(value, cur.line, issues, key);
      } else if (key == "probs") {
        cfg.synthetic.probs = parse_double_list(value, cur.line, issues, key);
      } else if (key == "norm") {
        if (value == "alpha_sum") cfg.norm_kind = NormKind::alpha_sum;
        else if (value == "euclidean") cfg.norm_kind = NormKind::euclidean;
        else if (value == "sup") cfg.norm_kind = NormKind::sup;
        else err(issues, cur.line, "model.norm: unknown norm '" + value + "'");
      } else {
        err(issues, cur.line, "unknown key '" + key + "' in [model]");
      }
    } else if (cur.section == "lattice") {
      if (key == "matrix") {
        if (value == "Z" || value == "Z1") {
          cfg.lattice_matrix = Eigen::MatrixXd::Identity(1, 1);
        } else if (value == "Z2") {
          cfg.lattice_matrix = Eigen::MatrixXd::Identity(2, 2);
        } else if (value == "Z3") {
          cfg.lattice_matrix = Eigen::MatrixXd::Identity(3, 3);
        } else {
          const std::vector<double> entries =
              parse_double_list(value, cur.line, issues, key);
          const int l = static_cast<int>(std::llround(std::sqrt(
              static_cast<double>(entries.size()))));
          if (entries.empty() || l * l != static_cast<int>(entries.size())) {
            err(issues, cur.line,
                "lattice.matrix: need a square row-major matrix or Z/Z2/Z3");
          } else {
            cfg.lattice_matrix.resize(l, l);
            for (int i = 0; i < l; ++i)
              for (int j = 0; j < l; ++j)
                cfg.lattice_matrix(i, j) = entries[static_cast<std::size_t>(i * l + j)];
          }
        }
      } else {
        err(issues, cur.line, "unknown key '" + key + "' in [lattice]");
      }
    } else if (cur.section == "window") {
      if (key == "radius") want_double(cfg.window_radius);
      else err(issues, cur.line, "unknown key '" + key + "' in [window]");
    } else if (cur.section == "mc") {
      if (key == "seed") {
        if (!parse_u64(value, cfg.mc.seed))
          err(issues, cur.line, "mc.seed: cannot parse '" + value + "'");
      } else if (key == "reps") {
        if (!parse_ll(value, cfg.mc.reps))
          err(issues, cur.line, "mc.reps: cannot parse '" + value + "'");
      } else if (key == "workers") {
        want_int(cfg.mc.workers);
      } else if (key == "z_crit") {
        want_double(cfg.mc.z_crit);
      } else {
        err(issues, cur.line, "unknown key '" + key + "' in [mc]");
      }
    } else if (cur.section == "dehaan") {
      if (key == "epsilon") want_double(cfg.dehaan.epsilon);
      else if (key == "max_terms") want_int(cfg.dehaan.max_terms);
      else if (key == "quantile_probes") want_int(cfg.dehaan.quantile_probes);
      else err(issues, cur.line, "unknown key '" + key + "' in [dehaan]");
    } else if (cur.section == "functionals") {
      auto F = parse_functional(key, value, cur.line, issues);
      if (F) {
        cfg.functionals.emplace_back(key, *F);
        functional_lines.emplace_back(cur.line, key);
      }
    } else if (cur.section == "test") {
      if (key == "h_list") cfg.test.h_list = parse_point_list(value, cur.line, issues, key);
      else if (key == "x_list") cfg.test.x_list = parse_double_list(value, cur.line, issues, key);
      else if (key == "n_list") cfg.test.n_list = parse_double_list(value, cur.line, issues, key);
      else if (key == "levels") want_int(cfg.test.levels);
      else if (key == "block") want_double(cfg.test.block);
      else if (key == "r") want_double(cfg.test.r);
      else if (key == "tau") want_double(cfg.test.tau);
      else if (key == "m_threshold") want_double(cfg.test.m_threshold);
      else if (key == "radii") cfg.test.radii = parse_double_list(value, cur.line, issues, key);
      else if (key == "method") cfg.test.method = value;
      else if (key == "variant") cfg.test.variant = value;
      else if (key == "shift_radius") want_double(cfg.test.shift_radius);
      else if (key == "points") cfg.test.points = parse_point_list(value, cur.line, issues, key);
      else if (key == "eps") want_double(cfg.test.eps);
      else if (key == "k0") cfg.test.k0 = parse_point_list(value, cur.line, issues, key);
      else if (key == "pil_radius") want_double(cfg.test.pil_radius);
      else err(issues, cur.line, "unknown key '" + key + "' in [test]");
    } else if (cur.section == "output") {
      if (key == "dir") cfg.out_dir = value;
      else err(issues, cur.line, "unknown key '" + key + "' in [output]");
    } else if (cur.section.empty()) {
      err(issues, cur.line, "key outside any section");
    }
  }

  // ---- semantic validation ----
  const int l = cfg.lattice_dim();
  auto default_points = [&](std::vector<Point>& pts, std::initializer_list<long long> firsts) {
    if (!pts.empty()) return;
    for (long long v : firsts) {
      Point p(static_cast<std::size_t>(l), 0);
      p[0] = v;
      pts.push_back(std::move(p));
    }
  };
  default_points(cfg.test.h_list, {0, 1, 2});
  default_points(cfg.test.points, {0, 1, 2});
  default_points(cfg.test.k0, {0});

  if (cfg.model_kind == ExperimentConfig::ModelKind::br) {
    if (!(cfg.br.variogram.sigma > 0))
      err(issues, 0, "model.sigma must be positive");
    if (!(cfg.br.variogram.kappa > 0 && cfg.br.variogram.kappa <= 2.0))
      err(issues, 0, "model.kappa must lie in (0, 2]");
    if (cfg.br.jitter < 0) err(issues, 0, "model.jitter must be nonnegative");
  }
  if (cfg.model_kind == ExperimentConfig::ModelKind::geometric &&
      !(cfg.synthetic.rho > 0 && cfg.synthetic.rho < 1))
    err(issues, 0, "model.rho must lie in (0, 1)");
  if (cfg.model_kind == ExperimentConfig::ModelKind::constant) {
    if (cfg.synthetic.values.size() != cfg.synthetic.probs.size() ||
        cfg.synthetic.values.empty())
      err(issues, 0, "model.values and model.probs must match and be nonempty");
    double s = 0;
    for (double p : cfg.synthetic.probs) s += p;
    if (std::abs(s - 1.0) > 1e-9) err(issues, 0, "model.probs must sum to 1");
  }
  if (!(cfg.alpha() > 0)) err(issues, 0, "model.alpha must be positive");
  if (cfg.field_dim() < 1) err(issues, 0, "model.d must be >= 1");
  if (std::abs(cfg.lattice_matrix.determinant()) <= 1e-12)
    err(issues, 0, "lattice.matrix is singular");
  if (!(cfg.window_radius > 0)) err(issues, 0, "window.radius must be positive");
  if (cfg.mc.reps < 2) err(issues, 0, "mc.reps must be >= 2");
  if (cfg.mc.workers < 1) err(issues, 0, "mc.workers must be >= 1");
  if (!(cfg.mc.z_crit > 0)) err(issues, 0, "mc.z_crit must be positive");
  if (!(cfg.dehaan.epsilon > 0 && cfg.dehaan.epsilon < 1))
    err(issues, 0, "dehaan.epsilon must lie in (0, 1)");
  if (cfg.dehaan.max_terms < 1) err(issues, 0, "dehaan.max_terms must be >= 1");
  for (double x : cfg.test.x_list)
    if (!(x > 0)) err(issues, 0, "test.x_list entries must be positive");
  if (!(cfg.test.r > 0)) err(issues, 0, "test.r must be positive");
  if (!(cfg.test.eps > 0)) err(issues, 0, "test.eps must be positive");
  if (cfg.test.levels < 0) err(issues, 0, "test.levels must be >= 0");

  auto check_dim = [&](const std::vector<Point>& pts, const char* what) {
    for (const Point& p : pts)
      if (static_cast<int>(p.size()) != l)
        err(issues, 0, std::string(what) + ": point " + point_to_string(p) +
                           " has wrong dimension");
  };
  check_dim(cfg.test.h_list, "test.h_list");
  check_dim(cfg.test.points, "test.points");
  check_dim(cfg.test.k0, "test.k0");

  // every referenced point must lie inside the declared window
  if (issues.empty()) {
    const Lattice L = cfg.lattice();
    auto inside = [&](const Point& p) {
      return L.embed(p).cwiseAbs().maxCoeff() <= cfg.window_radius + 1e-9;
    };
    auto check_inside = [&](const std::vector<Point>& pts, const char* what,
                            int line) {
      for (const Point& p : pts)
        if (!inside(p))
          err(issues, line, std::string(what) + ": point " +
                                point_to_string(p) + " lies outside window radius " +
                                fmt_double(cfg.window_radius, 6));
    };
    check_inside(cfg.test.h_list, "test.h_list", 0);
    check_inside(cfg.test.points, "test.points", 0);
    check_inside(cfg.test.k0, "test.k0", 0);
    for (std::size_t i = 0; i < cfg.functionals.size(); ++i) {
      const FunctionalSpec& F = cfg.functionals[i].second;
      const int line = i < functional_lines.size() ? functional_lines[i].first : 0;
      check_inside(F.points, ("functional '" + F.name + "'").c_str(), line);
      if ((F.kind == FunctionalKind::sup_window ||
           F.kind == FunctionalKind::integral) &&
          F.radius > cfg.window_radius + 1e-9)
        err(issues, line, "functional '" + F.name +
                              "': subwindow radius exceeds the window");
    }
  }

  result.errors = std::move(issues);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back({0, "cannot open config file: " + path});
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string points_str(const std::vector<Point>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += point_to_string(pts[i]);
  }
  return s;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt_double(v[i]);
  }
  return s;
}

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "[model]\n";
  switch (model_kind) {
    case ModelKind::br: os << "kind = br\n"; break;
    case ModelKind::singleton: os << "kind = singleton\n"; break;
    case ModelKind::geometric: os << "kind = geometric\n"; break;
    case ModelKind::constant: os << "kind = constant\n"; break;
  }
  os << "family = power\n";
  os << "sigma = " << fmt_double(br.variogram.sigma) << "\n";
  os << "kappa = " << fmt_double(br.variogram.kappa) << "\n";
  os << "d = " << field_dim() << "\n";
  os << "alpha = " << fmt_double(alpha()) << "\n";
  os << "sign_mode = "
     << (br.sign_mode == SignMode::plus_one ? "plus_one" : "rademacher") << "\n";
  os << "jitter = " << fmt_double(br.jitter) << "\n";
  os << "rho = " << fmt_double(synthetic.rho) << "\n";
  os << "values = " << list_str(synthetic.values) << "\n";
  os << "probs = " << list_str(synthetic.probs) << "\n";
  switch (norm_kind) {
    case NormKind::alpha_sum: os << "norm = alpha_sum\n"; break;
    case NormKind::euclidean: os << "norm = euclidean\n"; break;
    case NormKind::sup: os << "norm = sup\n"; break;
  }
  os << "\n[lattice]\n";
  os << "matrix =";
  for (int i = 0; i < lattice_matrix.rows(); ++i)
    for (int j = 0; j < lattice_matrix.cols(); ++j)
      os << ' ' << fmt_double(lattice_matrix(i, j));
  os << "\n";
  os << "\n[window]\nradius = " << fmt_double(window_radius) << "\n";
  os << "\n[mc]\n";
  os << "seed = " << mc.seed << "\n";
  os << "reps = " << mc.reps << "\n";
  os << "workers = " << mc.workers << "\n";
  os << "z_crit = " << fmt_double(mc.z_crit) << "\n";
  os << "\n[dehaan]\n";
  os << "epsilon = " << fmt_double(dehaan.epsilon) << "\n";
  os << "max_terms = " << dehaan.max_terms << "\n";
  os << "quantile_probes = " << dehaan.quantile_probes << "\n";
  os << "\n[functionals]\n";
  for (const auto& [name, F] : functionals)
    os << name << " = " << F.serialize() << "\n";
  os << "\n[test]\n";
  os << "h_list = " << points_str(test.h_list) << "\n";
  os << "x_list = " << list_str(test.x_list) << "\n";
  os << "n_list = " << list_str(test.n_list) << "\n";
  os << "levels = " << test.levels << "\n";
  os << "block = " << fmt_double(test.block) << "\n";
  os << "r = " << fmt_double(test.r) << "\n";
  os << "tau = " << fmt_double(test.tau) << "\n";
  os << "m_threshold = " << fmt_double(test.m_threshold) << "\n";
  os << "radii = " << list_str(test.radii) << "\n";
  os << "method = " << test.method << "\n";
  os << "variant = " << test.variant << "\n";
  os << "shift_radius = " << fmt_double(test.shift_radius) << "\n";
  os << "points = " << points_str(test.points) << "\n";
  os << "eps = " << fmt_double(test.eps) << "\n";
  os << "k0 = " << points_str(test.k0) << "\n";
  os << "pil_radius = " << fmt_double(test.pil_radius) << "\n";
  os << "\n[output]\ndir = " << out_dir << "\n";
  return os.str();
}

}  // namespace fieldlab
