#include "roentgen/cli.hpp"
#include "roentgen/errors.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace roentgen::cli {

using nlohmann::json;

namespace {

//------------------------------------------------------------------------------
// YAML is read into the same json tree the JSON path uses.

json yaml_scalar(const YAML::Node &node) {
  const std::string &s = node.Scalar();
  if (node.Tag() == "!")
    return s; // quoted
  if (s == "~" || s == "null" || s == "Null" || s == "NULL")
    return nullptr;
  if (s == "true" || s == "True" || s == "TRUE")
    return true;
  if (s == "false" || s == "False" || s == "FALSE")
    return false;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used, 10);
    if (used == s.size())
      return v;
  } catch (const std::exception &) {
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size())
      return v;
  } catch (const std::exception &) {
  }
  if (s == ".inf" || s == ".Inf")
    return std::numeric_limits<double>::infinity();
  return s;
}

json yaml_to_json(const YAML::Node &node) {
  switch (node.Type()) {
  case YAML::NodeType::Null:
  case YAML::NodeType::Undefined:
    return nullptr;
  case YAML::NodeType::Scalar:
    return yaml_scalar(node);
  case YAML::NodeType::Sequence: {
    json out = json::array();
    for (const auto &item : node)
      out.push_back(yaml_to_json(item));
    return out;
  }
  case YAML::NodeType::Map: {
    json out = json::object();
    for (const auto &kv : node)
      out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
    return out;
  }
  }
  return nullptr;
}

//------------------------------------------------------------------------------
// A json node with its dotted path, for field-level messages.

class Field {
public:
  Field(const json &j, std::string path) : j_(&j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string &what) const {
    throw ConfigError("config: " + (path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  const std::string &path() const { return path_; }
  const json &raw() const { return *j_; }
  bool is_object() const { return j_->is_object(); }
  bool is_string() const { return j_->is_string(); }

  bool has(const std::string &key) const {
    return j_->is_object() && j_->contains(key) && !(*j_)[key].is_null();
  }

  Field at(const std::string &key) const {
    if (!j_->is_object())
      fail("expected a mapping");
    if (!j_->contains(key))
      Field(*j_, child(key)).fail("missing");
    return Field((*j_)[key], child(key));
  }

  Field index(std::size_t i) const { return Field((*j_)[i], path_ + "[" + std::to_string(i) + "]"); }

  std::size_t size() const {
    if (!j_->is_array())
      fail("expected a list");
    return j_->size();
  }

  void allow(std::initializer_list<const char *> keys) const {
    if (!j_->is_object())
      fail("expected a mapping");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto &item : j_->items())
      if (!allowed.count(item.key()))
        Field(item.value(), child(item.key())).fail("unknown field");
  }

  double number() const {
    if (!j_->is_number())
      fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v))
      fail("must be finite");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0))
      fail("must be > 0");
    return v;
  }

  double non_negative() const {
    const double v = number();
    if (!(v >= 0.0))
      fail("must be >= 0");
    return v;
  }

  std::size_t count(std::size_t min = 1) const {
    if (!j_->is_number_integer() && !j_->is_number_unsigned())
      fail("expected an integer");
    const long long v = j_->get<long long>();
    if (v < static_cast<long long>(min))
      fail("must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  bool boolean() const {
    if (!j_->is_boolean())
      fail("expected true or false");
    return j_->get<bool>();
  }

  std::string text() const {
    if (!j_->is_string())
      fail("expected a string");
    return j_->get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i)
      out.push_back(index(i).number());
    return out;
  }

  Vec3 vec3() const {
    if (size() != 3)
      fail("expected three components");
    return Vec3(index(0).number(), index(1).number(), index(2).number());
  }

  Eigen::Matrix3d matrix3() const {
    if (size() != 3)
      fail("expected a 3x3 matrix");
    Eigen::Matrix3d m;
    for (std::size_t i = 0; i < 3; ++i) {
      const Vec3 row = index(i).vec3();
      m.row(static_cast<int>(i)) = row.transpose();
    }
    return m;
  }

private:
  std::string child(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

  const json *j_;
  std::string path_;
};

// Wraps library-level ConfigErrors with the field they came from.
template <class F> auto within(const Field &f, F &&body) -> decltype(body()) {
  try {
    return body();
  } catch (const ConfigError &e) {
    const std::string msg = e.what();
    if (msg.rfind("config: ", 0) == 0)
      throw;
    f.fail(msg);
  }
}

//------------------------------------------------------------------------------

void parse_atom(const Field &atom, ScenarioConfig &cfg) {
  atom.allow({"dimensionless", "physical"});
  const bool dimless = atom.has("dimensionless");
  const bool physical = atom.has("physical");
  if (dimless == physical)
    atom.fail("exactly one of 'dimensionless' or 'physical' is required");
  if (dimless) {
    const Field d = atom.at("dimensionless");
    d.allow({"epsilon", "gamma_tilde"});
    cfg.scenario.params.epsilon = d.at("epsilon").non_negative();
    cfg.scenario.params.gamma_tilde = d.at("gamma_tilde").positive();
    return;
  }
  const Field p = atom.at("physical");
  p.allow({"mass", "omega0", "gamma0", "dipole_moment", "infinite_mass"});
  PhysicalInput in;
  in.infinite_mass = p.has("infinite_mass") && p.at("infinite_mass").boolean();
  if (!in.infinite_mass)
    in.mass = p.at("mass").positive();
  else if (p.has("mass"))
    p.at("mass").fail("must be omitted when infinite_mass is true");
  in.omega0 = p.at("omega0").positive();
  in.gamma0 = p.at("gamma0").positive();
  if (p.has("dipole_moment"))
    in.dipole_moment = p.at("dipole_moment").positive();
  cfg.scenario.params = within(p, [&] { return to_dimensionless(in); });
  if (auto w = narrow_line_warning(in))
    cfg.warnings.push_back(*w);
  cfg.physical = in;
}

CouplingModel parse_coupling(const Field &c) {
  const auto by_name = [&](const std::string &name) {
    if (name == "roentgen")
      return CouplingModel::roentgen();
    if (name == "standard" || name == "standard_dipole")
      return CouplingModel::standard();
    c.fail("unknown model '" + name + "' (roentgen | standard)");
  };
  if (c.is_string())
    return by_name(c.text());
  c.allow({"model", "recoil_term", "momentum_shift"});
  CouplingModel m = by_name(c.at("model").text());
  if (m.is_standard()) {
    if (c.has("recoil_term") || c.has("momentum_shift"))
      c.fail("recoil_term and momentum_shift apply to the roentgen model only");
    return m;
  }
  if (c.has("recoil_term"))
    m.include_recoil_term = c.at("recoil_term").boolean();
  if (c.has("momentum_shift"))
    m.apply_momentum_shift = c.at("momentum_shift").boolean();
  return m;
}

void parse_geometry(const Field &g, ScenarioConfig &cfg) {
  if (g.is_string()) {
    if (g.text() != "perpendicular")
      g.fail("expected 'perpendicular' or a mapping with theta/phi");
    return;
  }
  g.allow({"perpendicular", "theta", "phi", "dipole"});
  if (g.has("dipole"))
    cfg.scenario.dipole = within(g.at("dipole"), [&] { return UnitVector3::normalized(g.at("dipole").vec3()); });
  const bool perp = g.has("perpendicular") && g.at("perpendicular").boolean();
  if (perp && (g.has("theta") || g.has("phi")))
    g.fail("give either perpendicular: true or theta/phi, not both");
  if (!perp) {
    cfg.perpendicular = false;
    cfg.theta = g.at("theta").number();
    cfg.phi = g.has("phi") ? g.at("phi").number() : 0.0;
    if (cfg.theta < 0.0 || cfg.theta > std::numbers::pi)
      g.at("theta").fail("must lie in [0, pi]");
  }
}

MomentumDistribution parse_distribution(const Field &d, const ScenarioConfig &cfg,
                                        const std::filesystem::path &base_dir) {
  if (d.is_string()) {
    if (d.text() != "point")
      d.fail("only 'point' may be given without parameters");
    return MomentumDistribution::point_mass(Vec3::Zero());
  }
  d.allow({"kind", "beta", "mean", "sigma", "covariance", "file", "delta", "weight", "points",
           "weights", "order", "method"});
  const std::string kind = d.at("kind").text();
  if (kind == "point")
    return MomentumDistribution::point_mass(d.has("beta") ? d.at("beta").vec3() : Vec3::Zero());
  if (kind == "gaussian") {
    const Vec3 mean = d.has("mean") ? d.at("mean").vec3() : Vec3::Zero();
    if (d.has("sigma") == d.has("covariance"))
      d.fail("gaussian needs exactly one of sigma or covariance");
    if (d.has("sigma"))
      return within(d.at("sigma"), [&] {
        return MomentumDistribution::isotropic_gaussian(mean, d.at("sigma").non_negative());
      });
    return within(d.at("covariance"),
                  [&] { return MomentumDistribution::gaussian(mean, d.at("covariance").matrix3()); });
  }
  if (kind == "tabulated") {
    if (d.has("file")) {
      std::filesystem::path file = d.at("file").text();
      if (file.is_relative())
        file = base_dir / file;
      if (!std::filesystem::exists(file))
        d.at("file").fail("file not found: " + file.string());
      return within(d.at("file"), [&] { return load_tabulated_csv(file, cfg.direction); });
    }
    return within(d, [&] {
      return MomentumDistribution::tabulated(cfg.direction, d.at("delta").numbers(),
                                             d.at("weight").numbers());
    });
  }
  if (kind == "mixture") {
    const Field pts = d.at("points");
    std::vector<Vec3> beta;
    for (std::size_t i = 0; i < pts.size(); ++i)
      beta.push_back(pts.index(i).vec3());
    return within(d, [&] { return MomentumDistribution::mixture(beta, d.at("weights").numbers()); });
  }
  d.at("kind").fail("unknown distribution '" + kind + "' (point | gaussian | tabulated | mixture)");
}

Formfactor parse_formfactor(const Field &f) {
  if (f.is_string()) {
    if (f.text() != "none")
      f.fail("expected 'none' or a mapping with kind and cutoff");
    return Formfactor::none();
  }
  f.allow({"kind", "cutoff"});
  const std::string kind = f.at("kind").text();
  if (kind == "none")
    return Formfactor::none();
  const double cutoff = f.at("cutoff").positive();
  if (kind == "sharp")
    return Formfactor::sharp(cutoff);
  if (kind == "gaussian")
    return Formfactor::gaussian(cutoff);
  if (kind == "exponential")
    return Formfactor::exponential(cutoff);
  f.at("kind").fail("unknown formfactor '" + kind + "' (none | sharp | gaussian | exponential)");
}

RateVariant parse_variant(const Field &f) {
  const std::string v = f.text();
  if (v == "F")
    return RateVariant::F;
  if (v == "F_prime" || v == "F'")
    return RateVariant::F_prime;
  f.fail("expected F or F_prime");
}

} // namespace

ScenarioConfig parse_config(const std::string &text, bool is_json,
                            const std::filesystem::path &base_dir) {
  json root;
  try {
    root = is_json ? json::parse(text) : yaml_to_json(YAML::Load(text));
  } catch (const std::exception &e) {
    throw ConfigError(std::string("config: cannot parse: ") + e.what());
  }
  const Field r(root, "");
  r.allow({"atom", "coupling", "distribution", "geometry", "x_grid", "scan", "formfactor",
           "probability", "pattern", "rates", "oracle", "tolerance", "seed", "threads", "output",
           "checks"});

  ScenarioConfig cfg;
  cfg.source_text = text;
  parse_atom(r.at("atom"), cfg);
  if (r.has("coupling"))
    cfg.scenario.coupling = parse_coupling(r.at("coupling"));
  if (r.has("geometry"))
    parse_geometry(r.at("geometry"), cfg);
  // The azimuth origin of direction_about_dipole, exactly orthogonal to e_d.
  cfg.direction = cfg.perpendicular ? polarization_basis(cfg.scenario.dipole).e1
                                    : direction_about_dipole(cfg.scenario.dipole, cfg.theta, cfg.phi);

  if (r.has("distribution")) {
    const Field d = r.at("distribution");
    cfg.scenario.distribution = parse_distribution(d, cfg, base_dir);
    if (d.is_object() && d.has("order"))
      cfg.scenario.expectation.order = d.at("order").count(1);
    if (d.is_object() && d.has("method")) {
      const std::string m = d.at("method").text();
      if (m == "automatic")
        cfg.scenario.method = DopplerMethod::automatic;
      else if (m == "full_tensor")
        cfg.scenario.method = DopplerMethod::full_tensor;
      else
        d.at("method").fail("expected automatic or full_tensor");
    }
  }

  if (r.has("tolerance"))
    cfg.tolerance = r.at("tolerance").positive();
  if (r.has("seed")) {
    const Field s = r.at("seed");
    if (!s.raw().is_number_integer() || s.raw().get<long long>() < 0)
      s.fail("expected a non-negative integer");
    cfg.seed = s.raw().get<std::uint64_t>();
  }
  if (r.has("threads"))
    cfg.threads = r.at("threads").count(1);
  if (r.has("output"))
    cfg.output = r.at("output").text();

  if (r.has("x_grid")) {
    const Field g = r.at("x_grid");
    g.allow({"min", "max", "points", "half_widths"});
    if (g.has("points"))
      cfg.grid.points = g.at("points").count(2);
    if (g.has("min") || g.has("max")) {
      cfg.grid.around_resonance = false;
      cfg.grid.min = g.at("min").non_negative();
      cfg.grid.max = g.at("max").positive();
      if (!(cfg.grid.max > cfg.grid.min))
        g.at("max").fail("must exceed min");
    }
    if (g.has("half_widths"))
      cfg.grid.half_widths = g.at("half_widths").positive();
  }

  if (r.has("scan")) {
    const Field s = r.at("scan");
    s.allow({"lambda_min", "lambda_max", "points", "asymptotic_start"});
    if (s.has("lambda_min"))
      cfg.scan.lambda_min = s.at("lambda_min").positive();
    if (s.has("lambda_max"))
      cfg.scan.lambda_max = s.at("lambda_max").positive();
    if (s.has("points"))
      cfg.scan.points = s.at("points").count(2);
    if (s.has("asymptotic_start"))
      cfg.scan.asymptotic_start = s.at("asymptotic_start").positive();
    if (!(cfg.scan.lambda_max > cfg.scan.lambda_min))
      s.fail("lambda_max must exceed lambda_min");
  }

  if (r.has("formfactor"))
    cfg.formfactor = parse_formfactor(r.at("formfactor"));

  if (r.has("probability")) {
    const Field p = r.at("probability");
    p.allow({"upper", "lower"});
    if (p.has("upper"))
      cfg.probability.upper = p.at("upper").positive();
    if (p.has("lower"))
      cfg.probability.lower = p.at("lower").non_negative();
    if (!(cfg.probability.upper > cfg.probability.lower))
      p.fail("upper must exceed lower");
  }

  if (r.has("pattern")) {
    const Field p = r.at("pattern");
    p.allow({"mode", "variant", "theta_points", "phi", "upper", "sphere"});
    if (p.has("mode")) {
      const std::string m = p.at("mode").text();
      if (m == "golden_rule")
        cfg.pattern.mode = PatternMode::Kind::golden_rule;
      else if (m == "formfactor")
        cfg.pattern.mode = PatternMode::Kind::formfactor;
      else
        p.at("mode").fail("expected golden_rule or formfactor");
    }
    if (p.has("variant"))
      cfg.pattern.variant = parse_variant(p.at("variant"));
    if (p.has("theta_points"))
      cfg.pattern.theta_points = p.at("theta_points").count(2);
    if (p.has("phi"))
      cfg.pattern.phi = p.at("phi").number();
    if (p.has("upper"))
      cfg.pattern.upper = p.at("upper").positive();
    if (p.has("sphere")) {
      const Field s = p.at("sphere");
      s.allow({"theta_points", "phi_points"});
      if (s.has("theta_points"))
        cfg.pattern.sphere_theta_points = s.at("theta_points").count(1);
      if (s.has("phi_points"))
        cfg.pattern.sphere_phi_points = s.at("phi_points").count(1);
    }
  }

  // The limit-ordering line width follows the atom unless given explicitly.
  cfg.rates.ordering.gamma_tilde = cfg.scenario.params.gamma_tilde;
  if (r.has("rates")) {
    const Field p = r.at("rates");
    p.allow({"deltas", "thetas", "limit_ordering"});
    if (p.has("deltas"))
      cfg.rates.deltas = p.at("deltas").numbers();
    if (p.has("thetas"))
      cfg.rates.thetas = p.at("thetas").numbers();
    if (p.has("limit_ordering")) {
      const Field l = p.at("limit_ordering");
      if (l.raw().is_boolean()) {
        cfg.rates.limit_ordering = l.boolean();
      } else {
        l.allow({"epsilons", "cutoffs", "recoil_scaled_cutoffs", "gamma_tilde"});
        if (l.has("epsilons"))
          cfg.rates.ordering.epsilons = l.at("epsilons").numbers();
        if (l.has("cutoffs"))
          cfg.rates.ordering.cutoffs = l.at("cutoffs").numbers();
        if (l.has("recoil_scaled_cutoffs"))
          cfg.rates.ordering.recoil_scaled_cutoffs = l.at("recoil_scaled_cutoffs").boolean();
        if (l.has("gamma_tilde"))
          cfg.rates.ordering.gamma_tilde = l.at("gamma_tilde").positive();
        for (double e : cfg.rates.ordering.epsilons)
          if (!(e > 0.0))
            l.at("epsilons").fail("entries must be > 0");
      }
    }
  }
  if (r.has("oracle")) {
    const Field o = r.at("oracle");
    o.allow({"modes", "gamma", "half_width", "duration", "time_step", "record_every"});
    if (o.has("modes"))
      cfg.oracle.modes = o.at("modes").count(2);
    if (o.has("gamma"))
      cfg.oracle.gamma = o.at("gamma").positive();
    if (o.has("half_width"))
      cfg.oracle.half_width = o.at("half_width").positive();
    if (o.has("duration"))
      cfg.oracle.duration = o.at("duration").positive();
    if (o.has("time_step"))
      cfg.oracle.time_step = o.at("time_step").positive();
    if (o.has("record_every"))
      cfg.oracle.record_every = o.at("record_every").count(1);
  }

  if (r.has("checks")) {
    const Field c = r.at("checks");
    c.allow({"structural_samples"});
    if (c.has("structural_samples"))
      cfg.structural_samples = c.at("structural_samples").count(0);
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const bool is_json = path.extension() == ".json";
  ScenarioConfig cfg = parse_config(buf.str(), is_json, path.parent_path().empty() ? "." : path.parent_path());
  cfg.source = path;
  return cfg;
}

void apply_overrides(ScenarioConfig &config, const Overrides &o) {
  if (o.out)
    config.output = *o.out;
  if (o.threads) {
    if (*o.threads < 1)
      throw ConfigError("--threads: must be >= 1");
    config.threads = *o.threads;
  }
  if (o.tolerance) {
    if (!(*o.tolerance > 0.0) || !std::isfinite(*o.tolerance))
      throw ConfigError("--tol: must be a positive number");
    config.tolerance = *o.tolerance;
  }
  if (o.seed)
    config.seed = *o.seed;
}

} // namespace roentgen::cli
