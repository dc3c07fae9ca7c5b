#include "runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "qelab/identities.hpp"

namespace qe::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
// Bessel-product experiments are tuned for this scale; larger r still runs but is noted.
constexpr double kDeskRMax = 60.0;

constexpr double kTolOrbit = 1e-8;
constexpr double kTolEigen = 1e-4;
constexpr double kTolRoute = 1e-3;
constexpr double kTolEhrenfest = 1e-8;
constexpr double kTolRankin = 1e-4;
constexpr double kTolQuasimodeImag = 1e-8;
constexpr double kTolQuasimodeRoutes = 1e-6;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---- config parsing --------------------------------------------------------------

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + "." + it.key() + ": unknown field");
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field + ": expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError(field + ": expected an integer");
  return j.get<int>();
}

std::vector<double> get_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

cplx get_complex(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  auto v = get_numbers(j, field);
  if (v.size() != 2) throw ConfigError(field + ": expected a number or [re, im]");
  return {v[0], v[1]};
}

BumpSpec parse_psi_unchecked(const json& j, const BumpSpec& base) {
  check_keys(j, "psi", {"shape", "lo", "hi", "norm", "sigma", "samples"});
  double lo = j.contains("lo") ? get_number(j["lo"], "psi.lo") : base.support_lo;
  double hi = j.contains("hi") ? get_number(j["hi"], "psi.hi") : base.support_hi;
  double norm = j.contains("norm") ? get_number(j["norm"], "psi.norm") : base.normalization;
  std::string shape = j.value("shape", std::string("smooth"));
  if (shape == "smooth") return BumpSpec::smooth(lo, hi, norm);
  if (shape == "gaussian")
    return BumpSpec::gaussian(lo, hi, j.contains("sigma") ? get_number(j["sigma"], "psi.sigma") : 0.125, norm);
  if (shape == "custom") {
    if (!j.contains("samples")) throw ConfigError("psi.samples: required for shape \"custom\"");
    return BumpSpec::custom(lo, hi, get_numbers(j["samples"], "psi.samples"), norm);
  }
  throw ConfigError("psi.shape: expected \"smooth\", \"gaussian\" or \"custom\"");
}

// the factories validate eagerly; report their complaints against the psi block
BumpSpec parse_psi(const json& j, const BumpSpec& base) {
  try {
    return parse_psi_unchecked(j, base);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("psi: ") + e.what());
  }
}

// ---- sweeps ----------------------------------------------------------------------

using Task = std::function<ResultRow()>;

std::vector<ResultRow> run_tasks(const std::vector<Task>& tasks, int threads, std::vector<std::string>& notes) {
  std::vector<ResultRow> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      auto t0 = std::chrono::steady_clock::now();
      try {
        rows[i] = tasks[i]();
      } catch (const std::exception& e) {
        rows[i] = ResultRow{};
        rows[i].pass = false;
        rows[i].has_prediction = false;
        errors[i] = e.what();
      }
      rows[i].wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  int n = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) notes.push_back("error in row " + std::to_string(i) + ": " + errors[i]);
  return rows;
}

QuasimodeProfile build_profile(ProfileShape shape, double center, double width, int nodes) {
  return shape == ProfileShape::gaussian ? make_gaussian_profile(center, width, nodes)
                                         : make_bump_profile(center, width, nodes);
}

double rel_dev(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ResultTable run_identities(const ExperimentConfig&) {
  ResultTable t;
  t.param_names = {"identity", "parameters"};
  t.extra_names = {"abs_err", "rel_err"};
  for (auto& r : run_identity_suite()) {
    ResultRow row;
    row.params = {r.name, r.detail};
    row.computed = r.lhs;
    row.predicted = r.rhs;
    row.tolerance = r.tolerance;
    row.pass = r.pass;
    row.extra = {num(r.abs_err), num(r.rel_err)};
    t.rows.push_back(row);
  }
  return t;
}

ResultTable run_eisenstein(const ExperimentConfig& c, int threads) {
  ResultTable t;
  t.param_names = {"check", "x", "y", "s_re", "s_im", "k"};
  t.extra_names = {"rel_err"};
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.9, 2.5);
  std::vector<UpperHalfPoint> grid;
  for (int i = 0; i < 10; ++i) {
    double x = ux(rng);
    double y = uy(rng);
    grid.push_back({x, y});
  }
  const cplx s(2.0, 0.0);
  std::vector<Task> tasks;
  std::vector<int> ks{0};
  if (c.k != 0) ks.push_back(c.k);
  for (int k : ks)
    for (auto z : grid)
      tasks.push_back([=, &c] {
        ResultRow row;
        row.params = {"expansion_vs_orbit", num(z.x), num(z.y), num(s.real()), num(s.imag()), std::to_string(k)};
        EisensteinValue v = k == 0 ? eisenstein_weight0_detail(z, s, c.policy.truncation)
                                   : eisenstein_weight2k_detail(z, s, k, c.policy.truncation);
        row.computed = v.value;
        row.predicted = eisenstein_orbit_sum(z, s, k);
        row.tail_bound = v.tail_bound + v.rounding;
        row.tolerance = kTolOrbit;
        double e = rel_dev(row.computed, row.predicted);
        row.pass = e <= kTolOrbit;
        row.extra = {num(e)};
        return row;
      });
  for (double r : c.r_values)
    tasks.push_back([=, &c] {
      // five-point Laplacian at z = 0.1 + 1.5i, step 1e-3
      const UpperHalfPoint z{0.1, 1.5};
      const double h = 1e-3;
      const cplx sr(0.5, r);
      auto E = [&](double x, double y) { return eisenstein_weight0({x, y}, sr, c.policy.truncation); };
      cplx e0 = E(z.x, z.y);
      cplx lap = E(z.x + h, z.y) + E(z.x - h, z.y) + E(z.x, z.y + h) + E(z.x, z.y - h) - 4.0 * e0;
      ResultRow row;
      row.params = {"eigen_residual", num(z.x), num(z.y), "0.5", num(r), "0"};
      row.computed = -z.y * z.y * lap / (h * h);
      row.predicted = (0.25 + r * r) * e0;
      row.tolerance = kTolEigen;
      double e = rel_dev(row.computed, row.predicted);
      row.pass = e <= kTolEigen;
      row.extra = {num(e)};
      return row;
    });
  t.rows = run_tasks(tasks, threads, t.notes);
  return t;
}

ResultTable run_mu_scan(const ExperimentConfig& c, int threads) {
  ResultTable t;
  t.param_names = {"r", "dr", "k"};
  t.extra_names = {"constant_re", "constant_im", "coefficient_re", "coefficient_im", "in_out_abs", "constant_bound",
                   "quadrature_re", "quadrature_im", "route_rel_dev", "cusp_tail_bound", "y_too_small"};
  const double psi_dy_y = mellin_of_bump(c.psi, 0.0).real();
  std::vector<Task> tasks;
  for (double r : c.r_values)
    for (double dr : c.delta_r_values)
      tasks.push_back([=, &c] {
        SpectralPair pair = SpectralPair::around(r, dr);
        IncompleteEisensteinTest f{c.k, c.psi};
        ResultRow row;
        row.params = {num(r), num(dr), std::to_string(c.k)};
        MeasureReport rep = mu_pair_unfolded(f, pair, c.policy);
        row.computed = rep.value;
        row.predicted = rep.prediction;
        row.has_prediction = rep.prediction != 0.0;
        row.tail_bound = rep.tail_bound;
        double cbound = 2.0 * psi_dy_y;
        if (c.k != 0)
          cbound *= std::max(1.0, std::abs(eisenstein_constant_coefficient(cplx(0.5, pair.r2), -c.k)));
        // equality at dr = 0, so allow quadrature-level slack
        bool ok = std::abs(rep.incoming_outgoing_part) <= cbound * (1.0 + 1e-9);
        std::string qre, qim, rd, ct, ytl;
        if (c.route != Route::unfolded) {
          QuadratureReport q = mu_pair_quadrature_detail(f, pair, c.policy);
          double e = rel_dev(q.value, rep.value);
          double slack = q.cusp_tail_bound + q.series_tail + rep.tail_bound;
          ok = ok && (e <= kTolRoute || std::abs(q.value - rep.value) <= slack);
          qre = num(q.value.real());
          qim = num(q.value.imag());
          rd = num(e);
          ct = num(q.cusp_tail_bound);
          ytl = q.y_too_small ? "1" : "0";
          if (c.route == Route::quadrature) row.computed = q.value;
          row.tail_bound += q.cusp_tail_bound + q.series_tail;
        }
        row.tolerance = kTolRoute;
        row.pass = ok;
        row.extra = {num(rep.constant_term_part.real()), num(rep.constant_term_part.imag()),
                     num(rep.coefficient_sum_part.real()), num(rep.coefficient_sum_part.imag()),
                     num(std::abs(rep.incoming_outgoing_part)), num(cbound), qre, qim, rd, ct, ytl};
        return row;
      });
  t.rows = run_tasks(tasks, threads, t.notes);
  t.notes.push_back("pass = incoming/outgoing constant-term piece within its bound and, when the quadrature route runs, the routes agree");
  return t;
}

ResultTable run_quasimode(const ExperimentConfig& c, int threads) {
  ResultTable t;
  t.param_names = {"r", "width", "k", "nodes"};
  t.extra_names = {"value_over_2logr", "ehrenfest_mass", "direct_re", "direct_im", "direct_rel_dev"};
  const double area = (6.0 / kPi) * bump_area_integral(c.psi);
  std::vector<Task> tasks;
  for (double r : c.r_values)
    for (double w : c.profile.widths)
      tasks.push_back([=, &c] {
        QuasimodeProfile h = build_profile(c.profile.shape, r, w, c.profile.nodes);
        ResultRow row;
        row.params = {num(r), num(w), std::to_string(c.k), std::to_string(c.profile.nodes)};
        row.computed = mu_quasimode(IncompleteEisensteinTest{c.k, c.psi}, h, c.policy);
        double L = std::log(r);
        double mass = ehrenfest_mass_kernel(h);
        // weight 0: (6/pi) log r int F times the averaged kernel; weight 2k: the O(1) coefficient
        row.predicted = c.k == 0 ? cplx(area * L * mass) : weight_k_coefficient(c.psi, c.k, h);
        std::string dre, dim, drd;
        bool ok = is_finite(row.computed);
        if (c.k == 0) {
          double scale = std::max(1.0, std::abs(row.computed));
          ok = ok && row.computed.real() >= -kTolQuasimodeImag * scale &&
               std::abs(row.computed.imag()) <= kTolQuasimodeImag * scale;
          if (c.direct_quasimode) {
            cplx d = mu_quasimode_direct(c.psi, h, c.policy);
            double e = rel_dev(row.computed, d);
            ok = ok && e <= kTolQuasimodeRoutes;
            dre = num(d.real());
            dim = num(d.imag());
            drd = num(e);
          }
        }
        row.tolerance = c.k == 0 ? kTolQuasimodeImag : 0.0;
        row.pass = ok;
        row.extra = {num(std::abs(row.computed) / (2.0 * L)), num(mass), dre, dim, drd};
        return row;
      });
  t.rows = run_tasks(tasks, threads, t.notes);
  t.notes.push_back("pass (weight 0) = value real and nonnegative to 1e-8, routes agree when the direct route runs");
  return t;
}

ResultTable run_ehrenfest(const ExperimentConfig& c, int threads) {
  ResultTable t;
  t.param_names = {"L", "width", "shape"};
  t.extra_names = {"gaussian_closed_form"};
  std::vector<Task> tasks;
  for (double L : c.log_r_values)
    for (double w : c.profile.widths)
      tasks.push_back([=, &c] {
        QuasimodeProfile h = build_profile(c.profile.shape, std::exp(L), w, c.profile.nodes);
        ResultRow row;
        bool gauss = c.profile.shape == ProfileShape::gaussian;
        row.params = {num(L), num(w), gauss ? "gaussian" : "bump"};
        row.computed = ehrenfest_mass(h);
        row.predicted = ehrenfest_mass_kernel(h);
        row.tolerance = kTolEhrenfest;
        row.pass = std::abs(row.computed - row.predicted) <= kTolEhrenfest;
        std::string cf;
        if (gauss) cf = num(std::sqrt(kPi) * std::erf(2.0 * L * w) / (4.0 * L * w));
        row.extra = {cf};
        return row;
      });
  t.rows = run_tasks(tasks, threads, t.notes);
  t.notes.push_back("computed = window average of |h^|^2, predicted = kernel double integral");
  return t;
}

ResultTable run_rankin(const ExperimentConfig& c, int threads) {
  ResultTable t;
  t.param_names = {"r1", "r2", "s_re", "s_im"};
  t.extra_names = {"rel_err"};
  HolomorphicCuspFormTest f = discriminant_form(200);
  cplx s = c.s.value_or(cplx(f.k + 0.75, 0.0));
  std::vector<Task> tasks;
  for (auto [r1, r2] : c.pairs)
    tasks.push_back([=] {
      RankinSelbergResult rs = rankin_selberg_check(f, SpectralPair::of(r1, r2), s);
      ResultRow row;
      row.params = {num(r1), num(r2), num(s.real()), num(s.imag())};
      row.computed = rs.lhs;
      row.predicted = rs.rhs;
      row.tolerance = kTolRankin;
      row.pass = rs.rel_err <= kTolRankin;
      row.extra = {num(rs.rel_err)};
      return row;
    });
  t.rows = run_tasks(tasks, threads, t.notes);
  t.notes.push_back("test form: weight-12 discriminant form, tau(n) for n <= 200");
  return t;
}

}  // namespace

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::identities: return "identities";
    case Experiment::eisenstein_check: return "eisenstein_check";
    case Experiment::mu_scan: return "mu_scan";
    case Experiment::quasimode_scan: return "quasimode_scan";
    case Experiment::ehrenfest: return "ehrenfest";
    case Experiment::rankin_selberg: return "rankin_selberg";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(const std::string& s) {
  for (auto e : {Experiment::identities, Experiment::eisenstein_check, Experiment::mu_scan, Experiment::quasimode_scan,
                 Experiment::ehrenfest, Experiment::rankin_selberg}) {
    std::string n = experiment_name(e);
    std::string dashed = n;
    for (auto& ch : dashed)
      if (ch == '_') ch = '-';
    if (s == n || s == dashed) return e;
  }
  return std::nullopt;
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.psi = BumpSpec::smooth(1.0, 2.0);
  switch (e) {
    case Experiment::identities:
      break;
    case Experiment::eisenstein_check:
      c.r_values = {10.0};
      c.k = 1;
      break;
    case Experiment::mu_scan:
      c.r_values = {30.0};
      c.delta_r_values = {0.0, 0.05, 0.1, 0.2};
      break;
    case Experiment::quasimode_scan:
      c.r_values = {20.0, 40.0};
      c.profile.widths = {0.1};
      c.profile.nodes = 64;
      break;
    case Experiment::ehrenfest:
      c.log_r_values = {3.0, 5.0, 10.0};
      c.profile.shape = ProfileShape::bump;
      c.profile.widths = {0.01, 0.3, 1.0};
      break;
    case Experiment::rankin_selberg:
      c.pairs = {{5.0, 5.0}, {8.0, 8.1}};
      break;
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text, std::optional<Experiment> expected) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + line_col(text, e.byte) + ": " + e.what());
  }
  check_keys(j, "config", {"experiment", "r_values", "delta_r_values", "log_r_values", "pairs", "s", "profile", "psi",
                           "k", "route", "direct_quasimode", "policy", "output_path", "seed", "timing"});
  std::optional<Experiment> e = expected;
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) throw ConfigError("config.experiment: expected a string");
    auto parsed = parse_experiment(j["experiment"].get<std::string>());
    if (!parsed) throw ConfigError("config.experiment: unknown experiment \"" + j["experiment"].get<std::string>() + "\"");
    if (expected && *parsed != *expected)
      throw ConfigError(std::string("config.experiment: file is for ") + experiment_name(*parsed) +
                        " but the subcommand is " + experiment_name(*expected));
    e = parsed;
  }
  if (!e) throw ConfigError("config.experiment: missing");
  ExperimentConfig c = default_config(*e);
  c.source = j;
  if (j.contains("r_values")) c.r_values = get_numbers(j["r_values"], "config.r_values");
  if (j.contains("delta_r_values")) c.delta_r_values = get_numbers(j["delta_r_values"], "config.delta_r_values");
  if (j.contains("log_r_values")) c.log_r_values = get_numbers(j["log_r_values"], "config.log_r_values");
  if (j.contains("pairs")) {
    if (!j["pairs"].is_array()) throw ConfigError("config.pairs: expected an array of [r1, r2]");
    c.pairs.clear();
    for (std::size_t i = 0; i < j["pairs"].size(); ++i) {
      auto v = get_numbers(j["pairs"][i], "config.pairs[" + std::to_string(i) + "]");
      if (v.size() != 2) throw ConfigError("config.pairs[" + std::to_string(i) + "]: expected [r1, r2]");
      c.pairs.emplace_back(v[0], v[1]);
    }
  }
  if (j.contains("s")) c.s = get_complex(j["s"], "config.s");
  if (j.contains("k")) c.k = get_int(j["k"], "config.k");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("config.seed: expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("route")) {
    std::string r = j["route"].is_string() ? j["route"].get<std::string>() : "";
    if (r == "unfolded") c.route = Route::unfolded;
    else if (r == "quadrature") c.route = Route::quadrature;
    else if (r == "both") c.route = Route::both;
    else throw ConfigError("config.route: expected \"unfolded\", \"quadrature\" or \"both\"");
  }
  if (j.contains("direct_quasimode")) {
    if (!j["direct_quasimode"].is_boolean()) throw ConfigError("config.direct_quasimode: expected true or false");
    c.direct_quasimode = j["direct_quasimode"].get<bool>();
  }
  if (j.contains("timing")) {
    if (!j["timing"].is_boolean()) throw ConfigError("config.timing: expected true or false");
    c.timing_column = j["timing"].get<bool>();
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) throw ConfigError("config.output_path: expected a string");
    c.output_path = j["output_path"].get<std::string>();
  }
  if (j.contains("psi")) c.psi = parse_psi(j["psi"], c.psi);
  if (j.contains("profile")) {
    const json& p = j["profile"];
    check_keys(p, "config.profile", {"shape", "widths", "nodes"});
    if (p.contains("shape")) {
      std::string s = p["shape"].is_string() ? p["shape"].get<std::string>() : "";
      if (s == "gaussian") c.profile.shape = ProfileShape::gaussian;
      else if (s == "bump") c.profile.shape = ProfileShape::bump;
      else throw ConfigError("config.profile.shape: expected \"gaussian\" or \"bump\"");
    }
    if (p.contains("widths")) c.profile.widths = get_numbers(p["widths"], "config.profile.widths");
    if (p.contains("nodes")) c.profile.nodes = get_int(p["nodes"], "config.profile.nodes");
  }
  if (j.contains("policy")) {
    const json& p = j["policy"];
    check_keys(p, "config.policy", {"tail_target", "n_max_cap", "y_cap", "y_cut", "tail_tolerance", "gauss_order"});
    auto& tp = c.policy.truncation;
    if (p.contains("tail_target")) tp.tail_target = get_number(p["tail_target"], "config.policy.tail_target");
    if (p.contains("n_max_cap")) tp.n_max_cap = get_int(p["n_max_cap"], "config.policy.n_max_cap");
    if (p.contains("y_cap")) tp.y_cap = get_number(p["y_cap"], "config.policy.y_cap");
    if (p.contains("y_cut")) c.policy.y_cut = get_number(p["y_cut"], "config.policy.y_cut");
    if (p.contains("tail_tolerance"))
      c.policy.tail_tolerance = get_number(p["tail_tolerance"], "config.policy.tail_tolerance");
    if (p.contains("gauss_order")) c.policy.gauss_order = get_int(p["gauss_order"], "config.policy.gauss_order");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<Experiment> expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), expected);
}

void validate_config(const ExperimentConfig& c) {
  try {
    c.policy.truncation.validate();
    c.psi.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(c.psi.support_lo > 0.0)) throw ConfigError("psi.lo: support must lie in (0, inf)");
  if (!(c.policy.y_cut >= 1.0)) throw ConfigError("policy.y_cut: must be at least 1");
  if (c.policy.gauss_order < 2 || c.policy.gauss_order > 64) throw ConfigError("policy.gauss_order: must be in [2, 64]");
  if (std::abs(c.k) > kDefaultKMax) throw ConfigError("k: |k| exceeds k_max = " + std::to_string(kDefaultKMax));
  if (c.profile.nodes < 8 || c.profile.nodes > 512) throw ConfigError("profile.nodes: must be in [8, 512]");
  for (double w : c.profile.widths)
    if (!(w > 0.0)) throw ConfigError("profile.widths: widths must be positive");
  for (double L : c.log_r_values)
    if (!(L > 0.0)) throw ConfigError("log_r_values: L must be positive");
  bool bessel = c.experiment == Experiment::mu_scan || c.experiment == Experiment::quasimode_scan ||
                c.experiment == Experiment::eisenstein_check;
  if (bessel)
    for (double r : c.r_values) {
      if (!(r > 0.0)) throw ConfigError("r_values: r must be positive");
      double span = 0.0;
      if (c.experiment == Experiment::quasimode_scan)
        for (double w : c.profile.widths) span = std::max(span, c.profile.shape == ProfileShape::gaussian ? 8.0 * w : w);
      if (r + span > kDefaultRMax)
        throw ConfigError("r_values: r = " + short_num(r) + " exceeds r_max = " + short_num(kDefaultRMax) +
                          " (including the profile span)");
    }
  if (c.experiment == Experiment::mu_scan)
    for (double dr : c.delta_r_values)
      for (double r : c.r_values)
        if (!(std::abs(dr) < 2.0 * r)) throw ConfigError("delta_r_values: need |dr| < 2r so both parameters stay positive");
  if (c.experiment == Experiment::quasimode_scan && c.k < 0) throw ConfigError("k: quasimode scans need k >= 0");
  for (auto [r1, r2] : c.pairs)
    if (std::max(std::abs(r1), std::abs(r2)) > kDefaultRMax || !(r1 + r2 > 0.0))
      throw ConfigError("pairs: parameters must be positive and within r_max = " + short_num(kDefaultRMax));
  if (c.s && c.s->real() < 6.75) throw ConfigError("s: Re s must be at least k + 3/4 = 6.75 for the weight-12 form");
}

bool ResultTable::all_pass() const {
  for (auto& r : rows)
    if (!r.pass) return false;
  return true;
}

ResultTable run_experiment(const ExperimentConfig& c, int threads) {
  validate_config(c);
  ResultTable t;
  switch (c.experiment) {
    case Experiment::identities: t = run_identities(c); break;
    case Experiment::eisenstein_check: t = run_eisenstein(c, threads); break;
    case Experiment::mu_scan: t = run_mu_scan(c, threads); break;
    case Experiment::quasimode_scan: t = run_quasimode(c, threads); break;
    case Experiment::ehrenfest: t = run_ehrenfest(c, threads); break;
    case Experiment::rankin_selberg: t = run_rankin(c, threads); break;
  }
  t.experiment = experiment_name(c.experiment);
  bool bessel = c.experiment == Experiment::mu_scan || c.experiment == Experiment::quasimode_scan;
  if (bessel)
    for (double r : c.r_values)
      if (r > kDeskRMax) {
        t.notes.push_back("r above " + short_num(kDeskRMax) + " is outside the tuned range; expect long run times");
        break;
      }
  return t;
}

std::string format_table(const ResultTable& t, bool timing_column) {
  std::ostringstream out;
  out << "# experiment=" << t.experiment << "\n";
  out << "# tool=qelab " << kVersion << "\n";
  for (auto& n : t.notes) out << "# " << n << "\n";
  out << "# rows=" << t.rows.size() << " all_pass=" << (t.all_pass() ? "true" : "false") << "\n";
  for (auto& p : t.param_names) out << p << ",";
  out << "computed_re,computed_im,predicted_re,predicted_im,abs_dev,rel_dev,tail_bound,tolerance,pass";
  for (auto& e : t.extra_names) out << "," << e;
  if (timing_column) out << ",wall_s";
  out << "\n";
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (auto& r : t.rows) {
    for (std::size_t i = 0; i < t.param_names.size(); ++i) out << field(i < r.params.size() ? r.params[i] : "") << ",";
    out << num(r.computed.real()) << "," << num(r.computed.imag()) << ",";
    if (r.has_prediction) {
      out << num(r.predicted.real()) << "," << num(r.predicted.imag()) << "," << num(std::abs(r.computed - r.predicted))
          << "," << num(rel_dev(r.computed, r.predicted));
    } else {
      out << ",,,";
    }
    out << "," << num(r.tail_bound) << "," << num(r.tolerance) << "," << (r.pass ? "true" : "false");
    for (std::size_t i = 0; i < t.extra_names.size(); ++i) out << "," << field(i < r.extra.size() ? r.extra[i] : "");
    if (timing_column) out << "," << num(r.wall_seconds);
    out << "\n";
  }
  return out.str();
}

json make_manifest(const ExperimentConfig& c, const ResultTable& t, int threads) {
  json m;
  m["tool"] = "qelab";
  m["version"] = kVersion;
  m["experiment"] = t.experiment;
  m["config"] = c.source.is_null() ? json::object() : c.source;
  json resolved;
  resolved["r_values"] = c.r_values;
  resolved["delta_r_values"] = c.delta_r_values;
  resolved["log_r_values"] = c.log_r_values;
  resolved["k"] = c.k;
  resolved["seed"] = c.seed;
  resolved["psi"] = {{"lo", c.psi.support_lo}, {"hi", c.psi.support_hi}, {"norm", c.psi.normalization},
                     {"shape", static_cast<int>(c.psi.shape)}};
  resolved["profile"] = {{"shape", c.profile.shape == ProfileShape::gaussian ? "gaussian" : "bump"},
                         {"widths", c.profile.widths},
                         {"nodes", c.profile.nodes}};
  resolved["policy"] = {{"tail_target", c.policy.truncation.tail_target},
                        {"n_max_cap", c.policy.truncation.n_max_cap},
                        {"y_cap", c.policy.truncation.y_cap},
                        {"y_cut", c.policy.y_cut},
                        {"tail_tolerance", c.policy.tail_tolerance},
                        {"gauss_order", c.policy.gauss_order}};
  m["resolved_config"] = resolved;
  m["tolerances"] = {{"identity_series", kTolSeries},      {"identity_gamma_zeta", kTolGammaZeta},
                     {"orbit_sum", kTolOrbit},             {"eigen_residual", kTolEigen},
                     {"route_agreement", kTolRoute},       {"ehrenfest", kTolEhrenfest},
                     {"rankin_selberg", kTolRankin},       {"quasimode_imaginary", kTolQuasimodeImag},
                     {"quasimode_routes", kTolQuasimodeRoutes}};
  std::size_t failed = 0;
  std::vector<double> walls;
  for (auto& r : t.rows) {
    failed += r.pass ? 0 : 1;
    walls.push_back(r.wall_seconds);
  }
  m["rows"] = t.rows.size();
  m["failed"] = failed;
  m["threads"] = threads;
  m["wall_seconds"] = walls;
  std::time_t now = std::time(nullptr);
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["created_utc"] = ts;
  return m;
}

std::string default_output_path(Experiment e) {
  const char* dir = std::getenv("QELAB_OUTPUT_DIR");
  std::string d = dir && *dir ? dir : ".";
  if (d.back() != '/') d += '/';
  return d + experiment_name(e) + ".csv";
}

std::string format_prediction(const PredictionArgs& a) {
  std::ostringstream out;
  char buf[256];
  double L = std::log(a.rj);
  std::snprintf(buf, sizeof buf, "r_j = %.10g   log r_j = %.10g   int F = %.10g\n", a.rj, L, bump_area_integral(a.psi));
  out << buf;
  std::snprintf(buf, sizeof buf, "%12s %16s %22s %22s %30s\n", "dr", "theta", "kernel (exact)", "D(dr) (log window)",
                "main term");
  out << buf;
  for (double dr : a.delta_r) {
    SpectralPair p = SpectralPair::around(a.rj, dr);
    MainTermPrediction m = main_term_weight0(a.psi, p);
    cplx D = kernel_d(dr, L);
    std::snprintf(buf, sizeof buf, "%12.6g %16.10g %10.6f%+10.6fi %10.6f%+10.6fi %14.8g%+14.8gi\n", dr, m.theta,
                  m.kernel_value.real(), m.kernel_value.imag(), D.real(), D.imag(), m.main_term.real(),
                  m.main_term.imag());
    out << buf;
  }
  if (a.width > 0.0) {
    QuasimodeProfile h = build_profile(a.shape, a.rj, a.width, a.nodes);
    std::snprintf(buf, sizeof buf, "profile %s width %.6g: Ehrenfest mass %.12g (kernel route %.12g)\n",
                  a.shape == ProfileShape::gaussian ? "gaussian" : "bump", a.width, ehrenfest_mass(h),
                  ehrenfest_mass_kernel(h));
    out << buf;
  }
  return out.str();
}

}  // namespace qe::cli
