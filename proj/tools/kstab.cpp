// kstab: command-line front end. Reports are JSON with exact values as
// rational strings and floats as 17-significant-digit strings.
#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "kstab/error.hpp"
#include "kstab/futaki.hpp"
#include "kstab/jobspec.hpp"
#include "kstab/lattice.hpp"
#include "kstab/mabuchi.hpp"
#include "kstab/pick.hpp"

using nlohmann::json;
using namespace kstab;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;

struct Common {
  int threads = 1;
  bool no_meta = false;
  int quad_depth = 0;
  std::string quad_ratio;
  double tol = 0.0;
  std::string out;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json rationals(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(r.str());
  return a;
}

json floats(const std::vector<double>& v) {
  json a = json::array();
  for (double d : v) a.push_back(fmt(d));
  return a;
}

json convention_block() {
  const Conventions c;
  return {{"qnm1_factor", c.qnm1_factor.str()},
          {"divergence_factor", c.divergence_factor.str()},
          {"W_constant", "1"},
          {"weight", "R - f"}};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

GradedQuadratureSpec quadrature_spec(const Common& c, const JobSpec* spec) {
  GradedQuadratureSpec q;
  if (spec) {
    if (spec->options.quad_depth) q.depth = *spec->options.quad_depth;
    if (spec->options.quad_ratio) q.ratio = *spec->options.quad_ratio;
    if (spec->options.tolerance) q.tolerance = *spec->options.tolerance;
  }
  if (c.quad_depth > 0) q.depth = c.quad_depth;
  if (!c.quad_ratio.empty()) q.ratio = Rational::parse(c.quad_ratio);
  if (c.tol > 0.0) q.tolerance = c.tol;
  q.validate();
  return q;
}

void emit(const Common& c, const std::string& command, json report, const std::string& summary) {
  report["command"] = command;
  report["schema"] = kSchema;
  report["convention"] = convention_block();
  if (!c.no_meta) report["meta"] = {{"timestamp", timestamp()}};
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out);
    if (!f) throw InputError("cannot write '" + c.out + "'");
    f << text;
    std::cout << summary << "\n";
  }
}

json fit_json(const EhrhartFit& fit) {
  json k = json::array();
  for (auto v : fit.k) k.push_back(v);
  return {{"step", fit.step},         {"k", k},
          {"d_k", rationals(fit.d)},  {"w_k", rationals(fit.w)},
          {"d_poly", rationals(fit.d_poly)}, {"w_poly", rationals(fit.w_poly)},
          {"verified_samples", fit.verified_samples},
          {"A", fit.A.str()}, {"B", fit.B.str()}, {"C", fit.C.str()}, {"D", fit.D.str()},
          {"F0", fit.F0.str()}, {"F1", fit.F1.str()}};
}

int run_futaki(const Common& c, const std::string& spec_path, bool oracle, std::int64_t kmax, const std::string& r_text) {
  const JobSpec spec = load_job(spec_path);
  const RootSystem rs = spec.build_root_system();
  const RationalPolytope p = spec.polytope.build();
  const PiecewiseAffine f = spec.build_f();
  const Rational r = !r_text.empty() ? Rational::parse(r_text) : spec.R ? *spec.R : default_R(p, f);
  const std::int64_t km = kmax > 0 ? kmax : spec.options.kmax.value_or(0);

  FutakiReport rep = oracle ? futaki_cross_check(rs, p, f, r, km) : futaki_report(rs, p, f);
  rep.R = r;
  json j = {{"vol_W", rep.vol_W.str()}, {"a", rep.a.str()}, {"F1_closed", rep.F1_closed.str()}, {"R", r.str()}};
  std::string summary = "F1 = " + rep.F1_closed.str();
  if (oracle) {
    j["F1_oracle"] = rep.F1_oracle->str();
    j["fit"] = fit_json(*rep.fit);
    j["fit_shifted"] = fit_json(*rep.fit_shifted);
    j["r_independent"] = rep.r_independent;
    j["agreement"] = rep.agreement;
    summary += rep.agreement ? " (oracle agrees)" : " (oracle DISAGREES: " + rep.F1_oracle->str() + ")";
  }
  emit(c, "futaki", j, summary);
  return oracle && !rep.agreement ? kCheckFailed : kOk;
}

int run_pick(const Common& c, const std::string& spec_path, const std::string& kset) {
  const JobSpec spec = load_job(spec_path);
  if (!spec.h) throw InputError("spec field 'h': missing (pick needs a polynomial h)");
  const RationalPolytope p = spec.polytope.build();
  std::vector<std::int64_t> ks = spec.options.kset;
  if (!kset.empty()) {
    ks.clear();
    for (long k : parse_int_list(kset, "--kset")) ks.push_back(k);
  }
  if (ks.empty()) ks = default_pick_samples();
  const AsymptoticFit fit = pick_fit(p, *spec.h, ks);
  json k = json::array(), decay = json::array(), ratios = json::array();
  for (auto v : fit.k) k.push_back(v);
  for (const auto& [kk, d] : fit.decay) decay.push_back({{"k", kk}, {"log2_ratio", fmt(d)}});
  for (const auto& [kk, d] : fit.ratios) ratios.push_back({{"k", kk}, {"ratio", fmt(d)}});
  json j = {{"c_top", fit.c_top.str()},
            {"c_next", fit.c_next.str()},
            {"k", k},
            {"sums", rationals(fit.sums_exact)},
            {"residuals", rationals(fit.residuals_exact)},
            {"normalized_residuals", floats(fit.normalized)},
            {"decay", decay},
            {"doubling_ratios", ratios},
            {"pass", fit.pass},
            {"message", fit.message}};
  emit(c, "pick", j, std::string(fit.pass ? "PASS: " : "FAIL: ") + fit.message);
  return fit.pass ? kOk : kCheckFailed;
}

SymplecticPotential potential_of(const JobSpec& spec, const RationalPolytope& p, const std::string& path) {
  PotentialSpec ps = !path.empty() ? load_potential(path) : spec.potential.value_or(PotentialSpec{});
  if (!ps.g.is_zero() && ps.g.nvars() != p.dim()) throw InputError("potential arity does not match polytope dimension");
  return SymplecticPotential(p, ps.g, ps.canonical);
}

int run_mabuchi(const Common& c, const std::string& spec_path, const std::string& potential, std::string a_name,
                const std::string& csv, int grid) {
  const JobSpec spec = load_job(spec_path);
  const RootSystem rs = spec.build_root_system();
  const RationalPolytope p = spec.polytope.build();
  const SymplecticPotential u = potential_of(spec, p, potential);
  if (a_name.empty()) a_name = spec.options.a_preset.value_or("paper");
  const APreset preset = parse_a_preset(a_name);
  const Integrand a = make_A(rs, p, preset);
  const MabuchiResult r = mabuchi_eval(rs, u, a, quadrature_spec(c, &spec));

  const WeightField w(rs);
  std::ofstream out(csv);
  if (!out) throw InputError("cannot write '" + csv + "'");
  for (int i = 0; i < p.dim(); ++i) out << "x" << (i + 1) << ",";
  out << "r\n";
  for (const auto& x : interior_grid(p, grid)) {
    for (Eigen::Index i = 0; i < x.size(); ++i) out << fmt(x(i)) << ",";
    out << fmt(el_residual(w, u, a, x)) << "\n";
  }

  json j = {{"A", to_string(preset)},
            {"value", fmt(r.value)},
            {"error_estimate", fmt(r.error)},
            {"within_tolerance", r.within_tolerance},
            {"log_det_term", fmt(r.log_det_term)},
            {"boundary_term", fmt(r.boundary_term)},
            {"linear_term", fmt(r.linear_term)},
            {"residual_csv", csv}};
  emit(c, "mabuchi", j, "F_A = " + fmt(r.value) + " (error " + fmt(r.error) + ")");
  return r.within_tolerance ? kOk : kCheckFailed;
}

int run_scalar(const Common& c, const std::string& spec_path, const std::string& potential, int grid, double identity_tol) {
  const JobSpec spec = load_job(spec_path);
  const RootSystem rs = spec.build_root_system();
  const RationalPolytope p = spec.polytope.build();
  const SymplecticPotential u = potential_of(spec, p, potential);
  u.validate();
  const Rational a = average_scalar(rs, p);
  const Rational vol = volume_W(rs, p);
  const WeightField w(rs);
  const auto q = graded_integral(
      [&](const Eigen::VectorXd& x) { return scalar_curvature(w, u, x) * w.value(x); }, p, quadrature_spec(c, &spec));
  const double expected = (a * vol).to_double();
  const double discrepancy = std::abs(q.value - expected);
  json samples = json::array();
  for (const auto& x : interior_grid(p, grid)) {
    json xs = json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) xs.push_back(fmt(x(i)));
    samples.push_back({{"x", xs}, {"S", fmt(scalar_curvature(w, u, x))}});
  }
  const bool ok = discrepancy <= identity_tol;
  json j = {{"a", a.str()},
            {"vol_W", vol.str()},
            {"integral_S_W", fmt(q.value)},
            {"a_vol_W", a * vol == Rational(0) ? "0" : (a * vol).str()},
            {"discrepancy", fmt(discrepancy)},
            {"identity_holds", ok},
            {"samples", samples}};
  emit(c, "scalar", j, "int S W = " + fmt(q.value) + ", a Vol_W = " + (a * vol).str());
  return ok ? kOk : kCheckFailed;
}

int run_dims(const std::string& series, int rank, const std::string& lambda) {
  const RootSystem rs = RootSystem::classical(parse_series(series), rank);
  const Rational d = dimension(rs, parse_int_list(lambda, "--lambda"));
  std::cout << d.str() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kstab: Futaki invariants, lattice asymptotics and Mabuchi functionals of toric fibrations"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--threads", c.threads, "Worker threads for lattice sums")->check(CLI::PositiveNumber);
  app.add_flag("--no-meta", c.no_meta, "Omit the timestamp block from reports");
  app.add_option("--quad-depth", c.quad_depth, "Graded quadrature depth");
  app.add_option("--quad-ratio", c.quad_ratio, "Graded quadrature ratio p/q");
  app.add_option("--tol", c.tol, "Quadrature tolerance");

  std::string spec_path, potential, a_name, kset, r_text, csv = "el_residual.csv", series, lambda;
  bool oracle = false;
  std::int64_t kmax = 0;
  int rank = 0, grid = 10;
  double identity_tol = 1e-6;

  auto* futaki = app.add_subcommand("futaki", "Closed-form Futaki invariant, optionally cross-checked by lattice counts");
  futaki->add_option("--spec", spec_path, "Job spec")->required();
  futaki->add_flag("--oracle", oracle, "Run the lattice-count oracle");
  futaki->add_option("--kmax", kmax, "Largest dilation sampled by the oracle");
  futaki->add_option("--R", r_text, "Height R of the lifted polytope");
  futaki->add_option("--out", c.out, "Report file");

  auto* pick = app.add_subcommand("pick", "Two-term lattice-sum asymptotics");
  pick->add_option("--spec", spec_path, "Job spec")->required();
  pick->add_option("--kset", kset, "Comma-separated dilations");
  pick->add_option("--out", c.out, "Report file");

  auto* mabuchi = app.add_subcommand("mabuchi", "Mabuchi functional and Euler-Lagrange residual");
  mabuchi->add_option("--spec", spec_path, "Job spec")->required();
  mabuchi->add_option("--potential", potential, "Potential file");
  mabuchi->add_option("--A", a_name, "A preset: paper, csc or zero");
  mabuchi->add_option("--csv", csv, "Residual grid output");
  mabuchi->add_option("--grid", grid, "Grid points per axis");
  mabuchi->add_option("--out", c.out, "Report file");

  auto* scalar = app.add_subcommand("scalar", "Scalar curvature samples and the average identity");
  scalar->add_option("--spec", spec_path, "Job spec")->required();
  scalar->add_option("--potential", potential, "Potential file");
  scalar->add_option("--grid", grid, "Grid points per axis");
  scalar->add_option("--identity-tol", identity_tol, "Tolerance for int S W = a Vol_W");
  scalar->add_option("--out", c.out, "Report file");

  auto* dims = app.add_subcommand("dims", "Weyl dimension of an irreducible representation");
  dims->add_option("--series", series, "A, B, C, D, G2 or F4")->required();
  dims->add_option("--rank", rank, "Rank")->required();
  dims->add_option("--lambda", lambda, "Highest weight, comma separated")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    set_thread_count(c.threads);
    if (*futaki) return run_futaki(c, spec_path, oracle, kmax, r_text);
    if (*pick) return run_pick(c, spec_path, kset);
    if (*mabuchi) return run_mabuchi(c, spec_path, potential, a_name, csv, grid);
    if (*scalar) return run_scalar(c, spec_path, potential, grid, identity_tol);
    if (*dims) return run_dims(series, rank, lambda);
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
