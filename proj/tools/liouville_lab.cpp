// liouville_lab: thresholds, identity verification and radial simulation for
// stable solutions of the biharmonic problem Delta^2 u = u^p.
//
// Subcommands: threshold, sweep, verify, radial, rayleigh, report.
// Output is deterministic: fixed key order, explicit significant digits,
// sweep rows emitted in input order regardless of --jobs.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "liouville/io.hpp"
#include "liouville/radial.hpp"
#include "liouville/rayleigh.hpp"
#include "liouville/thresholds.hpp"
#include "liouville/verifier.hpp"

namespace {

using liouville::Json;

struct CommonOpts {
  std::string format = "json";  // json | csv | text
  std::string out;              // empty -> stdout
  std::string precision = "double";
  int sig_digits = 12;
  int jobs = 1;
  std::uint64_t seed = 0x5eed0001ULL;
};

struct ThresholdOpts {
  double p = 0;
  std::optional<int> N;
};

struct SweepOpts {
  double p_from = 0, p_to = 0;
  int steps = 0;
  bool log_spacing = false;
};

struct VerifyOpts {
  double p_min = 1.001, p_max = 1000.0;
  int steps = 200;
  int samples = 50;
  int n_min = 5, n_max = 30;
  double tol = 1e-9;
};

struct RadialOpts {
  double p = 0;
  int N = 0;
  std::optional<double> a;
  bool do_shoot = false;
  double r_max = 1e3;
  double tol = 1e-12;
  std::string profile_path;
};

struct RayleighOpts {
  std::optional<double> p;
  int N = 0;
  bool pure = false;
  double decades = 6.0;
  int basis = 512;
  std::optional<double> r_lo, r_hi;
};

struct ReportOpts {
  double p = 0;
  std::optional<int> N;
};

void emit(const CommonOpts& c, const std::string& payload) {
  if (c.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + c.out);
  f << payload;
}

[[noreturn]] void reject_csv(const char* cmd) {
  throw std::invalid_argument(std::string("--format csv is not defined for '") + cmd +
                              "'; use json or text");
}

template <typename Scalar>
int run_threshold(const CommonOpts& c, const ThresholdOpts& o) {
  const auto rep = liouville::theorem_report<Scalar>(Scalar(o.p), o.N);
  Json args{{"p", o.p}};
  if (o.N) args["N"] = *o.N;
  args["precision"] = c.precision;
  if (c.format == "csv") {
    emit(c, std::string(liouville::threshold_csv_header()) + "\n" +
                liouville::threshold_csv_row(rep, c.sig_digits) + "\n");
  } else {
    const Json record = liouville::make_record("threshold", args, liouville::to_json(rep));
    emit(c, c.format == "text" ? liouville::dump_text(record, c.sig_digits)
                               : liouville::dump_json(record, c.sig_digits));
  }
  return 0;
}

template <typename Scalar>
int run_sweep(const CommonOpts& c, const SweepOpts& o) {
  std::vector<Scalar> grid(static_cast<std::size_t>(o.steps));
  for (int i = 0; i < o.steps; ++i) {
    const Scalar f = Scalar(i) / Scalar(o.steps - 1);
    grid[static_cast<std::size_t>(i)] =
        o.log_spacing ? std::exp(std::log(Scalar(o.p_from)) +
                                 f * (std::log(Scalar(o.p_to)) - std::log(Scalar(o.p_from))))
                      : Scalar(o.p_from) + f * (Scalar(o.p_to) - Scalar(o.p_from));
  }
  grid.front() = Scalar(o.p_from);
  grid.back() = Scalar(o.p_to);

  std::vector<liouville::ThresholdReport<Scalar>> rows(grid.size());
  const int jobs = std::max(1, c.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      rows[i] = liouville::theorem_report<Scalar>(grid[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
          try {
            rows[i] = liouville::theorem_report<Scalar>(grid[i]);
          } catch (...) {
            failed = true;
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (failed) throw liouville::ConvergenceError("sweep: a grid point failed");
  }

  if (c.format == "csv") {
    std::string out = std::string(liouville::threshold_csv_header()) + "\n";
    for (const auto& r : rows) out += liouville::threshold_csv_row(r, c.sig_digits) + "\n";
    emit(c, out);
    return 0;
  }
  Json results = Json::array();
  for (const auto& r : rows) results.push_back(liouville::to_json(r));
  Json args{{"p_from", o.p_from}, {"p_to", o.p_to},    {"steps", o.steps},
            {"log", o.log_spacing}, {"jobs", c.jobs},  {"precision", c.precision}};
  const Json record = liouville::make_record("sweep", args, std::move(results));
  emit(c, c.format == "text" ? liouville::dump_text(record, c.sig_digits)
                             : liouville::dump_json(record, c.sig_digits));
  return 0;
}

template <typename Scalar>
int run_verify(const CommonOpts& c, const VerifyOpts& o) {
  const auto grid = liouville::log_grid(Scalar(o.p_min), Scalar(o.p_max), o.steps);
  const auto ids = liouville::verify_identities(grid, Scalar(o.tol), o.samples, c.seed);
  const auto ineq = liouville::verify_inequalities(grid, std::max(5, o.samples / 2),
                                                   c.seed + 1);
  const auto eqv = liouville::verify_equivalences(grid, o.n_min, o.n_max, o.samples,
                                                  c.seed + 2);
  const bool ok = ids.all_pass() && ineq.all_pass() && eqv.all_pass();

  if (c.format == "csv") {
    std::string out = "suite,check,pass,worst_abs,worst_rel,failing_p,samples\n";
    auto add = [&](const char* suite, const liouville::VerificationReport& r) {
      for (const auto& ck : r.checks) {
        out += std::string(suite) + "," + ck.name + "," + (ck.pass ? "1" : "0") + "," +
               liouville::format_number(ck.worst_abs, c.sig_digits) + "," +
               liouville::format_number(ck.worst_rel, c.sig_digits) + "," +
               (ck.failing_p ? liouville::format_number(*ck.failing_p, c.sig_digits)
                             : std::string()) +
               "," + std::to_string(ck.samples) + "\n";
      }
    };
    add("identities", ids);
    add("inequalities", ineq);
    add("equivalences", eqv);
    emit(c, out);
    return ok ? 0 : 1;
  }

  Json args{{"p_min", o.p_min}, {"p_max", o.p_max},   {"steps", o.steps},
            {"samples", o.samples}, {"n_min", o.n_min}, {"n_max", o.n_max},
            {"tol", o.tol},     {"seed", c.seed},     {"precision", c.precision}};
  Json result;
  result["all_pass"] = ok;
  result["identities"] = liouville::to_json(ids);
  result["inequalities"] = liouville::to_json(ineq);
  result["equivalences"] = liouville::to_json(eqv);
  const Json record = liouville::make_record("verify", args, std::move(result));
  emit(c, c.format == "text" ? liouville::dump_text(record, c.sig_digits)
                             : liouville::dump_json(record, c.sig_digits));
  return ok ? 0 : 1;
}

template <typename Scalar>
int run_radial(const CommonOpts& c, const RadialOpts& o) {
  if (!o.do_shoot && !o.a)
    throw std::invalid_argument("radial: one of --a or --shoot is required");
  if (c.format == "csv" && o.profile_path.empty()) reject_csv("radial");
  Json args{{"p", o.p}, {"N", o.N}, {"r_max", o.r_max}, {"precision", c.precision}};
  Json result;
  liouville::RadialSolution<Scalar> profile;

  if (o.do_shoot) {
    args["mode"] = "shoot";
    args["tol"] = o.tol;
    const auto sh =
        liouville::shoot<Scalar>(Scalar(o.p), o.N, Scalar(o.tol), Scalar(o.r_max));
    result["shoot"] = liouville::to_json(sh);
    // Clean re-run below the deepest event radius so that tail and Souplet
    // diagnostics act on a full positive profile.
    const Scalar r_fit = Scalar(0.9) * sh.deepest.event_radius;
    profile = liouville::integrate<Scalar>(Scalar(o.p), o.N, sh.a_star, r_fit);
    result["profile"] = liouville::to_json(profile);
    if (profile.event == liouville::RadialEvent::reached_rmax && profile.size() >= 10) {
      const Scalar slope = liouville::tail_exponent(profile);
      const Scalar model = -Scalar(4) / (Scalar(o.p) - Scalar(1));
      const Scalar amp = liouville::tail_amplitude(profile, model);
      result["tail"] = Json{{"slope", static_cast<double>(slope)},
                            {"model_exponent", static_cast<double>(model)},
                            {"amplitude", static_cast<double>(amp)},
                            {"amplitude_pow_pm1",
                             static_cast<double>(std::pow(amp, Scalar(o.p) - Scalar(1)))},
                            {"mass_growth_exponent",
                             static_cast<double>(liouville::mass_growth_exponent(profile))}};
    }
  } else {
    args["mode"] = "integrate";
    args["a"] = *o.a;
    profile = liouville::integrate<Scalar>(Scalar(o.p), o.N, Scalar(*o.a), Scalar(o.r_max));
    result["profile"] = liouville::to_json(profile);
  }

  bool souplet_ok = true;
  for (Scalar u : profile.u)
    if (u < Scalar(0)) souplet_ok = false;
  if (souplet_ok && profile.size() > 0) {
    const auto sp = liouville::souplet_check(profile);
    result["souplet"] = Json{{"max_violation", static_cast<double>(sp.max_violation)},
                             {"min_v", static_cast<double>(sp.min_v)}};
  }

  if (!o.profile_path.empty()) {
    std::ofstream f(o.profile_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open profile file: " + o.profile_path);
    f << liouville::profile_csv(profile, c.sig_digits);
  }
  if (c.format == "csv") {
    // Profile already written; the record itself goes to --out as CSV of the
    // profile for convenience.
    emit(c, liouville::profile_csv(profile, c.sig_digits));
    return 0;
  }
  const Json record = liouville::make_record("radial", args, std::move(result));
  emit(c, c.format == "text" ? liouville::dump_text(record, c.sig_digits)
                             : liouville::dump_json(record, c.sig_digits));
  return 0;
}

template <typename Scalar>
int run_rayleigh(const CommonOpts& c, const RayleighOpts& o) {
  if (c.format == "csv") reject_csv("rayleigh");
  Json args{{"N", o.N}, {"basis", o.basis}, {"precision", c.precision}};
  Json result;
  if (o.pure) {
    args["mode"] = "hardy-rellich";
    const Scalar half = o.r_lo && o.r_hi
                            ? Scalar(0)
                            : std::pow(Scalar(10), Scalar(o.decades) / Scalar(2));
    const Scalar r_lo = o.r_lo ? Scalar(*o.r_lo) : Scalar(1) / half;
    const Scalar r_hi = o.r_hi ? Scalar(*o.r_hi) : half;
    args["r_lo"] = static_cast<double>(r_lo);
    args["r_hi"] = static_cast<double>(r_hi);
    const auto res = liouville::rayleigh_stability<Scalar>(
        [](Scalar r) { return Scalar(1) / (r * r * r * r); }, Scalar(1), o.N, r_lo,
        r_hi, o.basis);
    result["rayleigh"] = liouville::to_json(res, false);
    result["hardy_rellich_constant"] =
        static_cast<double>(liouville::hardy_rellich_constant<Scalar>(o.N));
  } else {
    if (!o.p) throw std::invalid_argument("rayleigh: -p required unless --pure");
    args["p"] = *o.p;
    args["decades"] = o.decades;
    args["mode"] = "stability-consistency";
    const auto res = liouville::stability_consistency<Scalar>(
        Scalar(*o.p), o.N, static_cast<int>(o.decades), o.basis);
    result["consistency"] = liouville::to_json(res);
  }
  const Json record = liouville::make_record("rayleigh", args, std::move(result));
  emit(c, c.format == "text" ? liouville::dump_text(record, c.sig_digits)
                             : liouville::dump_json(record, c.sig_digits));
  return 0;
}

template <typename Scalar>
int run_report(const CommonOpts& c, const ReportOpts& o) {
  if (c.format == "csv") reject_csv("report");
  Json args{{"p", o.p}, {"precision", c.precision}};
  if (o.N) args["N"] = *o.N;
  Json result;
  result["thresholds"] = liouville::to_json(liouville::theorem_report<Scalar>(Scalar(o.p), o.N));
  if (o.N) {
    result["extremal_regularity"] =
        liouville::to_json(liouville::extremal_regularity_report<Scalar>(Scalar(o.p), *o.N));
    if (*o.N >= 5) {
      const auto pj = liouville::p_jl4<Scalar>(*o.N);
      result["p_jl4"] = pj ? Json(static_cast<double>(*pj)) : Json(nullptr);
      result["sobolev_critical"] =
          static_cast<double>(liouville::sobolev_critical<Scalar>(*o.N));
      result["hardy_rellich_constant"] =
          static_cast<double>(liouville::hardy_rellich_constant<Scalar>(*o.N));
    }
  }
  const Json record = liouville::make_record("report", args, std::move(result));
  emit(c, c.format == "text" ? liouville::dump_text(record, c.sig_digits)
                             : liouville::dump_json(record, c.sig_digits));
  return 0;
}

template <typename Scalar>
int dispatch(const std::string& cmd, const CommonOpts& c, const ThresholdOpts& th,
             const SweepOpts& sw, const VerifyOpts& vf, const RadialOpts& ra,
             const RayleighOpts& ry, const ReportOpts& rp) {
  if (cmd == "threshold") return run_threshold<Scalar>(c, th);
  if (cmd == "sweep") return run_sweep<Scalar>(c, sw);
  if (cmd == "verify") return run_verify<Scalar>(c, vf);
  if (cmd == "radial") return run_radial<Scalar>(c, ra);
  if (cmd == "rayleigh") return run_rayleigh<Scalar>(c, ry);
  if (cmd == "report") return run_report<Scalar>(c, rp);
  throw std::invalid_argument("unknown command");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension thresholds, identity verification and radial simulation "
               "for stable solutions of the biharmonic problem Delta^2 u = u^p"};
  app.require_subcommand(1);

  CommonOpts common;
  ThresholdOpts th;
  SweepOpts sw;
  VerifyOpts vf;
  RadialOpts ra;
  RayleighOpts ry;
  ReportOpts rp;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    sub->add_option("--out", common.out, "Write output to FILE instead of stdout");
    sub->add_option("--precision", common.precision,
                    "Floating-point mode (env LIOUVILLE_LAB_PRECISION overrides)")
        ->check(CLI::IsMember({"double", "extended"}))
        ->capture_default_str();
    sub->add_option("--digits", common.sig_digits, "Significant digits in output")
        ->check(CLI::Range(4, 17))
        ->capture_default_str();
    sub->add_option("--jobs", common.jobs, "Worker threads for sweeps")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    sub->add_option("--seed", common.seed, "Seed for sampled checks")
        ->capture_default_str();
  };

  CLI::App* c_th = app.add_subcommand("threshold", "Thresholds and verdicts for one (p[, N])");
  c_th->add_option("-p,--p", th.p, "Exponent p")->required()->check(CLI::Range(
      std::nextafter(1.0, 2.0), 1e12));
  c_th->add_option("-N,--N", [&th](const CLI::results_t& res) {
        th.N = std::stoi(res[0]);
        return true;
      }, "Dimension N")->expected(1);
  add_common(c_th);

  CLI::App* c_sw = app.add_subcommand("sweep", "Threshold table over a p-grid");
  c_sw->add_option("--p-from", sw.p_from, "Grid start")->required()
      ->check(CLI::Range(std::nextafter(1.0, 2.0), 1e12));
  c_sw->add_option("--p-to", sw.p_to, "Grid end")->required()
      ->check(CLI::Range(std::nextafter(1.0, 2.0), 1e12));
  c_sw->add_option("--steps", sw.steps, "Grid points")->required()->check(CLI::Range(2, 1000000));
  c_sw->add_flag("--log", sw.log_spacing, "Log spacing (default linear)");
  add_common(c_sw);

  CLI::App* c_vf = app.add_subcommand("verify", "Identity/inequality/equivalence suite");
  c_vf->add_option("--p-min", vf.p_min)->check(CLI::Range(std::nextafter(1.0, 2.0), 1e12))
      ->capture_default_str();
  c_vf->add_option("--p-max", vf.p_max)->check(CLI::Range(std::nextafter(1.0, 2.0), 1e12))
      ->capture_default_str();
  c_vf->add_option("--steps", vf.steps, "Grid points")->check(CLI::Range(2, 100000))
      ->capture_default_str();
  c_vf->add_option("--samples", vf.samples, "Random samples per point")
      ->check(CLI::Range(1, 100000))->capture_default_str();
  c_vf->add_option("--n-min", vf.n_min)->check(CLI::Range(5, 1000))->capture_default_str();
  c_vf->add_option("--n-max", vf.n_max)->check(CLI::Range(5, 1000))->capture_default_str();
  c_vf->add_option("--tol", vf.tol, "Relative residual tolerance")
      ->check(CLI::Range(1e-15, 1.0))->capture_default_str();
  add_common(c_vf);

  CLI::App* c_ra = app.add_subcommand("radial", "Radial integration / shooting");
  c_ra->add_option("-p,--p", ra.p, "Exponent p")->required()
      ->check(CLI::Range(std::nextafter(1.0, 2.0), 1e12));
  c_ra->add_option("-N,--N", ra.N, "Dimension N")->required()->check(CLI::Range(5, 1000));
  auto* opt_a = c_ra->add_option("--a", [&ra](const CLI::results_t& res) {
        ra.a = std::stod(res[0]);
        return true;
      }, "Shooting parameter v(0)")->expected(1);
  auto* opt_shoot = c_ra->add_flag("--shoot", ra.do_shoot, "Bisect for the entire solution");
  opt_a->excludes(opt_shoot);
  c_ra->add_option("--rmax", ra.r_max, "Integration horizon")->check(CLI::Range(1e-2, 1e12))
      ->capture_default_str();
  c_ra->add_option("--tol", ra.tol, "Shooting bracket tolerance")
      ->check(CLI::Range(1e-16, 1.0))->capture_default_str();
  c_ra->add_option("--profile", ra.profile_path, "Write profile CSV (r,u,du,v,dv) to FILE");
  add_common(c_ra);

  CLI::App* c_ry = app.add_subcommand("rayleigh", "Discrete Rayleigh-quotient stability test");
  c_ry->add_option("-p,--p", [&ry](const CLI::results_t& res) {
        ry.p = std::stod(res[0]);
        return true;
      }, "Exponent p")->expected(1);
  c_ry->add_option("-N,--N", ry.N, "Dimension N")->required()->check(CLI::Range(5, 1000));
  c_ry->add_flag("--pure", ry.pure, "Hardy-Rellich mode: weight r^-4, no p factor");
  c_ry->add_option("--decades", ry.decades, "Log-domain width in decades")
      ->check(CLI::Range(1.0, 60.0))->capture_default_str();
  c_ry->add_option("--basis", ry.basis, "Trial functions")->check(CLI::Range(8, 8192))
      ->capture_default_str();
  c_ry->add_option("--r-lo", [&ry](const CLI::results_t& res) {
        ry.r_lo = std::stod(res[0]);
        return true;
      }, "Domain start")->expected(1);
  c_ry->add_option("--r-hi", [&ry](const CLI::results_t& res) {
        ry.r_hi = std::stod(res[0]);
        return true;
      }, "Domain end")->expected(1);
  add_common(c_ry);

  CLI::App* c_rp = app.add_subcommand("report", "Combined threshold/regularity/JL4 report");
  c_rp->add_option("-p,--p", rp.p, "Exponent p")->required()
      ->check(CLI::Range(std::nextafter(1.0, 2.0), 1e12));
  c_rp->add_option("-N,--N", [&rp](const CLI::results_t& res) {
        rp.N = std::stoi(res[0]);
        return true;
      }, "Dimension N")->expected(1);
  add_common(c_rp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (const char* env = std::getenv("LIOUVILLE_LAB_PRECISION")) {
    const std::string v = env;
    if (v != "double" && v != "extended") {
      std::cerr << "LIOUVILLE_LAB_PRECISION must be 'double' or 'extended'\n";
      return 2;
    }
    common.precision = v;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (common.precision == "extended")
      return dispatch<long double>(cmd, common, th, sw, vf, ra, ry, rp);
    return dispatch<double>(cmd, common, th, sw, vf, ra, ry, rp);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
