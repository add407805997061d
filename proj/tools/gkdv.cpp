// Command-line front end: classification, traveling waves, solitons,
// similarity reductions, periodic simulation and the acceptance scenarios,
// all through one binary.  Exit codes: 0 success, 2 usage, 3 domain or
// hypothesis failure (structured JSON on stderr).

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gkdv/classify.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/expr.hpp"
#include "gkdv/pde.hpp"
#include "gkdv/reduce.hpp"
#include "gkdv/scenarios.hpp"
#include "gkdv/soliton.hpp"
#include "gkdv/travelwave.hpp"

namespace {

struct UsageError {
  std::string message;
};

[[noreturn]] void usage_fail(const std::string& msg) { throw UsageError{msg}; }

// every float is printed with 17 significant digits so output is
// byte-reproducible and round-trips exactly
std::string num(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string jarr(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v[i]);
  }
  out += "]";
  return out;
}

std::vector<double> split_reals(const std::string& text, std::size_t want,
                                const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      usage_fail(std::string("could not parse ") + what + ": '" + piece +
                 "'");
    }
  }
  if (out.size() != want)
    usage_fail(std::string(what) + " needs exactly " + std::to_string(want) +
               " comma-separated numbers");
  return out;
}

struct Options {
  bool json = false;
  bool quiet = false;
  unsigned long seed = 42;
};

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string f_text;
  std::string domain = "-1,1";
  int samples = 12;
};

int run_classify(const ClassifyArgs& a, const Options& opt) {
  auto dom = split_reals(a.domain, 2, "--domain");
  if (!(dom[0] < dom[1])) usage_fail("--domain needs lo < hi");
  gkdv::DomainInterval domain{dom[0], dom[1]};
  gkdv::Expr f = gkdv::parse(a.f_text);
  auto result = gkdv::classify(f, domain, a.samples);

  std::vector<double> defects;
  for (const auto& g : result.generators)
    defects.push_back(gkdv::verify_generator(f, g, domain, 100));

  const auto& ps = result.params;
  if (opt.json) {
    std::string out = "{\"case\": ";
    out += jstr(gkdv::case_name(result.case_tag));
    out += ", \"params\": {";
    bool first = true;
    auto put = [&](const char* name, const std::optional<double>& v) {
      if (!v) return;
      if (!first) out += ", ";
      first = false;
      out += std::string("\"") + name + "\": " + num(*v);
    };
    put("f0", ps.f0);
    put("f1", ps.f1);
    put("lambda", ps.lambda);
    put("alpha", ps.alpha);
    put("u0", ps.u0);
    out += "}, \"nullity\": " + std::to_string(result.extra_symmetry_nullity);
    out += ", \"generators\": [";
    for (std::size_t i = 0; i < result.generators.size(); ++i) {
      const auto& g = result.generators[i];
      if (i) out += ", ";
      out += "{\"tau0\": " + num(g.tau0) + ", \"a0\": " + num(g.a0) +
             ", \"a1\": " + num(g.a1) + ", \"b\": " + num(g.b) +
             ", \"c\": " + num(g.c) + ", \"d\": " + num(g.d) + "}";
    }
    out += "], \"defects\": " + jarr(defects) + "}";
    std::printf("%s\n", out.c_str());
    return 0;
  }

  std::printf("case %s\n", gkdv::case_name(result.case_tag));
  auto show = [&](const char* name, const std::optional<double>& v) {
    if (v) std::printf("%s = %s\n", name, num(*v).c_str());
  };
  show("f0", ps.f0);
  show("f1", ps.f1);
  show("lambda", ps.lambda);
  show("alpha", ps.alpha);
  show("u0", ps.u0);
  std::printf("nullity = %d\n", result.extra_symmetry_nullity);
  for (std::size_t i = 0; i < result.generators.size(); ++i) {
    const auto& g = result.generators[i];
    std::printf(
        "generator %zu: tau0 = %s, a0 = %s, a1 = %s, b = %s, c = %s, d = %s "
        "(defect %s)\n",
        i, num(g.tau0).c_str(), num(g.a0).c_str(), num(g.a1).c_str(),
        num(g.b).c_str(), num(g.c).c_str(), num(g.d).c_str(),
        num(defects[i]).c_str());
  }
  for (const auto& note : result.notes) std::printf("note: %s\n", note.c_str());
  return 0;
}

// -------------------------------------------------------------- travelwave

struct TravelwaveArgs {
  std::string f_text;
  double w0 = 0;
  double zmax = 15.0;
  int n = 1001;
  std::string csv;
};

int run_travelwave(const TravelwaveArgs& a, const Options& opt) {
  gkdv::Expr f = gkdv::parse(a.f_text);
  gkdv::WaveProfile prof = gkdv::homoclinic_profile(f, a.w0, a.zmax, a.n);
  double rate = std::nan("");
  try {
    rate = gkdv::decay_rate(prof);
  } catch (const gkdv::Error&) {
    // window holds no usable tail; reported as null
  }

  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) usage_fail("cannot open --csv path " + a.csv);
    out << "z,w,dw\n";
    for (std::size_t i = 0; i < prof.z_samples.size(); ++i)
      out << num(prof.z_samples[i]) << ',' << num(prof.w_samples[i]) << ','
          << num(prof.dw_samples[i]) << '\n';
  }

  if (opt.json) {
    std::printf("{\"w0\": %s, \"c\": %s, \"decay_rate\": %s, \"samples\": %zu}\n",
                num(prof.w0).c_str(), num(prof.c).c_str(), num(rate).c_str(),
                prof.z_samples.size());
  } else {
    std::printf("w0 = %s\n", num(prof.w0).c_str());
    std::printf("c = %s\n", num(prof.c).c_str());
    std::printf("decay_rate = %s\n", num(rate).c_str());
    std::printf("samples = %zu\n", prof.z_samples.size());
  }
  return 0;
}

// ----------------------------------------------------------------- soliton

struct SolitonArgs {
  double alpha = 0;
  double A = 0;
  double f0 = 0;
  double u0 = 0;
  double phase = 0;
  bool do_check = false;
};

int run_soliton(const SolitonArgs& a, const Options& opt) {
  gkdv::SolitonParams p =
      gkdv::solve_params(a.alpha, a.A, a.f0, a.u0, a.phase);
  double res = std::nan("");
  if (a.do_check) res = gkdv::residual_closed_form(p);

  if (opt.json) {
    std::string out = "{\"a\": " + num(p.a) + ", \"A\": " + num(p.A) +
                      ", \"beta\": " + num(p.beta) +
                      ", \"b_phase\": " + num(p.b_phase) +
                      ", \"c3\": " + num(p.c3) + ", \"u0\": " + num(p.u0) +
                      ", \"f0\": " + num(p.f0) +
                      ", \"alpha\": " + num(p.alpha);
    if (a.do_check) out += ", \"residual\": " + num(res);
    out += "}";
    std::printf("%s\n", out.c_str());
  } else {
    std::printf("a = %s\n", num(p.a).c_str());
    std::printf("A = %s\n", num(p.A).c_str());
    std::printf("beta = %s\n", num(p.beta).c_str());
    std::printf("b_phase = %s\n", num(p.b_phase).c_str());
    std::printf("c3 = %s\n", num(p.c3).c_str());
    std::printf("u0 = %s\n", num(p.u0).c_str());
    std::printf("f0 = %s\n", num(p.f0).c_str());
    if (a.do_check) std::printf("residual = %s\n", num(res).c_str());
  }
  return 0;
}

// ------------------------------------------------------------------ reduce

struct ReduceArgs {
  std::string case_name;
  double alpha = 0;
  double lambda = 1.0;
  double f0 = 0.0;
  double c1 = 1.0;
  std::string ic;
  std::string span;
  std::string lift_spec;
  std::string csv;
};

int run_reduce(const ReduceArgs& a, const Options& opt) {
  auto ic = split_reals(a.ic, 3, "--ic");
  auto span = split_reals(a.span, 2, "--span");

  gkdv::ReducedODE ode;
  if (a.case_name == "power")
    ode = gkdv::reduce_power(a.alpha, a.f0);
  else if (a.case_name == "exp")
    ode = gkdv::reduce_exp(a.alpha, a.lambda);
  else if (a.case_name == "log")
    ode = gkdv::reduce_log(a.alpha, a.f0, a.c1);
  else
    usage_fail("--case must be power, exp or log");

  gkdv::Trajectory traj = gkdv::integrate(ode, span[0], ic, span[1]);
  auto end_state = gkdv::state_at(traj, span[1]);

  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) usage_fail("cannot open --csv path " + a.csv);
    out << "z,w,dw,d2w\n";
    for (std::size_t i = 0; i < traj.z_samples.size(); ++i) {
      out << num(traj.z_samples[i]);
      for (double s : traj.states[i]) out << ',' << num(s);
      out << '\n';
    }
  }

  double lift_residual = std::nan("");
  if (!a.lift_spec.empty()) {
    auto ls = split_reals(a.lift_spec, 4, "--lift");
    std::vector<double> t_grid = {ls[0], 0.5 * (ls[0] + ls[1]), ls[1]};
    gkdv::LiftPatch patch = gkdv::lift(traj, 0.0, t_grid, ls[2], ls[3]);
    lift_residual = patch.residual_max;
  }

  if (opt.json) {
    std::string out = "{\"case\": " + jstr(a.case_name) +
                      ", \"alpha\": " + num(a.alpha) +
                      ", \"samples\": " + std::to_string(traj.z_samples.size()) +
                      ", \"end_state\": " + jarr(end_state);
    if (!a.lift_spec.empty())
      out += ", \"lift_residual\": " + num(lift_residual);
    out += "}";
    std::printf("%s\n", out.c_str());
  } else {
    std::printf("case %s\n", a.case_name.c_str());
    std::printf("samples = %zu\n", traj.z_samples.size());
    std::printf("end state at z = %s: w = %s, dw = %s, d2w = %s\n",
                num(span[1]).c_str(), num(end_state[0]).c_str(),
                num(end_state[1]).c_str(), num(end_state[2]).c_str());
    if (a.case_name == "power" && a.alpha == 2.0) {
      auto [k, drift] = gkdv::painleve_first_integral(traj);
      std::printf("first integral 3w'' + zw + w^3 = %s (drift %s)\n",
                  num(k).c_str(), num(drift).c_str());
    }
    if (!a.lift_spec.empty())
      std::printf("lift residual = %s\n", num(lift_residual).c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string f_text;
  std::string ic;
  double L = 0;
  int N = 0;
  double T = 0;
  double dt = 0;  // 0 means pick from suggest_dt
  std::string report_path;
  std::string snapshots_path;
};

gkdv::Field load_ic(const SimulateArgs& a, const gkdv::Expr& f,
                    double* residual0) {
  *residual0 = std::nan("");
  if (a.ic.rfind("soliton:", 0) == 0) {
    double alpha = std::nan(""), A = std::nan("");
    double f0 = 0.0, u0 = 0.0;
    double phase = std::nan("");
    std::stringstream ss(a.ic.substr(8));
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      auto eq = piece.find('=');
      if (eq == std::string::npos)
        usage_fail("--ic soliton: entries need key=value, got '" + piece +
                   "'");
      std::string key = piece.substr(0, eq);
      double value = split_reals(piece.substr(eq + 1), 1, "--ic value")[0];
      if (key == "alpha") alpha = value;
      else if (key == "A") A = value;
      else if (key == "f0") f0 = value;
      else if (key == "u0") u0 = value;
      else if (key == "phase") phase = value;
      else usage_fail("--ic soliton: unknown key '" + key + "'");
    }
    if (!std::isfinite(alpha) || !std::isfinite(A))
      usage_fail("--ic soliton: needs at least alpha=..,A=..");
    if (!std::isfinite(phase)) phase = -A * a.L / 2.0;  // crest at mid-cell
    gkdv::SolitonParams p = gkdv::solve_params(alpha, A, f0, u0, phase);
    gkdv::Field field = gkdv::make_field(a.L, a.N, 0.0);
    gkdv::Field ut = gkdv::make_field(a.L, a.N, 0.0);
    for (int j = 0; j < a.N; ++j) {
      double x = j * a.L / a.N;
      field.values[j] = gkdv::eval_soliton(p, x, 0.0);
      ut.values[j] = gkdv::soliton_derivatives(p, x, 0.0).u_t;
    }
    *residual0 = gkdv::residual(field, ut, f);
    return field;
  }
  if (a.ic.rfind("file:", 0) == 0) {
    std::string path = a.ic.substr(5);
    std::ifstream in(path);
    if (!in) usage_fail("cannot open --ic file " + path);
    gkdv::Field field = gkdv::make_field(a.L, a.N, 0.0);
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.find_first_of("0123456789+-.") != 0) continue;  // header
      auto comma = line.rfind(',');
      std::string cell =
          comma == std::string::npos ? line : line.substr(comma + 1);
      if (count >= field.values.size())
        usage_fail("--ic file holds more than N samples");
      field.values[count++] = split_reals(cell, 1, "--ic file cell")[0];
    }
    if (count != field.values.size())
      usage_fail("--ic file holds " + std::to_string(count) +
                 " samples, need N = " + std::to_string(a.N));
    return field;
  }
  usage_fail("--ic must start with soliton: or file:");
}

int run_simulate(const SimulateArgs& a, const Options& opt) {
  gkdv::Expr f = gkdv::parse(a.f_text);
  double residual0 = std::nan("");
  gkdv::Field field = load_ic(a, f, &residual0);

  double dt = a.dt;
  if (dt == 0.0) dt = 0.9 * gkdv::suggest_dt(field, f);
  if (!(dt > 0.0)) usage_fail("--dt must be positive");
  long long steps = std::llround(a.T / dt);
  if (steps < 1) usage_fail("--T spans no steps at this dt");
  int sample_every = static_cast<int>(std::max(1LL, steps / 40));

  gkdv::RunReport rep = gkdv::evolve(field, f, a.T, dt, sample_every);

  if (!a.snapshots_path.empty()) {
    std::ofstream out(a.snapshots_path);
    if (!out) usage_fail("cannot open --snapshots path " + a.snapshots_path);
    out << "t,x,u\n";
    auto dump = [&](const gkdv::Field& q) {
      for (int j = 0; j < q.N; ++j)
        out << num(q.t) << ',' << num(j * q.L / q.N) << ','
            << num(q.values[j]) << '\n';
    };
    gkdv::Field current = field;
    dump(current);
    for (long long k = 1; k <= steps; ++k) {
      current = gkdv::step(current, f, dt);
      if (k % sample_every == 0 || k == steps) dump(current);
    }
  }

  std::string report = "{\"mass\": " + jarr(rep.mass) +
                       ", \"momentum\": " + jarr(rep.momentum) +
                       ", \"peak_x\": " + jarr(rep.peak_x) +
                       ", \"peak_u\": " + jarr(rep.peak_u) +
                       ", \"speed_fit\": " + num(rep.speed_fit) +
                       ", \"residual_max\": " + num(residual0) + "}";
  if (!a.report_path.empty()) {
    std::ofstream out(a.report_path);
    if (!out) usage_fail("cannot open --report path " + a.report_path);
    out << report << '\n';
  }

  if (opt.json) {
    std::printf("%s\n", report.c_str());
  } else if (!opt.quiet) {
    std::printf("N = %d, L = %s, T = %s, dt = %s, steps = %lld\n", a.N,
                num(a.L).c_str(), num(a.T).c_str(), num(dt).c_str(), steps);
    std::printf("speed_fit = %s\n", num(rep.speed_fit).c_str());
    double amp_drift = 0.0;
    for (double v : rep.peak_u)
      amp_drift = std::max(amp_drift, std::abs(v - rep.peak_u.front()));
    std::printf("amplitude drift = %s\n", num(amp_drift).c_str());
    std::printf("mass drift = %s\n",
                num(std::abs(rep.mass.back() - rep.mass.front())).c_str());
    std::printf(
        "momentum drift = %s\n",
        num(std::abs(rep.momentum.back() - rep.momentum.front())).c_str());
    std::printf("initial residual = %s\n", num(residual0).c_str());
  }
  return 0;
}

// ------------------------------------------------------------------- repro

int run_repro(const std::string& which, const Options& opt) {
  std::vector<std::string> todo;
  if (which == "all") {
    todo = gkdv::scenario_names();
  } else {
    const auto& names = gkdv::scenario_names();
    if (std::find(names.begin(), names.end(), which) == names.end())
      usage_fail("unknown scenario '" + which + "'");
    todo.push_back(which);
  }

  bool all_pass = true;
  std::string json_out = "{\"seed\": " + std::to_string(opt.seed) +
                         ", \"scenarios\": [";
  for (std::size_t i = 0; i < todo.size(); ++i) {
    gkdv::ScenarioReport rep = gkdv::run_scenario(todo[i], opt.seed);
    all_pass = all_pass && rep.pass;
    if (opt.json) {
      if (i) json_out += ", ";
      json_out += "{\"name\": " + jstr(rep.name) +
                  ", \"pass\": " + (rep.pass ? "true" : "false") +
                  ", \"lines\": [";
      for (std::size_t k = 0; k < rep.lines.size(); ++k) {
        if (k) json_out += ", ";
        json_out += jstr(rep.lines[k]);
      }
      json_out += "]}";
    } else {
      std::printf("%s %s\n", rep.pass ? "PASS" : "FAIL", rep.name.c_str());
      if (!opt.quiet)
        for (const auto& line : rep.lines)
          std::printf("  %s\n", line.c_str());
    }
  }
  if (opt.json) {
    json_out += "]}";
    std::printf("%s\n", json_out.c_str());
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Symmetry classification, reductions and solitary waves of "
      "u_t = f(u) u_x + u_xxx"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_flag("--json", opt.json, "machine-readable output on stdout");
  app.add_flag("--quiet", opt.quiet, "suppress detail lines");
  app.add_option("--seed", opt.seed, "seed for randomized sweeps");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "symmetry class of f(u)");
  classify->add_option("--f", ca.f_text, "expression for f(u)")->required();
  classify->add_option("--domain", ca.domain, "sampling interval lo,hi");
  classify->add_option("--samples", ca.samples, "sample count");

  TravelwaveArgs ta;
  auto* travelwave =
      app.add_subcommand("travelwave", "solitary-wave profile for f(u)");
  travelwave->add_option("--f", ta.f_text, "expression for f(u)")->required();
  travelwave->add_option("--w0", ta.w0, "extremum w(0)")->required();
  travelwave->add_option("--zmax", ta.zmax, "half-width of the z window");
  travelwave->add_option("--n", ta.n, "sample count");
  travelwave->add_option("--csv", ta.csv, "write z,w,dw samples here");

  SolitonArgs sa;
  auto* soliton = app.add_subcommand("soliton", "closed-form sech soliton");
  soliton->add_option("--alpha", sa.alpha, "power in f")->required();
  soliton->add_option("--A", sa.A, "inverse width")->required();
  soliton->add_option("--f0", sa.f0, "constant part of f");
  soliton->add_option("--u0", sa.u0, "pedestal");
  soliton->add_option("--phase", sa.phase, "phase shift");
  soliton->add_flag("--check", sa.do_check, "evaluate the closed-form residual");

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "similarity-reduced ODEs");
  reduce->add_option("--case", ra.case_name, "power, exp or log")->required();
  reduce->add_option("--alpha", ra.alpha, "family parameter")->required();
  reduce->add_option("--lambda", ra.lambda, "exponential coefficient");
  reduce->add_option("--f0", ra.f0, "constant part of f");
  reduce->add_option("--c1", ra.c1, "logarithmic constant");
  reduce->add_option("--ic", ra.ic, "initial state w0,w1,w2")->required();
  reduce->add_option("--span", ra.span, "integration span z0,z1")->required();
  reduce->add_option("--lift", ra.lift_spec, "lift patch t0,t1,x0,x1");
  reduce->add_option("--csv", ra.csv, "write z,w,dw,d2w samples here");

  SimulateArgs ma;
  auto* simulate = app.add_subcommand("simulate", "periodic pseudo-spectral run");
  simulate->add_option("--f", ma.f_text, "expression for f(u)")->required();
  simulate->add_option("--ic", ma.ic, "soliton:alpha=..,A=.. or file:<csv>")
      ->required();
  simulate->add_option("--L", ma.L, "period")->required();
  simulate->add_option("--N", ma.N, "grid size (power of two)")->required();
  simulate->add_option("--T", ma.T, "final time")->required();
  simulate->add_option("--dt", ma.dt, "time step (default from suggest_dt)");
  simulate->add_option("--report", ma.report_path, "write report JSON here");
  simulate->add_option("--snapshots", ma.snapshots_path,
                       "write t,x,u snapshots here");

  std::string repro_name;
  auto* repro = app.add_subcommand("repro", "acceptance scenarios");
  repro->add_option("name", repro_name, "scenario name or 'all'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (classify->parsed()) return run_classify(ca, opt);
    if (travelwave->parsed()) return run_travelwave(ta, opt);
    if (soliton->parsed()) return run_soliton(sa, opt);
    if (reduce->parsed()) return run_reduce(ra, opt);
    if (simulate->parsed()) return run_simulate(ma, opt);
    if (repro->parsed()) return run_repro(repro_name, opt);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.message.c_str());
    return 2;
  } catch (const gkdv::Error& e) {
    std::fprintf(stderr, "{\"error\": %s, \"message\": %s}\n",
                 jstr(gkdv::errc_name(e.code())).c_str(),
                 jstr(e.what()).c_str());
    return 3;
  }
  return 2;
}
