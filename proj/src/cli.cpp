#include "nlsfloquet/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "nlsfloquet/branch.hpp"
#include "nlsfloquet/errors.hpp"
#include "nlsfloquet/exponential.hpp"
#include "nlsfloquet/halfline.hpp"
#include "nlsfloquet/parallel.hpp"
#include "nlsfloquet/soliton.hpp"

namespace nlsf {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument("not an integer: '" + s + "'");
  return static_cast<int>(v);
}

json cj(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json matrix_json(const Matrix2& m) {
  return json{{"m11", cj(m.m11)}, {"m12", cj(m.m12)}, {"m21", cj(m.m21)}, {"m22", cj(m.m22)}};
}

json window_json(const Window& w) {
  return json{{"xmin", w.xmin}, {"xmax", w.xmax}, {"ymin", w.ymin}, {"ymax", w.ymax}};
}

json zero_json(const ZeroRecord& z) {
  json adj = json::array();
  for (DomainLabel l : z.adjacency) adj.push_back(to_string(l));
  return json{{"location", cj(z.location)},
              {"multiplicity", z.multiplicity},
              {"parity", to_string(z.parity)},
              {"kind", to_string(z.kind)},
              {"half_plane", to_string(z.half_plane)},
              {"adjacency", adj},
              {"violating", z.violating},
              {"undecided", z.undecided},
              {"strategy", to_string(z.strategy)},
              {"slit_angle", z.slit_angle},
              {"note", z.note}};
}

json verdict_json(const Verdict& v) {
  json wit = json::array();
  for (const auto& w : v.witnesses) wit.push_back(zero_json(w));
  json strat = json::array();
  for (CutStrategy s : v.cut_strategies) strat.push_back(to_string(s));
  json out{{"status", to_string(v.status)},
           {"witnesses", wit},
           {"window", window_json(v.window)},
           {"cut_strategies", strat},
           {"notes", v.notes}};
  if (v.status == VerdictStatus::Undecided && v.notes.empty())
    out["notes"] = "undecided without a recorded reason";
  return out;
}

SpectrumOptions spectrum_options(const RunConfig& cfg) {
  SpectrumOptions o;
  o.loc_tol = cfg.loc_tol;
  o.ode_tol = cfg.ode_tol;
  o.jobs = cfg.jobs;
  return o;
}

ExponentialTriple config_triple(const RunConfig& cfg) {
  ExponentialTriple t;
  t.alpha = cfg.alpha;
  t.omega = cfg.omega;
  t.c = cfg.c;
  t.lambda = cfg.lambda;
  return t;
}

Window default_window(const RunConfig& cfg) {
  if (cfg.has_window) return cfg.window;
  if (cfg.has_alpha && !cfg.has_gamma) return default_exponential_window(config_triple(cfg));
  return Window::square(3.0);
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw InputError(InputError::Kind::Validation, "cannot write " + p.string());
  out << s;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

cplx parse_complex(const std::string& text) {
  const auto toks = split_ws(text);
  if (toks.size() == 2) return {parse_double(toks[0]), parse_double(toks[1])};
  if (toks.size() != 1) throw std::invalid_argument("expected a complex number: '" + text + "'");
  const std::string s = toks[0];
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return {parse_double(s), 0.0};
  // a+bi, a-bi, bi, i, -i
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t j = body.size(); j-- > 1;) {
    if ((body[j] == '+' || body[j] == '-') && body[j - 1] != 'e' && body[j - 1] != 'E') {
      split = j;
      break;
    }
  }
  auto imag_part = [](const std::string& b) {
    if (b.empty() || b == "+") return 1.0;
    if (b == "-") return -1.0;
    return parse_double(b);
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_double(body.substr(0, split)), imag_part(body.substr(split))};
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const std::set<std::string> repeatable{"mode_g0", "mode_g1", "k"};
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    auto fail = [&](const std::string& msg) {
      throw InputError(InputError::Kind::Parse, "line " + std::to_string(lineno) + ": " + msg);
    };
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail("missing key");
    if (val.empty()) fail("missing value for '" + key + "'");
    if (cfg.raw.count(key) && !repeatable.count(key)) fail("duplicate key '" + key + "'");
    cfg.raw[key].push_back(val);
    try {
      if (key == "mode") {
        cfg.mode = val;
      } else if (key == "lambda") {
        cfg.lambda = parse_int(val);
      } else if (key == "tau") {
        cfg.tau = parse_double(val);
      } else if (key == "mode_g0" || key == "mode_g1") {
        const auto t = split_ws(val);
        if (t.size() != 3) fail(key + " expects: n re im");
        FourierMode m{parse_int(t[0]), {parse_double(t[1]), parse_double(t[2])}};
        (key == "mode_g0" ? cfg.g0_modes : cfg.g1_modes).push_back(m);
      } else if (key == "alpha") {
        cfg.alpha = parse_double(val);
        cfg.has_alpha = true;
      } else if (key == "omega") {
        cfg.omega = parse_double(val);
        cfg.has_omega = true;
      } else if (key == "c") {
        cfg.c = parse_complex(val);
        cfg.has_c = true;
      } else if (key == "gamma") {
        cfg.gamma = parse_double(val);
        cfg.has_gamma = true;
      } else if (key == "window") {
        const auto t = split_ws(val);
        if (t.size() != 4) fail("window expects: xmin xmax ymin ymax");
        cfg.window = {parse_double(t[0]), parse_double(t[1]), parse_double(t[2]), parse_double(t[3])};
        cfg.has_window = true;
      } else if (key == "loc_tol") {
        cfg.loc_tol = parse_double(val);
      } else if (key == "ode_tol") {
        cfg.ode_tol = parse_double(val);
      } else if (key == "cut_strategies") {
        cfg.cut_strategies.clear();
        std::stringstream ss(val);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.cut_strategies.push_back(parse_cut_strategy(trim(item)));
      } else if (key == "k") {
        cfg.k_points.push_back(parse_complex(val));
      } else if (key == "grid_n") {
        cfg.grid_n = parse_int(val);
      } else if (key == "horizon") {
        cfg.horizon = parse_double(val);
      } else if (key == "points_per_period") {
        cfg.points_per_period = parse_int(val);
      } else if (key == "initial") {
        cfg.initial_path = val;
      } else if (key == "trace_g0") {
        cfg.trace_g0_path = val;
      } else if (key == "trace_g1") {
        cfg.trace_g1_path = val;
      } else if (key == "samples") {
        cfg.samples = parse_int(val);
      } else if (key == "seed") {
        cfg.seed = static_cast<unsigned>(parse_int(val));
      } else if (key == "jobs") {
        cfg.jobs = parse_int(val);
      } else {
        fail("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  auto bad = [](const std::string& msg) { throw InputError(InputError::Kind::Validation, msg); };
  static const std::set<std::string> modes{"classify-exp", "scan",    "soliton-check",
                                           "monodromy",    "spectra", "plot-data"};
  if (!modes.count(cfg.mode)) bad("mode must be one of classify-exp, scan, soliton-check, monodromy, spectra, plot-data");
  if (cfg.lambda != 1 && cfg.lambda != -1) bad("lambda must be +1 or -1");
  if (!(cfg.loc_tol > 0.0)) bad("loc_tol must be positive");
  if (!(cfg.ode_tol > 0.0)) bad("ode_tol must be positive");
  if (cfg.jobs < 1) bad("jobs must be >= 1");
  if (cfg.cut_strategies.empty()) bad("cut_strategies must not be empty");
  if (cfg.has_window && (!(cfg.window.xmax > cfg.window.xmin) || !(cfg.window.ymax > cfg.window.ymin)))
    bad("window must have xmax > xmin and ymax > ymin");

  const bool needs_pair = cfg.mode != "soliton-check" && cfg.mode != "classify-exp";
  if (cfg.mode == "classify-exp") {
    if (!cfg.has_alpha || !cfg.has_omega || !cfg.has_c) bad("classify-exp needs alpha, omega and c");
    validate_triple(config_triple(cfg));
  }
  if (cfg.mode == "soliton-check" || (cfg.has_gamma && needs_pair)) {
    if (!cfg.has_gamma || !cfg.has_omega) bad("soliton spec needs gamma and omega");
    if (!(cfg.omega > 0.0)) bad("soliton requires omega > 0");
  }
  if (needs_pair && !cfg.has_gamma) {
    if (cfg.has_alpha) {
      if (!cfg.has_omega || !cfg.has_c) bad("single exponential needs alpha, omega and c");
      validate_triple(config_triple(cfg));
    } else {
      PeriodicPair p;
      p.lambda = cfg.lambda;
      p.tau = cfg.tau;
      validate_pair(p);
    }
  }
  if ((cfg.mode == "scan" || cfg.mode == "plot-data") && !default_window(cfg).conjugation_symmetric())
    bad("window must be symmetric under conjugation (ymin = -ymax)");
  if ((cfg.mode == "monodromy" || cfg.mode == "spectra") && cfg.k_points.empty())
    bad(cfg.mode + " needs at least one k");
  if (cfg.mode == "plot-data" && cfg.grid_n < 3) bad("grid_n must be >= 3");
  if (cfg.mode == "spectra" && !cfg.has_gamma &&
      (cfg.initial_path.empty() || cfg.trace_g0_path.empty() || cfg.trace_g1_path.empty()))
    bad("spectra needs gamma/omega or the files initial, trace_g0 and trace_g1");
  if (cfg.samples < 1) bad("samples must be >= 1");
}

PeriodicPair config_pair(const RunConfig& cfg) {
  if (cfg.has_gamma) return soliton_pair(soliton_params(cfg.gamma, cfg.omega));
  if (cfg.has_alpha) return triple_pair(config_triple(cfg));
  PeriodicPair p;
  p.lambda = cfg.lambda;
  p.tau = cfg.tau;
  p.g0_modes = cfg.g0_modes;
  p.g1_modes = cfg.g1_modes;
  validate_pair(p);
  return p;
}

// ---------------------------------------------------------------------------
// modes

namespace {

json run_classify(const RunConfig& cfg) {
  const ExponentialTriple t = config_triple(cfg);
  const auto res = classify_triple(t, cfg.cut_strategies, spectrum_options(cfg));
  json zeros = json::array();
  for (const auto& z : res.zeros) zeros.push_back(zero_json(z));
  json roots = json::array();
  for (const auto& r : res.omega2_roots)
    roots.push_back(json{{"root", cj(r.root)}, {"multiplicity", r.multiplicity}});
  return json{{"verdict", verdict_json(res.verdict)},
              {"family", json{{"name", res.tag.name}, {"parameters", res.tag.parameters}, {"note", res.tag.note}}},
              {"omega2_roots", roots},
              {"zeros", zeros},
              {"classifier_mismatch", res.mismatch}};
}

json run_scan(const RunConfig& cfg) {
  const PeriodicPair pair = config_pair(cfg);
  const Window w = default_window(cfg);
  const SpectrumOptions o = spectrum_options(cfg);
  const ZeroSearch zs = find_zeros(pair, w, ZeroTarget::G, o);
  Verdict v = verdict_from_zeros(pair, zs.zeros, zs.window, cfg.cut_strategies, o);
  if (zs.undecided) {
    v.notes += "zero search incomplete: " + zs.note;
    if (v.status == VerdictStatus::Consistent) v.status = VerdictStatus::Undecided;
  }
  json zeros = json::array();
  for (const auto& z : zs.zeros) zeros.push_back(zero_json(z));
  return json{{"verdict", verdict_json(v)},
              {"zeros", zeros},
              {"total_winding", zs.total_winding},
              {"search_window", window_json(zs.window)},
              {"search_note", zs.note}};
}

json run_soliton_check(const RunConfig& cfg) {
  const SolitonParams p = soliton_params(cfg.gamma, cfg.omega);
  const PeriodicPair pair = soliton_pair(p);
  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::vector<cplx> ks;
  while (static_cast<int>(ks.size()) < cfg.samples) {
    const cplx k(U(rng), U(rng));
    if (soliton_cut_distance(p, k) < 0.05 || std::abs(k - p.K1) < 0.05 || std::abs(k + p.K1) < 0.05 ||
        std::abs(k - p.K2) < 0.05)
      continue;
    ks.push_back(k);
  }
  std::vector<double> gr(ks.size()), rat(ks.size()), sg(ks.size()), ab(ks.size());
  parallel_for(ks.size(), cfg.jobs, [&](std::size_t i) {
    const cplx k = ks[i];
    gr[i] = soliton_global_relation_residual(p, k);
    const SolitonSpectra s = soliton_spectra(p, k);
    const SolitonSpectra r = soliton_spectra_rational(p, k);
    rat[i] = std::max(std::abs(s.a - r.a), std::abs(s.b - r.b));
    ContinuationOptions co;
    co.ode_tol = cfg.ode_tol;
    const FloquetPoint fp = anchored_point(pair, k, {}, co);
    const cplx expect = 2.0 * I_unit * std::sin(2.0 * k * k * pair.tau);
    sg[i] = std::abs(fp.sqrtG - expect) / std::max(1.0, std::abs(expect));
    ab[i] = fp.Sb_defined ? std::abs(fp.Sb.m22 - s.A) : 0.0;
  });
  auto mx = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
  const double l1 = soliton_l1_norm(p, 0.0);
  const double l1_err = std::abs(l1 - 2.0 * std::atan(std::exp(cfg.gamma)));
  json res{{"global_relation_max", mx(gr)},
           {"rational_forms_max", mx(rat)},
           {"sqrtG_relative_max", mx(sg)},
           {"Ab_vs_A_max", mx(ab)},
           {"l1_norm", l1},
           {"l1_norm_error", l1_err}};
  const bool pass = mx(gr) <= 1e-8 && mx(rat) <= 1e-8 && mx(sg) <= 1e-8 && mx(ab) <= 1e-8 && l1_err <= 1e-8;
  json kk = json::array();
  for (cplx k : ks) kk.push_back(cj(k));
  return json{{"residuals", res},
              {"pass", pass},
              {"samples", kk},
              {"params", json{{"alpha", p.alpha}, {"c", p.c}, {"K1", cj(p.K1)}, {"K2", cj(p.K2)}}}};
}

json run_monodromy(const RunConfig& cfg) {
  const PeriodicPair pair = config_pair(cfg);
  std::vector<json> rows(cfg.k_points.size());
  parallel_for(cfg.k_points.size(), cfg.jobs, [&](std::size_t i) {
    const cplx k = cfg.k_points[i];
    ContinuationOptions co;
    co.ode_tol = cfg.ode_tol;
    const Matrix2 Z = monodromy(pair, k, cfg.ode_tol);
    json row{{"k", cj(k)}, {"Z", matrix_json(Z)}, {"trace", cj(Z.trace())}};
    try {
      const FloquetPoint fp = anchored_point(pair, k, {}, co);
      row["G"] = cj(fp.G);
      row["sqrtG"] = cj(fp.sqrtG);
      row["z"] = cj(fp.z);
      row["log_z"] = cj(fp.logz);
      row["Omega_tilde"] = cj(fp.OmegaTilde);
      row["domain"] = to_string(label_from_signs(k, fp.logz, pair.tau, 1e-6));
      if (fp.Sb_defined)
        row["Sb"] = matrix_json(fp.Sb);
      else
        row["Sb_reason"] = "too close to a branch point";
    } catch (const NumericalError& e) {
      row["branch_error"] = e.what();
    }
    rows[i] = row;
  });
  return json{{"points", rows}, {"tau", pair.tau}, {"lambda", pair.lambda}};
}

json run_spectra(const RunConfig& cfg) {
  const PeriodicPair pair = config_pair(cfg);
  ScalarFn u0;
  double x_max = 0.0;
  BoundaryTraces traces;
  double T = cfg.horizon;
  std::string tail_note;
  if (cfg.has_gamma) {
    const SolitonParams p = soliton_params(cfg.gamma, cfg.omega);
    x_max = (40.0 + std::abs(cfg.gamma)) / std::sqrt(cfg.omega);
    u0 = [p](double x) { return soliton_profile(p, x, 0.0); };
    traces = background_traces(pair);
    if (T <= 0.0) T = 3.0 * pair.tau;
  } else {
    SampledInitialDatum d;
    read_complex_csv(cfg.initial_path, d.grid, d.values);
    validate_initial_datum(d);
    double M = 0.0;
    for (cplx v : d.values) M = std::max(M, std::abs(v));
    if (std::abs(d.values.back()) > 1e-10 * M && M > 0.0)
      throw NumericalError(ErrorKind::TailTooLarge, "|u0(x_N)| exceeds 1e-10 of its maximum");
    u0 = interpolate(d.grid, d.values);
    x_max = d.grid.back();
    std::vector<double> t0, t1;
    std::vector<cplx> v0, v1;
    read_complex_csv(cfg.trace_g0_path, t0, v0);
    read_complex_csv(cfg.trace_g1_path, t1, v1);
    if (t0.size() < 4 || t1.size() < 4 || t0.front() != 0.0 || t1.front() != 0.0)
      throw InputError(InputError::Kind::Validation, "traces need at least 4 samples starting at t = 0");
    traces = {interpolate(t0, v0), interpolate(t1, v1)};
    const double t_end = std::min(t0.back(), t1.back());
    T = T > 0.0 ? std::min(T, t_end) : t_end;
  }
  BoundaryOptions bo;
  bo.points_per_period = cfg.points_per_period;
  bo.ode_tol = cfg.ode_tol;
  ContinuationOptions co;
  co.ode_tol = cfg.ode_tol;

  std::vector<json> rows(cfg.k_points.size());
  parallel_for(cfg.k_points.size(), cfg.jobs, [&](std::size_t i) {
    const cplx k = cfg.k_points[i];
    json row{{"k", cj(k)}};
    SpectralSample s;
    s.k = k;
    bool have_ab = false, have_AB = false, have_conj = false;
    SpectralSample sc;
    if (k.imag() >= 0.0) {
      const InitialSpectra is = initial_spectra(u0, x_max, pair.lambda, k);
      s.a = is.a;
      s.b = is.b;
      have_ab = true;
      row["a"] = cj(s.a);
      row["b"] = cj(s.b);
    } else {
      row["ab_reason"] = "a, b need Im k >= 0";
    }
    auto boundary_at = [&](cplx kk, SpectralSample& out, const char* tag) {
      try {
        const FloquetPoint fp = anchored_point(pair, kk, {}, co);
        if (fp.OmegaTilde.imag() < 0.0) {
          row[std::string(tag) + "_reason"] = "Im Omega~ < 0 at this point";
          return false;
        }
        const BoundaryResult r = boundary_spectra(pair, fp, traces, T, bo);
        out.A = r.A;
        out.B = r.B;
        out.t_used = r.t_used;
        out.tail_estimate = r.tail_estimate;
        if (kk == k) row["Omega_tilde"] = cj(fp.OmegaTilde);
        return true;
      } catch (const NumericalError& e) {
        row[std::string(tag) + "_reason"] = e.what();
        return false;
      }
    };
    have_AB = boundary_at(k, s, "AB");
    if (have_AB) {
      row["A"] = cj(s.A);
      row["B"] = cj(s.B);
      row["t_used"] = s.t_used;
      row["tail_estimate"] = s.tail_estimate;
    }
    have_conj = boundary_at(std::conj(k), sc, "AB_conj");
    if (have_ab && have_conj) {
      s.d = compute_d(s, sc, pair.lambda);
      row["d"] = cj(s.d);
    } else {
      row["d_reason"] = "needs a, b at k and A, B at conj(k)";
    }
    if (have_ab && have_AB) {
      const double growth = row.contains("Omega_tilde")
                                ? row["Omega_tilde"]["im"].get<double>() + (2.0 * k * k).imag()
                                : 0.0;
      s.gr_residual = global_relation_residual(s);
      row["gr_residual"] = s.gr_residual;
      row["gr_checked"] = growth > kGrowthMargin;
    }
    rows[i] = row;
  });
  return json{{"samples", rows}, {"horizon", T}, {"growth_margin", kGrowthMargin}};
}

}  // namespace

// ---------------------------------------------------------------------------
// plot data

namespace {

struct Ray {
  cplx origin;
  cplx dir;
  bool upper;
};

// segment p-q meets the ray origin + s dir, s >= 0 (or passes very near the origin)
bool crosses(const Ray& r, cplx p, cplx q) {
  const cplx e = q - p;
  const double den = e.real() * r.dir.imag() - e.imag() * r.dir.real();
  const cplx w = r.origin - p;
  // distance of the origin from the segment
  const double len2 = std::norm(e);
  const double tt = len2 > 0.0 ? std::clamp((w.real() * e.real() + w.imag() * e.imag()) / len2, 0.0, 1.0) : 0.0;
  if (std::abs(p + tt * e - r.origin) < 1e-9) return true;
  if (den == 0.0) return false;
  const double t = (w.real() * r.dir.imag() - w.imag() * r.dir.real()) / den;  // along segment
  const double s = (w.real() * e.imag() - w.imag() * e.real()) / den;           // along ray
  return t >= 0.0 && t <= 1.0 && s >= 0.0;
}

// end point of the ray on the window boundary
cplx ray_exit(const Ray& r, const Window& w) {
  double smax = 1e300;
  auto clip = [&](double o, double d, double lo, double hi) {
    if (d > 0.0) smax = std::min(smax, (hi - o) / d);
    if (d < 0.0) smax = std::min(smax, (lo - o) / d);
  };
  clip(r.origin.real(), r.dir.real(), w.xmin, w.xmax);
  clip(r.origin.imag(), r.dir.imag(), w.ymin, w.ymax);
  return r.origin + std::max(0.0, smax) * r.dir;
}

}  // namespace

json emit_plotdata(const RunConfig& cfg, const PeriodicPair& pair, const Window& window,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const SpectrumOptions so = spectrum_options(cfg);
  const ZeroSearch zs = find_zeros(pair, window, ZeroTarget::G, so);
  std::vector<cplx> locs;
  for (const auto& z : zs.zeros) locs.push_back(z.location);

  const int n = cfg.grid_n;
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = window.xmin + (window.xmax - window.xmin) * i / (n - 1);
    ys[static_cast<std::size_t>(i)] = window.ymin + (window.ymax - window.ymin) * i / (n - 1);
  }
  const std::size_t N = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  auto idx = [n](int i, int j) { return static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i); };
  auto kat = [&](int i, int j) { return cplx(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]); };

  ContinuationOptions co = so.continuation();
  std::vector<cplx> corners{cplx(window.xmin, window.ymin), cplx(window.xmax, window.ymax),
                            cplx(window.xmin, window.ymax), cplx(window.xmax, window.ymin)};
  double R = 0.0;
  for (cplx c : corners) R = std::max(R, default_anchor_radius(c, locs));
  co.anchor_radius = R;

  std::vector<bool> have(N, false);
  std::vector<cplx> logz(N);
  std::vector<DomainLabel> label(N, DomainLabel::Boundary);
  std::vector<Ray> rays;
  std::string notes;

  for (bool upper : {true, false}) {
    BranchTracker tr(pair, co);
    BranchValue anchor;
    try {
      anchor = tr.anchor(upper, R);
    } catch (const NumericalError& e) {
      notes += std::string(e.what()) + "; ";
      continue;
    }
    std::vector<Ray> half_rays;
    for (const auto& z : zs.zeros) {
      if (z.parity != Parity::Odd) continue;
      const bool mine = upper ? z.location.imag() >= 0.0 : z.location.imag() <= 0.0;
      if (!mine) continue;
      const cplx d = z.location - anchor.k;
      half_rays.push_back({z.location, d / std::abs(d), upper});
    }
    rays.insert(rays.end(), half_rays.begin(), half_rays.end());
    auto blocked = [&](cplx p, cplx q) {
      for (const auto& r : half_rays)
        if (crosses(r, p, q)) return true;
      return false;
    };
    auto in_half = [&](int j) {
      const double y = ys[static_cast<std::size_t>(j)];
      return upper ? y > 1e-12 : y < -1e-12;
    };
    std::vector<BranchValue> val(N);
    for (int j0 = 0; j0 < n; ++j0) {
      if (!in_half(j0)) continue;
      for (int i0 = 0; i0 < n; ++i0) {
        if (have[idx(i0, j0)]) continue;
        try {
          val[idx(i0, j0)] = tr.follow(anchor, tr.path(anchor.k, kat(i0, j0), locs, !upper));
        } catch (const NumericalError& e) {
          notes += "grid point unreachable: " + std::string(e.what()) + "; ";
          continue;
        }
        have[idx(i0, j0)] = true;
        std::queue<std::pair<int, int>> q;
        q.push({i0, j0});
        while (!q.empty()) {
          const auto [i, j] = q.front();
          q.pop();
          const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
          for (int m = 0; m < 4; ++m) {
            const int a = i + di[m], b = j + dj[m];
            if (a < 0 || b < 0 || a >= n || b >= n || !in_half(b) || have[idx(a, b)]) continue;
            if (blocked(kat(i, j), kat(a, b))) continue;
            try {
              val[idx(a, b)] = tr.follow(val[idx(i, j)], tr.path(kat(i, j), kat(a, b), locs, !upper));
            } catch (const NumericalError&) {
              continue;
            }
            have[idx(a, b)] = true;
            q.push({a, b});
          }
        }
      }
    }
    for (std::size_t m = 0; m < N; ++m)
      if (have[m] && (upper ? val[m].k.imag() > 0.0 : val[m].k.imag() < 0.0)) {
        logz[m] = val[m].logz;
        label[m] = label_from_signs(val[m].k, val[m].logz, pair.tau, so.boundary_tol);
      }
  }

  // domains.csv
  {
    std::ostringstream o;
    o << "k_re,k_im,label,log_z_re,log_z_im\n";
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t m = idx(i, j);
        o << num(xs[static_cast<std::size_t>(i)]) << ',' << num(ys[static_cast<std::size_t>(j)]) << ','
          << to_string(label[m]) << ',' << (have[m] ? num(logz[m].real()) : "nan") << ','
          << (have[m] ? num(logz[m].imag()) : "nan") << '\n';
      }
    write_text(fs::path(dir) / "domains.csv", o.str());
  }
  // zeros.csv
  {
    std::ostringstream o;
    o << "k_re,k_im,multiplicity,parity,half_plane\n";
    for (const auto& z : zs.zeros)
      o << num(z.location.real()) << ',' << num(z.location.imag()) << ',' << z.multiplicity << ','
        << to_string(z.parity) << ',' << to_string(z.half_plane) << '\n';
    write_text(fs::path(dir) / "zeros.csv", o.str());
  }
  // cuts.csv
  int cut_id = 0;
  {
    std::ostringstream o;
    o << "polyline_id,k_re,k_im\n";
    if (cfg.has_gamma) {
      const SolitonParams p = soliton_params(cfg.gamma, cfg.omega);
      const double lo = std::abs(p.K2.imag()), hi = p.K1.imag();
      o << cut_id << ",0," << num(lo) << '\n' << cut_id << ",0," << num(hi) << '\n';
      ++cut_id;
      o << cut_id << ",0," << num(-hi) << '\n' << cut_id << ",0," << num(-lo) << '\n';
      ++cut_id;
    } else {
      for (const auto& r : rays) {
        const cplx e = ray_exit(r, window);
        o << cut_id << ',' << num(r.origin.real()) << ',' << num(r.origin.imag()) << '\n'
          << cut_id << ',' << num(e.real()) << ',' << num(e.imag()) << '\n';
        ++cut_id;
      }
    }
    write_text(fs::path(dir) / "cuts.csv", o.str());
  }
  // contour.csv: the real axis and the zero set of Re log z (= tau Im Omega~)
  int seg_id = 0;
  {
    std::ostringstream o;
    o << "polyline_id,k_re,k_im\n";
    if (window.ymin <= 0.0 && window.ymax >= 0.0) {
      o << seg_id << ',' << num(window.xmin) << ",0\n" << seg_id << ',' << num(window.xmax) << ",0\n";
      ++seg_id;
    }
    auto blocked_any = [&](cplx p, cplx q) {
      for (const auto& r : rays)
        if (crosses(r, p, q)) return true;
      return false;
    };
    for (int j = 0; j + 1 < n; ++j)
      for (int i = 0; i + 1 < n; ++i) {
        const std::size_t c[4] = {idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)};
        const cplx kc[4] = {kat(i, j), kat(i + 1, j), kat(i + 1, j + 1), kat(i, j + 1)};
        bool ok = true;
        for (int m = 0; m < 4; ++m) ok = ok && have[c[m]];
        if (!ok) continue;
        if ((kc[0].imag() > 0.0) != (kc[2].imag() > 0.0)) continue;
        for (int m = 0; m < 4; ++m) ok = ok && !blocked_any(kc[m], kc[(m + 1) % 4]);
        if (!ok) continue;
        std::vector<cplx> pts;
        for (int m = 0; m < 4; ++m) {
          const double f0 = logz[c[m]].real(), f1 = logz[c[(m + 1) % 4]].real();
          if ((f0 < 0.0) != (f1 < 0.0)) {
            const double t = f0 / (f0 - f1);
            pts.push_back(kc[m] + t * (kc[(m + 1) % 4] - kc[m]));
          }
        }
        for (std::size_t m = 0; m + 1 < pts.size(); m += 2) {
          o << seg_id << ',' << num(pts[m].real()) << ',' << num(pts[m].imag()) << '\n'
            << seg_id << ',' << num(pts[m + 1].real()) << ',' << num(pts[m + 1].imag()) << '\n';
          ++seg_id;
        }
      }
    write_text(fs::path(dir) / "contour.csv", o.str());
  }
  std::size_t counts[5] = {0, 0, 0, 0, 0};
  for (std::size_t m = 0; m < N; ++m) ++counts[static_cast<int>(label[m])];
  return json{{"files", {"domains.csv", "zeros.csv", "cuts.csv", "contour.csv"}},
              {"grid_n", n},
              {"anchor_radius", R},
              {"zeros", zs.zeros.size()},
              {"cuts", cut_id},
              {"contour_segments", seg_id},
              {"label_counts", json{{"D1", counts[0]}, {"D2", counts[1]}, {"D3", counts[2]}, {"D4", counts[3]}, {"boundary", counts[4]}}},
              {"notes", notes}};
}

// ---------------------------------------------------------------------------

json run(const RunConfig& cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  json body;
  if (cfg.mode == "classify-exp") body = run_classify(cfg);
  else if (cfg.mode == "scan") body = run_scan(cfg);
  else if (cfg.mode == "soliton-check") body = run_soliton_check(cfg);
  else if (cfg.mode == "monodromy") body = run_monodromy(cfg);
  else if (cfg.mode == "spectra") body = run_spectra(cfg);
  else if (cfg.mode == "plot-data") {
    const std::string dir = cfg.out_dir.empty() ? std::string("plot-data") : cfg.out_dir;
    body = json{{"plot_data", emit_plotdata(cfg, config_pair(cfg), default_window(cfg), dir)}};
  }

  json inputs = json::object();
  for (const auto& [k, v] : cfg.raw) inputs[k] = v.size() == 1 ? json(v.front()) : json(v);
  json strat = json::array();
  for (CutStrategy s : cfg.cut_strategies) strat.push_back(to_string(s));
  json report{{"schema_version", kSchemaVersion},
              {"mode", cfg.mode},
              {"inputs", inputs},
              {"defaults", json{{"loc_tol", cfg.loc_tol},
                                {"ode_tol", cfg.ode_tol},
                                {"lambda", cfg.lambda},
                                {"cut_strategies", strat},
                                {"window", window_json(default_window(cfg))}}}};
  for (auto it = body.begin(); it != body.end(); ++it) report[it.key()] = it.value();
  report["timing"] = json{{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_text(std::filesystem::path(cfg.out_dir) / "report.json", report.dump(2) + "\n");
  }
  return report;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Floquet consistency checks for periodic boundary data of the half-line NLS"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  double tol = 0.0;
  int jobs = 0;
  const char* names[] = {"classify-exp", "scan", "soliton-check", "monodromy", "spectra", "plot-data"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name, std::string("run ") + name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--tol", tol, "zero localization tolerance");
    sub->add_option("--jobs", jobs, "worker threads");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    std::ifstream in(config_path);
    if (!in) throw InputError(InputError::Kind::Parse, "cannot open config " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg = parse_config(ss.str());
    if (!cfg.mode.empty() && cfg.mode != mode)
      throw InputError(InputError::Kind::Validation, "config mode '" + cfg.mode + "' differs from subcommand");
    cfg.mode = mode;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tol > 0.0) cfg.loc_tol = tol;
    if (jobs > 0) cfg.jobs = jobs;
    const json report = run(cfg);
    if (cfg.out_dir.empty()) std::cout << report.dump(2) << "\n";
    return 0;
  } catch (const InputError& e) {
    std::cerr << (e.kind() == InputError::Kind::Parse ? "ParseError: " : "ValidationError: ") << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "NumericalError: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace nlsf
