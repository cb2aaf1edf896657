#include "zk/config.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "zk/diagnostics.hpp"
#include "zk/errors.hpp"
#include "zk/rng.hpp"
#include "zk/snapshot.hpp"

namespace zk {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const char* kPresetNames[] = {
    "linear-dispersion", "conservation",        "h-sweep", "decay-sweep",
    "perturbation",      "interpolation-audit", "custom",
};

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string fmtg(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

std::string hex64(std::uint64_t v) {
  char b[20];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(v));
  return b;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) {
    throw DataError(std::string("config: ") + where + " must be an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) {
      if (it.key() == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw DataError("config: unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

Nonlinearity nonlinearity_from_name(const std::string& s) {
  if (s == "auto") return Nonlinearity::Auto;
  if (s == "off") return Nonlinearity::Off;
  if (s == "quadratic") return Nonlinearity::Quadratic;
  throw DataError("config: unknown nonlinearity \"" + s + "\"");
}

const char* nonlinearity_name(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Auto: return "auto";
    case Nonlinearity::Off: return "off";
    case Nonlinearity::Quadratic: return "quadratic";
  }
  return "auto";
}

WeightKind kind_from_name(const std::string& s) {
  if (s == "one") return WeightKind::One;
  if (s == "exp2alpha") return WeightKind::Exp2Alpha;
  if (s == "rho-alpha") return WeightKind::RhoAlpha;
  if (s == "kappa-alpha-beta") return WeightKind::KappaAlphaBeta;
  throw DataError("config: unknown weight kind \"" + s + "\"");
}

const char* kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::One: return "one";
    case WeightKind::Exp2Alpha: return "exp2alpha";
    case WeightKind::RhoAlpha: return "rho-alpha";
    case WeightKind::KappaAlphaBeta: return "kappa-alpha-beta";
  }
  return "one";
}

void apply_initial(const json& j, InitialSpec& out, const char* where) {
  check_keys(j,
             {"type", "amplitude", "x0", "width", "transverse", "l1", "l2", "kx", "wy",
              "wz", "kband", "l1band", "l2band", "l2_normalize", "file"},
             where);
  if (j.contains("type")) j.at("type").get_to(out.type);
  if (j.contains("amplitude")) j.at("amplitude").get_to(out.amplitude);
  if (j.contains("x0")) j.at("x0").get_to(out.x0);
  if (j.contains("width")) j.at("width").get_to(out.width);
  if (j.contains("transverse")) j.at("transverse").get_to(out.transverse);
  if (j.contains("l1")) j.at("l1").get_to(out.l1);
  if (j.contains("l2")) j.at("l2").get_to(out.l2);
  if (j.contains("kx")) j.at("kx").get_to(out.kx);
  if (j.contains("wy")) j.at("wy").get_to(out.wy);
  if (j.contains("wz")) j.at("wz").get_to(out.wz);
  if (j.contains("kband")) j.at("kband").get_to(out.kband);
  if (j.contains("l1band")) j.at("l1band").get_to(out.l1band);
  if (j.contains("l2band")) j.at("l2band").get_to(out.l2band);
  if (j.contains("l2_normalize")) {
    if (j.at("l2_normalize").is_null()) {
      out.l2_normalize.reset();
    } else {
      out.l2_normalize = j.at("l2_normalize").get<double>();
    }
  }
  if (j.contains("file")) j.at("file").get_to(out.file);
}

void apply_json(const json& j, ExperimentConfig& cfg) {
  check_keys(j,
             {"preset", "name", "domain", "solver", "initial", "forcing", "diagnostics",
              "sweep", "seed", "snapshots"},
             "the top level");
  if (j.contains("name")) j.at("name").get_to(cfg.name);
  if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
  if (j.contains("snapshots")) j.at("snapshots").get_to(cfg.snapshots);
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    check_keys(d, {"L1", "L2", "X", "Nx", "Ny", "Nz", "dealias"}, "domain");
    if (d.contains("L1")) d.at("L1").get_to(cfg.domain.L1);
    if (d.contains("L2")) d.at("L2").get_to(cfg.domain.L2);
    if (d.contains("X")) d.at("X").get_to(cfg.domain.X);
    if (d.contains("Nx")) d.at("Nx").get_to(cfg.domain.Nx);
    if (d.contains("Ny")) d.at("Ny").get_to(cfg.domain.Ny);
    if (d.contains("Nz")) d.at("Nz").get_to(cfg.domain.Nz);
    if (d.contains("dealias")) d.at("dealias").get_to(cfg.domain.dealias);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, {"b", "h", "nonlinearity", "dt", "T", "snapshot_stride", "picard_check"},
               "solver");
    if (s.contains("b")) s.at("b").get_to(cfg.solver.b);
    if (s.contains("h")) s.at("h").get_to(cfg.solver.h);
    if (s.contains("nonlinearity")) {
      cfg.solver.nonlinearity = nonlinearity_from_name(s.at("nonlinearity").get<std::string>());
    }
    if (s.contains("dt")) s.at("dt").get_to(cfg.solver.dt);
    if (s.contains("T")) s.at("T").get_to(cfg.solver.T);
    if (s.contains("snapshot_stride")) s.at("snapshot_stride").get_to(cfg.solver.snapshot_stride);
    if (s.contains("picard_check")) s.at("picard_check").get_to(cfg.solver.picard_check);
  }
  if (j.contains("initial")) apply_initial(j.at("initial"), cfg.initial, "initial");
  if (j.contains("forcing")) {
    const json& f = j.at("forcing");
    check_keys(f, {"type", "profile", "omega"}, "forcing");
    if (f.contains("type")) f.at("type").get_to(cfg.forcing.type);
    if (f.contains("profile")) apply_initial(f.at("profile"), cfg.forcing.profile, "forcing.profile");
    if (f.contains("omega")) f.at("omega").get_to(cfg.forcing.omega);
  }
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    check_keys(d,
               {"weight", "window_max", "guard_threshold", "weighted_identity",
                "track_gradient_lines"},
               "diagnostics");
    if (d.contains("weight")) {
      const json& w = d.at("weight");
      check_keys(w, {"kind", "alpha", "beta", "derivative"}, "diagnostics.weight");
      if (w.contains("kind")) {
        cfg.diagnostics.weight.kind = kind_from_name(w.at("kind").get<std::string>());
      }
      if (w.contains("alpha")) w.at("alpha").get_to(cfg.diagnostics.weight.alpha);
      if (w.contains("beta")) w.at("beta").get_to(cfg.diagnostics.weight.beta);
      if (w.contains("derivative")) w.at("derivative").get_to(cfg.diagnostics.weight.derivative);
    }
    if (d.contains("window_max")) {
      if (d.at("window_max").is_null()) {
        cfg.diagnostics.window_max.reset();
      } else {
        cfg.diagnostics.window_max = d.at("window_max").get<double>();
      }
    }
    if (d.contains("guard_threshold")) d.at("guard_threshold").get_to(cfg.diagnostics.guard_threshold);
    if (d.contains("weighted_identity")) d.at("weighted_identity").get_to(cfg.diagnostics.weighted_identity);
    if (d.contains("track_gradient_lines")) d.at("track_gradient_lines").get_to(cfg.diagnostics.track_gradient_lines);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, {"h", "alpha", "eps", "samples"}, "sweep");
    if (s.contains("h")) s.at("h").get_to(cfg.sweep.h);
    if (s.contains("alpha")) s.at("alpha").get_to(cfg.sweep.alpha);
    if (s.contains("eps")) s.at("eps").get_to(cfg.sweep.eps);
    if (s.contains("samples")) s.at("samples").get_to(cfg.sweep.samples);
  }
}

ojson initial_json(const InitialSpec& s) {
  ojson o;
  o["type"] = s.type;
  o["amplitude"] = s.amplitude;
  o["x0"] = s.x0;
  o["width"] = s.width;
  o["transverse"] = s.transverse;
  o["l1"] = s.l1;
  o["l2"] = s.l2;
  o["kx"] = s.kx;
  o["wy"] = s.wy;
  o["wz"] = s.wz;
  o["kband"] = s.kband;
  o["l1band"] = s.l1band;
  o["l2band"] = s.l2band;
  if (s.l2_normalize) {
    o["l2_normalize"] = *s.l2_normalize;
  } else {
    o["l2_normalize"] = nullptr;
  }
  o["file"] = s.file;
  return o;
}

void atomic_write(const std::filesystem::path& p, const std::string& text) {
  const std::filesystem::path tmp = p.string() + ".partial";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open " + tmp.string() + " for writing");
    os << text;
    if (!os) throw DataError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

std::string metrics_csv(const RunResult& rr) {
  std::string s = "t,l2,energy,weighted_l2,max_abs,seam_magnitude,res_l2,res_weighted\n";
  for (const auto& r : rr.records) {
    s += fmt(r.t) + ',' + fmt(r.l2) + ',' + fmt(r.energy) + ',' + fmt(r.weighted_l2) +
         ',' + fmt(r.max_abs) + ',' + fmt(r.seam_magnitude) + ',' + fmt(r.res_l2) + ',' +
         fmt(r.res_weighted) + '\n';
  }
  return s;
}

double spec_distance(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.spec.size(); ++i) {
    const auto d = a.spec[i] - b.spec[i];
    s += d.real() * d.real() + d.imag() * d.imag();
  }
  return std::sqrt(s / (2.0 * a.dom.X));
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errs[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
}

std::string identity_lines(const RunResult& rr) {
  std::string s;
  if (rr.h == 0.0) {
    s += "identity mass-balance max residual: " + fmt(identity_residual(rr, IdentityKind::MassBalance)) + "\n";
  } else {
    s += "identity regularized-balance max residual: " + fmt(identity_residual(rr, IdentityKind::RegularizedMass)) + "\n";
  }
  if (rr.weighted_identity) {
    s += "identity weighted-exp max residual: " + fmt(identity_residual(rr, IdentityKind::WeightedExp)) + "\n";
  }
  return s;
}

}  // namespace

Preset preset_from_name(const std::string& name) {
  for (int i = 0; i < 7; ++i) {
    if (name == kPresetNames[i]) return static_cast<Preset>(i);
  }
  throw UsageError("unknown preset \"" + name + "\"");
}

std::string preset_name(Preset p) { return kPresetNames[static_cast<int>(p)]; }

void ExperimentConfig::validate() const {
  if (name.empty()) throw DataError("config: name must not be empty");
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) throw DataError("config: name may use only [A-Za-z0-9._-]");
  }
  if (name == "." || name == "..") throw DataError("config: name must not be a dot path");
  domain.validate();
  solver.validate();
  diagnostics.weight.validate();
  if (!(diagnostics.guard_threshold > 0.0)) {
    throw DomainError("config: diagnostics.guard_threshold must be positive");
  }
  if (diagnostics.window_max && !(std::abs(*diagnostics.window_max) <= domain.X)) {
    throw DomainError("config: diagnostics.window_max must lie within [-X, X]");
  }
  if (sweep.samples < 1) throw DomainError("config: sweep.samples must be >= 1");
  if (preset == Preset::HSweep) {
    if (sweep.h.empty()) throw DataError("config: h-sweep needs sweep.h values");
    for (double h : sweep.h) {
      if (!(h > 0.0 && h <= 1.0)) throw DomainError("config: sweep.h values must be in (0, 1]");
    }
  }
  if (preset == Preset::DecaySweep) {
    if (sweep.alpha.empty()) throw DataError("config: decay-sweep needs sweep.alpha values");
    for (double a : sweep.alpha) {
      if (!(a > 0.0 && a <= 1.0)) throw DomainError("config: sweep.alpha values must be in (0, 1]");
    }
    if (!diagnostics.window_max) {
      throw DataError("config: decay-sweep needs diagnostics.window_max");
    }
  }
  if (preset == Preset::Perturbation) {
    if (sweep.eps.empty()) throw DataError("config: perturbation needs sweep.eps values");
    for (double e : sweep.eps) {
      if (!(e >= 0.0)) throw DomainError("config: sweep.eps values must be >= 0");
    }
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw DataError("config: the top level must be an object");
  ExperimentConfig cfg;
  if (j.contains("preset")) {
    std::string p;
    try {
      j.at("preset").get_to(p);
    } catch (const json::exception& e) {
      throw DataError(std::string("config: ") + e.what());
    }
    cfg = preset_config(preset_from_name(p));
  }
  try {
    apply_json(j, cfg);
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_json(const ExperimentConfig& cfg) {
  ojson o;
  o["preset"] = preset_name(cfg.preset);
  o["name"] = cfg.name;
  {
    ojson d;
    d["L1"] = cfg.domain.L1;
    d["L2"] = cfg.domain.L2;
    d["X"] = cfg.domain.X;
    d["Nx"] = cfg.domain.Nx;
    d["Ny"] = cfg.domain.Ny;
    d["Nz"] = cfg.domain.Nz;
    d["dealias"] = cfg.domain.dealias;
    o["domain"] = std::move(d);
  }
  {
    ojson s;
    s["b"] = cfg.solver.b;
    s["h"] = cfg.solver.h;
    s["nonlinearity"] = nonlinearity_name(cfg.solver.nonlinearity);
    s["dt"] = cfg.solver.dt;
    s["T"] = cfg.solver.T;
    s["snapshot_stride"] = cfg.solver.snapshot_stride;
    s["picard_check"] = cfg.solver.picard_check;
    o["solver"] = std::move(s);
  }
  o["initial"] = initial_json(cfg.initial);
  {
    ojson f;
    f["type"] = cfg.forcing.type;
    f["profile"] = initial_json(cfg.forcing.profile);
    f["omega"] = cfg.forcing.omega;
    o["forcing"] = std::move(f);
  }
  {
    ojson d;
    ojson w;
    w["kind"] = kind_name(cfg.diagnostics.weight.kind);
    w["alpha"] = cfg.diagnostics.weight.alpha;
    w["beta"] = cfg.diagnostics.weight.beta;
    w["derivative"] = cfg.diagnostics.weight.derivative;
    d["weight"] = std::move(w);
    if (cfg.diagnostics.window_max) {
      d["window_max"] = *cfg.diagnostics.window_max;
    } else {
      d["window_max"] = nullptr;
    }
    d["guard_threshold"] = cfg.diagnostics.guard_threshold;
    d["weighted_identity"] = cfg.diagnostics.weighted_identity;
    d["track_gradient_lines"] = cfg.diagnostics.track_gradient_lines;
    o["diagnostics"] = std::move(d);
  }
  {
    ojson s;
    s["h"] = cfg.sweep.h;
    s["alpha"] = cfg.sweep.alpha;
    s["eps"] = cfg.sweep.eps;
    s["samples"] = cfg.sweep.samples;
    o["sweep"] = std::move(s);
  }
  o["seed"] = cfg.seed;
  o["snapshots"] = cfg.snapshots;
  return o.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = canonical_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void apply_override(ExperimentConfig& cfg, const std::string& dotted_kv) {
  const auto eq = dotted_kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("override must look like section.key=value, got \"" + dotted_kv + "\"");
  }
  std::string path = dotted_kv.substr(0, eq);
  const std::string value = dotted_kv.substr(eq + 1);
  for (char& c : path) {
    if (c == '.') c = '/';
  }
  json v;
  try {
    v = json::parse(value);
  } catch (const json::exception&) {
    v = value;  // unquoted strings pass through verbatim
  }
  json j;
  try {
    j = json::parse(canonical_json(cfg));
    j[json::json_pointer("/" + path)] = v;
  } catch (const json::exception& e) {
    throw UsageError("override \"" + dotted_kv + "\": " + e.what());
  }
  cfg = parse_config(j.dump());
}

Field build_initial(const Transforms& tr, const InitialSpec& spec, std::uint64_t seed) {
  const DomainSpec& dom = tr.dom();
  Field u;
  if (spec.type == "zero") {
    u = make_physical_field(dom);
  } else if (spec.type == "gaussian-pulse") {
    u = make_physical_field(dom);
    std::vector<double> gx(dom.Nx), gy(dom.Ny), gz(dom.Nz);
    for (int j = 0; j < dom.Nx; ++j) {
      const double r = (dom.x(j) - spec.x0) / spec.width;
      gx[j] = spec.amplitude * std::exp(-r * r);
    }
    if (spec.transverse == "mode") {
      if (spec.l1 < 1 || spec.l1 > dom.Ny || spec.l2 < 1 || spec.l2 > dom.Nz) {
        throw DomainError("initial: transverse mode indices out of range");
      }
      const double pi = std::acos(-1.0);
      for (int m = 0; m < dom.Ny; ++m) gy[m] = std::sin(pi * spec.l1 * dom.y(m) / dom.L1);
      for (int n = 0; n < dom.Nz; ++n) gz[n] = std::sin(pi * spec.l2 * dom.z(n) / dom.L2);
    } else if (spec.transverse == "gaussian") {
      const double wy = spec.wy > 0.0 ? spec.wy : dom.L1 / 5.0;
      const double wz = spec.wz > 0.0 ? spec.wz : dom.L2 / 5.0;
      for (int m = 0; m < dom.Ny; ++m) {
        const double r = (dom.y(m) - 0.5 * dom.L1) / wy;
        gy[m] = std::exp(-r * r);
      }
      for (int n = 0; n < dom.Nz; ++n) {
        const double r = (dom.z(n) - 0.5 * dom.L2) / wz;
        gz[n] = std::exp(-r * r);
      }
    } else {
      throw DataError("config: unknown transverse profile \"" + spec.transverse + "\"");
    }
    for (int j = 0; j < dom.Nx; ++j) {
      for (int m = 0; m < dom.Ny; ++m) {
        const double a = gx[j] * gy[m];
        for (int n = 0; n < dom.Nz; ++n) u.phys[dom.index(j, m, n)] = a * gz[n];
      }
    }
  } else if (spec.type == "single-mode") {
    if (spec.kx < 0 || spec.kx >= dom.Nx / 2) {
      throw DomainError("initial: kx out of range [0, Nx/2)");
    }
    if (spec.l1 < 1 || spec.l1 > dom.Ny || spec.l2 < 1 || spec.l2 > dom.Nz) {
      throw DomainError("initial: transverse mode indices out of range");
    }
    u = make_spectral_field(dom);
    const int m = spec.l1 - 1, n = spec.l2 - 1;
    if (spec.kx == 0) {
      u.spec[dom.index(0, m, n)] = 2.0 * spec.amplitude * dom.X;
    } else {
      u.spec[dom.index(spec.kx, m, n)] = spec.amplitude * dom.X;
      u.spec[dom.index(dom.Nx - spec.kx, m, n)] = spec.amplitude * dom.X;
    }
  } else if (spec.type == "random") {
    u = random_band_limited(tr, spec.kband, spec.l1band, spec.l2band, seed);
    for (auto& c : u.spec) c *= spec.amplitude;
  } else if (spec.type == "file") {
    if (spec.file.empty()) throw DataError("config: initial type file needs a path");
    u = read_snapshot(spec.file, dom);
  } else {
    throw DataError("config: unknown initial type \"" + spec.type + "\"");
  }
  if (spec.l2_normalize) {
    const double target = *spec.l2_normalize;
    if (!(target >= 0.0)) throw DomainError("initial: l2_normalize must be >= 0");
    const double nrm = l2_norm(u);
    if (!(nrm > 0.0)) throw DataError("initial: cannot normalize the zero field");
    const double s = target / nrm;
    for (auto& v : u.phys) v *= s;
    for (auto& c : u.spec) c *= s;
  }
  return u;
}

std::optional<Forcing> build_forcing(const Transforms& tr, const ForcingSpec& spec,
                                     std::uint64_t seed) {
  if (spec.type == "none") return std::nullopt;
  if (spec.type != "modulated") {
    throw DataError("config: unknown forcing type \"" + spec.type + "\"");
  }
  Forcing f;
  f.profile = build_initial(tr, spec.profile, CounterRng::hash(seed ^ 0x666f726365ull));
  if (f.profile.rep == Rep::Physical) tr.to_spectral(f.profile);
  const double omega = spec.omega;
  f.amp = [omega](double t) { return std::cos(omega * t); };
  return f;
}

namespace {

struct SingleOutcome {
  RunResult rr;
  Field final_state;
  Field initial_state;
};

SingleOutcome run_single(const Transforms& tr, const ExperimentConfig& cfg) {
  SingleOutcome out;
  out.initial_state = build_initial(tr, cfg.initial, cfg.seed);
  const auto forcing = build_forcing(tr, cfg.forcing, cfg.seed);
  out.final_state = make_spectral_field(tr.dom());
  RecordHook keep = [&](double, const Field& u) { out.final_state = u; };
  Field u0 = out.initial_state;
  out.rr = run(tr, std::move(u0), cfg.solver, forcing ? &*forcing : nullptr,
               cfg.diagnostics, keep);
  return out;
}

std::string run_summary_lines(const ExperimentConfig& cfg, const RunResult& rr) {
  std::string s;
  s += "steps: " + std::to_string(rr.step_count) + "  dt: " + fmt(cfg.solver.dt) +
       "  T: " + fmt(rr.t_final) + "\n";
  s += "records: " + std::to_string(rr.records.size()) + "\n";
  const auto& last = rr.records.back();
  s += "final: t=" + fmt(last.t) + " l2=" + fmt(last.l2) + " energy=" + fmt(last.energy) +
       " max_abs=" + fmt(last.max_abs) + "\n";
  s += identity_lines(rr);
  if (rr.picard) {
    s += "picard diffs:";
    for (double d : rr.picard->diffs) s += " " + fmt(d);
    s += "\npicard vs step: " + fmt(rr.picard->vs_step) + "\n";
  }
  return s;
}

}  // namespace

std::filesystem::path execute(const ExperimentConfig& cfg_in, const ExecuteOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.validate();
  if (opts.jobs < 1) throw UsageError("jobs must be >= 1");

  const std::filesystem::path dir = opts.output_root / cfg.name;
  std::filesystem::create_directories(dir);
  atomic_write(dir / "config.json", canonical_json(cfg));

  std::string rep;
  rep += "experiment: " + preset_name(cfg.preset) + "\n";
  rep += "config-hash: " + hex64(config_hash(cfg)) + "\n";
  rep += "domain: Nx=" + std::to_string(cfg.domain.Nx) + " Ny=" + std::to_string(cfg.domain.Ny) +
         " Nz=" + std::to_string(cfg.domain.Nz) + " X=" + fmtg(cfg.domain.X) +
         " L1=" + fmtg(cfg.domain.L1) + " L2=" + fmtg(cfg.domain.L2) + "\n";
  bool warned = false;

  switch (cfg.preset) {
    case Preset::Custom:
    case Preset::LinearDispersion:
    case Preset::Conservation: {
      const Transforms tr(cfg.domain);
      SingleOutcome out = run_single(tr, cfg);
      atomic_write(dir / "metrics.csv", metrics_csv(out.rr));
      rep += run_summary_lines(cfg, out.rr);
      if (cfg.preset == Preset::Conservation) {
        const auto cons = conservation_report(out.rr);
        rep += "l2 relative drift: " + fmt(cons.l2_drift) + "\n";
        rep += "energy relative drift: " + fmt(cons.energy_drift) + "\n";
        rep += "energy at t0: " + fmt(cons.e0) + "\n";
      }
      if (cfg.snapshots) {
        Field ip = out.initial_state.rep == Rep::Physical ? out.initial_state
                                                          : tr.physical_copy(out.initial_state);
        write_snapshot(dir / "initial.zkf1", ip);
        write_snapshot(dir / "final.zkf1", tr.physical_copy(out.final_state));
      }
      warned = out.rr.truncation_warning;
      break;
    }
    case Preset::HSweep: {
      const int n = static_cast<int>(cfg.sweep.h.size());
      std::vector<SingleOutcome> outs(static_cast<std::size_t>(n));
      parallel_for(n, opts.jobs, [&](int i) {
        ExperimentConfig c = cfg;
        c.solver.h = cfg.sweep.h[static_cast<std::size_t>(i)];
        const Transforms tr(c.domain);
        outs[static_cast<std::size_t>(i)] = run_single(tr, c);
      });
      for (int i = 0; i < n; ++i) {
        const double h = cfg.sweep.h[static_cast<std::size_t>(i)];
        const auto& o = outs[static_cast<std::size_t>(i)];
        atomic_write(dir / ("metrics-h" + fmtg(h) + ".csv"), metrics_csv(o.rr));
        rep += "h=" + fmtg(h) + " final l2=" + fmt(o.rr.records.back().l2) +
               " regularized-balance max residual=" +
               fmt(identity_residual(o.rr, IdentityKind::RegularizedMass)) + "\n";
        warned = warned || o.rr.truncation_warning;
      }
      for (int i = 0; i + 1 < n; ++i) {
        const double d = spec_distance(outs[static_cast<std::size_t>(i)].final_state,
                                       outs[static_cast<std::size_t>(i + 1)].final_state);
        rep += "distance h=" + fmtg(cfg.sweep.h[static_cast<std::size_t>(i)]) + " to h=" +
               fmtg(cfg.sweep.h[static_cast<std::size_t>(i + 1)]) + ": " + fmt(d) + "\n";
      }
      break;
    }
    case Preset::DecaySweep: {
      const int n = static_cast<int>(cfg.sweep.alpha.size());
      std::vector<DecayReport> reps(static_cast<std::size_t>(n));
      parallel_for(n, opts.jobs, [&](int i) {
        const Transforms tr(cfg.domain);
        Field u0 = build_initial(tr, cfg.initial, cfg.seed);
        reps[static_cast<std::size_t>(i)] =
            decay_experiment(tr, std::move(u0), cfg.solver, cfg.sweep.alpha[static_cast<std::size_t>(i)],
                             *cfg.diagnostics.window_max, cfg.diagnostics.guard_threshold);
      });
      for (int i = 0; i < n; ++i) {
        const auto& r = reps[static_cast<std::size_t>(i)];
        const double a = cfg.sweep.alpha[static_cast<std::size_t>(i)];
        atomic_write(dir / ("metrics-alpha" + fmtg(a) + ".csv"), metrics_csv(r.run));
        rep += "alpha=" + fmtg(a) + " fitted rate=" + fmt(r.fitted_rate) +
               " predicted rate=" + fmt(r.prediction.rate) +
               " nonincreasing=" + (r.nonincreasing ? "yes" : "no") +
               " guard=" + (r.valid ? "quiet" : "violated") + "\n";
        warned = warned || !r.valid;
      }
      break;
    }
    case Preset::Perturbation: {
      const Transforms tr(cfg.domain);
      Field u0 = build_initial(tr, cfg.initial, cfg.seed);
      const Field pert =
          random_band_limited(tr, cfg.initial.kband, cfg.initial.l1band, cfg.initial.l2band,
                              CounterRng::hash(cfg.seed ^ 0x70657274ull));
      const auto cd = continuous_dependence(tr, u0, pert, cfg.sweep.eps, cfg.solver,
                                            cfg.diagnostics.weight);
      if (!cd.base.records.empty()) atomic_write(dir / "metrics.csv", metrics_csv(cd.base));
      for (std::size_t i = 0; i < cd.eps.size(); ++i) {
        rep += "eps=" + fmtg(cd.eps[i]) + " sup ratio=" + fmt(cd.ratios[i]) + "\n";
      }
      rep += std::string("exact-match: ") + (cd.exact_match ? "yes" : "no") + "\n";
      warned = cd.base.truncation_warning;
      break;
    }
    case Preset::InterpolationAudit: {
      struct Combo {
        int k, m;
        double q;
      };
      const Combo combos[] = {{1, 0, 2.0}, {1, 0, 4.0}, {1, 0, 6.0},
                              {2, 0, 4.0}, {2, 1, 2.0}, {2, 0, 8.0}};
      struct Task {
        InterpSpec spec;
        std::string label;
        double max_n = 0.0, max_2n = 0.0;
        int degenerate = 0;
      };
      std::vector<Task> tasks;
      for (const auto& c : combos) {
        for (int wp = 0; wp < 2; ++wp) {
          Task t;
          t.spec.k = c.k;
          t.spec.m = c.m;
          t.spec.q = c.q;
          if (wp == 0) {
            t.spec.w1 = WeightSpec{WeightKind::One, 0.0, 1.0, false};
            t.spec.w2 = WeightSpec{WeightKind::One, 0.0, 1.0, false};
            t.label = "unweighted";
          } else {
            t.spec.w1 = WeightSpec{WeightKind::RhoAlpha, 0.75, 1.0, true};
            t.spec.w2 = WeightSpec{WeightKind::RhoAlpha, 0.75, 1.0, false};
            t.label = "rho-pair";
          }
          tasks.push_back(std::move(t));
        }
      }
      const int n = static_cast<int>(tasks.size());
      parallel_for(n, opts.jobs, [&](int i) {
        const Transforms tr(cfg.domain);
        auto& t = tasks[static_cast<std::size_t>(i)];
        const auto a1 = interpolation_audit(tr, t.spec, cfg.sweep.samples, cfg.seed);
        const auto a2 = interpolation_audit(tr, t.spec, 2 * cfg.sweep.samples, cfg.seed);
        t.max_n = a1.max_ratio;
        t.max_2n = a2.max_ratio;
        t.degenerate = a1.degenerate_count + a2.degenerate_count;
      });
      std::string csv = "k,m,q,weights,samples,max_ratio\n";
      for (const auto& t : tasks) {
        const double change = t.max_n > 0.0 ? (t.max_2n - t.max_n) / t.max_n : 0.0;
        rep += "interp k=" + std::to_string(t.spec.k) + " m=" + std::to_string(t.spec.m) +
               " q=" + fmtg(t.spec.q) + " " + t.label + ": max@" +
               std::to_string(cfg.sweep.samples) + "=" + fmt(t.max_n) + " max@" +
               std::to_string(2 * cfg.sweep.samples) + "=" + fmt(t.max_2n) +
               " change=" + fmt(change) +
               (t.degenerate ? " degenerate=" + std::to_string(t.degenerate) : "") + "\n";
        csv += std::to_string(t.spec.k) + ',' + std::to_string(t.spec.m) + ',' +
               fmtg(t.spec.q) + ',' + t.label + ',' + std::to_string(cfg.sweep.samples) +
               ',' + fmt(t.max_n) + '\n';
        csv += std::to_string(t.spec.k) + ',' + std::to_string(t.spec.m) + ',' +
               fmtg(t.spec.q) + ',' + t.label + ',' +
               std::to_string(2 * cfg.sweep.samples) + ',' + fmt(t.max_2n) + '\n';
      }
      atomic_write(dir / "metrics.csv", csv);
      break;
    }
  }

  rep += std::string("status: ") + (warned ? "truncation-warning" : "ok") + "\n";
  atomic_write(dir / "report.txt", rep);
  return dir;
}

std::string report_text(const std::filesystem::path& run_dir) {
  const std::filesystem::path p = run_dir / "report.txt";
  std::ifstream is(p, std::ios::binary);
  if (!is) throw DataError("report: cannot open " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace zk
