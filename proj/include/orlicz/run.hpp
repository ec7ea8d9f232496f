#ifndef ORLICZ_RUN_HPP
#define ORLICZ_RUN_HPP

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/config.hpp"
#include "orlicz/discrete_operator.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/mono_ineq.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/phi_props.hpp"
#include "orlicz/probes.hpp"
#include "orlicz/report.hpp"
#include "orlicz/solver.hpp"

namespace orlicz {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitFails = 2 };

namespace run_detail {

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << body;
  if (!os) throw Error("write to " + path.string() + " failed");
}

inline std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

inline ordered_json descriptor_json(const FamilyDescriptor& d) {
  ordered_json j;
  j["family"] = std::string(family_name(d.family));
  if (!d.p.empty()) j["p"] = d.p;
  if (!d.q.empty()) j["q"] = d.q;
  if (!d.mu.empty()) j["mu"] = d.mu;
  j["normalized"] = d.normalized;
  if (d.family == Family::Scaled) j["scale"] = d.scale;
  if (!d.children.empty()) {
    ordered_json c = ordered_json::array();
    for (const auto& ch : d.children) c.push_back(descriptor_json(ch));
    j["children"] = std::move(c);
  }
  return j;
}

// Non-constant fields carry sampled bounds; say so in the output.
inline void field_bounds(const PhiFunction& phi, ordered_json& out) {
  auto one = [&](const char* name, const ScalarField& f) {
    ordered_json b;
    b["lo"] = f.lo();
    b["hi"] = f.hi();
    b["rigorous"] = f.bounds_rigorous();
    out[name] = std::move(b);
  };
  if (phi.family() == Family::Sum || phi.family() == Family::Scaled) return;
  one("p", phi.p());
  if (phi.q()) one("q", *phi.q());
  if (phi.mu()) one("mu", *phi.mu());
}

inline std::vector<Point> x_samples(const RunConfig& cfg, const PhiFunction& phi) {
  if (!cfg.grid.present() || phi.x_independent()) return {Point{}};
  const std::size_t n = cfg.grid.n >= 3 ? cfg.grid.n : 64;
  return cfg.grid.domain().sample_points(cfg.grid.dim() == 1 ? n : n * n);
}

inline int run_check(const RunConfig& cfg, const PhiFunction& phi, const std::filesystem::path& out) {
  const auto xs = x_samples(cfg, phi);
  const auto reports = check_suite(phi, xs, default_t_grid());
  ordered_json j;
  j["command"] = "check";
  j["phi"] = descriptor_json(*cfg.phi);
  ordered_json bounds = ordered_json::object();
  field_bounds(phi, bounds);
  j["field_bounds"] = std::move(bounds);
  ordered_json arr = ordered_json::array();
  bool any_fail = false;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    any_fail = any_fail || r.fails();
  }
  j["reports"] = std::move(arr);
  write_file(out / "check.json", dump(j));
  return any_fail ? kExitFails : kExitOk;
}

inline int run_constants(const RunConfig& cfg, const std::optional<PhiFunction>& phi,
                         const std::filesystem::path& out) {
  const RunOptions& o = cfg.options;
  ordered_json j;
  j["command"] = "constants";
  ordered_json results = ordered_json::array();
  bool any_fail = false;
  const auto pairs2 = random_pairs<2>(o.trials, o.seed);
  for (double r : o.r) {
    BestConstantOptions bo;
    bo.grid = o.resolution;
    const auto est = estimate_best_constant_powerlaw(r, bo);
    const auto rep = verify_powerlaw<2>(r, pairs2);
    any_fail = any_fail || rep.fails();
    ordered_json e;
    e["r"] = r;
    e["C_r"] = powerlaw_constant(r);
    e["best_constant"] = est.value;
    e["argmin_eta"] = {est.eta1, est.eta2};
    e["verification"] = to_json(rep);
    results.push_back(std::move(e));

    std::ostringstream csv;
    csv << "eta1,eta2,ratio\n";
    for (const auto& row : est.table)
      csv << format_double(row.eta1) << ',' << format_double(row.eta2) << ',' << format_double(row.ratio) << '\n';
    write_file(out / ("constants_r" + format_double(r) + ".csv"), csv.str());
  }
  j["powerlaw"] = std::move(results);
  if (phi) {
    const auto xs = x_samples(cfg, *phi);
    ordered_json gen = ordered_json::array();
    for (const Point& x : xs.size() > 8 ? std::vector<Point>{xs.front(), xs[xs.size() / 2], xs.back()} : xs) {
      const auto rep = verify_generalized<2>(*phi, x, pairs2);
      any_fail = any_fail || rep.fails();
      gen.push_back(to_json(rep));
    }
    j["phi"] = descriptor_json(*cfg.phi);
    j["generalized"] = std::move(gen);
  }
  write_file(out / "constants.json", dump(j));
  return any_fail ? kExitFails : kExitOk;
}

inline int run_conjugate(const RunConfig& cfg, const PhiFunction& phi, const std::filesystem::path& out) {
  const RunOptions& o = cfg.options;
  const auto ss = log_grid(o.s_min, o.s_max, o.s_count);
  const auto xs = x_samples(cfg, phi);
  const bool two_d = cfg.grid.present() && cfg.grid.dim() == 2;
  std::ostringstream csv;
  csv << (two_d ? "x,y,s,conjugate\n" : "x,s,conjugate\n");
  for (const Point& x : xs)
    for (double s : ss) {
      csv << format_double(x.x) << ',';
      if (two_d) csv << format_double(x.y) << ',';
      csv << format_double(s) << ',' << format_double(conjugate_eval(phi, x, s)) << '\n';
    }
  write_file(out / "conjugate.csv", csv.str());
  return kExitOk;
}

inline SolveOptions solve_options(const RunOptions& o) {
  SolveOptions so;
  so.method = o.method == "descent" ? Method::Descent : Method::Newton;
  so.tol = o.tol;
  return so;
}

inline int run_solve(const RunConfig& cfg, const PhiFunction& phi, const std::filesystem::path& out) {
  const RunOptions& o = cfg.options;
  const Grid g = Grid::on(cfg.grid.domain(), cfg.grid.n);
  const DiscreteOperator op(phi, g, o.variant == "B" ? Variant::B : Variant::A);
  const GridFunction f = GridFunction::sample(g, ScalarField::parse(o.f, g.domain()));
  const SolveResult res = solve_dirichlet(op, f, solve_options(o));
  std::ostringstream csv;
  res.u.write_csv(csv);
  write_file(out / "solution.csv", csv.str());
  ordered_json j;
  j["command"] = "solve";
  j["phi"] = descriptor_json(*cfg.phi);
  j["n"] = cfg.grid.n;
  j["result"] = to_json(res);
  write_file(out / "solve.json", dump(j));
  return kExitOk;
}

inline int run_refine(const RunConfig& cfg, const PhiFunction& phi, const std::filesystem::path& out) {
  const RunOptions& o = cfg.options;
  const Domain dom = cfg.grid.domain();
  const auto rep = refinement_study(phi, dom, o.variant == "B" ? Variant::B : Variant::A, false,
                                    ScalarField::parse(o.f, dom), o.n_sequence, solve_options(o));
  ordered_json j;
  j["command"] = "refine";
  j["phi"] = descriptor_json(*cfg.phi);
  j["report"] = to_json(rep);
  write_file(out / "refine.json", dump(j));
  return rep.verdict == Verdict::Fails ? kExitFails : kExitOk;
}

}  // namespace run_detail

/// Executes a validated config, writing artifacts into out_dir. Returns 0 when
/// everything holds or converged (an inconclusive check is not a failure), 2
/// when any report fails, 1 on errors (message written to `log`).
inline int run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  try {
    const std::optional<PhiFunction> phi = validate_config(cfg);
    std::filesystem::create_directories(out_dir);
    if (cfg.command == "check") return run_detail::run_check(cfg, *phi, out_dir);
    if (cfg.command == "constants") return run_detail::run_constants(cfg, phi, out_dir);
    if (cfg.command == "conjugate") return run_detail::run_conjugate(cfg, *phi, out_dir);
    if (cfg.command == "solve") return run_detail::run_solve(cfg, *phi, out_dir);
    return run_detail::run_refine(cfg, *phi, out_dir);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace orlicz

#endif  // ORLICZ_RUN_HPP
