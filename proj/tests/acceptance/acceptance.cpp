// Acceptance suite: one PASS/FAIL line per criterion, parameters taken from scenarios/.
//
//   xhodge_acceptance            run everything
//   xhodge_acceptance 3 7 11     run a subset

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "xhodge/config.hpp"
#include "xhodge/decompose.hpp"
#include "xhodge/report.hpp"

using namespace xhodge;
using namespace xhodge::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAILED]");
  }
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

// Reconstruction errors from every decomposition run in this process.
std::vector<std::pair<std::string, double>> g_reconstruction;

std::pair<HodgeParts, DiagnosticsReport> run_decompose(const std::string& tag, const FaceField& u, HarmonicFlavor fl,
                                                       FarMode far, const CapacityPotential* q0 = nullptr,
                                                       const DecomposeOptions& opts = {}) {
  auto r = decompose(u, fl, far, opts, q0);
  g_reconstruction.emplace_back(tag, r.second.reconstruction_rel_err);
  return r;
}

RunConfig cfg(const std::string& name) { return load_config(scenario(name)); }

TopologyPtr topo_at(const RunConfig& c, int n, double L) {
  DomainSpec s = c.domain;
  s.n = n;
  s.L = L;
  return build_domain(s);
}

// ---- criteria ----------------------------------------------------------------------------

Verdict c1_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  DomainSpec s;
  s.L = 4.0;
  s.n = 20;
  s.obstacle = Ball{{0.3, -0.2, 0.1}, 1.1};
  const TopologyPtr topo = build_domain(s);
  std::mt19937_64 rng(1);
  double worst_dc = 0.0, worst_cg = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const EdgeField a = random_field<Entity::Edge>(topo, rng);
    const FaceField ca = curl_edge_to_face(a);
    const ScalarField dca = divergence(ca);
    worst_dc = std::max(worst_dc, topo->h() * max_abs(dca) / max_abs(ca));

    const ScalarField p = random_field<Entity::Cell>(topo, rng);
    const FaceField gp = gradient_zero_ghost(p);
    const EdgeField cgp = curl_face_to_edge(gp);
    worst_cg = std::max(worst_cg, topo->h() * max_abs(cgp, {EntityKind::Interior}) / max_abs(gp));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v.check(worst_dc <= 1e-13, "max rel |div curl| " + num(worst_dc));
  v.check(worst_cg <= 1e-13, "max rel |curl grad| " + num(worst_cg));
  v.check(secs < 10.0, "runtime " + num(secs) + " s");
  return v;
}

Verdict c3_splitting() {
  Verdict v;
  {
    const RunConfig c = cfg("c03_gradient_split.cfg");
    const TopologyPtr topo = build_domain(c.domain);
    const FaceField u = generate_field(topo, c.field, c.seed);
    const auto [parts, d] = run_decompose("gradient split", u, c.flavor, c.effective_far());
    v.check(d.h_norm <= 1e-6 * d.u_norm, "gradient input |h|/|u| " + num(d.h_norm / d.u_norm));
    v.check(d.rot_w_norm <= 1e-6 * d.u_norm, "|rot w|/|u| " + num(d.rot_w_norm / d.u_norm));
  }
  {
    const RunConfig c = cfg("c03_curl_split.cfg");
    const TopologyPtr topo = build_domain(c.domain);
    const FaceField u = generate_field(topo, c.field, c.seed);
    const auto [parts, d] = run_decompose("curl split", u, c.flavor, c.effective_far());
    v.check(d.h_norm <= 1e-6 * d.u_norm, "curl input |h|/|u| " + num(d.h_norm / d.u_norm));
    v.check(d.grad_p_norm <= 1e-8 * d.u_norm, "|grad p|/|u| " + num(d.grad_p_norm / d.u_norm));
  }
  return v;
}

Verdict c4_solenoidality() {
  const RunConfig c = cfg("c04_solenoidality.cfg");
  const TopologyPtr topo = build_domain(c.domain);
  const auto probes = probe_suite(topo, c.probes, c.seed);
  Verdict v;
  for (PotentialFlavor pf : {PotentialFlavor::VFlavor, PotentialFlavor::XFlavor}) {
    SolveOptions loose = c.solver, tight = c.solver, tenth = c.solver;
    tight.rel_tol = 0.5 * loose.rel_tol;
    tenth.rel_tol = 0.1 * loose.rel_tol;
    const auto kernel = pf == PotentialFlavor::VFlavor ? vflavor_kernel(topo) : std::vector<EdgeField>{};
    double worst = 0.0, sum_loose = 0.0, sum_tight = 0.0, sum_tenth = 0.0;
    for (const FaceField& u : probes) {
      const double un = norm2(u);
      const auto a = solve_vector_potential(u, pf, loose, kernel);
      const auto b = solve_vector_potential(u, pf, tight, kernel);
      worst = std::max(worst, a.div_norm / un);
      sum_loose += a.div_norm / un;
      sum_tight += b.div_norm / un;
      sum_tenth += solve_vector_potential(u, pf, tenth, kernel).div_norm / un;
    }
    const std::string tag = pf == PotentialFlavor::VFlavor ? "V" : "X";
    v.check(worst <= 1e-8, tag + " max |div w|/|u| " + num(worst));
    v.check(sum_loose >= 3.0 * sum_tight, tag + " decrease at half tolerance " + num(sum_loose / sum_tight) + "x");
    v.detail += " (at tol/10: " + num(sum_loose / sum_tenth) + "x, informational)";
  }
  return v;
}

Verdict c5_q0() {
  const RunConfig c = cfg("c05_q0.cfg");
  const double a = std::get<Ball>(c.domain.obstacle.kind).radius;
  Verdict v;
  std::vector<double> errs;
  for (const auto& [n, L] : c.grids) {
    const TopologyPtr topo = topo_at(c, n, L);
    const CapacityPotential q0 = solve_q0(topo);
    const double Lv = L;
    const double err = cell_rel_error(
        q0.q, [&](const Vec3& x) { return (1.0 - a / vnorm(x)) / (1.0 - a / Lv); },
        [](const Vec3& x) { return vnorm(x) <= 3.0; });
    errs.push_back(err);
    const double flux = boundary_flux(q0.grad, BoundaryPart::Obstacle);
    v.check(flux < 0.0, "n=" + std::to_string(n) + " obstacle flux " + num(flux));
  }
  v.check(errs[0] <= 3e-2, "near-field rel L2 n=" + std::to_string(c.grids[0].first) + " " + num(errs[0]));
  for (std::size_t i = 1; i < errs.size(); ++i)
    v.check(errs[i] < errs[i - 1], "n=" + std::to_string(c.grids[i].first) + " " + num(errs[i]) + " smaller");
  return v;
}

Verdict c6_lambda() {
  const RunConfig c = cfg("c06_lambda_branch.cfg");
  const TopologyPtr topo = build_domain(c.domain);
  const CapacityPotential q0 = solve_q0(topo, c.solver);
  const FaceField u = generate_field(topo, c.field, c.seed, c.solver);
  const double un = norm2(u);
  const auto [pf, df] = run_decompose("lambda free", u, HarmonicFlavor::TangentialHarmonic, FarMode::FreeConstant, &q0);
  const auto [pz, dz] = run_decompose("lambda zero", u, HarmonicFlavor::TangentialHarmonic, FarMode::ZeroDirichlet, &q0);
  Verdict v;
  v.check(std::abs(pf.lambda - 1.0) <= 2e-2, "free lambda " + num(pf.lambda));
  v.check(norm2(pf.h) <= 5e-2 * un, "free |h|/|u| " + num(norm2(pf.h) / un));
  v.check(norm2(pz.h - q0.grad) <= 5e-2 * un, "zero |h - grad q0|/|u| " + num(norm2(pz.h - q0.grad) / un));
  FaceField lq = q0.grad;
  lq *= pf.lambda;
  const double cross = norm2((pz.h - pf.h) - lq) / norm2(lq);
  v.check(cross <= 5e-2, "cross-branch " + num(cross));

  // Reported only: the analytic 1 - a/|x| profile does not take a constant value on the box.
  const FaceField ua = sample_ball_grad_q0(topo, std::get<Ball>(c.domain.obstacle.kind).radius);
  const auto [pa, da] = run_decompose("lambda analytic", ua, HarmonicFlavor::TangentialHarmonic,
                                      FarMode::FreeConstant, &q0);
  v.detail += "; analytic-sample lambda " + num(pa.lambda) + " (informational)";
  return v;
}

Verdict c7_dimensions() {
  Verdict v;
  {
    const RunConfig c = cfg("c07_ball_normal.cfg");
    for (const auto& [n, L] : c.grids) {
      const auto est = estimate_harmonic_dimension(topo_at(c, n, L), c.flavor, c.effective_far(), c.probes, c.svd_tol,
                                                   c.seed, c.solver);
      v.check(est.dimension == 0, "ball normal n=" + std::to_string(n) + " dim " + std::to_string(est.dimension));
    }
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig c = cfg("c07_torus_normal.cfg");
    const TopologyPtr topo = build_domain(c.domain);
    const auto est =
        estimate_harmonic_dimension(topo, c.flavor, c.effective_far(), c.probes, c.svd_tol, c.seed, c.solver);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.check(est.dimension == 1, "torus normal dim " + std::to_string(est.dimension));
    if (est.dimension >= 1) {
      const SolidTorus& tor = std::get<SolidTorus>(c.domain.obstacle.kind);
      const auto loop = torus_threading_loop(*topo, tor);
      const double circ = cell_loop_circulation(est.basis[0], loop);
      LoopSpec ls;
      ls.radius = tor.major_radius;
      ls.center = tor.center;
      ls.axis = tor.axis;
      const double ref = cell_loop_circulation(sample_biot_savart_loop(topo, ls), loop);
      v.check(circ > 0.0 && ref > 0.0, "threading circulation " + num(circ) + " (loop current " + num(ref) + ")");
    }
    v.check(secs <= 900.0, "torus runtime " + num(secs) + " s");
  }
  {
    const RunConfig c = cfg("c07_ball_tangential_zero.cfg");
    const TopologyPtr topo = build_domain(c.domain);
    const auto est =
        estimate_harmonic_dimension(topo, c.flavor, c.effective_far(), c.probes, c.svd_tol, c.seed, c.solver);
    v.check(est.dimension == 1, "ball tangential zero dim " + std::to_string(est.dimension));
    if (est.dimension >= 1) {
      const CapacityPotential q0 = solve_q0(topo, c.solver);
      const FaceField ga = sample_ball_grad_q0(topo, std::get<Ball>(c.domain.obstacle.kind).radius);
      const double cos_a = std::abs(inner_product(est.basis[0], ga)) / (norm2(est.basis[0]) * norm2(ga));
      const double cos_d = std::abs(inner_product(est.basis[0], q0.grad)) / (norm2(est.basis[0]) * norm2(q0.grad));
      v.check(cos_a >= 0.95, "cosine to analytic grad q0 " + num(cos_a) + ", discrete " + num(cos_d));
    }
  }
  {
    const RunConfig c = cfg("c07_ball_tangential_free.cfg");
    const auto est = estimate_harmonic_dimension(build_domain(c.domain), c.flavor, c.effective_far(), c.probes,
                                                 c.svd_tol, c.seed, c.solver);
    v.check(est.dimension == 0, "ball tangential free dim " + std::to_string(est.dimension));
  }
  return v;
}

Verdict c8_translation() {
  const RunConfig c = cfg("c08_translation.cfg");
  const double a = std::get<Ball>(c.domain.obstacle.kind).radius;
  const int j = c.axis;
  Verdict v;
  std::vector<double> tn, tt;
  for (std::size_t g = 0; g < c.grids.size(); ++g) {
    const auto [n, L] = c.grids[g];
    const TopologyPtr topo = topo_at(c, n, L);
    const TranslationHarmonics th = translation_harmonics(topo, j, {}, c.solver);
    const SurfaceTraces sh = surface_traces(th.h), sk = surface_traces(th.k);
    tn.push_back(sh.normal_rel);
    tt.push_back(sk.tangential_rel);
    if (g + 1 != c.grids.size()) continue;
    const auto shell = [](const Vec3& x) { return in_shell(x, 1.5, 3.0); };
    const double eq = cell_rel_error(
        th.q, [&](const Vec3& x) { return -0.5 * a * a * a * x[j] / std::pow(vnorm(x), 3); }, shell);
    const double ep =
        cell_rel_error(th.pi, [&](const Vec3& x) { return a * a * a * x[j] / std::pow(vnorm(x), 3); }, shell);
    v.check(eq <= 5e-2, "q rel L2 n=" + std::to_string(n) + " " + num(eq));
    v.check(ep <= 5e-2, "pi rel L2 " + num(ep));
  }
  const std::size_t last = tn.size() - 1;
  v.check(tn[last] <= 5e-2 && tn[last] < tn[0], "h.nu trace " + num(tn[0]) + " -> " + num(tn[last]));
  v.check(tt[last] <= 5e-2 && tt[last] < tt[0], "k x nu trace " + num(tt[0]) + " -> " + num(tt[last]));
  return v;
}

Verdict c9_stability() {
  Verdict v;
  for (const char* name : {"c09_stability_normal.cfg", "c09_stability_tangential.cfg"}) {
    const RunConfig c = cfg(name);
    std::vector<double> maxima;
    for (const auto& [n, L] : c.grids) {
      const TopologyPtr topo = topo_at(c, n, L);
      std::optional<CapacityPotential> q0;
      if (c.flavor == HarmonicFlavor::TangentialHarmonic) q0 = solve_q0(topo, c.solver);
      double m = 0.0;
      for (const FaceField& u : probe_suite(topo, c.probes, c.seed)) {
        const auto [parts, d] = run_decompose(c.scenario, u, c.flavor, c.effective_far(), q0 ? &*q0 : nullptr);
        m = std::max(m, stability_ratio(u, parts, 2.0));
      }
      maxima.push_back(m);
    }
    const double change = std::abs(maxima[1] - maxima[0]) / maxima[0];
    v.check(change <= 0.25, std::string(to_string(c.flavor)) + " max ratio " + num(maxima[0]) + " -> " +
                                num(maxima[1]) + " (" + num(100 * change) + "%)");
  }
  return v;
}

Verdict c10_idempotence() {
  Verdict v;
  {
    const RunConfig c = cfg("c10_idempotence.cfg");
    const TopologyPtr topo = build_domain(c.domain);
    const FaceField u = generate_field(topo, c.field, c.seed, c.solver);
    const auto [p1, d1] = run_decompose("idempotence 1", u, c.flavor, c.effective_far());
    const auto [p2, d2] = run_decompose("idempotence 2", p1.h, c.flavor, c.effective_far());
    const double hn = norm2(p1.h);
    v.check(norm2(p2.h - p1.h) <= 1e-6 * hn, "normal |h'-h|/|h| " + num(norm2(p2.h - p1.h) / hn) +
                                                 " (|h|/|u| " + num(hn / norm2(u)) + ")");
    v.check(norm2(p2.grad_p) <= 1e-6 * hn && norm2(p2.rot_w) <= 1e-6 * hn,
            "|grad p'|, |rot w'| " + num(norm2(p2.grad_p) / hn) + ", " + num(norm2(p2.rot_w) / hn));
  }
  {
    // tangential: a probe with a nonzero harmonic part around the ball
    RunConfig c = cfg("c07_ball_tangential_zero.cfg");
    const TopologyPtr topo = topo_at(c, 32, c.domain.L);
    const CapacityPotential q0 = solve_q0(topo, c.solver);
    const FaceField u = probe_suite(topo, 4, c.seed)[3];  // point source inside the ball
    const auto [p1, d1] = run_decompose("idempotence t1", u, c.flavor, c.effective_far(), &q0);
    const auto [p2, d2] = run_decompose("idempotence t2", p1.h, c.flavor, c.effective_far(), &q0);
    const double hn = norm2(p1.h);
    v.check(norm2(p2.h - p1.h) <= 1e-6 * hn, "tangential |h'-h|/|h| " + num(norm2(p2.h - p1.h) / hn));
  }
  return v;
}

Verdict c11_determinism() {
  const fs::path base = fs::temp_directory_path() / "xhodge_acceptance_c11";
  fs::remove_all(base);
  auto read = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  Verdict v;
  std::vector<std::string> outs;
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path dir = base / std::to_string(rep);
    std::ostringstream out, err;
    const int rc = cli::run({"convergence", "--config", scenario("c11_determinism.cfg"), "--out", dir.string()}, out, err);
    if (rc != 0) {
      v.check(false, "convergence exit " + std::to_string(rc) + ": " + err.str());
      return v;
    }
    outs.push_back(read(dir / "convergence.csv"));
    const int rc2 = cli::run({"decompose", "--generate", "--config", scenario("c03_curl_split.cfg"), "--n", "24",
                              "--out", dir.string()},
                             out, err);
    if (rc2 != 0) {
      v.check(false, "decompose exit " + std::to_string(rc2) + ": " + err.str());
      return v;
    }
    outs.push_back(read(dir / "diagnostics.csv"));
  }
  v.check(!outs[0].empty() && outs[0] == outs[2], "convergence.csv identical (" + std::to_string(outs[0].size()) + " bytes)");
  v.check(!outs[1].empty() && outs[1] == outs[3], "diagnostics.csv identical");
  fs::remove_all(base);
  return v;
}

Verdict c2_reconstruction() {
  if (g_reconstruction.empty()) c3_splitting();
  Verdict v;
  double worst = 0.0;
  std::string worst_tag;
  for (const auto& [tag, e] : g_reconstruction)
    if (!(e <= worst)) {
      worst = e;
      worst_tag = tag;
    }
  v.check(!g_reconstruction.empty(), std::to_string(g_reconstruction.size()) + " decompositions");
  v.check(worst <= 1e-12, "worst |u-h-rot w-grad p|/|u| " + num(worst) + " (" + worst_tag + ")");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  // Criterion 2 inspects every decomposition run by the others, so it runs last.
  const std::vector<std::pair<int, std::function<Verdict()>>> all{
      {1, c1_identities},  {3, c3_splitting},    {4, c4_solenoidality}, {5, c5_q0},
      {6, c6_lambda},      {7, c7_dimensions},   {8, c8_translation},   {9, c9_stability},
      {10, c10_idempotence}, {11, c11_determinism}, {2, c2_reconstruction}};
  static const std::map<int, std::string> names{
      {1, "discrete identities"},     {2, "reconstruction"},       {3, "gradient / curl splitting"},
      {4, "automatic solenoidality"}, {5, "q0 oracle"},            {6, "lambda branches"},
      {7, "harmonic dimensions"},     {8, "translation harmonics"}, {9, "stability ratio"},
      {10, "idempotence"},            {11, "determinism"}};

  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  std::map<int, Verdict> results;
  for (const auto& [id, fn] : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d %-26s %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, names.at(id).c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    results[id] = v;
  }
  int failed = 0;
  std::printf("\nsummary\n");
  for (const auto& [id, v] : results) {
    std::printf("  %s criterion %2d %s\n", v.pass ? "PASS" : "FAIL", id, names.at(id).c_str());
    failed += !v.pass;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
