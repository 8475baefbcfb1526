#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "xhodge/config.hpp"
#include "xhodge/decompose.hpp"
#include "xhodge/field_io.hpp"
#include "xhodge/report.hpp"

#ifdef XHODGE_HAVE_OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;

namespace xhodge::cli {
namespace {

struct Context {
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;

  std::string path(const std::string& name) const { return (fs::path(cfg.out_dir) / name).string(); }
};

DecomposeOptions decompose_options(const RunConfig& cfg) {
  DecomposeOptions o;
  o.solver = cfg.solver;
  o.r_list = cfg.r_list;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
}

std::map<std::string, std::string> read_string_kv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

const std::string& required(const std::map<std::string, std::string>& kv, const std::string& key,
                            const std::string& path) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError(path + ": missing '" + key + "'");
  return it->second;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

TopologyPtr build(const RunConfig& cfg) { return build_domain(cfg.domain); }

// ---- commands ----------------------------------------------------------------------------

int cmd_gen_field(Context& c, const std::string& output, bool vtk) {
  const TopologyPtr topo = build(c.cfg);
  const std::string& kind = c.cfg.field.kind;
  if (kind == "ball_q0") {
    const ScalarField f = generate_scalar_field(topo, c.cfg.field);
    const std::string p = c.path(output.empty() ? "q.field" : output);
    write_field(p, f);
    if (vtk) export_vtk(f, fs::path(p).replace_extension(".vtk").string(), kind);
    c.out << "wrote " << p << '\n';
    return kOk;
  }
  const FaceField f = generate_field(topo, c.cfg.field, c.cfg.seed, c.cfg.solver);
  const std::string p = c.path(output.empty() ? "u.field" : output);
  write_field(p, f);
  if (vtk) export_vtk(f, fs::path(p).replace_extension(".vtk").string(), kind);
  c.out << "wrote " << p << "\nnorm = " << format_number(norm2(f)) << '\n';
  return kOk;
}

int cmd_classification(Context& c, const std::string& output) {
  const TopologyPtr topo = build(c.cfg);
  const std::string p = c.path(output.empty() ? "classification.field" : output);
  write_classification(p, *topo);
  const SurfaceMeasure m = surface_measure(*topo);
  write_key_values(c.out, {{"fluid_cells", double(topo->active_count(Entity::Cell))},
                           {"obstacle_area", m.obstacle_area},
                           {"obstacle_area_projected", m.obstacle_projected_area},
                           {"far_area", m.far_area}});
  return kOk;
}

FaceField load_input(const Context& c, bool generate) {
  if (generate) return generate_field(build(c.cfg), c.cfg.field, c.cfg.seed, c.cfg.solver);
  return read_field<Entity::Face>(c.cfg.input.empty() ? c.path("u.field") : c.cfg.input);
}

std::string parts_text(const RunConfig& cfg, const HodgeParts& parts) {
  std::string s;
  s += std::string("flavor = ") + to_string(parts.flavor) + '\n';
  s += std::string("far = ") + to_string(parts.far) + '\n';
  s += "lambda = " + format_number(parts.lambda) + '\n';
  s += "r_list = " + join_numbers(cfg.r_list) + '\n';
  s += "p_iterations = " + std::to_string(parts.p_stats.iterations) + '\n';
  s += "w_iterations = " + std::to_string(parts.w_stats.iterations) + '\n';
  s += "p_residual = " + format_number(parts.p_stats.relative_residual) + '\n';
  s += "w_residual = " + format_number(parts.w_stats.relative_residual) + '\n';
  return s;
}

int cmd_decompose(Context& c, bool generate, bool vtk) {
  const FaceField u = load_input(c, generate);
  const FarMode far = c.cfg.effective_far();
  auto [parts, diag] = decompose(u, c.cfg.flavor, far, decompose_options(c.cfg));
  write_field(c.path("h.field"), parts.h);
  write_field(c.path("w.field"), parts.w);
  write_field(c.path("rot_w.field"), parts.rot_w);
  write_field(c.path("p.field"), parts.p);
  write_field(c.path("grad_p.field"), parts.grad_p);
  write_text(c.path("parts.txt"), parts_text(c.cfg, parts));
  if (vtk) export_vtk(parts.h, c.path("h.vtk"), "h");

  const KeyValues kv = diag.key_values();
  {
    std::ofstream f(c.path("diagnostics.txt"), std::ios::binary);
    if (!f) throw IoError("cannot write " + c.path("diagnostics.txt"));
    write_key_values(f, kv);
  }
  std::vector<std::string> cols{"scenario", "flavor", "far", "n", "L"};
  std::vector<std::string> row{c.cfg.scenario, to_string(parts.flavor), to_string(parts.far),
                               std::to_string(u.topo().n()), format_number(u.topo().L())};
  for (const auto& [k, v] : kv) {
    cols.push_back(k);
    row.push_back(format_number(v));
  }
  CsvTable table(cols);
  table.add_row(row);
  table.write_file(c.path("diagnostics.csv"));
  write_key_values(c.out, kv);
  return kOk;
}

int cmd_verify(Context& c, const std::string& parts_dir_opt, double tol) {
  const std::string dir = parts_dir_opt.empty() ? c.cfg.out_dir : parts_dir_opt;
  auto in_dir = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  const FaceField u = read_field<Entity::Face>(c.cfg.input.empty() ? in_dir("u.field") : c.cfg.input);
  const std::string parts_path = in_dir("parts.txt");
  const auto kv = read_string_kv(parts_path);

  HodgeParts parts;
  parts.flavor = parse_harmonic_flavor(required(kv, "flavor", parts_path));
  parts.far = parse_far_mode(required(kv, "far", parts_path));
  parts.lambda = std::stod(required(kv, "lambda", parts_path));
  parts.p_stats.iterations = std::stoi(required(kv, "p_iterations", parts_path));
  parts.w_stats.iterations = std::stoi(required(kv, "w_iterations", parts_path));
  parts.p_stats.relative_residual = std::stod(required(kv, "p_residual", parts_path));
  parts.w_stats.relative_residual = std::stod(required(kv, "w_residual", parts_path));
  const std::vector<double> r_list = parse_number_list(required(kv, "r_list", parts_path));
  parts.w = read_field<Entity::Edge>(in_dir("w.field"), u.topo_ptr());
  parts.p = read_field<Entity::Cell>(in_dir("p.field"), u.topo_ptr());
  complete_parts(u, parts);
  const KeyValues now = diagnose(u, parts, r_list).key_values();
  write_key_values(c.out, now);

  const std::string stored_path = in_dir("diagnostics.txt");
  if (!fs::exists(stored_path)) return kOk;
  std::ifstream sf(stored_path);
  const KeyValues stored = read_key_values(sf);
  double worst = 0.0;
  std::string worst_key;
  if (stored.size() != now.size()) {
    c.err << "verify: " << stored_path << " has " << stored.size() << " entries, recomputed " << now.size() << '\n';
    return kSolverFailure;
  }
  for (std::size_t i = 0; i < now.size(); ++i) {
    if (stored[i].first != now[i].first) {
      c.err << "verify: key mismatch " << stored[i].first << " vs " << now[i].first << '\n';
      return kSolverFailure;
    }
    const double dev = std::abs(stored[i].second - now[i].second) / std::max(1.0, std::abs(stored[i].second));
    if (!(dev <= worst)) {
      worst = dev;
      worst_key = now[i].first;
    }
  }
  c.out << "verify_max_deviation = " << format_number(worst) << '\n';
  if (!(worst <= tol)) {
    c.err << "verify: " << worst_key << " deviates by " << format_number(worst) << '\n';
    return kSolverFailure;
  }
  return kOk;
}

int cmd_q0(Context& c, bool vtk) {
  const TopologyPtr topo = build(c.cfg);
  const CapacityPotential q0 = solve_q0(topo, c.cfg.solver);
  write_field(c.path("q0.field"), q0.q);
  write_field(c.path("q0_grad.field"), q0.grad);
  if (vtk) export_vtk(q0.grad, c.path("q0_grad.vtk"), "q0_grad");
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < q0.q.size(); ++i) {
    if (!topo->fluid(i)) continue;
    lo = std::min(lo, q0.q[i]);
    hi = std::max(hi, q0.q[i]);
  }
  const KeyValues kv{{"q0_min", lo},
                     {"q0_max", hi},
                     {"flux_obstacle", boundary_flux(q0.grad, BoundaryPart::Obstacle)},
                     {"flux_far", boundary_flux(q0.grad, BoundaryPart::Far)},
                     {"grad_norm", norm2(q0.grad)},
                     {"iterations", double(q0.stats.iterations)},
                     {"relative_residual", q0.stats.relative_residual}};
  std::ofstream f(c.path("q0.txt"), std::ios::binary);
  write_key_values(f, kv);
  write_key_values(c.out, kv);
  return kOk;
}

int cmd_translation(Context& c, const std::string& far_decay, const std::string& placement) {
  const TopologyPtr topo = build(c.cfg);
  TranslationOptions topts;
  if (far_decay == "zero")
    topts.far = FarDecay::ZeroDirichlet;
  else if (far_decay != "dipole")
    throw ConfigError("unknown far decay '" + far_decay + "' (expected dipole or zero)");
  if (placement == "center")
    topts.placement = DirichletPlacement::CellCenter;
  else if (placement != "weighted")
    throw ConfigError("unknown placement '" + placement + "' (expected weighted or center)");
  const TranslationHarmonics t = translation_harmonics(topo, c.cfg.axis, topts, c.cfg.solver);
  const std::string ax(1, "xyz"[c.cfg.axis]);
  write_field(c.path("q_" + ax + ".field"), t.q);
  write_field(c.path("h_" + ax + ".field"), t.h);
  write_field(c.path("pi_" + ax + ".field"), t.pi);
  write_field(c.path("k_" + ax + ".field"), t.k);
  const SurfaceTraces th = surface_traces(t.h), tk = surface_traces(t.k);
  const KeyValues kv{{"axis", double(c.cfg.axis)},
                     {"h_normal_trace_rel", th.normal_rel},
                     {"k_tangential_trace_rel", tk.tangential_rel},
                     {"h_flux_obstacle", boundary_flux(t.h, BoundaryPart::Obstacle)},
                     {"q_iterations", double(t.q_stats.iterations)},
                     {"pi_iterations", double(t.pi_stats.iterations)}};
  std::ofstream f(c.path("translation_" + ax + ".txt"), std::ios::binary);
  write_key_values(f, kv);
  write_key_values(c.out, kv);
  return kOk;
}

int cmd_harmonic_basis(Context& c) {
  const TopologyPtr topo = build(c.cfg);
  const HarmonicBasisEstimate est = estimate_harmonic_dimension(topo, c.cfg.flavor, c.cfg.effective_far(),
                                                                c.cfg.probes, c.cfg.svd_tol, c.cfg.seed, c.cfg.solver);
  KeyValues kv{{"dimension", double(est.dimension)},
               {"probes", double(est.probes)},
               {"used", double(est.used)},
               {"baseline_quality", est.baseline_quality}};
  for (std::size_t i = 0; i < est.basis.size(); ++i) {
    write_field(c.path("basis_" + std::to_string(i) + ".field"), est.basis[i]);
    const auto comps = obstacle_components(topo->spec().obstacle);
    int torus = 0;
    for (const ObstacleShape& s : comps) {
      const auto* t = std::get_if<SolidTorus>(&s.kind);
      if (!t) continue;
      const auto loop = torus_threading_loop(*topo, *t);
      if (loop.empty()) continue;
      kv.emplace_back("basis" + std::to_string(i) + "_circulation_torus" + std::to_string(torus++),
                      cell_loop_circulation(est.basis[i], loop));
    }
  }
  CsvTable sv({"index", "singular_value", "kept"});
  for (std::size_t i = 0; i < est.singular_values.size(); ++i)
    sv.add_row({std::to_string(i), format_number(est.singular_values[i]), int(i) < est.dimension ? "1" : "0"});
  sv.write_file(c.path("singular_values.csv"));
  std::ofstream f(c.path("harmonic_basis.txt"), std::ios::binary);
  write_key_values(f, kv);
  write_key_values(c.out, kv);
  return kOk;
}

int cmd_convergence(Context& c) {
  std::optional<CsvTable> table;
  for (const auto& [n, L] : c.cfg.grids) {
    DomainSpec spec = c.cfg.domain;
    spec.n = n;
    spec.L = L;
    const TopologyPtr topo = build_domain(spec);
    const FaceField u = generate_field(topo, c.cfg.field, c.cfg.seed, c.cfg.solver);
    const auto [parts, diag] = decompose(u, c.cfg.flavor, c.cfg.effective_far(), decompose_options(c.cfg));
    const KeyValues kv = diag.key_values();
    if (!table) {
      std::vector<std::string> cols{"scenario", "n", "L", "h"};
      for (const auto& p : kv) cols.push_back(p.first);
      table.emplace(cols);
    }
    std::vector<std::string> row{c.cfg.scenario, std::to_string(n), format_number(L), format_number(topo->h())};
    for (const auto& p : kv) row.push_back(format_number(p.second));
    table->add_row(row);
    c.err << "convergence: n=" << n << " L=" << format_number(L) << " done\n";
  }
  table->write_file(c.path("convergence.csv"));
  table->write(c.out);
  return kOk;
}

int cmd_probe_inequalities(Context& c, bool deflate) {
  const TopologyPtr topo = build(c.cfg);
  const std::vector<FaceField> fields = probe_suite(topo, c.cfg.probes, c.cfg.seed);
  std::optional<HarmonicBasisEstimate> est;
  if (deflate)
    est = estimate_harmonic_dimension(topo, c.cfg.flavor, c.cfg.effective_far(), std::max(8, c.cfg.probes),
                                      c.cfg.svd_tol, c.cfg.seed, c.cfg.solver);
  const auto rows = inequality_probe(fields, potential_flavor(c.cfg.flavor), c.cfg.r_list, est ? &est->basis : nullptr);
  CsvTable t({"field", "r", "grad_norm", "rot_norm", "div_norm", "collar_norm", "ratio", "deflated_ratio"});
  for (const InequalityRow& r : rows)
    t.add_row({std::to_string(r.field), format_number(r.r), format_number(r.grad_norm), format_number(r.rot_norm),
               format_number(r.div_norm), format_number(r.collar_norm), format_number(r.ratio),
               format_number(r.deflated_ratio)});
  t.write_file(c.path("inequalities.csv"));
  t.write(c.out);
  return kOk;
}

void set_threads_from_env() {
#ifdef XHODGE_HAVE_OPENMP
  if (const char* s = std::getenv("XHODGE_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  set_threads_from_env();
  CLI::App app{"xhodge: three-part decomposition of vector fields on truncated exterior domains"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // config key -> value
  auto global = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override a config setting, key=value (repeatable)");
  global("--tol", "tol", "relative CG tolerance");
  global("--max-iters", "max_iters", "CG iteration cap");
  global("--seed", "seed", "probe / random field seed");
  global("--out", "out", "output directory");
  global("--r-list", "r_list", "comma-separated norm exponents");
  global("--n", "n", "cells per axis");
  global("--L", "L", "box half-width");
  global("--obstacle", "obstacle", "obstacle descriptor, e.g. ball(0,0,0;1)");
  global("--flavor", "flavor", "normal | tangential");
  global("--far", "far", "neumann | zero | free");

  std::map<std::string, std::string> field_flags;
  auto field_opt = [&](CLI::App* sub, const std::string& name, const std::string& key) {
    sub->add_option_function<std::string>(name, [&field_flags, key](const std::string& v) { field_flags[key] = v; },
                                          key);
  };

  CLI::App* gen = app.add_subcommand("gen-field", "sample an analytic field");
  std::string gen_output;
  bool gen_vtk = false;
  gen->add_option("--output", gen_output, "file name inside --out");
  gen->add_flag("--vtk", gen_vtk, "also write a legacy VTK file");
  for (const char* k : {"kind", "axis", "a", "center", "width", "direction", "radius", "loop_axis", "segments",
                        "modes", "index"})
    field_opt(gen, std::string("--") + (std::string(k) == "loop_axis" ? "loop-axis" : k), std::string("field.") + k);

  CLI::App* dec = app.add_subcommand("decompose", "decompose u into h + rot w + grad p");
  bool dec_generate = false, dec_vtk = false;
  dec->add_option_function<std::string>("--input", [&flags](const std::string& v) { flags["input"] = v; },
                                        "input face field (default <out>/u.field)");
  dec->add_flag("--generate", dec_generate, "sample the configured field instead of reading one");
  dec->add_flag("--vtk", dec_vtk, "also write h.vtk");

  CLI::App* ver = app.add_subcommand("verify", "recompute diagnostics from stored parts");
  std::string parts_dir;
  double verify_tol = 1e-12;
  ver->add_option_function<std::string>("--input", [&flags](const std::string& v) { flags["input"] = v; },
                                        "input face field (default <parts>/u.field)");
  ver->add_option("--parts", parts_dir, "directory written by decompose (default --out)");
  ver->add_option("--verify-tol", verify_tol, "allowed deviation");

  CLI::App* q0 = app.add_subcommand("q0", "solve for the capacity potential q0");
  bool q0_vtk = false;
  q0->add_flag("--vtk", q0_vtk, "also write q0_grad.vtk");

  CLI::App* tr = app.add_subcommand("translation-harmonics", "potentials q_j, pi_j and fields h_j, k_j");
  std::string far_decay = "dipole", placement = "weighted";
  tr->add_option_function<std::string>("--axis", [&flags](const std::string& v) { flags["axis"] = v; }, "x | y | z");
  tr->add_option("--far-decay", far_decay, "dipole | zero");
  tr->add_option("--placement", placement, "weighted | center");

  CLI::App* hb = app.add_subcommand("harmonic-basis", "estimate the harmonic space from probes");
  hb->add_option_function<std::string>("--probes", [&flags](const std::string& v) { flags["probes"] = v; },
                                       "number of probes");
  hb->add_option_function<std::string>("--svd-tol", [&flags](const std::string& v) { flags["svd_tol"] = v; },
                                       "relative singular value cutoff");

  CLI::App* conv = app.add_subcommand("convergence", "repeat a scenario over several grids, CSV output");
  conv->add_option_function<std::string>("--grids", [&flags](const std::string& v) { flags["grids"] = v; },
                                         "n:L pairs, e.g. 32:4,48:4");

  CLI::App* ineq = app.add_subcommand("probe-inequalities", "gradient vs rot/div/collar norm ratios");
  bool deflate = false;
  ineq->add_option_function<std::string>("--probes", [&flags](const std::string& v) { flags["probes"] = v; },
                                         "number of probe fields");
  ineq->add_flag("--deflate", deflate, "also report ratios after projecting off the harmonic basis");

  CLI::App* cls = app.add_subcommand("classification", "export the cell classification volume");
  std::string cls_output;
  cls->add_option("--output", cls_output, "file name inside --out");

  for (CLI::App* s : app.get_subcommands({})) s->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "xhodge: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
    for (const auto& [k, v] : field_flags) apply_setting(cfg, k, v);
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    validate(cfg);
    fs::create_directories(cfg.out_dir);
    Context c{cfg, out, err};

    if (gen->parsed()) return cmd_gen_field(c, gen_output, gen_vtk);
    if (dec->parsed()) return cmd_decompose(c, dec_generate, dec_vtk);
    if (ver->parsed()) return cmd_verify(c, parts_dir, verify_tol);
    if (q0->parsed()) return cmd_q0(c, q0_vtk);
    if (tr->parsed()) return cmd_translation(c, far_decay, placement);
    if (hb->parsed()) return cmd_harmonic_basis(c);
    if (conv->parsed()) return cmd_convergence(c);
    if (ineq->parsed()) return cmd_probe_inequalities(c, deflate);
    if (cls->parsed()) return cmd_classification(c, cls_output);
  } catch (const SolverError& e) {
    err << "xhodge: solver failure: " << e.what() << " (iterations " << e.stats().iterations << ", residual "
        << format_number(e.stats().relative_residual) << ")\n";
    return kSolverFailure;
  } catch (const ConfigError& e) {
    err << "xhodge: " << e.what() << '\n';
    return kConfigError;
  } catch (const GeometryError& e) {
    err << "xhodge: geometry error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "xhodge: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "xhodge: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "xhodge: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kConfigError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace xhodge::cli
