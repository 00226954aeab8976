// tomo: command-line front end for the tomographic star-product toolkit.
//
// Exit codes: 0 success, 1 property failure, 2 validation error, 3 I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tomo/io.hpp"
#include "tomo/verify.hpp"

namespace {

using namespace tomo;
using io::json;

enum Exit { kOk = 0, kPropertyFailure = 1, kValidation = 2, kIo = 3 };

struct Global {
  int threads = 1;
  std::uint64_t seed = 20240601;
};

struct SpinArgs {
  int twice_j = -1;
  int n_alpha = 0;  // 0: default for j
  int n_beta = 0;
};

struct SymplecticArgs {
  int n_trunc = SymplecticDefaults::n_trunc;
  int n_theta = SymplecticDefaults::n_theta;
  double x_max = 6.0;
  double dx = 0.01;
  double smoothing = 0.05;
  double r_max = SymplecticDefaults::r_max;
  int n_r = SymplecticDefaults::n_r;
  double epsilon = SymplecticDefaults::epsilon;
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    io::write_file(path, content);
  }
}

void add_spin_options(CLI::App* cmd, SpinArgs& a) {
  cmd->add_option("--j", a.twice_j, "spin as twice j (1 for j=1/2)")->required()->check(CLI::NonNegativeNumber);
  cmd->add_option("--n-alpha", a.n_alpha, "alpha nodes (default 4j+2)");
  cmd->add_option("--n-beta", a.n_beta, "beta nodes (default 2j+2)");
}

AngularGrid make_grid(const SpinArgs& a) {
  const auto j = HalfInteger::from_twice(a.twice_j);
  const auto d = AngularGrid::with_defaults(j);
  return {j, a.n_alpha > 0 ? a.n_alpha : d.n_alpha(), a.n_beta > 0 ? a.n_beta : d.n_beta()};
}

// Grid read off a tomogram CSV: counts of distinct alpha and beta values,
// unless given explicitly.
AngularGrid grid_for_tomogram(const SpinArgs& a, const std::string& text) {
  const auto rows = io::detail::parse_numeric_csv(text, 4, io::kSpinTomogramHeader);
  std::set<long long> alphas;
  std::set<long long> betas;
  for (const auto& r : rows) {
    alphas.insert(std::llround(r[1] * 1e9));
    betas.insert(std::llround(r[2] * 1e9));
  }
  SpinArgs b = a;
  if (b.n_alpha == 0) b.n_alpha = static_cast<int>(alphas.size());
  if (b.n_beta == 0) b.n_beta = static_cast<int>(betas.size());
  return make_grid(b);
}

void add_symplectic_grid(CLI::App* cmd, SymplecticArgs& a) {
  cmd->add_option("--n-trunc", a.n_trunc, "Fock-space truncation N")->capture_default_str();
  cmd->add_option("--n-theta", a.n_theta, "directions on [0, pi)")->capture_default_str();
  cmd->add_option("--x-max", a.x_max, "X grid half-width (SAMPLED)")->capture_default_str();
  cmd->add_option("--dx", a.dx, "X grid spacing (SAMPLED)")->capture_default_str();
  cmd->add_option("--smoothing", a.smoothing, "Gaussian smoothing width (SAMPLED)")->capture_default_str();
}

void add_reconstruction_grid(CLI::App* cmd, SymplecticArgs& a) {
  cmd->add_option("--n-trunc", a.n_trunc, "Fock-space truncation N")->capture_default_str();
  cmd->add_option("--r-max", a.r_max, "radial extent")->capture_default_str();
  cmd->add_option("--n-r", a.n_r, "radial nodes")->capture_default_str();
  cmd->add_option("--epsilon", a.epsilon, "Gaussian damping of the radial weight")->capture_default_str();
}

SymplecticPoint point_from(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw DomainError(std::string(what) + " needs three numbers X,mu,nu");
  SymplecticPoint p{v[0], v[1], v[2]};
  require_direction(p, what);
  return p;
}

json complex_json(complex c) { return {{"re", c.real()}, {"im", c.imag()}}; }

Scheme scheme_by_name(const std::string& name, const AngularGrid& grid, int threads) {
  if (name == "spin") return spin_scheme(grid, threads);
  if (name == "matrix") return matrix_element_scheme(grid.j().twice() + 1);
  throw DomainError("unknown scheme '" + name + "' (expected spin or matrix)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star-product quantization via tomographic maps"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--threads", g.threads, "worker threads for kernel and scheme construction")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized checks")->capture_default_str();

  // spin
  auto* spin = app.add_subcommand("spin", "spin tomograms")->require_subcommand(1);
  SpinArgs sa;
  std::string in_path;
  std::string out_path;

  auto* spin_tomo = spin->add_subcommand("tomogram", "operator JSON -> tomogram CSV");
  add_spin_options(spin_tomo, sa);
  spin_tomo->add_option("--input", in_path, "operator JSON")->required();
  spin_tomo->add_option("--output", out_path, "tomogram CSV (default stdout)");

  auto* spin_rec = spin->add_subcommand("reconstruct", "tomogram CSV -> operator JSON");
  add_spin_options(spin_rec, sa);
  spin_rec->add_option("--input", in_path, "tomogram CSV")->required();
  spin_rec->add_option("--output", out_path, "operator JSON (default stdout)");

  auto* spin_kernel = spin->add_subcommand("kernel", "star-product kernel as JSON");
  add_spin_options(spin_kernel, sa);
  bool sparse = false;
  double threshold = KernelTensor::kDefaultSparseThreshold;
  spin_kernel->add_flag("--sparse", sparse, "store only entries above the threshold");
  spin_kernel->add_option("--threshold", threshold, "sparsity threshold")->capture_default_str();
  spin_kernel->add_option("--output", out_path, "kernel JSON (default stdout)");

  // symplectic
  auto* symp = app.add_subcommand("symplectic", "symplectic tomograms of a truncated oscillator")->require_subcommand(1);
  SymplecticArgs ya;

  auto* symp_tomo = symp->add_subcommand("tomogram", "operator -> SAMPLED CSV or SPECTRAL JSON");
  add_symplectic_grid(symp_tomo, ya);
  int fock_state = -1;
  bool spectral = false;
  auto* symp_in = symp_tomo->add_option("--input", in_path, "operator JSON");
  symp_tomo->add_option("--fock", fock_state, "use the projector onto Fock state n")->excludes(symp_in);
  symp_tomo->add_flag("--spectral", spectral, "write the SPECTRAL JSON representation");
  symp_tomo->add_option("--output", out_path, "output path (default stdout)");

  auto* symp_rec = symp->add_subcommand("reconstruct", "tomogram (JSON or CSV) -> operator JSON");
  add_reconstruction_grid(symp_rec, ya);
  symp_rec->add_option("--input", in_path, "SPECTRAL JSON or SAMPLED CSV")->required();
  symp_rec->add_option("--output", out_path, "operator JSON (default stdout)");

  auto* symp_kernel = symp->add_subcommand("kernel", "closed-form three-point kernel");
  std::vector<double> x1v, x2v, xv;
  symp_kernel->add_option("--x1", x1v, "left point X,mu,nu")->required()->delimiter(',')->expected(3);
  symp_kernel->add_option("--x2", x2v, "right point X,mu,nu")->required()->delimiter(',')->expected(3);
  symp_kernel->add_option("--x", xv, "output point X,mu,nu")->required()->delimiter(',')->expected(3);
  symp_kernel->add_option("--output", out_path, "JSON (default stdout)");

  auto* symp_idem = symp->add_subcommand("idempotency", "w0 * w0 = w0 residual report");
  std::vector<std::string> point_specs;
  IdempotencyIntegration integ;
  double idem_tol = 1e-3;
  symp_idem->add_option("--point", point_specs, "sample point X,mu,nu (repeatable)");
  symp_idem->add_option("--x-nodes", integ.x_nodes, "Gauss-Hermite nodes per X integral")->capture_default_str();
  symp_idem->add_option("--direction-nodes", integ.direction_nodes, "Gauss-Legendre nodes per direction axis")
      ->capture_default_str();
  symp_idem->add_option("--refined-direction-nodes", integ.refined_direction_nodes, "nodes for the error estimate")
      ->capture_default_str();
  symp_idem->add_option("--box", integ.box, "direction integration half-width")->capture_default_str();
  symp_idem->add_option("--tolerance", idem_tol, "residual tolerance")->capture_default_str();
  symp_idem->add_option("--output", out_path, "JSON report (default stdout)");

  // evolve
  auto* evolve = app.add_subcommand("evolve", "symbol-level Heisenberg evolution on a spin scheme");
  add_spin_options(evolve, sa);
  std::string ham_path;
  double t_final = 0.0;
  int steps = 200;
  evolve->add_option("--hamiltonian", ham_path, "Hamiltonian JSON")->required();
  evolve->add_option("--input", in_path, "observable JSON")->required();
  evolve->add_option("--time", t_final, "evolution time")->required();
  evolve->add_option("--steps", steps, "RK4 steps")->check(CLI::PositiveNumber)->capture_default_str();
  evolve->add_option("--output", out_path, "symbol CSV (default stdout)");

  // intertwine
  auto* inter = app.add_subcommand("intertwine", "convert symbols between the spin and matrix-element schemes");
  add_spin_options(inter, sa);
  std::string from = "spin", to = "matrix", op_path;
  inter->add_option("--from", from, "source scheme: spin or matrix")->capture_default_str();
  inter->add_option("--to", to, "target scheme: spin or matrix")->capture_default_str();
  auto* inter_sym = inter->add_option("--input", in_path, "symbol CSV in the source scheme");
  inter->add_option("--operator", op_path, "operator JSON; its source-scheme symbol is converted")->excludes(inter_sym);
  inter->add_option("--output", out_path, "symbol CSV (default stdout)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suites");
  std::string report_path;
  bool skip_symplectic = false;
  verify_cmd->add_option("--report", report_path, "also write the report as JSON");
  verify_cmd->add_flag("--skip-symplectic", skip_symplectic, "leave out the oscillator checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*spin_tomo) {
      const auto grid = make_grid(sa);
      const auto a = io::read_operator(in_path);
      emit(out_path, io::spin_tomogram_csv(spin_tomogram(a, grid)));
    } else if (*spin_rec) {
      const auto text = io::read_file(in_path);
      const auto grid = grid_for_tomogram(sa, text);
      const auto w = io::spin_tomogram_from_csv(text, grid);
      const auto build = build_spin_scheme(grid, g.threads);
      std::cerr << "quantizer calibration factor: " << io::format_double(build.calibration.real()) << "\n";
      const auto a = operator_of(as_symbol(w, build.scheme), build.scheme);
      emit(out_path, io::operator_to_json(a).dump(2) + "\n");
    } else if (*spin_kernel) {
      const auto grid = make_grid(sa);
      const auto s = spin_scheme(grid, g.threads);
      auto k = spin_star_kernel(s, g.threads);
      if (sparse) k = k.to_sparse(threshold);
      emit(out_path, io::kernel_to_json(k).dump() + "\n");
    } else if (*symp_tomo) {
      const FockSpace fock(ya.n_trunc);
      const auto thetas = uniform_thetas(ya.n_theta);
      const XGrid xgrid{ya.x_max, ya.dx};
      if (!spectral) {
        if (!(ya.smoothing > 0.0)) throw DomainError("SAMPLED tomograms need --smoothing > 0 (use --spectral for exact masses)");
        xgrid.nodes();
      }
      OperatorMatrix a;
      if (fock_state >= 0) {
        a = fock.fock_projector(fock_state);
      } else if (!in_path.empty()) {
        a = io::read_operator(in_path);
      } else {
        throw DomainError("symplectic tomogram: give --input or --fock");
      }
      if (spectral) {
        emit(out_path, io::spectral_tomogram_to_json(symplectic_tomogram_spectral(a, fock, thetas), ya.n_trunc).dump() + "\n");
      } else {
        emit(out_path, io::sampled_tomogram_csv(symplectic_tomogram_sampled(a, fock, thetas, xgrid, ya.smoothing)));
      }
    } else if (*symp_rec) {
      const RGrid rgrid{ya.r_max, ya.n_r, ya.epsilon};
      rgrid.validate();
      const auto text = io::read_file(in_path);
      const auto first = text.find_first_not_of(" \t\r\n");
      SymplecticTomogram t;
      int n = ya.n_trunc;
      if (first != std::string::npos && text[first] == '{') {
        t = io::spectral_tomogram_from_json(io::parse_json(text, in_path), &n);
        if (symp_rec->count("--n-trunc") > 0 && n != ya.n_trunc) {
          throw DimensionError("--n-trunc " + std::to_string(ya.n_trunc) + " disagrees with the tomogram's " +
                               std::to_string(n));
        }
      } else {
        t = io::sampled_tomogram_from_csv(text);
      }
      const FockSpace fock(n);
      emit(out_path, io::operator_to_json(symplectic_reconstruct(t, fock, rgrid)).dump(2) + "\n");
    } else if (*symp_kernel) {
      const auto k = symplectic_kernel_closed_form(point_from(x1v, "--x1"), point_from(x2v, "--x2"), point_from(xv, "--x"));
      json out = {{"constraint", k.constraint}, {"phase_density", complex_json(k.phase_density)}};
      emit(out_path, out.dump(2) + "\n");
    } else if (*symp_idem) {
      std::vector<SymplecticPoint> pts;
      for (const auto& spec : point_specs) {
        std::vector<double> v;
        std::size_t start = 0;
        while (start <= spec.size()) {
          const auto comma = spec.find(',', start);
          const auto cell = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
          try {
            v.push_back(std::stod(cell));
          } catch (const std::exception&) {
            throw DomainError("--point: not a number: '" + cell + "'");
          }
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        pts.push_back(point_from(v, "--point"));
      }
      if (pts.empty()) pts = {{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}, {0.5, 0.5, 1.0}, {-0.7, 1.2, -0.8}, {0.3, -0.4, 0.6}};
      for (const auto& p : pts) {
        if (p.nu == 0.0) throw DomainError("--point: the closed-form kernel needs nu != 0");
      }
      const auto results = star_w0_idempotency(pts, integ);
      json rows = json::array();
      bool ok = true;
      for (const auto& r : results) {
        const bool pass = r.residual < idem_tol;
        ok = ok && pass;
        rows.push_back({{"X", r.point.X},
                        {"mu", r.point.mu},
                        {"nu", r.point.nu},
                        {"star_value", r.star_value},
                        {"w0", r.target},
                        {"residual", r.residual},
                        {"quadrature_error", r.quadrature_error},
                        {"passed", pass}});
      }
      emit(out_path, json{{"tolerance", idem_tol}, {"points", rows}}.dump(2) + "\n");
      if (!ok) return kPropertyFailure;
    } else if (*evolve) {
      const auto grid = make_grid(sa);
      const auto h = io::read_operator(ham_path);
      const auto a = io::read_operator(in_path);
      require_spin_dim(h, grid.j(), "evolve: Hamiltonian");
      require_spin_dim(a, grid.j(), "evolve: observable");
      const auto s = spin_scheme(grid, g.threads);
      const auto k = spin_star_kernel(s, g.threads);
      const auto f = heisenberg_evolve(symbol_of(a, s), symbol_of(h, s), t_final, steps, k, s);
      const OperatorMatrix u = matrix_exponential(complex(0.0, t_final) * h);
      std::cerr << "sup-norm distance to the symbol of exp(iHt) A exp(-iHt): "
                << io::format_double(f.distance(symbol_of(u * a * u.adjoint(), s))) << "\n";
      emit(out_path, io::symbol_csv(f, s));
    } else if (*inter) {
      const auto grid = make_grid(sa);
      const auto src = scheme_by_name(from, grid, g.threads);
      const auto dst = scheme_by_name(to, grid, g.threads);
      if (op_path.empty() && in_path.empty()) throw DomainError("intertwine: give --input or --operator");
      const Symbol f = op_path.empty() ? io::symbol_from_csv(io::read_file(in_path), src)
                                       : symbol_of(io::read_operator(op_path), src);
      const auto forward = intertwine_kernel(src, dst);
      const auto back = intertwine_kernel(dst, src);
      const auto converted = convert_symbol(f, forward);
      std::cerr << "round-trip sup-norm residual: " << io::format_double(convert_symbol(converted, back).distance(f))
                << "\n";
      emit(out_path, io::symbol_csv(converted, dst));
    } else if (*verify_cmd) {
      verify::Options opt;
      opt.seed = g.seed;
      opt.threads = g.threads;
      opt.include_symplectic = !skip_symplectic;
      const auto results = verify::run_property_suite(opt);
      json rows = json::array();
      for (const auto& r : results) {
        std::printf("%-36s %-4s residual=%-10.3g tolerance=%g\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.residual,
                    r.tolerance);
        rows.push_back({{"name", r.name}, {"residual", r.residual}, {"tolerance", r.tolerance}, {"passed", r.passed}});
      }
      const bool ok = verify::all_passed(results);
      std::printf("%s\n", ok ? "all properties hold" : "property failures detected");
      if (!report_path.empty()) io::write_file(report_path, json{{"seed", g.seed}, {"passed", ok}, {"properties", rows}}.dump(2) + "\n");
      if (!ok) return kPropertyFailure;
    }
  } catch (const io::IoError& e) {
    std::cerr << "tomo: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const GridTooCoarse& e) {
    std::cerr << "tomo: " << e.what() << "\n"
              << "required: --n-alpha " << e.required_n_alpha() << " --n-beta " << e.required_n_beta() << "\n";
    return kValidation;
  } catch (const ConvergenceError& e) {
    std::cerr << "tomo: " << e.what() << "\n";
    return kPropertyFailure;
  } catch (const Error& e) {
    std::cerr << "tomo: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
