#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bornwalk/blockop.hpp"
#include "bornwalk/error.hpp"
#include "bornwalk/harness.hpp"
#include "bornwalk/io.hpp"
#include "bornwalk/oracle.hpp"
#include "bornwalk/simplexwalk.hpp"
#include "bornwalk/wavepacket.hpp"

namespace bornwalk::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "json";
  bool quiet = false;
  unsigned threads = 1;
};

std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::ConfigInvalid, std::string(what) + ": bad number '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::ConfigInvalid, std::string(what) + ": empty list");
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_reals(text, what)) {
    if (v < 0 || v != std::floor(v)) throw Error(ErrorKind::ConfigInvalid, std::string(what) + ": expected integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// Comma-separated start point; auto-normalized with a warning.
SimplexPoint parse_start(const std::string& text, const Globals& g, std::ostream& err) {
  std::vector<double> a = parse_reals(text, "--start");
  double sum = 0.0;
  for (double v : a) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::ConfigInvalid, "--start: coordinates must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9 && !g.quiet) {
    err << "warning: --start sums to " << format_real(sum) << "; normalizing\n";
  }
  if (std::abs(sum - 1.0) > SimplexPoint::kSumTolerance) return SimplexPoint::normalized(std::move(a));
  return SimplexPoint(std::move(a));
}

/// Prints `text` or, with --out, writes it as `name` plus a manifest.
void emit(const Globals& g, const std::string& command, const std::vector<std::string>& args,
          const std::string& name, const std::string& text, std::ostream& out, std::ostream& err) {
  if (g.out_dir.empty()) {
    out << text;
    return;
  }
  const fs::path dir(g.out_dir);
  write_text_file(dir / name, text);
  const Json manifest = {{"tool", "bornwalk"},
                         {"command", command},
                         {"args", args},
                         {"seed", g.seed},
                         {"files", {{name, sha256_hex(text)}}}};
  write_text_file(dir / "manifest.json", dump(manifest));
  if (!g.quiet) err << "wrote " << (dir / name).string() << "\n";
}

void require_format(const Globals& g) {
  if (g.format != "json" && g.format != "csv") {
    throw Error(ErrorKind::ConfigInvalid, "--format must be json or csv");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Born-rule measurement simulator: detector weights, block Hamiltonians and absorbing simplex walks",
               "bornwalk"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Master seed; fully determines stochastic output");
  app.add_option("--out", g.out_dir, "Directory for output files and the run manifest");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", g.quiet, "Suppress diagnostics");
  app.add_option("--threads", g.threads, "Worker threads for ensembles (0 = all cores)");

  // born
  auto* born = app.add_subcommand("born", "Born weights of a wave function over a detector array");
  std::string wave_file, array_file;
  int nodes = 128;
  double half_width = 8.0;
  born->add_option("--wave", wave_file, "Wave function JSON")->required();
  born->add_option("--array", array_file, "Detector array JSON")->required();
  born->add_option("--nodes", nodes, "Quadrature nodes per axis");
  born->add_option("--half-width", half_width, "Truncation half-width in sigma");

  // walk
  auto* walk = app.add_subcommand("walk", "Single absorbing walk with a path dump");
  std::string start_text, kernel_text = "pair:0.05";
  std::uint64_t max_steps = kDefaultMaxSteps, thin = 1;
  walk->add_option("--start", start_text, "Start point, comma-separated")->required();
  walk->add_option("--kernel", kernel_text, "pair:H or dirichlet:GAMMA,BETA");
  walk->add_option("--max-steps", max_steps, "Step budget");
  walk->add_option("--thin", thin, "Record every k-th point (0 = no path)");

  // ensemble
  auto* ens = app.add_subcommand("ensemble", "Absorption frequencies of many walks");
  std::uint64_t count = 10'000;
  ens->add_option("--start", start_text, "Start point, comma-separated")->required();
  ens->add_option("--kernel", kernel_text, "pair:H or dirichlet:GAMMA,BETA");
  ens->add_option("--count", count, "Number of walks");
  ens->add_option("--max-steps", max_steps, "Step budget per walk");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exact absorption probabilities of the lattice chain");
  bool ruin = false, lattice = false;
  std::uint32_t grid = 10;
  orc->add_flag("--gamblers-ruin", ruin, "Two-state fair walk on {0..M}");
  orc->add_flag("--lattice", lattice, "Pair-transfer chain on the simplex lattice");
  orc->add_option("--start", start_text, "k (gambler's ruin) or k_1,...,k_n summing to M")->required();
  orc->add_option("--grid", grid, "Grid resolution M")->required();

  // evolve
  auto* evo = app.add_subcommand("evolve", "Simplex trajectory of a state under a block Hamiltonian");
  std::string ham_file, state_file, times_text = "0,0.1,0.5,1,5";
  evo->add_option("--hamiltonian", ham_file, "Block Hamiltonian JSON")->required();
  evo->add_option("--state", state_file, "Joint state JSON")->required();
  evo->add_option("--times", times_text, "Comma-separated times");

  // check
  auto* chk = app.add_subcommand("check", "Invariance and product-form suite on an operator");
  std::string dims_text;
  chk->add_option("--hamiltonian", ham_file, "Operator JSON (full matrix or block form)")->required();
  chk->add_option("--dims", dims_text, "m,d_1,...,d_n")->required();

  // scenario
  auto* scn = app.add_subcommand("scenario", "Full pipeline: Born weights -> walk ensemble -> statistics");
  std::string config_file;
  bool two_slit_flag = false, antisymmetric = false;
  double separation = 4.0, sigma = 1.0, kz = 0.0, extent = 4.0;
  int strips = 8;
  std::optional<std::uint64_t> walks;
  std::optional<std::string> scn_kernel;
  std::optional<int> scn_nodes;
  scn->add_option("--config", config_file, "Scenario JSON");
  scn->add_flag("--two-slit", two_slit_flag, "Build the two-slit scenario from flags");
  scn->add_option("--separation", separation, "Slit separation");
  scn->add_option("--sigma", sigma, "Packet width");
  scn->add_option("--kz", kz, "Wave vector along z");
  scn->add_option("--strips", strips, "Number of detector strips");
  scn->add_option("--extent", extent, "Strips cover [-extent, extent]");
  scn->add_flag("--antisymmetric", antisymmetric, "Second packet with amplitude -1");
  scn->add_option("--count", walks, "Number of walks");
  scn->add_option("--kernel", scn_kernel, "pair:H or dirichlet:GAMMA,BETA");
  scn->add_option("--nodes", scn_nodes, "Quadrature nodes per axis");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    require_format(g);
    if (*born) {
      QuadratureSpec q;
      q.nodes.fill(nodes);
      q.half_width = half_width;
      q.validate();
      const WaveFunction psi = wave_function_from_json(read_json_file(wave_file));
      const DetectorArray array = detector_array_from_json(read_json_file(array_file));
      if (!validate(array).empty()) throw Error(ErrorKind::ConfigInvalid, "detector array has overlapping or degenerate cells");
      const SimplexPoint w = born_weights(psi, array, q);
      if (g.format == "csv") {
        emit(g, "born", args, "weights.csv", weights_csv(w), out, err);
      } else {
        emit(g, "born", args, "weights.json", dump({{"weights", w.vec()}}), out, err);
      }
    } else if (*walk) {
      const SimplexPoint start = parse_start(start_text, g, err);
      const WalkRun run = run_walk(start, parse_kernel(kernel_text), g.seed, max_steps, thin);
      if (g.format == "csv") {
        emit(g, "walk", args, "path.csv", path_csv(run), out, err);
      } else {
        emit(g, "walk", args, "walk.json", dump(to_json(run)), out, err);
      }
    } else if (*ens) {
      const SimplexPoint start = parse_start(start_text, g, err);
      EnsembleOptions opts;
      opts.count = count;
      opts.master_seed = g.seed;
      opts.max_steps = max_steps;
      opts.threads = g.threads;
      const EnsembleResult r = ensemble(start, parse_kernel(kernel_text), opts);
      if (g.format == "csv") {
        std::string csv = "vertex,count,freq\n";
        for (std::size_t i = 0; i < r.counts.size(); ++i) {
          csv += std::to_string(i + 1) + "," + std::to_string(r.counts[i]) + "," + format_real(r.freq[i]) + "\n";
        }
        emit(g, "ensemble", args, "ensemble.csv", csv, out, err);
      } else {
        emit(g, "ensemble", args, "ensemble.json", dump(to_json(r)), out, err);
      }
    } else if (*orc) {
      if (ruin == lattice) throw Error(ErrorKind::ConfigInvalid, "oracle needs exactly one of --gamblers-ruin, --lattice");
      const std::vector<std::size_t> k = parse_counts(start_text, "--start");
      if (ruin) {
        if (k.size() != 1) throw Error(ErrorKind::ConfigInvalid, "--gamblers-ruin takes a single --start");
        const double p = gamblers_ruin(static_cast<std::uint32_t>(k[0]), grid);
        std::ostringstream os;
        os << std::setprecision(15) << p << "\n";
        emit(g, "oracle", args, "oracle.txt", os.str(), out, err);
      } else {
        LatticeChain chain{k.size(), grid};
        LatticePoint start(k.begin(), k.end());
        const std::vector<double> abs = lattice_absorption(chain, start);
        std::vector<double> start_frac;
        for (auto v : k) start_frac.push_back(static_cast<double>(v) / grid);
        emit(g, "oracle", args, "oracle.json", dump(oracle_to_json(start_frac, abs, grid)), out, err);
      }
    } else if (*evo) {
      const BlockHamiltonian h = block_hamiltonian_from_json(read_json_file(ham_file));
      const JointState s = joint_state_from_json(read_json_file(state_file));
      const std::vector<double> times = parse_reals(times_text, "--times");
      std::vector<SimplexPoint> points;
      for (const JointState& st : evolve_many(h, s, times)) points.push_back(simplex_map(st));
      if (g.format == "csv") {
        emit(g, "evolve", args, "trajectory.csv", trajectory_csv(times, points), out, err);
      } else {
        Json rows = Json::array();
        for (std::size_t i = 0; i < times.size(); ++i) rows.push_back({{"t", times[i]}, {"a", points[i].vec()}});
        emit(g, "evolve", args, "trajectory.json", dump({{"trajectory", rows}}), out, err);
      }
    } else if (*chk) {
      const std::vector<std::size_t> dv = parse_counts(dims_text, "--dims");
      if (dv.size() < 2) throw Error(ErrorKind::ConfigInvalid, "--dims needs m followed by at least one d_i");
      const Dims dims(dv[0], std::vector<std::size_t>(dv.begin() + 1, dv.end()));
      const CMatrix h = operator_from_json(read_json_file(ham_file), dims);
      const InvarianceSuite suite = run_invariance_suite(h, dims);
      Json failing = suite.failing;
      const Json report = {{"verify_form", suite.form_ok},
                           {"subsets_checked", suite.subsets_checked},
                           {"failing_subsets", failing},
                           {"passed", suite.passed()}};
      emit(g, "check", args, "check.json", dump(report), out, err);
      return suite.passed() ? kOk : kCheckFailed;
    } else if (*scn) {
      if (two_slit_flag == !config_file.empty()) {
        throw Error(ErrorKind::ConfigInvalid, "scenario needs exactly one of --config, --two-slit");
      }
      Scenario s = two_slit_flag ? two_slit(separation, sigma, kz, strips, extent,
                                            antisymmetric ? Complex{-1.0, 0.0} : Complex{1.0, 0.0})
                                 : scenario_from_json(read_json_file(config_file));
      if (two_slit_flag || app.get_option("--seed")->count() > 0) s.master_seed = g.seed;
      if (walks) s.walks = *walks;
      if (scn_kernel) s.kernel = parse_kernel(*scn_kernel);
      if (scn_nodes) {
        s.quadrature.nodes.fill(*scn_nodes);
        s.quadrature.validate();
      }
      const ScenarioReport r = run_scenario(s, g.threads);
      if (g.out_dir.empty()) {
        out << (g.format == "csv" ? weights_csv(r.expected) : dump(to_json(r)));
      } else {
        for (const auto& p : write_scenario_artifacts(s, r, g.out_dir)) {
          if (!g.quiet) err << "wrote " << p.string() << "\n";
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_numerical(e.kind()) ? kNumericalError : kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}

}  // namespace bornwalk::cli
