#include "bornwalk/harness.hpp"

#include <cmath>

#include "bornwalk/error.hpp"
#include "bornwalk/stats.hpp"

namespace bornwalk {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ConfigInvalid, path + ": " + what);
}

template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ConfigInvalid) throw;
    // Messages from the io readers already carry a path.
    if (e.detail().find(path) != std::string::npos) throw;
    invalid(path, e.detail());
  }
}

std::uint64_t count_field(const Json& j, const char* key, std::uint64_t fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_unsigned()) invalid(path + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

Json to_json(const Scenario& s) {
  Json out = {{"name", s.name},
              {"array", to_json(s.array)},
              {"wave", to_json(s.wave)},
              {"kernel", to_json(s.kernel)},
              {"walks", s.walks},
              {"master_seed", s.master_seed},
              {"max_steps", s.max_steps},
              {"quadrature", to_json(s.quadrature)}};
  if (s.block_check) {
    Json blocks = Json::array();
    for (const auto& b : s.block_check->apparatus_blocks) blocks.push_back(matrix_to_json(b));
    out["block_check"] = {{"dims", to_json(s.block_check->dims)},
                          {"apparatus_blocks", blocks},
                          {"times", s.block_check->times}};
  }
  return out;
}

Scenario scenario_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  for (const char* key : {"array", "wave"}) {
    if (!j.contains(key)) invalid(path + "." + key, "missing");
  }
  Scenario s{.array = detector_array_from_json(j["array"], path + ".array"),
             .wave = wave_function_from_json(j["wave"], path + ".wave")};
  if (j.contains("name")) {
    if (!j["name"].is_string()) invalid(path + ".name", "expected a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("kernel")) s.kernel = with_path(path + ".kernel", [&] { return kernel_from_json(j["kernel"], path + ".kernel"); });
  s.walks = count_field(j, "walks", s.walks, path);
  if (s.walks < 1) invalid(path + ".walks", "must be >= 1");
  s.master_seed = count_field(j, "master_seed", s.master_seed, path);
  s.max_steps = count_field(j, "max_steps", s.max_steps, path);
  if (s.max_steps < 1) invalid(path + ".max_steps", "must be >= 1");
  if (j.contains("quadrature")) s.quadrature = quadrature_from_json(j["quadrature"], path + ".quadrature");
  if (j.contains("block_check")) {
    const std::string bp = path + ".block_check";
    const Json& b = j["block_check"];
    if (!b.is_object() || !b.contains("dims")) invalid(bp + ".dims", "missing");
    Dims dims = dims_from_json(b["dims"], bp + ".dims");
    if (dims.sectors() != s.array.region_count()) {
      invalid(bp + ".dims.d", "needs one sector per detector region (" + std::to_string(s.array.region_count()) + ")");
    }
    std::vector<CMatrix> blocks;
    if (!b.contains("apparatus_blocks") || !b["apparatus_blocks"].is_array() ||
        b["apparatus_blocks"].size() != dims.sectors()) {
      invalid(bp + ".apparatus_blocks", "expected one block per sector");
    }
    const auto m = static_cast<Eigen::Index>(dims.m());
    for (std::size_t i = 0; i < dims.sectors(); ++i) {
      blocks.push_back(matrix_from_json(b["apparatus_blocks"][i], m, m, bp + ".apparatus_blocks[" + std::to_string(i) + "]"));
    }
    std::vector<double> times;
    if (b.contains("times")) {
      if (!b["times"].is_array()) invalid(bp + ".times", "expected an array");
      for (const auto& t : b["times"]) {
        if (!t.is_number()) invalid(bp + ".times", "expected numbers");
        times.push_back(t.get<double>());
      }
    }
    s.block_check = BlockCheckConfig{std::move(dims), std::move(blocks), std::move(times)};
  }
  return s;
}

Scenario two_slit(double separation, double sigma, double kz, int strips, double extent,
                  Complex second_amplitude) {
  if (!(separation >= 0.0) || !std::isfinite(separation)) invalid("two_slit.separation", "must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) invalid("two_slit.sigma", "must be > 0");
  if (!(extent > 0.0) || !std::isfinite(extent)) invalid("two_slit.extent", "must be > 0");
  if (!std::isfinite(kz)) invalid("two_slit.kz", "must be finite");
  if (strips < 2) invalid("two_slit.strips", "must be >= 2");

  const double z0 = 8.0 * sigma;
  GaussianPacket left{{-0.5 * separation, 0.0, z0}, {sigma, sigma, sigma}, {0.0, 0.0, kz}, {1.0, 0.0}};
  GaussianPacket right = left;
  right.center[0] = 0.5 * separation;
  right.amp = second_amplitude;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<Cell> cells;
  const double width = 2.0 * extent / strips;
  for (int i = 0; i < strips; ++i) {
    // Edges computed from both ends so the mirror image of strip i is exact.
    const double lo = i == 0 ? -extent : -extent + width * i;
    const double hi = i + 1 == strips ? extent : -extent + width * (i + 1);
    cells.push_back({lo, hi, -kInf, kInf});
  }
  for (int i = strips / 2; i < strips; ++i) {
    const auto mirror = static_cast<std::size_t>(strips - 1 - i);
    cells[static_cast<std::size_t>(i)].x_min = -cells[mirror].x_max;
    cells[static_cast<std::size_t>(i)].x_max = -cells[mirror].x_min;
  }

  Scenario s{.array = DetectorArray(std::move(cells)), .wave = WaveFunction({left, right})};
  s.name = "two_slit";
  return s;
}

std::string weights_digest(const SimplexPoint& weights) { return sha256_hex(dump(to_json(weights))); }

ScenarioReport run_scenario(const Scenario& s, unsigned threads) {
  ScenarioReport r;
  r.name = s.name;
  r.config_digest = sha256_hex(dump(to_json(s)));
  r.expected = born_weights(s.wave, s.array, s.quadrature);
  r.weights_digest = weights_digest(r.expected);

  EnsembleOptions opts;
  opts.count = s.walks;
  opts.master_seed = s.master_seed;
  opts.max_steps = s.max_steps;
  opts.threads = threads;
  r.ensemble = ensemble(r.expected, s.kernel, opts);

  const std::uint64_t absorbed = r.ensemble.count - r.ensemble.unabsorbed;
  for (std::size_t i = 0; i < r.expected.size(); ++i) {
    const double se = binomial_se(r.expected[i], absorbed);
    r.band_lo.push_back(r.expected[i] - 3.0 * se);
    r.band_hi.push_back(r.expected[i] + 3.0 * se);
    r.within_band.push_back(r.ensemble.freq[i] >= r.band_lo.back() && r.ensemble.freq[i] <= r.band_hi.back());
  }

  if (s.block_check) {
    const BlockCheckConfig& cfg = *s.block_check;
    const BlockHamiltonian h = assemble(cfg.dims, cfg.apparatus_blocks);
    const InvarianceSuite suite = run_invariance_suite(h.full(), cfg.dims);
    CVector g = CVector::Zero(static_cast<Eigen::Index>(cfg.dims.m()));
    g(0) = 1.0;
    std::vector<CVector> parts;
    for (std::size_t i = 0; i < cfg.dims.sectors(); ++i) {
      CVector phi = CVector::Zero(static_cast<Eigen::Index>(cfg.dims.d()[i]));
      phi(0) = std::sqrt(r.expected[i]);
      parts.push_back(std::move(phi));
    }
    const JointState s0 = product_state(g, parts, cfg.dims);
    BlockCheckReport bc;
    bc.form_ok = suite.form_ok;
    bc.subsets_checked = suite.subsets_checked;
    bc.subsets_failing = suite.failing.size();
    for (const JointState& st : evolve_many(h, s0, cfg.times)) {
      const SimplexPoint a = simplex_map(st);
      for (std::size_t i = 0; i < a.size(); ++i) {
        bc.max_simplex_drift = std::max(bc.max_simplex_drift, std::abs(a[i] - r.expected[i]));
      }
    }
    r.block_check = bc;
  }
  return r;
}

Json to_json(const ScenarioReport& r) {
  Json out = {{"name", r.name},
              {"expected", r.expected.vec()},
              {"ensemble", to_json(r.ensemble)},
              {"band_lo", r.band_lo},
              {"band_hi", r.band_hi},
              {"within_band", r.within_band},
              {"config_digest", r.config_digest},
              {"weights_digest", r.weights_digest}};
  if (r.block_check) {
    out["block_check"] = {{"form_ok", r.block_check->form_ok},
                          {"subsets_checked", r.block_check->subsets_checked},
                          {"subsets_failing", r.block_check->subsets_failing},
                          {"max_simplex_drift", r.block_check->max_simplex_drift}};
  }
  return out;
}

std::vector<std::filesystem::path> write_scenario_artifacts(const Scenario& s, const ScenarioReport& r,
                                                            const std::filesystem::path& out_dir) {
  const std::string report = dump(to_json(r));
  const std::string weights = weights_csv(r.expected);
  std::string freqs = "region_index,count,freq,expected,band_lo,band_hi\n";
  for (std::size_t i = 0; i < r.expected.size(); ++i) {
    freqs += std::to_string(i + 1) + "," + std::to_string(r.ensemble.counts[i]) + "," +
             format_real(r.ensemble.freq[i]) + "," + format_real(r.expected[i]) + "," +
             format_real(r.band_lo[i]) + "," + format_real(r.band_hi[i]) + "\n";
  }
  const std::vector<std::pair<std::string, std::string>> files = {
      {"report.json", report}, {"weights.csv", weights}, {"frequencies.csv", freqs}};

  Json digests = Json::object();
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : files) {
    write_text_file(out_dir / name, text);
    digests[name] = sha256_hex(text);
    written.push_back(out_dir / name);
  }
  const Json manifest = {{"tool", "bornwalk"},
                         {"scenario", to_json(s)},
                         {"config_digest", r.config_digest},
                         {"weights_digest", r.weights_digest},
                         {"master_seed", s.master_seed},
                         {"files", digests}};
  write_text_file(out_dir / "manifest.json", dump(manifest));
  written.push_back(out_dir / "manifest.json");
  return written;
}

}  // namespace bornwalk
