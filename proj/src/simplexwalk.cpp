#include "bornwalk/simplexwalk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <thread>

#include "bornwalk/error.hpp"
#include "bornwalk/stats.hpp"

namespace bornwalk {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double parse_real(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::ConfigInvalid, "bad number in " + what);
  return v;
}

void collect_active(const std::vector<double>& a, std::vector<std::size_t>& active) {
  active.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) active.push_back(i);
  }
}

/// A single surviving coordinate is the vertex; make that exact.
void snap_vertex(std::vector<double>& a) {
  std::size_t last = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) {
      if (last != a.size()) return;
      last = i;
    }
  }
  if (last != a.size()) a[last] = 1.0;
}

void pair_step(std::vector<double>& a, const std::vector<std::size_t>& active, double h, Rng& rng) {
  const std::size_t k = active.size();
  // Uniform ordered pair, hence uniform unordered pair.
  const std::size_t first = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
  std::size_t second = std::uniform_int_distribution<std::size_t>(0, k - 2)(rng);
  if (second >= first) ++second;
  const std::size_t i = active[first];
  const std::size_t j = active[second];
  const double eps = std::min({a[i], a[j], h});
  const bool up = std::bernoulli_distribution(0.5)(rng);
  const std::size_t gain = up ? i : j;
  const std::size_t loss = up ? j : i;
  a[gain] += eps;
  a[loss] -= eps;
  if (a[loss] < 0.0) a[loss] = 0.0;
}

void dirichlet_step(std::vector<double>& a, const std::vector<std::size_t>& active,
                    const DirichletMix& kernel, Rng& rng) {
  const std::size_t k = active.size();
  std::vector<double> u(k);
  double total = 0.0;
  for (int attempt = 0; attempt < 64 && !(total > 0.0 && std::isfinite(total)); ++attempt) {
    total = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      u[r] = std::gamma_distribution<double>(kernel.gamma * a[active[r]], 1.0)(rng);
      total += u[r];
    }
  }
  if (!(total > 0.0 && std::isfinite(total))) {
    throw Error(ErrorKind::NonFiniteResult, "Dirichlet draw underflowed repeatedly");
  }
  // Close the direction on the largest coordinate so that sum(u) == 0 holds
  // exactly; otherwise 1 - D_i - a_j can round away a tiny component.
  std::size_t largest = 0;
  for (std::size_t r = 0; r < k; ++r) {
    if (a[active[r]] > a[active[largest]]) largest = r;
  }
  double rest = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    if (r == largest) continue;
    u[r] = u[r] / total - a[active[r]];
    rest += u[r];
  }
  u[largest] = -rest;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  double reach_fwd = kInf;
  double reach_bwd = kInf;
  for (std::size_t r = 0; r < k; ++r) {
    const double ar = a[active[r]];
    if (u[r] < 0.0) reach_fwd = std::min(reach_fwd, ar / -u[r]);
    if (u[r] > 0.0) reach_bwd = std::min(reach_bwd, ar / u[r]);
  }
  if (reach_fwd == kInf || reach_bwd == kInf) return;  // D == a

  // With probability beta jump along the chord to a face; otherwise land on
  // the draw or step back by the same amount (capped at the face). Either
  // two-point law has mean a.
  const bool to_boundary = std::bernoulli_distribution(kernel.beta)(rng);
  const double s_fwd = to_boundary ? reach_fwd : 1.0;
  const double s_bwd = to_boundary ? reach_bwd : std::min(1.0, reach_bwd);
  const bool forward = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * (s_fwd + s_bwd) < s_bwd;
  const double s = forward ? s_fwd : -s_bwd;
  const bool hits_face = forward ? s_fwd == reach_fwd : s_bwd == reach_bwd;
  const double reach = forward ? reach_fwd : reach_bwd;

  for (std::size_t r = 0; r < k; ++r) {
    double& ar = a[active[r]];
    const bool limiting = hits_face && ((forward && u[r] < 0.0 && ar / -u[r] == reach) ||
                                        (!forward && u[r] > 0.0 && ar / u[r] == reach));
    const double next = ar + s * u[r];
    ar = (limiting || next < 0.0) ? 0.0 : next;
  }
}

}  // namespace

void validate(const WalkKernel& kernel) {
  std::visit(Overloaded{
                 [](const PairTransfer& p) {
                   if (!(p.h > 0.0 && p.h <= 0.5)) {
                     throw Error(ErrorKind::ConfigInvalid, "kernel.h must lie in (0, 0.5]");
                   }
                 },
                 [](const DirichletMix& d) {
                   if (!(d.gamma > 0.0) || !std::isfinite(d.gamma)) {
                     throw Error(ErrorKind::ConfigInvalid, "kernel.gamma must be > 0");
                   }
                   if (!(d.beta > 0.0 && d.beta <= 1.0)) {
                     throw Error(ErrorKind::ConfigInvalid, "kernel.beta must lie in (0, 1]");
                   }
                 },
             },
             kernel);
}

WalkKernel parse_kernel(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::ConfigInvalid, "kernel must look like pair:H or dirichlet:G,B");
  const std::string name = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  WalkKernel kernel;
  if (name == "pair") {
    kernel = PairTransfer{parse_real(args, "kernel")};
  } else if (name == "dirichlet") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::ConfigInvalid, "dirichlet kernel needs gamma,beta");
    kernel = DirichletMix{parse_real(std::string_view(args).substr(0, comma), "kernel"),
                          parse_real(std::string_view(args).substr(comma + 1), "kernel")};
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown kernel '" + name + "'");
  }
  validate(kernel);
  return kernel;
}

std::string to_string(const WalkKernel& kernel) {
  // Shortest text that parses back to the same double.
  auto real = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  return std::visit(Overloaded{
                        [&](const PairTransfer& p) { return "pair:" + real(p.h); },
                        [&](const DirichletMix& d) { return "dirichlet:" + real(d.gamma) + "," + real(d.beta); },
                    },
                    kernel);
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

std::uint64_t derive_walk_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void step_inplace(std::vector<double>& a, const WalkKernel& kernel, Rng& rng) {
  thread_local std::vector<std::size_t> active;
  collect_active(a, active);
  if (active.size() < 2) throw Error(ErrorKind::NoActivePair, "fewer than two positive coordinates");
  std::visit(Overloaded{
                 [&](const PairTransfer& p) { pair_step(a, active, p.h, rng); },
                 [&](const DirichletMix& d) { dirichlet_step(a, active, d, rng); },
             },
             kernel);
  snap_vertex(a);
}

SimplexPoint step(const SimplexPoint& a, const WalkKernel& kernel, Rng& rng) {
  std::vector<double> next = a.vec();
  step_inplace(next, kernel, rng);
  return SimplexPoint(std::move(next));
}

WalkRun run_walk(const SimplexPoint& start, const WalkKernel& kernel, std::uint64_t seed,
                 std::uint64_t max_steps, std::uint64_t thin) {
  validate(kernel);
  if (max_steps < 1) throw Error(ErrorKind::ConfigInvalid, "max_steps must be >= 1");
  WalkRun run;
  run.seed = seed;
  run.start = start;
  Rng rng = make_rng(seed);
  std::vector<double> a = start.vec();
  if (thin > 0) run.path.emplace_back(0, start);

  std::uint64_t steps = 0;
  run.absorbed_at = is_absorbed(start);
  while (!run.absorbed_at && steps < max_steps) {
    step_inplace(a, kernel, rng);
    ++steps;
    if (thin > 0 && steps % thin == 0) run.path.emplace_back(steps, SimplexPoint(a));
    std::size_t positive = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] > 0.0) {
        ++positive;
        last = i;
      }
    }
    if (positive == 1) run.absorbed_at = last + 1;
  }
  run.steps_taken = steps;
  run.final_point = SimplexPoint(std::move(a));
  if (thin > 0 && run.path.back().first != steps) run.path.emplace_back(steps, run.final_point);
  return run;
}

EnsembleResult ensemble(const SimplexPoint& start, const WalkKernel& kernel,
                        const EnsembleOptions& options) {
  validate(kernel);
  if (options.count < 1) throw Error(ErrorKind::ConfigInvalid, "ensemble count must be >= 1");
  if (options.max_steps < 1) throw Error(ErrorKind::ConfigInvalid, "max_steps must be >= 1");

  // Per-walk outcome: absorbing vertex (0 = not absorbed) and step count.
  std::vector<std::uint32_t> vertex(options.count, 0);
  std::vector<std::uint64_t> steps(options.count, 0);

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, options.count));

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const WalkRun run = run_walk(start, kernel, derive_walk_seed(options.master_seed, i), options.max_steps, 0);
      vertex[i] = run.absorbed_at ? static_cast<std::uint32_t>(*run.absorbed_at) : 0;
      steps[i] = run.steps_taken;
    }
  };

  if (threads <= 1) {
    work(0, options.count);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (options.count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = std::min<std::uint64_t>(options.count, t * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(options.count, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  EnsembleResult out;
  out.start = start;
  out.count = options.count;
  out.master_seed = options.master_seed;
  out.counts.assign(start.size(), 0);
  for (std::uint64_t i = 0; i < options.count; ++i) {
    if (vertex[i] == 0) {
      ++out.unabsorbed;
    } else {
      ++out.counts[vertex[i] - 1];
    }
    out.total_steps += steps[i];
  }
  if (static_cast<double>(out.unabsorbed) > options.max_unabsorbed_fraction * static_cast<double>(options.count)) {
    throw Error(ErrorKind::TooManyUnabsorbed,
                std::to_string(out.unabsorbed) + " of " + std::to_string(options.count) +
                    " walks unabsorbed; raise max_steps");
  }
  const std::uint64_t absorbed = options.count - out.unabsorbed;
  out.freq.assign(start.size(), 0.0);
  for (std::size_t i = 0; i < out.counts.size(); ++i) {
    if (absorbed > 0) out.freq[i] = static_cast<double>(out.counts[i]) / static_cast<double>(absorbed);
  }
  if (absorbed == 0) {
    out.chi2_skipped = "no absorbed walks";
  } else {
    try {
      const ChiSquare cs = chi_square(out.counts, start);
      out.chi2 = cs.statistic;
      out.p_value = cs.p_value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateExpected) throw;
      out.chi2_skipped = e.what();
    }
  }
  return out;
}

}  // namespace bornwalk
