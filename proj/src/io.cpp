#include "bornwalk/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "bornwalk/error.hpp"

namespace bornwalk {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ConfigInvalid, path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) invalid(path + "." + key, "missing");
  return *it;
}

/// Numbers, or the strings "inf" / "-inf" for unbounded cell edges.
double real(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  invalid(path, "expected a number");
}

Json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Vec3 vec3(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) invalid(path, "expected [x, y, z]");
  return {real(j[0], path + "[0]"), real(j[1], path + "[1]"), real(j[2], path + "[2]")};
}

Complex complex_pair(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) invalid(path, "expected [re, im]");
  return {real(j[0], path + "[0]"), real(j[1], path + "[1]")};
}

std::uint64_t unsigned_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    invalid(path, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest of 15..17 significant digits that round-trips.
  for (int prec = 15; prec <= 17; ++prec) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    if (std::stod(os.str()) == v || prec == 17) return os.str();
  }
  return {};
}

Json to_json(const DetectorArray& array) {
  Json cells = Json::array();
  for (const Cell& c : array.cells()) {
    cells.push_back({{"x_min", real_to_json(c.x_min)},
                     {"x_max", real_to_json(c.x_max)},
                     {"y_min", real_to_json(c.y_min)},
                     {"y_max", real_to_json(c.y_max)}});
  }
  return {{"cells", cells}};
}

DetectorArray detector_array_from_json(const Json& j, const std::string& path) {
  const Json& cells = field(j, "cells", path);
  if (!cells.is_array()) invalid(path + ".cells", "expected an array");
  std::vector<Cell> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string p = path + ".cells[" + std::to_string(i) + "]";
    out.push_back({real(field(cells[i], "x_min", p), p + ".x_min"), real(field(cells[i], "x_max", p), p + ".x_max"),
                   real(field(cells[i], "y_min", p), p + ".y_min"), real(field(cells[i], "y_max", p), p + ".y_max")});
  }
  return DetectorArray(std::move(out));
}

Json to_json(const WaveFunction& psi) {
  Json packets = Json::array();
  for (const auto& p : psi.packets()) {
    packets.push_back({{"center", p.center},
                       {"sigma", p.sigma},
                       {"k", p.k},
                       {"amp", {p.amp.real(), p.amp.imag()}}});
  }
  return {{"packets", packets}};
}

WaveFunction wave_function_from_json(const Json& j, const std::string& path) {
  const Json& packets = field(j, "packets", path);
  if (!packets.is_array()) invalid(path + ".packets", "expected an array");
  std::vector<GaussianPacket> out;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const std::string p = path + ".packets[" + std::to_string(i) + "]";
    GaussianPacket g;
    g.center = vec3(field(packets[i], "center", p), p + ".center");
    g.sigma = vec3(field(packets[i], "sigma", p), p + ".sigma");
    if (packets[i].contains("k")) g.k = vec3(packets[i]["k"], p + ".k");
    if (packets[i].contains("amp")) g.amp = complex_pair(packets[i]["amp"], p + ".amp");
    out.push_back(g);
  }
  try {
    return WaveFunction(std::move(out));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ConfigInvalid) throw;
    throw Error(ErrorKind::ConfigInvalid, path + "." + e.detail());
  }
}

Json to_json(const QuadratureSpec& q) {
  return {{"nodes", q.nodes}, {"half_width", q.half_width}, {"scheme", "composite-gauss-legendre"}};
}

QuadratureSpec quadrature_from_json(const Json& j, const std::string& path) {
  QuadratureSpec q;
  if (!j.is_object()) invalid(path, "expected an object");
  if (j.contains("nodes")) {
    const Json& n = j["nodes"];
    if (n.is_number_integer()) {
      q.nodes.fill(n.get<int>());
    } else if (n.is_array() && n.size() == 3) {
      for (std::size_t a = 0; a < 3; ++a) q.nodes[a] = static_cast<int>(unsigned_int(n[a], path + ".nodes"));
    } else {
      invalid(path + ".nodes", "expected an integer or [nx, ny, nz]");
    }
  }
  if (j.contains("half_width")) q.half_width = real(j["half_width"], path + ".half_width");
  if (j.contains("scheme") && j["scheme"] != "composite-gauss-legendre") {
    invalid(path + ".scheme", "only composite-gauss-legendre is supported");
  }
  try {
    q.validate();
  } catch (const Error& e) {
    invalid(path, e.what());
  }
  return q;
}

Json to_json(const WalkKernel& kernel) {
  if (const auto* p = std::get_if<PairTransfer>(&kernel)) return {{"type", "pair"}, {"h", p->h}};
  const auto& d = std::get<DirichletMix>(kernel);
  return {{"type", "dirichlet"}, {"gamma", d.gamma}, {"beta", d.beta}};
}

WalkKernel kernel_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) return parse_kernel(j.get<std::string>());
  const Json& type = field(j, "type", path);
  WalkKernel k;
  if (type == "pair") {
    k = PairTransfer{real(field(j, "h", path), path + ".h")};
  } else if (type == "dirichlet") {
    k = DirichletMix{real(field(j, "gamma", path), path + ".gamma"), real(field(j, "beta", path), path + ".beta")};
  } else {
    invalid(path + ".type", "expected \"pair\" or \"dirichlet\"");
  }
  try {
    validate(k);
  } catch (const Error& e) {
    invalid(path, e.what());
  }
  return k;
}

Json to_json(const Dims& dims) { return {{"m", dims.m()}, {"d", dims.d()}}; }

Dims dims_from_json(const Json& j, const std::string& path) {
  const std::size_t m = unsigned_int(field(j, "m", path), path + ".m");
  const Json& d = field(j, "d", path);
  if (!d.is_array()) invalid(path + ".d", "expected an array");
  std::vector<std::size_t> dv;
  for (std::size_t i = 0; i < d.size(); ++i) dv.push_back(unsigned_int(d[i], path + ".d[" + std::to_string(i) + "]"));
  try {
    return Dims(m, std::move(dv));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

Json matrix_to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return out;
}

CMatrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& path) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows * cols)) {
    invalid(path, "expected " + std::to_string(rows * cols) + " [re, im] entries");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto k = static_cast<std::size_t>(r * cols + c);
      m(r, c) = complex_pair(j[k], path + "[" + std::to_string(k) + "]");
    }
  }
  return m;
}

Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

CVector vector_from_json(const Json& j, Eigen::Index size, const std::string& path) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(size)) {
    invalid(path, "expected " + std::to_string(size) + " [re, im] entries");
  }
  CVector v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v(i) = complex_pair(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Json to_json(const BlockHamiltonian& h) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < h.dims().sectors(); ++i) blocks.push_back(matrix_to_json(h.apparatus_block(i)));
  return {{"dims", to_json(h.dims())}, {"apparatus_blocks", blocks}};
}

BlockHamiltonian block_hamiltonian_from_json(const Json& j, const std::string& path) {
  const Dims dims = dims_from_json(field(j, "dims", path), path + ".dims");
  const Json& blocks = field(j, "apparatus_blocks", path);
  if (!blocks.is_array() || blocks.size() != dims.sectors()) {
    invalid(path + ".apparatus_blocks", "expected one block per sector");
  }
  std::vector<CMatrix> mats;
  const auto m = static_cast<Eigen::Index>(dims.m());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    mats.push_back(matrix_from_json(blocks[i], m, m, path + ".apparatus_blocks[" + std::to_string(i) + "]"));
  }
  return assemble(dims, std::move(mats));
}

CMatrix operator_from_json(const Json& j, const Dims& dims, const std::string& path) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  if (j.is_object() && j.contains("matrix")) return matrix_from_json(j["matrix"], n, n, path + ".matrix");
  const BlockHamiltonian h = block_hamiltonian_from_json(j, path);
  if (!(h.dims() == dims)) throw Error(ErrorKind::DimensionMismatch, path + ": dims differ from the requested dims");
  return h.full();
}

Json to_json(const JointState& s) { return {{"dims", to_json(s.dims())}, {"v", vector_to_json(s.vec())}}; }

JointState joint_state_from_json(const Json& j, const std::string& path) {
  Dims dims = dims_from_json(field(j, "dims", path), path + ".dims");
  CVector v = vector_from_json(field(j, "v", path), static_cast<Eigen::Index>(dims.size()), path + ".v");
  return JointState::normalized(std::move(dims), std::move(v));
}

Json to_json(const SimplexPoint& a) { return a.vec(); }

Json to_json(const WalkRun& run) {
  Json path = Json::array();
  for (const auto& [step_no, point] : run.path) path.push_back({{"step", step_no}, {"a", point.vec()}});
  Json out = {{"seed", run.seed},
              {"start", run.start.vec()},
              {"steps_taken", run.steps_taken},
              {"final", run.final_point.vec()},
              {"absorbed_at", run.absorbed_at ? Json(*run.absorbed_at) : Json(nullptr)}};
  if (!run.path.empty()) out["path"] = path;
  return out;
}

Json to_json(const EnsembleResult& r) {
  Json out = {{"start", r.start.vec()},
              {"count", r.count},
              {"counts", r.counts},
              {"freq", r.freq},
              {"unabsorbed", r.unabsorbed},
              {"total_steps", r.total_steps},
              {"chi2", r.chi2 ? Json(*r.chi2) : Json(nullptr)},
              {"p", r.p_value ? Json(*r.p_value) : Json(nullptr)},
              {"master_seed", r.master_seed}};
  if (!r.chi2_skipped.empty()) out["chi2_skipped"] = r.chi2_skipped;
  return out;
}

Json oracle_to_json(const std::vector<double>& start, const std::vector<double>& absorption, std::uint32_t M) {
  return {{"start", start}, {"absorption", absorption}, {"M", M}};
}

std::string weights_csv(const SimplexPoint& a) {
  std::string out = "region_index,weight\n";
  for (std::size_t i = 0; i < a.size(); ++i) out += std::to_string(i + 1) + "," + format_real(a[i]) + "\n";
  return out;
}

namespace {
std::string header(const char* first, std::size_t n) {
  std::string h = first;
  for (std::size_t i = 1; i <= n; ++i) h += ",a_" + std::to_string(i);
  return h + "\n";
}
}  // namespace

std::string path_csv(const WalkRun& run) {
  std::string out = header("step", run.start.size());
  for (const auto& [step_no, point] : run.path) {
    out += std::to_string(step_no);
    for (double v : point.coords()) out += "," + format_real(v);
    out += "\n";
  }
  return out;
}

std::string trajectory_csv(const std::vector<double>& times, const std::vector<SimplexPoint>& points) {
  std::string out = header("t", points.empty() ? 0 : points.front().size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    out += format_real(times.at(k));
    for (double v : points[k].coords()) out += "," + format_real(v);
    out += "\n";
  }
  return out;
}

Json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot open " + file.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, file.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& file, std::string_view text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigInvalid, "cannot write " + file.string());
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::ConfigInvalid, "sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

}  // namespace bornwalk
