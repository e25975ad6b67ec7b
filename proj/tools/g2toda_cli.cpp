#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "g2toda/assembly.hpp"
#include "g2toda/checks.hpp"
#include "g2toda/corrections.hpp"
#include "g2toda/errors.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/profiles.hpp"
#include "g2toda/toda.hpp"

using namespace g2toda;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string suite = "all";
  int N1 = -1, N2 = -1;
  std::string N;
  int mu1 = -1, mu2 = -1;
  double lambda4 = NAN, lambda5 = NAN;
  std::string lambda_tilde;
  double xi1 = 0.0, xi2 = 0.0;
  std::string eps = "0.02";
  std::string vortices;
  double grid_rmax = 1e3;
  int grid_nodes = 2401;
  int modes = 0;
  int jobs = 0;
  std::string out = "g2toda_out";
  double tol_toda = 1e-8, tol_kernel = 1e-6, tol_phi = 1e-8, tol_duality = 1e-6, tol_closed = 1e-6, tol_det = 1e-10,
         tol_gamma = 0.10, tol_linear = 0.15;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot read number '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw ConfigError("cannot read number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list '" + s + "'");
  return out;
}

// "1..5" or "1,2,3"
std::vector<int> parse_int_range(const std::string& s) {
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
    if (b < a) throw ConfigError("empty range " + s);
    for (int i = a; i <= b; ++i) out.push_back(i);
    return out;
  }
  for (double v : parse_list(s)) {
    if (v != std::floor(v)) throw ConfigError("N must be an integer");
    out.push_back(int(v));
  }
  return out;
}

int line_of(const std::string& text, size_t offset) {
  int line = 1;
  for (size_t i = 0; i < std::min(offset, text.size()); ++i) line += text[i] == '\n';
  return line;
}

// byte offset of the idx-th element of the array under "key"
size_t element_offset(const std::string& text, const std::string& key, size_t idx) {
  size_t pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  pos = text.find('[', pos);
  if (pos == std::string::npos) return 0;
  int depth = 0;
  size_t count = 0;
  for (size_t i = pos; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '[' || c == '{') {
      if (depth == 1 && count++ == idx) return i;
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) return i;
    } else if (depth == 1 && c != ',' && !std::isspace(static_cast<unsigned char>(c))) {
      if (count++ == idx) return i;
      while (i + 1 < text.size() && text[i + 1] != ',' && text[i + 1] != ']') ++i;
    }
  }
  return pos;
}

VortexConfig read_vortices(const std::string& path, double eps) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vortex file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ":" + std::to_string(line_of(text, e.byte)) + ": malformed JSON");
  }
  if (!j.is_object()) throw ConfigError(path + ":1: expected an object with keys p and q");
  VortexConfig cfg;
  cfg.eps = eps;
  for (const char* key : {"p", "q"}) {
    if (!j.contains(key)) throw ConfigError(path + ":1: missing key \"" + std::string(key) + "\"");
    const json& arr = j[key];
    if (!arr.is_array())
      throw ConfigError(path + ":" + std::to_string(line_of(text, element_offset(text, key, 0))) + ": \"" + key +
                        "\" must be an array of [x, y] pairs");
    for (size_t i = 0; i < arr.size(); ++i) {
      const json& pt = arr[i];
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
        throw ConfigError(path + ":" + std::to_string(line_of(text, element_offset(text, key, i))) + ": entry " +
                          std::to_string(i) + " of \"" + key + "\" is not a pair of numbers");
      (key[0] == 'p' ? cfg.p : cfg.q).push_back(cplx(pt[0].get<double>(), pt[1].get<double>()));
    }
  }
  return cfg;
}

json to_json(const Record& r) {
  json in = json::object();
  for (const auto& [k, v] : r.inputs) in[k] = v;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"name", r.name}, {"inputs", in}, {"measured", num(r.measured)}, {"expected", num(r.expected)},
              {"tolerance", num(r.tolerance)}, {"pass", r.pass}};
}

void write_report(const RunConfig& rc, const std::string& stem, const std::vector<Record>& rs,
                  const std::vector<std::string>& extra_notes = {}) {
  fs::create_directories(rc.out);
  json arr = json::array();
  for (const auto& r : rs) arr.push_back(to_json(r));
  std::ofstream(fs::path(rc.out) / (stem + ".json")) << arr.dump(2) << "\n";
  std::ofstream notes(fs::path(rc.out) / (stem + "_notes.txt"));
  for (const auto& n : extra_notes) notes << n << "\n";
  for (const auto& r : rs)
    if (!r.note.empty()) notes << r.name << ": " << r.note << "\n";
  int ok = 0;
  for (const auto& r : rs) {
    ok += r.pass;
    if (!r.pass) {
      std::printf("FAIL %s", r.name.c_str());
      for (const auto& [k, v] : r.inputs) std::printf(" %s=%g", k.c_str(), v);
      std::printf(" measured=%.6g tolerance=%.3g %s\n", r.measured, r.tolerance, r.note.c_str());
    }
  }
  std::printf("%d/%zu records pass, report %s\n", ok, rs.size(), (fs::path(rc.out) / (stem + ".json")).c_str());
}

bool have_params(const RunConfig& rc) { return rc.N1 >= 0 || rc.mu1 >= 0; }

TodaParams params_from(const RunConfig& rc) {
  int N1 = rc.N1, N2 = rc.N2;
  if (rc.mu1 >= 0 || rc.mu2 >= 0) {
    if (rc.mu1 < 1 || rc.mu2 < 1) throw ConfigError("--mu1 and --mu2 must both be at least 1");
    N1 = rc.mu1 - 1;
    N2 = rc.mu2 - 1;
  }
  if (N1 < 0 || N2 < 0) throw ConfigError("give --N1 and --N2 (or --mu1 and --mu2)");
  TodaParams p{N1, N2, 1.0, 1.0};
  if (!rc.lambda_tilde.empty()) {
    p = TodaParams::scaled(N1, N2, parse_list(rc.lambda_tilde).front());
  } else if (N1 == N2 && std::isnan(rc.lambda4) && std::isnan(rc.lambda5) && N1 >= 1) {
    p = TodaParams::symmetric(N1);
  }
  if (!std::isnan(rc.lambda4)) p.lambda4 = rc.lambda4;
  if (!std::isnan(rc.lambda5)) p.lambda5 = rc.lambda5;
  p.validate();
  return p;
}

std::vector<int> N_list(const RunConfig& rc) { return rc.N.empty() ? std::vector<int>{1, 2, 3, 4, 5} : parse_int_range(rc.N); }

int cmd_verify(const RunConfig& rc) {
  const std::string s = rc.suite;
  const bool all = s == "all";
  if (!all && s != "toda" && s != "kernels" && s != "corrections" && s != "reduced" && s != "gamma" &&
      s != "determinants" && s != "linearization" && s != "assembly")
    throw ConfigError("unknown suite " + s);
  std::vector<Record> rs;
  auto add = [&](std::vector<Record> r) { rs.insert(rs.end(), r.begin(), r.end()); };
  const std::vector<TodaParams> ps = have_params(rc) ? std::vector<TodaParams>{params_from(rc)} : standard_params();
  if (all || s == "toda") add(suite_toda(ps, rc.tol_toda));
  if (all || s == "kernels") add(suite_kernels(ps, rc.tol_kernel));
  if (all || s == "corrections") {
    add(suite_phi(N_list(rc), rc.tol_phi));
    add(suite_duality(N_list(rc), rc.tol_duality));
  }
  if (all || s == "reduced") add(suite_closed_forms(N_list(rc), rc.tol_closed));
  if (all || s == "determinants" || s == "reduced") {
    std::vector<TodaParams> gp = ps;
    if (s == "reduced") gp.clear();
    add(suite_determinants(gp, N_list(rc), rc.tol_det));
  }
  if (all || s == "gamma") {
    std::vector<std::pair<int, int>> mus = {{1, 1}, {1, 2}, {2, 1}};
    if (rc.mu1 >= 1 && rc.mu2 >= 1) mus = {{rc.mu1, rc.mu2}};
    const std::vector<double> lt = rc.lambda_tilde.empty() ? std::vector<double>{1e2, 1e3, 1e4} : parse_list(rc.lambda_tilde);
    for (auto [a, b] : mus) add(suite_gamma(a, b, lt, rc.tol_gamma));
  }
  if (all || s == "linearization") add(suite_linearization(1, 1e-2, 1e-3, rc.tol_linear));
  if (all || s == "assembly") add(suite_assembly(1, {0.04, 0.02, 0.01}));
  std::vector<std::string> notes;
  for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{{"tol-toda", rc.tol_toda},
                                                                        {"tol-kernel", rc.tol_kernel},
                                                                        {"tol-phi", rc.tol_phi},
                                                                        {"tol-duality", rc.tol_duality},
                                                                        {"tol-closed", rc.tol_closed},
                                                                        {"tol-det", rc.tol_det},
                                                                        {"tol-gamma", rc.tol_gamma},
                                                                        {"tol-linear", rc.tol_linear}})
    notes.push_back(k + " = " + std::to_string(v));
  write_report(rc, "verify_" + s, rs, notes);
  return all_pass(rs) ? 0 : 1;
}

void write_csv_header(std::ofstream& f, const std::vector<std::string>& cols) {
  for (size_t i = 0; i < cols.size(); ++i) f << (i ? "," : "") << cols[i];
  f << "\n";
}

void write_csv_row(std::ofstream& f, const std::vector<double>& v) {
  char buf[40];
  for (size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    f << (i ? "," : "") << buf;
  }
  f << "\n";
}

int cmd_assemble(const RunConfig& rc) {
  if (rc.vortices.empty()) throw ConfigError("assemble needs --vortices <file>");
  const std::vector<double> eps = parse_list(rc.eps);
  VortexConfig base = read_vortices(rc.vortices, eps.front());
  RunConfig r2 = rc;
  if (r2.N1 < 0 && r2.mu1 < 0) {
    r2.N1 = int(base.p.size());
    r2.N2 = int(base.q.size());
  }
  const TodaParams p = params_from(r2);
  AssemblyOptions opt;
  opt.modes = rc.modes;
  opt.r_max = rc.grid_rmax;
  opt.nodes = rc.grid_nodes;
  opt.xi1 = rc.xi1;
  opt.xi2 = rc.xi2;
  std::vector<Record> rs;
  std::vector<std::string> notes;
  std::vector<double> res;
  fs::create_directories(rc.out);
  for (double e : eps) {
    VortexConfig cfg = base;
    cfg.eps = e;
    ApproxSolution sol;
    const AssemblyReport rep = run_assembly(p, cfg, opt, &sol);
    const std::map<std::string, double> in{{"N1", p.N1}, {"N2", p.N2}, {"lambda4", p.lambda4}, {"lambda5", p.lambda5}, {"eps", e}};
    notes.push_back("eps " + std::to_string(e) + ": regime " + regime_name(rep.regime));
    for (const auto& n : rep.notes) notes.push_back("eps " + std::to_string(e) + ": " + n);
    res.push_back(rep.residual_norm);
    rs.push_back(Record{"residual_norm_starstar", in, rep.residual_norm, 0.0, 0.0, std::isfinite(rep.residual_norm),
                        "excluded nodes " + std::to_string(rep.excluded)});
    rs.push_back(Record{"reduced_a_norm", in, rep.a_norm, 0.0, 10 * e, rep.a_norm <= 10 * e, ""});
    rs.push_back(Record{"projected_v_norm_star", in, rep.projected_converged ? rep.v_norm_star : NAN, 0.0, 10 * e,
                        rep.projected_converged && rep.v_norm_star <= 10 * e, rep.projected_error});
    rs.push_back(Record{"decay_alpha1", in, rep.decay.alpha1, 1.0, 0.0, rep.decay.alpha1 > 1 && rep.decay.monotone, ""});
    rs.push_back(Record{"decay_alpha2", in, rep.decay.alpha2, 1.0, 0.0, rep.decay.alpha2 > 1 && rep.decay.monotone, ""});

    char stem[64];
    std::snprintf(stem, sizeof stem, "eps_%g", e);
    std::ofstream prof(fs::path(rc.out) / (std::string("profile_") + stem + ".csv"));
    write_csv_header(prof, {"r", "V1_mean", "V2_mean", "E1_mean", "E2_mean"});
    const ResidualReport rr = residual_scaled(sol);
    const int n = sol.grid.n_theta;
    for (int k = 0; k < sol.grid.radial.size(); ++k)
      write_csv_row(prof, {sol.grid.radial.r(k), sol.V.c[0].row(k).sum() / n, sol.V.c[1].row(k).sum() / n,
                           rr.E.c[0].row(k).sum() / n, rr.E.c[1].row(k).sum() / n});
    std::ofstream map(fs::path(rc.out) / (std::string("residual_") + stem + ".csv"));
    write_csv_header(map, {"r", "theta", "E1", "E2"});
    for (int k = 0; k < sol.grid.radial.size(); k += 8)
      for (int j = 0; j < n; ++j)
        write_csv_row(map, {sol.grid.radial.r(k), sol.grid.theta(j), rr.E.c[0](k, j), rr.E.c[1](k, j)});
  }
  for (size_t i = 1; i < res.size(); ++i) {
    const double expect = (eps[i - 1] / eps[i]) * (eps[i - 1] / eps[i]);
    const double ratio = res[i - 1] / res[i];
    rs.push_back(Record{"residual_ratio", {{"eps_coarse", eps[i - 1]}, {"eps_fine", eps[i]}}, ratio, expect,
                        0.2 * expect, std::abs(ratio - expect) <= 0.2 * expect, ""});
  }
  write_report(rc, "assemble", rs, notes);
  return all_pass(rs) ? 0 : 1;
}

int cmd_profiles(const RunConfig& rc) {
  const TodaParams p = params_from(rc);
  fs::create_directories(rc.out);
  char stem[96];
  std::snprintf(stem, sizeof stem, "profiles_N1_%d_N2_%d.csv", p.N1, p.N2);
  const fs::path path = fs::path(rc.out) / stem;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  const bool sym = p.N1 == p.N2 && p.N1 >= 1;
  std::vector<std::string> cols = {"r", "U1", "U2"};
  for (int i = 0; i < kNumKernels; ++i) {
    cols.push_back(kernel_name(kernel_tag(i)) + "_z1");
    cols.push_back(kernel_name(kernel_tag(i)) + "_z2");
  }
  if (sym) {
    cols.push_back("psi");
    for (int i = 1; i <= 7; ++i) cols.push_back("q" + std::to_string(i));
    for (int i = 1; i <= 7; ++i) cols.push_back("phi" + std::to_string(i));
  }
  write_csv_header(f, cols);
  const auto L = make_lambdas<long double>(p);
  const GroundState<long double> g(p);
  const RadialGrid grid(1e-3, rc.grid_rmax, rc.grid_nodes);
  for (int k = 0; k < grid.size(); ++k) {
    const double r = grid.r(k);
    std::vector<double> row = {r, double(g.U1(r)), double(g.U2(r))};
    for (int i = 0; i < kNumKernels; ++i) {
      const auto z = radial_kernel(L, g, kernel_shape(kernel_tag(i)), r);
      row.push_back(z.z1);
      row.push_back(z.z2);
    }
    if (sym) {
      row.push_back(psi_symmetric(p.N1, r));
      for (int i = 1; i <= 7; ++i) row.push_back(q_eval(p.N1, i, r));
      for (int i = 1; i <= 7; ++i) row.push_back(phi_eval(p.N1, i, r));
    }
    write_csv_row(f, row);
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"G2 Toda vortex construction: verification suites, assembly and profile tables"};
  app.require_subcommand(1);
  RunConfig rc;
  auto common = [&](CLI::App* c) {
    c->add_option("--N1", rc.N1, "vortex count of the first species");
    c->add_option("--N2", rc.N2, "vortex count of the second species");
    c->add_option("--N", rc.N, "symmetric index range such as 1..5 or 1,3");
    c->add_option("--mu1", rc.mu1, "mu1 = N1 + 1");
    c->add_option("--mu2", rc.mu2, "mu2 = N2 + 1");
    c->add_option("--lambda4", rc.lambda4);
    c->add_option("--lambda5", rc.lambda5);
    c->add_option("--lambda-tilde", rc.lambda_tilde, "comma separated list");
    c->add_option("--xi1", rc.xi1);
    c->add_option("--xi2", rc.xi2);
    c->add_option("--eps", rc.eps, "comma separated list");
    c->add_option("--vortices", rc.vortices, "JSON file {\"p\": [[x,y],...], \"q\": [[x,y],...]}");
    c->add_option("--grid-rmax", rc.grid_rmax);
    c->add_option("--grid-nodes", rc.grid_nodes);
    c->add_option("--modes", rc.modes, "angular modes kept by the assembly grid");
    c->add_option("--tol-toda", rc.tol_toda);
    c->add_option("--tol-kernel", rc.tol_kernel);
    c->add_option("--tol-phi", rc.tol_phi);
    c->add_option("--tol-duality", rc.tol_duality);
    c->add_option("--tol-closed", rc.tol_closed);
    c->add_option("--tol-det", rc.tol_det);
    c->add_option("--tol-gamma", rc.tol_gamma);
    c->add_option("--tol-linear", rc.tol_linear);
    c->add_option("--jobs", rc.jobs, "OpenMP threads, 0 keeps the runtime default");
    c->add_option("--out", rc.out, "output directory");
  };
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", rc.suite, "toda|kernels|corrections|reduced|gamma|determinants|linearization|assembly|all");
  common(verify);
  auto* assemble = app.add_subcommand("assemble", "assemble the approximate solution for a vortex file");
  common(assemble);
  auto* profiles = app.add_subcommand("profiles", "write radial profile tables");
  common(profiles);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (rc.jobs > 0) omp_set_num_threads(rc.jobs);
  try {
    if (*verify) return cmd_verify(rc);
    if (*assemble) return cmd_assemble(rc);
    if (*profiles) return cmd_profiles(rc);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
