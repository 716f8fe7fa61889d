#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "magweyl/audit.hpp"

using namespace magweyl;

namespace {

struct Flags {
  std::string config;
  bool strict = false;
  long long seed = -1;
  std::string out;
  double hbar = 0.0;
  int omega = 0;
  std::string symbols;
};

struct LoadError {
  std::string message;
};

RunConfig load(const Flags& f) {
  std::ifstream in(f.config);
  if (!in) throw LoadError{f.config + ": cannot open"};
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw LoadError{f.config + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what()};
  }
  RunConfig c;
  try {
    c = config_from_json(j);
  } catch (const ConfigError& e) {
    throw LoadError{f.config + ": " + e.what()};
  } catch (const std::exception& e) {
    throw LoadError{f.config + ": " + e.what()};
  }
  if (f.seed >= 0) c.seed = static_cast<std::uint64_t>(f.seed);
  if (!f.out.empty()) c.output = f.out;
  if (f.hbar != 0.0) {
    if (!(f.hbar > 0.0) || f.hbar > 1.0) throw LoadError{"--hbar must lie in (0, 1]"};
    c.hbar_list = {f.hbar};
  }
  if (!f.symbols.empty()) {
    auto comma = f.symbols.find(',');
    if (comma == std::string::npos) throw LoadError{"--symbol expects NAME,NAME"};
    c.pair = {f.symbols.substr(0, comma), f.symbols.substr(comma + 1)};
    for (const auto& name : c.pair)
      if (!c.symbols.count(name)) throw LoadError{"--symbol: unknown symbol " + name};
  }
  return c;
}

// Files written by one subcommand; removed again if the subcommand fails.
class Artifacts {
 public:
  Artifacts(const RunConfig& c, const std::string& cmd)
      : stem_(c.output + "_" + cmd + "_" + hash_hex(config_hash(c)).substr(0, 12)) {}
  ~Artifacts() {
    if (committed_) return;
    for (const auto& p : paths_) std::filesystem::remove(p);
  }
  std::string path(const std::string& suffix) {
    std::string p = stem_ + suffix;
    auto parent = std::filesystem::path(p).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    paths_.push_back(p);
    return p;
  }
  void text(const std::string& suffix, const std::string& content) {
    std::ofstream out(path(suffix), std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + stem_ + suffix);
  }
  void commit() {
    committed_ = true;
    for (const auto& p : paths_) std::cout << p << '\n';
  }

 private:
  std::string stem_;
  std::vector<std::string> paths_;
  bool committed_ = false;
};

HullPoint selected_omega(const RunConfig& c, int index) {
  OmegaGrid g = c.omega();
  if (index < 0 || static_cast<std::size_t>(index) >= g.size()) throw InputError("--omega index outside the omega grid");
  return g.point(static_cast<std::size_t>(index));
}

void require_pair(const RunConfig& c) {
  if (c.pair.size() != 2) throw InputError("this subcommand needs two symbols in the config");
}

int cmd_validate(const Flags& f) {
  RunConfig c = load(f);
  FieldValidation v = validate_field(c.field);
  StabilizerReport s = stabilizer_report(c.model);
  GridSpec g = c.space_grid();
  json report = {{"config_hash", hash_hex(config_hash(c))},
                 {"field",
                  {{"antisymmetric", v.antisymmetric},
                   {"real", v.real},
                   {"closed", v.closed},
                   {"closedness_defect", v.closedness_defect},
                   {"message", v.message}}},
                 {"stabilizer", {{"free", s.free}, {"continuous_dim", s.continuous_dim}, {"status", s.status}}},
                 {"symbols", json::array()},
                 {"grid", {{"L", g.L}, {"N", g.N}, {"n", g.n}}},
                 {"omega_grid", c.omega_grid},
                 {"hbar_list", c.hbar_list}};
  for (const auto& [name, e] : c.symbols) report["symbols"].push_back(name);
  std::cout << report.dump(2) << '\n';
  const bool defective = !v.antisymmetric || !v.real || !v.closed;
  return f.strict && defective ? 1 : 0;
}

int cmd_flux(const Flags& f) {
  RunConfig c = load(f);
  Artifacts art(c, "flux");
  const MagneticField& B = c.field;
  const int n = c.model.n, d = c.model.d;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> coord(-3.0, 3.0), angle(0.0, kTwoPi);
  auto vec = [&](int len) {
    Vec v(len);
    for (auto& x : v) x = coord(rng);
    return v;
  };
  std::ostringstream csv;
  csv << "kind,index,hbar,value,reference,defect\n";
  for (int t = 0; t < 20; ++t) {
    Vec a = vec(n), b = vec(n), cc = vec(n);
    HullPoint w{Vec(d)};
    for (auto& x : w.angles) x = angle(rng);
    double closed = triangle_flux(B, a, b, cc).evaluate(w).real();
    double oracle = triangle_flux_oracle(B, w, a, b, cc);
    csv << "triangle_flux," << t << ",nan," << format_real(closed) << ',' << format_real(oracle) << ','
        << format_real(std::fabs(closed - oracle)) << '\n';
  }
  OmegaGrid coarse = OmegaGrid::uniform(d, 8);
  for (double h : c.hbar_list)
    for (int t = 0; t < 10; ++t) {
      DefectReport r = cocycle_identity_defect(B, h, vec(n), vec(n), vec(n), coarse);
      csv << "cocycle_identity," << t << ',' << format_real(h) << ',' << format_real(r.defect) << ','
          << format_real(r.tolerance) << ',' << format_real(r.defect) << '\n';
    }
  art.text(".csv", csv.str());
  art.commit();
  return 0;
}

int cmd_compose(const Flags& f) {
  RunConfig c = load(f);
  require_pair(c);
  Artifacts art(c, "compose");
  const GridSpec g = c.space_grid();
  std::ostringstream csv;
  csv << "hbar,l1_norm,l1_upper,tolerance,file\n";
  for (std::size_t i = 0; i < c.hbar_list.size(); ++i) {
    const double h = c.hbar_list[i];
    Sampled p = compose_magnetic(c.field, h, c.first(), c.second(), g, c.omega());
    std::string file = art.path("_h" + std::to_string(i) + ".bin");
    write_sampled(file, p);
    L1Norm n = l1_norm(p);
    csv << format_real(h) << ',' << format_real(n.value) << ',' << format_real(n.upper) << ','
        << format_real(p.prov.tolerance) << ',' << std::filesystem::path(file).filename().string() << '\n';
  }
  art.text(".csv", csv.str());
  art.commit();
  return 0;
}

int cmd_expand(const Flags& f) {
  RunConfig c = load(f);
  require_pair(c);
  Artifacts art(c, "expand");
  const GridSpec g = c.space_grid();
  std::ostringstream csv;
  csv << "hbar,first_order_defect,remainder_norm,reliable\n";
  json records = json::array();
  for (double h : c.hbar_list) {
    ExpansionReport e = expansion_remainder(c.field, h, c.first(), c.second(), g, c.omega());
    csv << format_real(h) << ',' << format_real(e.first_order_norm) << ',' << format_real(e.remainder_norm) << ','
        << (e.reliable ? 1 : 0) << '\n';
    records.push_back({{"hbar", h},
                       {"leading_norm", e.leading_norm},
                       {"subleading_norm", e.subleading_norm},
                       {"remainder_norm", e.remainder_norm},
                       {"first_order_norm", e.first_order_norm},
                       {"second_order_norm", e.second_order_norm},
                       {"tolerance", e.tolerance},
                       {"reliable", e.reliable}});
  }
  art.text(".csv", csv.str());
  art.text(".json", records.dump(2) + "\n");
  art.commit();
  return 0;
}

int cmd_represent(const Flags& f) {
  RunConfig c = load(f);
  require_pair(c);
  Artifacts art(c, "represent");
  const GridSpec g = c.space_grid();
  const HullPoint w = selected_omega(c, f.omega);
  const Symbol& Phi = c.first();
  const Symbol& Psi = c.second();
  json records = json::array();
  std::ostringstream csv;
  csv << "name,hbar,defect,tolerance,pass\n";
  bool ok = true;
  auto record = [&](const std::string& name, double h, double defect, double tol) {
    const bool pass = defect <= tol;
    ok = ok && pass;
    records.push_back({{"name", name},
                       {"defect", defect},
                       {"tolerance", tol},
                       {"grid", {{"L", g.L}, {"N", g.N}, {"n", g.n}}},
                       {"hbar", h},
                       {"omega", w.angles}});
    csv << name << ',' << format_real(h) << ',' << format_real(defect) << ',' << format_real(tol) << ','
        << (pass ? 1 : 0) << '\n';
  };
  for (std::size_t i = 0; i < c.hbar_list.size(); ++i) {
    const double h = c.hbar_list[i];
    KernelMatrix K = rep_matrix(c.field, h, w, Phi, g);
    json header = {{"hbar", h}, {"omega", w.angles}, {"grid", {{"L", g.L}, {"N", g.N}, {"n", g.n}}}};
    write_matrix(art.path("_h" + std::to_string(i) + ".bin"), K.M, header);
    record("morphism", h, morphism_defect(c.field, h, w, Phi, Psi, g), 5e-3);
    CovarianceReport cov = covariance_check(c.field, h, w, g, 8, static_cast<unsigned>(c.seed));
    record("covariance_product", h, cov.product_defect, 1e-9);
    record("covariance_conjugation", h, cov.conjugation_defect, 1e-9);
    if (Phi.is_atoms()) {
      Symbol sym(fourier_atoms(Phi.atoms(), +1), Realization::XStar);
      KernelMatrix a = op_matrix(c.field, h, w, sym, g), b = op_matrix_direct(c.field, h, w, sym, g);
      double scale = a.M.cwiseAbs().maxCoeff();
      record("convention_lock", h, scale > 0 ? (a.M - b.M).cwiseAbs().maxCoeff() / scale : 0.0, 1e-8);
      Vec x(g.n, 0.0);
      x[0] = g.h();
      record("equivariance", h, equivariance_defect(c.field, h, w, x, sym, g), 5e-3);
    }
  }
  art.text(".csv", csv.str());
  art.text(".json", records.dump(2) + "\n");
  art.commit();
  return f.strict && !ok ? 1 : 0;
}

int cmd_audit(const Flags& f) {
  RunConfig c = load(f);
  Artifacts art(c, "audit");
  AuditReport r = audit_report(c);
  art.text(".json", r.document.dump(2) + "\n");
  art.text(".csv", r.csv());
  art.commit();
  return f.strict && !r.pass() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic pseudodifferential calculus on torus hulls"};
  app.require_subcommand(1);
  Flags flags;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Entry entries[] = {{"validate", "Check a configuration and its field", cmd_validate},
                           {"flux", "Flux and cocycle tables", cmd_flux},
                           {"compose", "Magnetic products per hbar", cmd_compose},
                           {"expand", "Expansion remainders per hbar", cmd_expand},
                           {"represent", "Kernel matrices and representation defects", cmd_represent},
                           {"audit", "Full audit report", cmd_audit}};
  int (*selected)(const Flags&) = nullptr;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", flags.config, "Configuration JSON")->required();
    sub->add_flag("--strict", flags.strict, "Nonzero exit on field defects or failed checks");
    sub->add_option("--seed", flags.seed, "Seed for randomized checks");
    sub->add_option("--out", flags.out, "Output path prefix");
    sub->add_option("--hbar", flags.hbar, "Run a single hbar value");
    sub->add_option("--omega", flags.omega, "Index of the hull point on the omega grid");
    sub->add_option("--symbol", flags.symbols, "Symbol pair NAME,NAME");
    sub->callback([&selected, run = e.run] { selected = run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return selected(flags);
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.message << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
