#include "magweyl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace magweyl {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + "/" + key, "missing");
  return *it;
}

double real_of(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "not finite");
  return v;
}

long long int_of(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected an integer");
  return j.get<long long>();
}

const json& array_of(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  return j;
}

std::vector<int> ints_of(const json& j, std::size_t len, const std::string& where) {
  array_of(j, where);
  if (j.size() != len) fail(where, "expected " + std::to_string(len) + " entries");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(static_cast<int>(int_of(j[i], where + "/" + std::to_string(i))));
  return out;
}

Vec reals_of(const json& j, std::size_t len, const std::string& where) {
  array_of(j, where);
  if (j.size() != len) fail(where, "expected " + std::to_string(len) + " entries");
  Vec out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(real_of(j[i], where + "/" + std::to_string(i)));
  return out;
}

cplx complex_of(const json& j, const std::string& where) {
  double re = j.contains("re") ? real_of(j["re"], where + "/re") : 0.0;
  double im = j.contains("im") ? real_of(j["im"], where + "/im") : 0.0;
  return {re, im};
}

json modes_json(const HullFunction& f) {
  json arr = json::array();
  for (const auto& [m, c] : f.modes()) arr.push_back({{"m", m}, {"re", c.real()}, {"im", c.imag()}});
  return arr;
}

HullFunction modes_from(const json& arr, int d, const std::string& where) {
  array_of(arr, where);
  HullFunction f(d);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + "/" + std::to_string(i);
    Mode m = ints_of(need(arr[i], "m", w), d, w + "/m");
    f.add(m, complex_of(arr[i], w));
  }
  return f;
}

const char* realization_name(Realization r) { return r == Realization::X ? "X" : "XStar"; }

Realization realization_of(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected \"X\" or \"XStar\"");
  auto s = j.get<std::string>();
  if (s == "X") return Realization::X;
  if (s == "XStar") return Realization::XStar;
  fail(where, "expected \"X\" or \"XStar\"");
}

json grid_header(const GridSpec& g) {
  return {{"L", g.L}, {"N", g.N}, {"n", g.n}, {"realization", realization_name(g.tag)}};
}

void write_payload(std::ofstream& out, const cplx* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(cplx)));
}

}  // namespace

json to_json(const HullModel& model) {
  json F = json::array();
  for (int r = 0; r < model.F.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < model.F.cols(); ++c) row.push_back(model.F(r, c));
    F.push_back(row);
  }
  return {{"d", model.d}, {"n", model.n}, {"F", F}};
}

json to_json(const HullFunction& f) { return {{"modes", modes_json(f)}}; }

json to_json(const MagneticField& B) {
  json comps = json::array();
  for (int j = 0; j < B.n(); ++j)
    for (int k = j + 1; k < B.n(); ++k)
      if (!B(j, k).empty()) comps.push_back({{"j", j}, {"k", k}, {"modes", modes_json(B(j, k))}});
  return {{"components", comps}};
}

json to_json(const AtomSum& a) {
  json atoms = json::array();
  for (const auto& at : a.atoms) {
    json poly = json::array();
    for (const auto& [mi, c] : at.poly.terms()) poly.push_back({{"a", mi}, {"re", c.real()}, {"im", c.imag()}});
    atoms.push_back({{"hull", to_json(at.hull)},
                     {"poly", poly},
                     {"gamma", at.gamma},
                     {"center", at.center},
                     {"momentum", at.momentum}});
  }
  return {{"atoms", atoms}};
}

json to_json(const GridSpec& g) { return {{"L", g.L}, {"N", g.N}}; }

HullModel model_from_json(const json& j, const std::string& where) {
  const int d = static_cast<int>(int_of(need(j, "d", where), where + "/d"));
  const int n = static_cast<int>(int_of(need(j, "n", where), where + "/n"));
  if (d < 1 || n < 1 || n > 3) fail(where, "need d >= 1 and 1 <= n <= 3");
  const json& F = array_of(need(j, "F", where), where + "/F");
  if (static_cast<int>(F.size()) != d) fail(where + "/F", "expected d rows");
  Eigen::MatrixXd M(d, n);
  for (int r = 0; r < d; ++r) {
    Vec row = reals_of(F[r], n, where + "/F/" + std::to_string(r));
    for (int c = 0; c < n; ++c) M(r, c) = row[c];
  }
  return HullModel(d, n, M);
}

HullFunction hull_from_json(const json& j, int d, const std::string& where) {
  return modes_from(need(j, "modes", where), d, where + "/modes");
}

MagneticField field_from_json(const json& j, const HullModel& model, const std::string& where) {
  const json& comps = array_of(need(j, "components", where), where + "/components");
  std::vector<MagneticField::Component> upper;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string w = where + "/components/" + std::to_string(i);
    int a = static_cast<int>(int_of(need(comps[i], "j", w), w + "/j"));
    int b = static_cast<int>(int_of(need(comps[i], "k", w), w + "/k"));
    if (a < 0 || b >= model.n || a >= b) fail(w, "need 0 <= j < k < n");
    upper.push_back({a, b, modes_from(need(comps[i], "modes", w), model.d, w + "/modes")});
  }
  return MagneticField(model, upper);
}

AtomSum atoms_from_json(const json& j, int n, int d, const std::string& where) {
  const json& arr = array_of(need(j, "atoms", where), where + "/atoms");
  AtomSum sum(n, d);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + "/atoms/" + std::to_string(i);
    const json& a = arr[i];
    Atom at;
    at.hull = hull_from_json(need(a, "hull", w), d, w + "/hull");
    if (a.contains("poly")) {
      const json& p = array_of(a["poly"], w + "/poly");
      at.poly = Polynomial(n);
      for (std::size_t t = 0; t < p.size(); ++t) {
        const std::string wt = w + "/poly/" + std::to_string(t);
        at.poly.add(ints_of(need(p[t], "a", wt), n, wt + "/a"), complex_of(p[t], wt));
      }
    } else {
      at.poly = Polynomial::one(n);
    }
    at.gamma = real_of(need(a, "gamma", w), w + "/gamma");
    if (!(at.gamma > 0)) fail(w + "/gamma", "must be positive");
    at.center = a.contains("center") ? reals_of(a["center"], n, w + "/center") : Vec(n, 0.0);
    at.momentum = a.contains("momentum") ? reals_of(a["momentum"], n, w + "/momentum") : Vec(n, 0.0);
    sum.atoms.push_back(std::move(at));
  }
  return sum;
}

GridSpec grid_from_json(const json& j, int n, const std::string& where) {
  double L = real_of(need(j, "L", where), where + "/L");
  long long N = int_of(need(j, "N", where), where + "/N");
  if (!(L > 0)) fail(where + "/L", "must be positive");
  if (N < 4 || (N & (N - 1)) != 0) fail(where + "/N", "must be a power of two >= 4");
  return GridSpec(L, static_cast<int>(N), n);
}

GridSpec RunConfig::space_grid() const {
  if (grid) return *grid;
  AtomSum all(model.n, model.d);
  double sampled_L = 0;
  for (const auto& [name, e] : symbols) {
    if (e.symbol.is_atoms() && e.symbol.realization() == Realization::X) all = all + e.symbol.atoms();
    if (!e.symbol.is_atoms()) sampled_L = std::max(sampled_L, e.symbol.sampled().grid.L);
  }
  if (all.atoms.empty()) return GridSpec(sampled_L > 0 ? sampled_L : 8.0, 16, model.n);
  GridSpec g = default_grid(all);
  return GridSpec(g.L, 16, model.n);
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("", "top level must be an object");
  RunConfig c;
  c.model = model_from_json(need(j, "model", ""));
  c.field = j.contains("field") ? field_from_json(j["field"], c.model) : MagneticField::zero(c.model);
  if (j.contains("symbols")) {
    const json& syms = j["symbols"];
    if (!syms.is_object()) fail("/symbols", "expected an object");
    for (const auto& [name, desc] : syms.items()) {
      const std::string w = "/symbols/" + name;
      SymbolEntry e;
      if (desc.contains("sampled")) {
        if (!desc["sampled"].is_string()) fail(w + "/sampled", "expected a path");
        e.sampled_path = desc["sampled"].get<std::string>();
        try {
          e.symbol = Symbol(read_sampled(e.sampled_path));
        } catch (const std::exception& ex) {
          fail(w + "/sampled", ex.what());
        }
      } else {
        Realization r = desc.contains("realization") ? realization_of(desc["realization"], w + "/realization")
                                                     : Realization::X;
        e.symbol = Symbol(atoms_from_json(desc, c.model.n, c.model.d, w), r);
      }
      c.symbols.emplace(name, std::move(e));
    }
  }
  if (j.contains("grid")) c.grid = grid_from_json(j["grid"], c.model.n);
  if (j.contains("omega_grid")) {
    const json& w = j["omega_grid"];
    if (w.is_array()) {
      c.omega_grid = ints_of(w, c.model.d, "/omega_grid");
    } else {
      c.omega_grid.assign(c.model.d, static_cast<int>(int_of(w, "/omega_grid")));
    }
    for (int v : c.omega_grid)
      if (v < 1) fail("/omega_grid", "entries must be positive");
  } else {
    c.omega_grid.assign(c.model.d, 16);
  }
  if (j.contains("hbar_list")) {
    const json& h = array_of(j["hbar_list"], "/hbar_list");
    c.hbar_list.clear();
    for (std::size_t i = 0; i < h.size(); ++i) {
      double v = real_of(h[i], "/hbar_list/" + std::to_string(i));
      if (!(v > 0.0) || v > 1.0) fail("/hbar_list/" + std::to_string(i), "hbar must lie in (0, 1]");
      if (i > 0 && v >= c.hbar_list.back()) fail("/hbar_list/" + std::to_string(i), "hbar values must decrease strictly");
      c.hbar_list.push_back(v);
    }
    if (c.hbar_list.empty()) fail("/hbar_list", "empty");
  }
  if (j.contains("pair")) {
    const json& p = array_of(j["pair"], "/pair");
    if (p.size() != 2) fail("/pair", "expected two symbol names");
    for (std::size_t i = 0; i < 2; ++i) {
      if (!p[i].is_string()) fail("/pair/" + std::to_string(i), "expected a symbol name");
      c.pair.push_back(p[i].get<std::string>());
    }
  } else {
    for (const auto& [name, e] : c.symbols)
      if (c.pair.size() < 2) c.pair.push_back(name);
  }
  for (std::size_t i = 0; i < c.pair.size(); ++i)
    if (!c.symbols.count(c.pair[i])) fail("/pair/" + std::to_string(i), "unknown symbol " + c.pair[i]);
  if (j.contains("seed")) {
    long long s = int_of(j["seed"], "/seed");
    if (s < 0) fail("/seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) fail("/output", "expected a path prefix");
    c.output = j["output"].get<std::string>();
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = to_json(c.model);
  j["field"] = to_json(c.field);
  json syms = json::object();
  for (const auto& [name, e] : c.symbols) {
    if (!e.sampled_path.empty()) {
      syms[name] = {{"sampled", e.sampled_path}};
    } else {
      json s = to_json(e.symbol.atoms());
      s["realization"] = realization_name(e.symbol.realization());
      syms[name] = s;
    }
  }
  j["symbols"] = syms;
  if (c.grid) j["grid"] = to_json(*c.grid);
  j["omega_grid"] = c.omega_grid;
  j["hbar_list"] = c.hbar_list;
  j["pair"] = c.pair;
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("output");
  return fnv1a(j.dump());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_sampled(const std::string& path, const Sampled& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  json header = {{"format", "magweyl-sampled"},
                 {"grid", grid_header(s.grid)},
                 {"omega", s.omega.shape},
                 {"tolerance", s.prov.tolerance},
                 {"warnings", s.prov.warnings}};
  out << header.dump() << '\n';
  write_payload(out, s.values.data(), s.values.size());
  if (!out) throw std::runtime_error("write failed: " + path);
}

Sampled read_sampled(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  json h = json::parse(line);
  if (h.value("format", "") != "magweyl-sampled") throw std::runtime_error(path + ": not a sampled tensor");
  const json& g = h["grid"];
  GridSpec grid(g["L"].get<double>(), g["N"].get<int>(), g["n"].get<int>(),
                g["realization"].get<std::string>() == "X" ? Realization::X : Realization::XStar);
  Sampled s(grid, OmegaGrid(h["omega"].get<std::vector<int>>()));
  s.prov.tolerance = h.value("tolerance", 0.0);
  s.prov.warnings = h.value("warnings", std::vector<std::string>{});
  in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(cplx)));
  if (!in) throw std::runtime_error(path + ": truncated payload");
  return s;
}

void write_matrix(const std::string& path, const Eigen::MatrixXcd& M, const json& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  json h = header;
  h["format"] = "magweyl-matrix";
  h["rows"] = M.rows();
  h["cols"] = M.cols();
  out << h.dump() << '\n';
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = M;
  write_payload(out, R.data(), static_cast<std::size_t>(R.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace magweyl
