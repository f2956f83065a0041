#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <variant>

#include "ids.hpp"
#include "lattice_green.hpp"
#include "perron.hpp"
#include "secular.hpp"
#include "thermo.hpp"

namespace hop {

inline constexpr const char* toolkit_version = "1.0.0";

// ---------------------------------------------------------------------------
// Tabular results

using Cell = std::variant<std::monostate, bool, long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), "table row has the wrong number of cells");
    rows.push_back(std::move(row));
  }
};

inline Cell cell(const Ext& e) { return e.is_infinite() ? Cell(std::string("inf")) : Cell(e.value()); }

// Shortest round-trip text for doubles.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string format_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline void write_csv(std::ostream& out, const Table& t, const std::string& spec_hash) {
  out << "# hop-toolkit " << toolkit_version << " spec=" << spec_hash << '\n';
  for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << csv_quote(t.columns[j]);
  out << '\n';
  for (auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_quote(format_cell(row[j]));
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Study specification

enum class StudyKind { table, norms, green, ids_shift, dims, rho_c, schedule_convergence, density_limit, fixed_density };

inline const std::vector<std::pair<std::string, StudyKind>>& study_names() {
  static const std::vector<std::pair<std::string, StudyKind>> names = {
      {"table", StudyKind::table},
      {"norms", StudyKind::norms},
      {"green", StudyKind::green},
      {"ids-shift", StudyKind::ids_shift},
      {"dims", StudyKind::dims},
      {"rho-c", StudyKind::rho_c},
      {"schedule-convergence", StudyKind::schedule_convergence},
      {"density-limit", StudyKind::density_limit},
      {"fixed-density", StudyKind::fixed_density},
  };
  return names;
}

inline StudyKind parse_study(const std::string& s) {
  for (auto& [name, k] : study_names())
    if (name == s) return k;
  throw PreconditionError("unknown study '" + s + "'");
}

inline std::string to_string(StudyKind k) {
  for (auto& [name, kk] : study_names())
    if (kk == k) return name;
  return "?";
}

struct StudySpec {
  StudyKind study = StudyKind::table;
  std::optional<GraphModel> model;
  std::vector<int> ns;
  double beta = 1.0;
  double D = 0.0;
  std::optional<double> rho;
  double a = 1.0;
  std::string out;
  std::string format = "csv";
  double tol = 1e-12;
  int workers = 0;

  // Canonical text of every field that affects the numbers.
  std::string canonical() const {
    std::ostringstream s;
    s << "study=" << to_string(study) << ";model=" << (model ? model->name() : "") << ";n=";
    for (std::size_t i = 0; i < ns.size(); ++i) s << (i ? "," : "") << ns[i];
    s << ";beta=" << format_double(beta) << ";D=" << format_double(D)
      << ";rho=" << (rho ? format_double(*rho) : "") << ";a=" << format_double(a) << ";tol=" << format_double(tol)
      << ";format=" << format;
    return s.str();
  }
};

// FNV-1a, 64 bit, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string spec_hash(const StudySpec& s) { return fnv1a_hex(s.canonical()); }

inline const GraphModel& need_model(const StudySpec& s) {
  require(s.model.has_value(), "study '" + to_string(s.study) + "' needs --model");
  require(!s.model->is_finite(), "study '" + to_string(s.study) + "' needs an infinite catalog model");
  return *s.model;
}

inline void validate(const StudySpec& s) {
  require(s.beta > 0.0 && std::isfinite(s.beta), "beta must be positive and finite");
  require(s.D >= 0.0 && std::isfinite(s.D), "D must be finite and >= 0");
  require(s.a > 0.0, "a must be positive (a = inf allowed)");
  require(s.tol > 0.0 && s.tol < 1.0, "tol must lie in (0, 1)");
  require(s.workers >= 0, "workers must be >= 0");
  require(s.format == "csv" || s.format == "json", "format must be csv or json");
  if (s.study == StudyKind::green)
    for (int n : s.ns) require(n >= 0, "every site offset must be >= 0");
  else
    for (int n : s.ns) require(n >= 1, "every n must be >= 1");
  if (s.rho) require(*s.rho > 0.0, "rho must be positive");
  switch (s.study) {
    case StudyKind::table: break;
    case StudyKind::norms:
    case StudyKind::rho_c: need_model(s); break;
    case StudyKind::green:
    case StudyKind::dims: {
      const auto& m = need_model(s);
      if (s.study == StudyKind::dims) require(s.ns.size() >= 5, "dims needs at least 5 values of n");
      if (s.study == StudyKind::green) require(!s.ns.empty(), "green needs --n (site offsets)");
      (void)m;
      break;
    }
    case StudyKind::ids_shift:
      require(need_model(s).is_comb(), "ids-shift needs a comb model (N|Z^d or Z^d|Z)");
      require(!s.ns.empty(), "ids-shift needs --n");
      break;
    case StudyKind::schedule_convergence: {
      const auto& m = need_model(s);
      require(m.kind == Kind::HalfLineN || (m.kind == Kind::NComb && m.d <= 2),
              "schedule-convergence needs N or N|Z^d with d = 1, 2 (the proved regime)");
      require(!s.ns.empty(), "schedule-convergence needs --n");
      break;
    }
    case StudyKind::density_limit: {
      const auto& m = need_model(s);
      require((m.kind == Kind::NComb && m.d <= 2) || m.kind == Kind::ZComb,
              "density-limit needs N|Z^d (d = 1, 2) or Z^d|Z");
      require(s.beta == 1.0, "density-limit is stated for beta = 1");
      break;
    }
    case StudyKind::fixed_density: need_model(s); break;
  }
}

// ---------------------------------------------------------------------------
// Studies

struct TableRowModel {
  std::string label;
  GraphModel model;
};

inline std::string bec_column(Recurrence r, long dg, long dpf) {
  if (r == Recurrence::Recurrent) return "none";
  if (dpf > dg) return "inf-BEC";
  if (dpf == dg) return "rho-BEC";
  return "0-BEC";
}

inline Table run_table() {
  Table t;
  t.columns = {"model", "rho_c", "rho_c_finite", "RT", "d_G", "d_PF", "d_G_fit", "d_PF_fit", "BEC", "note"};
  std::vector<TableRowModel> rows;
  for (int d = 1; d <= 4; ++d) rows.push_back({d == 1 ? "Z" : "Z^" + std::to_string(d), GraphModel::lattice(d)});
  rows.push_back({"N", GraphModel::half_line()});
  rows.push_back({"N|Z", GraphModel::ncomb(1)});
  rows.push_back({"N|Z^2", GraphModel::ncomb(2)});
  for (int d = 1; d <= 3; ++d) rows.push_back({(d == 1 ? "Z" : "Z^" + std::to_string(d)) + "|Z", GraphModel::zcomb(d)});
  const auto ns = doubling_range(100, 6);
  for (auto& [label, m] : rows) {
    Ext rc = critical_density(m);
    Recurrence r = classify_recurrence(m);
    auto e = estimate_dimensions(m, ns);
    long dg = std::lround(e.d_G), dpf = std::lround(e.d_PF);
    std::string note = e.reliable ? "" : "dimension fit residual above 0.05";
    t.add({label, cell(rc), rc.is_finite(), std::string(to_string(r)), static_cast<long long>(dg),
           static_cast<long long>(dpf), e.d_G, e.d_PF, bec_column(r, dg, dpf), note});
  }
  t.add({std::string("star graph"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
         std::string("external reference (not computed)")});
  return t;
}

inline Table run_norms(const StudySpec& s) {
  const auto& m = need_model(s);
  Table t;
  if (m.is_comb()) {
    auto h = hidden_spectrum(m, s.tol);
    t.columns = {"model", "comb_norm", "fiber_norm", "gap", "hidden"};
    t.add({m.name(), h.comb_norm, h.base_disjoint_norm, h.gap, h.present});
  } else {
    t.columns = {"model", "norm"};
    t.add({m.name(), infinite_norm(m)});
  }
  return t;
}

// Edge Green values along one axis: G(||A||; root, k e_last).
inline Table run_green(const StudySpec& s) {
  const auto& m = need_model(s);
  Table t;
  t.columns = {"model", "k", "site", "G_edge", "recurrence"};
  Recurrence r = classify_recurrence(m);
  for (int k : s.ns) {
    Site x, root;
    switch (m.kind) {
      case Kind::HalfLineN: root = {0}; break;
      case Kind::LineZ:
      case Kind::LatticeZd: root = Site(m.lattice_dim(), 0); break;
      default: root = Site(comb_base(m).lattice_dim() + comb_fiber(m).lattice_dim(), 0); break;
    }
    x = root;
    x.back() = k;
    std::string site;
    for (std::size_t j = 0; j < x.size(); ++j) site += (j ? " " : "") + std::to_string(x[j]);
    Cell value;
    if (r == Recurrence::Recurrent && (m.kind == Kind::LineZ || m.kind == Kind::LatticeZd)) {
      value = std::string("inf");
    } else if (m.is_comb()) {
      value = cell(detail::comb_resolvent_at(m, infinite_norm(m), root, x));
    } else {
      value = edge_resolvent(m, root, x);
    }
    t.add({m.name(), static_cast<long long>(k), site, value, std::string(to_string(r))});
  }
  return t;
}

inline Table run_ids_shift(const StudySpec& s) {
  const auto& m = need_model(s);
  Table t;
  t.columns = {"model", "n", "distance", "eps0", "E0", "predicted_gap", "hidden"};
  for (int n : s.ns) {
    FiniteVolume fv(m, n, s.workers);
    double dist = ids_shift_distance(fv);
    auto g = eps0_E0(fv);
    t.add({m.name(), static_cast<long long>(n), dist, g.eps0, g.E0, g.predicted_gap, g.hidden});
  }
  return t;
}

inline Table run_dims(const StudySpec& s) {
  const auto& m = need_model(s);
  auto e = estimate_dimensions(m, s.ns);
  Table t;
  t.columns = {"model", "d_G", "d_PF", "n_lo", "n_hi", "residual_G", "residual_PF", "reliable"};
  t.add({m.name(), e.d_G, e.d_PF, static_cast<long long>(e.n_lo), static_cast<long long>(e.n_hi), e.residual_G,
         e.residual_PF, e.reliable});
  return t;
}

inline Table run_rho_c(const StudySpec& s) {
  const auto& m = need_model(s);
  Table t;
  t.columns = {"model", "beta", "rho_c"};
  t.add({m.name(), s.beta, cell(critical_density(m, s.beta))});
  return t;
}

inline Table run_schedule_convergence(const StudySpec& s) {
  const auto& m = need_model(s);
  Site root = m.kind == Kind::HalfLineN ? Site{0} : Site(1 + m.d, 0);
  auto limit = two_point_limit(m, s.beta, s.D, root, root, s.workers);
  Table t;
  t.columns = {"model",       "n",          "D",          "mu_n",      "schedule_ratio", "two_point_root",
               "limit_root",  "rel_error",  "rho_cond_state", "rho_cond_weight", "pf_ratio"};
  for (int n : s.ns) {
    FiniteVolume fv(m, n, s.workers);
    double mu = condensate_schedule(fv, s.D);
    double tp = two_point_finite(fv, {s.beta, mu}, root, root);
    auto cd = condensate_density_finite(fv, mu, s.D);
    t.add({m.name(), static_cast<long long>(n), s.D, mu, schedule_ratio(fv, mu), tp, limit.total(),
           (tp - limit.total()) / limit.total(), cd.state_side, cd.weight_side,
           pf_partial_norm(m, n) / fv.pf_norm2()});
  }
  return t;
}

inline Table run_density_limit(const StudySpec& s) {
  const auto& m = need_model(s);
  Ext lim = density_limit(m, s.a, s.beta);
  Table t;
  t.columns = {"model", "n", "a", "mu_n", "rho_n", "density_limit", "rel_error"};
  if (s.ns.empty()) {
    t.add({m.name(), Cell{}, s.a, Cell{}, Cell{}, cell(lim), Cell{}});
    return t;
  }
  require(std::isfinite(s.a), "density-limit with --n needs a finite a");
  for (int n : s.ns) {
    FiniteVolume fv(m, n, s.workers);
    double mu = gap_rate_mu(fv, s.a);
    double rho = finite_density(fv, {s.beta, mu});
    Cell rel = lim.is_finite() ? Cell((rho - lim.value()) / lim.value()) : Cell{};
    t.add({m.name(), static_cast<long long>(n), s.a, mu, rho, cell(lim), rel});
  }
  return t;
}

inline Table run_fixed_density(const StudySpec& s) {
  const auto& m = need_model(s);
  double rho;
  if (s.rho) {
    rho = *s.rho;
  } else {
    Ext rc = critical_density(m, s.beta);
    rho = rc.is_finite() ? rc.value() + 1.0 : 1.0;
  }
  auto v = fixed_density_verdict(m, rho, s.beta);
  Table t;
  t.columns = {"model", "rho", "rho_c", "recurrence", "d_G", "d_PF", "regime", "coefficient", "note"};
  t.add({m.name(), rho, cell(v.rho_c), std::string(to_string(v.recurrence)), v.d_G, v.d_PF,
         std::string(to_string(v.regime)), cell(v.coefficient), v.note});
  return t;
}

inline Table run_study(const StudySpec& s) {
  validate(s);
  switch (s.study) {
    case StudyKind::table: return run_table();
    case StudyKind::norms: return run_norms(s);
    case StudyKind::green: return run_green(s);
    case StudyKind::ids_shift: return run_ids_shift(s);
    case StudyKind::dims: return run_dims(s);
    case StudyKind::rho_c: return run_rho_c(s);
    case StudyKind::schedule_convergence: return run_schedule_convergence(s);
    case StudyKind::density_limit: return run_density_limit(s);
    case StudyKind::fixed_density: return run_fixed_density(s);
  }
  return {};
}

}  // namespace hop
