#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "common.hpp"
#include "model.hpp"

namespace hop {

// Symmetric adjacency with integer multiplicities in CSR layout.
class SparseOperator {
 public:
  SparseOperator() = default;

  std::size_t dimension() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  std::size_t row_begin(std::size_t x) const { return offsets_[x]; }
  std::size_t row_end(std::size_t x) const { return offsets_[x + 1]; }
  std::size_t col(std::size_t k) const { return cols_[k]; }
  int mult(std::size_t k) const { return mults_[k]; }

  int entry(std::size_t x, std::size_t y) const {
    for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k)
      if (cols_[k] == y) return mults_[k];
    return 0;
  }

  long degree(std::size_t x) const {
    long s = 0;
    for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k) s += mults_[k];
    return s;
  }

  long max_degree() const {
    long m = 0;
    for (std::size_t x = 0; x < dimension(); ++x) m = std::max(m, degree(x));
    return m;
  }

  // Number of edges counted with multiplicity; a loop counts once.
  long edge_count() const {
    long twice = 0;
    for (std::size_t x = 0; x < dimension(); ++x)
      for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k)
        twice += cols_[k] == x ? 2L * mults_[k] : mults_[k];
    return twice / 2;
  }

  // y = A x, rows summed in stored column order.
  void apply(const double* x, double* y) const {
    const std::size_t n = dimension();
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) s += mults_[k] * x[cols_[k]];
      y[r] = s;
    }
  }

  std::vector<double> to_dense() const {
    const std::size_t n = dimension();
    std::vector<double> a(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) a[r * n + cols_[k]] = mults_[k];
    return a;
  }

  bool is_symmetric() const {
    for (std::size_t x = 0; x < dimension(); ++x)
      for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k)
        if (entry(cols_[k], x) != mults_[k]) return false;
    return true;
  }

  // "index: neighbor*multiplicity, ..." one line per vertex.
  void dump(std::ostream& os) const {
    for (std::size_t x = 0; x < dimension(); ++x) {
      os << x << ':';
      for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k)
        os << (k == offsets_[x] ? " " : ", ") << cols_[k] << '*' << mults_[k];
      os << '\n';
    }
  }

  std::string dump() const {
    std::ostringstream os;
    dump(os);
    return os.str();
  }

  // Builds from per-row sorted maps; used by OperatorBuilder.
  static SparseOperator from_rows(const std::vector<std::map<std::size_t, int>>& rows) {
    SparseOperator op;
    op.offsets_.assign(1, 0);
    for (const auto& row : rows) {
      for (auto [c, m] : row) {
        if (m == 0) continue;
        require(m > 0, "adjacency multiplicities must be nonnegative");
        op.cols_.push_back(c);
        op.mults_.push_back(m);
      }
      op.offsets_.push_back(op.cols_.size());
    }
    return op;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
  std::vector<int> mults_;
};

inline std::vector<double> matvec(const SparseOperator& op, const std::vector<double>& v) {
  require(v.size() == op.dimension(), "matvec: vector length does not match dimension");
  std::vector<double> out(v.size());
  op.apply(v.data(), out.data());
  return out;
}

// Accumulates undirected edges; each add_edge(x, y, m) adds m to both
// A_xy and A_yx (a loop adds m to A_xx once).
class OperatorBuilder {
 public:
  explicit OperatorBuilder(std::size_t n) : rows_(n) {}

  void add_edge(std::size_t x, std::size_t y, int m = 1) {
    require(x < rows_.size() && y < rows_.size(), "edge endpoint out of range");
    rows_[x][y] += m;
    if (x != y) rows_[y][x] += m;
  }

  SparseOperator build() const { return SparseOperator::from_rows(rows_); }

 private:
  std::vector<std::map<std::size_t, int>> rows_;
};

inline SparseOperator build_segment(int n) {
  require(n >= 1, "build_segment: n must be >= 1");
  OperatorBuilder b(n + 1);
  for (int k = 0; k < n; ++k) b.add_edge(k, k + 1);
  return b.build();
}

inline std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

// Coordinates -n..n are folded to 0..2n (c mod 2n+1); flat index is
// row-major with the first coordinate most significant.
inline SparseOperator build_torus(int d, int n) {
  require(d >= 1 && n >= 1, "build_torus: d >= 1 and n >= 1 required");
  const std::size_t N = 2 * n + 1;
  const std::size_t V = ipow(N, d);
  OperatorBuilder b(V);
  for (std::size_t x = 0; x < V; ++x) {
    std::size_t stride = 1;
    for (int j = d - 1; j >= 0; --j) {
      std::size_t c = (x / stride) % N;
      std::size_t y = x - c * stride + ((c + 1) % N) * stride;
      b.add_edge(x, y);
      stride *= N;
    }
  }
  return b.build();
}

inline std::size_t comb_index(std::size_t base_index, std::size_t fiber_index, std::size_t fiber_dim) {
  return base_index * fiber_dim + fiber_index;
}

// A_base (x) P_o + I (x) A_fiber, flat index base*|fiber| + fiber.
inline SparseOperator build_comb(const SparseOperator& base, const SparseOperator& fiber,
                                 std::size_t fiber_root) {
  require(fiber_root < fiber.dimension(), "build_comb: fiber root out of range");
  const std::size_t B = base.dimension(), F = fiber.dimension();
  std::vector<std::map<std::size_t, int>> rows(B * F);
  for (std::size_t g = 0; g < B; ++g) {
    for (std::size_t h = 0; h < F; ++h) {
      auto& row = rows[comb_index(g, h, F)];
      for (std::size_t k = fiber.row_begin(h); k < fiber.row_end(h); ++k)
        row[comb_index(g, fiber.col(k), F)] += fiber.mult(k);
    }
    auto& root_row = rows[comb_index(g, fiber_root, F)];
    for (std::size_t k = base.row_begin(g); k < base.row_end(g); ++k)
      root_row[comb_index(base.col(k), fiber_root, F)] += base.mult(k);
  }
  return SparseOperator::from_rows(rows);
}

// Finite volume Lambda_n of an infinite catalog model.
struct Exhaustion {
  GraphModel model;
  int n = 1;

  // Base and fiber factors of a comb exhaustion: S_n or T^d_{2n+1} as base,
  // T^{d_f}_{2n+1} as fiber.
  bool base_is_segment() const { return model.kind == Kind::NComb || model.kind == Kind::HalfLineN; }
  int base_dim() const {
    switch (model.kind) {
      case Kind::ZComb: return model.d;
      case Kind::LatticeZd: return model.d;
      default: return 1;
    }
  }
  int fiber_dim() const {
    switch (model.kind) {
      case Kind::NComb: return model.d;
      case Kind::ZComb: return 1;
      default: return 0;
    }
  }

  std::size_t vertex_count() const {
    const std::size_t N = 2 * n + 1;
    switch (model.kind) {
      case Kind::HalfLineN: return n + 1;
      case Kind::LineZ: return N;
      case Kind::LatticeZd: return ipow(N, model.d);
      case Kind::NComb: return (n + 1) * ipow(N, model.d);
      case Kind::ZComb: return ipow(N, model.d + 1);
      case Kind::SegmentN: return model.n + 1;
      case Kind::TorusZd: return ipow(2 * model.n + 1, model.d);
    }
    return 0;
  }

  SparseOperator build() const {
    require(n >= 1, "exhaustion index must be >= 1");
    switch (model.kind) {
      case Kind::HalfLineN: return build_segment(n);
      case Kind::LineZ: return build_torus(1, n);
      case Kind::LatticeZd: return build_torus(model.d, n);
      case Kind::NComb: return build_comb(build_segment(n), build_torus(model.d, n), 0);
      case Kind::ZComb: return build_comb(build_torus(model.d, n), build_torus(1, n), 0);
      case Kind::SegmentN: return build_segment(model.n);
      case Kind::TorusZd: return build_torus(model.d, model.n);
    }
    return {};
  }
};

// Density of edges added to disjoint open fiber boxes when forming the
// periodic comb exhaustion: (|V_G| d N^{d-1} + |E_G|) / (|V_G| N^d).
inline double perturbation_density(const Exhaustion& ex, int n) {
  require(ex.model.is_comb(), "perturbation_density needs a comb model");
  require(n >= 1, "perturbation_density: n must be >= 1");
  const double N = 2.0 * n + 1.0;
  const int df = ex.fiber_dim();
  double VG, EG;
  if (ex.base_is_segment()) {
    VG = n + 1.0;
    EG = n;
  } else {
    const int db = ex.base_dim();
    VG = std::pow(N, db);
    EG = db * VG;
  }
  return (VG * df * std::pow(N, df - 1) + EG) / (VG * std::pow(N, df));
}

}  // namespace hop
