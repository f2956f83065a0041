#pragma once

#include <regex>
#include <string>

#include "common.hpp"

namespace hop {

enum class Kind { SegmentN, TorusZd, NComb, ZComb, LineZ, LatticeZd, HalfLineN };

// Catalog entry. Infinite kinds use `d` for the lattice/fiber dimension;
// the finite kinds SegmentN and TorusZd also carry `n`.
struct GraphModel {
  Kind kind = Kind::HalfLineN;
  int d = 1;
  int n = 0;
  long root = 0;

  static GraphModel half_line() { return {Kind::HalfLineN, 1, 0, 0}; }
  static GraphModel line() { return {Kind::LineZ, 1, 0, 0}; }
  static GraphModel lattice(int d) {
    require(d >= 1, "lattice dimension must be >= 1");
    return d == 1 ? line() : GraphModel{Kind::LatticeZd, d, 0, 0};
  }
  static GraphModel ncomb(int d) {
    require(d >= 1, "NComb dimension must be >= 1");
    return {Kind::NComb, d, 0, 0};
  }
  static GraphModel zcomb(int d) {
    require(d >= 1, "ZComb dimension must be >= 1");
    return {Kind::ZComb, d, 0, 0};
  }
  static GraphModel segment(int n) {
    require(n >= 1, "segment needs n >= 1");
    return {Kind::SegmentN, 1, n, 0};
  }
  static GraphModel torus(int d, int n) {
    require(d >= 1 && n >= 1, "torus needs d >= 1 and n >= 1");
    return {Kind::TorusZd, d, n, 0};
  }

  bool is_comb() const { return kind == Kind::NComb || kind == Kind::ZComb; }
  bool is_finite() const { return kind == Kind::SegmentN || kind == Kind::TorusZd; }
  bool is_lattice() const { return kind == Kind::LineZ || kind == Kind::LatticeZd; }
  int lattice_dim() const { return kind == Kind::LineZ ? 1 : d; }

  std::string name() const {
    switch (kind) {
      case Kind::SegmentN: return "SegmentN(" + std::to_string(n) + ")";
      case Kind::TorusZd: return "TorusZd(" + std::to_string(d) + "," + std::to_string(n) + ")";
      case Kind::NComb: return "NComb(" + std::to_string(d) + ")";
      case Kind::ZComb: return "ZComb(" + std::to_string(d) + ")";
      case Kind::LineZ: return "LineZ";
      case Kind::LatticeZd: return "LatticeZd(" + std::to_string(d) + ")";
      case Kind::HalfLineN: return "HalfLineN";
    }
    return "?";
  }

  friend bool operator==(const GraphModel&, const GraphModel&) = default;
};

// Accepts the names produced by GraphModel::name() plus the short aliases
// N, Z, Zd (e.g. Z3), N|Zd and Zd|Z.
inline GraphModel parse_model(const std::string& text) {
  std::smatch m;
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  if (text == "HalfLineN" || text == "N") return GraphModel::half_line();
  if (text == "LineZ" || text == "Z") return GraphModel::line();
  if (std::regex_match(text, m, std::regex(R"(LatticeZd\((\d+)\))")) ||
      std::regex_match(text, m, std::regex(R"(Z(\d+))")))
    return GraphModel::lattice(num(1));
  if (std::regex_match(text, m, std::regex(R"(NComb\((\d+)\))"))) return GraphModel::ncomb(num(1));
  if (std::regex_match(text, m, std::regex(R"(N\|Z(\d*))")))
    return GraphModel::ncomb(m[1].str().empty() ? 1 : num(1));
  if (std::regex_match(text, m, std::regex(R"(ZComb\((\d+)\))"))) return GraphModel::zcomb(num(1));
  if (std::regex_match(text, m, std::regex(R"(Z(\d*)\|Z)")))
    return GraphModel::zcomb(m[1].str().empty() ? 1 : num(1));
  if (std::regex_match(text, m, std::regex(R"(SegmentN\((\d+)\))"))) return GraphModel::segment(num(1));
  if (std::regex_match(text, m, std::regex(R"(TorusZd\((\d+),\s*(\d+)\))")))
    return GraphModel::torus(num(1), num(2));
  throw PreconditionError("unknown model '" + text + "'");
}

}  // namespace hop
