#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuttree/generators.hpp"

namespace cuttree {

enum class FamilyKind { urt, bst, bary, scale_free, merged, regular, cayley };

/// A tree family together with its shape parameters.
struct FamilySpec {
  FamilyKind kind = FamilyKind::urt;
  unsigned b = 2;                       ///< bary branching factor; regular degree
  double alpha = 0.0;                   ///< scale_free
  std::vector<unsigned> ds{2, 4};       ///< merged degrees
  double m = 0.0;                       ///< merged scale; 0 means m = ln(n)
  unsigned height = 1;                  ///< regular

  static FamilySpec urt() { return {}; }
  static FamilySpec bst() { return {FamilyKind::bst}; }
  static FamilySpec bary(unsigned b) {
    FamilySpec f{FamilyKind::bary};
    f.b = b;
    return f;
  }
  static FamilySpec scale_free(double alpha) {
    FamilySpec f{FamilyKind::scale_free};
    f.alpha = alpha;
    return f;
  }
  static FamilySpec merged(std::vector<unsigned> ds, double m = 0.0) {
    FamilySpec f{FamilyKind::merged};
    f.ds = std::move(ds);
    f.m = m;
    return f;
  }
  static FamilySpec cayley() { return {FamilyKind::cayley}; }

  /// Stable tag, also used to derive per-family random streams.
  [[nodiscard]] std::string tag() const {
    std::ostringstream os;
    switch (kind) {
      case FamilyKind::urt: return "urt";
      case FamilyKind::bst: return "bst";
      case FamilyKind::cayley: return "cayley";
      case FamilyKind::bary: os << "bary(b=" << b << ")"; break;
      case FamilyKind::scale_free: os << "scale_free(alpha=" << alpha << ")"; break;
      case FamilyKind::regular: os << "regular(d=" << b << ",h=" << height << ")"; break;
      case FamilyKind::merged:
        os << "merged(ds=";
        for (std::size_t i = 0; i < ds.size(); ++i) os << (i ? "," : "") << ds[i];
        if (m > 0) os << ";m=" << m;
        os << ")";
        break;
    }
    return os.str();
  }

  [[nodiscard]] std::uint64_t stream_id() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : tag()) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return h;
  }

  /// Merged scale actually used for a requested size n.
  [[nodiscard]] double merged_m(std::size_t n) const {
    return m > 0 ? m : std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  }
};

inline FamilyKind parse_family_kind(const std::string& name) {
  if (name == "urt") return FamilyKind::urt;
  if (name == "bst") return FamilyKind::bst;
  if (name == "bary") return FamilyKind::bary;
  if (name == "scale_free" || name == "sf") return FamilyKind::scale_free;
  if (name == "merged") return FamilyKind::merged;
  if (name == "regular") return FamilyKind::regular;
  if (name == "cayley") return FamilyKind::cayley;
  throw std::invalid_argument("unknown family '" + name + "'");
}

/// Draws one tree of the family. For `merged` and `regular` the size is set
/// by the shape parameters (merged uses m = ln n unless m is given) and the
/// stream is not consumed.
inline RootedTree generate(const FamilySpec& f, std::size_t n, Stream& rng) {
  switch (f.kind) {
    case FamilyKind::urt: return gen_urt(n, rng);
    case FamilyKind::bst: return gen_bst(n, rng);
    case FamilyKind::bary: return gen_bary(n, f.b, rng);
    case FamilyKind::scale_free: return gen_scale_free(n, f.alpha, rng);
    case FamilyKind::merged: return gen_merged(f.ds, f.merged_m(n));
    case FamilyKind::regular: return gen_regular(f.b, f.height);
    case FamilyKind::cayley: return gen_cayley(n, rng);
  }
  throw std::logic_error("generate: unreachable");
}

}  // namespace cuttree
