#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jch {

enum class Tls : int { down = 0, up = 1 };

// One cavity: photon Fock state plus the two-level system.
struct LocalState {
  int photons = 0;
  Tls tls = Tls::down;
};

// Many-body basis of L cavities, each a truncated Fock space (0..n_max)
// times a two-level system, optionally restricted to fixed total excitation
// number N = sum_i (photons_i + [tls_i = up]).
//
// States are ordered lexicographically on the tuple of per-site
// (photons, tls) pairs, site 0 most significant, photons before tls.
// This order is part of the dump format and must not change.
class Basis {
 public:
  int sites() const { return L_; }
  int n_max() const { return n_max_; }
  std::optional<int> sector() const { return sector_; }
  std::int64_t dim() const { return static_cast<std::int64_t>(states_.size()); }

  int photons(std::int64_t state, int site) const {
    return static_cast<int>((states_[state] >> shift(site)) & mask_) >> 1;
  }
  bool tls_up(std::int64_t state, int site) const {
    return ((states_[state] >> shift(site)) & 1) != 0;
  }
  // Per-site excitation number: photons + tls occupation.
  int excitation(std::int64_t state, int site) const {
    const auto code = (states_[state] >> shift(site)) & mask_;
    return static_cast<int>(code >> 1) + static_cast<int>(code & 1);
  }
  LocalState local_state(std::int64_t state, int site) const {
    return {photons(state, site), tls_up(state, site) ? Tls::up : Tls::down};
  }

  // Dense index of a packed state key, or -1 if absent from the basis.
  std::int64_t index_of(std::uint64_t key) const;
  std::uint64_t key(std::int64_t state) const { return states_[state]; }

  // Key with site's local code replaced by (photons, tls).
  std::uint64_t with_site(std::uint64_t key, int site, int photons, Tls tls) const {
    const int s = shift(site);
    key &= ~(mask_ << s);
    return key | (static_cast<std::uint64_t>((photons << 1) | static_cast<int>(tls)) << s);
  }

  bool same_space(const Basis& other) const {
    return L_ == other.L_ && n_max_ == other.n_max_ && sector_ == other.sector_;
  }

  friend Basis enumerate_basis(int L, int n_max, std::optional<int> sector);

 private:
  int shift(int site) const { return bits_ * (L_ - 1 - site); }

  int L_ = 0;
  int n_max_ = 0;
  int bits_ = 0;
  std::uint64_t mask_ = 0;
  std::optional<int> sector_;
  std::vector<std::uint64_t> states_;  // sorted ascending == lexicographic order
};

// Enumerates the full or sector-restricted basis. Throws SectorEmpty when the
// requested sector holds no states, BasisTooLarge when L*bits exceeds 64.
Basis enumerate_basis(int L, int n_max, std::optional<int> sector = std::nullopt);

// Complex amplitudes over a shared immutable basis.
struct StateVector {
  std::shared_ptr<const Basis> basis;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

enum class SiteOp {
  annihilate,
  create,
  sigma_minus,
  sigma_plus,
  photon_number,
  tls_number,
  excitation_number,
};

// Sparse one-site operator in the many-body basis, identity on other sites.
// Transitions whose target lies outside the basis (sector leakage for
// non-conserving kinds, or the Fock cutoff for create) are dropped and
// counted in dropped_transitions.
struct SiteOperator {
  Eigen::SparseMatrix<double> matrix;
  std::int64_t dropped_transitions = 0;
};

SiteOperator site_operator(const Basis& basis, int site, SiteOp kind);

// Dump format: header "dim=<int> L=<int> n_max=<int> N=<int|none>", then one
// "index re im" line per nonzero amplitude.
void dump_state(const StateVector& psi, const std::string& path);
StateVector load_state(const std::string& path, std::shared_ptr<const Basis> basis);

}  // namespace jch
