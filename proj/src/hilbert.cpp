#include "jch/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "jch/errors.hpp"

namespace jch {

std::int64_t Basis::index_of(std::uint64_t key) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), key);
  if (it == states_.end() || *it != key) return -1;
  return it - states_.begin();
}

Basis enumerate_basis(int L, int n_max, std::optional<int> sector) {
  if (L < 1) throw IndexOutOfRange("enumerate_basis: L must be >= 1");
  if (n_max < 1) throw IndexOutOfRange("enumerate_basis: n_max must be >= 1");
  if (sector && (*sector < 0 || *sector > static_cast<std::int64_t>(L) * (n_max + 1)))
    throw SectorEmpty("enumerate_basis: sector N=" + std::to_string(*sector) +
                      " is out of the reachable range");

  Basis b;
  b.L_ = L;
  b.n_max_ = n_max;
  b.sector_ = sector;
  const int local_dim = 2 * (n_max + 1);
  b.bits_ = std::bit_width(static_cast<unsigned>(local_dim - 1));
  b.mask_ = (std::uint64_t{1} << b.bits_) - 1;
  if (b.bits_ * L > 64)
    throw BasisTooLarge("enumerate_basis: L=" + std::to_string(L) + ", n_max=" +
                        std::to_string(n_max) + " does not fit a 64-bit state key");

  // Depth-first in lexicographic order, pruning on the remaining excitation
  // budget when a sector is requested. Each site contributes 0..n_max+1.
  const int per_site_max = n_max + 1;
  std::vector<int> code(L, 0);
  std::uint64_t key = 0;

  auto recurse = [&](auto&& self, int site, int used) -> void {
    if (site == L) {
      if (!sector || used == *sector) b.states_.push_back(key);
      return;
    }
    const int remaining_sites = L - 1 - site;
    for (int p = 0; p <= n_max; ++p) {
      for (int t = 0; t <= 1; ++t) {
        const int e = p + t;
        if (sector) {
          const int after = used + e;
          if (after > *sector) continue;
          if (after + remaining_sites * per_site_max < *sector) continue;
        }
        key |= static_cast<std::uint64_t>((p << 1) | t) << (b.bits_ * (L - 1 - site));
        self(self, site + 1, used + e);
        key &= ~(b.mask_ << (b.bits_ * (L - 1 - site)));
      }
    }
  };
  recurse(recurse, 0, 0);

  if (b.states_.empty())
    throw SectorEmpty("enumerate_basis: sector N=" + std::to_string(*sector) + " is empty");
  // DFS emits keys in increasing order already; keep the invariant explicit.
  if (!std::is_sorted(b.states_.begin(), b.states_.end()))
    std::sort(b.states_.begin(), b.states_.end());
  return b;
}

SiteOperator site_operator(const Basis& basis, int site, SiteOp kind) {
  if (site < 0 || site >= basis.sites())
    throw SiteOutOfRange("site_operator: site " + std::to_string(site) + " out of range");

  const std::int64_t dim = basis.dim();
  SiteOperator op;
  op.matrix.resize(dim, dim);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim));

  for (std::int64_t s = 0; s < dim; ++s) {
    const int p = basis.photons(s, site);
    const bool up = basis.tls_up(s, site);
    switch (kind) {
      case SiteOp::photon_number:
        if (p) trip.emplace_back(s, s, static_cast<double>(p));
        break;
      case SiteOp::tls_number:
        if (up) trip.emplace_back(s, s, 1.0);
        break;
      case SiteOp::excitation_number:
        if (p + (up ? 1 : 0)> 0)
          trip.emplace_back(s, s, static_cast<double>(p + (up ? 1 : 0)));
        break;
      case SiteOp::annihilate: {
        if (p == 0) break;
        const auto target = basis.with_site(basis.key(s), site, p - 1,
                                            up ? Tls::up : Tls::down);
        const auto r = basis.index_of(target);
        if (r < 0) { ++op.dropped_transitions; break; }
        trip.emplace_back(r, s, std::sqrt(static_cast<double>(p)));
        break;
      }
      case SiteOp::create: {
        if (p == basis.n_max()) { ++op.dropped_transitions; break; }
        const auto target = basis.with_site(basis.key(s), site, p + 1,
                                            up ? Tls::up : Tls::down);
        const auto r = basis.index_of(target);
        if (r < 0) { ++op.dropped_transitions; break; }
        trip.emplace_back(r, s, std::sqrt(static_cast<double>(p + 1)));
        break;
      }
      case SiteOp::sigma_minus: {
        if (!up) break;
        const auto target = basis.with_site(basis.key(s), site, p, Tls::down);
        const auto r = basis.index_of(target);
        if (r < 0) { ++op.dropped_transitions; break; }
        trip.emplace_back(r, s, 1.0);
        break;
      }
      case SiteOp::sigma_plus: {
        if (up) break;
        const auto target = basis.with_site(basis.key(s), site, p, Tls::up);
        const auto r = basis.index_of(target);
        if (r < 0) { ++op.dropped_transitions; break; }
        trip.emplace_back(r, s, 1.0);
        break;
      }
    }
  }
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  return op;
}

void dump_state(const StateVector& psi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const Basis& b = *psi.basis;
  out << "dim=" << b.dim() << " L=" << b.sites() << " n_max=" << b.n_max() << " N="
      << (b.sector() ? std::to_string(*b.sector()) : std::string("none")) << "\n";
  char buf[80];
  for (std::int64_t i = 0; i < b.dim(); ++i) {
    const auto a = psi.amplitudes[i];
    if (a == std::complex<double>(0.0, 0.0)) continue;
    std::snprintf(buf, sizeof buf, "%lld %.17g %.17g\n", static_cast<long long>(i),
                  a.real(), a.imag());
    out << buf;
  }
}

StateVector load_state(const std::string& path, std::shared_ptr<const Basis> basis) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open state file '" + path + "'");
  std::string header;
  std::getline(in, header);
  long long dim = 0, L = 0, nmax = 0;
  char nbuf[32] = {0};
  if (std::sscanf(header.c_str(), "dim=%lld L=%lld n_max=%lld N=%31s", &dim, &L, &nmax,
                  nbuf) != 4)
    throw IoError(path + ": malformed state header '" + header + "'");
  if (dim != basis->dim() || L != basis->sites() || nmax != basis->n_max())
    throw DimensionMismatch(path + ": state header does not match basis");
  const std::string nstr(nbuf);
  if (basis->sector()) {
    if (nstr != std::to_string(*basis->sector()))
      throw DimensionMismatch(path + ": sector mismatch");
  } else if (nstr != "none") {
    throw DimensionMismatch(path + ": sector mismatch");
  }
  StateVector psi{std::move(basis), Eigen::VectorXcd::Zero(dim)};
  long long idx;
  double re, im;
  while (in >> idx >> re >> im) {
    if (idx < 0 || idx >= dim) throw IoError(path + ": amplitude index out of range");
    psi.amplitudes[idx] = {re, im};
  }
  return psi;
}

}  // namespace jch
