#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sslab/errors.hpp"
#include "sslab/linalg/banded.hpp"
#include "sslab/linalg/weighted.hpp"
#include "sslab/model.hpp"

namespace sslab {

using linalg::cplx;

struct Grid1D {
  std::size_t n = 0;  // cells
  double ell = 0.0;
  double h = 0.0;

  double node(std::size_t i) const { return static_cast<double>(i) * h; }
  double dual(std::size_t i) const { return (static_cast<double>(i) + 0.5) * h; }
  std::vector<double> primal_nodes() const;  // n + 1 entries
  std::vector<double> dual_nodes() const;    // n entries
};

struct Grids {
  Grid1D string;
  Grid1D beam;
};

// Throws GridTooCoarse when either cell count is below 4.
Grids build_grids(const ValidatedParams& p, std::size_t n1, std::size_t n2);

enum class Block { U1, V1, U2, V2, Theta, Q };

// Block sizes and offsets of a state vector.
//   u1, v1 : string nodes 0..n1-1 (node 0 is the interface, x = l1 eliminated)
//   u2, v2 : beam nodes 1..n2-1 (beam node 0 is the shared interface DOF)
//   theta  : interior nodes 1..nh-1 of the heated component
//   q      : dual nodes 0..nh-1 of the heated component
// Order is [u1|v1|theta|q|u2|v2] for S1 and [u1|v1|u2|v2|theta|q] for S2.
class StateLayout {
 public:
  StateLayout() = default;
  StateLayout(SystemKind kind, std::size_t n1, std::size_t n2, bool with_heat);

  SystemKind kind() const { return kind_; }
  bool has_heat() const { return heat_; }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return size_; }
  std::size_t count(Block b) const { return count_[static_cast<int>(b)]; }
  std::size_t offset(Block b) const { return offset_[static_cast<int>(b)]; }
  // Number of displacement (equivalently velocity) DOFs, n1 + n2 - 1.
  std::size_t displacement_dofs() const { return n1_ + n2_ - 1; }

  bool operator==(const StateLayout&) const = default;

 private:
  SystemKind kind_ = SystemKind::ThermoStringElasticBeam;
  bool heat_ = true;
  std::size_t n1_ = 0, n2_ = 0, size_ = 0;
  std::size_t count_[6] = {};
  std::size_t offset_[6] = {};
};

template <class T>
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(const StateLayout& layout) : layout_(layout), values_(layout.size(), T{}) {}
  StateVector(const StateLayout& layout, std::vector<T> values) : layout_(layout), values_(std::move(values)) {
    if (values_.size() != layout_.size()) throw DimensionMismatch("state vector length");
  }

  const StateLayout& layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::span<T> block(Block b) { return std::span<T>(values_).subspan(layout_.offset(b), layout_.count(b)); }
  std::span<const T> block(Block b) const {
    return std::span<const T>(values_).subspan(layout_.offset(b), layout_.count(b));
  }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

 private:
  StateLayout layout_;
  std::vector<T> values_;
};

// Semi-discrete generator. Internally the unknowns are interleaved by
// spatial station (string x = l1-h ... h, interface, beam h ... l2-h) so that
// both the generator A and the energy Gram matrix G are narrow-banded. The
// energy is E(y) = 1/2 y^T G y with
//   G = blockdiag(S, M_v, W_theta, (gamma tau / kappa) Q)
// where S is the elastic stiffness (symmetric positive definite, banded).
class BlockGenerator {
 public:
  const StateLayout& layout() const { return layout_; }
  SystemKind kind() const { return layout_.kind(); }
  const ValidatedParams& params() const { return params_; }
  const Grids& grids() const { return grids_; }
  std::size_t size() const { return layout_.size(); }

  // Interleaved operators.
  const linalg::BandedMatrix<double>& op() const { return a_; }
  const linalg::WeightMatrix& gram() const { return gram_; }

  // Heat constants of the damped component (zero for the conservative core).
  double gamma_over_kappa() const { return gamma_over_kappa_; }
  std::span<const double> q_weights() const { return q_weights_; }

  template <class T>
  std::vector<T> to_internal(const StateVector<T>& y) const {
    check(y.layout());
    std::vector<T> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[perm_[i]] = y[i];
    return out;
  }

  template <class T>
  StateVector<T> from_internal(std::span<const T> x) const {
    if (x.size() != size()) throw DimensionMismatch("internal vector length");
    StateVector<T> y(layout_);
    for (std::size_t i = 0; i < size(); ++i) y[i] = x[perm_[i]];
    return y;
  }

  // Position in the interleaved ordering of block-ordered entry i.
  std::size_t internal_index(std::size_t i) const { return perm_.at(i); }

  void check(const StateLayout& l) const {
    if (!(l == layout_)) throw DimensionMismatch("state layout does not match generator");
  }

 private:
  friend BlockGenerator assemble(const ValidatedParams&, SystemKind, const Grids&, bool);
  BlockGenerator(const ValidatedParams& p) : params_(p) {}

  StateLayout layout_;
  ValidatedParams params_;
  Grids grids_;
  std::vector<std::size_t> perm_;
  linalg::BandedMatrix<double> a_;
  linalg::WeightMatrix gram_;
  double gamma_over_kappa_ = 0.0;
  std::vector<double> q_weights_;
};

BlockGenerator assemble_generator(const ValidatedParams& p, SystemKind kind, const Grids& grids);

// Same elastic operators and energy weights, heat pair removed. The result is
// skew-adjoint in the energy inner product.
BlockGenerator assemble_conservative_core(const ValidatedParams& p, SystemKind kind, const Grids& grids);

template <class T>
StateVector<T> apply_generator(const BlockGenerator& g, const StateVector<T>& y) {
  const std::vector<T> x = g.to_internal(y);
  std::vector<T> ax(x.size());
  g.op().multiply<T>(x, ax);
  return g.from_internal<T>(ax);
}

double energy(const BlockGenerator& g, const StateVector<double>& y);
double energy(const BlockGenerator& g, const StateVector<cplx>& y);

// (gamma/kappa) ||q||^2 with the dual-node quadrature.
double dissipation(const BlockGenerator& g, const StateVector<double>& y);
double dissipation(const BlockGenerator& g, const StateVector<cplx>& y);

// <x, y> in the energy inner product (y^H G x).
double energy_inner(const BlockGenerator& g, const StateVector<double>& x, const StateVector<double>& y);
cplx energy_inner(const BlockGenerator& g, const StateVector<cplx>& x, const StateVector<cplx>& y);

// Solves A_h y = f.
StateVector<double> solve_generator(const BlockGenerator& g, const StateVector<double>& f);

// Nodal sampling of continuous fields. Missing functions sample as zero. The
// shared interface DOF takes u1(0) (resp. v1(0)); Dirichlet nodes are skipped.
struct FieldFunctions {
  std::function<double(double)> u1, v1, u2, v2, theta, q;
};
StateVector<double> sample_state(const BlockGenerator& g, const FieldFunctions& f);

// Velocity-row load for a continuous force density (g1 on the string, g2 on
// the beam): nodal values except at the interface, where the two one-sided
// values are averaged with the lumped masses of the two components.
void set_force_block(const BlockGenerator& g, StateVector<double>& f, const std::function<double(double)>& g1,
                     const std::function<double(double)>& g2);

// Location of displacement DOF k (0..n1+n2-2): component and coordinate.
struct DofLocation {
  bool on_string;
  double x;
};
DofLocation displacement_location(const BlockGenerator& g, std::size_t k);

}  // namespace sslab
