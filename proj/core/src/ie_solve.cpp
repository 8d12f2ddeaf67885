#include "accprec/ie_solve.hpp"

#include <cmath>

#include "accprec/errors.hpp"

namespace accprec {

namespace {

void divide_by_d(const Vector& d, Vector& y) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) throw SingularError(i, "rrd_solve: zero entry in D");
    y[i] /= d[i];
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Vector rrd_solve(const RrdFactors& f, std::span<const double> b) {
  if (b.size() != f.size()) throw DimensionMismatch("rrd_solve: size mismatch");
  Vector y = solve_unit_lower(f.L, b);
  divide_by_d(f.D, y);
  return solve_unit_upper(f.U, y);
}

Vector rrd_solve_transpose(const RrdFactors& f, std::span<const double> b) {
  if (b.size() != f.size()) throw DimensionMismatch("rrd_solve_transpose: size mismatch");
  Vector y = solve_unit_upper_transpose(f.U, b);
  divide_by_d(f.D, y);
  return solve_unit_lower_transpose(f.L, y);
}

SolveStep make_rrd_step(RrdFactors f) {
  return RrdStep{std::make_shared<const RrdFactors>(std::move(f))};
}

SolveStep make_explicit_inverse_step(DenseMatrix inverse) {
  if (inverse.rows() != inverse.cols())
    throw DimensionMismatch("explicit inverse step must be square");
  return ExplicitInverseStep{std::make_shared<const DenseMatrix>(std::move(inverse))};
}

SolveStep make_diagonal_step(Vector diagonal) {
  for (std::size_t i = 0; i < diagonal.size(); ++i)
    if (diagonal[i] == 0.0) throw SingularError(i, "diagonal step has a zero entry");
  return DiagonalStep{std::make_shared<const Vector>(std::move(diagonal))};
}

SolveStep make_chol_step(const BandMatrix& m) {
  return CholBaselineStep{std::make_shared<const BandCholesky>(m)};
}

std::size_t step_size(const SolveStep& s) {
  return std::visit(Overloaded{
                        [](const RrdStep& r) { return r.factors->size(); },
                        [](const ExplicitInverseStep& e) { return e.inverse->rows(); },
                        [](const DiagonalStep& d) { return d.diagonal->size(); },
                        [](const CholBaselineStep& c) { return c.factor->size(); },
                    },
                    s);
}

Vector step_solve(const SolveStep& s, std::span<const double> b) {
  return std::visit(Overloaded{
                        [&](const RrdStep& r) { return rrd_solve(*r.factors, b); },
                        [&](const ExplicitInverseStep& e) { return explicit_inverse_apply(*e.inverse, b); },
                        [&](const DiagonalStep& d) {
                          Vector x(b.begin(), b.end());
                          for (std::size_t i = 0; i < x.size(); ++i) x[i] /= (*d.diagonal)[i];
                          return x;
                        },
                        [&](const CholBaselineStep& c) { return c.factor->solve(b); },
                    },
                    s);
}

Vector step_solve_transpose(const SolveStep& s, std::span<const double> b) {
  return std::visit(Overloaded{
                        [&](const RrdStep& r) { return rrd_solve_transpose(*r.factors, b); },
                        [&](const ExplicitInverseStep& e) { return spmv_transpose(*e.inverse, b); },
                        [&](const DiagonalStep&) { return step_solve(s, b); },
                        [&](const CholBaselineStep& c) { return c.factor->solve(b); },
                    },
                    s);
}

PrecondHandle::PrecondHandle(double alpha, std::vector<SolveStep> chain)
    : alpha_(alpha), chain_(std::move(chain)) {
  if (alpha_ == 0.0 || !std::isfinite(alpha_)) throw Error("PrecondHandle: alpha must be finite and nonzero");
  if (chain_.empty()) throw Error("PrecondHandle: empty chain");
  n_ = step_size(chain_.front());
  for (const auto& s : chain_)
    if (step_size(s) != n_) throw DimensionMismatch("PrecondHandle: chain steps differ in size");
}

Vector PrecondHandle::solve(std::span<const double> b) const {
  if (b.size() != n_) throw DimensionMismatch("handle_solve: size mismatch");
  Vector t(b.begin(), b.end());
  if (alpha_ != 1.0)
    for (double& x : t) x /= alpha_;
  for (const auto& s : chain_) t = step_solve(s, t);
  return t;
}

Vector PrecondHandle::solve_transpose(std::span<const double> b) const {
  if (b.size() != n_) throw DimensionMismatch("handle_solve_transpose: size mismatch");
  Vector t(b.begin(), b.end());
  if (alpha_ != 1.0)
    for (double& x : t) x /= alpha_;
  for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) t = step_solve_transpose(*it, t);
  return t;
}

Vector handle_solve(const PrecondHandle& h, std::span<const double> b) { return h.solve(b); }

Vector explicit_inverse_apply(const DenseMatrix& minv, std::span<const double> b) {
  if (minv.cols() != b.size()) throw DimensionMismatch("explicit_inverse_apply: size mismatch");
  return spmv(minv, b);
}

DenseMatrix invert_via_handle(const PrecondHandle& h) {
  const std::size_t n = h.size();
  if (n > 4096) throw Error("invert_via_handle: limited to n <= 4096");
  DenseMatrix x(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    x.set_column(j, h.solve(e));
    e[j] = 0.0;
  }
  return x;
}

}  // namespace accprec
