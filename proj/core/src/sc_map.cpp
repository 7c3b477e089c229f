#include "pathmin/sc_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "sc_integrand.hpp"

namespace pathmin {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> exponents(const WalkPolygon& poly) {
  const auto angles = turning_angles(poly);
  std::vector<double> a(poly.nodes());
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = angles.alpha[m] - 1.0;
  return a;
}

bool strictly_increasing(std::span<const double> z) {
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (!(z[i] > z[i - 1])) return false;
  }
  return true;
}

bool valid_prevertices(std::span<const double> z, std::size_t nodes) {
  return z.size() == nodes && z.front() == 0.0 && z.back() == 1.0 && strictly_increasing(z);
}

std::vector<double> arcsine_nodes(const WalkPolygon& poly) {
  std::vector<double> z(poly.nodes());
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double s = std::sin(0.5 * kPi * poly.time(k));
    z[k] = s * s;
  }
  z.front() = 0.0;
  z.back() = 1.0;
  return z;
}

double relative_side_error(std::span<const double> I, const WalkPolygon& poly) {
  double isum = 0.0;
  double lsum = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) {
    isum += I[k];
    lsum += poly.edge_length(k);
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) {
    worst = std::max(worst, std::abs((I[k] / isum) / (poly.edge_length(k) / lsum) - 1.0));
  }
  return worst;
}

bool valid_gaps(std::span<const double> g, std::size_t edges) {
  if (g.size() != edges) return false;
  for (double x : g) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  }
  return true;
}

std::vector<double> z_from_gaps(std::span<const double> g) {
  std::vector<double> z(g.size() + 1, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) z[i + 1] = z[i] + g[i];
  const double total = z.back();
  for (double& x : z) x /= total;
  z.back() = 1.0;
  return z;
}

/// Gaps of the beta = 0 pre-vertices sin^2(pi t / 2), without cancellation.
std::vector<double> arcsine_gaps(const WalkPolygon& poly) {
  std::vector<double> g(poly.edges());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = poly.time(k);
    const double b = poly.time(k + 1);
    g[k] = std::sin(0.5 * kPi * (b - a)) * std::sin(0.5 * kPi * (a + b));
  }
  return g;
}

/// Unknowns v_0..v_{n-2}; gaps are softmax([v, 0]) so the pre-vertices stay
/// ordered in [0, 1].
class FullProblem {
 public:
  FullProblem(const WalkPolygon& poly, int order)
      : poly_(poly), integrand_(exponents(poly), order), n_(poly.edges()) {
    log_len_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) log_len_[k] = std::log(poly.edge_length(k));
  }

  std::size_t unknowns() const { return n_ - 1; }

  Eigen::VectorXd to_v(std::span<const double> gaps) const {
    Eigen::VectorXd v(unknowns());
    const double last = std::log(gaps[n_ - 1]);
    for (std::size_t i = 0; i + 1 < n_; ++i) v(i) = std::log(gaps[i]) - last;
    return v;
  }

  void to_gaps(const Eigen::VectorXd& v, std::vector<double>& g) const {
    double vmax = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) vmax = std::max(vmax, v(i));
    g.resize(n_);
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      g[i] = std::exp((i + 1 < n_ ? v(i) : 0.0) - vmax);
      total += g[i];
    }
    for (double& x : g) x /= total;
  }

  /// Residuals F_k = ln(I_k / I_{n-1}) - ln(L_k / L_{n-1}). Returns false if a
  /// gap underflows.
  bool evaluate(const Eigen::VectorXd& v, Eigen::VectorXd& F, Eigen::MatrixXd* J,
                JacobianMode mode) {
    to_gaps(v, g_);
    if (!valid_gaps(g_, n_)) return false;
    integrand_.set_gaps(g_);
    Eigen::MatrixXd dI;
    std::vector<double> diag;
    const bool analytic = J && mode == JacobianMode::analytic;
    integrand_.edge_integrals(I_, analytic ? &dI : nullptr, analytic ? &diag : nullptr);
    F.resize(static_cast<Eigen::Index>(unknowns()));
    const double ref = std::log(I_[n_ - 1]) - log_len_[n_ - 1];
    for (std::size_t k = 0; k + 1 < n_; ++k) {
      F(k) = std::log(I_[k]) - log_len_[k] - ref;
    }
    if (!std::isfinite(F.norm())) return false;
    if (!J) return true;
    const auto m = static_cast<Eigen::Index>(unknowns());
    if (analytic) {
      // F is invariant under scaling the gaps, so dF/dv_i = g_i dF/dg_i.
      const Eigen::MatrixXd dg = detail::gap_jacobian(dI, diag);
      J->resize(m, m);
      for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index i = 0; i < m; ++i) {
          J->coeffRef(k, i) = g_[i] * (dg(k, i) / I_[k] - dg(m, i) / I_[n_ - 1]);
        }
      }
    } else {
      const std::vector<double> I0 = I_;
      J->resize(m, m);
      Eigen::VectorXd Fh;
      for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::VectorXd vh = v;
        const double h = 1e-7 * std::max(1.0, std::abs(v(i)));
        vh(i) += h;
        if (!evaluate(vh, Fh, nullptr, mode)) return false;
        J->col(i) = (Fh - F) / h;
      }
      I_ = I0;
      to_gaps(v, g_);
    }
    return true;
  }

  const std::vector<double>& gaps() const { return g_; }
  const std::vector<double>& integrals() const { return I_; }

 private:
  const WalkPolygon& poly_;
  detail::ScIntegrand integrand_;
  std::size_t n_;
  std::vector<double> log_len_;
  std::vector<double> g_;
  std::vector<double> I_;
};

}  // namespace

WalkPolygon::WalkPolygon(std::vector<double> times, std::vector<double> values, double beta)
    : times_(std::move(times)), values_(std::move(values)), beta_(beta) {
  if (times_.size() < 2) throw std::invalid_argument("walk needs at least two nodes");
  if (times_.size() != values_.size()) {
    throw std::invalid_argument("walk times and values differ in length");
  }
  if (!(beta_ >= 0.0) || !std::isfinite(beta_)) {
    throw std::invalid_argument("beta must be finite and nonnegative");
  }
  if (times_.front() != 0.0 || times_.back() != 1.0) {
    throw std::invalid_argument("walk times must run from 0 to 1");
  }
  if (!strictly_increasing(times_)) {
    throw std::invalid_argument("walk times must increase strictly");
  }
  for (double w : values_) {
    if (!std::isfinite(w)) throw std::invalid_argument("walk values must be finite");
  }
  if (values_.front() != 0.0 || values_.back() != 0.0) {
    throw std::invalid_argument("walk must start and end at 0");
  }
}

WalkPolygon WalkPolygon::flat(std::vector<double> times) {
  std::vector<double> values(times.size(), 0.0);
  return WalkPolygon(std::move(times), std::move(values), 0.0);
}

double WalkPolygon::slope(std::size_t k) const {
  return (height(k + 1) - height(k)) / (times_[k + 1] - times_[k]);
}

double WalkPolygon::edge_length(std::size_t k) const {
  return std::hypot(times_[k + 1] - times_[k], height(k + 1) - height(k));
}

double WalkPolygon::min_height() const {
  return beta_ * *std::min_element(values_.begin(), values_.end());
}

WalkPolygon WalkPolygon::with_beta(double beta) const { return {times_, values_, beta}; }

WalkPolygon WalkPolygon::time_reversed() const {
  std::vector<double> t(times_.size());
  std::vector<double> w(values_.rbegin(), values_.rend());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = 1.0 - times_[times_.size() - 1 - k];
  t.front() = 0.0;
  t.back() = 1.0;
  return {std::move(t), std::move(w), beta_};
}

WalkPolygon WalkPolygon::negated() const {
  std::vector<double> w(values_.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = values_[k] == 0.0 ? 0.0 : -values_[k];
  return {times_, std::move(w), beta_};
}

double TurningAngles::angle_sum() const {
  double s = 0.0;
  for (double a : alpha) s += 1.0 - a;
  return s;
}

TurningAngles turning_angles(const WalkPolygon& poly) {
  const std::size_t n = poly.edges();
  TurningAngles out;
  out.alpha.assign(n + 2, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    const double eta_plus = k < n ? 0.5 + std::atan(poly.slope(k)) / kPi : 0.0;
    const double eta_minus = k > 0 ? 0.5 - std::atan(poly.slope(k - 1)) / kPi : 0.0;
    out.alpha[k] = eta_plus + eta_minus;
  }
  return out;
}

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::full ? "full" : "perturbative";
}

SolverKind solver_kind_from_string(std::string_view name) {
  if (name == "full") return SolverKind::full;
  if (name == "perturbative") return SolverKind::perturbative;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

nlohmann::json to_json(const PreVertexSolution& sol) {
  nlohmann::json j = {{"z", sol.z},
                      {"gaps", sol.gaps},
                      {"solver", to_string(sol.solver)},
                      {"c_constant", sol.c_constant},
                      {"iterations", sol.iterations}};
  if (std::isfinite(sol.residual_norm)) {
    j["residual_norm"] = sol.residual_norm;
  } else {
    j["residual_norm"] = nullptr;
  }
  return j;
}

PreVertexSolution prevertex_solution_from_json(const nlohmann::json& j) {
  PreVertexSolution sol;
  sol.z = j.at("z").get<std::vector<double>>();
  if (j.contains("gaps")) sol.gaps = j.at("gaps").get<std::vector<double>>();
  const auto& r = j.at("residual_norm");
  sol.residual_norm = r.is_null() ? std::numeric_limits<double>::infinity() : r.get<double>();
  sol.solver = solver_kind_from_string(j.at("solver").get<std::string>());
  sol.c_constant = j.value("c_constant", 0.0);
  sol.iterations = j.value("iterations", 0);
  return sol;
}

namespace {

struct NewtonOutcome {
  std::vector<double> gaps;
  double residual_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

NewtonOutcome newton(const WalkPolygon& poly, std::span<const double> gaps0,
                     const FullSolverOptions& options) {
  NewtonOutcome out;
  FullProblem problem(poly, options.quadrature_order);
  Eigen::VectorXd v = problem.to_v(gaps0);
  Eigen::VectorXd F;
  Eigen::MatrixXd J;
  if (!problem.evaluate(v, F, &J, options.jacobian)) {
    out.gaps.assign(gaps0.begin(), gaps0.end());
    return out;
  }
  double fnorm = F.norm();
  int it = 0;
  for (; it < options.max_iterations && F.lpNorm<Eigen::Infinity>() > 1e-13; ++it) {
    Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
    const double cap = step.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(cap)) break;
    if (cap > 2.0) step *= 2.0 / cap;
    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd Ft;
    for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
      const Eigen::VectorXd vt = v + lambda * step;
      if (problem.evaluate(vt, Ft, nullptr, options.jacobian) &&
          Ft.norm() <= (1.0 - 1e-4 * lambda) * fnorm) {
        v = vt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    problem.evaluate(v, F, &J, options.jacobian);
    fnorm = F.norm();
  }
  problem.evaluate(v, F, nullptr, options.jacobian);
  out.gaps = problem.gaps();
  out.iterations = it;
  out.residual_norm = relative_side_error(problem.integrals(), poly);
  out.converged = out.residual_norm <= options.tolerance;
  return out;
}

}  // namespace

PreVertexSolution solve_prevertices_full(const WalkPolygon& poly,
                                         const FullSolverOptions& options) {
  if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (poly.nodes() > options.max_nodes) {
    throw std::invalid_argument("walk has " + std::to_string(poly.nodes()) +
                                " nodes; the full solver accepts at most " +
                                std::to_string(options.max_nodes));
  }
  PreVertexSolution sol;
  sol.solver = SolverKind::full;
  const std::size_t n = poly.edges();
  if (n == 1) {
    sol.z = {0.0, 1.0};
    sol.gaps = {1.0};
    return sol;
  }

  std::vector<double> g0;
  if (valid_gaps(options.initial_gaps, n)) {
    g0 = options.initial_gaps;
  } else if (valid_prevertices(options.initial_guess, poly.nodes())) {
    g0 = prevertex_gaps(options.initial_guess);
  } else {
    if (poly.beta() <= 0.05) {
      auto pert = solve_prevertices_perturbative(poly);
      if (valid_gaps(pert.gaps, n)) g0 = std::move(pert.gaps);
    }
    if (g0.empty()) g0 = arcsine_gaps(poly);
  }

  NewtonOutcome out = newton(poly, g0, options);
  sol.iterations = out.iterations;
  if (!out.converged) {
    // Continuation in beta from the exact beta = 0 pre-vertices.
    std::vector<double> g = arcsine_gaps(poly);
    double s = 0.0;
    double ds = 0.25;
    int stages = 0;
    while (s < 1.0 && ds > 1e-4 && stages++ < options.max_iterations) {
      const double s_try = std::min(1.0, s + ds);
      NewtonOutcome stage = newton(poly.with_beta(poly.beta() * s_try), g, options);
      sol.iterations += stage.iterations;
      if (stage.converged) {
        s = s_try;
        g = stage.gaps;
        ds *= 1.5;
        if (s == 1.0) out = std::move(stage);
      } else {
        ds *= 0.5;
      }
    }
  }
  sol.z = z_from_gaps(out.gaps);
  sol.gaps = std::move(out.gaps);
  sol.residual_norm = out.residual_norm;
  if (!out.converged) {
    throw ScSolverError("pre-vertex solver did not converge: residual " +
                            std::to_string(sol.residual_norm) + " after " +
                            std::to_string(sol.iterations) + " iterations",
                        sol);
  }
  return sol;
}

PreVertexSolution solve_prevertices_perturbative(const WalkPolygon& poly) {
  const std::size_t n = poly.edges();
  // Slope jumps D_k at node k, zero slope outside [0, 1].
  std::vector<double> d(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double right = k < n ? poly.slope(k) : 0.0;
    const double left = k > 0 ? poly.slope(k - 1) : 0.0;
    d[k] = right - left;
  }
  std::vector<double> l1(n + 1, 0.0);
  double c = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (d[k] == 0.0) continue;
    l1[k] = log_sine_integral(1.0, poly.time(k));
    c += d[k] * l1[k];
  }
  PreVertexSolution sol;
  sol.solver = SolverKind::perturbative;
  sol.c_constant = -c / kPi;
  sol.z = arcsine_nodes(poly);
  std::vector<double> xi(n + 1, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    const double t = poly.time(j);
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      if (d[k] == 0.0) continue;
      s += d[k] * (log_sine_integral(t, poly.time(k)) - t * l1[k]);
    }
    xi[j] = -0.5 * std::sin(kPi * t) * s;
    sol.z[j] += xi[j];
  }
  sol.gaps = arcsine_gaps(poly);
  for (std::size_t k = 0; k < n; ++k) sol.gaps[k] += xi[k + 1] - xi[k];
  sol.residual_norm = std::numeric_limits<double>::infinity();
  if (valid_gaps(sol.gaps, n) && strictly_increasing(sol.z)) {
    sol.residual_norm = side_length_residual_gaps(poly, sol.gaps);
  }
  return sol;
}

PreVertexSolution solve_prevertices(const WalkPolygon& poly, SolverKind kind,
                                    const FullSolverOptions& options) {
  return kind == SolverKind::full ? solve_prevertices_full(poly, options)
                                  : solve_prevertices_perturbative(poly);
}

double side_length_residual(const WalkPolygon& poly, std::span<const double> z,
                            int quadrature_order) {
  if (!valid_prevertices(z, poly.nodes())) {
    throw std::invalid_argument("pre-vertices must increase strictly from 0 to 1");
  }
  detail::ScIntegrand f(exponents(poly), quadrature_order);
  f.set_prevertices(z);
  std::vector<double> I;
  f.edge_integrals(I);
  return relative_side_error(I, poly);
}

double side_length_residual_gaps(const WalkPolygon& poly, std::span<const double> gaps,
                                 int quadrature_order) {
  if (!valid_gaps(gaps, poly.edges())) {
    throw std::invalid_argument("need one positive gap per edge");
  }
  detail::ScIntegrand f(exponents(poly), quadrature_order);
  f.set_gaps(gaps);
  std::vector<double> I;
  f.edge_integrals(I);
  return relative_side_error(I, poly);
}

std::vector<double> prevertex_gaps(std::span<const double> z) {
  if (z.size() < 2 || !strictly_increasing(z)) {
    throw std::invalid_argument("pre-vertices must increase strictly");
  }
  std::vector<double> g(z.size() - 1);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = z[k + 1] - z[k];
  return g;
}

ScMap::ScMap(const WalkPolygon& poly, std::span<const double> z, int quadrature_order) {
  if (!valid_prevertices(z, poly.nodes())) {
    throw std::invalid_argument("pre-vertices must increase strictly from 0 to 1");
  }
  auto f = std::make_shared<detail::ScIntegrand>(exponents(poly), quadrature_order);
  f->set_prevertices(z);
  init(std::move(f));
}

ScMap::ScMap(const WalkPolygon& poly, const PreVertexSolution& sol, int quadrature_order) {
  if (sol.gaps.empty()) {
    *this = ScMap(poly, sol.z, quadrature_order);
    return;
  }
  if (!valid_gaps(sol.gaps, poly.edges())) {
    throw std::invalid_argument("need one positive gap per edge");
  }
  auto f = std::make_shared<detail::ScIntegrand>(exponents(poly), quadrature_order);
  std::vector<double> g = sol.gaps;
  double total = 0.0;
  for (double x : g) total += x;
  for (double& x : g) x /= total;
  f->set_gaps(g);
  init(std::move(f));
}

void ScMap::init(std::shared_ptr<detail::ScIntegrand> f) {
  const auto z = f->prevertices();
  std::vector<double> I;
  f->edge_integrals(I);
  std::vector<std::complex<double>> steps(I.size());
  std::complex<double> total = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) {
    steps[k] = I[k] * f->edge_direction(k);
    total += steps[k];
  }
  c_ = 1.0 / total;
  vertex_images_.assign(z.size(), 0.0);
  for (std::size_t k = 0; k < I.size(); ++k) {
    vertex_images_[k + 1] = vertex_images_[k] + c_ * steps[k];
  }
  vertex_images_.back() = 1.0;
  integrand_ = std::move(f);
}

std::complex<double> ScMap::operator()(std::complex<double> z) const {
  if (z.imag() > 0.0) throw std::invalid_argument("SC map is defined on the lower half-plane");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument("SC map argument must be finite");
  }
  const auto zs = integrand_->prevertices();
  std::size_t j = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const double d = std::abs(z - zs[k]);
    if (d < best) {
      best = d;
      j = k;
    }
  }
  if (best == 0.0) return vertex_images_[j];
  const auto w = vertex_images_[j] + c_ * integrand_->integrate_from_prevertex(j, z - zs[j]);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw std::runtime_error("SC quadrature produced a non-finite value");
  }
  return w;
}

std::complex<double> sc_forward_map(const PreVertexSolution& sol, const WalkPolygon& poly,
                                    std::complex<double> z) {
  return ScMap(poly, sol)(z);
}

std::complex<double> mobius_disk_to_halfplane(std::complex<double> Z) {
  const std::complex<double> den = 1.0 + Z;
  if (den == 0.0) throw std::domain_error("Z = -1 maps to the point at infinity");
  return std::complex<double>(0.0, -1.0) * (1.0 - Z) / den;
}

std::vector<double> disk_to_halfplane_prevertices(std::span<const std::complex<double>> disk) {
  if (disk.size() < 3) throw std::invalid_argument("need at least two finite disk pre-vertices");
  const auto inf = disk.back();
  if (std::abs(std::abs(inf) - 1.0) > 1e-12) {
    throw std::invalid_argument("disk pre-vertices must lie on the unit circle");
  }
  const std::complex<double> rot = -1.0 / inf;
  std::vector<double> xi(disk.size() - 1);
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (std::abs(std::abs(disk[k]) - 1.0) > 1e-12) {
      throw std::invalid_argument("disk pre-vertices must lie on the unit circle");
    }
    xi[k] = mobius_disk_to_halfplane(disk[k] * rot).real();
  }
  const double a = xi.front();
  const double c = xi.back() - a;
  for (double& x : xi) x = (x - a) / c;
  xi.front() = 0.0;
  xi.back() = 1.0;
  if (!(c > 0.0) || !strictly_increasing(xi)) {
    throw std::invalid_argument("disk pre-vertices are not in clockwise order");
  }
  return xi;
}

double telescoping_residual(const WalkPolygon& poly) {
  const std::size_t n = poly.edges();
  std::vector<double> d(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    d[k] = (k < n ? poly.slope(k) : 0.0) - (k > 0 ? poly.slope(k - 1) : 0.0);
  }
  double worst = 0.0;
  double run = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    if (j > 0) run += poly.slope(j - 1) * (poly.time(j) - poly.time(j - 1));
    double jumps = 0.0;
    for (std::size_t k = 0; k <= n; ++k) jumps -= d[k] * std::min(poly.time(j), poly.time(k));
    const double h = poly.height(j);
    const double scale = std::max(1.0, std::abs(h));
    worst = std::max({worst, std::abs(run - h) / scale, std::abs(jumps - h) / scale});
  }
  return worst;
}

}  // namespace pathmin
