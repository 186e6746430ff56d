#include "hychoice/factors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hychoice/errors.hpp"

namespace hychoice {

Eigen::MatrixXd correlation_matrix(const Dataset& data,
                                   const std::vector<std::string>& indicators) {
  const int p = static_cast<int>(indicators.size());
  if (p < 1) throw DomainError("correlation_matrix: no indicators given");
  const std::size_t n = data.size();

  std::vector<std::vector<double>> cols(p);
  std::vector<std::vector<unsigned char>> present(p);
  for (int j = 0; j < p; ++j) data.column(indicators[j], cols[j], present[j]);

  // Zero variance over a column's complete rows makes every correlation
  // with it undefined.
  for (int j = 0; j < p; ++j) {
    double mn = 0, mx = 0;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!present[j][i]) continue;
      if (first) {
        mn = mx = cols[j][i];
        first = false;
      } else {
        mn = std::min(mn, cols[j][i]);
        mx = std::max(mx, cols[j][i]);
      }
    }
    if (first || mn == mx)
      throw DomainError("correlation_matrix: indicator '" + indicators[j] +
                        "' has no variance");
  }

  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(p, p);
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      double sx = 0, sy = 0;
      std::size_t m = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!present[a][i] || !present[b][i]) continue;
        sx += cols[a][i];
        sy += cols[b][i];
        ++m;
      }
      if (m < 2)
        throw DomainError("correlation_matrix: indicators '" + indicators[a] + "' and '" +
                          indicators[b] + "' share fewer than 2 complete rows");
      const double mx = sx / m, my = sy / m;
      double sxx = 0, syy = 0, sxy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!present[a][i] || !present[b][i]) continue;
        const double dx = cols[a][i] - mx, dy = cols[b][i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
      }
      if (sxx == 0.0 || syy == 0.0)
        throw DomainError("correlation_matrix: indicator '" +
                          indicators[sxx == 0.0 ? a : b] + "' has no variance");
      corr(a, b) = corr(b, a) = sxy / std::sqrt(sxx * syy);
    }
  }
  return corr;
}

namespace {

// One varimax sweep over all column pairs (raw criterion, no row weighting).
double varimax_sweep(Eigen::MatrixXd& L) {
  const int p = static_cast<int>(L.rows());
  const int m = static_cast<int>(L.cols());
  double rotated = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Eigen::ArrayXd a = L.col(i).array(), b = L.col(j).array();
      const Eigen::ArrayXd u = a * a - b * b, v = 2.0 * a * b;
      const double A = u.sum(), B = v.sum();
      const double C = (u * u - v * v).sum(), D = (2.0 * u * v).sum();
      const double num = D - 2.0 * A * B / p;
      const double den = C - (A * A - B * B) / p;
      const double theta = 0.25 * std::atan2(num, den);
      if (std::abs(theta) < 1e-12) continue;
      const double c = std::cos(theta), s = std::sin(theta);
      const Eigen::VectorXd ci = L.col(i);
      L.col(i) = c * ci + s * L.col(j);
      L.col(j) = -s * ci + c * L.col(j).eval();
      rotated += std::abs(theta);
    }
  }
  return rotated;
}

void fix_signs(Eigen::MatrixXd& L) {
  for (int j = 0; j < L.cols(); ++j) {
    int arg = 0;
    L.col(j).cwiseAbs().maxCoeff(&arg);
    if (L(arg, j) < 0) L.col(j) = -L.col(j);
  }
}

}  // namespace

FactorSolution extract_factors(const Eigen::MatrixXd& corr, const Retention& retention) {
  const int p = static_cast<int>(corr.rows());
  if (p < 2 || corr.cols() != p) throw DomainError("extract_factors: need a square matrix, p >= 2");
  if ((corr - corr.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw DomainError("extract_factors: correlation matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(corr);
  FactorSolution sol;
  for (int i = p - 1; i >= 0; --i) sol.eigenvalues.push_back(full.eigenvalues()(i));

  int m = retention.count;
  if (m <= 0) {
    if (!retention.kaiser) throw DomainError("extract_factors: no retention rule");
    m = static_cast<int>(std::count_if(sol.eigenvalues.begin(), sol.eigenvalues.end(),
                                       [](double e) { return e > 1.0; }));
    if (m == 0)
      throw DomainError("extract_factors: no eigenvalue above 1; pass an explicit count");
  }
  if (m > p) throw DomainError("extract_factors: retained count exceeds indicator count");
  sol.n_factors = m;

  // Principal axis: iterate communalities on the reduced matrix diagonal.
  Eigen::VectorXd h2(p);
  for (int i = 0; i < p; ++i) {
    double best = 0.0;
    for (int j = 0; j < p; ++j)
      if (j != i) best = std::max(best, std::abs(corr(i, j)));
    h2(i) = best;
  }
  Eigen::MatrixXd L(p, m);
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::MatrixXd reduced = corr;
    reduced.diagonal() = h2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
    for (int f = 0; f < m; ++f) {
      const double lambda = std::max(0.0, eig.eigenvalues()(p - 1 - f));
      L.col(f) = eig.eigenvectors().col(p - 1 - f) * std::sqrt(lambda);
    }
    Eigen::VectorXd next = L.array().square().rowwise().sum().min(1.0);
    const double step = (next - h2).cwiseAbs().maxCoeff();
    h2 = next;
    if (step < 1e-9) break;
  }

  if (m >= 2) {
    for (int sweep = 0; sweep < 100; ++sweep)
      if (varimax_sweep(L) < 1e-10) break;
  }
  fix_signs(L);
  sol.loadings = L;

  for (int i = 0; i < p; ++i) {
    sol.communalities.push_back(L.row(i).squaredNorm());
    int arg = 0;
    double best = -1.0;
    for (int f = 0; f < m; ++f) {
      if (std::abs(L(i, f)) > best) {  // strict: ties stay with the lower factor
        best = std::abs(L(i, f));
        arg = f;
      }
    }
    sol.assignment.push_back(arg);
  }
  return sol;
}

}  // namespace hychoice
