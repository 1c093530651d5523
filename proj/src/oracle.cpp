#include "kmt/oracle.hpp"

#include "kmt/errors.hpp"
#include "kmt/numerics.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace kmt {

namespace {

/// Transition probabilities of the truncated chain, three phase offsets per
/// level offset: t[i+1][j+1] for the move (i, j).
struct Moves {
  double t[3][3] = {};
};

class TruncatedChain {
 public:
  TruncatedChain(const WalkSpec& s, int N) : s_(s), N_(N) {}

  Moves at(int m, int n) const {
    Moves mv;
    double allowed = 0.0;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        const double p = raw(m, n, i, j);
        if (p == 0.0) continue;
        if (m + i < 0 || n + j < 0 || m + i > N_ || n + j > N_) continue;
        mv.t[i + 1][j + 1] = p;
        allowed += p;
      }
    if (allowed <= 0.0) {
      mv.t[1][1] = 1.0;
    } else if (allowed != 1.0) {
      for (auto& row : mv.t)
        for (double& v : row) v /= allowed;
    }
    return mv;
  }

  int N() const { return N_; }

 private:
  double raw(int m, int n, int i, int j) const {
    if (m > 0 && n > 0) return s_.p(i, j);
    if (m > 0) return s_.p_h(i, j);
    if (n > 0) return s_.p_v(i, j);
    return s_.p_o(i, j);
  }

  const WalkSpec& s_;
  int N_;
};

using Mat = std::vector<double>;  // row-major n x n

[[noreturn]] void reducible(int m, int k) {
  std::ostringstream os;
  os << "truncated chain is reducible (zero pivot at level " << m << ", phase " << k << ")";
  throw Error(ErrorCode::kNotConverged, os.str());
}

/// One level of the backward reduction. On entry U holds the censored
/// within-level block of level m; on exit R holds R_{m-1} = Up_{m-1} (I-U)^{-1}
/// and U holds the censored block of level m-1.
void reduce_level(const TruncatedChain& ch, int m, Mat& U, Mat& R, std::vector<double>& e,
                  std::vector<double>& d, std::vector<double>& y) {
  const int n = ch.N() + 1;
  // Excess of I - U: probability of leaving level m downward.
  for (int k = 0; k < n; ++k) {
    const Moves mv = ch.at(m, k);
    e[k] = mv.t[0][0] + mv.t[0][1] + mv.t[0][2];
  }
  // GTH LU in place. Off-diagonal of U is W; the diagonal is never read.
  for (int k = 0; k < n; ++k) {
    double* wk = &U[static_cast<size_t>(k) * n];
    double piv = e[k];
    for (int j = k + 1; j < n; ++j) piv += wk[j];
    if (!(piv > 0.0)) reducible(m, k);
    d[k] = piv;
    for (int i = k + 1; i < n; ++i) {
      double* wi = &U[static_cast<size_t>(i) * n];
      if (wi[k] == 0.0) continue;
      const double f = wi[k] / piv;
      wi[k] = f;
      e[i] += f * e[k];
      for (int j = k + 1; j < n; ++j) wi[j] += f * wk[j];
    }
  }
  // Rows of R_{m-1}: solve x (I - U) = Up_{m-1}[r, :].
  for (int r = 0; r < n; ++r) {
    std::fill(y.begin(), y.end(), 0.0);
    const Moves mv = ch.at(m - 1, r);
    int first = n;
    for (int j = -1; j <= 1; ++j) {
      const int c = r + j;
      if (c < 0 || c >= n || mv.t[2][j + 1] == 0.0) continue;
      y[c] = mv.t[2][j + 1];
      first = std::min(first, c);
    }
    double* out = &R[static_cast<size_t>(r) * n];
    if (first == n) {
      std::fill(out, out + n, 0.0);
      continue;
    }
    for (int k = first; k < n; ++k) {
      const double z = y[k] / d[k];
      y[k] = z;
      if (z == 0.0) continue;
      const double* wk = &U[static_cast<size_t>(k) * n];
      for (int j = k + 1; j < n; ++j) y[j] += z * wk[j];
    }
    for (int k = n - 1; k > 0; --k) {
      const double x = y[k];
      if (x == 0.0) continue;
      const double* wk = &U[static_cast<size_t>(k) * n];
      for (int i = 0; i < k; ++i) y[i] += x * wk[i];
    }
    std::copy(y.begin(), y.end(), out);
  }
  // U_{m-1} = Local_{m-1} + R_{m-1} Down_m.
  std::fill(U.begin(), U.end(), 0.0);
  std::vector<Moves> down(n);
  for (int k = 0; k < n; ++k) down[k] = ch.at(m, k);
  for (int r = 0; r < n; ++r) {
    double* ur = &U[static_cast<size_t>(r) * n];
    const Moves loc = ch.at(m - 1, r);
    for (int j = -1; j <= 1; ++j)
      if (r + j >= 0 && r + j < n) ur[r + j] += loc.t[1][j + 1];
    const double* rr = &R[static_cast<size_t>(r) * n];
    for (int k = 0; k < n; ++k) {
      const double v = rr[k];
      if (v == 0.0) continue;
      for (int j = -1; j <= 1; ++j) {
        const int c = k + j;
        if (c >= 0 && c < n) ur[c] += v * down[k].t[0][j + 1];
      }
    }
  }
}

void local_block(const TruncatedChain& ch, int m, Mat& U) {
  const int n = ch.N() + 1;
  std::fill(U.begin(), U.end(), 0.0);
  for (int r = 0; r < n; ++r) {
    const Moves mv = ch.at(m, r);
    for (int j = -1; j <= 1; ++j)
      if (r + j >= 0 && r + j < n) U[static_cast<size_t>(r) * n + r + j] += mv.t[1][j + 1];
  }
}

/// GTH stationary vector (unnormalized) of the stochastic block P.
std::vector<double> gth_stationary(Mat& P, int n) {
  for (int k = n - 1; k > 0; --k) {
    double* pk = &P[static_cast<size_t>(k) * n];
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += pk[j];
    if (!(s > 0.0)) reducible(0, k);
    for (int i = 0; i < k; ++i) {
      double* pi = &P[static_cast<size_t>(i) * n];
      pi[k] /= s;
      const double f = pi[k];
      if (f == 0.0) continue;
      for (int j = 0; j < k; ++j) pi[j] += f * pk[j];
    }
  }
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  for (int k = 1; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += x[i] * P[static_cast<size_t>(i) * n + k];
    x[k] = acc;
  }
  return x;
}

void advance(const double* R, const double* prev, double* next, int n) {
  std::fill(next, next + n, 0.0);
  for (int r = 0; r < n; ++r) {
    const double v = prev[r];
    if (v == 0.0) continue;
    const double* rr = R + static_cast<size_t>(r) * n;
    for (int j = 0; j < n; ++j) next[j] += v * rr[j];
  }
}

double residual_l1(const TruncatedChain& ch, const std::vector<double>& pi) {
  const int n = ch.N() + 1;
  std::vector<double> out(pi.size(), 0.0);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      const double v = pi[static_cast<size_t>(m) * n + k];
      if (v == 0.0) continue;
      const Moves mv = ch.at(m, k);
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
          const double p = mv.t[i + 1][j + 1];
          if (p != 0.0) out[static_cast<size_t>(m + i) * n + k + j] += v * p;
        }
    }
  double r = 0.0;
  for (size_t s = 0; s < pi.size(); ++s) r += std::abs(out[s] - pi[s]);
  return r;
}

}  // namespace

TruncatedSolution solve_truncated(const WalkSpec& spec, int N, const SolveOptions& opts) {
  if (N < 1) throw Error(ErrorCode::kBadParameter, "truncation N must be positive");
  const TruncatedChain ch(spec, N);
  const int n = N + 1;
  const size_t block = static_cast<size_t>(n) * n;

  TruncatedSolution ts;
  ts.N = N;
  ts.pi.assign(block, 0.0);

  Mat U(block), Rtmp(block);
  std::vector<double> e(n), d(n), y(n);
  local_block(ch, N, U);

  const bool store_all = static_cast<double>(N) * block * sizeof(double) <=
                         static_cast<double>(opts.memory_budget);
  if (store_all) {
    ts.method = "block-gth";
    std::vector<double> Rall(static_cast<size_t>(N) * block);
    for (int m = N; m >= 1; --m) {
      reduce_level(ch, m, U, Rtmp, e, d, y);
      std::copy(Rtmp.begin(), Rtmp.end(), Rall.begin() + static_cast<size_t>(m - 1) * block);
    }
    const auto x0 = gth_stationary(U, n);
    std::copy(x0.begin(), x0.end(), ts.pi.begin());
    for (int m = 1; m <= N; ++m) {
      advance(Rall.data() + static_cast<size_t>(m - 1) * block, &ts.pi[static_cast<size_t>(m - 1) * n], &ts.pi[static_cast<size_t>(m) * n], n);
    }
  } else {
    // Checkpoint U at every B-th level and recompute R segment by segment.
    ts.method = "block-gth-checkpointed";
    const int B = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N)))));
    std::vector<Mat> checkpoints;  // U_t for t = N, and multiples of B below N
    std::vector<int> levels;
    checkpoints.push_back(U);
    levels.push_back(N);
    for (int m = N; m >= 1; --m) {
      reduce_level(ch, m, U, Rtmp, e, d, y);
      if ((m - 1) % B == 0 && m - 1 > 0) {
        checkpoints.push_back(U);
        levels.push_back(m - 1);
      }
    }
    const auto x0 = gth_stationary(U, n);
    std::copy(x0.begin(), x0.end(), ts.pi.begin());
    std::vector<Mat> seg;
    int s = 0;
    while (s < N) {
      const int t = std::min(N, (s / B + 1) * B);
      const auto it = std::find(levels.begin(), levels.end(), t);
      Mat W = checkpoints[static_cast<size_t>(it - levels.begin())];
      seg.assign(static_cast<size_t>(t - s), Mat(block));
      for (int m = t; m > s; --m) reduce_level(ch, m, W, seg[static_cast<size_t>(m - 1 - s)], e, d, y);
      for (int m = s + 1; m <= t; ++m) {
        advance(seg[static_cast<size_t>(m - 1 - s)].data(), &ts.pi[static_cast<size_t>(m - 1) * n],
                &ts.pi[static_cast<size_t>(m) * n], n);
      }
      s = t;
    }
  }

  double total = 0.0;
  for (double v : ts.pi) total += v;
  for (double& v : ts.pi) v /= total;

  ts.residual = residual_l1(ch, ts.pi);
  for (int k = 0; k < n; ++k) {
    ts.mass_at_edge += ts.at(N, k);
    if (k < N) ts.mass_at_edge += ts.at(k, N);
  }

  std::ostringstream os;
  os.precision(6);
  if (!(ts.residual < opts.max_residual)) {
    os << "residual " << ts.residual << " exceeds " << opts.max_residual;
    throw Error(ErrorCode::kNotConverged, os.str());
  }
  if (ts.mass_at_edge > opts.edge_mass_limit && !opts.allow_truncation_suspect) {
    os << "mass on the truncation frontier " << ts.mass_at_edge << " exceeds "
       << opts.edge_mass_limit << " at N = " << N;
    throw Error(ErrorCode::kTruncationSuspect, os.str());
  }
  return ts;
}

std::vector<double> boundary_sequence(const TruncatedSolution& ts) {
  std::vector<double> out(ts.N);
  for (int m = 1; m <= ts.N; ++m) out[m - 1] = ts.at(m, 0);
  return out;
}

std::vector<double> vertical_sequence(const TruncatedSolution& ts) {
  std::vector<double> out(ts.N);
  for (int k = 1; k <= ts.N; ++k) out[k - 1] = ts.at(0, k);
  return out;
}

TailFit fit_tail(std::span<const double> seq, int n0, int n1, int offset) {
  const int len = static_cast<int>(seq.size());
  if (n0 < 1 || n1 > len - 1 || n1 - n0 < 8) {
    std::ostringstream os;
    os << "fit window [" << n0 << ", " << n1 << "] too short or outside 1.." << len - 1;
    throw Error(ErrorCode::kWindowTooNoisy, os.str());
  }
  for (int k = n0; k <= n1 + 1; ++k) {
    const double v = seq[k - 1];
    if (!(v > 0.0) || !std::isfinite(v) || v < 1e-290) {
      std::ostringstream os;
      os << "non-positive or unrepresentable value at n = " << k;
      throw Error(ErrorCode::kWindowTooNoisy, os.str());
    }
  }
  // log seq = log c + alpha log n + (n - offset) log theta, solved jointly on
  // centred columns.
  struct Joint {
    double log_theta, alpha, log_c, r_squared, rms;
  };
  const auto joint = [&](int a, int b) {
    const int m = b - a + 1;
    const double nc = 0.5 * (a + b), lc = std::log(nc);
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd y(m);
    for (int k = a; k <= b; ++k) {
      A(k - a, 0) = 1.0;
      A(k - a, 1) = std::log(static_cast<double>(k)) - lc;
      A(k - a, 2) = (k - nc) / nc;
      y(k - a) = std::log(seq[k - 1]);
    }
    const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd res = y - A * sol;
    const double mean = y.mean();
    const double ss = (y.array() - mean).square().sum();
    Joint j;
    j.log_theta = sol(2) / nc;
    j.alpha = sol(1);
    j.log_c = sol(0) - j.alpha * lc - (nc - offset) * j.log_theta;
    j.rms = std::sqrt(res.squaredNorm() / m);
    j.r_squared = ss > 0.0 ? 1.0 - res.squaredNorm() / ss : 1.0;
    return j;
  };

  TailFit fit;
  fit.n0 = n0;
  fit.n1 = n1;
  fit.offset = offset;
  const Joint all = joint(n0, n1);
  fit.theta_hat = std::exp(all.log_theta);
  fit.alpha_hat = all.alpha;
  fit.c_hat = std::exp(all.log_c);
  fit.r_squared = all.r_squared;
  fit.residual_rms = all.rms;

  const int mid = (n0 + n1) / 2;
  const Joint lo = joint(n0, mid), hi = joint(mid, n1);
  fit.theta_spread = std::abs(std::exp(lo.log_theta) - std::exp(hi.log_theta));
  fit.alpha_spread = std::abs(lo.alpha - hi.alpha);

  if (!std::isfinite(fit.theta_hat) || !(fit.theta_hat > 0.0) || !std::isfinite(fit.alpha_hat)) {
    throw Error(ErrorCode::kWindowTooNoisy, "tail fit produced non-finite parameters");
  }
  return fit;
}

int effective_truncation(const TruncatedSolution& ts) {
  const int N = ts.N;
  std::vector<double> level(N + 1, 0.0);
  for (int m = 0; m <= N; ++m)
    for (int k = 0; k <= N; ++k) level[m] += ts.at(m, k);
  double tail = 0.0;
  int best = 0;
  std::vector<double> suffix(N + 2, 0.0);
  for (int m = N; m >= 0; --m) {
    tail += level[m];
    suffix[m] = tail;
  }
  for (int m = 1; m <= N; ++m) {
    if (suffix[m] <= 0.0) break;
    const double bound = level[N] / suffix[m];
    if (bound < 1e-3 && ts.at(m, 0) > 1e-280) best = m;
  }
  return best;
}

std::pair<int, int> default_window(const TruncatedSolution& ts) {
  const int ne = effective_truncation(ts);
  return {static_cast<int>(std::floor(kFitWindowLo * ne)),
          static_cast<int>(std::floor(kFitWindowHi * ne))};
}

namespace {

double series_radius(std::span<const double> seq) {
  // Finite support (all trailing zeros) has infinite radius.
  int last = -1;
  for (int k = 0; k < static_cast<int>(seq.size()); ++k)
    if (seq[k] > 0.0) last = k;
  if (last < 0) return kInf;
  const int len = static_cast<int>(seq.size());
  const int n1 = std::min(len - 2, static_cast<int>(0.8 * len));
  const int n0 = static_cast<int>(0.5 * len);
  try {
    return 1.0 / fit_tail(seq, n0, n1, 1).theta_hat;
  } catch (const Error&) {
    return kInf;
  }
}

}  // namespace

GfValue eval_gf(const TruncatedSolution& ts, GfKind which, cplx z, cplx w) {
  GfValue g;
  const int N = ts.N;
  if (which == GfKind::kPi) {
    const auto sx = boundary_sequence(ts);
    const auto sy = vertical_sequence(ts);
    const double rx = series_radius(sx), ry = series_radius(sy);
    g.radius = rx;
    if (std::abs(z) >= rx || std::abs(w) >= ry) {
      throw Error(ErrorCode::kOutsideConvergence, "point outside the estimated convergence domain");
    }
    cplx zp = 1.0;
    for (int m = 1; m <= N; ++m) {
      cplx inner = 0.0, wp = 1.0;
      for (int k = 1; k <= N; ++k) {
        inner += ts.at(m, k) * wp;
        wp *= w;
      }
      g.value += inner * zp;
      if (m >= 2) g.derivative += static_cast<double>(m - 1) * inner * (zp / z);
      zp *= z;
    }
    return g;
  }
  const auto seq = which == GfKind::kPi1 ? boundary_sequence(ts) : vertical_sequence(ts);
  g.radius = series_radius(seq);
  if (std::abs(z) >= g.radius) {
    std::ostringstream os;
    os.precision(17);
    os << "|z| = " << std::abs(z) << " is outside the estimated radius " << g.radius;
    throw Error(ErrorCode::kOutsideConvergence, os.str());
  }
  // Horner for value and derivative.
  cplx v = 0.0, dv = 0.0;
  for (int k = N; k >= 1; --k) {
    dv = dv * z + v;
    v = v * z + seq[k - 1];
  }
  g.value = v;
  g.derivative = dv;
  if (std::isfinite(g.radius)) {
    const double q = std::abs(z) / g.radius;
    g.tail_bound = seq[N - 1] * std::pow(std::abs(z), N - 1) * q / (1.0 - q);
  }
  return g;
}

void write_sequence_csv(std::ostream& os, std::span<const double> seq) {
  os << "n,pi_n0\n";
  os << std::setprecision(17);
  for (size_t k = 0; k < seq.size(); ++k) os << (k + 1) << "," << seq[k] << "\n";
}

}  // namespace kmt
