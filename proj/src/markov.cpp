#include "crh/markov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crh/core_model.hpp"

namespace crh::markov {

namespace {

void require_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameter(std::string(name) + " must lie in [0, 1]");
}

double binom_pmf(int n, int k, double prob) {
  if (k < 0 || k > n) return 0.0;
  // Exact powers at the endpoints keep 0^0 = 1.
  double coef = 1.0;
  for (int r = 1; r <= k; ++r) coef = coef * (n - k + r) / r;
  return coef * std::pow(prob, k) * std::pow(1.0 - prob, n - k);
}

SteadyState normalized(SteadyState ss) {
  const double z = ss.total();
  if (z > 0.0)
    for (auto& [st, v] : ss.probs) v /= z;
  return ss;
}

// Zero-filled map over every state of the chain so callers can index freely.
SteadyState empty_over(const ChainParams& params) {
  SteadyState ss;
  for (const auto& st : enumerate_states(params)) ss.probs[st] = 0.0;
  return ss;
}

SteadyState closed_form(const ChainParams& params, int ts) {
  const double p = params.p, s = params.s, q = params.q, u = params.u;
  const int c = params.c, h = params.h;
  ChainParams shaped = params;
  shaped.ts = ts;
  SteadyState ss = empty_over(shaped);

  if (s == 0.0) {
    ss.probs[{0, 0, 0}] = 1.0;
    ss.degenerate = true;
    ss.note = "s = 0: the chain never leaves the idle state";
    return ss;
  }
  const double a = u * (1.0 - q);
  if (a == 0.0) {
    ss.probs[{0, 0, 1}] = 1.0;
    ss.degenerate = true;
    ss.note = "u(1-q) = 0: the first backlog state is absorbing";
    return ss;
  }

  const double keep = 1.0 - p;
  const double keep_c = std::pow(keep, c);

  // Tier 1 relative to P(0,0,1) = 1.
  ss.probs[{0, 0, 1}] = 1.0;
  for (int i = 1; i <= c; ++i) ss.probs[{i, 0, 1}] = a * std::pow(keep, i);
  for (int j = 1; j <= std::min(ts, c); ++j) ss.probs[{0, j, 1}] = a * p;
  for (int i = 1; i < c; ++i)
    for (int j = 1; j <= std::min(ts, c - i); ++j) ss.probs[{i, j, 1}] = a * p * std::pow(keep, i);

  // Tier k is fed only by the end of tier k-1.
  for (int k = 2; k <= h; ++k) {
    const double tail = ss.probs[{c, 0, k - 1}];
    if (tail == 0.0 || keep_c == 0.0) break;
    const double first = tail / std::pow(keep, c - 1);
    ss.probs[{0, 0, k}] = (1.0 - keep_c) / (a * keep_c) * tail;
    for (int i = 1; i <= c; ++i) ss.probs[{i, 0, k}] = std::pow(keep, i - 1) * first;
    for (int j = 1; j <= std::min(ts, c); ++j) ss.probs[{0, j, k}] = p / keep_c * tail;
    for (int i = 1; i < c; ++i)
      for (int j = 1; j <= std::min(ts, c - i); ++j)
        ss.probs[{i, j, k}] = p * std::pow(keep, i - 1) * first;
  }

  ss.probs[{0, 0, 0}] = (1.0 - s) / s * ss.probs[{c, 0, h}];
  return normalized(std::move(ss));
}

}  // namespace

void ChainParams::validate() const {
  require_prob(p, "p");
  require_prob(s, "s");
  require_prob(q, "q");
  require_prob(u, "u");
  require_prob(v, "v");
  if (c < 1) throw InvalidParameter("c (slots per frame) must be >= 1");
  if (h < 1) throw InvalidParameter("h (frames per packet) must be >= 1");
  if (ts < 0 || ts > c) throw InvalidParameter("Ts must lie in [1, c] (0 selects c)");
  if (num_channels < 1) throw InvalidParameter("M must be >= 1");
}

StateKind classify(const ChainState& st) noexcept {
  if (st.k == 0) return StateKind::Idle;
  if (st.j > 0) return StateKind::Collided;
  if (st.i > 0) return StateKind::Transmitting;
  return StateKind::Backlogged;
}

double SteadyState::at(int i, int j, int k) const {
  auto it = probs.find({i, j, k});
  return it == probs.end() ? 0.0 : it->second;
}

double SteadyState::total() const {
  double z = 0.0;
  for (const auto& [st, v] : probs) z += v;
  return z;
}

std::vector<std::vector<double>> pu_occupancy_matrix(int num_channels, double p, double v) {
  if (num_channels < 1) throw InvalidParameter("M must be >= 1");
  require_prob(p, "p");
  require_prob(v, "v");
  const int m = num_channels;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(m + 1, 0.0));
  // From a busy channels, l of them finish; the M - a + l free channels each
  // receive a new PU packet with probability p.
  for (int a = 0; a <= m; ++a)
    for (int b = 0; b <= m; ++b)
      for (int l = std::max(0, a - b); l <= a; ++l)
        t[a][b] += binom_pmf(a, l, v) * binom_pmf(m - a + l, b - a + l, p);
  return t;
}

PuOccupancy pu_occupancy_u(int num_channels, double p, double v) {
  const auto t = pu_occupancy_matrix(num_channels, p, v);
  const int m = num_channels;
  PuOccupancy out;
  out.g.assign(m + 1, 0.0);
  if (p == 0.0) {
    out.g[0] = 1.0;
    out.u = 1.0;
    out.degenerate = v == 0.0;
    return out;
  }
  if (v == 0.0) {
    out.g[m] = 1.0;
    out.u = 0.0;
    out.degenerate = true;
    return out;
  }
  const int n = m + 1;
  Eigen::MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) a(r, col) = t[col][r] - (r == col ? 1.0 : 0.0);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::VectorXd g = a.fullPivLu().solve(rhs);
  double u = 0.0;
  for (int i = 0; i < n; ++i) {
    out.g[i] = std::max(0.0, g(i));
    if (i < m) u += out.g[i];
  }
  out.u = std::clamp(u, 0.0, 1.0);
  return out;
}

SteadyState steady_state_no_pu(const ChainParams& params) {
  params.validate();
  if (params.p != 0.0) throw InvalidParameter("the no-PU chain requires p = 0");
  ChainParams flat = params;
  flat.u = 1.0;
  flat.ts = 0;
  return closed_form(flat, flat.c);
}

SteadyState steady_state_with_pu(const ChainParams& params) {
  params.validate();
  return closed_form(params, params.c);
}

SteadyState steady_state_with_sensing_delay(const ChainParams& params) {
  params.validate();
  return closed_form(params, params.sensing_delay());
}

double normalized_throughput(const SteadyState& ss) {
  double theta = 0.0;
  for (const auto& [st, v] : ss.probs)
    if (classify(st) == StateKind::Transmitting) theta += v;
  return theta;
}

std::size_t collided_state_count(int c, int h, int ts) {
  if (c < 1 || h < 1 || ts < 1 || ts > c) throw InvalidParameter("need 1 <= Ts <= c and h >= 1");
  const auto per_tier = static_cast<std::size_t>(ts * (c - ts + 1) + ts * (ts - 1) / 2);
  return per_tier * static_cast<std::size_t>(h);
}

std::vector<ChainState> enumerate_states(const ChainParams& params) {
  const int c = params.c, ts = params.sensing_delay();
  std::vector<ChainState> states{{0, 0, 0}};
  for (int k = 1; k <= params.h; ++k) {
    states.push_back({0, 0, k});
    for (int i = 1; i <= c; ++i) states.push_back({i, 0, k});
    for (int i = 0; i < c; ++i)
      for (int j = 1; j <= std::min(ts, c - i); ++j) states.push_back({i, j, k});
  }
  return states;
}

double TransitionMatrix::row_sum(std::size_t r) const {
  double z = 0.0;
  for (const auto& [col, prob] : rows.at(r)) z += prob;
  return z;
}

TransitionMatrix build_transition_matrix(const ChainParams& params) {
  params.validate();
  const double p = params.p, s = params.s, q = params.q, u = params.u;
  const int c = params.c, h = params.h, ts = params.sensing_delay();

  TransitionMatrix t;
  t.states = enumerate_states(params);
  for (std::size_t r = 0; r < t.states.size(); ++r) t.index[t.states[r]] = r;
  t.rows.resize(t.states.size());

  for (std::size_t r = 0; r < t.states.size(); ++r) {
    const auto [i, j, k] = t.states[r];
    auto& row = t.rows[r];
    auto add = [&](ChainState to, double prob) {
      if (prob == 0.0) return;
      auto col = t.index.at(to);
      for (auto& [existing, w] : row)
        if (existing == col) {
          w += prob;
          return;
        }
      row.emplace_back(col, prob);
    };
    auto new_packet = [&] {
      add({0, 0, 0}, 1.0 - s);
      add({0, 0, 1}, s);
    };

    if (k == 0) {
      new_packet();
    } else if (j > 0) {
      // Collided: runs until detection or until the frame is used up, then
      // the frame is retried from the backlog.
      if (i + j == c || j == ts)
        add({0, 0, k}, 1.0);
      else
        add({i, j + 1, k}, 1.0);
    } else if (i == 0) {
      add({0, 0, k}, q * u + (1.0 - u));
      add({1, 0, k}, u * (1.0 - p) * (1.0 - q));
      add({0, 1, k}, u * p * (1.0 - q));
    } else if (i < c) {
      add({i + 1, 0, k}, 1.0 - p);
      add({i, 1, k}, p);
    } else if (k < h) {
      add({1, 0, k + 1}, 1.0 - p);
      add({0, 1, k + 1}, p);
    } else {
      new_packet();
    }
  }
  return t;
}

double stationarity_residual(const TransitionMatrix& t, const SteadyState& ss) {
  std::vector<double> pi(t.states.size(), 0.0), next(t.states.size(), 0.0);
  for (std::size_t r = 0; r < t.states.size(); ++r) pi[r] = ss.at(t.states[r].i, t.states[r].j, t.states[r].k);
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (const auto& [col, prob] : t.rows[r]) next[col] += pi[r] * prob;
  double worst = 0.0;
  for (std::size_t r = 0; r < pi.size(); ++r) worst = std::max(worst, std::abs(next[r] - pi[r]));
  return worst;
}

SteadyState brute_force_steady_state(const ChainParams& params, double tolerance,
                                     PowerIterationInfo* info) {
  params.validate();
  if (params.s == 0.0) throw InvalidParameter("s = 0: the chain is not ergodic");
  if (params.u * (1.0 - params.q) == 0.0)
    throw InvalidParameter("u(1-q) = 0: the chain is not ergodic");

  const auto t = build_transition_matrix(params);
  const std::size_t n = t.states.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);

  // Half-lazy steps: same fixed point, and the period c+1 cycles of the
  // s = 1, u = 1 corner no longer oscillate.
  const std::size_t max_iter = 20'000'000 / std::max<std::size_t>(n, 1) + 200'000;
  PowerIterationInfo local;
  for (local.iterations = 1; local.iterations <= max_iter; ++local.iterations) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (const auto& [col, prob] : t.rows[r]) next[col] += pi[r] * prob;
    double resid = 0.0, z = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      resid += std::abs(next[r] - pi[r]);
      next[r] = 0.5 * (next[r] + pi[r]);
      z += next[r];
    }
    for (auto& x : next) x /= z;
    pi.swap(next);
    local.residual = resid;
    if (resid < tolerance) {
      local.converged = true;
      break;
    }
  }
  if (info) *info = local;

  SteadyState ss;
  for (std::size_t r = 0; r < n; ++r) ss.probs[t.states[r]] = pi[r];
  if (!local.converged) ss.note = "power iteration stopped before reaching the tolerance";
  return ss;
}

}  // namespace crh::markov
