#include "crh/prediction.hpp"

#include <algorithm>
#include <cmath>

#include "crh/core_model.hpp"

namespace crh {

namespace {

void check_horizon(int n, double x) {
  if (n < 1) throw InvalidParameter("prediction horizon must be >= 1 slot");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("arrival probability must be in [0, 1]");
}

// sum_{i=1..k} x (1-x)^(i-1); zero for k <= 0.
double geometric_cdf_sum(int k, double x) {
  double sum = 0.0;
  double term = x;
  for (int i = 1; i <= k; ++i) {
    sum += term;
    term *= (1.0 - x);
  }
  return sum;
}

}  // namespace

void PredictionThresholds::validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(tau_low) || !in01(tau_high) || !in01(theta))
    throw InvalidParameter("thresholds tau_L, tau_H, theta must be in [0, 1]");
  if (tau_low > tau_high) throw InvalidParameter("threshold tau_L must not exceed tau_H");
  if (eta < 1) throw InvalidParameter("eta must be >= 1 slot");
}

double prob_no_arrival(int n, double x) {
  check_horizon(n, x);
  return 1.0 - geometric_cdf_sum(n, x);
}

double prob_idle_at_slot(int n, double x, int pu_length) {
  check_horizon(n, x);
  if (pu_length < 1) throw InvalidParameter("PU packet length must be >= 1 slot");
  double total = prob_no_arrival(n, x);
  const int max_packets = n / pu_length;  // U
  for (int h = 1; h <= max_packets; ++h) {
    const double xh = std::pow(x, h);
    double p_h = 0.0;
    for (int m = h; m <= n - h * pu_length; ++m) {
      const double quiet_tail = 1.0 - geometric_cdf_sum(n - m - h * pu_length + 1, x);
      p_h += quiet_tail * xh * std::pow(1.0 - x, m - h);
    }
    total += p_h;
  }
  return std::clamp(total, 0.0, 1.0);
}

double prob_off_exceeds(int eta, double x) {
  check_horizon(eta, x);
  return 1.0 - geometric_cdf_sum(eta, x);
}

bool should_handoff(const ChannelForecast& current, const PredictionThresholds& thresholds) {
  return current.prob_idle < thresholds.tau_low;
}

bool is_candidate(const ChannelForecast& f, const PredictionThresholds& thresholds) {
  return f.prob_idle >= thresholds.tau_high && f.prob_off_exceeds_eta >= thresholds.theta;
}

std::vector<int> candidate_channels(std::span<const ChannelForecast> forecasts,
                                    const PredictionThresholds& thresholds) {
  std::vector<const ChannelForecast*> passing;
  passing.reserve(forecasts.size());
  for (const auto& f : forecasts)
    if (is_candidate(f, thresholds)) passing.push_back(&f);
  std::sort(passing.begin(), passing.end(), [](const ChannelForecast* a, const ChannelForecast* b) {
    if (a->prob_idle != b->prob_idle) return a->prob_idle > b->prob_idle;
    return a->channel_id < b->channel_id;
  });
  std::vector<int> ids;
  ids.reserve(passing.size());
  for (const auto* f : passing)
    if (ids.empty() || std::find(ids.begin(), ids.end(), f->channel_id) == ids.end())
      ids.push_back(f->channel_id);
  return ids;
}

ChannelForecast forecast_channel(int channel_id, double x, int pu_length, int horizon, int eta,
                                 int sensed_busy_remaining) {
  ChannelForecast f;
  f.channel_id = channel_id;
  f.prob_off_exceeds_eta = prob_off_exceeds(eta, x);
  if (sensed_busy_remaining <= 0) {
    f.prob_idle = prob_idle_at_slot(horizon, x, pu_length);
  } else if (horizon > sensed_busy_remaining) {
    f.prob_idle = prob_idle_at_slot(horizon - sensed_busy_remaining, x, pu_length);
  } else {
    f.prob_idle = 0.0;
  }
  return f;
}

}  // namespace crh
