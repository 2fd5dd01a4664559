#include "crh/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "crh/channel_selection.hpp"
#include "crh/coordination.hpp"
#include "crh/prediction.hpp"

namespace crh {

namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

struct Pair {
  int id = 0;
  SuPairState st;
  SuTrafficParams traffic;
  RandomStream traffic_rng{0};
  RandomStream backoff_rng{0};
  RandomStream select_rng{0};
  std::uint64_t sense_key = 0;
  std::uint64_t receiver_seed = 0;

  bool has_packet = false;
  std::uint64_t next_arrival = kNever;
  std::uint64_t packet_arrival = 0;
  std::uint64_t backoff_until = 0;
  int type1_streak = 0;
  std::uint64_t rts_at = kNever;

  bool in_handoff = false;
  HandoffRecord rec;
  std::uint64_t resume_at = kNever;

  bool frame_pu = false;
  std::uint64_t frame_window_slots = 0;
  SlotClass cls = SlotClass::Idle;
  PairMetrics m;

  bool waiting(std::uint64_t t) const { return in_handoff && resume_at == kNever && rec.vacate_slot <= t; }
};

struct Session {
  bool active = false;
  std::vector<int> members;
  int rounds_left = 0;
};

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

class World {
 public:
  World(const ScenarioConfig& cfg, int replication, bool trace)
      : cfg_(cfg),
        rep_(static_cast<std::uint64_t>(replication)),
        frame_(cfg.frame()),
        scheme_{cfg.coordination, cfg.num_channels},
        th_{cfg.tau_low, cfg.tau_high, cfg.theta, cfg.frame().eta()},
        rates_(resolve_rates(cfg)),
        warmup_(cfg.warmup_slots()),
        record_(trace) {
    const int mch = cfg.num_channels;
    pu_len_ = std::max(1, static_cast<int>(std::lround(cfg.pu_packet_length)));
    geo_rem_ = std::max(0, static_cast<int>(std::lround(cfg.pu_packet_length - 1.0)));
    for (int ch = 1; ch <= mch; ++ch) {
      channels_.push_back({ch, 0, false});
      pu_params_.push_back({rates_.pu_prob[ch - 1], cfg.pu_length_model, cfg.pu_packet_length});
      pu_rng_.emplace_back(cfg.seed, StreamKind::PuChannel, static_cast<std::uint64_t>(ch), rep_);
      greedy_.push_back(ch);
    }
    on_.assign(mch, false);
    occ_.assign(mch, 0);
    std::stable_sort(greedy_.begin(), greedy_.end(),
                     [&](int a, int b) { return rates_.pu_prob[a - 1] < rates_.pu_prob[b - 1]; });

    for (int i = 0; i < cfg.num_su_pairs; ++i) {
      Pair p;
      const auto idx = static_cast<std::uint64_t>(i);
      p.id = i;
      p.traffic = {rates_.su_prob[i], cfg.su_min_gap};
      p.traffic_rng = RandomStream(cfg.seed, StreamKind::SuTraffic, idx, rep_);
      p.backoff_rng = RandomStream(cfg.seed, StreamKind::SuBackoff, idx, rep_);
      p.select_rng = RandomStream(cfg.seed, StreamKind::SuSelection, idx, rep_);
      p.sense_key = mix_seed(cfg.seed, entity_id(StreamKind::SuSensing, idx), rep_);
      p.receiver_seed = mix_seed(cfg.seed, entity_id(StreamKind::SuSelection, idx | (1ULL << 40)), 0);
      p.m.pair = i;
      p.m.su_rate_pps = rates_.su_rate_pps[i];
      p.m.arrival_prob = rates_.su_prob[i];
      if (p.traffic.normalized_arrival > 0.0)
        p.next_arrival = static_cast<std::uint64_t>(next_su_arrival_gap(p.traffic, p.traffic_rng));
      pairs_.push_back(std::move(p));
    }
    if (record_) {
      trace_.classes.assign(pairs_.size(), std::string(cfg.duration_slots, '?'));
      trace_.channels.assign(pairs_.size(), std::vector<int>(cfg.duration_slots, 0));
      trace_.pu_on.assign(mch, std::vector<bool>(cfg.duration_slots, false));
    }
  }

  ReplicationResult run() {
    for (std::uint64_t t = 0; t < cfg_.duration_slots; ++t) step(t);
    return finish();
  }

 private:
  // -1 when the pair senses channel `ch` idle at t, otherwise the number of
  // further slots it believes the occupancy lasts.
  int sensed_remaining(const Pair& p, int ch, std::uint64_t t) const {
    const bool on = on_[ch - 1];
    bool busy = on;
    if (cfg_.chi > 0.0) {
      const std::uint64_t h = mix64(p.sense_key ^ (t * kGolden + static_cast<std::uint64_t>(ch)));
      if (static_cast<double>(h >> 11) * 0x1.0p-53 < cfg_.chi) busy = !busy;
    }
    if (!busy) return -1;
    if (!on) return pu_len_ - 1;  // false alarm, read as a fresh PU packet
    if (cfg_.pu_length_model == PacketLengthModel::Fixed) return channels_[ch - 1].remaining_slots - 1;
    return geo_rem_;
  }

  ChannelForecast forecast(const Pair& p, int ch, std::uint64_t t, int horizon) const {
    const int rem = sensed_remaining(p, ch, t);
    return forecast_channel(ch, rates_.pu_prob[ch - 1], pu_len_, horizon, frame_.eta(), std::max(rem, 0));
  }

  bool measured(std::uint64_t t) const { return t >= warmup_; }

  void begin_handoff(Pair& p, std::uint64_t start, std::uint64_t vacate, int from, HandoffCause cause) {
    p.in_handoff = true;
    p.rec = HandoffRecord{p.id, start, vacate, 0, from, 0, cause, 0};
    p.resume_at = kNever;
  }

  void recount_occupancy() {
    std::fill(occ_.begin(), occ_.end(), 0);
    for (const auto& p : pairs_)
      if (p.st.phase == PairPhase::Transmitting && p.st.current_channel) ++occ_[*p.st.current_channel - 1];
  }

  void step(std::uint64_t t) {
    const int mch = cfg_.num_channels;
    for (int ch = 0; ch < mch; ++ch) {
      channels_[ch] = advance_pu_channel(channels_[ch], pu_params_[ch], pu_rng_[ch]);
      on_[ch] = channels_[ch].on();
    }
    for (auto& p : pairs_) {
      p.cls = SlotClass::Idle;
      if (!p.has_packet && p.next_arrival == t) {
        p.has_packet = true;
        p.packet_arrival = t;
      }
    }

    resume_pairs(t);
    recount_occupancy();
    resolve_rts(t);
    data_slots(t);
    recount_occupancy();
    handoff_session(t);
    protocol1(t);
    classify(t);
  }

  void resume_pairs(std::uint64_t t) {
    for (auto& p : pairs_) {
      if (p.resume_at != t) continue;
      p.resume_at = kNever;
      if (cfg_.handoff_mode == HandoffMode::Proactive) {
        const int target = *p.st.current_channel;
        auto r = verify_target(p.st, sensed_remaining(p, target, t) >= 0, t);
        if (r.has(ActionKind::PredictionMiss)) {
          p.st = r.state;
          ++p.rec.misses;
          if (measured(t)) ++p.m.prediction_misses;
          continue;
        }
      }
      p.in_handoff = false;
      p.rec.resume_slot = t;
      if (measured(t)) {
        ++p.m.handoffs;
        if (p.rec.cause == HandoffCause::Proactive) ++p.m.proactive_handoffs;
        p.m.handoff_delay_sum += static_cast<double>(p.rec.delay_slots());
        delays_.push_back(static_cast<double>(p.rec.delay_slots()));
      }
      if (record_) trace_.handoffs.push_back(p.rec);
    }
  }

  void resolve_rts(std::uint64_t t) {
    std::vector<Contender> contenders;
    for (auto& p : pairs_)
      if (p.rts_at == t) contenders.push_back({p.id, p.id, p.receiver_seed, true});
    if (contenders.empty()) return;
    const auto mch = static_cast<std::size_t>(cfg_.num_channels);
    auto busy = std::make_unique<bool[]>(mch);
    for (std::size_t ch = 0; ch < mch; ++ch) busy[ch] = on_[ch] || occ_[ch] > 0;
    const auto outcomes = attempt_rendezvous(scheme_, contenders, t, std::span<const bool>(busy.get(), mch));
    for (const auto& [id, out] : outcomes) {
      Pair& p = pairs_[id];
      p.rts_at = kNever;
      auto r = on_rendezvous(p.st, out, t);
      p.st = r.state;
      if (out.result == RendezvousResult::LinkEstablished) {
        p.type1_streak = 0;
        p.frame_pu = false;
        p.frame_window_slots = 0;
        ++occ_[out.channel - 1];
      } else if (out.result == RendezvousResult::Type1Collision) {
        if (measured(t)) ++p.m.type1_collisions;
        const std::uint64_t window = 1ULL << std::min(p.type1_streak, 8);
        ++p.type1_streak;
        p.backoff_until = t + 1 + p.backoff_rng.below(window);
      }
    }
  }

  void data_slots(std::uint64_t t) {
    for (auto& p : pairs_) {
      if (p.st.phase != PairPhase::Transmitting || !p.st.current_channel) continue;
      const int ch = *p.st.current_channel;
      const bool pu = on_[ch - 1];
      const bool su = occ_[ch - 1] > 1;
      if (record_) trace_.channels[p.id][t] = ch;
      auto r = reactive_step(p.st, pu || su, cfg_.sensing_delay_slots, frame_, t, su);
      p.st = r.state;

      if (r.has(ActionKind::CollidedSlot)) {
        p.cls = SlotClass::Collided;
        p.frame_pu = p.frame_pu || pu;
      } else {
        p.cls = SlotClass::Transmitting;
        if (measured(t)) ++p.frame_window_slots;
      }

      if (r.has(ActionKind::CollisionDetected)) {
        if (measured(t)) {
          if (p.frame_pu) ++p.m.pu_collisions;
          if (p.st.su_overlap) ++p.m.su_su_collisions;
        }
        p.m.wasted_frame_slots += p.frame_window_slots;
        p.frame_window_slots = 0;
        p.frame_pu = false;
        p.st.su_overlap = false;
        const auto cause =
            cfg_.handoff_mode == HandoffMode::Reactive ? HandoffCause::Reactive : HandoffCause::PredictionMiss;
        begin_handoff(p, p.st.collision_onset, t + 1, ch, cause);
        continue;
      }

      if (r.has(ActionKind::FrameComplete)) {
        p.m.delivered_frame_slots += p.frame_window_slots;
        p.frame_window_slots = 0;
        if (measured(t)) ++p.m.frames_delivered;
      }
      if (r.has(ActionKind::PacketComplete)) {
        if (measured(t)) {
          ++p.m.packets_delivered;
          p.m.service_time_sum += static_cast<double>(t - p.packet_arrival + 1);
        }
        p.has_packet = false;
        if (p.traffic.normalized_arrival > 0.0) {
          const int gap = next_su_arrival_gap(p.traffic, p.traffic_rng);
          p.next_arrival = t + static_cast<std::uint64_t>(std::max(gap, 1));
        } else {
          p.next_arrival = kNever;
        }
      } else if (r.has(ActionKind::FrameComplete) && cfg_.handoff_mode == HandoffMode::Proactive) {
        // Protocol 2 at the frame boundary: will the channel stay free for
        // the whole next frame?
        const auto current = forecast(p, ch, t, frame_.slots_per_frame);
        std::vector<ChannelForecast> others;
        for (int k = 1; k <= cfg_.num_channels; ++k)
          if (k != ch) others.push_back(forecast(p, k, t, 1));
        auto h = protocol2_step(p.st, current, others, th_, t);
        if (h.has(ActionKind::BeginHandoff)) {
          p.st = h.state;
          begin_handoff(p, t + 1, t + 1, ch, HandoffCause::Proactive);
        }
      }
    }
  }

  bool coordinated() const {
    return cfg_.selection == SelectionStrategy::Proposed || cfg_.selection == SelectionStrategy::Bargaining;
  }

  int rounds_for(int n) const {
    switch (cfg_.selection) {
      case SelectionStrategy::Proposed: return broadcast_rounds(n, cfg_.mini_slots);
      case SelectionStrategy::Bargaining: return broadcast_rounds(2 * n, cfg_.mini_slots);
      default: return 0;
    }
  }

  void handoff_session(std::uint64_t t) {
    if (!session_.active) {
      session_.members.clear();
      for (const auto& p : pairs_)
        if (p.waiting(t)) session_.members.push_back(p.id);
      if (session_.members.empty()) return;
      session_.active = true;
      session_.rounds_left = rounds_for(static_cast<int>(session_.members.size()));
    }
    // Control messages go out on the shared handoff hopping channel.
    const bool hop_busy = on_[common_hop_channel(cfg_.num_channels, t) - 1];
    if (hop_busy) return;
    if (session_.rounds_left > 0) {
      --session_.rounds_left;
      return;
    }

    // CSR slot: every member builds its list for the next slot from its own
    // sensing. Coordinated schemes also know which channels other SUs hold.
    SelectionContext ctx;
    ctx.participants = session_.members;
    ctx.mini_slots = cfg_.mini_slots;
    ctx.sequence_seed = mix64(mix_seed(cfg_.seed, entity_id(StreamKind::SuSelection, 0xffffffULL), rep_) ^ t);
    std::map<int, std::vector<ChannelForecast>> usable;
    for (int id : session_.members) {
      Pair& p = pairs_[id];
      auto& fs = usable[id];
      for (int k = 1; k <= cfg_.num_channels; ++k) {
        if (coordinated() && occ_[k - 1] > 0) continue;
        fs.push_back(forecast(p, k, t, 1));
      }
      p.st = refresh_candidates(p.st, fs, th_, t).state;
      auto& list = ctx.candidate_lists[id];
      for (int k : p.st.lsc) {
        const auto it = std::find_if(fs.begin(), fs.end(), [k](const ChannelForecast& f) { return f.channel_id == k; });
        list.push_back({k, it->prob_idle});
      }
    }
    for (int id : session_.members) {
      Pair& p = pairs_[id];
      std::optional<int> target;
      if (!p.st.lsc.empty()) {
        if (coordinated())
          target = compute_target_channel(ctx, id);
        else
          target = baseline_select(cfg_.selection, ctx, id, p.select_rng, greedy_).channel;
      }
      auto r = on_csa(p.st, target, t);
      p.st = r.state;
      if (target) {
        p.rec.target_channel = *target;
        p.resume_at = t + 1;
      }
    }
    session_.active = false;
  }

  void protocol1(std::uint64_t t) {
    for (auto& p : pairs_) {
      if (!p.has_packet || p.in_handoff || p.st.phase != PairPhase::Hopping) continue;
      if (p.backoff_until > t + 1 || p.rts_at != kNever) continue;
      const int k = hop_channel(scheme_, p.receiver_seed, t + 1);
      auto r = protocol1_step(p.st, forecast(p, k, t, 1), th_, t);
      if (r.has(ActionKind::SendRts)) {
        p.st = r.state;
        p.rts_at = t + 1;
      }
    }
  }

  void classify(std::uint64_t t) {
    for (auto& p : pairs_) {
      if (p.cls == SlotClass::Idle) {
        if (p.in_handoff)
          p.cls = SlotClass::Handoff;
        else if (p.has_packet)
          p.cls = SlotClass::Backlogged;
      }
      if (record_) trace_.classes[p.id][t] = static_cast<char>(p.cls);
      if (!measured(t)) continue;
      ++p.m.measured_slots;
      switch (p.cls) {
        case SlotClass::Transmitting: ++p.m.transmitting_slots; break;
        case SlotClass::Collided: ++p.m.collided_slots; break;
        case SlotClass::Handoff: ++p.m.handoff_slots; break;
        case SlotClass::Backlogged: ++p.m.backlogged_slots; break;
        case SlotClass::Idle: ++p.m.idle_slots; break;
      }
    }
    if (record_)
      for (int ch = 0; ch < cfg_.num_channels; ++ch) trace_.pu_on[ch][t] = on_[ch];
  }

  ReplicationResult finish() {
    ReplicationResult out;
    auto& m = out.metrics;
    m.replication = static_cast<int>(rep_);
    m.measured_slots = cfg_.duration_slots - warmup_;
    const double seconds = static_cast<double>(m.measured_slots) * cfg_.slot_seconds;
    const double n = static_cast<double>(pairs_.size());
    const double slots = static_cast<double>(m.measured_slots);
    double service = 0.0;
    for (auto& p : pairs_) {
      p.m.in_flight_slots = p.frame_window_slots;
      const auto& pm = p.m;
      m.packets_delivered += pm.packets_delivered;
      m.pu_collision_count += pm.pu_collisions;
      m.su_su_collision_count += pm.su_su_collisions;
      m.type1_collision_count += pm.type1_collisions;
      m.prediction_miss_count += pm.prediction_misses;
      m.handoff_count += pm.handoffs;
      m.proactive_handoff_count += pm.proactive_handoffs;
      service += pm.service_time_sum;
      m.normalized_throughput += static_cast<double>(pm.transmitting_slots) / slots / n;
      m.goodput += static_cast<double>(pm.delivered_frame_slots) / slots / n;
      m.frac_transmitting += static_cast<double>(pm.transmitting_slots) / slots / n;
      m.frac_collided += static_cast<double>(pm.collided_slots) / slots / n;
      m.frac_handoff += static_cast<double>(pm.handoff_slots) / slots / n;
      m.frac_backlogged += static_cast<double>(pm.backlogged_slots) / slots / n;
      m.frac_idle += static_cast<double>(pm.idle_slots) / slots / n;
      m.pairs.push_back(pm);
    }
    m.throughput_pps = static_cast<double>(m.packets_delivered) / seconds;
    m.collision_rate =
        m.packets_delivered ? static_cast<double>(m.pu_collision_count) / static_cast<double>(m.packets_delivered)
                            : 0.0;
    m.collisions_per_second = static_cast<double>(m.pu_collision_count) / seconds;
    m.service_time_mean = m.packets_delivered ? service / static_cast<double>(m.packets_delivered) : 0.0;
    if (!delays_.empty()) {
      m.handoff_delay_mean = std::accumulate(delays_.begin(), delays_.end(), 0.0) / static_cast<double>(delays_.size());
      m.handoff_delay_p50 = percentile(delays_, 0.5);
      m.handoff_delay_p95 = percentile(delays_, 0.95);
    }
    out.trace = std::move(trace_);
    return out;
  }

  const ScenarioConfig& cfg_;
  std::uint64_t rep_;
  FrameSpec frame_;
  HoppingScheme scheme_;
  PredictionThresholds th_;
  ResolvedRates rates_;
  std::uint64_t warmup_;
  bool record_;
  int pu_len_ = 1;
  int geo_rem_ = 0;

  std::vector<ChannelState> channels_;
  std::vector<PuTrafficParams> pu_params_;
  std::vector<RandomStream> pu_rng_;
  std::vector<int> greedy_;
  std::vector<bool> on_;
  std::vector<int> occ_;
  std::vector<Pair> pairs_;
  Session session_;
  std::vector<double> delays_;
  ReplicationTrace trace_;
};

}  // namespace

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
    s.ci95 = 1.96 * s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "throughput_pps",      "normalized_throughput",  "goodput",
      "collision_rate",      "collisions_per_second",  "pu_collision_count",
      "su_su_collision_count", "type1_collision_count", "prediction_miss_count",
      "packets_delivered",   "handoff_count",          "proactive_handoff_count",
      "handoff_delay_mean",  "handoff_delay_p50",      "handoff_delay_p95",
      "service_time_mean",   "frac_transmitting",      "frac_collided",
      "frac_handoff",        "frac_backlogged",        "frac_idle",
  };
  return names;
}

double metric_value(const ReplicationMetrics& m, const std::string& name) {
  if (name == "throughput_pps") return m.throughput_pps;
  if (name == "normalized_throughput") return m.normalized_throughput;
  if (name == "goodput") return m.goodput;
  if (name == "collision_rate") return m.collision_rate;
  if (name == "collisions_per_second") return m.collisions_per_second;
  if (name == "pu_collision_count") return static_cast<double>(m.pu_collision_count);
  if (name == "su_su_collision_count") return static_cast<double>(m.su_su_collision_count);
  if (name == "type1_collision_count") return static_cast<double>(m.type1_collision_count);
  if (name == "prediction_miss_count") return static_cast<double>(m.prediction_miss_count);
  if (name == "packets_delivered") return static_cast<double>(m.packets_delivered);
  if (name == "handoff_count") return static_cast<double>(m.handoff_count);
  if (name == "proactive_handoff_count") return static_cast<double>(m.proactive_handoff_count);
  if (name == "handoff_delay_mean") return m.handoff_delay_mean;
  if (name == "handoff_delay_p50") return m.handoff_delay_p50;
  if (name == "handoff_delay_p95") return m.handoff_delay_p95;
  if (name == "service_time_mean") return m.service_time_mean;
  if (name == "frac_transmitting") return m.frac_transmitting;
  if (name == "frac_collided") return m.frac_collided;
  if (name == "frac_handoff") return m.frac_handoff;
  if (name == "frac_backlogged") return m.frac_backlogged;
  if (name == "frac_idle") return m.frac_idle;
  throw InvalidParameter("unknown metric '" + name + "'");
}

ReplicationResult run_replication(const ScenarioConfig& cfg, int replication, bool record_trace) {
  World w(cfg, replication, record_trace);
  return w.run();
}

MetricsReport aggregate(const ScenarioConfig& cfg, std::vector<ReplicationMetrics> reps) {
  MetricsReport r;
  r.config = cfg;
  r.warnings = resolve_rates(cfg).warnings;
  for (const auto& name : metric_names()) {
    std::vector<double> v;
    for (const auto& m : reps) v.push_back(metric_value(m, name));
    r.summary[name] = summarize(v);
  }
  for (int i = 0; i < cfg.num_su_pairs; ++i) {
    PairSummary ps;
    ps.pair = i;
    double delay = 0.0, service = 0.0, seconds = 0.0;
    std::uint64_t packets = 0;
    for (const auto& m : reps) {
      const auto& pm = m.pairs.at(static_cast<std::size_t>(i));
      ps.su_rate_pps = pm.su_rate_pps;
      ps.handoffs += pm.handoffs;
      delay += pm.handoff_delay_sum;
      service += pm.service_time_sum;
      packets += pm.packets_delivered;
      seconds += static_cast<double>(pm.measured_slots) * cfg.slot_seconds;
    }
    ps.mean_handoff_delay = ps.handoffs ? delay / static_cast<double>(ps.handoffs) : 0.0;
    ps.mean_service_time = packets ? service / static_cast<double>(packets) : 0.0;
    ps.throughput_pps = seconds > 0.0 ? static_cast<double>(packets) / seconds : 0.0;
    r.pairs.push_back(ps);
  }
  r.replications = std::move(reps);
  return r;
}

MetricsReport run_scenario(const ScenarioConfig& cfg) {
  validate_or_throw(cfg);
  std::vector<ReplicationMetrics> reps;
  for (int k = 0; k < cfg.replications; ++k) reps.push_back(run_replication(cfg, k).metrics);
  return aggregate(cfg, std::move(reps));
}

}  // namespace crh
