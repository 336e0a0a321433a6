#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "ghostbeam/joint.hpp"

namespace ghostbeam {

// Detection-chain rates. Only loss electrons that launched the field are
// recorded, so the simulated electron stream is the thinned Poisson process of
// rate n*P_SPP; photons follow with probability P_PS.
struct RateConfig {
  double current_pa = 10.0;   // beam current i_e
  double p_spp = 1e-3;
  double p_ps = 1e-3;
  double window_ns = 10.0;
  double dead_time_ns = 1e4;
  double dark_rate_hz = 0.0;
  double duration_s = 1.0;
  double delay_ns = 0.0;      // optical/electronic photon delay
  double jitter_ns = 1.0;     // Gaussian timing jitter on photons
  int bucket_tags = 1;        // photons land on one of this many bucket points
  std::uint64_t rng_seed = 1;

  double electron_rate_hz() const;  // n = i_e/e
  double tau_e_ns() const;          // e/i_e
  double tau_spp_ns() const;        // e/(i_e*P_SPP)
  double tau_ps_ns() const;         // e/(i_e*P_SPP*P_PS)
  double duration_ns() const { return duration_s * 1e9; }
};

void require_valid_rates(const RateConfig& cfg);

// Deterministic portable generator (xoshiro256++ seeded via splitmix64).
// Never tied to the C++ library distributions, so streams are bit-identical
// across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  double uniform();                    // [0, 1)
  double exponential(double mean);
  double normal();                     // Box-Muller, pair cached
  std::uint32_t uniform_int(std::uint32_t bound);

 private:
  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

enum class EventKind { electron, photon, dark };

struct EventRecord {
  double t_ns = 0.0;
  EventKind kind = EventKind::electron;
  int tag = -1;         // bucket index for photons
  double parent_t = std::numeric_limits<double>::quiet_NaN();  // parent electron time
};

struct EventLog {
  std::vector<EventRecord> records;  // nondecreasing timestamps in [0, duration]
  double duration_ns = 0.0;
};

// Incremental generator for logs too large to hold at once. advance() emits
// every record with t < t_limit exactly once, sorted; limits must not decrease.
class EventStream {
 public:
  explicit EventStream(const RateConfig& cfg);
  std::vector<EventRecord> advance(double t_limit_ns);

 private:
  struct Pending {
    EventRecord rec;
    std::uint64_t order;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const;
  };
  void emit_electrons_until(double t_ns);
  void emit_darks_until(double t_ns);

  RateConfig cfg_;
  Rng rng_;
  Rng dark_rng_;
  double t_electron_;
  double t_dark_;
  double back_slack_;
  std::uint64_t order_ = 0;
  std::priority_queue<Pending, std::vector<Pending>, Later> pending_;
};

EventLog simulate_events(const RateConfig& cfg);

// CSV pieces, shared by the whole-log writer and the chunked stream writer.
void write_event_header(std::ostream& os);
void write_event_rows(std::ostream& os, const EventRecord* records, std::size_t count);

void save_event_log(const std::string& path, const EventLog& log);
EventLog load_event_log(const std::string& path);

struct Coincidence {
  double t_ns = 0.0;
  int tag = -1;
  bool genuine = false;
};

struct CoincidenceSummary {
  long long true_count = 0;
  long long accidental_count = 0;   // dark photon or mispaired signal photon
  long long dead_time_rejected = 0;
  long long unmatched_photons = 0;
  double duration_ns = 0.0;
  std::vector<Coincidence> accepted;
  double empirical_tau_ps_ns() const;  // duration / true_count
};

// Single-pass pairing: each photon takes the nearest electron record within
// |dt| <= window, subject to a non-paralyzable dead time after each accepted
// coincidence. A signal photon paired to a non-parent electron counts as
// accidental; parentage lost in CSV round trips degrades those to genuine.
class StreamingCorrelator {
 public:
  StreamingCorrelator(double window_ns, double dead_time_ns);
  void feed(const EventRecord* records, std::size_t count);
  CoincidenceSummary finish(double duration_ns);

 private:
  void resolve_ready(double horizon_ns);
  void resolve_photon(const EventRecord& ph);

  double window_;
  double dead_;
  double last_accept_;
  double last_t_;
  std::deque<std::pair<double, double>> electrons_;  // (t, t) keyed by time
  std::deque<EventRecord> photons_;
  CoincidenceSummary out_;
};

CoincidenceSummary correlate(const EventLog& log, double window_ns, double dead_time_ns);

// One detector sample per genuine coincidence, drawn from the gated image of
// the photon's bucket tag; counts accumulate on the shared image axis.
ImageProfile accumulate_coincidences(const std::vector<Coincidence>& accepted,
                                     const std::vector<ImageProfile>& images,
                                     std::uint64_t seed);
ImageProfile gated_accumulate(const EventLog& log, const std::vector<ImageProfile>& images,
                              double window_ns, double dead_time_ns, std::uint64_t seed);

std::string format_rate_report(const RateConfig& cfg, const CoincidenceSummary* summary);

}  // namespace ghostbeam
