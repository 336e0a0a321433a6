#include "ghostbeam/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ghostbeam/constants.hpp"
#include "ghostbeam/errors.hpp"

namespace ghostbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

int kind_rank(EventKind k) { return static_cast<int>(k); }

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::electron: return "electron";
    case EventKind::photon: return "photon";
    default: return "dark";
  }
}

}  // namespace

double RateConfig::electron_rate_hz() const {
  return current_pa * 1e-12 / kElectronCharge_C;
}
double RateConfig::tau_e_ns() const { return 1e9 / electron_rate_hz(); }
double RateConfig::tau_spp_ns() const {
  return p_spp > 0.0 ? tau_e_ns() / p_spp : kInf;
}
double RateConfig::tau_ps_ns() const {
  return p_spp > 0.0 && p_ps > 0.0 ? tau_e_ns() / (p_spp * p_ps) : kInf;
}

void require_valid_rates(const RateConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.current_pa <= 0.0) bad.push_back("current must be positive");
  if (cfg.p_spp < 0.0 || cfg.p_spp > 1.0) bad.push_back("p_spp outside [0, 1]");
  if (cfg.p_ps < 0.0 || cfg.p_ps > 1.0) bad.push_back("p_ps outside [0, 1]");
  if (cfg.window_ns <= 0.0) bad.push_back("window must be positive");
  if (cfg.dead_time_ns < 0.0) bad.push_back("dead time must be nonnegative");
  if (cfg.dark_rate_hz < 0.0) bad.push_back("dark rate must be nonnegative");
  if (cfg.jitter_ns < 0.0) bad.push_back("jitter must be nonnegative");
  if (cfg.bucket_tags < 1) bad.push_back("bucket_tags must be >= 1");
  if (!bad.empty()) {
    std::string msg = "invalid rate config:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ConfigError(msg);
  }
}

Rng::Rng(std::uint64_t seed) {
  for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
  std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::exponential(double mean) { return -mean * std::log1p(-uniform()); }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  double r = std::sqrt(-2.0 * std::log(u));
  double th = 2.0 * kPi * uniform();
  cached_ = r * std::sin(th);
  has_cached_ = true;
  return r * std::cos(th);
}

std::uint32_t Rng::uniform_int(std::uint32_t bound) {
  // Rejection keeps the draw exactly uniform.
  std::uint64_t threshold = (~std::uint64_t{0} / bound) * bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= threshold);
  return static_cast<std::uint32_t>(x % bound);
}

bool EventStream::Later::operator()(const Pending& a, const Pending& b) const {
  if (a.rec.t_ns != b.rec.t_ns) return a.rec.t_ns > b.rec.t_ns;
  int ra = kind_rank(a.rec.kind), rb = kind_rank(b.rec.kind);
  if (ra != rb) return ra > rb;
  return a.order > b.order;
}

EventStream::EventStream(const RateConfig& cfg)
    : cfg_(cfg), rng_(cfg.rng_seed), dark_rng_(~cfg.rng_seed) {
  require_valid_rates(cfg_);
  double rate_rec = cfg_.electron_rate_hz() * cfg_.p_spp * 1e-9;  // per ns
  t_electron_ = rate_rec > 0.0 ? rng_.exponential(1.0 / rate_rec) : kInf;
  double rate_dark = cfg_.dark_rate_hz * 1e-9;
  t_dark_ = rate_dark > 0.0 ? dark_rng_.exponential(1.0 / rate_dark) : kInf;
  // Photons can precede t_limit while their parent lies beyond it; a 64 sigma
  // jitter excursion bounds how far back they reach.
  back_slack_ = std::max(0.0, 64.0 * cfg_.jitter_ns - cfg_.delay_ns) + 1.0;
}

void EventStream::emit_electrons_until(double t_ns) {
  double rate_rec = cfg_.electron_rate_hz() * cfg_.p_spp * 1e-9;
  if (rate_rec <= 0.0) return;
  double mean = 1.0 / rate_rec;
  while (t_electron_ <= t_ns) {
    EventRecord e;
    e.t_ns = t_electron_;
    e.kind = EventKind::electron;
    pending_.push({e, order_++});
    if (rng_.uniform() < cfg_.p_ps) {
      EventRecord ph;
      ph.kind = EventKind::photon;
      ph.t_ns = t_electron_ + cfg_.delay_ns + cfg_.jitter_ns * rng_.normal();
      ph.parent_t = t_electron_;
      ph.tag = cfg_.bucket_tags > 1
                   ? static_cast<int>(rng_.uniform_int(static_cast<std::uint32_t>(cfg_.bucket_tags)))
                   : 0;
      pending_.push({ph, order_++});
    }
    t_electron_ += rng_.exponential(mean);
  }
}

void EventStream::emit_darks_until(double t_ns) {
  double rate_dark = cfg_.dark_rate_hz * 1e-9;
  if (rate_dark <= 0.0) return;
  double mean = 1.0 / rate_dark;
  while (t_dark_ <= t_ns) {
    EventRecord d;
    d.t_ns = t_dark_;
    d.kind = EventKind::dark;
    d.tag = cfg_.bucket_tags > 1
                ? static_cast<int>(dark_rng_.uniform_int(static_cast<std::uint32_t>(cfg_.bucket_tags)))
                : 0;
    pending_.push({d, order_++});
    t_dark_ += dark_rng_.exponential(mean);
  }
}

std::vector<EventRecord> EventStream::advance(double t_limit_ns) {
  emit_electrons_until(t_limit_ns + back_slack_);
  emit_darks_until(t_limit_ns);
  std::vector<EventRecord> out;
  while (!pending_.empty() && pending_.top().rec.t_ns < t_limit_ns) {
    out.push_back(pending_.top().rec);
    pending_.pop();
  }
  return out;
}

EventLog simulate_events(const RateConfig& cfg) {
  if (cfg.duration_s <= 0.0)
    throw std::invalid_argument("simulate_events: duration must be positive");
  EventStream stream(cfg);
  double T = cfg.duration_ns();
  auto records = stream.advance(T * (1.0 + 1e-12) + 1.0);
  EventLog log;
  log.duration_ns = T;
  log.records.reserve(records.size());
  for (const auto& r : records)
    if (r.t_ns >= 0.0 && r.t_ns <= T) log.records.push_back(r);
  return log;
}

void write_event_header(std::ostream& os) {
  os.precision(17);
  os << "timestamp_ns,kind,tag\n";
}

void write_event_rows(std::ostream& os, const EventRecord* records, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = records[i];
    os << r.t_ns << "," << kind_name(r.kind) << ",";
    if (r.tag >= 0) os << r.tag;
    os << "\n";
  }
}

void save_event_log(const std::string& path, const EventLog& log) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_event_header(os);
  write_event_rows(os, log.records.data(), log.records.size());
  if (!os) throw ConfigError("failed writing " + path);
}

EventLog load_event_log(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  EventLog log;
  std::string line;
  if (!std::getline(is, line) || line != "timestamp_ns,kind,tag")
    throw ConfigError(path + ": not an event log");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string t_str, kind_str, tag_str;
    if (!std::getline(ls, t_str, ',') || !std::getline(ls, kind_str, ','))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed record");
    std::getline(ls, tag_str, ',');
    EventRecord r;
    try {
      r.t_ns = std::stod(t_str);
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad timestamp");
    }
    if (kind_str == "electron") r.kind = EventKind::electron;
    else if (kind_str == "photon") r.kind = EventKind::photon;
    else if (kind_str == "dark") r.kind = EventKind::dark;
    else throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown kind " + kind_str);
    if (!tag_str.empty()) r.tag = std::stoi(tag_str);
    log.records.push_back(r);
    log.duration_ns = std::max(log.duration_ns, r.t_ns);
  }
  return log;
}

double CoincidenceSummary::empirical_tau_ps_ns() const {
  return true_count > 0 ? duration_ns / static_cast<double>(true_count) : kInf;
}

StreamingCorrelator::StreamingCorrelator(double window_ns, double dead_time_ns)
    : window_(window_ns), dead_(dead_time_ns), last_accept_(-kInf), last_t_(-kInf) {
  if (window_ns <= 0.0) throw std::invalid_argument("correlate: window must be positive");
  if (dead_time_ns < 0.0) throw std::invalid_argument("correlate: negative dead time");
}

void StreamingCorrelator::resolve_photon(const EventRecord& ph) {
  // Nearest electron within the window; earlier one wins exact ties.
  auto it = std::lower_bound(electrons_.begin(), electrons_.end(),
                             std::make_pair(ph.t_ns - window_, -kInf));
  const double* best = nullptr;
  double best_gap = kInf;
  for (; it != electrons_.end() && it->first <= ph.t_ns + window_; ++it) {
    double gap = std::abs(it->first - ph.t_ns);
    if (gap < best_gap) {
      best_gap = gap;
      best = &it->first;
    }
  }
  if (!best) {
    ++out_.unmatched_photons;
    return;
  }
  if (ph.t_ns < last_accept_ + dead_) {
    ++out_.dead_time_rejected;
    return;
  }
  last_accept_ = ph.t_ns;
  bool genuine = ph.kind == EventKind::photon &&
                 (std::isnan(ph.parent_t) || ph.parent_t == *best);
  if (genuine) ++out_.true_count;
  else ++out_.accidental_count;
  out_.accepted.push_back({ph.t_ns, ph.tag, genuine});
}

void StreamingCorrelator::resolve_ready(double horizon_ns) {
  // A photon can be settled once no electron before horizon can still beat
  // its current candidates.
  while (!photons_.empty() && photons_.front().t_ns + window_ < horizon_ns) {
    resolve_photon(photons_.front());
    photons_.pop_front();
  }
  double keep_after = (photons_.empty() ? horizon_ns : photons_.front().t_ns) - window_;
  while (!electrons_.empty() && electrons_.front().first < keep_after)
    electrons_.pop_front();
}

void StreamingCorrelator::feed(const EventRecord* records, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    const EventRecord& r = records[i];
    if (r.t_ns < last_t_)
      throw std::invalid_argument("correlate: records not sorted by timestamp");
    last_t_ = r.t_ns;
    resolve_ready(r.t_ns);
    if (r.kind == EventKind::electron) electrons_.emplace_back(r.t_ns, r.t_ns);
    else photons_.push_back(r);
  }
}

CoincidenceSummary StreamingCorrelator::finish(double duration_ns) {
  resolve_ready(kInf);
  out_.duration_ns = duration_ns;
  return out_;
}

CoincidenceSummary correlate(const EventLog& log, double window_ns, double dead_time_ns) {
  StreamingCorrelator corr(window_ns, dead_time_ns);
  corr.feed(log.records.data(), log.records.size());
  return corr.finish(log.duration_ns);
}

ImageProfile accumulate_coincidences(const std::vector<Coincidence>& accepted,
                                     const std::vector<ImageProfile>& images,
                                     std::uint64_t seed) {
  ImageProfile hist;
  hist.gated = true;
  if (images.empty()) {
    for (const auto& c : accepted)
      if (c.genuine) throw ConfigError("gated_accumulate: no gated image for tag " +
                                       std::to_string(c.tag));
    return hist;
  }
  std::size_t npix = images.front().axis.size();
  for (const auto& img : images)
    if (img.axis.size() != npix || img.intensity.size() != npix)
      throw ConfigError("gated_accumulate: gated images on mismatched axes");

  std::vector<std::vector<double>> cdf(images.size());
  for (std::size_t k = 0; k < images.size(); ++k) {
    cdf[k].resize(npix);
    double acc = 0.0;
    for (std::size_t i = 0; i < npix; ++i) {
      acc += std::max(0.0, images[k].intensity[i]);
      cdf[k][i] = acc;
    }
    if (acc <= 0.0)
      throw ConfigError("gated_accumulate: gated image " + std::to_string(k) +
                        " has zero mass");
    for (double& v : cdf[k]) v /= acc;
  }

  hist.axis = images.front().axis;
  hist.intensity.assign(npix, 0.0);
  Rng rng(seed);
  for (const auto& c : accepted) {
    if (!c.genuine) continue;
    if (c.tag < 0 || static_cast<std::size_t>(c.tag) >= images.size())
      throw ConfigError("gated_accumulate: no gated image for tag " + std::to_string(c.tag));
    double u = rng.uniform();
    const auto& f = cdf[c.tag];
    std::size_t idx = std::lower_bound(f.begin(), f.end(), u) - f.begin();
    if (idx >= npix) idx = npix - 1;
    hist.intensity[idx] += 1.0;
  }
  hist.visibility = fringe_visibility(hist.intensity);
  return hist;
}

ImageProfile gated_accumulate(const EventLog& log, const std::vector<ImageProfile>& images,
                              double window_ns, double dead_time_ns, std::uint64_t seed) {
  auto summary = correlate(log, window_ns, dead_time_ns);
  return accumulate_coincidences(summary.accepted, images, seed);
}

std::string format_rate_report(const RateConfig& cfg, const CoincidenceSummary* summary) {
  std::ostringstream os;
  os.precision(6);
  os << "beam current i_e: " << cfg.current_pa << " pA\n";
  os << "electron rate n = i_e/e: " << cfg.electron_rate_hz() << " /s\n";
  os << "mean electron spacing e/i_e: " << cfg.tau_e_ns() << " ns\n";
  os << "p_spp: " << cfg.p_spp << "\n";
  os << "spp-loss spacing tau_spp: " << cfg.tau_spp_ns() << " ns ("
     << cfg.tau_spp_ns() * 1e-3 << " us)\n";
  os << "p_ps: " << cfg.p_ps << "\n";
  os << "post-selected spacing tau_ps: " << cfg.tau_ps_ns() << " ns ("
     << cfg.tau_ps_ns() * 1e-6 << " ms)\n";
  if (summary) {
    os << "true coincidences: " << summary->true_count << "\n";
    os << "accidental coincidences: " << summary->accidental_count << "\n";
    os << "dead-time rejected: " << summary->dead_time_rejected << "\n";
    os << "unmatched photons: " << summary->unmatched_photons << "\n";
    os << "empirical tau_ps: " << summary->empirical_tau_ps_ns() << " ns\n";
  }
  return os.str();
}

}  // namespace ghostbeam
