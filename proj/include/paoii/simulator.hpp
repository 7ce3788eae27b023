#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "params.hpp"

namespace paoii {

enum class NodeMode : std::uint8_t { idle, active, collided, mistaken };

// aoii > 0 exactly when the node holds an unreported anomaly (active or
// collided) at a slot boundary.
struct NodeState {
  NodeMode mode = NodeMode::idle;
  std::uint32_t aoii = 0;
  bool tracked = true;  // anomaly born inside the measurement window
};

struct SlotOutcome {
  int arrivals = 0;
  int transmitters = 0;
  int active_transmitters = 0;
  bool delivered = false;      // exactly one transmitter and no uplink error
  bool ack_delivered = false;
  bool novel = false;          // delivered packet carried an unreported anomaly
  int sender = -1;
  std::uint32_t paoii = 0;     // peak AoII of the delivered anomaly (novel only)
  bool paoii_tracked = false;
};

// Counter-based seed derivation: SplitMix64 over (master seed, stream index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-stream generator: mt19937_64 seeded with eight SplitMix64 words.
class SimRng {
 public:
  SimRng(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t x = splitmix64(master_seed) ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + 1);
    std::vector<std::uint32_t> words;
    for (int i = 0; i < 8; ++i) {
      x = splitmix64(x);
      words.push_back(static_cast<std::uint32_t>(x));
      words.push_back(static_cast<std::uint32_t>(x >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Advances every node by one slot. Order: arrivals, transmission decisions,
// channel resolution, feedback, AoII update.
inline SlotOutcome step(std::vector<NodeState>& nodes, const SystemParams& params, SimRng& rng,
                        std::vector<int>& transmitters, bool track_new = true) {
  SlotOutcome out;
  for (auto& node : nodes) {
    if (node.mode == NodeMode::idle && rng.bernoulli(params.lambda)) {
      node.mode = NodeMode::active;
      node.aoii = 0;
      node.tracked = track_new;
      ++out.arrivals;
    } else if (node.mode == NodeMode::mistaken && rng.bernoulli(params.lambda)) {
      node.mode = NodeMode::collided;
      node.aoii = 0;
      node.tracked = track_new;
      ++out.arrivals;
    }
  }

  transmitters.clear();
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto mode = nodes[n].mode;
    if (mode == NodeMode::active) {
      if (rng.bernoulli(params.alpha)) {
        transmitters.push_back(static_cast<int>(n));
        ++out.active_transmitters;
      }
    } else if (mode != NodeMode::idle && rng.bernoulli(params.beta)) {
      transmitters.push_back(static_cast<int>(n));
    }
  }
  out.transmitters = static_cast<int>(transmitters.size());

  if (out.transmitters == 1) {
    out.delivered = !rng.bernoulli(params.eps);
    if (out.delivered) out.ack_delivered = !rng.bernoulli(params.psi);
  }

  for (auto& node : nodes)
    if (node.mode == NodeMode::active || node.mode == NodeMode::collided) ++node.aoii;

  if (out.delivered) {
    const int n = transmitters.front();
    auto& node = nodes[static_cast<std::size_t>(n)];
    out.sender = n;
    out.novel = node.mode != NodeMode::mistaken;
    if (out.novel) {
      out.paoii = node.aoii;
      out.paoii_tracked = node.tracked;
    }
    node.mode = out.ack_delivered ? NodeMode::idle : NodeMode::mistaken;
    node.aoii = 0;
  } else {
    for (int n : transmitters) {
      auto& node = nodes[static_cast<std::size_t>(n)];
      if (node.mode == NodeMode::active) node.mode = NodeMode::collided;
    }
  }
  return out;
}

struct ReplicationStats {
  std::uint64_t seed_stream = 0;
  std::uint64_t slots = 0;
  std::uint64_t novel_successes = 0;
  std::uint64_t stale_successes = 0;
  std::uint64_t transmitting_slots = 0;
  std::uint64_t anomalies_generated = 0;
  std::uint64_t anomalies_outstanding = 0;
};

struct SampleSet {
  std::vector<std::uint32_t> paoii_samples;
  std::uint64_t novel_successes = 0;
  std::uint64_t stale_successes = 0;
  std::uint64_t transmitting_slots = 0;
  std::uint64_t total_slots = 0;
  std::uint64_t master_seed = 0;
  std::size_t replications = 0;
  std::vector<ReplicationStats> per_replication;

  double goodput() const {
    return total_slots ? static_cast<double>(novel_successes) / static_cast<double>(total_slots) : 0.0;
  }

  double power(const SystemParams& p) const {
    if (!total_slots) return 0.0;
    return static_cast<double>(transmitting_slots) * p.energy_per_slot /
           (static_cast<double>(p.n_sensors) * static_cast<double>(total_slots) * p.slot_duration);
  }
};

struct SimulationControls {
  std::size_t slots_per_replication = 100000;
  std::size_t warmup_slots = 1000;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct ReplicationResult {
  ReplicationStats stats;
  std::vector<std::uint32_t> samples;
};

// One replication. Goodput and energy are tallied after the warm-up; PAoII is
// sampled only for anomalies born after it.
inline ReplicationResult run_replication(const SystemParams& params, std::uint64_t master_seed,
                                         std::uint64_t stream, const SimulationControls& ctl) {
  SimRng rng(master_seed, stream);
  std::vector<NodeState> nodes(static_cast<std::size_t>(params.n_sensors));
  std::vector<int> tx;
  tx.reserve(nodes.size());
  ReplicationResult r;
  r.stats.seed_stream = stream;
  const std::size_t total = ctl.warmup_slots + ctl.slots_per_replication;
  for (std::size_t t = 0; t < total; ++t) {
    const bool measuring = t >= ctl.warmup_slots;
    const auto o = step(nodes, params, rng, tx, measuring);
    if (!measuring) continue;
    ++r.stats.slots;
    r.stats.transmitting_slots += static_cast<std::uint64_t>(o.transmitters);
    r.stats.anomalies_generated += static_cast<std::uint64_t>(o.arrivals);
    if (o.delivered && !o.novel) ++r.stats.stale_successes;
    if (o.novel && o.paoii_tracked) {
      ++r.stats.novel_successes;
      r.samples.push_back(o.paoii);
    }
  }
  for (const auto& n : nodes)
    if ((n.mode == NodeMode::active || n.mode == NodeMode::collided) && n.tracked)
      ++r.stats.anomalies_outstanding;
  return r;
}

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs replications [first, first + count) and merges them in index order.
inline void run_replications_into(SampleSet& out, const SystemParams& params, std::uint64_t master_seed,
                                  std::size_t first, std::size_t count, const SimulationControls& ctl) {
  std::vector<ReplicationResult> results(count);
  const unsigned workers =
      std::max(1u, std::min<unsigned>(ctl.workers ? ctl.workers : default_workers(),
                                      static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t r = 0; r < count; ++r) results[r] = run_replication(params, master_seed, first + r, ctl);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < count; r += workers)
          results[r] = run_replication(params, master_seed, first + r, ctl);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& r : results) {
    out.novel_successes += r.stats.novel_successes;
    out.stale_successes += r.stats.stale_successes;
    out.transmitting_slots += r.stats.transmitting_slots;
    out.total_slots += r.stats.slots;
    out.paoii_samples.insert(out.paoii_samples.end(), r.samples.begin(), r.samples.end());
    out.per_replication.push_back(r.stats);
    ++out.replications;
  }
}

inline SampleSet run(const SystemParams& params, std::uint64_t master_seed, std::size_t replications,
                     const SimulationControls& ctl = {}) {
  params.validate();
  if (replications < 1) throw DomainError("run: replications must be >= 1");
  SampleSet out;
  out.master_seed = master_seed;
  run_replications_into(out, params, master_seed, 0, replications, ctl);
  return out;
}

// Adds replications (in deterministic batches) until at least target_samples
// PAoII samples exist; the sample list is then truncated to exactly that many.
inline SampleSet run_until_samples(const SystemParams& params, std::uint64_t master_seed,
                                   std::size_t target_samples, const SimulationControls& ctl = {},
                                   std::size_t max_replications = 100000) {
  params.validate();
  if (params.lambda == 0.0) throw DomainError("run_until_samples: lambda = 0 yields no samples");
  SampleSet out;
  out.master_seed = master_seed;
  const std::size_t batch = std::max(1u, ctl.workers ? ctl.workers : default_workers());
  while (out.paoii_samples.size() < target_samples) {
    if (out.replications >= max_replications)
      throw DomainError("run_until_samples: replication budget exhausted");
    run_replications_into(out, params, master_seed, out.replications, batch, ctl);
  }
  out.paoii_samples.resize(target_samples);
  return out;
}

}  // namespace paoii
