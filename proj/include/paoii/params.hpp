#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace paoii {

// Error raised when an argument lies outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Protocol and channel constants of the reactive slotted-ALOHA system.
struct SystemParams {
  int n_sensors = 20;
  double lambda = 0.01;          // per-slot anomaly probability
  double alpha = 0.9;            // transmit probability of active nodes
  double beta = 0.1;             // transmit probability of backoff nodes
  double eps = 0.1;              // uplink error probability of a lone transmission
  double psi = 0.1;              // ACK loss probability
  double energy_per_slot = 1e-3; // joules spent by a transmitting node per slot
  double slot_duration = 0.05;   // seconds

  // Throws DomainError naming the first offending field.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& rule) {
      throw DomainError(field + " " + rule);
    };
    auto finite = [](double v) { return std::isfinite(v); };
    if (n_sensors < 1) fail("n_sensors", "must be >= 1");
    if (!finite(lambda) || lambda < 0.0 || lambda > 1.0) fail("lambda", "must lie in [0,1]");
    if (!finite(alpha) || alpha <= 0.0 || alpha > 1.0) fail("alpha", "must lie in (0,1]");
    if (!finite(beta) || beta <= 0.0 || beta > 1.0) fail("beta", "must lie in (0,1]");
    if (!finite(eps) || eps < 0.0 || eps >= 1.0) fail("eps", "must lie in [0,1)");
    if (!finite(psi) || psi < 0.0 || psi >= 1.0) fail("psi", "must lie in [0,1)");
    if (!finite(energy_per_slot) || energy_per_slot <= 0.0) fail("energy_per_slot", "must be > 0");
    if (!finite(slot_duration) || slot_duration <= 0.0) fail("slot_duration", "must be > 0");
  }

  // Aggregate anomaly load N * lambda.
  double load() const { return n_sensors * lambda; }
};

}  // namespace paoii
