#pragma once

#include <vector>

#include "lossq/packetization.hpp"
#include "lossq/service.hpp"

namespace lossq {

// Expected busy-period quantities for a system started by one arrival to an
// empty queue: duration, processed, marked and refused message counts.
struct BusyPeriodCharacteristics {
    double e_t = 0.0;
    double e_p = 0.0;
    double e_m = 0.0;
    double e_r = 0.0;
    double p_mark = 0.0;
};

// Capacity K: an arrival finding xi messages in the system is accepted iff xi <= K.
BusyPeriodCharacteristics fixed_characteristics(int capacity, double lambda, const ServiceDistribution& dist,
                                                double p);

// Entries for K = 0..max_capacity from a single recurrence solve.
std::vector<BusyPeriodCharacteristics> fixed_characteristics_table(int max_capacity, double lambda,
                                                                   const ServiceDistribution& dist, double p);

// zeta-weighted average of the fixed-capacity characteristics.
BusyPeriodCharacteristics mixture_characteristics(const ZetaPmf& zeta, double lambda,
                                                  const ServiceDistribution& dist, double p);

// Stationary probability that an arriving message is lost (refused or marked).
double loss_probability(const BusyPeriodCharacteristics& chars);

}  // namespace lossq
