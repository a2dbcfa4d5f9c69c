// Closed-form system reliability over scenario, component, and link
// annotations. Scenario j contributes p_j * prod_i (1-theta_i)^InvNr_ij *
// prod_l (1-psi_l)^MsgSize(l,j); the result is the expected probability of a
// failure-free demand.
#pragma once

#include <cmath>

#include <refopt/model.hpp>

namespace refopt {

inline double systemReliability(const ArchModel& m) {
    double total = 0.0;
    for (const auto& s : m.scenarios) {
        double noFailure = 1.0;
        for (const auto& c : m.components) {
            const int invocations = invocationCount(m, s.id, c.id);
            if (invocations > 0) noFailure *= std::pow(1.0 - c.failureProb, invocations);
        }
        for (const auto& l : m.links) {
            // message sizes are real-valued annotations; evaluate as a real power
            const double units = messageTraffic(m, s.id, l.id);
            if (units > 0.0) noFailure *= std::pow(1.0 - l.failureProb, units);
        }
        total += s.prob * noFailure;
    }
    return total;
}

}  // namespace refopt
