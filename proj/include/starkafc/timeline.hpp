#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "starkafc/errors.hpp"
#include "starkafc/units.hpp"

namespace starkafc {

// One repeated block of the experimental duty cycle.
struct TimelinePhase {
    std::string name;
    double duration_each = 0.0;  // s
    std::size_t repetitions = 0;

    double total() const { return duration_each * static_cast<double>(repetitions); }
};

struct Timeline {
    std::vector<TimelinePhase> phases;

    double total_duration() const {
        double t = 0.0;
        for (const auto& p : phases) t += p.total();
        return t;
    }

    double phase_fraction(const std::string& name) const {
        double t = 0.0;
        for (const auto& p : phases)
            if (p.name == name) t += p.total();
        const double tot = total_duration();
        if (!(tot > 0.0)) throw ConfigError("timeline: zero total duration");
        return t / tot;
    }

    // Drop phases that never run.
    Timeline pruned() const {
        Timeline t;
        for (const auto& p : phases)
            if (p.repetitions > 0 && p.duration_each > 0.0) t.phases.push_back(p);
        return t;
    }

    void validate() const {
        for (const auto& p : phases) {
            if (p.duration_each < 0.0) throw ConfigError("timeline: negative phase duration");
            if (p.name.empty()) throw ConfigError("timeline: unnamed phase");
        }
    }
};

// Duty cycle of a single-comb storage run: class cleaning, comb carving, a
// settling wait, then the echo trials.
inline Timeline single_afc_timeline() {
    Timeline t;
    t.phases.push_back({"class cleaning sweep", 1.0 * kMs, 1500});
    t.phases.push_back({"comb preparation", 5.0 * kMs, 250});
    t.phases.push_back({"settling wait", 200.0 * kMs, 1});
    t.phases.push_back({"storage trials", 50.0 * kUs, 5000});
    return t;
}

// Double-comb variant: the comb is assembled pit by pit.
inline Timeline double_afc_timeline() {
    Timeline t;
    t.phases.push_back({"class cleaning sweep", 1.0 * kMs, 1500});
    t.phases.push_back({"comb preparation", 50.0 * kUs, 30 * 300});
    t.phases.push_back({"settling wait", 200.0 * kMs, 1});
    t.phases.push_back({"storage trials", 50.0 * kUs, 5000});
    return t;
}

}  // namespace starkafc
