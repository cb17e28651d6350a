#pragma once

#include "microrl/combat_sim.hpp"

#include <json.hpp>

#include <ostream>

namespace microrl {

/// One replay line: the tick index, every unit's post-tick position, hitpoint,
/// cooldown and the action it executed, plus the StepOutcome fields.
nlohmann::json replay_record(const SimState& after, const StepOutcome& outcome);

/// Writes replay records as line-delimited JSON.
class ReplayWriter {
  public:
    explicit ReplayWriter(std::ostream& out) : out_(out) {}
    void record(const SimState& after, const StepOutcome& outcome);
    int lines() const { return lines_; }

  private:
    std::ostream& out_;
    int lines_ = 0;
};

}  // namespace microrl
