#pragma once

#include <iosfwd>

#include <json.hpp>

#include "crowdrate/construction.hpp"
#include "crowdrate/energy.hpp"
#include "crowdrate/equilibrium.hpp"
#include "crowdrate/geometry.hpp"
#include "crowdrate/harness.hpp"

namespace crowdrate {

nlohmann::json to_json(const EnergyReport& r);
nlohmann::json to_json(const ElReport& r);
nlohmann::json to_json(const ObstacleReport& r);
nlohmann::json to_json(const M1StarReport& r);
nlohmann::json to_json(const PartitionReport& r);
nlohmann::json to_json(const SeparationReport& r);
nlohmann::json to_json(const WeakConvergenceReport& r);
nlohmann::json to_json(const ChainSummary& s);

// Rectangles as corner pairs, strip cells as polygon vertex lists.
nlohmann::json cells_json(const ConstructedPoints& pts);

void write_rate_profile_csv(std::ostream& out, const RateProfile& profile);

}  // namespace crowdrate
