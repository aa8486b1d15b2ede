#ifndef UBL_BATTERY_HPP
#define UBL_BATTERY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ubl {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct BatteryOptions {
    std::string out_dir;  // artifacts written here when non-empty
    std::uint64_t seed = 20240901;
    std::size_t n_mc = 100000;  // sample budget for the chain criteria
    bool log_progress = true;
};

// Runs the full acceptance battery (11 criteria) and returns one result per
// criterion. Artifacts (CSV tables, JSON summaries, manifest) are written to
// out_dir when set.
std::vector<CriterionResult> run_acceptance_battery(const BatteryOptions& opt, std::ostream& log);

}  // namespace ubl

#endif
