#pragma once

#include <string>

#include "migplan/scenario_io.hpp"

namespace migplan::testing {

inline std::string data_path(const std::string& rel) { return std::string(MIGPLAN_DATA_DIR) + "/" + rel; }

inline ScenarioConfig toy() { return load_scenario(data_path("scenarios/toy.json")); }

inline Technology tech(Architecture a, Family f, int rate) {
    Technology t;
    t.architecture = a;
    t.family = f;
    t.data_rate = rate;
    t.stages = stage_class(f) == StageClass::TwoStage ? 2 : 1;
    t.id = canonical_technology_id(t);
    return t;
}

inline bool has_code(const std::vector<Violation>& v, const std::string& code) {
    for (const auto& x : v) {
        if (x.code == code) return true;
    }
    return false;
}

/// Relative closeness with an absolute floor of 1 for values near zero.
inline bool close(double a, double b, double rel) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= rel * scale;
}

}  // namespace migplan::testing
