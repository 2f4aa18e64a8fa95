#pragma once

#include <swarmsim/scenario.hpp>
#include <swarmsim/rng.hpp>

#include <vector>

namespace swarmsim::testutil {

inline UavSpec make_uav(int id, double x, double y, double quality = 0.0) {
    UavSpec u;
    u.id = id;
    u.start_pos = {x, y};
    u.ground_link_quality = quality;
    u.coverage_radius_m = 1500.0;
    u.comm_range_m = 3000.0;
    u.transceivers = 2;
    return u;
}

inline Scenario make_scenario(std::vector<UavSpec> uavs,
                              std::vector<ImportanceField> fields = {},
                              double side_m = 10000.0,
                              double cell_m = 500.0) {
    Scenario s;
    s.area = {side_m, side_m};
    s.cell_size_m = cell_m;
    s.max_steps = 50;
    s.seed = 7;
    s.channels = 3;
    s.emergency_theta = 0.1;
    s.weights = {1.0, 0.1, 1000.0, 2.0, 10.0};
    s.uavs = std::move(uavs);
    s.fields = std::move(fields);
    if (s.fields.empty())
        s.fields.push_back({{side_m / 2, side_m / 2}, side_m / 4, 1.0});
    s.reindex();
    validate_scenario(s);
    return s;
}

// random scenario for property tests: n uavs, a couple of them backhauled
inline Scenario random_scenario(Rng& rng, int n_uavs, double cell_m = 500.0) {
    std::vector<UavSpec> uavs;
    for (int i = 0; i < n_uavs; ++i) {
        UavSpec u = make_uav(i, 500.0 + rng.uniform01() * 9000.0,
                             500.0 + rng.uniform01() * 9000.0);
        if (i < 2 || rng.uniform01() < 0.25)
            u.ground_link_quality = 0.3 + 0.7 * rng.uniform01();
        uavs.push_back(u);
    }
    std::vector<ImportanceField> fields;
    const int n_fields = 1 + static_cast<int>(rng.bounded(3));
    for (int f = 0; f < n_fields; ++f)
        fields.push_back({{1000.0 + rng.uniform01() * 8000.0,
                           1000.0 + rng.uniform01() * 8000.0},
                          1000.0 + rng.uniform01() * 2000.0,
                          0.4 + 0.6 * rng.uniform01()});
    return make_scenario(std::move(uavs), std::move(fields), 10000.0, cell_m);
}

} // namespace swarmsim::testutil
