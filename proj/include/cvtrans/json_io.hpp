#pragma once

#include "cvtrans/phase_space.hpp"

#include <json.hpp>

namespace cvtrans {

// {num_modes, mean: [..], cov: [[..]]}
inline nlohmann::ordered_json state_to_json(const GaussianState& state) {
    nlohmann::ordered_json j;
    j["num_modes"] = state.num_modes();
    j["mean"] = std::vector<double>(state.mean.begin(), state.mean.end());
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < state.cov.rows(); ++r) {
        std::vector<double> row(state.cov.cols());
        for (Eigen::Index c = 0; c < state.cov.cols(); ++c) row[c] = state.cov(r, c);
        rows.push_back(row);
    }
    j["cov"] = rows;
    return j;
}

}  // namespace cvtrans
