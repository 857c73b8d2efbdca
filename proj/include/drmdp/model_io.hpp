#pragma once

// JSON model files: {"n_states", "n_actions", "gamma", "kernel": [s][a][s'], "reward": [s][a][s']}.
// Doubles are written in shortest round-trip form, so load(save(m)) is bit-exact.

#include "drmdp/errors.hpp"
#include "drmdp/mdp.hpp"
#include "drmdp/robust_bellman.hpp"
#include "drmdp/sampling.hpp"

#include "json.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace drmdp {

using json = nlohmann::json;

namespace detail {

inline json nest(const std::vector<double>& flat, std::size_t ns, std::size_t na) {
    json out = json::array();
    for (std::size_t s = 0; s < ns; ++s) {
        json by_action = json::array();
        for (std::size_t a = 0; a < na; ++a) {
            const auto first = flat.begin() + static_cast<long>((s * na + a) * ns);
            by_action.push_back(std::vector<double>(first, first + static_cast<long>(ns)));
        }
        out.push_back(std::move(by_action));
    }
    return out;
}

inline std::vector<double> flatten(const json& j, std::size_t ns, std::size_t na, const char* field) {
    std::vector<double> flat;
    flat.reserve(ns * na * ns);
    if (!j.is_array() || j.size() != ns) throw DimensionError(std::string(field) + ": expected |S| rows");
    for (const auto& by_action : j) {
        if (!by_action.is_array() || by_action.size() != na)
            throw DimensionError(std::string(field) + ": expected |A| entries per state");
        for (const auto& row : by_action) {
            if (!row.is_array() || row.size() != ns)
                throw DimensionError(std::string(field) + ": expected |S| entries per row");
            for (const auto& x : row) flat.push_back(x.get<double>());
        }
    }
    return flat;
}

} // namespace detail

inline json model_to_json(const TabularMDP& mdp) {
    return {{"n_states", mdp.n_states()},
            {"n_actions", mdp.n_actions()},
            {"gamma", mdp.gamma()},
            {"kernel", detail::nest(mdp.kernel(), mdp.n_states(), mdp.n_actions())},
            {"reward", detail::nest(mdp.reward(), mdp.n_states(), mdp.n_actions())}};
}

inline TabularMDP model_from_json(const json& j) {
    const auto ns = j.at("n_states").get<std::size_t>();
    const auto na = j.at("n_actions").get<std::size_t>();
    return {ns, na, detail::flatten(j.at("kernel"), ns, na, "kernel"), detail::flatten(j.at("reward"), ns, na, "reward"),
            j.at("gamma").get<double>()};
}

inline TabularMDP load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    return model_from_json(json::parse(in));
}

inline void save_model(const TabularMDP& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot write " + path);
    out << model_to_json(mdp).dump(1) << '\n';
}

inline json batch_to_json(const SampleBatch& batch) {
    json counts = json::array();
    for (std::size_t s = 0; s < batch.n_states; ++s) {
        json by_action = json::array();
        for (std::size_t a = 0; a < batch.n_actions; ++a) {
            const auto first = batch.counts.begin() + static_cast<long>((s * batch.n_actions + a) * batch.n_states);
            by_action.push_back(std::vector<std::uint64_t>(first, first + static_cast<long>(batch.n_states)));
        }
        counts.push_back(std::move(by_action));
    }
    return {{"n_per_sa", batch.n_per_sa}, {"counts", std::move(counts)}};
}

inline SampleBatch batch_from_json(const json& j) {
    SampleBatch batch;
    batch.n_per_sa = j.at("n_per_sa").get<std::uint64_t>();
    const auto& counts = j.at("counts");
    batch.n_states = counts.size();
    batch.n_actions = batch.n_states == 0 ? 0 : counts.at(0).size();
    for (const auto& by_action : counts) {
        if (by_action.size() != batch.n_actions) throw DimensionError("batch_from_json: ragged counts");
        for (const auto& row : by_action) {
            if (row.size() != batch.n_states) throw DimensionError("batch_from_json: ragged counts");
            std::uint64_t total = 0;
            for (const auto& x : row) {
                batch.counts.push_back(x.get<std::uint64_t>());
                total += batch.counts.back();
            }
            if (total != batch.n_per_sa) throw std::invalid_argument("batch_from_json: row total differs from n_per_sa");
        }
    }
    return batch;
}

/// Solver output for the CLI: values, policy rows and the inner multipliers.
inline json solution_to_json(const BellmanResult& result, std::size_t sweeps) {
    json policy = json::array();
    json duals = json::array();
    for (std::size_t s = 0; s < result.values.size(); ++s) {
        const auto row = result.policy.row(s);
        policy.push_back(std::vector<double>(row.begin(), row.end()));
        const auto& d = result.inner_duals[s];
        duals.push_back(d.eta.empty() ? json{{"lambda", d.lambda}} : json{{"eta", d.eta}});
    }
    return {{"values", result.values}, {"policy", std::move(policy)}, {"inner_duals", std::move(duals)},
            {"sweeps", sweeps}};
}

} // namespace drmdp
