#include "ctrpo/expert.hpp"

#include <fstream>
#include <stdexcept>

#include "ctrpo/csv.hpp"

namespace ctrpo {

EnvAction expert_action(const EnvState& state, const EnvParams& params) {
    const Point3 target = state.grasped ? state.goal : state.object;
    Point3 v = (target - state.hand) / params.max_speed;
    const double n = v.norm();
    if (n > 1.0) v /= n;
    EnvAction action;
    action << v, 1.0;
    return action;
}

std::vector<DemoEpisode> collect_demos(Env& env, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("demo count must be positive");
    std::vector<DemoEpisode> demos;
    demos.reserve(n);
    for (int e = 0; e < n; ++e) {
        Rng rng = Rng::stream(seed, 0, static_cast<std::uint64_t>(e));
        Observation obs = env.reset(rng);
        std::vector<Observation> obs_list;
        std::vector<EnvAction> act_list;
        while (true) {
            const EnvAction a = expert_action(env.state(), env.params());
            obs_list.push_back(obs);
            act_list.push_back(a);
            const StepResult res = env.step(a);
            obs = res.obs;
            if (res.done) break;
        }
        DemoEpisode ep;
        ep.obs.resize(kObsDim, static_cast<Eigen::Index>(obs_list.size()));
        ep.actions.resize(kActionDim, static_cast<Eigen::Index>(act_list.size()));
        for (std::size_t t = 0; t < obs_list.size(); ++t) {
            ep.obs.col(static_cast<Eigen::Index>(t)) = obs_list[t];
            ep.actions.col(static_cast<Eigen::Index>(t)) = act_list[t];
        }
        demos.push_back(std::move(ep));
    }
    return demos;
}

void write_demos(const std::string& path, const std::vector<DemoEpisode>& demos) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "episode,step";
    for (int i = 0; i < kObsDim; ++i) out << ",obs_" << i;
    for (int i = 0; i < kActionDim; ++i) out << ",act_" << i;
    out << "\n";
    for (std::size_t e = 0; e < demos.size(); ++e) {
        const DemoEpisode& ep = demos[e];
        for (Eigen::Index t = 0; t < ep.obs.cols(); ++t) {
            out << e << "," << t;
            for (int i = 0; i < kObsDim; ++i) out << "," << csv_double(ep.obs(i, t));
            for (int i = 0; i < kActionDim; ++i) out << "," << csv_double(ep.actions(i, t));
            out << "\n";
        }
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<DemoEpisode> read_demos(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open demo file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty demo file '" + path + "'");

    std::vector<std::vector<Observation>> obs_by_ep;
    std::vector<std::vector<EnvAction>> act_by_ep;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> tok = csv_split(line);
        if (tok.size() != std::size_t(2 + kObsDim + kActionDim))
            throw std::runtime_error("demo row has " + std::to_string(tok.size()) + " fields");
        const std::size_t e = static_cast<std::size_t>(std::stoll(tok[0]));
        if (e >= obs_by_ep.size()) {
            obs_by_ep.resize(e + 1);
            act_by_ep.resize(e + 1);
        }
        Observation o;
        for (int i = 0; i < kObsDim; ++i) o[i] = csv_parse_double(tok[2 + i]);
        EnvAction a;
        for (int i = 0; i < kActionDim; ++i) a[i] = csv_parse_double(tok[2 + kObsDim + i]);
        obs_by_ep[e].push_back(o);
        act_by_ep[e].push_back(a);
    }

    std::vector<DemoEpisode> demos(obs_by_ep.size());
    for (std::size_t e = 0; e < demos.size(); ++e) {
        const auto T = static_cast<Eigen::Index>(obs_by_ep[e].size());
        if (T == 0) throw std::runtime_error("demo episode " + std::to_string(e) + " is empty");
        demos[e].obs.resize(kObsDim, T);
        demos[e].actions.resize(kActionDim, T);
        for (Eigen::Index t = 0; t < T; ++t) {
            demos[e].obs.col(t) = obs_by_ep[e][static_cast<std::size_t>(t)];
            demos[e].actions.col(t) = act_by_ep[e][static_cast<std::size_t>(t)];
        }
    }
    return demos;
}

}  // namespace ctrpo
