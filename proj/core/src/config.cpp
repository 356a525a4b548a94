#include "ctrpo/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ctrpo/csv.hpp"

namespace ctrpo {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& v) {
    try {
        return csv_parse_double(v);
    } catch (const std::exception&) {
        throw std::runtime_error("expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v) {
    int x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::runtime_error("expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v) {
    std::uint64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw std::runtime_error("expected an unsigned integer, got '" + v + "'");
    return x;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& schema() {
    static const std::map<std::string, Setter> keys = {
        {"algorithm", [](ExperimentConfig& c, const std::string& v) { c.algorithm = algorithm_from_string(v); }},
        {"constraint.r", [](ExperimentConfig& c, const std::string& v) { c.constraint.r = parse_double(v); }},
        {"constraint.t_min", [](ExperimentConfig& c, const std::string& v) { c.constraint.t_min = parse_double(v); }},
        {"constraint.t_max", [](ExperimentConfig& c, const std::string& v) { c.constraint.t_max = parse_double(v); }},
        {"constraint.c", [](ExperimentConfig& c, const std::string& v) { c.constraint.c = parse_double(v); }},
        {"constraint.cl", [](ExperimentConfig& c, const std::string& v) { c.constraint.cl = parse_double(v); }},
        {"gamma", [](ExperimentConfig& c, const std::string& v) { c.gamma = parse_double(v); }},
        {"gamma_c", [](ExperimentConfig& c, const std::string& v) { c.gamma_c = parse_double(v); }},
        {"gae_lambda", [](ExperimentConfig& c, const std::string& v) { c.gae_lambda = parse_double(v); }},
        {"bc.num_demos", [](ExperimentConfig& c, const std::string& v) { c.bc.num_demos = parse_int(v); }},
        {"bc.lr", [](ExperimentConfig& c, const std::string& v) { c.bc.lr = parse_double(v); }},
        {"bc.epochs", [](ExperimentConfig& c, const std::string& v) { c.bc.epochs = parse_int(v); }},
        {"value_fit.lr", [](ExperimentConfig& c, const std::string& v) { c.value_fit.lr = parse_double(v); }},
        {"value_fit.epochs", [](ExperimentConfig& c, const std::string& v) { c.value_fit.epochs = parse_int(v); }},
        {"value_fit.max_batch", [](ExperimentConfig& c, const std::string& v) { c.value_fit.max_batch = parse_int(v); }},
        {"training.iterations", [](ExperimentConfig& c, const std::string& v) { c.training.iterations = parse_int(v); }},
        {"training.episodes_per_iteration",
         [](ExperimentConfig& c, const std::string& v) { c.training.episodes_per_iteration = parse_int(v); }},
        {"training.seed", [](ExperimentConfig& c, const std::string& v) { c.training.seed = parse_u64(v); }},
        {"training.rollout_workers",
         [](ExperimentConfig& c, const std::string& v) { c.training.rollout_workers = parse_int(v); }},
        {"trust_region.delta", [](ExperimentConfig& c, const std::string& v) { c.trust_region.delta = parse_double(v); }},
        {"trust_region.cg_iters",
         [](ExperimentConfig& c, const std::string& v) { c.trust_region.cg_iters = parse_int(v); }},
        {"trust_region.cg_residual_tol",
         [](ExperimentConfig& c, const std::string& v) { c.trust_region.cg_residual_tol = parse_double(v); }},
        {"trust_region.damping",
         [](ExperimentConfig& c, const std::string& v) { c.trust_region.damping = parse_double(v); }},
        {"trust_region.backtrack_ratio",
         [](ExperimentConfig& c, const std::string& v) { c.trust_region.backtrack_ratio = parse_double(v); }},
        {"trust_region.max_backtracks",
         [](ExperimentConfig& c, const std::string& v) { c.trust_region.max_backtracks = parse_int(v); }},
        {"env.w1", [](ExperimentConfig& c, const std::string& v) { c.env.w1 = parse_double(v); }},
        {"env.w2", [](ExperimentConfig& c, const std::string& v) { c.env.w2 = parse_double(v); }},
        {"env.w3", [](ExperimentConfig& c, const std::string& v) { c.env.w3 = parse_double(v); }},
        {"env.lift_bonus", [](ExperimentConfig& c, const std::string& v) { c.env.lift_bonus = parse_double(v); }},
        {"env.proximity_bonus",
         [](ExperimentConfig& c, const std::string& v) { c.env.proximity_bonus = parse_double(v); }},
        {"env.grasp_radius", [](ExperimentConfig& c, const std::string& v) { c.env.grasp_radius = parse_double(v); }},
        {"env.goal_radius", [](ExperimentConfig& c, const std::string& v) { c.env.goal_radius = parse_double(v); }},
        {"env.max_speed", [](ExperimentConfig& c, const std::string& v) { c.env.max_speed = parse_double(v); }},
        {"env.lift_height", [](ExperimentConfig& c, const std::string& v) { c.env.lift_height = parse_double(v); }},
        {"env.horizon", [](ExperimentConfig& c, const std::string& v) { c.env.horizon = parse_int(v); }},
        {"env.hand_home_x", [](ExperimentConfig& c, const std::string& v) { c.env.hand_home.x() = parse_double(v); }},
        {"env.hand_home_y", [](ExperimentConfig& c, const std::string& v) { c.env.hand_home.y() = parse_double(v); }},
        {"env.hand_home_z", [](ExperimentConfig& c, const std::string& v) { c.env.hand_home.z() = parse_double(v); }},
        {"env.object_jitter",
         [](ExperimentConfig& c, const std::string& v) { c.env.object_jitter = parse_double(v); }},
        {"env.goal_offset_x",
         [](ExperimentConfig& c, const std::string& v) { c.env.goal_offset_x = parse_double(v); }},
        {"env.goal_jitter", [](ExperimentConfig& c, const std::string& v) { c.env.goal_jitter = parse_double(v); }},
        {"env.goal_z_min", [](ExperimentConfig& c, const std::string& v) { c.env.goal_z_min = parse_double(v); }},
        {"env.goal_z_max", [](ExperimentConfig& c, const std::string& v) { c.env.goal_z_max = parse_double(v); }},
    };
    return keys;
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Cpo: return "cpo";
        case Algorithm::Trpo: return "trpo";
        case Algorithm::TrpoRp: return "trpo_rp";
    }
    throw std::logic_error("unknown algorithm");
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "cpo") return Algorithm::Cpo;
    if (s == "trpo") return Algorithm::Trpo;
    if (s == "trpo_rp") return Algorithm::TrpoRp;
    throw std::runtime_error("unknown algorithm '" + s + "' (expected cpo, trpo, or trpo_rp)");
}

void ExperimentConfig::validate() const {
    if (!(constraint.r > 0.0)) throw std::invalid_argument("constraint.r must be positive");
    if (!(constraint.t_min < constraint.t_max)) throw std::invalid_argument("constraint.t_min must be below t_max");
    if (!(constraint.c >= 0.0)) throw std::invalid_argument("constraint.c must be non-negative");
    if (!(constraint.cl >= 0.0)) throw std::invalid_argument("constraint.cl must be non-negative");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(gamma_c > 0.0 && gamma_c <= 1.0)) throw std::invalid_argument("gamma_c must lie in (0, 1]");
    if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw std::invalid_argument("gae_lambda must lie in [0, 1]");
    if (bc.num_demos < 1) throw std::invalid_argument("bc.num_demos must be positive");
    if (!(bc.lr > 0.0)) throw std::invalid_argument("bc.lr must be positive");
    if (bc.epochs < 0) throw std::invalid_argument("bc.epochs must be non-negative");
    if (!(value_fit.lr > 0.0)) throw std::invalid_argument("value_fit.lr must be positive");
    if (value_fit.epochs < 0) throw std::invalid_argument("value_fit.epochs must be non-negative");
    if (value_fit.max_batch < 1) throw std::invalid_argument("value_fit.max_batch must be positive");
    if (training.iterations < 0) throw std::invalid_argument("training.iterations must be non-negative");
    if (training.episodes_per_iteration < 1)
        throw std::invalid_argument("training.episodes_per_iteration must be positive");
    if (training.rollout_workers < 1) throw std::invalid_argument("training.rollout_workers must be positive");
    trust_region.validate();
    env.validate();
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = schema().find(key);
        if (it == schema().end())
            throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const std::exception& e) {
            throw std::runtime_error("config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "algorithm = " << to_string(cfg.algorithm) << "\n";
    out << "constraint.r = " << csv_double(cfg.constraint.r) << "\n";
    out << "constraint.t_min = " << csv_double(cfg.constraint.t_min) << "\n";
    out << "constraint.t_max = " << csv_double(cfg.constraint.t_max) << "\n";
    out << "constraint.c = " << csv_double(cfg.constraint.c) << "\n";
    out << "constraint.cl = " << csv_double(cfg.constraint.cl) << "\n";
    out << "gamma = " << csv_double(cfg.gamma) << "\n";
    out << "gamma_c = " << csv_double(cfg.gamma_c) << "\n";
    out << "gae_lambda = " << csv_double(cfg.gae_lambda) << "\n";
    out << "bc.num_demos = " << cfg.bc.num_demos << "\n";
    out << "bc.lr = " << csv_double(cfg.bc.lr) << "\n";
    out << "bc.epochs = " << cfg.bc.epochs << "\n";
    out << "value_fit.lr = " << csv_double(cfg.value_fit.lr) << "\n";
    out << "value_fit.epochs = " << cfg.value_fit.epochs << "\n";
    out << "value_fit.max_batch = " << cfg.value_fit.max_batch << "\n";
    out << "training.iterations = " << cfg.training.iterations << "\n";
    out << "training.episodes_per_iteration = " << cfg.training.episodes_per_iteration << "\n";
    out << "training.seed = " << cfg.training.seed << "\n";
    out << "training.rollout_workers = " << cfg.training.rollout_workers << "\n";
    out << "trust_region.delta = " << csv_double(cfg.trust_region.delta) << "\n";
    out << "trust_region.cg_iters = " << cfg.trust_region.cg_iters << "\n";
    out << "trust_region.cg_residual_tol = " << csv_double(cfg.trust_region.cg_residual_tol) << "\n";
    out << "trust_region.damping = " << csv_double(cfg.trust_region.damping) << "\n";
    out << "trust_region.backtrack_ratio = " << csv_double(cfg.trust_region.backtrack_ratio) << "\n";
    out << "trust_region.max_backtracks = " << cfg.trust_region.max_backtracks << "\n";
    out << "env.w1 = " << csv_double(cfg.env.w1) << "\n";
    out << "env.w2 = " << csv_double(cfg.env.w2) << "\n";
    out << "env.w3 = " << csv_double(cfg.env.w3) << "\n";
    out << "env.lift_bonus = " << csv_double(cfg.env.lift_bonus) << "\n";
    out << "env.proximity_bonus = " << csv_double(cfg.env.proximity_bonus) << "\n";
    out << "env.grasp_radius = " << csv_double(cfg.env.grasp_radius) << "\n";
    out << "env.goal_radius = " << csv_double(cfg.env.goal_radius) << "\n";
    out << "env.max_speed = " << csv_double(cfg.env.max_speed) << "\n";
    out << "env.lift_height = " << csv_double(cfg.env.lift_height) << "\n";
    out << "env.horizon = " << cfg.env.horizon << "\n";
    out << "env.hand_home_x = " << csv_double(cfg.env.hand_home.x()) << "\n";
    out << "env.hand_home_y = " << csv_double(cfg.env.hand_home.y()) << "\n";
    out << "env.hand_home_z = " << csv_double(cfg.env.hand_home.z()) << "\n";
    out << "env.object_jitter = " << csv_double(cfg.env.object_jitter) << "\n";
    out << "env.goal_offset_x = " << csv_double(cfg.env.goal_offset_x) << "\n";
    out << "env.goal_jitter = " << csv_double(cfg.env.goal_jitter) << "\n";
    out << "env.goal_z_min = " << csv_double(cfg.env.goal_z_min) << "\n";
    out << "env.goal_z_max = " << csv_double(cfg.env.goal_z_max) << "\n";
    return out.str();
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << config_to_text(cfg);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ctrpo
