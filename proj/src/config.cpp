#include "prl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prl {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": " + value);
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": " + value);
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": " + value);
    }
}

std::vector<std::uint64_t> parse_seeds(const std::string& value) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<std::uint64_t>(parse_int("seeds", item)));
    }
    if (out.empty()) throw std::invalid_argument("config: seeds must be a comma list");
    return out;
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "env") {
        if (value != "grid" && value != "door") {
            throw std::invalid_argument("config: env must be grid or door");
        }
        cfg.env.kind = value;
    } else if (key == "grid_width") {
        cfg.env.grid_width = static_cast<int>(parse_int(key, value));
    } else if (key == "grid_height") {
        cfg.env.grid_height = static_cast<int>(parse_int(key, value));
    } else if (key == "door_angles") {
        cfg.env.door_angles = static_cast<int>(parse_int(key, value));
    } else if (key == "eval_horizon") {
        cfg.env.eval_horizon = static_cast<int>(parse_int(key, value));
    } else if (key == "discount") {
        cfg.env.discount = parse_real(key, value);
    } else if (key == "goal_projection") {
        if (value != "object" && value != "object_gripper") {
            throw std::invalid_argument("config: goal_projection must be object or object_gripper");
        }
        cfg.env.goal_projection = value;
    } else if (key == "require_gripper_home") {
        cfg.env.require_gripper_home = parse_bool(key, value);
    } else if (key == "strategy") {
        cfg.strategy = value;
    } else if (key == "train_horizon") {
        cfg.train_horizon = parse_int(key, value);
    } else if (key == "total_steps") {
        cfg.total_steps = parse_int(key, value);
    } else if (key == "eval_every") {
        cfg.eval_every = parse_int(key, value);
    } else if (key == "eval_trials") {
        cfg.eval_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "seeds") {
        cfg.seeds = parse_seeds(value);
    } else if (key == "curriculum_epsilon") {
        cfg.curriculum.epsilon = parse_real(key, value);
    } else if (key == "distance_mode") {
        if (value == "step_index") {
            cfg.curriculum.distance_mode = DistanceMode::step_index;
        } else if (value == "value_based") {
            cfg.curriculum.distance_mode = DistanceMode::value_based;
        } else {
            throw std::invalid_argument("config: distance_mode must be step_index or value_based");
        }
    } else if (key == "candidate_source") {
        if (value == "demo_states") {
            cfg.curriculum.candidate_source = CandidateSource::demo_states;
        } else if (value == "replay_sample") {
            cfg.curriculum.candidate_source = CandidateSource::replay_sample;
        } else {
            throw std::invalid_argument(
                "config: candidate_source must be demo_states or replay_sample");
        }
    } else if (key == "candidate_sample_size") {
        cfg.curriculum.candidate_sample_size = static_cast<int>(parse_int(key, value));
    } else if (key == "curriculum_rng_seed") {
        cfg.curriculum.rng_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "include_reverse_demos") {
        cfg.curriculum.include_reverse_demos = parse_bool(key, value);
    } else if (key == "relabel_n") {
        cfg.relabel_n = static_cast<int>(parse_int(key, value));
    } else if (key == "alpha") {
        cfg.learner.alpha = parse_real(key, value);
    } else if (key == "eps_start") {
        cfg.learner.eps_start = parse_real(key, value);
    } else if (key == "eps_end") {
        cfg.learner.eps_end = parse_real(key, value);
    } else if (key == "updates_per_step") {
        cfg.learner.updates_per_step = static_cast<int>(parse_int(key, value));
    } else if (key == "buffer_cap") {
        cfg.learner.buffer_cap = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "demos_enabled") {
        cfg.demos.enabled = parse_bool(key, value);
    } else if (key == "demos_forward") {
        cfg.demos.per_goal_forward = static_cast<int>(parse_int(key, value));
    } else if (key == "demos_reverse") {
        cfg.demos.per_goal_reverse = static_cast<int>(parse_int(key, value));
    } else if (key == "demo_noise") {
        cfg.demos.noise = parse_real(key, value);
    } else if (key == "early_switch") {
        cfg.early_switch = parse_bool(key, value);
    } else if (key == "keep_after_success") {
        cfg.keep_after_success = parse_bool(key, value);
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else {
        throw std::invalid_argument("config: unknown key: " + key);
    }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: " + path + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        }
        set_config_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& cfg) {
    auto boolean = [](bool b) { return b ? std::string("true") : std::string("false"); };
    std::string seeds;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (i) seeds += ',';
        seeds += std::to_string(cfg.seeds[i]);
    }
    return {
        {"env", cfg.env.kind},
        {"grid_width", std::to_string(cfg.env.grid_width)},
        {"grid_height", std::to_string(cfg.env.grid_height)},
        {"door_angles", std::to_string(cfg.env.door_angles)},
        {"eval_horizon", std::to_string(cfg.env.eval_horizon)},
        {"discount", fmt_real(cfg.env.discount)},
        {"goal_projection", cfg.env.goal_projection},
        {"require_gripper_home", boolean(cfg.env.require_gripper_home)},
        {"strategy", cfg.strategy},
        {"train_horizon", std::to_string(cfg.train_horizon)},
        {"total_steps", std::to_string(cfg.total_steps)},
        {"eval_every", std::to_string(cfg.eval_every)},
        {"eval_trials", std::to_string(cfg.eval_trials)},
        {"seeds", seeds},
        {"curriculum_epsilon", fmt_real(cfg.curriculum.epsilon)},
        {"distance_mode", cfg.curriculum.distance_mode == DistanceMode::step_index
                              ? "step_index"
                              : "value_based"},
        {"candidate_source", cfg.curriculum.candidate_source == CandidateSource::demo_states
                                 ? "demo_states"
                                 : "replay_sample"},
        {"candidate_sample_size", std::to_string(cfg.curriculum.candidate_sample_size)},
        {"curriculum_rng_seed", std::to_string(cfg.curriculum.rng_seed)},
        {"include_reverse_demos", boolean(cfg.curriculum.include_reverse_demos)},
        {"relabel_n", std::to_string(cfg.relabel_n)},
        {"alpha", fmt_real(cfg.learner.alpha)},
        {"eps_start", fmt_real(cfg.learner.eps_start)},
        {"eps_end", fmt_real(cfg.learner.eps_end)},
        {"updates_per_step", std::to_string(cfg.learner.updates_per_step)},
        {"buffer_cap", std::to_string(cfg.learner.buffer_cap)},
        {"demos_enabled", boolean(cfg.demos.enabled)},
        {"demos_forward", std::to_string(cfg.demos.per_goal_forward)},
        {"demos_reverse", std::to_string(cfg.demos.per_goal_reverse)},
        {"demo_noise", fmt_real(cfg.demos.noise)},
        {"early_switch", boolean(cfg.early_switch)},
        {"keep_after_success", boolean(cfg.keep_after_success)},
        {"out_dir", cfg.out_dir},
    };
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, value] : config_items(cfg)) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
    if (name == "paper-analog") {
        cfg.env = EnvConfig{};  // grid 5x5, H_E 50
        cfg.train_horizon = 50'000;
        cfg.total_steps = 150'000;
        cfg.seeds = {1, 2, 3, 4, 5};
    } else if (name == "paper-ratio") {
        apply_preset(cfg, "paper-analog");
        cfg.total_steps = 200'000;
    } else if (name == "door") {
        cfg.env = EnvConfig{};
        cfg.env.kind = "door";
        cfg.env.door_angles = 16;
        cfg.train_horizon = 50'000;
        cfg.total_steps = 60'000;
        cfg.seeds = {1, 2, 3, 4, 5};
    } else {
        throw std::invalid_argument("config: unknown preset: " + name);
    }
}

std::vector<std::string> preset_names() { return {"paper-analog", "paper-ratio", "door"}; }

}  // namespace prl
