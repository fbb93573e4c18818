#include "specmarl/serialize.hpp"

#include <fstream>
#include <ostream>
#include <set>

#include <json.hpp>

namespace specmarl {

using nlohmann::json;

namespace {

json pred_to_json(const Predicate& p) {
    json j;
    switch (p.kind) {
        case PredKind::ReachLocal: j["kind"] = "reach_lo"; break;
        case PredKind::ReachGlobal: j["kind"] = "reach_gl"; break;
        case PredKind::SumAtLeast: j["kind"] = "sum_at_least"; break;
    }
    if (p.kind == PredKind::SumAtLeast) {
        j["threshold"] = p.threshold;
    } else {
        j["target"] = p.target;
        j["tolerance"] = p.tolerance;
    }
    return j;
}

}  // namespace

std::string monitor_to_json(const TaskMonitor& m, const std::vector<int>& sync_states) {
    json j;
    j["n_states"] = m.n_states;
    j["initial"] = m.initial;
    j["dim"] = m.dim;
    j["finals"] = m.final_states();
    j["global_states"] = m.global_states();
    j["sync_states"] = sync_states;
    j["depth"] = m.depth;
    j["max_depth"] = m.max_depth;
    json regs = json::array();
    for (int r = 0; r < m.n_registers(); ++r) {
        regs.push_back(json{{"name", m.register_name[static_cast<std::size_t>(r)]},
                            {"initial", m.initial_registers[static_cast<std::size_t>(r)]},
                            {"scope", m.register_kind[static_cast<std::size_t>(r)] == TransKind::Local
                                          ? "local"
                                          : "global"}});
    }
    j["registers"] = regs;
    json trans = json::array();
    for (const Transition& t : m.transitions) {
        json tj;
        tj["id"] = t.id;
        tj["source"] = t.source;
        tj["target"] = t.target;
        tj["kind"] = t.kind == TransKind::Local ? "local" : "global";
        tj["self_loop"] = t.self_loop;
        json guards = json::array();
        for (const GuardPart& g : t.guards) {
            json gj = pred_to_json(g.pred);
            if (g.owner >= 0) gj["agent"] = g.owner;
            guards.push_back(gj);
        }
        tj["guards"] = guards;
        trans.push_back(tj);
    }
    j["transitions"] = trans;
    return j.dump(2);
}

std::string policy_to_json(const PolicyParams& p) {
    json j;
    j["n_agents"] = p.n_agents;
    j["n_states"] = p.n_states;
    j["n_blocks"] = p.n_blocks;
    j["feat"] = p.feat;
    j["act_dim"] = p.act_dim;
    j["max_out"] = p.max_out;
    j["no_mon"] = p.no_mon;
    j["centralized"] = p.centralized;
    j["deploy_stage"] = p.deploy_stage;
    j["flat"] = p.flat;
    return j.dump();
}

PolicyParams policy_from_json(const std::string& text) {
    json j = json::parse(text);
    PolicyParams p;
    p.n_agents = j.at("n_agents").get<int>();
    p.n_states = j.at("n_states").get<int>();
    p.n_blocks = j.at("n_blocks").get<int>();
    p.feat = j.at("feat").get<int>();
    p.act_dim = j.at("act_dim").get<int>();
    p.max_out = j.at("max_out").get<int>();
    p.no_mon = j.at("no_mon").get<bool>();
    p.centralized = j.at("centralized").get<bool>();
    p.deploy_stage = j.at("deploy_stage").get<int>();
    p.flat = j.at("flat").get<std::vector<double>>();
    if (p.flat.size() != p.expected_size()) {
        throw std::runtime_error("policy file is inconsistent with its own metadata");
    }
    return p;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) {
            throw std::runtime_error("unknown key '" + it.key() + "' in " + where);
        }
    }
}

}  // namespace

ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    reject_unknown(j, {"spec", "spec_file", "tolerance", "env", "train", "seed"}, "config");

    ExperimentConfig cfg;
    if (j.contains("spec_file")) {
        std::ifstream spec_in(j.at("spec_file").get<std::string>());
        if (!spec_in) {
            throw std::runtime_error("cannot open spec file: " + j.at("spec_file").get<std::string>());
        }
        cfg.spec_text.assign(std::istreambuf_iterator<char>(spec_in), {});
    } else {
        cfg.spec_text = j.at("spec").get<std::string>();
    }
    cfg.tolerance = j.value("tolerance", 1.0);

    const json& env = j.at("env");
    reject_unknown(env,
                   {"kind", "dim", "agents", "horizon", "box", "max_speed", "dt", "anchor_x",
                    "spacing", "width", "height", "start"},
                   "env");
    std::string kind = env.value("kind", "nav");
    if (kind == "nav") {
        cfg.env.kind = EnvConfig::Kind::Nav;
        NavConfig& nav = cfg.env.nav;
        nav.dim = env.value("dim", 2);
        nav.n_agents = env.value("agents", 2);
        nav.horizon = env.value("horizon", 200);
        if (env.contains("box")) {
            auto box = env.at("box").get<std::vector<double>>();
            if (box.size() != 2 || box[0] >= box[1]) {
                throw std::runtime_error("env.box must be [lo, hi]");
            }
            nav.box_lo.assign(static_cast<std::size_t>(nav.dim), box[0]);
            nav.box_hi.assign(static_cast<std::size_t>(nav.dim), box[1]);
        }
        nav.max_speed = env.value("max_speed", 1.0);
        nav.dt = env.value("dt", 1.0);
        nav.anchor_x = env.value("anchor_x", 0.0);
        nav.spacing = env.value("spacing", 2.0);
        nav.fill_defaults();
    } else if (kind == "grid") {
        cfg.env.kind = EnvConfig::Kind::Grid;
        GridConfig& grid = cfg.env.grid;
        grid.width = env.value("width", 3);
        grid.height = env.value("height", 3);
        grid.n_agents = env.value("agents", 1);
        grid.horizon = env.value("horizon", 4);
        if (env.contains("start")) grid.start_cells = env.at("start").get<std::vector<int>>();
        grid.fill_defaults();
    } else {
        throw std::runtime_error("env.kind must be 'nav' or 'grid'");
    }

    TrainConfig& train = cfg.train;
    train.seed = j.value("seed", 0);
    if (j.contains("train")) {
        const json& tr = j.at("train");
        reject_unknown(tr,
                       {"population", "elite_frac", "iterations", "episodes_per_member",
                        "eval_episodes", "eval_every", "early_stop", "threshold", "k", "f",
                        "init_std", "min_std", "workers"},
                       "train");
        train.population = tr.value("population", train.population);
        train.elite_frac = tr.value("elite_frac", train.elite_frac);
        train.iterations = tr.value("iterations", train.iterations);
        train.episodes_per_member = tr.value("episodes_per_member", train.episodes_per_member);
        train.eval_episodes = tr.value("eval_episodes", train.eval_episodes);
        train.eval_every = tr.value("eval_every", train.eval_every);
        train.early_stop = tr.value("early_stop", train.early_stop);
        train.satisfaction_threshold = tr.value("threshold", train.satisfaction_threshold);
        train.k = tr.value("k", train.k);
        train.f = tr.value("f", train.f);
        train.init_std = tr.value("init_std", train.init_std);
        train.min_std = tr.value("min_std", train.min_std);
        train.workers = tr.value("workers", train.workers);
    }
    return cfg;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
    out << "iteration,best_score,mean_score,satisfaction,stage\n";
    for (const CurvePoint& p : curve) {
        out << p.iteration << "," << p.best_score << "," << p.mean_score << "," << p.satisfaction
            << "," << p.stage << "\n";
    }
}

}  // namespace specmarl
