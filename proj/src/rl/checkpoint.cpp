#include "darc/rl/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "darc/num/serialize.hpp"

namespace darc::rl {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string next_line(std::istream& in, std::size_t& line_no, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw num::FormatError(line_no + 1, std::string("truncated: expected ") + what);
    ++line_no;
    return line;
}

void write_network(std::ostream& out, const char* kind, std::size_t index, const Network& net) {
    out << "NET " << kind << ' ' << index << '\n';
    num::write_params(out, net.online);
    num::write_params(out, net.target);
    num::write_params(out, net.adam.m);
    num::write_params(out, net.adam.v);
    out << "ADAM " << net.adam.t << '\n';
}

void read_network(std::istream& in, std::size_t& line_no, const std::string& kind, std::size_t index, Network& net) {
    const std::string expected = "NET " + kind + ' ' + std::to_string(index);
    if (next_line(in, line_no, expected.c_str()) != expected) {
        throw num::FormatError(line_no, "expected '" + expected + "'");
    }
    num::ParamSet online = num::read_params(in, line_no);
    num::ParamSet target = num::read_params(in, line_no);
    num::ParamSet m = num::read_params(in, line_no);
    num::ParamSet v = num::read_params(in, line_no);
    for (const num::ParamSet* p : {&online, &target, &m, &v}) {
        if (!p->same_layout(net.online)) {
            throw num::FormatError(line_no, kind + ' ' + std::to_string(index) + ": parameter layout does not match config");
        }
    }
    const std::string adam_line = next_line(in, line_no, "ADAM line");
    const auto tok = num::split_ws(adam_line);
    std::size_t t = 0;
    if (tok.size() != 2 || tok[0] != "ADAM" || !num::parse_size(tok[1], t)) {
        throw num::FormatError(line_no, "expected 'ADAM <t>'");
    }
    net.online = std::move(online);
    net.target = std::move(target);
    net.adam.m = std::move(m);
    net.adam.v = std::move(v);
    net.adam.t = t;
}

}  // namespace

void write_agent(std::ostream& out, const Agent& agent) {
    const AgentConfig& cfg = agent.config();
    out << "DARCAGENT 1 algo=" << to_string(cfg.algo) << " obs_dim=" << agent.obs_dim()
        << " action_dim=" << agent.action_dim() << " steps=" << agent.env_steps()
        << " critic_updates=" << agent.critic_updates() << " actor_updates=" << agent.actor_updates()
        << " config_hash=" << hex64(config_hash(cfg)) << '\n';
    out << "CONFIG " << to_json(cfg).dump() << '\n';
    for (std::size_t i = 0; i < agent.actors().size(); ++i) write_network(out, "actor", i, agent.actors()[i]);
    for (std::size_t i = 0; i < agent.critics().size(); ++i) write_network(out, "critic", i, agent.critics()[i]);
    out << "END\n";
}

Agent read_agent(std::istream& in) {
    std::size_t line_no = 0;
    const std::string header = next_line(in, line_no, "DARCAGENT header");
    const auto head = num::split_ws(header);
    if (head.size() < 2 || head[0] != "DARCAGENT") throw num::FormatError(line_no, "not an agent checkpoint");
    if (head[1] != "1") throw num::FormatError(line_no, "unsupported checkpoint version " + std::string(head[1]));
    std::map<std::string, std::string, std::less<>> fields;
    for (std::size_t i = 2; i < head.size(); ++i) {
        const auto eq = head[i].find('=');
        if (eq == std::string_view::npos) throw num::FormatError(line_no, "bad header field '" + std::string(head[i]) + "'");
        fields[std::string(head[i].substr(0, eq))] = std::string(head[i].substr(eq + 1));
    }
    auto field = [&](const char* key) -> const std::string& {
        auto it = fields.find(key);
        if (it == fields.end()) throw num::FormatError(line_no, std::string("header lacks ") + key);
        return it->second;
    };
    auto count = [&](const char* key) {
        std::size_t v = 0;
        if (!num::parse_size(field(key), v)) throw num::FormatError(line_no, std::string("bad ") + key);
        return v;
    };
    const std::size_t obs_dim = count("obs_dim"), action_dim = count("action_dim");
    const std::size_t steps = count("steps"), critic_updates = count("critic_updates");
    const std::size_t actor_updates = count("actor_updates");
    const std::string algo = field("algo"), hash = field("config_hash");

    const std::string cfg_line = next_line(in, line_no, "CONFIG line");
    if (cfg_line.rfind("CONFIG ", 0) != 0) throw num::FormatError(line_no, "expected CONFIG line");
    AgentConfig cfg;
    try {
        cfg = agent_config_from_json(nlohmann::json::parse(cfg_line.substr(7)));
    } catch (const std::exception& e) {
        throw num::FormatError(line_no, std::string("bad CONFIG: ") + e.what());
    }
    if (to_string(cfg.algo) != algo) throw num::FormatError(line_no, "CONFIG algo disagrees with header");
    if (hex64(config_hash(cfg)) != hash) throw num::FormatError(line_no, "config_hash mismatch");

    Agent agent(cfg, obs_dim, action_dim, 0);
    for (std::size_t i = 0; i < agent.actors().size(); ++i) read_network(in, line_no, "actor", i, agent.actors()[i]);
    for (std::size_t i = 0; i < agent.critics().size(); ++i) read_network(in, line_no, "critic", i, agent.critics()[i]);
    if (next_line(in, line_no, "END") != "END") throw num::FormatError(line_no, "expected END");
    agent.set_counters(steps, critic_updates, actor_updates);
    return agent;
}

void save_agent(const std::filesystem::path& path, const Agent& agent) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_agent(out, agent);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Agent load_agent(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return read_agent(in);
    } catch (const num::FormatError& e) {
        throw num::FormatError(e.line(), e.detail() + " (" + path.string() + ")");
    }
}

bool same_agent_state(const Agent& a, const Agent& b) {
    if (a.obs_dim() != b.obs_dim() || a.action_dim() != b.action_dim()) return false;
    if (to_json(a.config()) != to_json(b.config())) return false;
    if (a.env_steps() != b.env_steps() || a.critic_updates() != b.critic_updates() ||
        a.actor_updates() != b.actor_updates()) {
        return false;
    }
    auto same = [](const std::vector<Network>& x, const std::vector<Network>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i].online == y[i].online && x[i].target == y[i].target && x[i].adam == y[i].adam)) return false;
        }
        return true;
    };
    return same(a.actors(), b.actors()) && same(a.critics(), b.critics());
}

}  // namespace darc::rl
