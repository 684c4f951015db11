#pragma once

#include "cache.hpp"
#include "serialize.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace haj::cli {

struct RunConfig {
    int digits = 128;
    Integer max_height = 10000;
    Integer max_den = 1000;
    int torsion_bound = 16;
    std::optional<std::filesystem::path> cache_dir;
    std::string format = "json";

    void validate() const;
    json to_json() const;
};

struct Session {
    RunConfig config;
    PeriodCache cache;
    PrecisionCtx ctx;

    explicit Session(const RunConfig& c) : config(c), cache(c.cache_dir), ctx(c.digits) {}
    PeriodLatticeData periods(const EllipticCurve& E) { return cache.periods(E, ctx); }
};

using Handler = std::function<json(const json& args, Session& s)>;

struct CommandInfo {
    std::string name;
    std::string summary;
    // flag names accepted by the command; a trailing '*' marks a repeatable flag
    std::vector<std::string> flags;
    Handler run;
};

const std::vector<CommandInfo>& commands();
const CommandInfo* find_command(const std::string& name);

// Runs the command and wraps the result with schema, command and config.
json execute(const std::string& name, const json& args, Session& s);

// Preset lookup: a bare name resolves in the bundled preset directory.
std::filesystem::path preset_path(const std::string& name);
json load_preset(const std::string& name);

// Maps f over [0, n) on a worker pool; results keep their index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace haj::cli
