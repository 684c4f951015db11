#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

using namespace haj;
using namespace haj::cli;

namespace {

// Flag values are JSON when they parse as JSON; "a,b" becomes a two-element list.
json flag_value(const std::string& v) {
    try {
        return json::parse(v);
    } catch (const json::exception&) {
    }
    if (v.find(',') != std::string::npos && v.find('{') == std::string::npos) {
        json a = json::array();
        std::size_t start = 0;
        for (;;) {
            std::size_t k = v.find(',', start);
            a.push_back(v.substr(start, k == std::string::npos ? std::string::npos : k - start));
            if (k == std::string::npos) break;
            start = k + 1;
        }
        return a;
    }
    return v;
}

Integer parse_bound(const std::string& s, const char* what) {
    try {
        Rational q = parse_rational(s);
        if (denominator(q) != 1) throw 0;
        return numerator(q);
    } catch (...) {
        throw Error(ErrorKind::InvalidInput, std::string("config.") + what + ": expected an integer, got '" + s + "'");
    }
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::optional<std::filesystem::path> default_cache_dir() {
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "haj";
    if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "haj";
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"haj: periods, cycle invariants and Milnor symbols with certificates"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string digits = "128", max_height = "10000", max_den = "1000", torsion_bound = "16";
    std::string cache_dir, format = "json", manifest;
    bool no_cache = false, stdio = false;
    auto* o_digits = app.add_option("--digits", digits, "working precision in decimal digits")->envname("HAJ_DIGITS");
    auto* o_height = app.add_option("--max-height", max_height, "relation height bound")->envname("HAJ_MAX_HEIGHT");
    auto* o_den = app.add_option("--max-den", max_den, "denominator bound for lattice membership")->envname("HAJ_MAX_DEN");
    auto* o_tors = app.add_option("--torsion-bound", torsion_bound, "largest torsion order tried")->envname("HAJ_TORSION_BOUND");
    app.add_option("--cache-dir", cache_dir, "period cache directory")->envname("HAJ_CACHE_DIR");
    app.add_flag("--no-cache", no_cache, "do not read or write the period cache")->envname("HAJ_NO_CACHE");
    app.add_option("--format", format, "json or text")->envname("HAJ_FORMAT")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--manifest", manifest, "write run metadata to this file")->envname("HAJ_MANIFEST");
    app.add_flag("--stdio", stdio, "read {\"command\", \"args\"} JSON from stdin");

    struct Sub {
        CLI::App* app;
        std::map<std::string, std::string> single;
        std::map<std::string, std::vector<std::string>> multi;
        std::string preset;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    for (const auto& c : commands()) {
        auto s = std::make_unique<Sub>();
        s->app = app.add_subcommand(c.name, c.summary);
        s->app->add_option("--preset", s->preset, "bundled input file (or a path to one)");
        for (const auto& f : c.flags) {
            if (f.back() == '*') {
                std::string name = f.substr(0, f.size() - 1);
                s->app->add_option("--" + name, s->multi[name], "JSON input, repeatable")
                    ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            } else {
                s->app->add_option("--" + f, s->single[f], "JSON or plain value");
            }
        }
        subs.push_back(std::move(s));
    }

    CLI11_PARSE(app, argc, argv);

    auto started = std::chrono::steady_clock::now();
    std::string command;
    json output;
    int code = 0;
    std::optional<Session> session;
    try {
        json args = json::object();
        json preset_config = json::object();
        if (stdio) {
            json in = json::parse(std::cin);
            command = in.value("command", "");
            if (in.contains("args")) args = in.at("args");
            if (in.contains("config")) preset_config = in.at("config");
        } else {
            for (const auto& s : subs) {
                if (!s->app->parsed()) continue;
                command = s->app->get_name();
                if (!s->preset.empty()) {
                    json p = load_preset(s->preset);
                    if (p.value("command", command) != command)
                        throw Error(ErrorKind::InvalidInput,
                                    "preset " + s->preset + " is for `" + p.value("command", "") + "`, not `" + command + "`");
                    if (p.contains("args")) args = p.at("args");
                    if (p.contains("config")) preset_config = p.at("config");
                }
                for (const auto& [k, v] : s->single)
                    if (s->app->count("--" + k)) args[k] = flag_value(v);
                for (const auto& [k, v] : s->multi)
                    if (s->app->count("--" + k)) {
                        json a = json::array();
                        for (const auto& x : v) a.push_back(flag_value(x));
                        args[k] = a;
                    }
            }
        }
        if (command.empty()) {
            std::cout << app.help();
            return 0;
        }

        // flag or environment beats the preset, the preset beats the default
        auto pick = [&](CLI::Option* o, const char* env, const char* key, const std::string& v) {
            if (o->count() || std::getenv(env) || !preset_config.contains(key)) return v;
            const json& j = preset_config.at(key);
            return j.is_string() ? j.get<std::string>() : j.dump();
        };
        RunConfig cfg;
        cfg.digits = int(parse_bound(pick(o_digits, "HAJ_DIGITS", "digits", digits), "digits"));
        cfg.max_height = parse_bound(pick(o_height, "HAJ_MAX_HEIGHT", "max_height", max_height), "max_height");
        cfg.max_den = parse_bound(pick(o_den, "HAJ_MAX_DEN", "max_den", max_den), "max_den");
        cfg.torsion_bound = int(parse_bound(pick(o_tors, "HAJ_TORSION_BOUND", "torsion_bound", torsion_bound), "torsion_bound"));
        cfg.format = format;
        if (!no_cache) cfg.cache_dir = cache_dir.empty() ? default_cache_dir() : std::optional<std::filesystem::path>(cache_dir);
        session.emplace(cfg);
        output = execute(command, args, *session);
    } catch (const Error& e) {
        output = error_json(e, command);
        std::cerr << "haj: " << to_string(e.kind()) << ": " << e.what() << "\n";
        code = 2;
    } catch (const json::exception& e) {
        output = error_json(Error(ErrorKind::InvalidInput, std::string("malformed JSON input: ") + e.what()), command);
        std::cerr << "haj: " << e.what() << "\n";
        code = 2;
    } catch (const std::exception& e) {
        output = error_json(Error(ErrorKind::InvalidInput, e.what()), command);
        std::cerr << "haj: " << e.what() << "\n";
        code = 2;
    }

    std::string text = format == "text" ? render_text(output) : output.dump(2) + "\n";
    std::cout << text;

    if (!manifest.empty()) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        json argv_j = json::array();
        for (int k = 0; k < argc; ++k) argv_j.push_back(argv[k]);
        json m{{"schema", kSchema},
               {"command", command},
               {"argv", argv_j},
               {"finished_utc", utc_now()},
               {"elapsed_ms", ms.count()},
               {"exit_code", code},
               {"output_sha256", sha256_hex(text)}};
        if (session) {
            m["config"] = session->config.to_json();
            m["cache"] = {{"dir", session->config.cache_dir ? session->config.cache_dir->string() : ""},
                          {"hits", session->cache.hits()},
                          {"misses", session->cache.misses()},
                          {"rejected", session->cache.rejected()}};
        }
        std::ofstream(manifest) << m.dump(2) << "\n";
    }
    return code;
}
