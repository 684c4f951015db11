#include "cache.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace haj::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string PeriodCache::key(const EllipticCurve& E, int digits) {
    return "g2=" + E.g2.str() + ";g3=" + E.g3.str() + ";digits=" + std::to_string(digits);
}

std::optional<fs::path> PeriodCache::path_for(const EllipticCurve& E, int digits) const {
    if (!dir_) return std::nullopt;
    return *dir_ / ("periods-" + sha256_hex(key(E, digits)).substr(0, 32) + ".json");
}

namespace {

// stored with headroom so a reload reproduces the working-precision values
int stored_digits(const PrecisionCtx& ctx) { return int(ctx.working_digits()) + 10; }

json payload_of(const PeriodLatticeData& lat, const PrecisionCtx& ctx) { return to_json(lat, stored_digits(ctx)); }

}  // namespace

std::optional<PeriodLatticeData> PeriodCache::load(const EllipticCurve& E, const PrecisionCtx& ctx) {
    auto path = path_for(E, ctx.digits);
    if (!path || !fs::exists(*path)) return std::nullopt;
    try {
        std::ifstream in(*path);
        json entry = json::parse(in);
        if (entry.value("schema", "") != kSchema || entry.value("key", "") != key(E, ctx.digits)) throw 0;
        const json& payload = entry.at("payload");
        if (entry.at("checksum").get<std::string>() != sha256_hex(payload.dump())) throw 0;
        PeriodLatticeData lat = read_lattice(payload, "cache.payload");
        EisensteinCheck chk = eisenstein_reconstruct(lat, E, ctx);
        if (!(chk.error < pow10(-ctx.digits / 2))) throw 0;
        return lat;
    } catch (...) {
        ++rejected_;
        return std::nullopt;
    }
}

void PeriodCache::store(const EllipticCurve& E, int digits, const json& payload) {
    auto path = path_for(E, digits);
    if (!path) return;
    json entry{{"schema", kSchema}, {"key", key(E, digits)}, {"payload", payload}, {"checksum", sha256_hex(payload.dump())}};
    std::error_code ec;
    fs::create_directories(path->parent_path(), ec);
    std::random_device rd;
    fs::path tmp = *path;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp);
        if (!out) return;
        out << entry.dump(2) << "\n";
        if (!out) {
            fs::remove(tmp, ec);
            return;
        }
    }
    fs::rename(tmp, *path, ec);
    if (ec) fs::remove(tmp, ec);
}

PeriodLatticeData PeriodCache::periods(const EllipticCurve& E, const PrecisionCtx& ctx) {
    WorkingPrecision wp(ctx);
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (auto hit = load(E, ctx)) {
            ++hits_;
            return *hit;
        }
        ++misses_;
    }
    PeriodLatticeData lat = compute_periods(E, ctx);
    json payload = payload_of(lat, ctx);
    std::lock_guard<std::mutex> lock(mu_);
    store(E, ctx.digits, payload);
    return read_lattice(payload, "periods");
}

}  // namespace haj::cli
