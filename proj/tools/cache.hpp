#pragma once

#include "serialize.hpp"

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

namespace haj::cli {

std::string sha256_hex(const std::string& data);

// One JSON file per (g2, g3, digits), named by the hash of the key.  Entries carry a
// checksum of their payload and must pass the Eisenstein reconstruction on load.
class PeriodCache {
public:
    explicit PeriodCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}

    // Periods at ctx.digits; a cold computation goes through the same serialized form a
    // later hit reads back, so both produce identical numbers.
    PeriodLatticeData periods(const EllipticCurve& E, const PrecisionCtx& ctx);

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    std::size_t rejected() const { return rejected_; }
    std::optional<std::filesystem::path> path_for(const EllipticCurve& E, int digits) const;

    static std::string key(const EllipticCurve& E, int digits);

private:
    std::optional<PeriodLatticeData> load(const EllipticCurve& E, const PrecisionCtx& ctx);
    void store(const EllipticCurve& E, int digits, const json& payload);

    std::optional<std::filesystem::path> dir_;
    std::mutex mu_;
    std::size_t hits_ = 0, misses_ = 0, rejected_ = 0;
};

}  // namespace haj::cli
