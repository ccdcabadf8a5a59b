#include "roughpam/results_store.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "roughpam/common.hpp"
#include "roughpam/run_config.hpp"

namespace roughpam {

using nlohmann::json;

namespace {

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json to_json(const ResultRecord& r) {
    return {{"fingerprint", r.fingerprint},
            {"command", r.command},
            {"timestamp", r.timestamp},
            {"artifact_version", r.artifact_version},
            {"payload_sha256", r.payload_sha256},
            {"payload_digest", r.payload_digest}};
}

}  // namespace

std::string payload_digest(const Artifacts& artifacts) {
    std::string all;
    for (const auto& [name, bytes] : artifacts) {
        all += name;
        all.push_back('\0');
        all += std::to_string(bytes.size());
        all.push_back('\0');
        all += bytes;
    }
    return sha256_hex(all);
}

ResultsStore::ResultsStore(std::string dir) : dir_(std::move(dir)) {}

std::vector<ResultRecord> ResultsStore::records() const {
    std::vector<ResultRecord> out;
    std::ifstream in(std::filesystem::path(dir_) / "records.jsonl");
    if (!in) return out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            ResultRecord r;
            r.fingerprint = j.at("fingerprint").get<std::string>();
            r.command = j.at("command").get<std::string>();
            r.timestamp = j.at("timestamp").get<std::string>();
            r.artifact_version = j.at("artifact_version").get<int>();
            r.payload_sha256 = j.at("payload_sha256").get<std::map<std::string, std::string>>();
            r.payload_digest = j.at("payload_digest").get<std::string>();
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw IntegrityError("records.jsonl line " + std::to_string(lineno) + " is malformed: " + e.what());
        }
    }
    return out;
}

ResultRecord ResultsStore::append(const std::string& fingerprint, const std::string& command,
                                  const Artifacts& artifacts) {
    ResultRecord rec;
    rec.fingerprint = fingerprint;
    rec.command = command;
    rec.timestamp = utc_now();
    for (const auto& [name, bytes] : artifacts) rec.payload_sha256[name] = sha256_hex(bytes);
    rec.payload_digest = payload_digest(artifacts);

    for (const auto& old : records()) {
        if (old.fingerprint == fingerprint && old.command == command && old.payload_digest != rec.payload_digest) {
            throw IntegrityError("fingerprint " + fingerprint.substr(0, 12) + " already recorded for '" + command +
                                 "' with a different payload");
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(dir_);
    for (const auto& [name, bytes] : artifacts) {
        std::ofstream out(fs::path(dir_) / name, std::ios::binary | std::ios::trunc);
        if (!out) throw IntegrityError("cannot write artifact " + name);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    std::ofstream log(fs::path(dir_) / "records.jsonl", std::ios::app);
    if (!log) throw IntegrityError("cannot append to records.jsonl");
    log << to_json(rec).dump() << '\n';
    return rec;
}

}  // namespace roughpam
