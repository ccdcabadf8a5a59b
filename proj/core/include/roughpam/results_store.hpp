#pragma once

#include <map>
#include <string>
#include <vector>

namespace roughpam {

inline constexpr int kArtifactVersion = 1;

// Named artifact payloads of one command run (file name -> bytes).
using Artifacts = std::map<std::string, std::string>;

struct ResultRecord {
    std::string fingerprint;
    std::string command;
    std::string timestamp;  // excluded from payload hashing
    int artifact_version = kArtifactVersion;
    std::map<std::string, std::string> payload_sha256;  // per artifact
    std::string payload_digest;                         // hash over all artifacts
};

// SHA-256 over the artifact names and bytes in name order.
std::string payload_digest(const Artifacts& artifacts);

// Append-only store: <dir>/records.jsonl plus the artifact files themselves.
class ResultsStore {
public:
    explicit ResultsStore(std::string dir);

    // Loads all records; throws IntegrityError on malformed lines.
    std::vector<ResultRecord> records() const;

    // Writes the artifacts and appends a record. A previous record with the
    // same fingerprint and command but a different payload is an integrity
    // error and nothing is written.
    ResultRecord append(const std::string& fingerprint, const std::string& command, const Artifacts& artifacts);

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
};

}  // namespace roughpam
