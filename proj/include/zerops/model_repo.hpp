#pragma once

// Versioned on-disk model store. One directory per key holding v<N>.bin blobs
// and a `latest` pointer file; every write is temp-file + rename so a crash at
// any point leaves the previous committed version intact. Keeps the last 5
// versions per key.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "zerops/model_blob.hpp"

namespace zerops {

struct ModelKey {
    std::string step;
    std::string component;
    std::string detector;

    bool valid() const { return !step.empty() && !component.empty() && !detector.empty(); }
    // "step/component/detector" with percent-encoded parts.
    std::string to_string() const;
    static ModelKey parse(const std::string& text);

    auto operator<=>(const ModelKey&) const = default;
};

// Percent-encodes everything outside [A-Za-z0-9._-] for filesystem safety.
std::string percent_encode(const std::string& raw);
std::string percent_decode(const std::string& encoded);

class ModelRepo {
public:
    static constexpr uint32_t kRetainedVersions = 5;

    // Simulated crash points for the durability harness: the put aborts after
    // the named step, leaving the directory in exactly that intermediate state.
    enum class CrashPoint {
        none,
        after_temp_blob,     // temp blob written, not renamed
        after_blob_rename,   // version file visible, latest not updated
        after_temp_latest,   // latest temp written, not renamed
    };

    explicit ModelRepo(std::filesystem::path root);

    // Assigns version previous+1 (1 if none) and commits atomically.
    uint32_t put(const ModelKey& key, const ModelBlob& blob) {
        return put_with_crash(key, blob, CrashPoint::none);
    }
    uint32_t put_with_crash(const ModelKey& key, const ModelBlob& blob, CrashPoint crash);

    std::optional<ModelBlob> get_latest(const ModelKey& key);
    ModelBlob get(const ModelKey& key, uint32_t version);
    std::vector<std::pair<ModelKey, uint32_t>> list();

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path key_dir(const ModelKey& key) const;
    std::mutex& lock_for(const ModelKey& key);

    std::filesystem::path root_;
    std::mutex locks_mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

// Periodically snapshots a detector into the repository. Put failures are
// logged and the loop continues; the monitored pipeline must not stall on a
// broken repo.
class CheckpointLoop {
public:
    CheckpointLoop(ModelRepo& repo, ModelKey key, std::chrono::milliseconds period,
                   std::function<ModelBlob()> snapshot_fn);
    ~CheckpointLoop();

    void stop();
    uint64_t checkpoints() const { return checkpoints_; }
    uint64_t failures() const { return failures_; }

private:
    ModelRepo& repo_;
    ModelKey key_;
    std::atomic<uint64_t> checkpoints_{0};
    std::atomic<uint64_t> failures_{0};
    std::jthread worker_;
};

}  // namespace zerops
