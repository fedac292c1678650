#pragma once

// In-process pub/sub event bus with per-topic FIFO ordering, at-least-once
// delivery to current subscribers, and an optional append-only NDJSON journal
// per topic. Events tolerate loss on subscriber overflow (oldest dropped),
// unlike samples, which flow through back-pressured channels.

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zerops/channel.hpp"

namespace zerops {

class EventBus {
public:
    class Subscriber {
    public:
        explicit Subscriber(size_t capacity) : capacity_(capacity) {}

        // Next event, or nullopt after `timeout` with nothing delivered.
        std::optional<nlohmann::json> poll(std::chrono::milliseconds timeout);
        uint64_t dropped() const;
        size_t pending() const;

    private:
        friend class EventBus;
        void deliver(const nlohmann::json& event);

        const size_t capacity_;
        mutable std::mutex mutex_;
        std::condition_variable ready_;
        std::deque<nlohmann::json> queue_;
        uint64_t dropped_ = 0;
    };

    explicit EventBus(std::optional<std::filesystem::path> journal_dir = std::nullopt,
                      size_t subscriber_capacity = 1024);

    std::shared_ptr<Subscriber> subscribe(const std::string& topic);
    void publish(const std::string& topic, const nlohmann::json& event);

    uint64_t published(const std::string& topic) const;
    std::optional<std::filesystem::path> journal_path(const std::string& topic) const;

    // Reads a journal file back as parsed events (also used to feed the
    // standalone rca/engine commands in file-replay mode).
    static std::vector<nlohmann::json> read_journal(const std::filesystem::path& file);

private:
    struct Topic {
        std::vector<std::weak_ptr<Subscriber>> subscribers;
        std::unique_ptr<std::ofstream> journal;
        uint64_t published = 0;
    };

    std::optional<std::filesystem::path> journal_dir_;
    size_t subscriber_capacity_;
    mutable std::mutex mutex_;
    std::map<std::string, Topic> topics_;
};

}  // namespace zerops
