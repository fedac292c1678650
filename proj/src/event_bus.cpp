#include "zerops/event_bus.hpp"

#include "zerops/errors.hpp"
#include "zerops/log.hpp"

namespace zerops {

std::optional<nlohmann::json> EventBus::Subscriber::poll(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (!ready_.wait_for(lock, timeout, [&] { return !queue_.empty(); })) return std::nullopt;
    nlohmann::json event = std::move(queue_.front());
    queue_.pop_front();
    return event;
}

uint64_t EventBus::Subscriber::dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
}

size_t EventBus::Subscriber::pending() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
}

void EventBus::Subscriber::deliver(const nlohmann::json& event) {
    std::lock_guard lock(mutex_);
    if (queue_.size() >= capacity_) {
        queue_.pop_front();
        ++dropped_;
    }
    queue_.push_back(event);
    ready_.notify_one();
}

EventBus::EventBus(std::optional<std::filesystem::path> journal_dir, size_t subscriber_capacity)
    : journal_dir_(std::move(journal_dir)), subscriber_capacity_(subscriber_capacity) {
    if (journal_dir_) {
        std::error_code ec;
        std::filesystem::create_directories(*journal_dir_, ec);
        if (ec)
            throw ConfigError("cannot create journal directory " + journal_dir_->string() + ": " +
                              ec.message());
    }
}

std::shared_ptr<EventBus::Subscriber> EventBus::subscribe(const std::string& topic) {
    if (topic.empty()) throw ConfigError("topic name must not be empty");
    auto sub = std::make_shared<Subscriber>(subscriber_capacity_);
    std::lock_guard lock(mutex_);
    topics_[topic].subscribers.push_back(sub);
    return sub;
}

void EventBus::publish(const std::string& topic, const nlohmann::json& event) {
    if (topic.empty()) throw ConfigError("topic name must not be empty");
    std::lock_guard lock(mutex_);
    Topic& t = topics_[topic];
    ++t.published;
    if (journal_dir_) {
        if (!t.journal) {
            auto path = *journal_dir_ / (topic + ".ndjson");
            t.journal = std::make_unique<std::ofstream>(path, std::ios::app);
            if (!*t.journal) {
                log::warn("cannot open journal %s, topic will not be journaled", path.c_str());
                t.journal.reset();
            }
        }
        if (t.journal) *t.journal << event.dump() << '\n' << std::flush;
    }
    bool expired = false;
    for (auto& weak : t.subscribers) {
        if (auto sub = weak.lock())
            sub->deliver(event);
        else
            expired = true;
    }
    if (expired)
        std::erase_if(t.subscribers, [](const auto& weak) { return weak.expired(); });
}

uint64_t EventBus::published(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic);
    return it == topics_.end() ? 0 : it->second.published;
}

std::optional<std::filesystem::path> EventBus::journal_path(const std::string& topic) const {
    if (!journal_dir_) return std::nullopt;
    return *journal_dir_ / (topic + ".ndjson");
}

std::vector<nlohmann::json> EventBus::read_journal(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open journal file: " + file.string());
    std::vector<nlohmann::json> events;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            events.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("journal " + file.string() + " line " + std::to_string(line_no) +
                              " is not valid JSON: " + e.what());
        }
    }
    return events;
}

}  // namespace zerops
