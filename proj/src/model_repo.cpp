#include "zerops/model_repo.hpp"

#include <algorithm>
#include <condition_variable>
#include <fstream>

#include "zerops/errors.hpp"
#include "zerops/log.hpp"

namespace fs = std::filesystem;

namespace zerops {

namespace {

bool fs_safe(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-';
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::vector<uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RepoError("cannot read " + path.string());
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& target, const void* data, size_t size, bool commit) {
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw RepoError("cannot write " + tmp.string());
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out) throw RepoError("short write to " + tmp.string());
    }
    if (!commit) return;  // simulated crash before rename
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw RepoError("rename " + tmp.string() + " -> " + target.string() + " failed: " +
                            ec.message());
}

std::optional<uint32_t> read_latest_pointer(const fs::path& dir) {
    std::ifstream in(dir / "latest");
    if (!in) return std::nullopt;
    uint32_t v = 0;
    in >> v;
    if (!in) return std::nullopt;
    return v;
}

uint32_t max_version_on_disk(const fs::path& dir) {
    uint32_t max_v = 0;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 5 && name.front() == 'v' && name.ends_with(".bin")) {
            try {
                const uint32_t v =
                    static_cast<uint32_t>(std::stoul(name.substr(1, name.size() - 5)));
                max_v = std::max(max_v, v);
            } catch (...) {
            }
        }
    }
    return max_v;
}

}  // namespace

std::string percent_encode(const std::string& raw) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) {
        if (fs_safe(static_cast<char>(c))) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

std::string percent_decode(const std::string& encoded) {
    std::string out;
    out.reserve(encoded.size());
    for (size_t i = 0; i < encoded.size(); ++i) {
        if (encoded[i] == '%' && i + 2 < encoded.size()) {
            const int hi = hex_value(encoded[i + 1]);
            const int lo = hex_value(encoded[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>(hi << 4 | lo);
                i += 2;
                continue;
            }
        }
        out += encoded[i];
    }
    return out;
}

std::string ModelKey::to_string() const {
    return percent_encode(step) + "/" + percent_encode(component) + "/" +
           percent_encode(detector);
}

ModelKey ModelKey::parse(const std::string& text) {
    const size_t first = text.find('/');
    const size_t second = first == std::string::npos ? std::string::npos
                                                     : text.find('/', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw RepoError("model key must be step/component/detector, got '" + text + "'");
    ModelKey key{percent_decode(text.substr(0, first)),
                 percent_decode(text.substr(first + 1, second - first - 1)),
                 percent_decode(text.substr(second + 1))};
    if (!key.valid()) throw RepoError("model key parts must be non-empty: '" + text + "'");
    return key;
}

ModelRepo::ModelRepo(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw RepoError("cannot create repository root " + root_.string());
}

fs::path ModelRepo::key_dir(const ModelKey& key) const {
    return root_ / percent_encode(key.step) / percent_encode(key.component) /
           percent_encode(key.detector);
}

std::mutex& ModelRepo::lock_for(const ModelKey& key) {
    std::lock_guard guard(locks_mutex_);
    auto& slot = locks_[key.to_string()];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

uint32_t ModelRepo::put_with_crash(const ModelKey& key, const ModelBlob& blob, CrashPoint crash) {
    if (!key.valid()) throw RepoError("model key parts must be non-empty");
    if (blob.payload.empty()) throw RepoError("refusing to store an empty model payload");
    std::lock_guard guard(lock_for(key));

    const fs::path dir = key_dir(key);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RepoError("cannot create key directory " + dir.string());

    const uint32_t committed = read_latest_pointer(dir).value_or(0);
    // Orphans from crashed puts may sit above the committed version;
    // never reuse their numbers.
    const uint32_t version = std::max(committed, max_version_on_disk(dir)) + 1;

    ModelBlob stamped = blob;
    stamped.version = version;
    const std::vector<uint8_t> bytes = stamped.encode();

    const fs::path blob_path = dir / ("v" + std::to_string(version) + ".bin");
    write_file_atomic(blob_path, bytes.data(), bytes.size(),
                      crash != CrashPoint::after_temp_blob);
    if (crash == CrashPoint::after_temp_blob || crash == CrashPoint::after_blob_rename)
        return version;

    const std::string pointer = std::to_string(version) + "\n";
    write_file_atomic(dir / "latest", pointer.data(), pointer.size(),
                      crash != CrashPoint::after_temp_latest);
    if (crash == CrashPoint::after_temp_latest) return version;

    if (version > kRetainedVersions) {
        for (uint32_t v = 1; v + kRetainedVersions <= version; ++v)
            fs::remove(dir / ("v" + std::to_string(v) + ".bin"), ec);
    }
    return version;
}

std::optional<ModelBlob> ModelRepo::get_latest(const ModelKey& key) {
    const fs::path dir = key_dir(key);
    const auto version = read_latest_pointer(dir);
    if (!version) return std::nullopt;
    return get(key, *version);
}

ModelBlob ModelRepo::get(const ModelKey& key, uint32_t version) {
    const fs::path path = key_dir(key) / ("v" + std::to_string(version) + ".bin");
    if (!fs::exists(path))
        throw RepoError("version " + std::to_string(version) + " of key '" + key.to_string() +
                        "' not found");
    try {
        return ModelBlob::decode(read_file(path));
    } catch (const RepoError& e) {
        throw RepoError(std::string(e.what()) + " (file " + path.string() + ")");
    }
}

std::vector<std::pair<ModelKey, uint32_t>> ModelRepo::list() {
    std::vector<std::pair<ModelKey, uint32_t>> out;
    std::error_code ec;
    for (const auto& step : fs::directory_iterator(root_, ec)) {
        if (!step.is_directory()) continue;
        for (const auto& component : fs::directory_iterator(step.path(), ec)) {
            if (!component.is_directory()) continue;
            for (const auto& detector : fs::directory_iterator(component.path(), ec)) {
                if (!detector.is_directory()) continue;
                ModelKey key{percent_decode(step.path().filename().string()),
                             percent_decode(component.path().filename().string()),
                             percent_decode(detector.path().filename().string())};
                if (auto v = read_latest_pointer(detector.path())) out.emplace_back(key, *v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

CheckpointLoop::CheckpointLoop(ModelRepo& repo, ModelKey key, std::chrono::milliseconds period,
                               std::function<ModelBlob()> snapshot_fn)
    : repo_(repo), key_(std::move(key)) {
    worker_ = std::jthread([this, period, fn = std::move(snapshot_fn)](std::stop_token stop) {
        std::mutex m;
        std::condition_variable_any cv;
        auto next = std::chrono::steady_clock::now() + period;
        while (true) {
            {
                std::unique_lock lock(m);
                cv.wait_until(lock, stop, next, [] { return false; });
            }
            if (stop.stop_requested()) break;
            next += period;
            try {
                repo_.put(key_, fn());
                checkpoints_.fetch_add(1);
            } catch (const std::exception& e) {
                failures_.fetch_add(1);
                log::warn("checkpoint of '%s' failed: %s", key_.to_string().c_str(), e.what());
            }
        }
    });
}

CheckpointLoop::~CheckpointLoop() { stop(); }

void CheckpointLoop::stop() {
    worker_.request_stop();
    if (worker_.joinable()) worker_.join();
}

}  // namespace zerops
