/**
 * @file service.hpp
 * @brief HTTP front end: analyze uploads, serve stored results and static files
 */
#pragma once

#include <palm/ml/classifier.hpp>
#include <palm/pipeline.hpp>
#include <palm/reading.hpp>

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace palm {

inline constexpr const char* kVersion = "1.0.0";

struct ServiceConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::size_t max_upload_bytes = 8u << 20;
    std::chrono::milliseconds result_ttl{std::chrono::hours(1)};
    std::chrono::milliseconds sweep_interval{std::chrono::seconds(5)};
    std::filesystem::path static_dir;
    std::filesystem::path persist_dir;  // empty: results live in memory only
    int threads = 8;

    void validate() const;
};

/// Reads the optional "service" object of the pipeline config file.
ServiceConfig service_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// PALM_BIND and PALM_PORT override bind address and port.
void apply_env_overrides(ServiceConfig& cfg);

/// Immutable state shared by request handlers.
struct Engine {
    PipelineConfig config;
    RuleTable rules;
    std::optional<ml::Model> model;
    std::string model_error;  // why model is empty

    bool model_loaded() const { return model.has_value(); }
};

/// Config and rules must load; a missing or corrupt forest model leaves the engine degraded.
std::shared_ptr<const Engine> load_engine(const std::filesystem::path& config_path);

/// URL-safe 128-bit token (32 lowercase hex digits).
std::string make_request_id();

struct StoredResult {
    std::string id;
    nlohmann::json summary;
    std::vector<std::uint8_t> annotated_png;
    std::chrono::steady_clock::time_point created;
};

class ResultStore {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    explicit ResultStore(std::chrono::milliseconds ttl, Clock clock = [] { return std::chrono::steady_clock::now(); });

    /**
     * @brief Mirror results to <dir>/<id>.json and <dir>/<id>.png
     *
     * Unexpired results already in dir are loaded (age taken from file mtime);
     * expired ones are deleted. Returns the number loaded.
     */
    std::size_t persist_to(const std::filesystem::path& dir);

    /// Returns false if the id is already taken.
    bool put(StoredResult r);
    std::optional<StoredResult> get(const std::string& id) const;
    std::size_t sweep();
    std::size_t size() const;

private:
    bool expired(const StoredResult& r, std::chrono::steady_clock::time_point now) const;
    void remove_files(const std::string& id) const;

    std::chrono::milliseconds ttl_;
    Clock clock_;
    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, StoredResult> items_;
};

class Service {
public:
    Service(ServiceConfig cfg, std::shared_ptr<const Engine> engine);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and starts serving on background threads; returns the bound port.
    int start();
    void stop();

    int port() const { return port_; }
    ResultStore& store() { return store_; }

private:
    void install_routes();
    void sweeper_loop();

    ServiceConfig cfg_;
    std::shared_ptr<const Engine> engine_;
    ResultStore store_;
    std::unique_ptr<httplib::Server> server_;
    std::thread listener_;
    std::thread sweeper_;
    std::mutex sweep_mu_;
    std::condition_variable sweep_cv_;
    bool stopping_ = false;
    std::atomic<bool> running_{false};
    int port_ = 0;
};

}  // namespace palm
