/**
 * @file service.cpp
 * @brief cpp-httplib routes, result store, TTL sweeper
 */

#include <palm/service.hpp>
#include <palm/error.hpp>
#include <palm/ml/model_io.hpp>
#include <palm/png_io.hpp>
#include <palm/text.hpp>

#include <httplib.h>
#include <fmt/format.h>

#include <cstdlib>
#include <random>

namespace palm {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view error, std::string_view detail) {
    send_json(res, status, {{"error", error}, {"detail", detail}});
}

std::string error_token(int status) {
    switch (status) {
        case 400: return "bad_request";
        case 404: return "not_found";
        case 405: return "method_not_allowed";
        case 413: return "payload_too_large";
        case 422: return "unprocessable_image";
        case 503: return "unavailable";
        default: return status >= 500 ? "internal" : "error";
    }
}

}  // namespace

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535) throw InvalidConfig("service port must be within [0, 65535]");
    if (max_upload_bytes == 0) throw InvalidConfig("service max_upload_bytes must be positive");
    if (result_ttl.count() <= 0) throw InvalidConfig("service result_ttl must be positive");
    if (sweep_interval.count() <= 0) throw InvalidConfig("service sweep_interval must be positive");
    if (threads < 1) throw InvalidConfig("service threads must be >= 1");
}

ServiceConfig service_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    ServiceConfig c;
    if (!j.contains("service")) return c;
    try {
        const auto& s = j.at("service");
        c.bind = s.value("bind", c.bind);
        c.port = s.value("port", c.port);
        c.max_upload_bytes = s.value("max_upload_bytes", c.max_upload_bytes);
        if (s.contains("result_ttl_seconds")) {
            c.result_ttl = std::chrono::milliseconds(static_cast<long long>(s.at("result_ttl_seconds").get<double>() * 1000.0));
        }
        if (s.contains("sweep_interval_seconds")) {
            c.sweep_interval = std::chrono::milliseconds(static_cast<long long>(s.at("sweep_interval_seconds").get<double>() * 1000.0));
        }
        c.threads = s.value("threads", c.threads);
        const auto dir = s.value("static_dir", std::string{});
        if (!dir.empty()) c.static_dir = std::filesystem::path(dir).is_absolute() ? std::filesystem::path(dir) : base_dir / dir;
        const auto persist = s.value("persist_dir", std::string{});
        if (!persist.empty()) c.persist_dir = std::filesystem::path(persist).is_absolute() ? std::filesystem::path(persist) : base_dir / persist;
    } catch (const json::exception& e) {
        throw InvalidConfig(fmt::format("malformed service config: {}", e.what()));
    }
    c.validate();
    return c;
}

void apply_env_overrides(ServiceConfig& cfg) {
    if (const char* bind = std::getenv("PALM_BIND"); bind && *bind) cfg.bind = bind;
    if (const char* port = std::getenv("PALM_PORT"); port && *port) {
        const auto p = parse_int(port);
        if (!p || *p < 0 || *p > 65535) throw InvalidConfig(fmt::format("PALM_PORT '{}' is not a valid port", port));
        cfg.port = static_cast<int>(*p);
    }
}

std::shared_ptr<const Engine> load_engine(const std::filesystem::path& config_path) {
    auto engine = std::make_shared<Engine>();
    engine->config = load_config(config_path);
    engine->rules = RuleTable::load(engine->config.rules_path);
    try {
        if (engine->config.forest_model.empty()) throw IoError("no forest model configured");
        engine->model = ml::load_model(engine->config.forest_model);
    } catch (const Error& e) {
        engine->model_error = e.what();
    }
    return engine;
}

std::string make_request_id() {
    static thread_local std::random_device rd;
    std::string id;
    for (int i = 0; i < 4; ++i) id += fmt::format("{:08x}", static_cast<std::uint32_t>(rd()));
    return id;
}

// ---------------------------------------------------------------------------
// ResultStore
// ---------------------------------------------------------------------------

ResultStore::ResultStore(std::chrono::milliseconds ttl, Clock clock) : ttl_(ttl), clock_(std::move(clock)) {}

bool ResultStore::expired(const StoredResult& r, std::chrono::steady_clock::time_point now) const {
    return now - r.created >= ttl_;
}

namespace {

bool is_token(const std::string& s) {
    return s.size() == 32 && s.find_first_not_of("0123456789abcdef") == std::string::npos;
}

}  // namespace

std::size_t ResultStore::persist_to(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IoError(fmt::format("cannot create result directory {}", dir.string()));
    const auto now = clock_();
    std::size_t loaded = 0;
    std::lock_guard lock(mu_);
    dir_ = dir;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto& path = entry.path();
        const auto id = path.stem().string();
        if (path.extension() != ".json" || !is_token(id)) continue;
        const auto age = std::chrono::duration_cast<std::chrono::milliseconds>(fs::file_time_type::clock::now() - fs::last_write_time(path));
        const auto png = dir / (id + ".png");
        if (age >= ttl_ || !fs::is_regular_file(png)) {
            remove_files(id);
            continue;
        }
        try {
            StoredResult r{id, json::parse(read_text_file(path.string())), read_file_bytes(png), now - age};
            if (items_.emplace(id, std::move(r)).second) ++loaded;
        } catch (const std::exception& e) {
            fmt::print(stderr, "palm: skipping stored result {}: {}\n", id, e.what());
        }
    }
    return loaded;
}

void ResultStore::remove_files(const std::string& id) const {
    std::error_code ec;
    std::filesystem::remove(dir_ / (id + ".json"), ec);
    std::filesystem::remove(dir_ / (id + ".png"), ec);
}

bool ResultStore::put(StoredResult r) {
    r.created = clock_();
    std::lock_guard lock(mu_);
    if (items_.count(r.id)) return false;
    if (!dir_.empty()) {
        try {
            const auto text = r.summary.dump();
            write_file_bytes(dir_ / (r.id + ".png"), r.annotated_png);
            write_file_bytes(dir_ / (r.id + ".json"), std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
        } catch (const Error& e) {
            fmt::print(stderr, "palm: result {} kept in memory only: {}\n", r.id, e.what());
        }
    }
    auto id = r.id;
    return items_.emplace(std::move(id), std::move(r)).second;
}

std::optional<StoredResult> ResultStore::get(const std::string& id) const {
    const auto now = clock_();
    std::lock_guard lock(mu_);
    const auto it = items_.find(id);
    if (it == items_.end() || expired(it->second, now)) return std::nullopt;
    return it->second;
}

std::size_t ResultStore::sweep() {
    const auto now = clock_();
    std::lock_guard lock(mu_);
    return std::erase_if(items_, [&](const auto& kv) {
        if (!expired(kv.second, now)) return false;
        if (!dir_.empty()) remove_files(kv.first);
        return true;
    });
}

std::size_t ResultStore::size() const {
    std::lock_guard lock(mu_);
    return items_.size();
}

// ---------------------------------------------------------------------------
// Service
// ---------------------------------------------------------------------------

Service::Service(ServiceConfig cfg, std::shared_ptr<const Engine> engine)
    : cfg_(std::move(cfg)), engine_(std::move(engine)), store_(cfg_.result_ttl), server_(std::make_unique<httplib::Server>()) {
    cfg_.validate();
    if (!cfg_.persist_dir.empty()) store_.persist_to(cfg_.persist_dir);
    install_routes();
}

Service::~Service() { stop(); }

void Service::install_routes() {
    auto& svr = *server_;
    const int threads = cfg_.threads;
    svr.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
    svr.set_payload_max_length(cfg_.max_upload_bytes);

    svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        const std::string detail = res.status == 413 ? "upload exceeds the size limit" : httplib::status_message(res.status);
        send_error(res, res.status, error_token(res.status), detail);
        return httplib::Server::HandlerResponse::Handled;
    });

    svr.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
        const auto id = make_request_id().substr(0, 12);
        std::string what = "unknown exception";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        fmt::print(stderr, "error {} on {} {}: {}\n", id, req.method, req.path, what);
        send_error(res, 500, "internal", fmt::format("internal error, reference {}", id));
    });

    svr.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        json body = {{"status", engine_->model_loaded() ? "ok" : "degraded"},
                     {"model_loaded", engine_->model_loaded()},
                     {"version", kVersion}};
        if (engine_->model_loaded()) {
            body["model"] = ml::model_name(*engine_->model);
            send_json(res, 200, body);
        } else {
            body["error"] = "model_unavailable";
            body["detail"] = engine_->model_error;
            send_json(res, 503, body);
        }
    });

    svr.Post("/api/analyze", [this](const httplib::Request& req, httplib::Response& res) {
        if (!engine_->model_loaded()) return send_error(res, 503, "model_unavailable", engine_->model_error);
        if (!req.is_multipart_form_data()) return send_error(res, 400, "bad_request", "expected multipart/form-data with fields 'image' and 'category'");
        if (!req.has_file("image")) return send_error(res, 400, "missing_field", "image");
        if (!req.has_file("category")) return send_error(res, 400, "missing_field", "category");
        const auto image = req.get_file_value("image");
        const auto token = std::string(trim(req.get_file_value("category").content));
        const auto category = parse_category(token);
        if (!category) return send_error(res, 400, "invalid_field", "category");
        if (image.content.size() > cfg_.max_upload_bytes) return send_error(res, 413, "payload_too_large", "image");

        const auto bytes = std::span(reinterpret_cast<const std::uint8_t*>(image.content.data()), image.content.size());
        AnalysisResult result;
        try {
            result = analyze(bytes, *category, *engine_->model, engine_->rules, engine_->config, make_request_id());
        } catch (const BadImage& e) {
            return send_error(res, 422, "unprocessable_image", e.what());
        }
        StoredResult stored;
        stored.id = result.request_id;
        stored.summary = summary_json(result);
        stored.annotated_png = encode_png(result.annotated);
        const auto body = stored.summary;
        if (!store_.put(std::move(stored))) throw std::runtime_error("request id collision");
        send_json(res, 200, body);
    });

    svr.Get(R"(/api/result/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const auto r = store_.get(req.matches[1]);
        if (!r) return send_error(res, 404, "not_found", "unknown or expired result id");
        send_json(res, 200, r->summary);
    });

    svr.Get(R"(/api/annotated/([A-Za-z0-9_-]+)\.png)", [this](const httplib::Request& req, httplib::Response& res) {
        const auto r = store_.get(req.matches[1]);
        if (!r) return send_error(res, 404, "not_found", "unknown or expired result id");
        res.set_content(std::string(r->annotated_png.begin(), r->annotated_png.end()), "image/png");
    });

    if (!cfg_.static_dir.empty()) {
        const auto index = cfg_.static_dir / "index.html";
        svr.Get("/", [index](const httplib::Request&, httplib::Response& res) {
            if (!std::filesystem::is_regular_file(index)) return send_error(res, 404, "not_found", "no web UI installed");
            res.set_content(read_text_file(index.string()), "text/html; charset=utf-8");
        });
        const auto assets = cfg_.static_dir / "assets";
        if (std::filesystem::is_directory(assets)) svr.set_mount_point("/assets", assets.string());
    }
}

int Service::start() {
    if (running_) return port_;
    if (cfg_.port == 0) {
        port_ = server_->bind_to_any_port(cfg_.bind);
    } else {
        port_ = server_->bind_to_port(cfg_.bind, cfg_.port) ? cfg_.port : -1;
    }
    if (port_ < 0) throw IoError(fmt::format("cannot bind {}:{}", cfg_.bind, cfg_.port));
    running_ = true;
    stopping_ = false;
    listener_ = std::thread([this] { server_->listen_after_bind(); });
    sweeper_ = std::thread([this] { sweeper_loop(); });
    server_->wait_until_ready();
    return port_;
}

void Service::sweeper_loop() {
    std::unique_lock lock(sweep_mu_);
    while (!stopping_) {
        sweep_cv_.wait_for(lock, cfg_.sweep_interval, [this] { return stopping_; });
        if (!stopping_) store_.sweep();
    }
}

void Service::stop() {
    if (!running_.exchange(false)) return;
    server_->stop();
    {
        std::lock_guard lock(sweep_mu_);
        stopping_ = true;
    }
    sweep_cv_.notify_all();
    if (listener_.joinable()) listener_.join();
    if (sweeper_.joinable()) sweeper_.join();
}

}  // namespace palm
