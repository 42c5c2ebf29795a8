#include "intercept/service.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "intercept/error.hpp"
#include "intercept/random.hpp"

namespace intercept::experiment {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::FileNotFound, path.string() + ": cannot open");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string random_secret() {
    std::random_device rd;
    std::string out;
    static constexpr char kHex[] = "0123456789abcdef";
    for (int i = 0; i < 32; ++i) {
        const auto byte = rd() & 0xFFu;
        out += kHex[byte >> 4];
        out += kHex[byte & 0xF];
    }
    return out;
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound:
        case ErrorCode::FileNotFound: return 404;
        case ErrorCode::Conflict: return 409;
        case ErrorCode::Sequencing: return 422;
        case ErrorCode::InvalidArgument: return 400;
        default: return 500;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_header("Cache-Control", "no-store");
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, status, json{{"error", code}, {"message", message}});
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const std::string& text, const std::filesystem::path& base_dir) {
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    try {
        const json j = json::parse(text);
        ServiceConfig c;
        c.manifest = resolve(j.at("manifest").get<std::string>());
        c.log_path = resolve(j.at("log_path").get<std::string>());
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        if (c.port < 0 || c.port > 65535) {
            fail(ErrorCode::Configuration, "config: port out of range");
        }
        if (j.contains("static_dir") && !j.at("static_dir").is_null()) {
            c.static_dir = resolve(j.at("static_dir").get<std::string>());
        }
        if (j.contains("seed_strategy")) {
            const auto& s = j.at("seed_strategy");
            const std::string mode = s.value("mode", std::string("derived"));
            if (mode == "derived") {
                c.seed_strategy.mode = SeedStrategy::Mode::Derived;
                c.seed_strategy.base_seed = s.value("base_seed", std::uint64_t{0});
            } else if (mode == "entropy") {
                c.seed_strategy.mode = SeedStrategy::Mode::Entropy;
            } else {
                fail(ErrorCode::Configuration, "config: unknown seed_strategy mode '" + mode + "'");
            }
        }
        if (j.contains("media_secret") && !j.at("media_secret").is_null()) {
            c.media_secret = j.at("media_secret").get<std::string>();
        }
        if (j.contains("questionnaire_url") && !j.at("questionnaire_url").is_null()) {
            c.questionnaire_url = j.at("questionnaire_url").get<std::string>();
        }
        return c;
    } catch (const json::exception& e) {
        fail(ErrorCode::Configuration, std::string("config: ") + e.what());
    }
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::FileNotFound, path.string() + ": cannot open config");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str(), path.parent_path());
}

struct ExperimentServer::Impl {
    ServiceConfig config;
    std::unique_ptr<ExperimentStore> store;
    httplib::Server http;
    std::atomic<std::uint64_t> sessions_created{0};

    std::uint64_t choose_seed(const json& body) {
        if (body.contains("seed") && !body.at("seed").is_null()) {
            return body.at("seed").get<std::uint64_t>();
        }
        if (config.seed_strategy.mode == SeedStrategy::Mode::Entropy) {
            std::random_device rd;
            return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }
        return derive_seed(config.seed_strategy.base_seed, sessions_created.fetch_add(1));
    }

    template <typename Handler>
    auto guarded(Handler handler) {
        return [handler](const httplib::Request& req, httplib::Response& res) {
            try {
                handler(req, res);
            } catch (const Error& e) {
                send_error(res, http_status(e.code()), to_string(e.code()), e.what());
            } catch (const json::exception& e) {
                send_error(res, 400, "invalid_argument", std::string("bad request body: ") + e.what());
            }
        };
    }

    void routes() {
        http.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json body = json::parse(req.body);
            const auto participant = body.at("participant_id").get<std::string>();
            const Session s = store->create_session(participant, choose_seed(body));
            json out{{"session_id", s.session_id},
                     {"participant_id", s.participant_id},
                     {"total_questions", s.trial_order.size()}};
            if (config.questionnaire_url) {
                out["questionnaire_url"] = *config.questionnaire_url;
            }
            send_json(res, 201, out);
        }));

        http.Get(R"(/api/sessions/([^/]+)/trial)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const std::string id = req.matches[1];
                     const auto view = store->next_trial(id);
                     if (!view) {
                         json out{{"done", true}, {"total_questions", store->session(id).trial_order.size()}};
                         if (config.questionnaire_url) {
                             out["questionnaire_url"] = *config.questionnaire_url;
                         }
                         send_json(res, 200, out);
                         return;
                     }
                     send_json(res, 200,
                               json{{"done", false},
                                    {"question_index", view->question_index},
                                    {"total_questions", view->total_questions},
                                    {"reference_url", view->reference_url},
                                    {"a_url", view->a_url},
                                    {"b_url", view->b_url}});
                 }));

        http.Post(R"(/api/sessions/([^/]+)/responses)",
                  guarded([this](const httplib::Request& req, httplib::Response& res) {
                      const std::string id = req.matches[1];
                      const json body = json::parse(req.body);
                      const auto index = body.at("question_index").get<std::uint32_t>();
                      const auto choice = parse_choice(body.at("response").get<std::string>());
                      if (!choice) {
                          fail(ErrorCode::InvalidArgument, "response must be \"A\" or \"B\"");
                      }
                      PlayCounts plays;
                      if (body.contains("play_counts") && body.at("play_counts").is_object()) {
                          plays = body.at("play_counts").get<PlayCounts>();
                      }
                      const TrialRecord r = store->record_response(id, index, *choice, plays);
                      const Session s = store->session(id);
                      send_json(res, 201,
                                json{{"recorded", true}, {"question_index", r.question_index}, {"done", s.done()}});
                  }));

        http.Get(R"(/api/sessions/([^/]+)/summary)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                     const Session s = store->session(req.matches[1]);
                     send_json(res, 200,
                               json{{"session_id", s.session_id},
                                    {"participant_id", s.participant_id},
                                    {"answered", s.cursor},
                                    {"total_questions", s.trial_order.size()},
                                    {"done", s.done()},
                                    {"created_utc", s.created_utc}});
                 }));

        http.Get(R"(/media/([0-9a-f]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto path = store->resolve_media(req.matches[1]);
            if (!path) {
                send_error(res, 404, "not_found", "unknown media token");
                return;
            }
            res.set_header("Cache-Control", "no-store");
            res.set_header("Accept-Ranges", "bytes");
            res.set_content(read_file(*path), "audio/wav");
        }));

        http.Get("/api/export", guarded([this](const httplib::Request&, httplib::Response& res) {
            std::ostringstream csv;
            write_responses_csv(csv, store->records());
            res.set_content(csv.str(), "text/csv");
        }));

        if (config.static_dir) {
            http.set_mount_point("/", config.static_dir->string());
        }
    }
};

ExperimentServer::ExperimentServer(const ServiceConfig& config) : impl_(std::make_unique<Impl>()) {
    impl_->config = config;
    const audio::StimulusManifest manifest = audio::load_manifest(config.manifest);
    StimulusSet stimuli = StimulusSet::from_manifest(manifest, config.manifest.parent_path());
    if (stimuli.size() == 0) {
        fail(ErrorCode::Configuration, "stimulus manifest is empty");
    }
    impl_->store = ExperimentStore::open(std::move(stimuli), config.log_path,
                                         config.media_secret.value_or(random_secret()));
    impl_->sessions_created = impl_->store->session_count();
    impl_->routes();
}

ExperimentServer::~ExperimentServer() { stop(); }

int ExperimentServer::bind() {
    const int port = impl_->config.port == 0
                         ? impl_->http.bind_to_any_port(impl_->config.host)
                         : (impl_->http.bind_to_port(impl_->config.host, impl_->config.port)
                                ? impl_->config.port
                                : -1);
    if (port <= 0) {
        fail(ErrorCode::IoFailure, "cannot bind " + impl_->config.host + ":" +
                                       std::to_string(impl_->config.port));
    }
    return port;
}

void ExperimentServer::serve() { impl_->http.listen_after_bind(); }

void ExperimentServer::stop() {
    if (impl_) {
        impl_->http.stop();
    }
}

ExperimentStore& ExperimentServer::store() { return *impl_->store; }

}  // namespace intercept::experiment
