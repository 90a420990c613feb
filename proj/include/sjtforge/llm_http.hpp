#pragma once

// HTTP transport for OpenAI-compatible chat-completion endpoints.
// Kept out of llm_gateway.hpp so the test suite links without sockets.

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "llm_gateway.hpp"

namespace sjtforge {

inline constexpr const char* api_key_env = "SJT_FORGE_API_KEY";

/// POSTs {model, temperature, messages:[{role:"user",content:prompt}]} to
/// <endpoint>/v1/chat/completions and extracts choices[0].message.content.
inline Transport http_transport(std::string endpoint_url) {
  return [endpoint_url](const std::string& prompt,
                        const GenParams& params) -> std::pair<int, std::string> {
    const char* key = std::getenv(api_key_env);
    if (!key || !*key)
      throw AuthError(std::string("credential missing: set ") + api_key_env);

    httplib::Client client(endpoint_url);
    client.set_read_timeout(params.request_timeout.count() / 1000,
                            (params.request_timeout.count() % 1000) * 1000);

    nlohmann::json body = {
        {"model", params.model_id},
        {"temperature", params.temperature},
        {"messages",
         {{{"role", "user"}, {"content", prompt}}}},
    };
    httplib::Headers headers = {
        {"Authorization", std::string("Bearer ") + key}};
    auto res = client.Post("/v1/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res) throw GatewayError("transport failure: " +
                                 httplib::to_string(res.error()));
    if (res->status != 200) return {res->status, res->body};

    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) return {502, ""};
    try {
      return {200, j.at("choices").at(0).at("message").at("content")
                       .get<std::string>()};
    } catch (const nlohmann::json::exception&) {
      return {502, ""};
    }
  };
}

}  // namespace sjtforge
