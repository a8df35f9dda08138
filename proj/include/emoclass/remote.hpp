#pragma once

// Client for an external encoder service.
//
//   POST <endpoint>/embed   {"texts": [...], "max_tokens": N}
//   200                     {"dim": D, "vectors": [[...], ...]}
//
// Vectors come back in request order. Kept out of embeddings.hpp so that only
// code that talks to the network pulls in the HTTP client.

#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "emoclass/embeddings.hpp"
#include "emoclass/error.hpp"

namespace emoclass {

inline std::vector<Vector> embed_remote(const std::vector<std::string>& texts, const EmbedderConfig& config) {
  if (config.backend != Backend::remote) throw Error(Errc::config, "embed_remote needs the remote backend");
  config.validate();
  if (texts.empty()) return {};

  httplib::Client client(config.endpoint);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(120, 0);

  const nlohmann::json request = {{"texts", texts}, {"max_tokens", config.max_tokens}};
  const auto result = client.Post("/embed", request.dump(), "application/json");
  if (!result) {
    throw Error(Errc::network, "POST " + config.endpoint + "/embed failed: " + httplib::to_string(result.error()));
  }
  if (result->status != 200) throw RemoteError(result->status, result->body);

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw RemoteError(result->status, std::string("response is not JSON: ") + e.what());
  }
  if (!body.is_object() || !body.contains("vectors") || !body["vectors"].is_array()) {
    throw Error(Errc::dim_mismatch, "response lacks a 'vectors' array");
  }
  if (body.contains("dim") && (!body["dim"].is_number_integer() || body["dim"].get<long long>() !=
                                                                        static_cast<long long>(config.dim))) {
    throw Error(Errc::dim_mismatch, "server dim " + body["dim"].dump() + ", expected " + std::to_string(config.dim));
  }
  const auto& vectors = body["vectors"];
  if (vectors.size() != texts.size()) {
    throw Error(Errc::dim_mismatch, "sent " + std::to_string(texts.size()) + " texts, received " +
                                        std::to_string(vectors.size()) + " vectors");
  }

  std::vector<Vector> out;
  out.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    if (!v.is_array() || v.size() != config.dim) {
      throw Error(Errc::dim_mismatch, "vector " + std::to_string(i) + " has " + std::to_string(v.size()) +
                                          " entries, expected " + std::to_string(config.dim));
    }
    Vector values;
    values.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) throw Error(Errc::dim_mismatch, "vector " + std::to_string(i) + " has a non-number");
      values.push_back(x.get<double>());
    }
    if (!all_finite(values)) throw Error(Errc::dim_mismatch, "vector " + std::to_string(i) + " is not finite");
    out.push_back(std::move(values));
  }
  return out;
}

inline TextEmbedder make_remote_embedder(EmbedderConfig config) {
  config.backend = Backend::remote;
  config.validate();
  return {config.fingerprint(), config.dim,
          [config](const std::string& text) { return embed_remote({text}, config).front(); }};
}

}  // namespace emoclass
