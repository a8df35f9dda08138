#include <gtest/gtest.h>

#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "emoclass/remote.hpp"

using namespace emoclass;
using nlohmann::json;

namespace {

// Local encoder stub. Each vector is [len(text), index, 0, ...].
class StubServer {
 public:
  enum class Mode { ok, error500, short_vector, wrong_count };

  explicit StubServer(Mode mode) : mode_(mode) {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      const auto body = json::parse(req.body);
      const auto texts = body.at("texts").get<std::vector<std::string>>();
      last_max_tokens_ = body.at("max_tokens").get<long long>();
      if (mode_ == Mode::error500) {
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      }
      json vectors = json::array();
      for (std::size_t i = 0; i < texts.size(); ++i) {
        std::vector<double> v(mode_ == Mode::short_vector ? 3 : 4, 0.0);
        v[0] = static_cast<double>(texts[i].size());
        v[1] = static_cast<double>(i);
        vectors.push_back(v);
      }
      if (mode_ == Mode::wrong_count) vectors.erase(vectors.begin());
      res.set_content(json{{"dim", 4}, {"vectors", vectors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  [[nodiscard]] EmbedderConfig config() const {
    EmbedderConfig cfg;
    cfg.backend = Backend::remote;
    cfg.dim = 4;
    cfg.max_tokens = 7;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port_);
    return cfg;
  }

  int requests_ = 0;
  long long last_max_tokens_ = -1;

 private:
  Mode mode_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(Remote, VectorsComeBackInRequestOrder) {
  StubServer stub(StubServer::Mode::ok);
  const auto out = embed_remote({"ab", "abcde"}, stub.config());
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], (Vector{2, 0, 0, 0}));
  EXPECT_EQ(out[1], (Vector{5, 1, 0, 0}));
  EXPECT_EQ(stub.requests_, 1);
  EXPECT_EQ(stub.last_max_tokens_, 7);
}

TEST(Remote, EmptyBatchSendsNothing) {
  StubServer stub(StubServer::Mode::ok);
  EXPECT_TRUE(embed_remote({}, stub.config()).empty());
  EXPECT_EQ(stub.requests_, 0);
}

TEST(Remote, SingleTextEmbedder) {
  StubServer stub(StubServer::Mode::ok);
  const auto embedder = make_remote_embedder(stub.config());
  EXPECT_EQ(embedder.fingerprint, "remote:dim=4:max_tokens=7");
  EXPECT_EQ(embedder.embed("xyz"), (Vector{3, 0, 0, 0}));
}

TEST(Remote, ServerErrorCarriesStatus) {
  StubServer stub(StubServer::Mode::error500);
  try {
    embed_remote({"a"}, stub.config());
    FAIL();
  } catch (const RemoteError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_EQ(e.code(), Errc::remote);
  }
}

TEST(Remote, WrongVectorLengthIsDimMismatch) {
  StubServer stub(StubServer::Mode::short_vector);
  try {
    embed_remote({"a"}, stub.config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dim_mismatch);
  }
}

TEST(Remote, WrongVectorCountIsDimMismatch) {
  StubServer stub(StubServer::Mode::wrong_count);
  try {
    embed_remote({"a", "b"}, stub.config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dim_mismatch);
  }
}

TEST(Remote, UnreachableEndpointIsNetworkError) {
  EmbedderConfig cfg;
  cfg.backend = Backend::remote;
  cfg.endpoint = "http://127.0.0.1:1";
  try {
    embed_remote({"a"}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::network);
  }
}

TEST(Remote, MissingEndpointIsConfigError) {
  EmbedderConfig cfg;
  cfg.backend = Backend::remote;
  try {
    embed_remote({"a"}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config);
  }
}
