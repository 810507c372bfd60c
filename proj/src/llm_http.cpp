// cpp-httplib is heavy to compile; it lives in this one translation unit.
#if defined(AIRKIT_HTTP_TLS)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "airkit/llm.hpp"

namespace airkit {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw InvalidParameter("endpoint_url needs a scheme: " + url);
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpTransport default_http_transport() {
    return [](const HttpRequest& request) {
        const SplitUrl url = split_url(request.url);
        httplib::Client client(url.origin);
        const auto timeout = std::chrono::milliseconds(request.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        const httplib::Headers headers{{"Authorization", "Bearer " + request.bearer_token}};
        HttpResponse out;
        const auto res = client.Post(url.path, headers, request.body, "application/json");
        if (!res) {
            out.transport_error = true;
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        out.body = res->body;
        return out;
    };
}

}  // namespace airkit
