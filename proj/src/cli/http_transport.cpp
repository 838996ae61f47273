#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "rice/cli.h"

namespace rice::cli {

Transport http_transport(const std::string& base_url) {
    return [base_url](const FetchRequest& req) {
        httplib::Client client(base_url);
        client.set_follow_location(true);
        client.set_connection_timeout(10);
        client.set_read_timeout(60);
        std::string path = req.url.substr(0, base_url.size()) == base_url ? req.url.substr(base_url.size()) : req.url;
        auto res = client.Get(path);
        if (!res) throw FetchError("HTTP request " + req.url + " failed: " + httplib::to_string(res.error()));
        return FetchResponse{res->status, res->body};
    };
}

}  // namespace rice::cli
