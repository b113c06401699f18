#pragma once

#include "routeraudit/http.h"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace routeraudit {

struct TlsProbe {
    enum class Outcome {
        Handshake,   // a certificate was presented
        NoListener,  // connection refused, or the port does not speak TLS
        Error,       // timeout or other failure that says nothing about TLS support
    };
    Outcome outcome = Outcome::Error;
    std::optional<TlsInfo> info;
    std::string detail;
};

// Connects to host:port, completes a handshake without verifying the peer and
// reads the leaf certificate. `scan_time` decides expired_at_scan.
TlsProbe inspect_tls(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout,
                     Clock::time_point scan_time = Clock::now());

}  // namespace routeraudit
