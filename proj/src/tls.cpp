#include "routeraudit/tls.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <cerrno>
#include <cstring>
#include <memory>

namespace routeraudit {

namespace {

struct FdCloser {
    int fd = -1;
    ~FdCloser() {
        if (fd >= 0) ::close(fd);
    }
};

struct SslCtxDeleter {
    void operator()(SSL_CTX* ctx) const { SSL_CTX_free(ctx); }
};
struct SslDeleter {
    void operator()(SSL* ssl) const { SSL_free(ssl); }
};
struct X509Deleter {
    void operator()(X509* cert) const { X509_free(cert); }
};

std::string name_to_string(const X509_NAME* name) {
    std::unique_ptr<BIO, decltype(&BIO_free)> bio(BIO_new(BIO_s_mem()), BIO_free);
    X509_NAME_print_ex(bio.get(), name, 0, XN_FLAG_RFC2253 & ~ASN1_STRFLGS_ESC_MSB);
    char* data = nullptr;
    long length = BIO_get_mem_data(bio.get(), &data);
    return std::string(data, static_cast<std::size_t>(length));
}

Clock::time_point to_time_point(const ASN1_TIME* time) {
    struct tm tm {};
    ASN1_TIME_to_tm(time, &tm);
    return Clock::from_time_t(timegm(&tm));
}

// Non-blocking connect bounded by `timeout`; returns errno-style code.
int connect_with_timeout(int fd, const sockaddr* addr, socklen_t len, std::chrono::milliseconds timeout) {
    int flags = fcntl(fd, F_GETFL, 0);
    fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int rc = ::connect(fd, addr, len);
    if (rc != 0 && errno != EINPROGRESS) return errno;
    if (rc != 0) {
        pollfd pfd{fd, POLLOUT, 0};
        rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
        if (rc == 0) return ETIMEDOUT;
        if (rc < 0) return errno;
        int error = 0;
        socklen_t error_len = sizeof(error);
        getsockopt(fd, SOL_SOCKET, SO_ERROR, &error, &error_len);
        if (error != 0) return error;
    }
    fcntl(fd, F_SETFL, flags);
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    return 0;
}

}  // namespace

TlsProbe inspect_tls(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout,
                     Clock::time_point scan_time) {
    TlsProbe out;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* resolved = nullptr;
    if (int rc = getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &resolved); rc != 0) {
        out.detail = std::string("cannot resolve host: ") + gai_strerror(rc);
        return out;
    }
    std::unique_ptr<addrinfo, decltype(&freeaddrinfo)> addresses(resolved, freeaddrinfo);

    FdCloser socket_fd{::socket(AF_INET, SOCK_STREAM, 0)};
    if (socket_fd.fd < 0) {
        out.detail = std::string("socket: ") + std::strerror(errno);
        return out;
    }
    if (int error = connect_with_timeout(socket_fd.fd, addresses->ai_addr, addresses->ai_addrlen, timeout)) {
        if (error == ECONNREFUSED) {
            out.outcome = TlsProbe::Outcome::NoListener;
            out.detail = "connection refused";
        } else {
            out.detail = error == ETIMEDOUT ? "timeout" : std::string("connect: ") + std::strerror(error);
        }
        return out;
    }

    std::unique_ptr<SSL_CTX, SslCtxDeleter> ctx(SSL_CTX_new(TLS_client_method()));
    SSL_CTX_set_verify(ctx.get(), SSL_VERIFY_NONE, nullptr);
    // Router firmware of this era offers old protocol versions.
    SSL_CTX_set_min_proto_version(ctx.get(), TLS1_VERSION);
    SSL_CTX_set_security_level(ctx.get(), 0);
    std::unique_ptr<SSL, SslDeleter> ssl(SSL_new(ctx.get()));
    SSL_set_fd(ssl.get(), socket_fd.fd);
    if (!is_ipv4_literal(host)) SSL_set_tlsext_host_name(ssl.get(), host.c_str());

    ERR_clear_error();
    if (SSL_connect(ssl.get()) != 1) {
        int saved_errno = errno;
        unsigned long err = ERR_peek_error();
        if (err == 0 && (saved_errno == EAGAIN || saved_errno == EWOULDBLOCK)) {
            out.detail = "timeout during handshake";
        } else {
            char buffer[256] = {};
            ERR_error_string_n(err, buffer, sizeof(buffer));
            out.outcome = TlsProbe::Outcome::NoListener;
            out.detail = std::string("no TLS on port: ") + (err ? buffer : "peer closed the connection");
        }
        ERR_clear_error();
        return out;
    }

    std::unique_ptr<X509, X509Deleter> cert(SSL_get1_peer_certificate(ssl.get()));
    SSL_shutdown(ssl.get());
    if (!cert) {
        out.detail = "handshake completed without a certificate";
        return out;
    }

    TlsInfo info;
    info.https_reachable = true;
    info.cert_subject = name_to_string(X509_get_subject_name(cert.get()));
    info.cert_issuer = name_to_string(X509_get_issuer_name(cert.get()));
    info.self_signed = X509_check_issued(cert.get(), cert.get()) == X509_V_OK;
    info.not_after = to_time_point(X509_get0_notAfter(cert.get()));
    info.expired_at_scan = scan_time > info.not_after;
    info.hostname_match = is_ipv4_literal(host)
                              ? X509_check_ip_asc(cert.get(), host.c_str(), 0) == 1
                              : X509_check_host(cert.get(), host.c_str(), host.size(), 0, nullptr) == 1;
    out.outcome = TlsProbe::Outcome::Handshake;
    out.info = std::move(info);
    out.detail = "certificate presented";
    return out;
}

}  // namespace routeraudit
