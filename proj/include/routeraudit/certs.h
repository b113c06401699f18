#pragma once

#include "routeraudit/http.h"

#include <openssl/evp.h>
#include <openssl/x509.h>

#include <memory>
#include <string>
#include <vector>

namespace routeraudit::certs {

struct PkeyDeleter {
    void operator()(EVP_PKEY* key) const { EVP_PKEY_free(key); }
};
struct CertDeleter {
    void operator()(X509* cert) const { X509_free(cert); }
};

struct KeyPair {
    std::unique_ptr<EVP_PKEY, PkeyDeleter> key;
    std::unique_ptr<X509, CertDeleter> cert;
};

struct CertRequest {
    std::string common_name;
    std::string organization;
    std::vector<std::string> ip_sans;
    std::vector<std::string> dns_sans;
    Clock::time_point not_before;
    Clock::time_point not_after;
};

// P-256 key and certificate signed by its own key.
KeyPair make_self_signed(const CertRequest& request);

// Leaf signed by a freshly generated issuer named `issuer_cn`.
KeyPair make_issued(const CertRequest& request, const std::string& issuer_cn);

}  // namespace routeraudit::certs
