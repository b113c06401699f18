#include "routeraudit/certs.h"

#include "routeraudit/error.h"

#include <openssl/x509v3.h>

#include <atomic>

namespace routeraudit::certs {

namespace {

std::unique_ptr<EVP_PKEY, PkeyDeleter> generate_key() {
    std::unique_ptr<EVP_PKEY, PkeyDeleter> key(EVP_EC_gen("P-256"));
    if (!key) throw Error("EC key generation failed");
    return key;
}

void set_name(X509_NAME* name, const std::string& common_name, const std::string& organization) {
    if (!organization.empty()) {
        X509_NAME_add_entry_by_txt(name, "O", MBSTRING_UTF8, reinterpret_cast<const unsigned char*>(organization.c_str()),
                                   -1, -1, 0);
    }
    X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_UTF8, reinterpret_cast<const unsigned char*>(common_name.c_str()),
                               -1, -1, 0);
}

void add_extension(X509* cert, X509* issuer, int nid, const std::string& value) {
    X509V3_CTX ctx;
    X509V3_set_ctx_nodb(&ctx);
    X509V3_set_ctx(&ctx, issuer, cert, nullptr, nullptr, 0);
    X509_EXTENSION* ext = X509V3_EXT_conf_nid(nullptr, &ctx, nid, value.c_str());
    if (!ext) throw Error("cannot build certificate extension " + value);
    X509_add_ext(cert, ext, -1);
    X509_EXTENSION_free(ext);
}

std::unique_ptr<X509, CertDeleter> build(const CertRequest& request, EVP_PKEY* subject_key,
                                         const std::string& issuer_cn, X509* issuer_cert, EVP_PKEY* signing_key,
                                         bool ca) {
    static std::atomic<long> serial{1};
    std::unique_ptr<X509, CertDeleter> cert(X509_new());
    X509_set_version(cert.get(), 2);
    ASN1_INTEGER_set(X509_get_serialNumber(cert.get()), serial++);
    ASN1_TIME_set(X509_getm_notBefore(cert.get()), Clock::to_time_t(request.not_before));
    ASN1_TIME_set(X509_getm_notAfter(cert.get()), Clock::to_time_t(request.not_after));
    X509_set_pubkey(cert.get(), subject_key);
    set_name(X509_get_subject_name(cert.get()), request.common_name, request.organization);
    if (issuer_cert) {
        X509_set_issuer_name(cert.get(), X509_get_subject_name(issuer_cert));
    } else {
        set_name(X509_get_issuer_name(cert.get()), issuer_cn, request.organization);
    }
    X509* ext_issuer = issuer_cert ? issuer_cert : cert.get();
    add_extension(cert.get(), ext_issuer, NID_basic_constraints, ca ? "critical,CA:TRUE" : "CA:FALSE");
    add_extension(cert.get(), ext_issuer, NID_subject_key_identifier, "hash");
    if (!ca) {
        std::string sans;
        for (const auto& ip : request.ip_sans) sans += (sans.empty() ? "IP:" : ",IP:") + ip;
        for (const auto& dns : request.dns_sans) sans += (sans.empty() ? "DNS:" : ",DNS:") + dns;
        if (!sans.empty()) add_extension(cert.get(), ext_issuer, NID_subject_alt_name, sans);
    }
    if (X509_sign(cert.get(), signing_key, EVP_sha256()) == 0) throw Error("certificate signing failed");
    return cert;
}

}  // namespace

KeyPair make_self_signed(const CertRequest& request) {
    KeyPair pair;
    pair.key = generate_key();
    pair.cert = build(request, pair.key.get(), request.common_name, nullptr, pair.key.get(), false);
    return pair;
}

KeyPair make_issued(const CertRequest& request, const std::string& issuer_cn) {
    auto issuer_key = generate_key();
    CertRequest issuer_request;
    issuer_request.common_name = issuer_cn;
    issuer_request.organization = request.organization;
    issuer_request.not_before = request.not_before;
    issuer_request.not_after = request.not_after;
    auto issuer_cert = build(issuer_request, issuer_key.get(), issuer_cn, nullptr, issuer_key.get(), true);

    KeyPair pair;
    pair.key = generate_key();
    pair.cert = build(request, pair.key.get(), issuer_cn, issuer_cert.get(), issuer_key.get(), false);
    return pair;
}

}  // namespace routeraudit::certs
