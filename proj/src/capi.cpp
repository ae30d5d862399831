#include "padmm/padmm.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

#include "padmm/experiment.hpp"

struct padmm_config {
    padmm::ExperimentConfig cfg;
    std::string kind;
};

struct padmm_report {
    padmm::ExperimentResult res;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Runs fn, mapping exceptions to status codes.
template <class Fn>
int guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return PADMM_OK;
    } catch (const padmm::Error& e) {
        return set_error(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(PADMM_BUDGET, "out of memory");
    } catch (const std::exception& e) {
        return set_error(PADMM_UNKNOWN, e.what());
    } catch (...) {
        return set_error(PADMM_UNKNOWN, "unknown failure");
    }
}

}  // namespace

extern "C" {

const char* padmm_version(void) { return "0.1.0"; }

int padmm_schema_version(void) { return padmm::kReportSchemaVersion; }

const char* padmm_status_name(int status) {
    switch (status) {
        case PADMM_OK: return "ok";
        case PADMM_IO: return "io";
        case PADMM_UNKNOWN: return "unknown";
        default:
            if (status >= 1 && status <= 7) return padmm::error_code_name(static_cast<padmm::ErrorCode>(status));
            return "unknown";
    }
}

const char* padmm_last_error(void) { return g_last_error.c_str(); }

int padmm_config_parse(const char* text, padmm_config** out) {
    if (!text || !out) return set_error(PADMM_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto c = std::make_unique<padmm_config>();
        c->cfg = padmm::parse_config(text);
        c->kind = c->cfg.kind;
        *out = c.release();
    });
}

int padmm_config_load(const char* path, padmm_config** out) {
    if (!path || !out) return set_error(PADMM_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in) return set_error(PADMM_IO, std::string("cannot read ") + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const int rc = padmm_config_parse(ss.str().c_str(), out);
    if (rc != PADMM_OK) g_last_error = std::string(path) + ": " + g_last_error;
    return rc;
}

int padmm_config_emit(const padmm_config* cfg, char** out) {
    if (!cfg || !out) return set_error(PADMM_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const std::string s = padmm::emit_config(cfg->cfg);
        char* buf = new char[s.size() + 1];
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
    });
}

const char* padmm_config_kind(const padmm_config* cfg) { return cfg ? cfg->kind.c_str() : ""; }

int padmm_config_set_seed(padmm_config* cfg, uint64_t seed) {
    if (!cfg) return set_error(PADMM_INVALID_ARGUMENT, "null argument");
    cfg->cfg.seed = seed;
    return PADMM_OK;
}

void padmm_config_free(padmm_config* cfg) { delete cfg; }

int padmm_run(const padmm_config* cfg, int threads, padmm_report** out) {
    if (!cfg || !out) return set_error(PADMM_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto r = std::make_unique<padmm_report>();
        r->res = padmm::run_experiment(cfg->cfg, threads);
        *out = r.release();
    });
}

const char* padmm_report_text(const padmm_report* rep) { return rep ? rep->res.text.c_str() : ""; }

const char* padmm_report_jsonl(const padmm_report* rep) { return rep ? rep->res.jsonl.c_str() : ""; }

int padmm_report_internal_failure(const padmm_report* rep) { return rep && rep->res.internal_failure ? 1 : 0; }

void padmm_report_free(padmm_report* rep) { delete rep; }

void padmm_string_free(char* s) { delete[] s; }

int padmm_valuation_of_integer(long p, const char* decimal, char* buf, int buflen) {
    if (!decimal || !buf || buflen <= 0) return set_error(PADMM_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        padmm::Int v;
        padmm::require(v.set_str(decimal, 10) == 0, padmm::ErrorCode::parse,
                       std::string("not an integer: ") + decimal);
        padmm::require(p >= 2, padmm::ErrorCode::invalid_argument, "p must be >= 2");
        std::string text = "inf";
        if (v != 0) {
            padmm::Int rest;
            const padmm::Int pp = p;
            text = std::to_string(mpz_remove(rest.get_mpz_t(), v.get_mpz_t(), pp.get_mpz_t()));
        }
        padmm::require(static_cast<int>(text.size()) < buflen, padmm::ErrorCode::invalid_argument, "buffer too small");
        std::memcpy(buf, text.c_str(), text.size() + 1);
    });
}

}  // extern "C"
