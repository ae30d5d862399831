#ifndef PADMM_H
#define PADMM_H

#include <stdint.h>

#if defined(_WIN32)
#define PADMM_API __declspec(dllexport)
#else
#define PADMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values 1..7 mirror the library's error categories. */
typedef enum padmm_status {
    PADMM_OK = 0,
    PADMM_INVALID_ARGUMENT = 1,
    PADMM_PRECONDITION = 2,
    PADMM_DOMAIN = 3,
    PADMM_BUDGET = 4,
    PADMM_PARSE = 5,
    PADMM_PRECISION = 6,
    PADMM_INTERNAL_ASSERTION = 7,
    PADMM_IO = 8,
    PADMM_UNKNOWN = 9
} padmm_status;

typedef struct padmm_config padmm_config;
typedef struct padmm_report padmm_report;

PADMM_API const char* padmm_version(void);
PADMM_API int padmm_schema_version(void);
PADMM_API const char* padmm_status_name(int status);

/* Message for the last failing call on this thread ("" if none). */
PADMM_API const char* padmm_last_error(void);

PADMM_API int padmm_config_parse(const char* text, padmm_config** out);
PADMM_API int padmm_config_load(const char* path, padmm_config** out);
/* Canonical text; release with padmm_string_free. */
PADMM_API int padmm_config_emit(const padmm_config* cfg, char** out);
/* Borrowed; valid while cfg lives. */
PADMM_API const char* padmm_config_kind(const padmm_config* cfg);
PADMM_API int padmm_config_set_seed(padmm_config* cfg, uint64_t seed);
PADMM_API void padmm_config_free(padmm_config* cfg);

/* Runs the experiment. A report is produced even when an instance fails a
 * certified statement; check padmm_report_internal_failure. */
PADMM_API int padmm_run(const padmm_config* cfg, int threads, padmm_report** out);
PADMM_API const char* padmm_report_text(const padmm_report* rep);
PADMM_API const char* padmm_report_jsonl(const padmm_report* rep);
PADMM_API int padmm_report_internal_failure(const padmm_report* rep);
PADMM_API void padmm_report_free(padmm_report* rep);

PADMM_API void padmm_string_free(char* s);

/* Exact-rational valuation of an integer at p, "inf" for 0, written into buf. */
PADMM_API int padmm_valuation_of_integer(long p, const char* decimal, char* buf, int buflen);

#ifdef __cplusplus
}
#endif

#endif
