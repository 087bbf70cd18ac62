/* C API for the recommendation-bias audit library (libaudit).
 *
 * All functions return an audit_status: AUDIT_OK on success,
 * AUDIT_EVALIDATION for input/config errors, AUDIT_ERUNTIME for runtime
 * failures. On failure audit_last_error() returns a thread-local message.
 * Strings returned through out-parameters are heap-allocated and must be
 * released with audit_string_free().
 */
#ifndef AUDIT_H
#define AUDIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int audit_status;
#define AUDIT_OK 0
#define AUDIT_EVALIDATION 1
#define AUDIT_ERUNTIME 2

typedef struct audit_catalog audit_catalog;
typedef struct audit_config audit_config;

const char* audit_last_error(void);
void audit_string_free(char* s);

/* catalog */
audit_status audit_catalog_load(const char* path, const char* domain, audit_catalog** out);
void audit_catalog_free(audit_catalog* catalog);
size_t audit_catalog_size(const audit_catalog* catalog);
/* pointer valid for the catalog's lifetime */
const char* audit_catalog_hash(const audit_catalog* catalog);

/* parser: JSON result {"item_ids":[...],"degraded":bool,"diagnostics":{...}} */
audit_status audit_parse_text(const audit_catalog* catalog, const char* text, int k,
                              double fuzzy_threshold, char** ranked_json_out);

/* attribute registry as a JSON array; category NULL = all */
audit_status audit_attributes_json(const char* category, char** json_out);

/* experiment config */
audit_status audit_config_load(const char* path, audit_config** out);
void audit_config_free(audit_config* config);
const char* audit_config_digest(const audit_config* config);

/* executes the run and writes the artifact; *artifact_dir_out receives the
 * artifact directory path */
audit_status audit_run(const audit_config* config, char** artifact_dir_out);

/* writes tables, plots and summary under {artifact_dir}/report */
audit_status audit_report(const char* artifact_dir);

#ifdef __cplusplus
}
#endif

#endif /* AUDIT_H */
