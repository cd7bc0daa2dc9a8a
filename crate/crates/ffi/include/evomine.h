#ifndef EVOMINE_H
#define EVOMINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `EVM_STATUS_CONFIG`, `EVM_STATUS_PARSE` and
 * `EVM_STATUS_INTERNAL` match the command-line exit codes.
 */
typedef enum EvmStatus {
  EVM_STATUS_OK = 0,
  EVM_STATUS_CONFIG = 1,
  EVM_STATUS_PARSE = 2,
  EVM_STATUS_INTERNAL = 3,
  EVM_STATUS_NULL_ARGUMENT = 4,
  EVM_STATUS_INVALID_UTF8 = 5,
  EVM_STATUS_OUT_OF_RANGE = 6,
  EVM_STATUS_PANIC = 7,
} EvmStatus;

/**
 * Accumulated `key=value` settings, validated on every set.
 */
typedef struct EvmConfig EvmConfig;

/**
 * A loaded snapshot stream.
 */
typedef struct EvmStream EvmStream;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *evm_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void evm_string_free(char *s);

/**
 * Loads a stream file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum EvmStatus evm_stream_load(const char *path, struct EvmStream **out);

/**
 * Parses stream text held in memory.
 *
 * # Safety
 * `data` must be a NUL-terminated string; `out` must be writable.
 */
enum EvmStatus evm_stream_parse(const char *data, struct EvmStream **out);

/**
 * Number of snapshots, 0 for a null handle.
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
uintptr_t evm_stream_len(const struct EvmStream *stream);

/**
 * # Safety
 * `stream` must be null or a handle not yet freed.
 */
void evm_stream_free(struct EvmStream *stream);

/**
 * A config holding the defaults.
 */
struct EvmConfig *evm_config_new(void);

/**
 * Applies one setting, using the command-line flag names without dashes
 * (`alpha`, `window-size`, `theta-bins`, ...). A setting that makes the
 * config invalid is rejected and leaves it unchanged.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum EvmStatus evm_config_set(struct EvmConfig *config, const char *key, const char *value);

/**
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void evm_config_free(struct EvmConfig *config);

/**
 * Runs the full pipeline and writes the four report files to `out_dir`.
 * A null `out_dir` uses the config's `out` setting.
 *
 * # Safety
 * `stream` and `config` must be live handles; `out_dir` null or a
 * NUL-terminated string.
 */
enum EvmStatus evm_run(const struct EvmStream *stream,
                       const struct EvmConfig *config,
                       const char *out_dir);

/**
 * Canonical form of a DFS code such as `(0,1,A,x,B)(1,2,B,y,C)`.
 *
 * # Safety
 * `code` must be a NUL-terminated string; `out` must be writable. On
 * success `*out` must be released with [`evm_string_free`].
 */
enum EvmStatus evm_canonical_code(const char *code, char **out);

/**
 * Whether the pattern given by `code` occurs in snapshot `index` of `stream`.
 *
 * # Safety
 * `code` must be a NUL-terminated string, `stream` a live handle and
 * `out` writable.
 */
enum EvmStatus evm_is_subgraph(const char *code,
                               const struct EvmStream *stream,
                               uintptr_t index,
                               bool *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EVOMINE_H */
