/* C interface to the toyfock exact operator-calculus library. */

#ifndef TOYFOCK_H
#define TOYFOCK_H

/* Generated by cbindgen from crates/toyfock-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum ToyfockStatus {
  // Success.
  TOYFOCK_STATUS_OK = 0,
  // A required pointer argument was null.
  TOYFOCK_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  TOYFOCK_STATUS_INVALID_UTF8 = 2,
  // Text input did not match the expected format.
  TOYFOCK_STATUS_PARSE_ERROR = 3,
  // Arguments outside an operation's domain.
  TOYFOCK_STATUS_DOMAIN_ERROR = 4,
  // A verification campaign reported failures.
  TOYFOCK_STATUS_VERIFICATION_FAILED = 5,
  // Unexpected internal failure.
  TOYFOCK_STATUS_INTERNAL_ERROR = 6,
} ToyfockStatus;

// Opaque Walsh series handle.
typedef struct ToyfockChaos ToyfockChaos;

// Opaque dyadic-matrix handle.
typedef struct ToyfockMatrix ToyfockMatrix;

// Opaque signed-word handle.
typedef struct ToyfockWord ToyfockWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Latest error message as a caller-owned string, or null if none.
char *toyfock_last_error(void);

// Release a string returned by this library.
void toyfock_string_free(char *ptr);

// Parse a chaos element from the text format (one `<mask> <num>/<den>` term
// per line).
enum ToyfockStatus toyfock_chaos_parse(const char *text, struct ToyfockChaos **out);

// Render a chaos element in the text format.
enum ToyfockStatus toyfock_chaos_render(const struct ToyfockChaos *handle, char **out);

void toyfock_chaos_free(struct ToyfockChaos *handle);

// Walsh (xor-convolution) product.
enum ToyfockStatus toyfock_chaos_mul(const struct ToyfockChaos *a,
                                     const struct ToyfockChaos *b,
                                     struct ToyfockChaos **out);

enum ToyfockStatus toyfock_chaos_add(const struct ToyfockChaos *a,
                                     const struct ToyfockChaos *b,
                                     struct ToyfockChaos **out);

// Inner product `<a, b>` as a `num/den` string.
enum ToyfockStatus toyfock_chaos_inner(const struct ToyfockChaos *a,
                                       const struct ToyfockChaos *b,
                                       char **out);

// Expectation (coefficient at the empty mask) as a `num/den` string.
enum ToyfockStatus toyfock_chaos_expectation(const struct ToyfockChaos *handle, char **out);

// Apply an operator expression (`N@1`, `D^101`, `cN^d{c=..,d=..}`, composed
// with `.`) to a chaos element.
enum ToyfockStatus toyfock_chaos_apply(const char *expr,
                                       const struct ToyfockChaos *input,
                                       struct ToyfockChaos **out);

// Forward transform: atom values at depth `n`, one rational per line.
enum ToyfockStatus toyfock_chaos_to_atoms(const struct ToyfockChaos *handle,
                                          uint32_t depth,
                                          char **out);

// Inverse transform from atom values (power-of-two many lines).
enum ToyfockStatus toyfock_chaos_from_atoms(const char *text, struct ToyfockChaos **out);

// Parse a signed word from `[s;p]` notation, optional leading `-`.
enum ToyfockStatus toyfock_word_parse(const char *text, struct ToyfockWord **out);

enum ToyfockStatus toyfock_word_render(const struct ToyfockWord *handle, char **out);

void toyfock_word_free(struct ToyfockWord *handle);

// Group product with the sign twist.
enum ToyfockStatus toyfock_word_mul(const struct ToyfockWord *a,
                                    const struct ToyfockWord *b,
                                    struct ToyfockWord **out);

// Signum: the sign of the word's square, `+1` or `-1`.
enum ToyfockStatus toyfock_word_sigma(const struct ToyfockWord *handle, int32_t *out);

// Commutativity function: `+1` if the words commute, `-1` if they
// anticommute.
enum ToyfockStatus toyfock_word_comm(const struct ToyfockWord *a,
                                     const struct ToyfockWord *b,
                                     int32_t *out);

// Action of a word on a chaos element.
enum ToyfockStatus toyfock_word_apply(const struct ToyfockWord *word,
                                      const struct ToyfockChaos *input,
                                      struct ToyfockChaos **out);

// Matrix of a word at the given depth (0 = the word's own depth).
enum ToyfockStatus toyfock_word_matrix(const struct ToyfockWord *word,
                                       uint32_t depth,
                                       struct ToyfockMatrix **out);

// Parse a matrix from tab-separated rows (entries `a`, `a+bi`, `-bi`).
enum ToyfockStatus toyfock_matrix_parse(const char *text, struct ToyfockMatrix **out);

enum ToyfockStatus toyfock_matrix_render(const struct ToyfockMatrix *handle, char **out);

void toyfock_matrix_free(struct ToyfockMatrix *handle);

// Strip principal quadruplings; returns the core and the strip count.
enum ToyfockStatus toyfock_matrix_nq_core(const struct ToyfockMatrix *handle,
                                          struct ToyfockMatrix **out_core,
                                          uint32_t *out_strips);

// Squared distance to the depth-`stratum` stratum, as `num/den`.
enum ToyfockStatus toyfock_matrix_distance(const struct ToyfockMatrix *handle,
                                           uint32_t stratum,
                                           char **out);

// Duality pairing of a projective top matrix with a rigged representative,
// as `num/den`.
enum ToyfockStatus toyfock_matrix_pair(const struct ToyfockMatrix *top,
                                       const struct ToyfockMatrix *core,
                                       char **out);

// Realize a JSON embedding spec `{"signs":[...],"comm":[[...]]}`; the
// output lists one word per line.
enum ToyfockStatus toyfock_embed_json(const char *spec, char **out);

// Run a verification suite; writes the text report and returns
// `VerificationFailed` when the suite found counterexamples.
enum ToyfockStatus toyfock_verify(const char *suite,
                                  uint64_t seed,
                                  uint64_t count,
                                  char **out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOYFOCK_H */
