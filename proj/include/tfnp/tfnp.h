/* C interface to the tfnp library. Strings returned through char** are owned by
 * the caller and released with tfnp_string_free. */
#ifndef TFNP_TFNP_H
#define TFNP_TFNP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tfnp_status {
  TFNP_OK = 0,
  TFNP_REJECT = 1,
  TFNP_MALFORMED = 2,
  TFNP_CAP_EXCEEDED = 3,
  TFNP_INTERNAL = 4
} tfnp_status;

typedef enum tfnp_format { TFNP_FORMAT_TEXT = 0, TFNP_FORMAT_JSON = 1 } tfnp_format;

typedef struct tfnp_instance tfnp_instance;

/* Zero / NULL fields take the harness defaults for the reduction or problem.
 * exhaustive: 1 forces enumeration, -1 forces sampling, 0 enumerates when the
 * family is small enough. */
typedef struct tfnp_family {
  const char* problem;
  const char* oracle;
  size_t n;
  size_t t;
  size_t k;
  size_t samples;
  uint64_t seed;
  int exhaustive;
} tfnp_family;

/* Message of the last failing call on this thread, or "". */
const char* tfnp_last_error(void);
void tfnp_string_free(char* s);

/* One JSON instance (or the first line of a JSON-lines document). */
tfnp_status tfnp_instance_parse(const char* json, tfnp_instance** out);
/* Numeric problems (factor, weak_bertrand) from a decimal value. */
tfnp_status tfnp_instance_from_number(const char* problem, const char* decimal, tfnp_instance** out);
void tfnp_instance_free(tfnp_instance* inst);
tfnp_status tfnp_instance_json(const tfnp_instance* inst, char** out);
tfnp_status tfnp_instance_problem(const tfnp_instance* inst, char** out);

/* Text: decimal for numeric problems, a bit string for oracle-free circuit
 * problems, solution JSON otherwise. */
tfnp_status tfnp_solve(const tfnp_instance* inst, tfnp_format format, char** out);

/* `solution` is a bit string, "0x"-prefixed hex, or solution JSON.
 * Returns TFNP_OK on accept, TFNP_REJECT, or TFNP_MALFORMED; `report` names the verdict. */
tfnp_status tfnp_verify(const tfnp_instance* inst, const char* solution, char** report);

/* semantics: "plain", "c-star" or "c-sub-star". x is decimal; w is a comma
 * separated list of decimal witnesses (NULL or "" for none). */
tfnp_status tfnp_eval(const tfnp_instance* inst, size_t circuit, const char* semantics, const char* x, const char* w,
                      char** out);

/* JSON-lines, one instance per line. */
tfnp_status tfnp_generate(const tfnp_family* family, char** out);

/* Forward map: the target instance as JSON, or {"direct": solution} when the
 * reduction solved the source itself. */
tfnp_status tfnp_reduce(const tfnp_instance* inst, const char* reduction, char** out);

/* Forward, target solve, backward and source verification on one instance.
 * Returns TFNP_OK when the mapped solution verifies. */
tfnp_status tfnp_round_trip(const tfnp_instance* inst, const char* reduction, char** report);

/* family may be NULL. Returns TFNP_OK when fail == 0, TFNP_REJECT otherwise.
 * seconds receives the wall time (may be NULL); it is not part of the report. */
tfnp_status tfnp_check_reduction(const char* reduction, const tfnp_family* family, tfnp_format format, char** report,
                                 double* seconds);

tfnp_status tfnp_totality(const char* problem, size_t n, size_t samples, uint64_t seed, tfnp_format format,
                          char** report, double* seconds);

/* Newline separated lists. */
tfnp_status tfnp_list_reductions(char** out);
tfnp_status tfnp_list_problems(char** out);

#ifdef __cplusplus
}
#endif

#endif
