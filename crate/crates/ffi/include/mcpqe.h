#ifndef MCPQE_H
#define MCPQE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum McpqeNoise {
  MCPQE_NOISE_EXACT = 0,
  // `noise_parameter` shots per measured string.
  MCPQE_NOISE_SHOTS = 1,
  // `noise_parameter` is the standard deviation.
  MCPQE_NOISE_GAUSSIAN = 2,
} McpqeNoise;

// Result codes. 2, 3 and 4 match the command-line exit codes.
typedef enum McpqeStatus {
  MCPQE_STATUS_OK = 0,
  MCPQE_STATUS_NULL_POINTER = 1,
  MCPQE_STATUS_INVALID_INPUT = 2,
  MCPQE_STATUS_NUMERICAL = 3,
  MCPQE_STATUS_NOT_CONVERGED = 4,
  MCPQE_STATUS_BUFFER_TOO_SMALL = 5,
  MCPQE_STATUS_PANIC = 6,
} McpqeStatus;

typedef enum McpqeGrouping {
  MCPQE_GROUPING_FIRST_FIT_DECREASING = 0,
  MCPQE_GROUPING_XY_PATTERN = 1,
} McpqeGrouping;

typedef enum McpqeSeries {
  MCPQE_SERIES_SHIFT = 0,
  MCPQE_SERIES_PROJECTED_ENERGY = 1,
  MCPQE_SERIES_POPULATION = 2,
  MCPQE_SERIES_REFERENCE_OVERLAP = 3,
} McpqeSeries;

// The trajectory and estimates of a finished run.
typedef struct McpqeRun McpqeRun;

// A molecular Hamiltonian with its reference determinant.
typedef struct McpqeSystem McpqeSystem;

// Propagation settings. Start from [`mcpqe_run_options_default`].
typedef struct McpqeRunOptions {
  double delta_beta;
  uint64_t n_steps;
  double n0;
  double zeta;
  uint64_t shift_interval;
  enum McpqeNoise noise;
  double noise_parameter;
  // Groups drawn per step; 0 uses the whole Hamiltonian.
  uint64_t n_hamil;
  bool rounding;
  double discard_fraction;
  uint64_t seed;
} McpqeRunOptions;

// Reblocked estimates of one run. Energies are relative to
// `reference_energy` except `folded_energy`.
typedef struct McpqeRunSummary {
  double shift_mean;
  double shift_error;
  double energy_mean;
  double energy_error;
  double final_shift;
  double final_energy;
  double reference_energy;
  // Absolute energy recovered from a folded-spectrum run, NaN otherwise.
  double folded_energy;
  uint64_t steps;
  uint64_t divergent_steps;
  uint64_t shots;
} McpqeRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mcpqe_version(void);

// Message for the last failure on this thread, or NULL after a success.
// The pointer stays valid until the next call into the library on this
// thread.
const char *mcpqe_last_error_message(void);

struct McpqeRunOptions mcpqe_run_options_default(void);

// Loads an FCIDUMP file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum McpqeStatus mcpqe_system_from_fcidump(const char *path,
                                           uint32_t frozen_core,
                                           enum McpqeGrouping grouping_kind,
                                           struct McpqeSystem **out);

// Builds a linear hydrogen chain in the minimal basis.
//
// # Safety
// `out` must be a valid pointer.
enum McpqeStatus mcpqe_system_from_chain(uint32_t n_atoms,
                                         double spacing_angstrom,
                                         int32_t charge,
                                         enum McpqeGrouping grouping_kind,
                                         struct McpqeSystem **out);

// # Safety
// `system` must come from this library or be NULL; it is invalid afterwards.
void mcpqe_system_free(struct McpqeSystem *system);

// Qubit count, commuting-group count and reference energy.
//
// # Safety
// `system` must be a live handle; output pointers may be NULL.
enum McpqeStatus mcpqe_system_info(const struct McpqeSystem *system,
                                   uint32_t *n_qubits,
                                   uint32_t *n_groups,
                                   double *reference_energy);

// Replaces the reference determinant (bit `q` = spin-orbital `q`). The
// new determinant must have the same number of electrons of each spin.
//
// # Safety
// `system` must be a live handle.
enum McpqeStatus mcpqe_system_set_reference(struct McpqeSystem *system, uint64_t reference);

// Exact eigenvalues of the reference sector, ascending. `*count` receives
// the number available; at most `capacity` are written.
//
// # Safety
// `values` must hold `capacity` doubles (may be NULL when `capacity` is 0).
enum McpqeStatus mcpqe_fci_energies(const struct McpqeSystem *system,
                                    double *values,
                                    size_t capacity,
                                    size_t *count);

// Ground-state propagation.
//
// # Safety
// `system`, `options` and `out` must be valid; `summary` may be NULL.
enum McpqeStatus mcpqe_run_ground(const struct McpqeSystem *system,
                                  const struct McpqeRunOptions *options,
                                  struct McpqeRun **out,
                                  struct McpqeRunSummary *summary);

// Folded-spectrum propagation around `omega` (absolute energy).
//
// # Safety
// As for [`mcpqe_run_ground`].
enum McpqeStatus mcpqe_run_folded(const struct McpqeSystem *system,
                                  double omega,
                                  const struct McpqeRunOptions *options,
                                  struct McpqeRun **out,
                                  struct McpqeRunSummary *summary);

// # Safety
// `run` must be a live handle and `summary` valid.
enum McpqeStatus mcpqe_run_summary(const struct McpqeRun *run, struct McpqeRunSummary *summary);

// Copies one per-step series. `*count` receives the step count; fails
// with `BufferTooSmall` (after writing `capacity` values) when it does
// not fit.
//
// # Safety
// `values` must hold `capacity` doubles.
enum McpqeStatus mcpqe_run_series(const struct McpqeRun *run,
                                  enum McpqeSeries which,
                                  double *values,
                                  size_t capacity,
                                  size_t *count);

// # Safety
// `run` must come from this library or be NULL; it is invalid afterwards.
void mcpqe_run_free(struct McpqeRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCPQE_H */
