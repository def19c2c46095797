#ifndef STHS_H
#define STHS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SthsStatus {
  STHS_STATUS_OK = 0,
  STHS_STATUS_NULL_POINTER = 1,
  STHS_STATUS_INVALID_ARGUMENT = 2,
  STHS_STATUS_COMPUTATION = 3,
  STHS_STATUS_PARSE = 4,
  STHS_STATUS_PANIC = 5,
} SthsStatus;

/**
 * Opaque switching schedule.
 */
typedef struct SthsSchedule SthsSchedule;

/**
 * Circuit parameters in SI units. An ideal open switch uses an infinite
 * `switch_resistance`.
 */
typedef struct SthsCircuitParams {
  double supply_voltage;
  double bias_current;
  double peak_voltage;
  double load_resistance;
  double switch_resistance;
  double switch_capacitance;
  double pulse_freq;
} SthsCircuitParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on this thread.
 */
const char *sths_last_error(void);

/**
 * Designs a schedule. `paths` is 4 or 8, `steer_deg` is the steering angle
 * in degrees and `alpha` the duty cycle ratio in (0, 1].
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum SthsStatus sths_design(size_t n_elements,
                            double spacing_wavelengths,
                            double carrier_freq,
                            double pulse_freq,
                            uint32_t paths,
                            double steer_deg,
                            double alpha,
                            struct SthsSchedule **out);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void sths_schedule_free(struct SthsSchedule *s);

/**
 * Parses and validates a schedule JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for a write.
 */
enum SthsStatus sths_schedule_from_json(const char *json, struct SthsSchedule **out);

/**
 * Serializes a schedule; free the result with [`sths_string_free`].
 *
 * # Safety
 * `s` must be a live handle and `out` valid for a write.
 */
enum SthsStatus sths_schedule_to_json(const struct SthsSchedule *s, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void sths_string_free(char *s);

/**
 * Array factor of harmonic `m` at `theta_deg`.
 *
 * # Safety
 * `s` must be a live handle; `re` and `im` valid for writes.
 */
enum SthsStatus sths_array_factor(const struct SthsSchedule *s,
                                  int32_t m,
                                  double theta_deg,
                                  double *re,
                                  double *im);

/**
 * # Safety
 * `s` must be a live handle and `out` valid for a write.
 */
enum SthsStatus sths_harmonic_power(const struct SthsSchedule *s, int32_t m, double *out);

/**
 * # Safety
 * `s` must be a live handle and `out` valid for a write.
 */
enum SthsStatus sths_total_power(const struct SthsSchedule *s, double *out);

/**
 * # Safety
 * `s` must be a live handle and `out` valid for a write.
 */
enum SthsStatus sths_harmonic_efficiency(const struct SthsSchedule *s, double *out);

/**
 * Circuit drain efficiency at `duty` in (0, 2/3].
 *
 * # Safety
 * `params` must point to a valid struct and `out` be valid for a write.
 */
enum SthsStatus sths_circuit_efficiency(const struct SthsCircuitParams *params,
                                        double duty,
                                        double *out);

/**
 * First-harmonic amplitude relative to the peak mode.
 */
double sths_amplitude_of_alpha(double alpha);

/**
 * Duty cycle ratio whose ideal amplitude equals `target` in (0, 1].
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum SthsStatus sths_predistort_alpha(double target, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STHS_H */
