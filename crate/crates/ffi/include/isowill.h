#ifndef ISOWILL_H
#define ISOWILL_H

/* Generated by cbindgen from the isowill-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum IwStatus {
  IW_STATUS_OK = 0,
  IW_STATUS_NULL_POINTER = 1,
  IW_STATUS_INVALID_ARGUMENT = 2,
  IW_STATUS_VALIDATION = 3,
  IW_STATUS_PARSE = 4,
  IW_STATUS_IO = 5,
  IW_STATUS_DOMAIN = 6,
  IW_STATUS_NO_CONVERGENCE = 7,
  IW_STATUS_PRECISION_LOSS = 8,
  IW_STATUS_PANIC = 9,
} IwStatus;

/**
 * Opaque mesh handle.
 */
typedef struct IwMesh IwMesh;

/**
 * Mirror of the functional report, flattened to C-compatible fields.
 */
typedef struct IwReport {
  double area;
  double volume;
  double willmore;
  double isoperimetric_ratio;
  double willmore_deficit;
  double isoperimetric_deficit;
  double tracefree_energy;
  double gauss_bonnet_residual;
  double tangential_identity_residual;
  int64_t euler_characteristic;
  uint64_t mesh_vertices;
  uint64_t mesh_faces;
} IwReport;

/**
 * Descent parameters; `sigma_target` may be NaN to disable the penalty.
 */
typedef struct IwDescentConfig {
  uint64_t max_steps;
  double initial_step;
  double armijo_c;
  double backtrack_factor;
  double grad_tol;
  double sigma_target;
  double penalty_weight;
  double fd_epsilon;
} IwDescentConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message on this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must point to at least `len` writable bytes, or be null (in which
 * case only the length is returned).
 */
size_t iw_last_error_message(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *iw_status_message(enum IwStatus status);

/**
 * Builds an icosphere of the given subdivision level.
 *
 * # Safety
 * `out` must be a valid pointer to a mesh-handle slot.
 */
enum IwStatus iw_icosphere(uint32_t level, struct IwMesh **out);

/**
 * Builds a spheroid revolution mesh with semi-axes (1, 1, r).
 *
 * # Safety
 * `out` must be a valid pointer to a mesh-handle slot.
 */
enum IwStatus iw_spheroid_mesh(double r, uint32_t nu, uint32_t nv, struct IwMesh **out);

/**
 * Builds a seeded bumpy sphere on an icosphere base.
 *
 * # Safety
 * `out` must be a valid pointer to a mesh-handle slot.
 */
enum IwStatus iw_bumpy_sphere(uint32_t lmax,
                              double amp,
                              uint64_t seed,
                              uint32_t level,
                              struct IwMesh **out);

/**
 * Validates and builds a mesh from flat arrays: `vertices` holds
 * `3 * n_vertices` doubles (xyz interleaved), `faces` holds `3 * n_faces`
 * vertex indices with counterclockwise-from-outside winding.
 *
 * # Safety
 * The arrays must be readable at those lengths; `out` must be valid.
 */
enum IwStatus iw_mesh_from_arrays(const double *vertices,
                                  size_t n_vertices,
                                  const uint32_t *faces,
                                  size_t n_faces,
                                  struct IwMesh **out);

/**
 * Loads a mesh from an OFF or OBJ file (format from the extension).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid.
 */
enum IwStatus iw_mesh_load(const char *path, struct IwMesh **out);

/**
 * Saves a mesh to an OFF or OBJ file (format from the extension).
 *
 * # Safety
 * `mesh` must be a live handle from this library; `path` NUL-terminated.
 */
enum IwStatus iw_mesh_save(const struct IwMesh *mesh, const char *path);

/**
 * Releases a mesh handle. Null is a no-op.
 *
 * # Safety
 * `mesh` must be a handle returned by this library, not yet freed.
 */
void iw_mesh_free(struct IwMesh *mesh);

/**
 * Vertex count of a mesh handle; 0 for null.
 *
 * # Safety
 * `mesh` must be a live handle or null.
 */
uint64_t iw_mesh_vertex_count(const struct IwMesh *mesh);

/**
 * Face count of a mesh handle; 0 for null.
 *
 * # Safety
 * `mesh` must be a live handle or null.
 */
uint64_t iw_mesh_face_count(const struct IwMesh *mesh);

/**
 * Copies vertex coordinates (xyz interleaved) into `buf`.
 *
 * # Safety
 * `buf` must hold at least `3 * iw_mesh_vertex_count(mesh)` doubles.
 */
enum IwStatus iw_mesh_copy_vertices(const struct IwMesh *mesh, double *buf, size_t len);

/**
 * Copies face indices (ijk interleaved) into `buf`.
 *
 * # Safety
 * `buf` must hold at least `3 * iw_mesh_face_count(mesh)` entries.
 */
enum IwStatus iw_mesh_copy_faces(const struct IwMesh *mesh, uint32_t *buf, size_t len);

/**
 * Fills `out` with the full functional report of the mesh.
 *
 * # Safety
 * `mesh` must be a live handle; `out` must point to an [`IwReport`].
 */
enum IwStatus iw_mesh_report(const struct IwMesh *mesh, struct IwReport *out);

/**
 * Monte-Carlo asymmetry index with `samples` draws (at least 10^4).
 *
 * # Safety
 * `out_value` and `out_std_error` must be valid or null (null skips).
 */
enum IwStatus iw_mesh_asymmetry(const struct IwMesh *mesh,
                                uint64_t samples,
                                uint64_t seed,
                                double *out_value,
                                double *out_std_error);

/**
 * Closed-form Willmore energy of the spheroid E(r), r >= 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum IwStatus iw_spheroid_willmore(double r, double *out);

/**
 * Closed-form surface area of E(r), r >= 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum IwStatus iw_spheroid_area(double r, double *out);

/**
 * Enclosed volume of E(r), any r > 0.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum IwStatus iw_spheroid_volume(double r, double *out);

/**
 * Closed-form isoperimetric ratio of E(r), r >= 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum IwStatus iw_spheroid_isoperimetric(double r, double *out);

/**
 * Willmore energy of E(r) by adaptive quadrature; works for oblate r too.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum IwStatus iw_spheroid_willmore_quadrature(double r, double tol, double *out);

/**
 * Willmore deficit over isoperimetric deficit of E(r), r > 1 + 1e-6.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum IwStatus iw_deficit_ratio(double r, double *out);

/**
 * Richardson-extrapolated r -> 1 limit of the deficit ratio.
 *
 * # Safety
 * `out_limit` must be a valid pointer.
 */
enum IwStatus iw_deficit_ratio_limit(uint32_t kmax, double *out_limit);

/**
 * The literature constant 6(16 pi/3)^(2/3) ~ 39.287 quoted for that limit.
 */
double iw_literature_limit_constant(void);

/**
 * The plain W/I value at the sphere, 4 pi/(6 sqrt(pi))^(2/3) ~ 2.5985.
 */
double iw_continuous_ratio_at_unit(void);

/**
 * Fills `out` with the default descent configuration.
 *
 * # Safety
 * `out` must point to an [`IwDescentConfig`].
 */
enum IwStatus iw_descent_config_default(struct IwDescentConfig *out);

/**
 * Runs Willmore descent from `mesh`, returning the final mesh and filling
 * the optional final-energy outputs.
 *
 * # Safety
 * `mesh` and `config` must be valid; `out` must be a handle slot;
 * `out_willmore` / `out_isoperimetric` may be null.
 */
enum IwStatus iw_minimize(const struct IwMesh *mesh,
                          const struct IwDescentConfig *config,
                          struct IwMesh **out,
                          double *out_willmore,
                          double *out_isoperimetric);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOWILL_H */
