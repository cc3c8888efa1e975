//! C ABI for the isowill library.
//!
//! Meshes are opaque handles created and freed by this library; every other
//! value crosses the boundary as plain C data. Functions return an
//! [`IwStatus`] code; a human-readable message for the most recent failure
//! on the current thread is available via [`iw_last_error_message`]. All
//! entry points catch panics and report them as `IW_STATUS_PANIC`.

use isowill::functionals::{asymmetry_index, compute_report};
use isowill::mesh::{
    build_mesh, bumpy_sphere, icosphere, load_mesh, save_mesh, spheroid_mesh, MeshError,
    MeshFormat, TriangleMesh,
};
use isowill::optimize::{minimize, DescentConfig};
use isowill::spheroid::{
    continuous_ratio_at_unit, deficit_ratio, deficit_ratio_limit, literature_limit_constant,
    spheroid_area, spheroid_isoperimetric, spheroid_volume, spheroid_willmore,
    spheroid_willmore_quadrature, SpheroidError,
};
use isowill::Vec3;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Parse = 4,
    Io = 5,
    Domain = 6,
    NoConvergence = 7,
    PrecisionLoss = 8,
    Panic = 9,
}

/// Opaque mesh handle.
pub struct IwMesh {
    inner: TriangleMesh,
}

/// Mirror of the functional report, flattened to C-compatible fields.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IwReport {
    pub area: f64,
    pub volume: f64,
    pub willmore: f64,
    pub isoperimetric_ratio: f64,
    pub willmore_deficit: f64,
    pub isoperimetric_deficit: f64,
    pub tracefree_energy: f64,
    pub gauss_bonnet_residual: f64,
    pub tangential_identity_residual: f64,
    pub euler_characteristic: i64,
    pub mesh_vertices: u64,
    pub mesh_faces: u64,
}

/// Descent parameters; `sigma_target` may be NaN to disable the penalty.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct IwDescentConfig {
    pub max_steps: u64,
    pub initial_step: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub grad_tol: f64,
    pub sigma_target: f64,
    pub penalty_weight: f64,
    pub fd_epsilon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn mesh_status(e: &MeshError) -> IwStatus {
    match e {
        MeshError::Parse { .. } => IwStatus::Parse,
        MeshError::Io(_) => IwStatus::Io,
        MeshError::LevelTooLarge { .. }
        | MeshError::GridTooCoarse { .. }
        | MeshError::InvalidParameter { .. }
        | MeshError::InvalidIndex { .. } => IwStatus::InvalidArgument,
        _ => IwStatus::Validation,
    }
}

fn spheroid_status(e: &SpheroidError) -> IwStatus {
    match e {
        SpheroidError::Domain { .. } => IwStatus::Domain,
        SpheroidError::NoConvergence(_) => IwStatus::NoConvergence,
        SpheroidError::PrecisionLoss { .. } => IwStatus::PrecisionLoss,
    }
}

/// Runs `body` with panic containment, storing errors for retrieval.
fn guarded(body: impl FnOnce() -> IwStatus) -> IwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            IwStatus::Panic
        }
    }
}

fn emit_mesh(result: Result<TriangleMesh, MeshError>, out: *mut *mut IwMesh) -> IwStatus {
    if out.is_null() {
        set_error("output handle pointer is null");
        return IwStatus::NullPointer;
    }
    match result {
        Ok(mesh) => {
            let handle = Box::new(IwMesh { inner: mesh });
            unsafe { *out = Box::into_raw(handle) };
            IwStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            mesh_status(&e)
        }
    }
}

fn emit_f64(result: Result<f64, SpheroidError>, out: *mut f64) -> IwStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return IwStatus::NullPointer;
    }
    match result {
        Ok(v) => {
            unsafe { *out = v };
            IwStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            spheroid_status(&e)
        }
    }
}

unsafe fn path_from<'a>(ptr: *const c_char) -> Result<&'a Path, IwStatus> {
    if ptr.is_null() {
        set_error("path pointer is null");
        return Err(IwStatus::NullPointer);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(IwStatus::InvalidArgument)
        }
    }
}

fn format_for(path: &Path) -> Result<MeshFormat, IwStatus> {
    MeshFormat::from_path(path).ok_or_else(|| {
        set_error(format!("cannot infer mesh format from {:?}", path.display()));
        IwStatus::InvalidArgument
    })
}

/// Copies the most recent error message on this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes, or be null (in which
/// case only the length is returned).
#[no_mangle]
pub unsafe extern "C" fn iw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            // ensure termination even when truncating
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn iw_status_message(status: IwStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        IwStatus::Ok => b"ok\0",
        IwStatus::NullPointer => b"null pointer argument\0",
        IwStatus::InvalidArgument => b"invalid argument\0",
        IwStatus::Validation => b"mesh validation failed\0",
        IwStatus::Parse => b"parse error\0",
        IwStatus::Io => b"I/O error\0",
        IwStatus::Domain => b"domain error\0",
        IwStatus::NoConvergence => b"no convergence\0",
        IwStatus::PrecisionLoss => b"precision loss\0",
        IwStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Builds an icosphere of the given subdivision level.
///
/// # Safety
/// `out` must be a valid pointer to a mesh-handle slot.
#[no_mangle]
pub unsafe extern "C" fn iw_icosphere(level: u32, out: *mut *mut IwMesh) -> IwStatus {
    guarded(|| emit_mesh(icosphere(level), out))
}

/// Builds a spheroid revolution mesh with semi-axes (1, 1, r).
///
/// # Safety
/// `out` must be a valid pointer to a mesh-handle slot.
#[no_mangle]
pub unsafe extern "C" fn iw_spheroid_mesh(
    r: f64,
    nu: u32,
    nv: u32,
    out: *mut *mut IwMesh,
) -> IwStatus {
    guarded(|| emit_mesh(spheroid_mesh(r, nu, nv), out))
}

/// Builds a seeded bumpy sphere on an icosphere base.
///
/// # Safety
/// `out` must be a valid pointer to a mesh-handle slot.
#[no_mangle]
pub unsafe extern "C" fn iw_bumpy_sphere(
    lmax: u32,
    amp: f64,
    seed: u64,
    level: u32,
    out: *mut *mut IwMesh,
) -> IwStatus {
    guarded(|| emit_mesh(bumpy_sphere(lmax, amp, seed, level), out))
}

/// Validates and builds a mesh from flat arrays: `vertices` holds
/// `3 * n_vertices` doubles (xyz interleaved), `faces` holds `3 * n_faces`
/// vertex indices with counterclockwise-from-outside winding.
///
/// # Safety
/// The arrays must be readable at those lengths; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_from_arrays(
    vertices: *const f64,
    n_vertices: usize,
    faces: *const u32,
    n_faces: usize,
    out: *mut *mut IwMesh,
) -> IwStatus {
    guarded(|| {
        if vertices.is_null() || faces.is_null() {
            set_error("vertex or face array is null");
            return IwStatus::NullPointer;
        }
        let vs: Vec<Vec3> = std::slice::from_raw_parts(vertices, 3 * n_vertices)
            .chunks_exact(3)
            .map(|c| Vec3::new(c[0], c[1], c[2]))
            .collect();
        let fs: Vec<[u32; 3]> = std::slice::from_raw_parts(faces, 3 * n_faces)
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        emit_mesh(build_mesh(vs, fs), out)
    })
}

/// Loads a mesh from an OFF or OBJ file (format from the extension).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_load(path: *const c_char, out: *mut *mut IwMesh) -> IwStatus {
    guarded(|| {
        let path = match path_from(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let format = match format_for(path) {
            Ok(f) => f,
            Err(s) => return s,
        };
        emit_mesh(load_mesh(path, format), out)
    })
}

/// Saves a mesh to an OFF or OBJ file (format from the extension).
///
/// # Safety
/// `mesh` must be a live handle from this library; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_save(mesh: *const IwMesh, path: *const c_char) -> IwStatus {
    guarded(|| {
        let Some(mesh) = mesh.as_ref() else {
            set_error("mesh handle is null");
            return IwStatus::NullPointer;
        };
        let path = match path_from(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let format = match format_for(path) {
            Ok(f) => f,
            Err(s) => return s,
        };
        match save_mesh(&mesh.inner, path, format) {
            Ok(()) => IwStatus::Ok,
            Err(e) => {
                set_error(e.to_string());
                mesh_status(&e)
            }
        }
    })
}

/// Releases a mesh handle. Null is a no-op.
///
/// # Safety
/// `mesh` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_free(mesh: *mut IwMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Vertex count of a mesh handle; 0 for null.
///
/// # Safety
/// `mesh` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_vertex_count(mesh: *const IwMesh) -> u64 {
    mesh.as_ref().map_or(0, |m| m.inner.vertex_count() as u64)
}

/// Face count of a mesh handle; 0 for null.
///
/// # Safety
/// `mesh` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_face_count(mesh: *const IwMesh) -> u64 {
    mesh.as_ref().map_or(0, |m| m.inner.face_count() as u64)
}

/// Copies vertex coordinates (xyz interleaved) into `buf`.
///
/// # Safety
/// `buf` must hold at least `3 * iw_mesh_vertex_count(mesh)` doubles.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_copy_vertices(
    mesh: *const IwMesh,
    buf: *mut f64,
    len: usize,
) -> IwStatus {
    guarded(|| {
        let Some(mesh) = mesh.as_ref() else {
            set_error("mesh handle is null");
            return IwStatus::NullPointer;
        };
        let needed = 3 * mesh.inner.vertex_count();
        if buf.is_null() || len < needed {
            set_error(format!("buffer of {len} doubles is too small, need {needed}"));
            return IwStatus::InvalidArgument;
        }
        let dst = std::slice::from_raw_parts_mut(buf, needed);
        for (chunk, v) in dst.chunks_exact_mut(3).zip(mesh.inner.vertices()) {
            chunk[0] = v.x;
            chunk[1] = v.y;
            chunk[2] = v.z;
        }
        IwStatus::Ok
    })
}

/// Copies face indices (ijk interleaved) into `buf`.
///
/// # Safety
/// `buf` must hold at least `3 * iw_mesh_face_count(mesh)` entries.
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_copy_faces(
    mesh: *const IwMesh,
    buf: *mut u32,
    len: usize,
) -> IwStatus {
    guarded(|| {
        let Some(mesh) = mesh.as_ref() else {
            set_error("mesh handle is null");
            return IwStatus::NullPointer;
        };
        let needed = 3 * mesh.inner.face_count();
        if buf.is_null() || len < needed {
            set_error(format!("buffer of {len} indices is too small, need {needed}"));
            return IwStatus::InvalidArgument;
        }
        let dst = std::slice::from_raw_parts_mut(buf, needed);
        for (chunk, f) in dst.chunks_exact_mut(3).zip(mesh.inner.faces()) {
            chunk.copy_from_slice(f);
        }
        IwStatus::Ok
    })
}

/// Fills `out` with the full functional report of the mesh.
///
/// # Safety
/// `mesh` must be a live handle; `out` must point to an [`IwReport`].
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_report(mesh: *const IwMesh, out: *mut IwReport) -> IwStatus {
    guarded(|| {
        let Some(mesh) = mesh.as_ref() else {
            set_error("mesh handle is null");
            return IwStatus::NullPointer;
        };
        if out.is_null() {
            set_error("report pointer is null");
            return IwStatus::NullPointer;
        }
        let r = compute_report(&mesh.inner);
        *out = IwReport {
            area: r.area,
            volume: r.volume,
            willmore: r.willmore,
            isoperimetric_ratio: r.isoperimetric_ratio,
            willmore_deficit: r.willmore_deficit,
            isoperimetric_deficit: r.isoperimetric_deficit,
            tracefree_energy: r.tracefree_energy,
            gauss_bonnet_residual: r.gauss_bonnet_residual,
            tangential_identity_residual: r.tangential_identity_residual,
            euler_characteristic: r.euler_characteristic,
            mesh_vertices: r.mesh_vertices as u64,
            mesh_faces: r.mesh_faces as u64,
        };
        IwStatus::Ok
    })
}

/// Monte-Carlo asymmetry index with `samples` draws (at least 10^4).
///
/// # Safety
/// `out_value` and `out_std_error` must be valid or null (null skips).
#[no_mangle]
pub unsafe extern "C" fn iw_mesh_asymmetry(
    mesh: *const IwMesh,
    samples: u64,
    seed: u64,
    out_value: *mut f64,
    out_std_error: *mut f64,
) -> IwStatus {
    guarded(|| {
        let Some(mesh) = mesh.as_ref() else {
            set_error("mesh handle is null");
            return IwStatus::NullPointer;
        };
        match asymmetry_index(&mesh.inner, samples as usize, seed) {
            Ok(est) => {
                if !out_value.is_null() {
                    *out_value = est.value;
                }
                if !out_std_error.is_null() {
                    *out_std_error = est.std_error;
                }
                IwStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                IwStatus::InvalidArgument
            }
        }
    })
}

/// Closed-form Willmore energy of the spheroid E(r), r >= 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_spheroid_willmore(r: f64, out: *mut f64) -> IwStatus {
    guarded(|| emit_f64(spheroid_willmore(r), out))
}

/// Closed-form surface area of E(r), r >= 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_spheroid_area(r: f64, out: *mut f64) -> IwStatus {
    guarded(|| emit_f64(spheroid_area(r), out))
}

/// Enclosed volume of E(r), any r > 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_spheroid_volume(r: f64, out: *mut f64) -> IwStatus {
    guarded(|| emit_f64(spheroid_volume(r), out))
}

/// Closed-form isoperimetric ratio of E(r), r >= 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_spheroid_isoperimetric(r: f64, out: *mut f64) -> IwStatus {
    guarded(|| emit_f64(spheroid_isoperimetric(r), out))
}

/// Willmore energy of E(r) by adaptive quadrature; works for oblate r too.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_spheroid_willmore_quadrature(
    r: f64,
    tol: f64,
    out: *mut f64,
) -> IwStatus {
    guarded(|| emit_f64(spheroid_willmore_quadrature(r, tol), out))
}

/// Willmore deficit over isoperimetric deficit of E(r), r > 1 + 1e-6.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_deficit_ratio(r: f64, out: *mut f64) -> IwStatus {
    guarded(|| emit_f64(deficit_ratio(r), out))
}

/// Richardson-extrapolated r -> 1 limit of the deficit ratio.
///
/// # Safety
/// `out_limit` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iw_deficit_ratio_limit(kmax: u32, out_limit: *mut f64) -> IwStatus {
    guarded(|| emit_f64(deficit_ratio_limit(kmax).map(|r| r.limit), out_limit))
}

/// The literature constant 6(16 pi/3)^(2/3) ~ 39.287 quoted for that limit.
#[no_mangle]
pub extern "C" fn iw_literature_limit_constant() -> f64 {
    literature_limit_constant()
}

/// The plain W/I value at the sphere, 4 pi/(6 sqrt(pi))^(2/3) ~ 2.5985.
#[no_mangle]
pub extern "C" fn iw_continuous_ratio_at_unit() -> f64 {
    continuous_ratio_at_unit()
}

/// Fills `out` with the default descent configuration.
///
/// # Safety
/// `out` must point to an [`IwDescentConfig`].
#[no_mangle]
pub unsafe extern "C" fn iw_descent_config_default(out: *mut IwDescentConfig) -> IwStatus {
    guarded(|| {
        if out.is_null() {
            set_error("config pointer is null");
            return IwStatus::NullPointer;
        }
        let d = DescentConfig::default();
        *out = IwDescentConfig {
            max_steps: d.max_steps as u64,
            initial_step: d.initial_step,
            armijo_c: d.armijo_c,
            backtrack_factor: d.backtrack_factor,
            grad_tol: d.grad_tol,
            sigma_target: f64::NAN,
            penalty_weight: d.penalty_weight,
            fd_epsilon: d.fd_epsilon,
        };
        IwStatus::Ok
    })
}

/// Runs Willmore descent from `mesh`, returning the final mesh and filling
/// the optional final-energy outputs.
///
/// # Safety
/// `mesh` and `config` must be valid; `out` must be a handle slot;
/// `out_willmore` / `out_isoperimetric` may be null.
#[no_mangle]
pub unsafe extern "C" fn iw_minimize(
    mesh: *const IwMesh,
    config: *const IwDescentConfig,
    out: *mut *mut IwMesh,
    out_willmore: *mut f64,
    out_isoperimetric: *mut f64,
) -> IwStatus {
    guarded(|| {
        let Some(mesh) = mesh.as_ref() else {
            set_error("mesh handle is null");
            return IwStatus::NullPointer;
        };
        let Some(c) = config.as_ref() else {
            set_error("config pointer is null");
            return IwStatus::NullPointer;
        };
        let config = DescentConfig {
            max_steps: c.max_steps as usize,
            initial_step: c.initial_step,
            armijo_c: c.armijo_c,
            backtrack_factor: c.backtrack_factor,
            grad_tol: c.grad_tol,
            sigma_target: if c.sigma_target.is_nan() { None } else { Some(c.sigma_target) },
            penalty_weight: c.penalty_weight,
            fd_epsilon: c.fd_epsilon,
        };
        match minimize(&mesh.inner, &config) {
            Ok((final_mesh, trace)) => {
                let last = trace.records.last().expect("trace has a start row");
                if !out_willmore.is_null() {
                    *out_willmore = last.willmore;
                }
                if !out_isoperimetric.is_null() {
                    *out_isoperimetric = last.isoperimetric_ratio;
                }
                emit_mesh(Ok(final_mesh), out)
            }
            Err(e) => {
                set_error(e.to_string());
                IwStatus::InvalidArgument
            }
        }
    })
}
