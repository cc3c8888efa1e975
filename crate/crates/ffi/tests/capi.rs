//! Exercises the C entry points the way a foreign binding would: through
//! raw pointers and status codes only.

use isowill_ffi::*;
use std::ffi::CString;
use std::f64::consts::PI;
use std::ptr;

fn make_icosphere(level: u32) -> *mut IwMesh {
    let mut handle: *mut IwMesh = ptr::null_mut();
    let status = unsafe { iw_icosphere(level, &mut handle) };
    assert_eq!(status, IwStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn icosphere_report_round_trip() {
    let mesh = make_icosphere(3);
    unsafe {
        assert_eq!(iw_mesh_vertex_count(mesh), 642);
        assert_eq!(iw_mesh_face_count(mesh), 1280);

        let mut report = std::mem::zeroed::<IwReport>();
        assert_eq!(iw_mesh_report(mesh, &mut report), IwStatus::Ok);
        assert_eq!(report.euler_characteristic, 2);
        assert_eq!(report.mesh_vertices, 642);
        assert!((report.area - 4.0 * PI).abs() / (4.0 * PI) < 0.01);
        assert!(report.gauss_bonnet_residual < 1e-9);

        iw_mesh_free(mesh);
    }
}

#[test]
fn copy_buffers_and_rebuild() {
    let mesh = make_icosphere(1);
    unsafe {
        let nv = iw_mesh_vertex_count(mesh) as usize;
        let nf = iw_mesh_face_count(mesh) as usize;
        let mut vertices = vec![0.0f64; 3 * nv];
        let mut faces = vec![0u32; 3 * nf];
        assert_eq!(
            iw_mesh_copy_vertices(mesh, vertices.as_mut_ptr(), vertices.len()),
            IwStatus::Ok
        );
        assert_eq!(iw_mesh_copy_faces(mesh, faces.as_mut_ptr(), faces.len()), IwStatus::Ok);

        // short buffer is rejected
        assert_eq!(
            iw_mesh_copy_vertices(mesh, vertices.as_mut_ptr(), 3),
            IwStatus::InvalidArgument
        );

        let mut rebuilt: *mut IwMesh = ptr::null_mut();
        assert_eq!(
            iw_mesh_from_arrays(vertices.as_ptr(), nv, faces.as_ptr(), nf, &mut rebuilt),
            IwStatus::Ok
        );
        assert_eq!(iw_mesh_vertex_count(rebuilt), nv as u64);
        iw_mesh_free(rebuilt);
        iw_mesh_free(mesh);
    }
}

#[test]
fn file_round_trip_through_the_c_surface() {
    let path = std::env::temp_dir().join(format!("isowill-capi-{}.off", std::process::id()));
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mesh = make_icosphere(2);
    unsafe {
        assert_eq!(iw_mesh_save(mesh, cpath.as_ptr()), IwStatus::Ok);
        let mut loaded: *mut IwMesh = ptr::null_mut();
        assert_eq!(iw_mesh_load(cpath.as_ptr(), &mut loaded), IwStatus::Ok);
        assert_eq!(iw_mesh_vertex_count(loaded), iw_mesh_vertex_count(mesh));
        iw_mesh_free(loaded);
        iw_mesh_free(mesh);
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn spheroid_functions_and_domain_errors() {
    unsafe {
        let mut w = 0.0;
        assert_eq!(iw_spheroid_willmore(2.0, &mut w), IwStatus::Ok);
        assert!((w - 15.451606644326558).abs() < 1e-12);

        let mut q = 0.0;
        assert_eq!(iw_spheroid_willmore_quadrature(2.0, 1e-10, &mut q), IwStatus::Ok);
        assert!((q - w).abs() < 1e-8);

        let mut v = 0.0;
        assert_eq!(iw_spheroid_volume(2.0, &mut v), IwStatus::Ok);
        assert!((v - 8.0 * PI / 3.0).abs() < 1e-14);

        assert_eq!(iw_spheroid_willmore(0.5, &mut w), IwStatus::Domain);
        let mut buf = vec![0i8; 256];
        let n = iw_last_error_message(buf.as_mut_ptr().cast(), buf.len());
        assert!(n > 0);

        let mut limit = 0.0;
        assert_eq!(iw_deficit_ratio_limit(20, &mut limit), IwStatus::Ok);
        assert!((limit - 7.795554179441508).abs() < 1e-6);
        assert!((iw_literature_limit_constant() - 39.28713122509724).abs() < 1e-9);
        assert!((iw_continuous_ratio_at_unit() - 2.598518059813836).abs() < 1e-12);
    }
}

#[test]
fn null_pointers_are_reported_not_crashed() {
    unsafe {
        assert_eq!(iw_icosphere(2, ptr::null_mut()), IwStatus::NullPointer);
        assert_eq!(iw_mesh_report(ptr::null(), ptr::null_mut()), IwStatus::NullPointer);
        assert_eq!(iw_mesh_vertex_count(ptr::null()), 0);
        assert_eq!(iw_mesh_save(ptr::null(), ptr::null()), IwStatus::NullPointer);
        iw_mesh_free(ptr::null_mut()); // no-op
        let mut out: *mut IwMesh = ptr::null_mut();
        assert_eq!(iw_icosphere(99, &mut out), IwStatus::InvalidArgument);
    }
}

#[test]
fn minimize_through_the_c_surface() {
    unsafe {
        let mut start: *mut IwMesh = ptr::null_mut();
        assert_eq!(iw_bumpy_sphere(4, 0.1, 42, 2, &mut start), IwStatus::Ok);

        let mut config = std::mem::zeroed::<IwDescentConfig>();
        assert_eq!(iw_descent_config_default(&mut config), IwStatus::Ok);
        config.max_steps = 10;

        let mut report = std::mem::zeroed::<IwReport>();
        assert_eq!(iw_mesh_report(start, &mut report), IwStatus::Ok);
        let w_start = report.willmore;

        let mut result: *mut IwMesh = ptr::null_mut();
        let mut w_end = 0.0;
        let status = iw_minimize(start, &config, &mut result, &mut w_end, ptr::null_mut());
        assert_eq!(status, IwStatus::Ok);
        assert!(w_end < w_start, "descent must lower W: {w_start} -> {w_end}");
        iw_mesh_free(result);
        iw_mesh_free(start);
    }
}
