use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dimer_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(dimer_last_error()) }
        .to_string_lossy()
        .into_owned()
}

const SINGLET: DimerParams = DimerParams {
    j: 1.0,
    delta: 1.0,
    d_ani: 0.0,
    h: 0.0,
};

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(dimer_version()) };
    assert_eq!(v.to_str().unwrap(), dimer_core::VERSION);
}

#[test]
fn singlet_report() {
    let mut r = std::mem::MaybeUninit::<DimerReport>::uninit();
    let status = unsafe { dimer_evaluate(&SINGLET, 0.0, r.as_mut_ptr()) };
    assert_eq!(status, DimerStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert!((r.negativity - 1.0).abs() < 1e-9);
    assert!((r.c_l1 - 2.0).abs() < 1e-9);
    assert!((r.c_r - 3f64.log2()).abs() < 1e-9);
    assert!((r.steering_s - 16.0 / 3.0).abs() < 1e-9);
    assert!(r.steerable);
    assert_eq!(r.phase, DimerPhase::RegionI);
    assert_eq!(last_error(), "");
}

#[test]
fn state_handle_lifecycle() {
    let p = DimerParams {
        j: 1.0,
        delta: 1.0,
        d_ani: 1.0,
        h: 5.0,
    };
    let mut state = ptr::null_mut();
    assert_eq!(
        unsafe { dimer_state_new(&p, 0.1, &mut state) },
        DimerStatus::Ok
    );
    assert!(!state.is_null());

    let mut rho = [0.0f64; 81];
    assert_eq!(
        unsafe { dimer_state_density(state, rho.as_mut_ptr()) },
        DimerStatus::Ok
    );
    let trace: f64 = (0..9).map(|i| rho[10 * i]).sum();
    assert!((trace - 1.0).abs() < 1e-12);
    for i in 0..9 {
        for j in 0..9 {
            assert_eq!(rho[9 * i + j], rho[9 * j + i]);
        }
    }

    let mut z = 0.0;
    assert_eq!(
        unsafe { dimer_state_partition_function(state, &mut z) },
        DimerStatus::Ok
    );
    assert!(z.is_finite() && z > 0.0);

    let mut r = std::mem::MaybeUninit::<DimerReport>::uninit();
    assert_eq!(
        unsafe { dimer_state_evaluate(state, r.as_mut_ptr()) },
        DimerStatus::Ok
    );
    let r = unsafe { r.assume_init() };
    assert_eq!(r.phase, DimerPhase::None);
    unsafe { dimer_state_free(state) };
    unsafe { dimer_state_free(ptr::null_mut()) };
}

#[test]
fn ground_state_has_no_partition_function() {
    let mut state = ptr::null_mut();
    assert_eq!(
        unsafe { dimer_state_new(&SINGLET, 0.0, &mut state) },
        DimerStatus::Ok
    );
    let mut z = 0.0;
    assert_eq!(
        unsafe { dimer_state_partition_function(state, &mut z) },
        DimerStatus::Unsupported
    );
    assert!(last_error().contains("partition function"));
    unsafe { dimer_state_free(state) };
}

#[test]
fn error_codes() {
    let mut r = std::mem::MaybeUninit::<DimerReport>::uninit();
    let zero_j = DimerParams { j: 0.0, ..SINGLET };
    assert_eq!(
        unsafe { dimer_evaluate(&zero_j, 1.0, r.as_mut_ptr()) },
        DimerStatus::Unsupported
    );
    assert!(last_error().contains("j = 0"));
    let nan = DimerParams {
        h: f64::NAN,
        ..SINGLET
    };
    assert_eq!(
        unsafe { dimer_evaluate(&nan, 1.0, r.as_mut_ptr()) },
        DimerStatus::InvalidInput
    );
    assert_eq!(
        unsafe { dimer_evaluate(&SINGLET, -1.0, r.as_mut_ptr()) },
        DimerStatus::InvalidInput
    );
    assert_eq!(
        unsafe { dimer_evaluate(ptr::null(), 1.0, r.as_mut_ptr()) },
        DimerStatus::NullPointer
    );
    assert_eq!(
        unsafe { dimer_evaluate(&SINGLET, 1.0, ptr::null_mut()) },
        DimerStatus::NullPointer
    );
    assert!(last_error().contains("out is null"));

    let mut state = ptr::dangling_mut::<DimerThermalState>();
    assert_eq!(
        unsafe { dimer_state_new(&zero_j, 1.0, &mut state) },
        DimerStatus::Unsupported
    );
    assert!(state.is_null());

    let mut e = [0.0; 9];
    assert_eq!(
        unsafe { dimer_spectrum(&SINGLET, e.as_mut_ptr()) },
        DimerStatus::Ok
    );
    assert_eq!(e.iter().cloned().fold(f64::INFINITY, f64::min), -2.0);
}

#[test]
fn last_error_is_thread_local() {
    let mut r = std::mem::MaybeUninit::<DimerReport>::uninit();
    let zero_j = DimerParams { j: 0.0, ..SINGLET };
    assert_ne!(
        unsafe { dimer_evaluate(&zero_j, 1.0, r.as_mut_ptr()) },
        DimerStatus::Ok
    );
    std::thread::spawn(|| assert_eq!(last_error(), ""))
        .join()
        .unwrap();
    assert!(!last_error().is_empty());
}

const SPEC: &str = r#"{"axis_x": {"name": "h", "min": -2, "max": 2, "steps": 5},
                       "axis_y": {"name": "d", "min": -1, "max": 1, "steps": 3},
                       "fixed": {"delta": 2, "t": 0}}"#;

#[test]
fn sweep_rows_match_core() {
    let spec = CString::new(SPEC).unwrap();
    let mut grid = ptr::null_mut();
    assert_eq!(
        unsafe { dimer_sweep_run(spec.as_ptr(), 0, &mut grid) },
        DimerStatus::Ok
    );
    assert_eq!(unsafe { dimer_sweep_len(grid) }, 15);
    let core = dimer_core::run_sweep(&dimer_core::GridSpec::from_json(SPEC).unwrap()).unwrap();
    for (k, expected) in core.rows.iter().enumerate() {
        let mut row = std::mem::MaybeUninit::<DimerGridRow>::uninit();
        assert_eq!(
            unsafe { dimer_sweep_row(grid, k, row.as_mut_ptr()) },
            DimerStatus::Ok
        );
        let row = unsafe { row.assume_init() };
        assert_eq!((row.x, row.y), (expected.x, expected.y));
        assert_eq!(row.negativity, expected.negativity.unwrap());
        assert_eq!(row.steerable, expected.steerable.unwrap() as i32);
        assert_ne!(row.phase, DimerPhase::None);
        assert!(row.ground_rank >= 1);
    }
    let mut row = std::mem::MaybeUninit::<DimerGridRow>::uninit();
    assert_eq!(
        unsafe { dimer_sweep_row(grid, 15, row.as_mut_ptr()) },
        DimerStatus::OutOfRange
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { dimer_sweep_write(grid, c_path.as_ptr(), DimerFormat::Csv as i32) },
        DimerStatus::Ok
    );
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        dimer_core::sweep::to_csv(&core)
    );
    assert_eq!(
        unsafe { dimer_sweep_write(grid, c_path.as_ptr(), 9) },
        DimerStatus::InvalidInput
    );
    let bad_path = CString::new("/nonexistent/dir/grid.csv").unwrap();
    assert_eq!(
        unsafe { dimer_sweep_write(grid, bad_path.as_ptr(), DimerFormat::Json as i32) },
        DimerStatus::Io
    );
    unsafe { dimer_sweep_free(grid) };
    assert_eq!(unsafe { dimer_sweep_len(ptr::null()) }, 0);
}

#[test]
fn sweep_rejects_bad_specs() {
    let mut grid = ptr::null_mut();
    for bad in [
        "{",
        r#"{"axis_x": {"name": "h", "min": 0, "max": 1, "steps": 1}, "axis_y": {"name": "d", "min": 0, "max": 1, "steps": 3}}"#,
    ] {
        let spec = CString::new(bad).unwrap();
        assert_eq!(
            unsafe { dimer_sweep_run(spec.as_ptr(), 1, &mut grid) },
            DimerStatus::InvalidInput
        );
        assert!(grid.is_null());
    }
    assert_eq!(
        unsafe { dimer_sweep_run(ptr::null(), 1, &mut grid) },
        DimerStatus::NullPointer
    );
}

#[test]
fn absent_quantities_are_nan() {
    let spec = CString::new(
        r#"{"axis_x": {"name": "h", "min": 0, "max": 1, "steps": 2},
            "axis_y": {"name": "t", "min": 0.5, "max": 1, "steps": 2},
            "quantities": ["negativity"]}"#,
    )
    .unwrap();
    let mut grid = ptr::null_mut();
    assert_eq!(
        unsafe { dimer_sweep_run(spec.as_ptr(), 1, &mut grid) },
        DimerStatus::Ok
    );
    let mut row = std::mem::MaybeUninit::<DimerGridRow>::uninit();
    assert_eq!(
        unsafe { dimer_sweep_row(grid, 0, row.as_mut_ptr()) },
        DimerStatus::Ok
    );
    let row = unsafe { row.assume_init() };
    assert!(row.c_l1.is_nan() && row.steering_s.is_nan());
    assert!(row.negativity.is_finite());
    assert_eq!(row.steerable, -1);
    assert_eq!(row.phase, DimerPhase::None);
    assert_eq!(row.ground_rank, 0);
    unsafe { dimer_sweep_free(grid) };
}

/// Compiles `tests/c/smoke.c` against the generated header and the static
/// library built alongside this test.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target_tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    // CARGO_TARGET_TMPDIR is <target>/tmp; the profile dir holds the archive.
    let target = target_tmp.parent().unwrap();
    let profile = if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    };
    let archive = target.join(profile).join("libdimer_ffi.a");
    assert!(archive.exists(), "missing {}", archive.display());

    let exe = target_tmp.join("dimer_smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    let build = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("C compiler available");
    assert!(
        build.status.success(),
        "{}",
        String::from_utf8_lossy(&build.stderr)
    );

    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "exit {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("ok"));
}
