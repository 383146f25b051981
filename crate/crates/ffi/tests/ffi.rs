use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use wallkit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(wallkit_last_error()) }.to_string_lossy().into_owned()
}

struct Ctx(*mut WallkitContext);

impl Ctx {
    fn new(n: u64) -> Ctx {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { wallkit_context_new(n, &mut p) }, WallkitStatus::Ok);
        Ctx(p)
    }
}

impl Drop for Ctx {
    fn drop(&mut self) {
        unsafe { wallkit_context_free(self.0) }
    }
}

fn unit(i: usize, c: i64) -> [i64; 23] {
    let mut x = [0i64; 23];
    x[i] = c;
    x
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { wallkit_string_free(p) };
    s
}

#[test]
fn context_lifecycle() {
    let c = Ctx::new(4);
    assert_eq!(unsafe { wallkit_context_n(c.0) }, 4);
    assert_eq!(unsafe { wallkit_context_rank(c.0) }, 23);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { wallkit_context_new(1, &mut p) }, WallkitStatus::Input);
    assert!(p.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { wallkit_context_new(2, ptr::null_mut()) }, WallkitStatus::NullPointer);
    unsafe { wallkit_context_free(ptr::null_mut()) };
}

#[test]
fn wall_type_rows() {
    let c = Ctx::new(4);
    let mut len = 0usize;
    assert_eq!(unsafe { wallkit_wall_types(c.0, ptr::null_mut(), 0, &mut len) }, WallkitStatus::Ok);
    assert_eq!(len, 7);
    let mut small = [WallkitWallType::default(); 3];
    assert_eq!(
        unsafe { wallkit_wall_types(c.0, small.as_mut_ptr(), small.len(), &mut len) },
        WallkitStatus::BufferTooSmall
    );
    let mut rows = [WallkitWallType::default(); 7];
    assert_eq!(unsafe { wallkit_wall_types(c.0, rows.as_mut_ptr(), 7, &mut len) }, WallkitStatus::Ok);
    assert!(rows.contains(&WallkitWallType { square: -78, div: 6, ray_num: -13, ray_den: 6 }));
    assert_eq!(last_error(), "");
}

#[test]
fn wall_test_and_orbits() {
    let c = Ctx::new(3);
    let mut cond = WallkitCondition::None;
    let delta = unit(22, 1);
    assert_eq!(unsafe { wallkit_wall_test(c.0, delta.as_ptr(), 23, &mut cond) }, WallkitStatus::Ok);
    assert_eq!(cond, WallkitCondition::MkIsotropic);
    let mut deep = unit(0, 1);
    deep[1] = -3;
    assert_eq!(unsafe { wallkit_wall_test(c.0, deep.as_ptr(), 23, &mut cond) }, WallkitStatus::Ok);
    assert_eq!(cond, WallkitCondition::None);
    assert_eq!(unsafe { wallkit_wall_test(c.0, ptr::null(), 23, &mut cond) }, WallkitStatus::NullPointer);

    let mut same = false;
    let (e1, f3) = (unit(0, 1), unit(5, 1));
    assert_eq!(unsafe { wallkit_same_orbit(c.0, e1.as_ptr(), f3.as_ptr(), 23, &mut same) }, WallkitStatus::Ok);
    assert!(same);
    assert_eq!(unsafe { wallkit_same_orbit(c.0, e1.as_ptr(), delta.as_ptr(), 23, &mut same) }, WallkitStatus::Ok);
    assert!(!same);
    let twice = unit(0, 2);
    assert_eq!(
        unsafe { wallkit_same_orbit(c.0, e1.as_ptr(), twice.as_ptr(), 23, &mut same) },
        WallkitStatus::Input
    );
}

#[test]
fn json_entry_points() {
    let c = Ctx::new(3);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { wallkit_tabulate_json(c.0, &mut out) }, WallkitStatus::Ok);
    let rows: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 5);

    let q = CString::new(r#"{"n": 2, "polarized_degree": 1, "omega": ["2", "-1"]}"#).unwrap();
    assert_eq!(unsafe { wallkit_chamber_json(q.as_ptr(), 12, &mut out) }, WallkitStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["supporting"].as_array().unwrap().len(), 2);

    let on_wall = CString::new(r#"{"n": 2, "polarized_degree": 1, "omega": ["1", "0"]}"#).unwrap();
    assert_eq!(unsafe { wallkit_chamber_json(on_wall.as_ptr(), 12, &mut out) }, WallkitStatus::OnWall);
    let bad = CString::new("{").unwrap();
    assert_eq!(unsafe { wallkit_chamber_json(bad.as_ptr(), 12, &mut out) }, WallkitStatus::Parse);

    let name = CString::new("delta").unwrap();
    assert_eq!(unsafe { wallkit_verify_fixture_json(name.as_ptr(), 0, &mut out) }, WallkitStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["passed"], true);
    let name = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { wallkit_verify_fixture_json(name.as_ptr(), 0, &mut out) },
        WallkitStatus::UnknownFixture
    );
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("wallkit.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "wallkit_last_error",
        "wallkit_context_new",
        "wallkit_context_free",
        "wallkit_context_n",
        "wallkit_context_rank",
        "wallkit_wall_types",
        "wallkit_wall_test",
        "wallkit_same_orbit",
        "wallkit_tabulate_json",
        "wallkit_chamber_json",
        "wallkit_verify_fixture_json",
        "wallkit_string_free",
        "typedef struct WallkitContext WallkitContext",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libwallkit_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let out_dir = std::env::temp_dir().join(format!("wallkit-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let bin = out_dir.join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("c").join("smoke.c");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
    std::fs::remove_dir_all(&out_dir).unwrap();
}
