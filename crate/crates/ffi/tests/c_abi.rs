use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use dsn_ffi::*;

const PATH: &str = r#"{"graph":{"vertices":["s","a","b","t"],"edges":[["s","a",1],["a","t",1],["s","b",1],["b","t",3]]},"pattern":{"terminals":["s","t"],"demands":[["s","t"]]}}"#;

fn instance(json: &str) -> (DsnStatus, *mut DsnInstance) {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { dsn_instance_from_json(c.as_ptr(), &mut out) };
    (status, out)
}

fn last_error() -> String {
    let p = dsn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn handle_lifecycle_and_solving() {
    let (status, inst) = instance(PATH);
    assert_eq!(status, DsnStatus::Ok);
    assert!(dsn_last_error().is_null());
    unsafe {
        assert_eq!(dsn_instance_vertex_count(inst), 4);
        assert_eq!(dsn_instance_edge_count(inst), 4);
        let mut cost = 0;
        assert_eq!(dsn_oracle_cost(inst, &mut cost), DsnStatus::Ok);
        assert_eq!(cost, 2);
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(dsn_solve(inst, 0, &mut cost, &mut json), DsnStatus::Ok);
        assert_eq!(cost, 2);
        assert_eq!(
            CStr::from_ptr(json).to_str().unwrap(),
            r#"{"cost":2,"edges":[["s","a"],["a","t"]]}"#
        );
        dsn_string_free(json);
        assert_eq!(dsn_solve(inst, 2, &mut cost, ptr::null_mut()), DsnStatus::Ok);
        let mut member = -1;
        assert_eq!(dsn_classify(inst, 1, 0, false, &mut member), DsnStatus::Ok);
        assert_eq!(member, 1);
        dsn_instance_free(inst);
        dsn_instance_free(ptr::null_mut());
    }
}

#[test]
fn error_codes() {
    let (status, inst) = instance("{\"graph\":");
    assert_eq!(status, DsnStatus::ParseError);
    assert!(inst.is_null());
    assert!(last_error().contains("line 1"));

    let dup = PATH.replace(r#"["s","a","b","t"]"#, r#"["s","a","s","t"]"#);
    assert_eq!(instance(&dup).0, DsnStatus::ParseError);
    assert!(last_error().contains("`s`"));

    let cut = PATH
        .replace(r#"["a","t",1]"#, r#"["t","a",1]"#)
        .replace(r#"["b","t",3]"#, r#"["t","b",3]"#);
    let (status, inst) = instance(&cut);
    assert_eq!(status, DsnStatus::Ok);
    unsafe {
        let mut cost = 0;
        assert_eq!(dsn_oracle_cost(inst, &mut cost), DsnStatus::Infeasible);
        assert_eq!(dsn_solve(inst, 0, &mut cost, ptr::null_mut()), DsnStatus::Infeasible);
        assert_eq!(dsn_oracle_cost(inst, ptr::null_mut()), DsnStatus::NullPointer);
        assert_eq!(dsn_oracle_cost(ptr::null(), &mut cost), DsnStatus::NullPointer);
        assert_eq!(
            dsn_instance_from_json(ptr::null(), &mut ptr::null_mut()),
            DsnStatus::NullPointer
        );
        dsn_instance_free(inst);
    }
}

#[test]
fn command_line_through_the_abi() {
    let dir = tempfile::TempDir::new().unwrap();
    let file = dir.path().join("path.json");
    std::fs::write(&file, PATH).unwrap();
    let args: Vec<CString> = ["oracle", file.to_str().unwrap()]
        .iter()
        .map(|s| CString::new(*s).unwrap())
        .collect();
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let (mut out, mut err) = (ptr::null_mut(), ptr::null_mut());
    let code = unsafe { dsn_run(argv.len(), argv.as_ptr(), &mut out, &mut err) };
    assert_eq!(code, 0);
    unsafe {
        assert!(CStr::from_ptr(out).to_str().unwrap().starts_with(r#"{"cost":2"#));
        assert_eq!(CStr::from_ptr(err).to_bytes(), b"");
        dsn_string_free(out);
        dsn_string_free(err);
    }
    let bad = [CString::new("nope").unwrap()];
    let argv: Vec<*const c_char> = bad.iter().map(|a| a.as_ptr()).collect();
    assert_eq!(
        unsafe { dsn_run(1, argv.as_ptr(), ptr::null_mut(), ptr::null_mut()) },
        3
    );
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dsn.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "dsn_last_error",
        "dsn_instance_from_json",
        "dsn_instance_free",
        "dsn_instance_vertex_count",
        "dsn_instance_edge_count",
        "dsn_oracle_cost",
        "dsn_solve",
        "dsn_classify",
        "dsn_run",
        "dsn_string_free",
        "DSN_STATUS_LIMIT_EXCEEDED = 4",
        "typedef struct DsnInstance DsnInstance;",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(cc.status.success());
    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"dsn.h\"\nint main(void) {\n  DsnInstance *i = NULL;\n  DsnStatus s = dsn_instance_from_json(\"{}\", &i);\n  dsn_instance_free(i);\n  return s == DSN_STATUS_OK;\n}\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
