use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use thaiprep_ffi::*;

fn take_string(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { thaiprep_string_free(s) };
    out
}

fn last_error() -> String {
    let p = thaiprep_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn normalizes_through_handle() {
    let mut n = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_normalizer_new(ptr::null(), &mut n) }, ThaiprepStatus::Ok);
    let text = CString::new("ฉันชอบมันมากกกก555555+").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_normalize(n, text.as_ptr(), &mut out) }, ThaiprepStatus::Ok);
    assert_eq!(take_string(out), "ฉันชอบมันมาก [CREP] 4 [LAUGH]");
    unsafe { thaiprep_normalizer_free(n) };
}

#[test]
fn normalizer_reads_config_text() {
    let mut n = ptr::null_mut();
    let config = CString::new("[rewrite_caps]\ncrep = 3\n").unwrap();
    assert_eq!(unsafe { thaiprep_normalizer_new(config.as_ptr(), &mut n) }, ThaiprepStatus::Ok);
    let text = CString::new("มากกกกกก").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_normalize(n, text.as_ptr(), &mut out) }, ThaiprepStatus::Ok);
    assert_eq!(take_string(out), "มาก [CREP] 3");
    unsafe { thaiprep_normalizer_free(n) };

    let bad = CString::new("no_such_key = 1").unwrap();
    let mut n = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_normalizer_new(bad.as_ptr(), &mut n) }, ThaiprepStatus::InvalidArgument);
    assert!(n.is_null());
    assert!(last_error().contains("no_such_key"));
}

#[test]
fn tokenizes_with_lexicon_file() {
    let dir = std::env::temp_dir().join(format!("thaiprep-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let lexicon = dir.join("lex.txt");
    std::fs::write(&lexicon, "ฉัน\nชอบ\nมัน\nมาก\n").unwrap();
    let path = CString::new(lexicon.to_str().unwrap()).unwrap();
    let paths = [path.as_ptr()];
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_tokenizer_new(paths.as_ptr(), 1, &mut t) }, ThaiprepStatus::Ok);

    let text = CString::new("ฉันชอบมันมาก [CREP] 4 [LAUGH]").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_tokenize_segmented(t, text.as_ptr(), &mut out) }, ThaiprepStatus::Ok);
    assert_eq!(take_string(out), "ฉัน|ชอบ|มัน|มาก [CREP] 4 [LAUGH]");

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_tokenize_json(t, text.as_ptr(), &mut json) }, ThaiprepStatus::Ok);
    let tokens: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(tokens.as_array().unwrap().len(), 7);
    assert_eq!(tokens[4]["kind"], "special");
    assert_eq!(tokens[5]["kind"], "count");
    unsafe { thaiprep_tokenizer_free(t) };
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_lexicon_is_an_io_error() {
    let path = CString::new("/nonexistent/lexicon.txt").unwrap();
    let paths = [path.as_ptr()];
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_tokenizer_new(paths.as_ptr(), 1, &mut t) }, ThaiprepStatus::Io);
    assert!(t.is_null());
    assert!(last_error().contains("/nonexistent/lexicon.txt"));
}

#[test]
fn rejects_null_and_invalid_input() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_normalize(ptr::null(), ptr::null(), &mut out) }, ThaiprepStatus::NullPointer);

    let mut n = ptr::null_mut();
    assert_eq!(unsafe { thaiprep_normalizer_new(ptr::null(), &mut n) }, ThaiprepStatus::Ok);
    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { thaiprep_normalize(n, invalid.as_ptr().cast(), &mut out) },
        ThaiprepStatus::InvalidUtf8
    );
    assert_eq!(unsafe { thaiprep_normalize(n, invalid.as_ptr().cast(), ptr::null_mut()) }, ThaiprepStatus::InvalidUtf8);
    unsafe { thaiprep_normalizer_free(n) };
    unsafe { thaiprep_normalizer_free(ptr::null_mut()) };
    unsafe { thaiprep_string_free(ptr::null_mut()) };
}

#[test]
fn metrics_match_core() {
    let mut ppl = 0.0;
    assert_eq!(unsafe { thaiprep_perplexity(3.528132, &mut ppl) }, ThaiprepStatus::Ok);
    assert!(((ppl - 34.06028) / 34.06028).abs() < 1e-4);
    assert_eq!(unsafe { thaiprep_perplexity(-1.0, &mut ppl) }, ThaiprepStatus::InvalidArgument);

    let predicted = [1u8, 0, 1, 0, 0];
    let gold = [1u8, 0, 0, 1, 0];
    let mut prf = ThaiprepPrf::default();
    assert_eq!(
        unsafe { thaiprep_boundary_prf(predicted.as_ptr(), gold.as_ptr(), 5, &mut prf) },
        ThaiprepStatus::Ok
    );
    assert_eq!((prf.tp, prf.fp, prf.fn_), (1, 1, 1));
    assert_eq!((prf.precision, prf.recall, prf.f1), (0.5, 0.5, 0.5));

    assert_eq!(unsafe { thaiprep_boundary_prf(ptr::null(), ptr::null(), 0, &mut prf) }, ThaiprepStatus::Ok);
    assert_eq!(prf.f1, 1.0);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(thaiprep_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/thaiprep.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "thaiprep_normalizer_new",
        "thaiprep_normalize",
        "thaiprep_tokenizer_new",
        "thaiprep_tokenize_json",
        "thaiprep_tokenize_segmented",
        "thaiprep_string_free",
        "thaiprep_last_error",
        "thaiprep_perplexity",
        "thaiprep_boundary_prf",
        "typedef struct ThaiprepTokenizer ThaiprepTokenizer",
        "THAIPREP_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }

    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping header compile check");
        return;
    };
    let src = std::env::temp_dir().join(format!("thaiprep-header-{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"thaiprep.h\"\n\
         int main(void) {\n\
           ThaiprepNormalizer *n = 0;\n\
           char *out = 0;\n\
           if (thaiprep_normalizer_new(0, &n) != THAIPREP_STATUS_OK) return 1;\n\
           thaiprep_normalize(n, \"x\", &out);\n\
           thaiprep_string_free(out);\n\
           thaiprep_normalizer_free(n);\n\
           ThaiprepPrf prf;\n\
           return (int)thaiprep_boundary_prf(0, 0, 0, &prf);\n\
         }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    std::fs::remove_file(&src).ok();
    assert!(status.success(), "header does not compile as C99");
}
