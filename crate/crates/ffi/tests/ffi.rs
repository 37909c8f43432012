// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use wentro_ffi::*;

const LOG_GOLDEN: f64 = 0.481_211_825_059_603_4;
const DIM_32: f64 = 1.349_683_820_195_577_6;

fn last_error() -> String {
    unsafe { CStr::from_ptr(wentro_last_error()) }.to_string_lossy().into_owned()
}

fn golden() -> *mut WentroPair {
    let t = [1u8, 1, 1, 0];
    let code = [0usize, 0];
    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { wentro_pair_new(2, t.as_ptr(), code.as_ptr(), &mut pair) }, WentroStatus::Ok);
    pair
}

#[test]
fn bounds_and_sums() {
    let pair = golden();
    assert_eq!(unsafe { wentro_pair_x_size(pair) }, 2);
    let mut b = WentroBounds::default();
    assert_eq!(unsafe { wentro_growth_bounds(pair, 1.0, ptr::null(), 20, &mut b) }, WentroStatus::Ok);
    assert!(b.lower <= LOG_GOLDEN + 1e-12 && LOG_GOLDEN <= b.upper + 1e-12);
    assert_eq!(b.lower_certified, 1);
    let mut z = 0.0;
    assert_eq!(unsafe { wentro_partition_sum(pair, 1.0, ptr::null(), 5, &mut z) }, WentroStatus::Ok);
    assert!((z - 13f64.ln()).abs() < 1e-12);
    let f = [0.0, 1.0];
    assert_eq!(unsafe { wentro_partition_sum(pair, 1.0, f.as_ptr(), 1, &mut z) }, WentroStatus::Ok);
    assert!((z - (1.0 + 1f64.exp()).ln()).abs() < 1e-12);
    assert!(last_error().is_empty());
    unsafe { wentro_pair_free(pair) };
}

#[test]
fn json_pairs_and_errors() {
    let json = CString::new(r#"{"alphabet_size": 2, "transitions": [[1,1],[1,1]], "code": [0,1]}"#).unwrap();
    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { wentro_pair_from_json(json.as_ptr(), &mut pair) }, WentroStatus::Ok);
    let mut b = WentroBounds::default();
    assert_eq!(unsafe { wentro_growth_bounds(pair, 0.5, ptr::null(), 4, &mut b) }, WentroStatus::Ok);
    assert!((b.upper - 2f64.ln()).abs() < 1e-12);

    assert_eq!(unsafe { wentro_growth_bounds(pair, 1.5, ptr::null(), 4, &mut b) }, WentroStatus::InvalidInput);
    assert!(last_error().contains("`w`"));
    assert_eq!(unsafe { wentro_growth_bounds(ptr::null(), 0.5, ptr::null(), 4, &mut b) }, WentroStatus::NullArgument);
    assert_eq!(unsafe { wentro_growth_bounds(pair, 0.5, ptr::null(), 4, ptr::null_mut()) }, WentroStatus::NullArgument);
    unsafe { wentro_pair_free(pair) };
    unsafe { wentro_pair_free(ptr::null_mut()) };

    let bad = CString::new(r#"{"alphabet_size": 2, "transitions": [[1,1],[1]], "code": [0,0]}"#).unwrap();
    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { wentro_pair_from_json(bad.as_ptr(), &mut pair) }, WentroStatus::InvalidInput);
    assert!(pair.is_null());
    assert!(last_error().contains("transitions[1]"));

    let t = [0u8, 1, 0, 0];
    let code = [0usize, 0];
    assert_eq!(unsafe { wentro_pair_new(2, t.as_ptr(), code.as_ptr(), &mut pair) }, WentroStatus::InvalidInput);
}

#[test]
fn carpets() {
    let digits = [0u32, 0, 1, 1, 2, 0];
    let mut d = 0.0;
    assert_eq!(unsafe { wentro_carpet_dimension(3, 2, digits.as_ptr(), 3, &mut d) }, WentroStatus::Ok);
    assert!((d - DIM_32).abs() < 1e-12);
    assert_eq!(unsafe { wentro_carpet_dimension(2, 3, digits.as_ptr(), 3, &mut d) }, WentroStatus::InvalidInput);
    assert!(last_error().contains("`a`"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/wentro.h")).unwrap();
    for name in [
        "wentro_last_error",
        "wentro_pair_from_json",
        "wentro_pair_new",
        "wentro_pair_free",
        "wentro_pair_x_size",
        "wentro_partition_sum",
        "wentro_growth_bounds",
        "wentro_carpet_dimension",
        "typedef struct WentroPair WentroPair",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "wentro.h"

int main(void) {
    unsigned char t[4] = {1, 1, 1, 0};
    size_t code[2] = {0, 0};
    WentroPair *pair = NULL;
    if (wentro_pair_new(2, t, code, &pair) != WENTRO_STATUS_OK) return 10;
    WentroBounds b;
    if (wentro_growth_bounds(pair, 1.0, NULL, 16, &b) != WENTRO_STATUS_OK) return 11;
    wentro_pair_free(pair);
    if (wentro_growth_bounds(NULL, 1.0, NULL, 16, &b) != WENTRO_STATUS_NULL_ARGUMENT) return 12;
    printf("%.12f %.12f %s\n", b.lower, b.upper, wentro_last_error());
    return 0;
}
"#;

/// Compiles and runs a C client against the header and the static library,
/// when a C compiler and the archive are available.
#[test]
fn c_client_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let archive = target.join("debug/libwentro_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("client.c");
    let exe = dir.path().join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut parts = text.split_whitespace();
    let lo: f64 = parts.next().unwrap().parse().unwrap();
    let hi: f64 = parts.next().unwrap().parse().unwrap();
    assert!(lo <= LOG_GOLDEN + 1e-11 && LOG_GOLDEN <= hi + 1e-11);
    assert!(text.contains("`pair` is null"));
}
