use std::ffi::CString;
use std::ptr;

use genpos_ffi::*;

fn last_error() -> String {
    unsafe {
        let need = genpos_last_error_message(ptr::null_mut(), 0);
        let mut buf = vec![0u8; need];
        genpos_last_error_message(buf.as_mut_ptr().cast(), buf.len());
        String::from_utf8(buf[..need - 1].to_vec()).unwrap()
    }
}

fn cantor() -> *mut GenposSystem {
    let json = CString::new(
        r#"{"dim":1,"maps":[{"matrix":[[0.3333333333333333]],"offset":[0.0]},{"matrix":[[0.3333333333333333]],"offset":[0.6666666666666666]}],"hull":{"lo":[0.0],"hi":[1.0]}}"#,
    )
    .unwrap();
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { genpos_system_from_json(json.as_ptr(), &mut sys) }, GenposStatus::Ok);
    sys
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { std::ffi::CStr::from_ptr(genpos_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn cantor_pieces_are_disjoint() {
    let sys = cantor();
    unsafe {
        assert_eq!(genpos_system_len(sys), 2);
        assert_eq!(genpos_system_dim(sys), 1);
        let mut v = std::mem::MaybeUninit::<GenposVerdict>::uninit();
        let st = genpos_check_pair_disjoint(sys, [1usize].as_ptr(), 1, [2usize].as_ptr(), 1, 1e-12, 20, v.as_mut_ptr());
        assert_eq!(st, GenposStatus::Ok);
        let v = v.assume_init();
        assert_eq!(v.status, GenposSeparation::Disjoint);
        assert!(v.gap > 0.33 && v.gap <= 1.0 / 3.0 + 1e-12);
        let (mut holds, mut gap) = (0, 0.0);
        assert_eq!(genpos_check_ssc(sys, 1e-12, 20, &mut holds, &mut gap), GenposStatus::Ok);
        assert_eq!(holds, 1);
        assert!(gap > 0.33);
        genpos_system_free(sys);
    }
}

#[test]
fn comparable_words_are_a_precondition_error() {
    let sys = cantor();
    unsafe {
        let mut v = std::mem::MaybeUninit::<GenposVerdict>::uninit();
        let st = genpos_check_pair_disjoint(sys, [1usize].as_ptr(), 1, [1usize, 2].as_ptr(), 2, 1e-12, 20, v.as_mut_ptr());
        assert_eq!(st, GenposStatus::Precondition);
        assert!(!last_error().is_empty());
        genpos_system_free(sys);
    }
}

#[test]
fn family_builders_validate_parameters() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(genpos_exact_overlap_new(0.2, 0.1, &mut sys), GenposStatus::Domain);
        assert!(sys.is_null());
        assert!(last_error().starts_with("t:"));
        assert_eq!(genpos_exact_overlap_new(0.05, 0.1, &mut sys), GenposStatus::Ok);
        assert_eq!(genpos_system_len(sys), 3);
        genpos_system_free(sys);
        let mut sys = ptr::null_mut();
        assert_eq!(genpos_one_point_new(0.02, 0.011, 0.02, &mut sys), GenposStatus::Ok);
        assert_eq!(genpos_system_len(sys), 6);
        genpos_system_free(sys);
    }
}

#[test]
fn null_and_malformed_inputs() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(genpos_system_from_json(ptr::null(), &mut sys), GenposStatus::NullPointer);
        let bad = CString::new("{\"dim\":1}").unwrap();
        assert_eq!(genpos_system_from_json(bad.as_ptr(), &mut sys), GenposStatus::Descriptor);
        assert_eq!(genpos_similarity_dimension([0.5, 0.5].as_ptr(), 2, ptr::null_mut()), GenposStatus::NullPointer);
        assert_eq!(genpos_system_len(ptr::null()), 0);
        genpos_system_free(ptr::null_mut());
        let mut out = 0.0;
        assert_eq!(genpos_displacement_bound(1.0, 1.5, 0.1, &mut out), GenposStatus::Domain);
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut s = 0.0;
        assert_eq!(genpos_similarity_dimension([0.5, 0.5].as_ptr(), 2, &mut s), GenposStatus::Ok);
        assert!((s - 1.0).abs() < 1e-12);
        let mut d = 0.0;
        assert_eq!(genpos_displacement_bound(2.0, 0.5, 0.25, &mut d), GenposStatus::Ok);
        assert!((1.0..1.0 + 1e-12).contains(&d));
    }
    assert!((genpos_margin_exact_overlap(3, 0.1) - 5.609375e-3).abs() < 1e-15);
    assert!((genpos_margin_one_point(1, 0.02) - 23.0 / 105.0 * 0.02).abs() < 1e-15);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/genpos.h")).unwrap();
    for name in [
        "genpos_version",
        "genpos_last_error_message",
        "genpos_system_from_json",
        "genpos_exact_overlap_new",
        "genpos_one_point_new",
        "genpos_system_free",
        "genpos_check_pair_disjoint",
        "genpos_check_ssc",
        "genpos_similarity_dimension",
        "genpos_displacement_bound",
        "typedef struct GenposSystem GenposSystem",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
