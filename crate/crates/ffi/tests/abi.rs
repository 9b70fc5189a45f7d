use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use rankwatch_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { rw_last_error_message(buf.as_mut_ptr(), buf.len()) };
    if n == 0 {
        return String::new();
    }
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn new_game(measure: RwMeasure, n: usize, m: usize, k: usize) -> *mut RwGame {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { rw_game_new(measure, n, m, k, &mut g) }, RwStatus::Ok, "{}", last_error());
    g
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(rw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn game_shape_and_entries() {
    let g = new_game(RwMeasure::Sl, 0, 3, 1);
    let (mut a, mut o, mut s) = (0, 0, 0);
    unsafe {
        assert_eq!(rw_game_shape(g, &mut a, &mut o, &mut s), RwStatus::Ok);
        assert_eq!((a, o, s), (6, 8, 2));

        // ranking (1,2,3) with relevance 011 (objects 2 and 3 relevant): loss 2 + 3
        let mut loss = 0.0;
        assert_eq!(rw_game_loss(g, 0, 0b011, &mut loss), RwStatus::Ok);
        assert_eq!(loss, 5.0);

        let mut sym = 9;
        assert_eq!(rw_game_feedback(g, 0, 0b100, &mut sym), RwStatus::Ok);
        assert_eq!(sym, 1);

        let mut buf = [0usize; 3];
        assert_eq!(rw_game_action(g, 5, buf.as_mut_ptr(), 3), RwStatus::Ok);
        assert_eq!(buf, [2, 1, 0]);
        assert_eq!(rw_game_action(g, 0, buf.as_mut_ptr(), 2), RwStatus::BufferTooSmall);

        assert_eq!(rw_game_loss(g, 6, 0, &mut loss), RwStatus::OutOfRange);
        assert!(!last_error().is_empty());
        assert_eq!(rw_game_loss(g, 0, 8, &mut loss), RwStatus::OutOfRange);
        rw_game_free(g);
    }
}

#[test]
fn classification_through_the_abi() {
    let cases = [
        (RwMeasure::Sl, 0, 3, 1, RwRegime::Hard),
        (RwMeasure::Sl, 0, 3, 2, RwRegime::Easy),
        (RwMeasure::Pn, 2, 3, 1, RwRegime::Easy),
        (RwMeasure::Pl, 0, 1, 1, RwRegime::Trivial),
    ];
    for (measure, n, m, k, expected) in cases {
        let g = new_game(measure, n, m, k);
        let mut regime = RwRegime::Hopeless;
        unsafe {
            assert_eq!(rw_game_classify(g, &mut regime), RwStatus::Ok);
            rw_game_free(g);
        }
        assert_eq!(regime, expected, "{measure:?} m={m} k={k}");
    }
}

#[test]
fn invalid_arguments_report_errors() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(rw_game_new(RwMeasure::Sl, 0, 3, 4, &mut g), RwStatus::InvalidArgument);
        assert!(g.is_null());
        assert!(last_error().contains('4'));
        assert_eq!(rw_game_new(RwMeasure::Sl, 0, 7, 1, &mut g), RwStatus::InvalidArgument);
        assert_eq!(rw_game_new(RwMeasure::Pn, 0, 3, 1, &mut g), RwStatus::InvalidArgument);
        assert_eq!(rw_game_new(RwMeasure::Sl, 0, 3, 1, ptr::null_mut()), RwStatus::NullPointer);
        let mut loss = 0.0;
        assert_eq!(rw_game_loss(ptr::null(), 0, 0, &mut loss), RwStatus::NullPointer);
        rw_game_free(ptr::null_mut());
        rw_learner_free(ptr::null_mut());
    }
}

#[test]
fn successful_call_clears_the_error() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_ne!(rw_game_new(RwMeasure::Sl, 0, 3, 0, &mut g), RwStatus::Ok);
        assert!(!last_error().is_empty());
        assert_eq!(rw_game_new(RwMeasure::Sl, 0, 2, 1, &mut g), RwStatus::Ok);
        assert!(last_error().is_empty());
        rw_game_free(g);
    }
}

fn play(measure: RwMeasure, n: usize, m: usize, k: usize, horizon: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut l = ptr::null_mut();
    let mut played = Vec::new();
    unsafe {
        assert_eq!(rw_learner_new(measure, n, m, k, horizon, seed, &mut l), RwStatus::Ok, "{}", last_error());
        let mut buf = vec![0usize; m];
        for t in 0..horizon {
            assert_eq!(rw_learner_select(l, buf.as_mut_ptr(), m), RwStatus::Ok);
            let mut seen = buf.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..m).collect::<Vec<_>>());
            // object 0 always relevant, the rest alternate
            let bits: Vec<u8> = buf[..k].iter().map(|&o| u8::from(o == 0 || (o + t) % 2 == 0)).collect();
            assert_eq!(rw_learner_observe(l, bits.as_ptr(), k), RwStatus::Ok);
            played.push(buf.clone());
        }
        rw_learner_free(l);
    }
    played
}

#[test]
fn learners_run_and_are_seeded() {
    let a = play(RwMeasure::Pn, 1, 4, 1, 200, 7);
    let b = play(RwMeasure::Pn, 1, 4, 1, 200, 7);
    assert_eq!(a, b);
    play(RwMeasure::Sl, 0, 4, 2, 300, 0);
    let ftl = play(RwMeasure::Sl, 0, 3, 3, 50, 0);
    assert_eq!(ftl.last().unwrap()[0], 0);
}

#[test]
fn learner_protocol_errors() {
    let mut l = ptr::null_mut();
    let mut buf = [0usize; 4];
    let bit = [1u8];
    unsafe {
        assert_eq!(rw_learner_new(RwMeasure::Sl, 0, 4, 1, 0, 0, &mut l), RwStatus::InvalidArgument);
        assert_eq!(rw_learner_new(RwMeasure::Sl, 0, 4, 1, 100, 0, &mut l), RwStatus::Ok);
        assert_eq!(rw_learner_observe(l, bit.as_ptr(), 1), RwStatus::InvalidArgument);
        assert_eq!(rw_learner_select(l, buf.as_mut_ptr(), 3), RwStatus::BufferTooSmall);
        assert_eq!(rw_learner_select(l, buf.as_mut_ptr(), 4), RwStatus::Ok);
        assert_eq!(rw_learner_select(l, buf.as_mut_ptr(), 4), RwStatus::InvalidArgument);
        assert_eq!(rw_learner_observe(l, [2u8].as_ptr(), 1), RwStatus::InvalidArgument);
        assert_eq!(rw_learner_observe(l, [1u8, 0].as_ptr(), 2), RwStatus::InvalidArgument);
        assert_eq!(rw_learner_observe(l, bit.as_ptr(), 1), RwStatus::Ok);
        rw_learner_free(l);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rankwatch.h");
    assert!(header.exists(), "header not generated");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["rw_game_new", "rw_learner_observe", "RW_STATUS_OK", "typedef struct RwGame RwGame"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
