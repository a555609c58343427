use std::ffi::{c_char, CStr, CString};
use std::ptr;

use reibench_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a library string.
fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { rei_string_free(p) };
    s
}

fn last_error() -> Option<String> {
    let p = rei_last_error();
    (!p.is_null()).then(|| take(p))
}

fn tiny() -> *mut ReiWorld {
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { rei_world_from_scene(c("tiny_3").as_ptr(), &mut w) }, ReiStatus::Ok);
    w
}

const GOAL: &str = r#"{"kind": "CoolPlace", "target": "apple", "destination": "CounterTop"}"#;

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(rei_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn apply_actions_and_reach_a_goal() {
    let w = tiny();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rei_world_available_actions(w, &mut out) }, ReiStatus::Ok);
    let actions: Vec<String> = serde_json::from_str(&take(out)).unwrap();
    assert!(actions.contains(&"GoTo(Fridge)".to_string()), "{actions:?}");

    let mut plan = ptr::null_mut();
    assert_eq!(unsafe { rei_world_solve(w, c(GOAL).as_ptr(), 0, &mut plan) }, ReiStatus::Ok);
    let plan: Vec<String> = serde_json::from_str(&take(plan)).unwrap();
    assert!(!plan.is_empty());

    let mut holds = true;
    assert_eq!(unsafe { rei_world_check_goal(w, c(GOAL).as_ptr(), &mut holds) }, ReiStatus::Ok);
    assert!(!holds);
    for step in &plan {
        assert_eq!(unsafe { rei_world_apply(w, c(step).as_ptr()) }, ReiStatus::Ok, "{step}");
    }
    assert_eq!(unsafe { rei_world_check_goal(w, c(GOAL).as_ptr(), &mut holds) }, ReiStatus::Ok);
    assert!(holds);
    let mut steps = 0;
    assert_eq!(unsafe { rei_world_step_count(w, &mut steps) }, ReiStatus::Ok);
    assert_eq!(steps as usize, plan.len());
    assert_eq!(last_error(), None);
    unsafe { rei_world_free(w) };
}

#[test]
fn inapplicable_actions_leave_the_world_alone() {
    let w = tiny();
    let mut before = ptr::null_mut();
    unsafe { rei_world_to_json(w, &mut before) };
    let before = take(before);
    // the agent is nowhere yet
    assert_eq!(unsafe { rei_world_apply(w, c("PickUp(apple)").as_ptr()) }, ReiStatus::NotApplicable);
    assert!(last_error().unwrap().contains("PickUp(apple)"));
    let mut after = ptr::null_mut();
    unsafe { rei_world_to_json(w, &mut after) };
    assert_eq!(take(after), before);
    assert_eq!(unsafe { rei_world_apply(w, c("Juggle(apple)").as_ptr()) }, ReiStatus::InvalidArgument);
    unsafe { rei_world_free(w) };
}

#[test]
fn clones_are_independent_and_json_roundtrips() {
    let w = tiny();
    let mut copy = ptr::null_mut();
    assert_eq!(unsafe { rei_world_clone(w, &mut copy) }, ReiStatus::Ok);
    assert_eq!(unsafe { rei_world_apply(copy, c("GoTo(Fridge)").as_ptr()) }, ReiStatus::Ok);
    let (mut a, mut b) = (0, 0);
    unsafe {
        rei_world_step_count(w, &mut a);
        rei_world_step_count(copy, &mut b);
    }
    assert_eq!((a, b), (0, 1));

    let mut json = ptr::null_mut();
    unsafe { rei_world_to_json(w, &mut json) };
    let json = take(json);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { rei_world_from_json(c(&json).as_ptr(), &mut again) }, ReiStatus::Ok);
    let mut json2 = ptr::null_mut();
    unsafe { rei_world_to_json(again, &mut json2) };
    assert_eq!(take(json2), json);
    unsafe {
        rei_world_free(w);
        rei_world_free(copy);
        rei_world_free(again);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { rei_world_from_scene(c("atlantis").as_ptr(), &mut w) }, ReiStatus::NotFound);
    assert!(w.is_null());
    assert!(last_error().unwrap().contains("atlantis"));

    assert_eq!(unsafe { rei_world_from_scene(ptr::null(), &mut w) }, ReiStatus::NullPointer);
    assert_eq!(unsafe { rei_world_from_json(c("{").as_ptr(), &mut w) }, ReiStatus::InvalidArgument);
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { rei_world_from_scene(bad.as_ptr().cast(), &mut w) },
        ReiStatus::InvalidUtf8
    );

    let t = tiny();
    let mut holds = false;
    let unknown = r#"{"kind": "PickPlace", "target": "ghost", "destination": "Fridge"}"#;
    assert_eq!(unsafe { rei_world_check_goal(t, c(unknown).as_ptr(), &mut holds) }, ReiStatus::InvalidArgument);
    assert_eq!(unsafe { rei_world_check_goal(t, c("[]").as_ptr(), &mut holds) }, ReiStatus::InvalidArgument);
    assert_eq!(unsafe { rei_world_check_goal(t, c(GOAL).as_ptr(), ptr::null_mut()) }, ReiStatus::NullPointer);
    let mut plan = ptr::null_mut();
    assert_eq!(unsafe { rei_world_solve(t, c(GOAL).as_ptr(), 1, &mut plan) }, ReiStatus::NotFound);
    assert!(plan.is_null());
    // a success clears the message
    assert_eq!(unsafe { rei_world_step_count(t, &mut 0) }, ReiStatus::Ok);
    assert_eq!(last_error(), None);
    unsafe {
        rei_world_free(t);
        rei_world_free(ptr::null_mut());
        rei_string_free(ptr::null_mut());
    }
}

#[test]
fn filter_thresholds() {
    let accepts = |level: &str, rules, q: [u32; 4]| {
        let mut out = false;
        let s = unsafe { rei_filter_accepts(c(level).as_ptr(), rules, q[0], q[1], q[2], q[3], &mut out) };
        assert_eq!(s, ReiStatus::Ok);
        out
    };
    assert!(accepts("explicit", ReiFilterRules::Printed, [3, 1, 0, 0]));
    assert!(!accepts("explicit", ReiFilterRules::Swapped, [3, 1, 0, 0]));
    assert!(accepts("explicit", ReiFilterRules::Swapped, [3, 0, 1, 0]));
    assert!(accepts("mixed", ReiFilterRules::Printed, [3, 0, 0, 1]));
    assert!(!accepts("implicit", ReiFilterRules::Printed, [0, 0, 2, 1]));
    let mut out = false;
    let s = unsafe { rei_filter_accepts(c("vague").as_ptr(), ReiFilterRules::Printed, 0, 0, 0, 0, &mut out) };
    assert_eq!(s, ReiStatus::InvalidArgument);
}

#[test]
fn errors_are_per_thread() {
    let mut w = ptr::null_mut();
    unsafe { rei_world_from_scene(c("atlantis").as_ptr(), &mut w) };
    std::thread::spawn(|| assert_eq!(last_error(), None)).join().unwrap();
    assert!(last_error().is_some());
}
