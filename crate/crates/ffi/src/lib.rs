//! C ABI over the world simulator, the plan solver and the counting filter.
//!
//! Every fallible function returns a [`ReiStatus`] and writes results
//! through out-pointers. On failure a message is kept per thread and can
//! be fetched with [`rei_last_error`]. Strings handed out by this library
//! are owned by the caller and must be released with [`rei_string_free`].
//! Structured values (scenes, goals, action lists) travel as JSON.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use reibench::dataset::{filter_episode, FilterRules, RECountQuad, RELevel};
use reibench::planners::lower::lower_task;
use reibench::planners::{solve, DomainModel, DEFAULT_SEARCH_BUDGET};
use reibench::world::{check_goal, load_scene, snapshot_scene, SceneSpec, SkillAction, TaskGoal, WorldState};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReiStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON, unknown names or an invalid scene.
    InvalidArgument = 3,
    /// The action's preconditions do not hold; the world is unchanged.
    NotApplicable = 4,
    /// No plan within the search budget, or unknown scene name.
    NotFound = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Which counting thresholds [`rei_filter_accepts`] applies.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReiFilterRules {
    /// Reference thresholds.
    Printed = 0,
    /// Middle columns of the Explicit and Implicit rows exchanged; what
    /// the generator uses.
    Swapped = 1,
}

/// Opaque world state.
pub struct ReiWorld {
    state: WorldState,
}

struct Failure(ReiStatus, String);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ReiStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ReiStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal error: {msg}"));
            ReiStatus::Internal
        }
    }
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure(ReiStatus::InvalidArgument, msg.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(ReiStatus::NullPointer, format!("`{name}` is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(ReiStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

unsafe fn world_arg<'a>(p: *const ReiWorld) -> Result<&'a ReiWorld, Failure> {
    p.as_ref().ok_or_else(|| Failure(ReiStatus::NullPointer, "`world` is NULL".into()))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(ReiStatus::NullPointer, format!("`{name}` is NULL")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("library strings never contain NUL").into_raw()
}

fn parse_goal(json: &str) -> Result<TaskGoal, Failure> {
    serde_json::from_str(json).map_err(|e| invalid(format!("goal: {e}")))
}

fn boxed(state: WorldState) -> *mut ReiWorld {
    Box::into_raw(Box::new(ReiWorld { state }))
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn rei_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the calling thread's last error message, or NULL when the most
/// recent call succeeded. Free with [`rei_string_free`].
#[no_mangle]
pub extern "C" fn rei_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rei_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads one of the bundled scenes by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_from_scene(name: *const c_char, out: *mut *mut ReiWorld) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(name, "name")?;
        let spec = reibench::assets::scene(name)
            .ok_or_else(|| Failure(ReiStatus::NotFound, format!("no bundled scene `{name}`")))?;
        *out = boxed(load_scene(&spec).map_err(invalid)?);
        Ok(())
    })
}

/// Builds a world from a scene JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_from_json(json: *const c_char, out: *mut *mut ReiWorld) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = SceneSpec::from_json(str_arg(json, "json")?).map_err(invalid)?;
        *out = boxed(load_scene(&spec).map_err(invalid)?);
        Ok(())
    })
}

/// Independent copy of `world`.
///
/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_clone(world: *const ReiWorld, out: *mut *mut ReiWorld) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = boxed(world_arg(world)?.state.clone());
        Ok(())
    })
}

/// Destroys a handle. NULL is ignored.
///
/// # Safety
/// `world` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rei_world_free(world: *mut ReiWorld) {
    if !world.is_null() {
        drop(Box::from_raw(world));
    }
}

/// Current state as a scene JSON document.
///
/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_to_json(world: *const ReiWorld, out: *mut *mut c_char) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = owned_string(snapshot_scene(&world_arg(world)?.state).to_json());
        Ok(())
    })
}

/// Number of actions applied since the scene was loaded.
///
/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_step_count(world: *const ReiWorld, out: *mut u32) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = world_arg(world)?.state.step_count();
        Ok(())
    })
}

/// JSON array of every applicable action, e.g. `["GoTo(Fridge_1)", ...]`.
///
/// # Safety
/// `world` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_available_actions(world: *const ReiWorld, out: *mut *mut c_char) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let actions: Vec<String> = world_arg(world)?.state.available_actions().iter().map(|a| a.to_string()).collect();
        *out = owned_string(serde_json::to_string(&actions).expect("strings serialize"));
        Ok(())
    })
}

/// Applies one action such as `PickUp(Apple_1)` in place. Returns
/// `NotApplicable` and leaves the world unchanged when a precondition fails.
///
/// # Safety
/// `world` must be a live handle; `action` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rei_world_apply(world: *mut ReiWorld, action: *const c_char) -> ReiStatus {
    guard(|| {
        let w = world
            .as_mut()
            .ok_or_else(|| Failure(ReiStatus::NullPointer, "`world` is NULL".into()))?;
        let text = str_arg(action, "action")?;
        let a: SkillAction = text.parse().map_err(invalid)?;
        w.state = w
            .state
            .apply_action(&a)
            .map_err(|why| Failure(ReiStatus::NotApplicable, format!("{a}: {}", why.as_str())))?;
        Ok(())
    })
}

/// Whether the goal (a task goal JSON object) holds in the current state.
///
/// # Safety
/// `world` must be a live handle; `goal_json` a NUL-terminated string;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_check_goal(
    world: *const ReiWorld,
    goal_json: *const c_char,
    out: *mut bool,
) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let goal = parse_goal(str_arg(goal_json, "goal_json")?)?;
        *out = check_goal(&world_arg(world)?.state, &goal).map_err(invalid)?;
        Ok(())
    })
}

/// Shortest plan reaching the goal, as a JSON array of actions. A
/// `budget` of 0 selects the default node budget.
///
/// # Safety
/// `world` must be a live handle; `goal_json` a NUL-terminated string;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_world_solve(
    world: *const ReiWorld,
    goal_json: *const c_char,
    budget: usize,
    out: *mut *mut c_char,
) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let state = &world_arg(world)?.state;
        let goal = parse_goal(str_arg(goal_json, "goal_json")?)?;
        check_goal(state, &goal).map_err(invalid)?;
        let budget = if budget == 0 { DEFAULT_SEARCH_BUDGET } else { budget };
        let plan = solve(DomainModel::household(), &lower_task(state, &goal), budget)
            .ok_or_else(|| Failure(ReiStatus::NotFound, format!("no plan within {budget} nodes")))?;
        let steps: Vec<String> = plan.steps().iter().map(|a| a.to_string()).collect();
        *out = owned_string(serde_json::to_string(&steps).expect("strings serialize"));
        Ok(())
    })
}

/// Counting filter: whether an episode with these referring-expression
/// counts is kept for `level` (`explicit`, `mixed` or `implicit`).
///
/// # Safety
/// `level` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rei_filter_accepts(
    level: *const c_char,
    rules: ReiFilterRules,
    ctx_explicit: u32,
    ctx_implicit: u32,
    ins_explicit: u32,
    ins_implicit: u32,
    out: *mut bool,
) -> ReiStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let level: RELevel = str_arg(level, "level")?.parse().map_err(invalid)?;
        let rules = match rules {
            ReiFilterRules::Printed => FilterRules::printed(),
            ReiFilterRules::Swapped => FilterRules::swapped(),
        };
        let quad = RECountQuad::new(ctx_explicit, ctx_implicit, ins_explicit, ins_implicit);
        *out = filter_episode(quad, level, &rules);
        Ok(())
    })
}
