//! C ABI over the `mechlab` library.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns an
//! [`MlStatus`]; on failure a message is available from [`ml_last_error`]
//! on the same thread. Amounts are signed 64-bit micro-units and bundles are
//! item bitmasks.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use mechlab::io::{parse_actions, parse_profile, render};
use mechlab::model::{welfare, Allocation, ItemSet, TypeProfile};
use mechlab::payments::{run_vcg_based, MechanismOutcome, PivotRule};
use mechlab::second_chance::{run_second_chance, run_second_chance_ir, Action, Appeal, Exhausted, HostAppeal};
use mechlab::wd::{AlgorithmProperty, AllocationAlgorithm, CustomAlgorithm};
use mechlab::Error;
use serde_json::Value;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Parse = 4,
    Resource = 5,
    Precondition = 6,
    Io = 7,
    OutOfRange = 8,
    Callback = 9,
    Panic = 10,
}

/// Declared or true valuations of every agent.
pub struct MlProfile {
    names: Vec<String>,
    profile: TypeProfile,
}

/// Allocation, payments and utilities of one mechanism run.
pub struct MlOutcome {
    outcome: MechanismOutcome,
    json: Value,
}

/// Declarations and appeals for the second chance mechanism.
pub struct MlActions {
    actions: Vec<Action>,
}

/// Host winner determination: fill `bundles_out[0..agents]` with one bitmask
/// per agent and return 0, or return non-zero to signal failure. Must be
/// deterministic and safe to call from several threads at once.
pub type MlAllocateCallback =
    Option<unsafe extern "C" fn(ctx: *mut c_void, profile: *const MlProfile, bundles_out: *mut u32, agents: usize) -> i32>;

/// Host appeal: inspect `input`, set `*output` to a profile made with
/// [`ml_profile_from_json`] (ownership passes to the library) or leave it
/// null to decline, report the steps spent in `*steps`, and return 0. A
/// non-zero return declines. Same threading rules as the allocator.
pub type MlAppealCallback = Option<
    unsafe extern "C" fn(ctx: *mut c_void, input: *const MlProfile, output: *mut *mut MlProfile, steps: *mut u64) -> i32,
>;

struct HostContext(*mut c_void);

// The caller promises the context may be shared across threads.
unsafe impl Send for HostContext {}
unsafe impl Sync for HostContext {}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(MlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidInput(_) => MlStatus::InvalidInput,
            Error::Resource { .. } => MlStatus::Resource,
            Error::Precondition(_) => MlStatus::Precondition,
            Error::Io(_) => MlStatus::Io,
            Error::Parse(_) => MlStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: MlStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside mechlab".into());
            MlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(MlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(MlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(MlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn store<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(MlStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

fn outcome_handle(names: Vec<String>, outcome: MechanismOutcome) -> *mut MlOutcome {
    let json = render::outcome(&outcome, &names);
    Box::into_raw(Box::new(MlOutcome { outcome, json }))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ml_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ml_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a profile in the JSON instance format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_profile_from_json(json: *const c_char, out: *mut *mut MlProfile) -> MlStatus {
    guard(|| {
        let inst = parse_profile(text(json, "json")?)?;
        let handle = Box::into_raw(Box::new(MlProfile { names: inst.names, profile: inst.profile }));
        store(out, handle, "out")
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ml_profile_free(p: *mut MlProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live profile and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_profile_agents(p: *const MlProfile, out: *mut usize) -> MlStatus {
    guard(|| store(out, handle(p, "profile")?.profile.agents(), "out"))
}

/// # Safety
/// `p` must be a live profile and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_profile_items(p: *const MlProfile, out: *mut usize) -> MlStatus {
    guard(|| store(out, handle(p, "profile")?.profile.items(), "out"))
}

/// Value of `bundle` to `agent`, in micro-units.
///
/// # Safety
/// `p` must be a live profile and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_profile_value(p: *const MlProfile, agent: usize, bundle: u32, out: *mut i64) -> MlStatus {
    guard(|| {
        let prof = &handle(p, "profile")?.profile;
        if agent >= prof.agents() {
            return Err(fail(MlStatus::OutOfRange, format!("agent {agent} out of range")));
        }
        let set = ItemSet::from_bits(bundle);
        if !set.within(prof.items()) {
            return Err(fail(MlStatus::OutOfRange, "bundle uses items outside the universe"));
        }
        store(out, prof.valuation(agent).evaluate(set).micros(), "out")
    })
}

unsafe fn read_allocation(bundles: *const u32, agents: usize) -> Result<Allocation, Failure> {
    if bundles.is_null() && agents > 0 {
        return Err(fail(MlStatus::NullPointer, "bundles is null"));
    }
    let raw = if agents == 0 { &[][..] } else { std::slice::from_raw_parts(bundles, agents) };
    Ok(Allocation::new(raw.iter().map(|&b| ItemSet::from_bits(b)).collect())?)
}

/// Total declared welfare of the allocation given as one bitmask per agent.
///
/// # Safety
/// `bundles` must point to `agents` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn ml_profile_welfare(
    p: *const MlProfile,
    bundles: *const u32,
    agents: usize,
    out: *mut i64,
) -> MlStatus {
    guard(|| {
        let prof = &handle(p, "profile")?.profile;
        let alloc = read_allocation(bundles, agents)?;
        store(out, welfare(prof, &alloc)?.micros(), "out")
    })
}

/// Runs a VCG-based mechanism with truthful declarations.
///
/// # Safety
/// Strings must be NUL-terminated, `p` live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_run_vcg(
    p: *const MlProfile,
    alg: *const c_char,
    pivot: *const c_char,
    out: *mut *mut MlOutcome,
) -> MlStatus {
    guard(|| {
        let prof = handle(p, "profile")?;
        let alg = AllocationAlgorithm::from_name(text(alg, "alg")?)?;
        let pivot = PivotRule::from_name(text(pivot, "pivot")?)?;
        let outcome = run_vcg_based(&alg, &prof.profile, &pivot, &prof.profile)?;
        store(out, outcome_handle(prof.names.clone(), outcome), "out")
    })
}

fn host_algorithm(cb: MlAllocateCallback, ctx: *mut c_void) -> Result<AllocationAlgorithm, Failure> {
    let cb = cb.ok_or_else(|| fail(MlStatus::NullPointer, "callback is null"))?;
    let ctx = Arc::new(HostContext(ctx));
    let func = move |profile: &TypeProfile| {
        let view = MlProfile { names: Vec::new(), profile: profile.clone() };
        let mut bundles = vec![0u32; profile.agents()];
        let code = unsafe { cb(ctx.0, &view, bundles.as_mut_ptr(), bundles.len()) };
        if code != 0 {
            return Err(Error::InvalidInput(format!("host allocator returned {code}")));
        }
        let alloc = Allocation::new(bundles.into_iter().map(ItemSet::from_bits).collect())?;
        profile.check_allocation(&alloc)?;
        Ok(alloc)
    };
    Ok(AllocationAlgorithm::Custom(CustomAlgorithm::new("host", AlgorithmProperty::Heuristic, Arc::new(func))))
}

/// Runs a VCG-based mechanism whose allocation comes from a host callback.
/// Pivots that need the algorithm call it on masked profiles.
///
/// # Safety
/// `pivot` must be NUL-terminated, `p` live, `out` writable, and the
/// callback must follow [`MlAllocateCallback`]'s contract.
#[no_mangle]
pub unsafe extern "C" fn ml_run_vcg_host(
    p: *const MlProfile,
    allocate: MlAllocateCallback,
    ctx: *mut c_void,
    pivot: *const c_char,
    out: *mut *mut MlOutcome,
) -> MlStatus {
    guard(|| {
        let prof = handle(p, "profile")?;
        let alg = host_algorithm(allocate, ctx)?;
        let pivot = PivotRule::from_name(text(pivot, "pivot")?)?;
        let outcome = run_vcg_based(&alg, &prof.profile, &pivot, &prof.profile)?;
        store(out, outcome_handle(prof.names.clone(), outcome), "out")
    })
}

/// Parses actions in the JSON actions format for an `items`-item universe.
///
/// # Safety
/// `json` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_actions_from_json(json: *const c_char, items: usize, out: *mut *mut MlActions) -> MlStatus {
    guard(|| {
        let actions = parse_actions(text(json, "json")?, items)?;
        store(out, Box::into_raw(Box::new(MlActions { actions })), "out")
    })
}

/// # Safety
/// `a` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ml_actions_free(a: *mut MlActions) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Replaces one agent's appeal with a host callback.
///
/// # Safety
/// `a` must be live and the callback must follow [`MlAppealCallback`]'s
/// contract for as long as the actions are used.
#[no_mangle]
pub unsafe extern "C" fn ml_actions_set_host_appeal(
    a: *mut MlActions,
    agent: usize,
    appeal: MlAppealCallback,
    ctx: *mut c_void,
) -> MlStatus {
    guard(|| {
        let actions = a.as_mut().ok_or_else(|| fail(MlStatus::NullPointer, "actions is null"))?;
        let slot = actions
            .actions
            .get_mut(agent)
            .ok_or_else(|| fail(MlStatus::OutOfRange, format!("agent {agent} out of range")))?;
        let cb = appeal.ok_or_else(|| fail(MlStatus::NullPointer, "callback is null"))?;
        let ctx = Arc::new(HostContext(ctx));
        let func = move |input: &TypeProfile, meter: &mut mechlab::second_chance::StepMeter| {
            let view = MlProfile { names: Vec::new(), profile: input.clone() };
            let mut output: *mut MlProfile = ptr::null_mut();
            let mut steps = 0u64;
            let code = unsafe { cb(ctx.0, &view, &mut output, &mut steps) };
            let result = (!output.is_null()).then(|| unsafe { Box::from_raw(output) }.profile);
            meter.charge(steps)?;
            Ok::<_, Exhausted>(if code == 0 { result } else { None })
        };
        slot.appeal = Appeal::Host(HostAppeal::new(format!("host:{agent}"), Arc::new(func)));
        Ok(())
    })
}

/// Runs the second chance mechanism. `true_types` supplies utilities; the
/// declarations come from `actions`. With `ir` set, the individually
/// rational variant is used and `pivot` is ignored.
///
/// # Safety
/// Strings must be NUL-terminated (`pivot` may be null when `ir` is set),
/// handles live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_run_second_chance(
    true_types: *const MlProfile,
    actions: *const MlActions,
    alg: *const c_char,
    pivot: *const c_char,
    time_limit: u64,
    ir: bool,
    out: *mut *mut MlOutcome,
) -> MlStatus {
    guard(|| {
        let prof = handle(true_types, "true_types")?;
        let acts = &handle(actions, "actions")?.actions;
        let alg = AllocationAlgorithm::from_name(text(alg, "alg")?)?;
        let run = if ir {
            run_second_chance_ir(&alg, acts, time_limit, &prof.profile)?
        } else {
            let pivot = PivotRule::from_name(text(pivot, "pivot")?)?;
            run_second_chance(&alg, acts, &pivot, time_limit, &prof.profile)?
        };
        store(out, outcome_handle(prof.names.clone(), run.outcome), "out")
    })
}

/// # Safety
/// `o` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ml_outcome_free(o: *mut MlOutcome) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// # Safety
/// `o` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_outcome_agents(o: *const MlOutcome, out: *mut usize) -> MlStatus {
    guard(|| store(out, handle(o, "outcome")?.outcome.allocation.agents(), "out"))
}

unsafe fn per_agent<T>(
    o: *const MlOutcome,
    agent: usize,
    out: *mut T,
    get: impl FnOnce(&MechanismOutcome, usize) -> T,
) -> MlStatus {
    guard(|| {
        let oc = &handle(o, "outcome")?.outcome;
        if agent >= oc.allocation.agents() {
            return Err(fail(MlStatus::OutOfRange, format!("agent {agent} out of range")));
        }
        store(out, get(oc, agent), "out")
    })
}

/// Bundle bitmask of `agent`.
///
/// # Safety
/// `o` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_outcome_bundle(o: *const MlOutcome, agent: usize, out: *mut u32) -> MlStatus {
    per_agent(o, agent, out, |oc, i| oc.allocation.bundle(i).bits())
}

/// Payment to `agent` in micro-units; negative means the agent pays.
///
/// # Safety
/// `o` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_outcome_payment(o: *const MlOutcome, agent: usize, out: *mut i64) -> MlStatus {
    per_agent(o, agent, out, |oc, i| oc.payments[i].micros())
}

/// Utility of `agent` in micro-units, against the true types.
///
/// # Safety
/// `o` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_outcome_utility(o: *const MlOutcome, agent: usize, out: *mut i64) -> MlStatus {
    per_agent(o, agent, out, |oc, i| oc.utilities[i].micros())
}

/// The outcome as a JSON report; release it with [`ml_string_free`].
///
/// # Safety
/// `o` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ml_outcome_to_json(o: *const MlOutcome, out: *mut *mut c_char) -> MlStatus {
    guard(|| {
        let oc = handle(o, "outcome")?;
        let s = CString::new(oc.json.to_string()).map_err(|e| fail(MlStatus::InvalidInput, e.to_string()))?;
        store(out, s.into_raw(), "out")
    })
}
