//! C bindings for the foraging toolkit: the analytic residence-time solver
//! plus a seeded episode behind an opaque handle. Every function reports a
//! [`ForageStatus`] instead of panicking across the boundary, and writes
//! results through caller-provided out pointers.

use std::ffi::c_char;

use forage::config::CORRIDOR_MARGIN;
use forage::env::{Action, PatchEnv};
use forage::map::{build_map, WorldMap};
use forage::mvt::{optimal_residence, RewardParams};
use forage::Error;

/// Outcome of any call across the boundary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForageStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A numeric argument was outside its documented domain.
    InvalidParam = 2,
    /// The requested grid geometry cannot be built.
    BadGeometry = 3,
    /// The episode already finished; reset or free the handle.
    EpisodeOver = 4,
    /// The caller's buffer cannot hold the requested text.
    BufferTooSmall = 5,
    /// Any other failure inside the library.
    Internal = 6,
}

/// Analytic optimum written by [`forage_mvt_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ForageMvt {
    /// Residence steps per patch visit that maximize the long-run rate.
    pub optimal_steps: u32,
    /// Net intake rate achieved at that residence.
    pub optimal_rate: f64,
}

/// Snapshot written by [`forage_env_step`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ForageStep {
    /// Energy harvested by this step.
    pub reward: f64,
    /// Freshness cue of the occupied patch; 0 outside both patches.
    pub cue: f64,
    /// Cumulative episode score after this step.
    pub score: f64,
    /// Agent column after the move.
    pub x: u32,
    /// Agent row after the move.
    pub y: u32,
    /// Whether the agent now stands inside a patch.
    pub in_patch: bool,
    /// Whether the episode has finished.
    pub done: bool,
}

/// A running episode. Opaque: create with [`forage_env_new`], advance with
/// [`forage_env_step`], release with [`forage_env_free`].
pub struct ForageEnv {
    map: WorldMap,
    reward: RewardParams,
    view_radius: u32,
    env: PatchEnv,
}

fn status_of(err: &Error) -> ForageStatus {
    match err {
        Error::Param(_) | Error::Config(_) | Error::Shape(_) => ForageStatus::InvalidParam,
        Error::Geometry(_) => ForageStatus::BadGeometry,
        Error::EpisodeOver => ForageStatus::EpisodeOver,
        _ => ForageStatus::Internal,
    }
}

/// Human-readable name for a [`ForageStatus`] value; never null.
///
/// Takes the raw integer so that values forged on the C side still map to a
/// string instead of undefined behavior.
#[no_mangle]
pub extern "C" fn forage_status_name(status: u32) -> *const c_char {
    let name: &[u8] = match status {
        0 => b"ok\0",
        1 => b"null argument\0",
        2 => b"invalid parameter\0",
        3 => b"bad geometry\0",
        4 => b"episode over\0",
        5 => b"buffer too small\0",
        6 => b"internal error\0",
        _ => b"unknown status\0",
    };
    name.as_ptr().cast()
}

/// Per-visit patch yield after `steps` harvests: `peak * exp(-decay * steps)`.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn forage_reward_at(
    peak: f64,
    decay: f64,
    steps: u32,
    out: *mut f64,
) -> ForageStatus {
    if out.is_null() {
        return ForageStatus::NullArgument;
    }
    match RewardParams::new(peak, decay) {
        Ok(params) => {
            *out = params.reward_at(steps);
            ForageStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Residence steps maximizing the long-run net intake rate for one patch
/// type, scanning candidates in `1..=scan_bound`.
///
/// # Safety
/// `out` must point to a writable [`ForageMvt`].
#[no_mangle]
pub unsafe extern "C" fn forage_mvt_solve(
    peak: f64,
    decay: f64,
    travel: f64,
    scan_bound: u32,
    out: *mut ForageMvt,
) -> ForageStatus {
    if out.is_null() {
        return ForageStatus::NullArgument;
    }
    let solved = RewardParams::new(peak, decay)
        .and_then(|params| optimal_residence(&params, travel, scan_bound));
    match solved {
        Ok(solution) => {
            *out = ForageMvt {
                optimal_steps: solution.optimal_steps,
                optimal_rate: solution.optimal_rate,
            };
            ForageStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Create an episode on a two-patch corridor map.
///
/// `distance` is the travel gap between the patches, `patch_side` their
/// square side, `episode_steps` the step budget (at least 1). The handle
/// is written to `*out` and owns all episode state.
///
/// # Safety
/// `out` must point to a writable handle pointer. The returned handle must
/// be released exactly once with [`forage_env_free`].
#[no_mangle]
pub unsafe extern "C" fn forage_env_new(
    distance: u32,
    patch_side: u32,
    view_radius: u32,
    episode_steps: u32,
    peak: f64,
    decay: f64,
    seed: u64,
    out: *mut *mut ForageEnv,
) -> ForageStatus {
    if out.is_null() {
        return ForageStatus::NullArgument;
    }
    let built = build_map(distance, patch_side, CORRIDOR_MARGIN)
        .map(|map| map.with_episode_steps(episode_steps))
        .and_then(|map| {
            let reward = RewardParams::new(peak, decay)?;
            let (env, _) = PatchEnv::reset(map.clone(), reward, view_radius, seed)?;
            Ok(ForageEnv { map, reward, view_radius, env })
        });
    match built {
        Ok(handle) => {
            *out = Box::into_raw(Box::new(handle));
            ForageStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Restart the episode from spawn with a fresh seed, zeroing score, step
/// count, and both patch counters.
///
/// # Safety
/// `env` must be a live handle from [`forage_env_new`].
#[no_mangle]
pub unsafe extern "C" fn forage_env_reset(env: *mut ForageEnv, seed: u64) -> ForageStatus {
    let Some(handle) = env.as_mut() else {
        return ForageStatus::NullArgument;
    };
    match PatchEnv::reset(handle.map.clone(), handle.reward, handle.view_radius, seed) {
        Ok((fresh, _)) => {
            handle.env = fresh;
            ForageStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Advance the episode by one action and write the resulting snapshot.
///
/// `action` indexes the fixed order 0 = up, 1 = down, 2 = left, 3 = right,
/// 4 = stay.
///
/// # Safety
/// `env` must be a live handle; `out` must point to a writable
/// [`ForageStep`].
#[no_mangle]
pub unsafe extern "C" fn forage_env_step(
    env: *mut ForageEnv,
    action: u32,
    out: *mut ForageStep,
) -> ForageStatus {
    let Some(handle) = env.as_mut() else {
        return ForageStatus::NullArgument;
    };
    if out.is_null() {
        return ForageStatus::NullArgument;
    }
    let Some(action) = Action::ALL.get(action as usize).copied() else {
        return ForageStatus::InvalidParam;
    };
    match handle.env.step(action) {
        Ok(outcome) => {
            let (x, y) = handle.env.position();
            *out = ForageStep {
                reward: outcome.reward,
                cue: outcome.observation.cue,
                score: handle.env.score(),
                x,
                y,
                in_patch: outcome.observation.in_patch(),
                done: outcome.done,
            };
            ForageStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Read the cumulative episode score.
///
/// # Safety
/// `env` must be a live handle; `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn forage_env_score(env: *const ForageEnv, out: *mut f64) -> ForageStatus {
    let Some(handle) = env.as_ref() else {
        return ForageStatus::NullArgument;
    };
    if out.is_null() {
        return ForageStatus::NullArgument;
    }
    *out = handle.env.score();
    ForageStatus::Ok
}

/// Read the agent's current grid position.
///
/// # Safety
/// `env` must be a live handle; `x` and `y` must point to writable values.
#[no_mangle]
pub unsafe extern "C" fn forage_env_position(
    env: *const ForageEnv,
    x: *mut u32,
    y: *mut u32,
) -> ForageStatus {
    let Some(handle) = env.as_ref() else {
        return ForageStatus::NullArgument;
    };
    if x.is_null() || y.is_null() {
        return ForageStatus::NullArgument;
    }
    let (col, row) = handle.env.position();
    *x = col;
    *y = row;
    ForageStatus::Ok
}

/// Write the ASCII rendering of the grid into `buf`, NUL-terminated.
///
/// `*written` always receives the required capacity including the
/// terminator; pass a null `buf` (or too small a `capacity`) to size a
/// buffer first.
///
/// # Safety
/// `env` must be a live handle; `written` must point to a writable value;
/// `buf`, when non-null, must have space for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn forage_env_render(
    env: *const ForageEnv,
    buf: *mut c_char,
    capacity: usize,
    written: *mut usize,
) -> ForageStatus {
    let Some(handle) = env.as_ref() else {
        return ForageStatus::NullArgument;
    };
    if written.is_null() {
        return ForageStatus::NullArgument;
    }
    let text = handle.env.render_text();
    *written = text.len() + 1;
    if buf.is_null() || capacity < text.len() + 1 {
        return ForageStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
    *buf.add(text.len()) = 0;
    ForageStatus::Ok
}

/// Release a handle from [`forage_env_new`]. Null is a no-op.
///
/// # Safety
/// `env` must be null or a live handle, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn forage_env_free(env: *mut ForageEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}
