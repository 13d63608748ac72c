//! Drives the C surface exactly as a foreign caller would: raw pointers,
//! status codes, and the generated header.

// Pinned expectations keep every digit of their derivation, a few more
// than f64 retains.
#![allow(clippy::excessive_precision)]

use std::ffi::CStr;
use std::path::Path;
use std::ptr;

use forage_ffi::{
    forage_env_free, forage_env_new, forage_env_position, forage_env_render, forage_env_reset,
    forage_env_score, forage_env_step, forage_mvt_solve, forage_reward_at, forage_status_name,
    ForageEnv, ForageMvt, ForageStatus, ForageStep,
};

const ZERO_STEP: ForageStep =
    ForageStep { reward: 0.0, cue: 0.0, score: 0.0, x: 0, y: 0, in_patch: false, done: false };

fn new_env(distance: u32, episode_steps: u32, seed: u64) -> *mut ForageEnv {
    let mut env = ptr::null_mut();
    let status =
        unsafe { forage_env_new(distance, 3, 2, episode_steps, 30.0, 0.01, seed, &mut env) };
    assert_eq!(status, ForageStatus::Ok);
    assert!(!env.is_null());
    env
}

#[test]
fn reward_at_matches_the_closed_form() {
    let mut out = 0.0;
    assert_eq!(unsafe { forage_reward_at(30.0, 0.01, 1, &mut out) }, ForageStatus::Ok);
    assert_eq!(out, 29.70149501247504160722);
    assert_eq!(unsafe { forage_reward_at(30.0, 0.01, 0, &mut out) }, ForageStatus::Ok);
    assert_eq!(out, 30.0);
}

#[test]
fn reward_at_rejects_bad_arguments() {
    let mut out = 0.0;
    assert_eq!(unsafe { forage_reward_at(0.0, 0.01, 1, &mut out) }, ForageStatus::InvalidParam);
    assert_eq!(unsafe { forage_reward_at(30.0, -0.5, 1, &mut out) }, ForageStatus::InvalidParam);
    assert_eq!(
        unsafe { forage_reward_at(30.0, 0.01, 1, ptr::null_mut()) },
        ForageStatus::NullArgument
    );
}

#[test]
fn mvt_solver_reproduces_the_reference_optima() {
    let expected = [(3.0, 24, 23.589672926330405), (5.0, 30, 22.10468830853588),
        (7.0, 35, 20.988415118454594), (9.0, 40, 20.083732746300594)];
    for (travel, steps, rate) in expected {
        let mut out = ForageMvt { optimal_steps: 0, optimal_rate: 0.0 };
        assert_eq!(
            unsafe { forage_mvt_solve(30.0, 0.01, travel, 200, &mut out) },
            ForageStatus::Ok
        );
        assert_eq!(out.optimal_steps, steps);
        assert!((out.optimal_rate - rate).abs() < 1e-12);
    }
}

#[test]
fn mvt_solver_rejects_bad_arguments() {
    let mut out = ForageMvt { optimal_steps: 0, optimal_rate: 0.0 };
    assert_eq!(unsafe { forage_mvt_solve(30.0, 0.01, 3.0, 0, &mut out) }, ForageStatus::InvalidParam);
    assert_eq!(unsafe { forage_mvt_solve(30.0, 0.01, -1.0, 50, &mut out) }, ForageStatus::InvalidParam);
    assert_eq!(
        unsafe { forage_mvt_solve(30.0, 0.01, 3.0, 50, ptr::null_mut()) },
        ForageStatus::NullArgument
    );
}

#[test]
fn episode_walks_into_a_patch_and_harvests() {
    let env = new_env(3, 200, 7);
    let mut step = ZERO_STEP;
    // Spawn is mid-corridor: the first move stays outside both patches.
    assert_eq!(unsafe { forage_env_step(env, 2, &mut step) }, ForageStatus::Ok);
    assert_eq!(step.reward, 0.0);
    assert!(!step.in_patch);
    // The second step to the left crosses into the patch and harvests.
    assert_eq!(unsafe { forage_env_step(env, 2, &mut step) }, ForageStatus::Ok);
    assert!(step.in_patch);
    assert_eq!(step.reward, 29.70149501247504160722);
    assert!((step.cue - (-0.01_f64).exp()).abs() < 1e-12);
    assert_eq!(step.score, step.reward);

    let mut score = 0.0;
    assert_eq!(unsafe { forage_env_score(env, &mut score) }, ForageStatus::Ok);
    assert_eq!(score, step.score);
    let (mut x, mut y) = (0, 0);
    assert_eq!(unsafe { forage_env_position(env, &mut x, &mut y) }, ForageStatus::Ok);
    assert_eq!((x, y), (step.x, step.y));
    unsafe { forage_env_free(env) };
}

#[test]
fn step_validates_handle_action_and_out_pointer() {
    let mut step = ZERO_STEP;
    assert_eq!(
        unsafe { forage_env_step(ptr::null_mut(), 4, &mut step) },
        ForageStatus::NullArgument
    );
    let env = new_env(3, 200, 7);
    assert_eq!(unsafe { forage_env_step(env, 9, &mut step) }, ForageStatus::InvalidParam);
    assert_eq!(unsafe { forage_env_step(env, 4, ptr::null_mut()) }, ForageStatus::NullArgument);
    unsafe { forage_env_free(env) };
}

#[test]
fn stepping_past_the_budget_reports_episode_over() {
    let env = new_env(3, 1, 7);
    let mut step = ZERO_STEP;
    assert_eq!(unsafe { forage_env_step(env, 4, &mut step) }, ForageStatus::Ok);
    assert!(step.done);
    assert_eq!(unsafe { forage_env_step(env, 4, &mut step) }, ForageStatus::EpisodeOver);
    unsafe { forage_env_free(env) };
}

#[test]
fn bad_geometry_is_reported_at_construction() {
    let mut env = ptr::null_mut();
    assert_eq!(
        unsafe { forage_env_new(3, 0, 2, 200, 30.0, 0.01, 7, &mut env) },
        ForageStatus::BadGeometry
    );
    assert_eq!(
        unsafe { forage_env_new(3, 3, 2, 0, 30.0, 0.01, 7, &mut env) },
        ForageStatus::BadGeometry
    );
    assert_eq!(
        unsafe { forage_env_new(3, 3, 2, 200, 30.0, 0.01, 7, ptr::null_mut()) },
        ForageStatus::NullArgument
    );
}

#[test]
fn reset_restores_spawn_and_zeroes_the_score() {
    let env = new_env(5, 300, 11);
    let (mut x0, mut y0) = (0, 0);
    assert_eq!(unsafe { forage_env_position(env, &mut x0, &mut y0) }, ForageStatus::Ok);
    let mut step = ZERO_STEP;
    for _ in 0..8 {
        assert_eq!(unsafe { forage_env_step(env, 2, &mut step) }, ForageStatus::Ok);
    }
    assert!(step.score > 0.0);
    assert_eq!(unsafe { forage_env_reset(env, 11) }, ForageStatus::Ok);
    let mut score = f64::NAN;
    assert_eq!(unsafe { forage_env_score(env, &mut score) }, ForageStatus::Ok);
    assert_eq!(score, 0.0);
    let (mut x, mut y) = (0, 0);
    assert_eq!(unsafe { forage_env_position(env, &mut x, &mut y) }, ForageStatus::Ok);
    assert_eq!((x, y), (x0, y0));

    // Same seed, same actions: the replayed episode matches bit for bit.
    let mut replay = ZERO_STEP;
    for _ in 0..8 {
        assert_eq!(unsafe { forage_env_step(env, 2, &mut replay) }, ForageStatus::Ok);
    }
    assert_eq!(replay.score, step.score);
    assert_eq!((replay.x, replay.y), (step.x, step.y));
    unsafe { forage_env_free(env) };
}

#[test]
fn render_sizes_then_fills_a_buffer() {
    let env = new_env(3, 200, 7);
    let mut needed = 0;
    assert_eq!(
        unsafe { forage_env_render(env, ptr::null_mut(), 0, &mut needed) },
        ForageStatus::BufferTooSmall
    );
    assert!(needed > 1);
    let mut buf = vec![0_i8; needed];
    assert_eq!(
        unsafe { forage_env_render(env, buf.as_mut_ptr(), buf.len(), &mut needed) },
        ForageStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(text.len() + 1, needed);
    assert!(text.contains('\n'), "rendering spans multiple grid rows");
    unsafe { forage_env_free(env) };
}

#[test]
fn freeing_null_is_a_no_op() {
    unsafe { forage_env_free(ptr::null_mut()) };
}

#[test]
fn every_status_has_a_name() {
    let names: Vec<&str> = (0..8)
        .map(|code| unsafe { CStr::from_ptr(forage_status_name(code)) }.to_str().unwrap())
        .collect();
    assert_eq!(names[0], "ok");
    assert_eq!(names[7], "unknown status");
    assert!(names.iter().all(|name| !name.is_empty()));
}

#[test]
fn generated_header_declares_the_surface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/forage.h");
    let text = std::fs::read_to_string(header).expect("header generated at build time");
    for needle in ["ForageStatus", "ForageStep", "ForageEnv", "forage_env_step", "forage_mvt_solve"] {
        assert!(text.contains(needle), "header missing {needle}");
    }
}
