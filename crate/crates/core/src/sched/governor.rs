//! Baseline frequency-governor state machines (interactive, ondemand)
//! and the event-dropping rendering throttle used as a third baseline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinKind {
    Interactive,
    Ondemand,
}

/// Ladder position plus the timing state the governors need.
#[derive(Debug, Clone)]
pub struct GovernorState {
    pub index: usize,
    pub last_change_ms: f64,
    pub last_sample_ms: f64,
    started: bool,
}

/// interactive samples CPU load every 80 ms; raises above 85%
/// utilization, then holds off for 20 ms before changing again.
pub const INTERACTIVE_SAMPLE_MS: f64 = 80.0;
pub const INTERACTIVE_RAISE_UTIL: f64 = 0.85;
pub const INTERACTIVE_HOLDOFF_MS: f64 = 20.0;
pub const ONDEMAND_UP_UTIL: f64 = 0.80;

impl GovernorState {
    pub fn new(start_index: usize) -> Self {
        GovernorState {
            index: start_index,
            last_change_ms: f64::NEG_INFINITY,
            last_sample_ms: f64::NEG_INFINITY,
            started: false,
        }
    }
}

/// Advance a builtin governor at time `now_ms` given the render-cluster
/// utilization over the last sample period. `ladder` holds the
/// frequencies it may choose between; the new ladder index is returned
/// (and recorded in `state`). Queries arriving before the sampling
/// period (or during the post-change hold-off) leave the state
/// unchanged.
pub fn builtin_governor_step(
    kind: BuiltinKind,
    state: &mut GovernorState,
    utilization: f64,
    now_ms: f64,
    ladder: &[f64],
) -> Result<usize> {
    if ladder.is_empty() {
        return Err(Error::EmptyInput("governor ladder"));
    }
    if !(0.0..=1.0).contains(&utilization) {
        return Err(Error::invalid("utilization", "must be in [0,1]"));
    }
    state.index = state.index.min(ladder.len() - 1);
    if state.started && now_ms - state.last_sample_ms < INTERACTIVE_SAMPLE_MS {
        return Ok(state.index);
    }
    state.started = true;
    state.last_sample_ms = now_ms;
    if now_ms - state.last_change_ms < INTERACTIVE_HOLDOFF_MS {
        return Ok(state.index);
    }
    let old = state.index;
    match kind {
        BuiltinKind::Interactive => {
            if utilization > INTERACTIVE_RAISE_UTIL {
                state.index = (state.index + 1).min(ladder.len() - 1);
            } else if state.index > 0 {
                // scale the threshold down by the frequency ratio so the
                // governor only lowers when the slower clock would still
                // stay under the raise threshold
                let ratio = ladder[state.index - 1] / ladder[state.index];
                if utilization < INTERACTIVE_RAISE_UTIL * ratio {
                    state.index -= 1;
                }
            }
        }
        BuiltinKind::Ondemand => {
            if utilization > ONDEMAND_UP_UTIL {
                state.index = ladder.len() - 1;
            } else if state.index > 0 {
                state.index -= 1;
            }
        }
    }
    if state.index != old {
        state.last_change_ms = now_ms;
    }
    Ok(state.index)
}

/// Linear model of the event rate a user with a given FPS tolerance
/// accepts; rates above it get throttled by sleeping the renderer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UserRateModel {
    pub intercept_px_s: f64,
    pub slope_px_s_per_fps: f64,
}

impl Default for UserRateModel {
    fn default() -> Self {
        // tuned so a 30-FPS-tolerance user accepts ~6,000 px/s: high
        // rates are throttled, typical scrolling is untouched
        UserRateModel {
            intercept_px_s: 0.0,
            slope_px_s_per_fps: 200.0,
        }
    }
}

impl UserRateModel {
    pub fn acceptable_rate(&self, fps_min: f64) -> f64 {
        (self.intercept_px_s + self.slope_px_s_per_fps * fps_min).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SleepDecision {
    pub sleep_ms: f64,
    /// Queued events whose timestamps fall inside the sleep interval;
    /// these are discarded, the rest are processed.
    pub dropped: usize,
    pub processed: usize,
}

/// One throttle step: choose how long to put the renderer to sleep out
/// of the next `window_ms`, proportionally to how far the current event
/// rate exceeds what the user accepts, then split the queued events
/// (timestamps, time-ordered) into dropped-during-sleep and processed.
pub fn ebrowser_step(
    now_ms: f64,
    window_ms: f64,
    current_rate_px_s: f64,
    event_queue: &[f64],
    model: &UserRateModel,
    fps_min: f64,
) -> Result<SleepDecision> {
    if window_ms <= 0.0 {
        return Err(Error::invalid("window_ms", "must be > 0"));
    }
    if event_queue.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("event queue", "must be time-ordered"));
    }
    let acceptable = model.acceptable_rate(fps_min);
    let sleep_ms = if current_rate_px_s <= acceptable || current_rate_px_s <= 0.0 {
        0.0
    } else {
        window_ms * (1.0 - acceptable / current_rate_px_s)
    };
    let cutoff = now_ms + sleep_ms;
    let dropped = event_queue
        .iter()
        .filter(|&&t| t >= now_ms && t < cutoff && sleep_ms > 0.0)
        .count();
    Ok(SleepDecision {
        sleep_ms,
        dropped,
        processed: event_queue.len() - dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sustained_high_util_reaches_max() {
        let ladder = [0.6, 0.8, 1.0, 1.2, 1.4];
        let mut st = GovernorState::new(0);
        for i in 0..ladder.len() {
            let t = i as f64 * INTERACTIVE_SAMPLE_MS;
            builtin_governor_step(BuiltinKind::Interactive, &mut st, 0.90, t, &ladder).unwrap();
        }
        assert_eq!(st.index, ladder.len() - 1);
    }

    #[test]
    fn sustained_low_util_reaches_min() {
        let ladder = [0.6, 0.8, 1.0, 1.2, 1.4];
        let mut st = GovernorState::new(ladder.len() - 1);
        for i in 0..2 * ladder.len() {
            let t = i as f64 * INTERACTIVE_SAMPLE_MS;
            builtin_governor_step(BuiltinKind::Interactive, &mut st, 0.10, t, &ladder).unwrap();
        }
        assert_eq!(st.index, 0);
    }

    #[test]
    fn holdoff_blocks_immediate_requery() {
        let ladder = [0.6, 0.8, 1.0];
        let mut st = GovernorState::new(0);
        builtin_governor_step(BuiltinKind::Interactive, &mut st, 0.86, 0.0, &ladder).unwrap();
        assert_eq!(st.index, 1);
        // 10 ms later: inside both the sampling period and the hold-off
        let idx = builtin_governor_step(BuiltinKind::Interactive, &mut st, 0.86, 10.0, &ladder).unwrap();
        assert_eq!(idx, 1);
    }

    #[test]
    fn moderate_util_holds_frequency() {
        // util below raise threshold but too high for the next lower
        // clock: no movement either way
        let ladder = [1.0, 2.0];
        let mut st = GovernorState::new(1);
        for i in 0..5 {
            builtin_governor_step(BuiltinKind::Interactive, &mut st, 0.60, i as f64 * 80.0, &ladder).unwrap();
        }
        assert_eq!(st.index, 1); // 0.60 > 0.85 * (1.0/2.0)
    }

    #[test]
    fn ondemand_jumps_to_max_and_decays() {
        let ladder = [0.6, 0.8, 1.0, 1.2];
        let mut st = GovernorState::new(0);
        builtin_governor_step(BuiltinKind::Ondemand, &mut st, 0.85, 0.0, &ladder).unwrap();
        assert_eq!(st.index, 3);
        builtin_governor_step(BuiltinKind::Ondemand, &mut st, 0.10, 80.0, &ladder).unwrap();
        assert_eq!(st.index, 2);
        builtin_governor_step(BuiltinKind::Ondemand, &mut st, 0.10, 160.0, &ladder).unwrap();
        assert_eq!(st.index, 1);
    }

    #[test]
    fn utilization_out_of_range_rejected() {
        let mut st = GovernorState::new(0);
        assert!(builtin_governor_step(BuiltinKind::Interactive, &mut st, 1.2, 0.0, &[1.0]).is_err());
    }

    #[test]
    fn zero_sleep_drops_nothing() {
        let queue = [0.0, 10.0, 20.0];
        let model = UserRateModel::default();
        let d = ebrowser_step(0.0, 200.0, 100.0, &queue, &model, 30.0).unwrap();
        assert_eq!(d.sleep_ms, 0.0);
        assert_eq!(d.dropped, 0);
        assert_eq!(d.processed, 3);
    }

    #[test]
    fn sleep_spanning_three_of_ten() {
        // 10 events every 20 ms starting at t=0; acceptable rate forces
        // a sleep of 50 ms -> events at 0, 20, 40 dropped
        let queue: Vec<f64> = (0..10).map(|i| i as f64 * 20.0).collect();
        let model = UserRateModel { intercept_px_s: 0.0, slope_px_s_per_fps: 100.0 };
        // acceptable = 3000; rate 4000 gives sleep 200 * (1 - 3/4) = 50 ms
        let d = ebrowser_step(0.0, 200.0, 4000.0, &queue, &model, 30.0).unwrap();
        assert_eq!(d.sleep_ms, 50.0);
        assert_eq!(d.dropped, 3);
        assert_eq!(d.processed, 7);
    }
}
