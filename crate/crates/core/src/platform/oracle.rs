//! Analytic ground-truth FPS/power oracle. Stands in for hardware
//! measurement: frame cost grows with page complexity and event rate and
//! shrinks with cluster throughput times clock frequency; power is
//! static plus a cubic dynamic term.

use rand::Rng;

use super::{Gesture, PageWorkload, PlatformSpec, ProcessorSetting};
use crate::model::TrainingSample;
use crate::rng::substream;

/// Frame rendering cost in milliseconds for a page/rate pair on a
/// setting (noise-free, gesture-adjusted rate already applied).
pub fn frame_time_ms(
    page: &PageWorkload,
    event_rate: f64,
    s: &ProcessorSetting,
    platform: &PlatformSpec,
) -> f64 {
    let o = &platform.oracle;
    let cost = o.a0_base_ms + o.a1_complexity * page.complexity + o.a2_event_rate * event_rate;
    let throughput = platform.cluster(s.render_cluster).ipc_factor * s.render_freq;
    cost / throughput
}

/// Ground-truth FPS with measurement noise disabled.
pub fn true_fps_clean(
    page: &PageWorkload,
    event_rate: f64,
    s: &ProcessorSetting,
    platform: &PlatformSpec,
) -> f64 {
    let ft = frame_time_ms(page, event_rate, s, platform);
    (1000.0 / ft).min(platform.fps_cap)
}

/// Ground-truth FPS measurement: clean FPS plus gaussian noise of the
/// platform's noise_sigma, clamped to [0, fps_cap]. Deterministic given
/// the seed and the sample coordinates.
pub fn true_fps(
    page: &PageWorkload,
    event_rate: f64,
    s: &ProcessorSetting,
    platform: &PlatformSpec,
    seed: u64,
) -> f64 {
    let clean = true_fps_clean(page, event_rate, s, platform);
    let sigma = platform.oracle.noise_sigma;
    if sigma == 0.0 {
        return clean;
    }
    let key = format!(
        "oracle/{}/{}/{}/{}",
        page.id,
        event_rate.to_bits(),
        s.render_cluster.name(),
        s.render_freq.to_bits()
    );
    let mut rng = substream(seed, &key);
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let gauss = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    (clean + sigma * gauss).clamp(0.0, platform.fps_cap)
}

/// Render-cluster utilization at a setting: fraction of the frame budget
/// (1000/fps_cap ms) spent rendering, capped at 1.
pub fn render_utilization(
    page: &PageWorkload,
    event_rate: f64,
    s: &ProcessorSetting,
    platform: &PlatformSpec,
) -> f64 {
    let budget = 1000.0 / platform.fps_cap;
    (frame_time_ms(page, event_rate, s, platform) / budget).min(1.0)
}

/// Total platform power: both clusters' static power, the render
/// cluster's dynamic term at `utilization`, and the other cluster's
/// dynamic term at the fixed background utilization.
pub fn power_draw(s: &ProcessorSetting, platform: &PlatformSpec, utilization: f64) -> f64 {
    let render = platform.cluster(s.render_cluster);
    let other = platform.cluster(s.render_cluster.other());
    render.static_power_w
        + other.static_power_w
        + utilization * render.dyn_coeff_w_per_ghz3 * s.render_freq.powi(3)
        + platform.background_utilization * other.dyn_coeff_w_per_ghz3 * s.other_freq.powi(3)
}

/// One training sample per (setting, rate, page) grid point.
/// `pages` pairs each workload with its projected principal components.
pub fn generate_training_grid(
    pages: &[(PageWorkload, Vec<f64>)],
    rates: &[f64],
    platform: &PlatformSpec,
    gesture: Gesture,
    seed: u64,
) -> Vec<TrainingSample> {
    let settings = platform.settings();
    let mut samples = Vec::with_capacity(settings.len() * rates.len() * pages.len());
    for s in &settings {
        for &rate in rates {
            for (page, pcs) in pages {
                let effective = platform.oracle.gesture_rate(gesture, rate);
                let fps = true_fps(page, effective, s, platform, seed);
                samples.push(TrainingSample {
                    pcs: pcs.clone(),
                    event_rate: rate,
                    cluster: s.render_cluster,
                    frequency: s.render_freq,
                    measured_fps: fps,
                    gesture,
                });
            }
        }
    }
    samples
}

/// The 8 default event rates: a geometric ladder from 125 to 16,000 px/s.
pub fn default_event_rates() -> Vec<f64> {
    (0..8).map(|i| 125.0 * 2f64.powi(i)).collect()
}
