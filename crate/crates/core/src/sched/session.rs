//! Session replay: drive a trace through a governor, integrate energy,
//! and score QoS against the user's FPS floor.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::governor::{builtin_governor_step, BuiltinKind, GovernorState, UserRateModel};
use super::trace::EventTrace;
use crate::dom::node_change_ratio;
use crate::error::{Error, Result};
use crate::model::ModelRegistry;
use crate::pipeline::FeatureTransform;
use crate::platform::{
    power_draw, render_utilization, true_fps_clean, ClusterKind, Gesture, PageWorkload,
    PlatformSpec, ProcessorSetting,
};
use crate::search::{exhaustive_oracle, SearchMode, SettingTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Governor {
    Ml,
    Interactive,
    Ondemand,
    Ebrowser,
    Oracle,
}

impl Governor {
    pub const ALL: [Governor; 5] = [
        Governor::Ml,
        Governor::Interactive,
        Governor::Ondemand,
        Governor::Ebrowser,
        Governor::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Governor::Ml => "ml",
            Governor::Interactive => "interactive",
            Governor::Ondemand => "ondemand",
            Governor::Ebrowser => "ebrowser",
            Governor::Oracle => "oracle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Governor::ALL.into_iter().find(|g| g.name() == s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionConfig {
    /// The user's minimum acceptable FPS.
    pub fps_min: f64,
    pub sampling_window_ms: f64,
    /// Node-count change triggering feature re-extraction on page swap.
    pub dom_change_threshold: f64,
    pub governor: Governor,
    pub search_mode: SearchMode,
    /// Headroom added to fps_min before searching, compensating for
    /// model optimism near the feasibility boundary (ml governor only).
    pub fps_margin: f64,
    /// Score QoS as the fraction of violating windows instead of the
    /// mean normalized FPS deficit.
    pub qos_count_based: bool,
    pub user_model: UserRateModel,
}

impl SessionConfig {
    pub fn new(governor: Governor) -> Self {
        SessionConfig {
            fps_min: 30.0,
            sampling_window_ms: 200.0,
            dom_change_threshold: 0.30,
            governor,
            search_mode: SearchMode::MinFeasible,
            fps_margin: 0.0,
            qos_count_based: false,
            user_model: UserRateModel::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fps_min <= 0.0 {
            return Err(Error::invalid("session config", "fps_min must be > 0"));
        }
        if self.sampling_window_ms <= 0.0 {
            return Err(Error::invalid("session config", "sampling window must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.dom_change_threshold) {
            return Err(Error::invalid("session config", "dom_change_threshold must be in [0,1]"));
        }
        if self.fps_margin < 0.0 {
            return Err(Error::invalid("session config", "fps_margin must be >= 0"));
        }
        Ok(())
    }
}

/// A page as the session sees it: extracted raw features plus the
/// derived workload complexity. `raw[0]` is the element count used for
/// swap-change detection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionPage {
    pub id: String,
    pub raw: Vec<f64>,
    pub complexity: f64,
}

impl SessionPage {
    pub fn node_count(&self) -> f64 {
        self.raw.first().copied().unwrap_or(0.0)
    }

    fn workload(&self) -> PageWorkload {
        PageWorkload {
            id: self.id.clone(),
            complexity: self.complexity,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PageLibrary {
    pages: HashMap<String, SessionPage>,
}

impl PageLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, page: SessionPage) {
        self.pages.insert(page.id.clone(), page);
    }

    pub fn get(&self, id: &str) -> Result<&SessionPage> {
        self.pages
            .get(id)
            .ok_or_else(|| Error::invalid("page library", format!("unknown page id '{id}'")))
    }

    pub fn ids(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.pages.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionReport {
    pub governor: Governor,
    pub page_id: String,
    pub gesture: Gesture,
    pub fps_min: f64,
    pub windows: usize,
    pub total_energy_j: f64,
    pub window_energy_j: Vec<f64>,
    pub window_fps: Vec<f64>,
    pub qos_violation: f64,
    /// Windows spent at each setting-table index; sums to `windows`.
    pub setting_histogram: Vec<u64>,
    pub reconfigurations: usize,
    pub overhead_ms: f64,
    pub feature_reextractions: usize,
    /// Pixels of user input discarded by the throttling baseline.
    pub dropped_px: f64,
}

const TICKS_PER_WINDOW: usize = 5;

pub fn run_session(
    trace: &EventTrace,
    cfg: &SessionConfig,
    platform: &PlatformSpec,
    registry: &ModelRegistry,
    transform: &FeatureTransform,
    pages: &PageLibrary,
) -> Result<SessionReport> {
    trace.validate()?;
    cfg.validate()?;
    pages.get(&trace.page_id)?;
    for sw in &trace.dom_swaps {
        pages.get(&sw.new_page_id)?;
    }
    let settings = platform.settings();
    let n_settings = settings.len();

    let mut report = SessionReport {
        governor: cfg.governor,
        page_id: trace.page_id.clone(),
        gesture: trace.gesture,
        fps_min: cfg.fps_min,
        windows: 0,
        total_energy_j: 0.0,
        window_energy_j: Vec::new(),
        window_fps: Vec::new(),
        qos_violation: 0.0,
        setting_histogram: vec![0; n_settings],
        reconfigurations: 0,
        overhead_ms: 0.0,
        feature_reextractions: 0,
        dropped_px: 0.0,
    };
    let duration = trace.duration_ms();
    if trace.samples.is_empty() || duration <= 0.0 {
        return Ok(report);
    }

    let model = match cfg.governor {
        Governor::Ml => Some(
            registry
                .get(trace.gesture)
                .ok_or_else(|| Error::MissingModel(trace.gesture.name().to_string()))?,
        ),
        _ => None,
    };

    // builtin governors keep rendering on the big cluster and walk its
    // frequency ladder; map ladder positions back into the full table
    let big_positions: Vec<usize> = (0..n_settings)
        .filter(|&i| settings[i].render_cluster == ClusterKind::Big)
        .collect();
    let big_ladder: Vec<f64> = big_positions.iter().map(|&i| settings[i].render_freq).collect();
    let mut gov_state = GovernorState::new(big_ladder.len().saturating_sub(1));
    let builtin_kind = match cfg.governor {
        Governor::Ondemand => BuiltinKind::Ondemand,
        _ => BuiltinKind::Interactive,
    };

    // ml feature state: principal components tracked separately from the
    // displayed page, refreshed only on large-enough swaps
    let start_page = pages.get(&trace.page_id)?;
    let mut feat_page_id = start_page.id.clone();
    let mut feat_nodes = start_page.node_count();
    let mut feat_pcs: Option<Vec<f64>> = match cfg.governor {
        Governor::Ml => Some(transform.project(&start_page.raw)?),
        _ => None,
    };
    let mut swap_cursor = 0usize;

    // decision caches: identical (feature page, rate) windows reuse the
    // searched setting, so constant-rate traces reconfigure once
    let mut ml_cache: HashMap<(String, u64), usize> = HashMap::new();
    let mut oracle_cache: HashMap<(String, u64), usize> = HashMap::new();

    let mut current: Option<usize> = match cfg.governor {
        Governor::Ml | Governor::Oracle => None,
        _ => Some(big_positions[gov_state.index]),
    };

    let n_windows = (duration / cfg.sampling_window_ms).ceil() as usize;
    let tick_ms = cfg.sampling_window_ms / TICKS_PER_WINDOW as f64;
    let mut qos_sum = 0.0;

    for w in 0..n_windows {
        let t0 = w as f64 * cfg.sampling_window_ms;
        let rate = trace.rate_at(t0);

        // swaps that took effect before this window started
        while swap_cursor < trace.dom_swaps.len()
            && trace.dom_swaps[swap_cursor].timestamp_ms <= t0
        {
            let sw = &trace.dom_swaps[swap_cursor];
            swap_cursor += 1;
            if cfg.governor == Governor::Ml {
                let new_page = pages.get(&sw.new_page_id)?;
                if node_change_ratio(feat_nodes, new_page.node_count())
                    >= cfg.dom_change_threshold
                {
                    feat_pcs = Some(transform.project(&new_page.raw)?);
                    feat_page_id = new_page.id.clone();
                    feat_nodes = new_page.node_count();
                    report.feature_reextractions += 1;
                }
            }
        }

        // window-cadence decisions (ml / oracle)
        match cfg.governor {
            Governor::Ml => {
                let key = (feat_page_id.clone(), rate.to_bits());
                let idx = match ml_cache.get(&key) {
                    Some(&i) => i,
                    None => {
                        let model = model.unwrap();
                        let pcs = feat_pcs.as_ref().unwrap();
                        let mut preds = Vec::with_capacity(n_settings);
                        for s in &settings {
                            preds.push(model.predict_fps(pcs, rate, s.render_cluster, s.render_freq)?);
                        }
                        let lookup = settings.clone();
                        let predict = move |s: &ProcessorSetting| {
                            let i = lookup.iter().position(|x| x == s).unwrap();
                            preds[i]
                        };
                        let table = SettingTable::new(settings.clone(), predict)?;
                        let target = cfg.fps_min + cfg.fps_margin;
                        let outcome = match cfg.search_mode {
                            SearchMode::Literal => table.search_literal(target)?,
                            SearchMode::MinFeasible => table.search_min_feasible(target, |s, fps| {
                                // power at the utilization the predicted
                                // FPS implies
                                let util = (platform.fps_cap / fps.max(1e-9)).min(1.0);
                                power_draw(s, platform, util)
                            })?,
                        };
                        ml_cache.insert(key, outcome.index);
                        outcome.index
                    }
                };
                apply_setting(idx, &mut current, &mut report, platform);
            }
            Governor::Oracle => {
                let truth = pages.get(trace.page_at(t0))?;
                let adj = platform.oracle.gesture_rate(trace.gesture, rate);
                let key = (truth.id.clone(), rate.to_bits());
                let idx = match oracle_cache.get(&key) {
                    Some(&i) => i,
                    None => {
                        let wl = truth.workload();
                        let outcome = exhaustive_oracle(
                            &settings,
                            cfg.fps_min,
                            |s| true_fps_clean(&wl, adj, s, platform),
                            |s, _fps| {
                                let util = render_utilization(&wl, adj, s, platform);
                                power_draw(s, platform, util)
                            },
                        )?;
                        oracle_cache.insert(key, outcome.index);
                        outcome.index
                    }
                };
                apply_setting(idx, &mut current, &mut report, platform);
            }
            _ => {}
        }

        // integrate the window in ticks; builtin governors act at their
        // own 80 ms cadence inside it
        let mut w_energy = 0.0;
        let mut fps_acc = 0.0;
        let mut n_ticks = 0usize;
        report.setting_histogram[current.unwrap()] += 1;
        let mut t = t0;
        while t < (t0 + cfg.sampling_window_ms).min(duration) - 1e-9 {
            let rate_t = trace.rate_at(t);
            let truth = pages.get(trace.page_at(t))?;
            let wl = truth.workload();
            let adj = platform.oracle.gesture_rate(trace.gesture, rate_t);

            if matches!(
                cfg.governor,
                Governor::Interactive | Governor::Ondemand | Governor::Ebrowser
            ) {
                let s = &settings[current.unwrap()];
                let obs_rate = if cfg.governor == Governor::Ebrowser {
                    adj.min(cfg.user_model.acceptable_rate(cfg.fps_min))
                } else {
                    adj
                };
                let util = render_utilization(&wl, obs_rate, s, platform);
                let idx = builtin_governor_step(builtin_kind, &mut gov_state, util, t, &big_ladder)?;
                apply_setting(big_positions[idx], &mut current, &mut report, platform);
            }

            let s = &settings[current.unwrap()];
            let dt_s = tick_ms.min(duration - t).max(0.0) / 1000.0;
            let (power, fps) = if cfg.governor == Governor::Ebrowser {
                let acceptable = cfg.user_model.acceptable_rate(cfg.fps_min);
                let eff = adj.min(acceptable);
                let active_frac = if adj > 0.0 { (eff / adj).min(1.0) } else { 1.0 };
                report.dropped_px += (adj - eff) * dt_s;
                let p_active = power_draw(s, platform, render_utilization(&wl, eff, s, platform));
                let p_idle = power_draw(s, platform, 0.0);
                // no frames are produced while the event loop sleeps, so
                // the delivered frame rate scales with the active fraction
                (
                    active_frac * p_active + (1.0 - active_frac) * p_idle,
                    active_frac * true_fps_clean(&wl, eff, s, platform),
                )
            } else {
                (
                    power_draw(s, platform, render_utilization(&wl, adj, s, platform)),
                    true_fps_clean(&wl, adj, s, platform),
                )
            };
            w_energy += power * dt_s;
            fps_acc += fps;
            n_ticks += 1;
            t += tick_ms;
        }

        let w_fps = if n_ticks > 0 { fps_acc / n_ticks as f64 } else { 0.0 };
        report.window_energy_j.push(w_energy);
        report.window_fps.push(w_fps);
        report.total_energy_j += w_energy;
        report.windows += 1;
        qos_sum += if cfg.qos_count_based {
            if w_fps < cfg.fps_min { 1.0 } else { 0.0 }
        } else {
            ((cfg.fps_min - w_fps).max(0.0)) / cfg.fps_min
        };
    }

    report.qos_violation = qos_sum / report.windows as f64;
    Ok(report)
}

fn apply_setting(
    idx: usize,
    current: &mut Option<usize>,
    report: &mut SessionReport,
    platform: &PlatformSpec,
) {
    if *current != Some(idx) {
        *current = Some(idx);
        report.reconfigurations += 1;
        report.overhead_ms += platform.reconfiguration_overhead_ms;
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Metrics {
    /// 1 - E / E_baseline; positive when this session used less energy.
    pub energy_reduction: f64,
    pub qos_violation: f64,
}

pub fn compute_metrics(report: &SessionReport, baseline: &SessionReport) -> Result<Metrics> {
    if report.page_id != baseline.page_id
        || report.gesture != baseline.gesture
        || report.windows != baseline.windows
    {
        return Err(Error::invalid(
            "metrics",
            "reports compare different traces (page/gesture/window mismatch)",
        ));
    }
    if baseline.total_energy_j <= 0.0 {
        return Err(Error::invalid("metrics", "baseline energy is zero"));
    }
    Ok(Metrics {
        energy_reduction: 1.0 - report.total_energy_j / baseline.total_energy_j,
        qos_violation: report.qos_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Activation, InputNorm, MlpModel};
    use crate::sched::trace::{generate_trace, DomSwap, RateProfile, TraceSample};

    fn platform() -> PlatformSpec {
        PlatformSpec::jetson_tx2_like()
    }

    fn library() -> PageLibrary {
        let mut lib = PageLibrary::new();
        for (id, nodes, depth, kb) in [
            ("p1", 100.0, 5.0, 40.0),
            ("p2", 130.0, 6.0, 55.0),
            ("p3", 120.0, 6.0, 50.0),
            ("p4", 300.0, 9.0, 120.0),
        ] {
            lib.add(SessionPage {
                id: id.into(),
                raw: vec![nodes, depth, kb],
                complexity: nodes * 0.01,
            });
        }
        lib
    }

    fn transform(lib: &PageLibrary) -> FeatureTransform {
        let rows: Vec<Vec<f64>> = lib.ids().iter().map(|id| lib.get(id).unwrap().raw.clone()).collect();
        FeatureTransform::fit(&rows, "test-1", 0.95, 49).unwrap()
    }

    /// Single linear layer whose output depends only on the cluster
    /// label and scaled frequency: monotone, deterministic predictions.
    fn stub_model(n_pcs: usize) -> MlpModel {
        let d = n_pcs + 3;
        let mut w = vec![0.0; d];
        w[d - 2] = 10.0; // cluster label
        w[d - 1] = 40.0; // scaled frequency
        MlpModel {
            gesture: Gesture::Scroll,
            layer_sizes: vec![d, 1],
            weights: vec![w],
            biases: vec![vec![8.0]],
            activation: Activation::Relu,
            input_norm: InputNorm { rate_min: 0.0, rate_max: 16000.0, freq_min: 0.4, freq_max: 2.0 },
            transform_version: "test-1".into(),
            final_train_loss: None,
        }
    }

    fn registry(t: &FeatureTransform) -> ModelRegistry {
        let mut r = ModelRegistry::new();
        r.insert(stub_model(t.n_components())).unwrap();
        r
    }

    fn ml_cfg() -> SessionConfig {
        SessionConfig::new(Governor::Ml)
    }

    #[test]
    fn empty_trace_zero_report() {
        let lib = library();
        let t = transform(&lib);
        let trace = EventTrace {
            gesture: Gesture::Scroll,
            page_id: "p1".into(),
            samples: vec![],
            dom_swaps: vec![],
        };
        let rep = run_session(&trace, &ml_cfg(), &platform(), &registry(&t), &t, &lib).unwrap();
        assert_eq!(rep.windows, 0);
        assert_eq!(rep.total_energy_j, 0.0);
        assert_eq!(rep.reconfigurations, 0);
    }

    #[test]
    fn constant_rate_ml_reconfigures_once() {
        let lib = library();
        let t = transform(&lib);
        let trace =
            generate_trace("p1", Gesture::Scroll, 2000.0, 100.0, RateProfile::Constant(2000.0), 0.0, 1)
                .unwrap();
        let rep = run_session(&trace, &ml_cfg(), &platform(), &registry(&t), &t, &lib).unwrap();
        assert_eq!(rep.reconfigurations, 1);
        assert_eq!(rep.windows, 10);
        assert_eq!(rep.setting_histogram.iter().sum::<u64>(), 10);
        assert_eq!(rep.overhead_ms, platform().reconfiguration_overhead_ms);
    }

    #[test]
    fn missing_model_is_an_error() {
        let lib = library();
        let t = transform(&lib);
        let trace =
            generate_trace("p1", Gesture::Pinch, 1000.0, 100.0, RateProfile::Constant(500.0), 0.0, 1)
                .unwrap();
        let err = run_session(&trace, &ml_cfg(), &platform(), &registry(&t), &t, &lib).unwrap_err();
        assert!(matches!(err, Error::MissingModel(_)));
    }

    #[test]
    fn unknown_page_is_an_error() {
        let lib = library();
        let t = transform(&lib);
        let trace =
            generate_trace("nope", Gesture::Scroll, 1000.0, 100.0, RateProfile::Constant(500.0), 0.0, 1)
                .unwrap();
        assert!(run_session(&trace, &ml_cfg(), &platform(), &registry(&t), &t, &lib).is_err());
    }

    #[test]
    fn thirty_percent_swap_triggers_reextraction() {
        let lib = library();
        let t = transform(&lib);
        let mut trace =
            generate_trace("p1", Gesture::Scroll, 2000.0, 100.0, RateProfile::Constant(2000.0), 0.0, 1)
                .unwrap();
        // p1 (100 nodes) -> p2 (130 nodes): exactly 30% change counts
        trace.dom_swaps = vec![DomSwap { timestamp_ms: 900.0, new_page_id: "p2".into() }];
        let rep = run_session(&trace, &ml_cfg(), &platform(), &registry(&t), &t, &lib).unwrap();
        assert_eq!(rep.feature_reextractions, 1);

        // p1 -> p3 (120 nodes): 20% change keeps the old features
        trace.dom_swaps = vec![DomSwap { timestamp_ms: 900.0, new_page_id: "p3".into() }];
        let rep = run_session(&trace, &ml_cfg(), &platform(), &registry(&t), &t, &lib).unwrap();
        assert_eq!(rep.feature_reextractions, 0);
    }

    #[test]
    fn energy_is_additive_across_a_split() {
        let lib = library();
        let t = transform(&lib);
        let reg = registry(&t);
        let plat = platform();
        let whole =
            generate_trace("p1", Gesture::Scroll, 2000.0, 100.0, RateProfile::Ramp { start: 200.0, end: 8000.0 }, 0.0, 3)
                .unwrap();
        for cfg in [ml_cfg(), SessionConfig::new(Governor::Oracle)] {
            let full = run_session(&whole, &cfg, &plat, &reg, &t, &lib).unwrap();
            // split at the 1,000 ms window boundary; shift the tail to 0
            let first = EventTrace {
                samples: whole.samples.iter().filter(|s| s.timestamp_ms <= 1000.0).cloned().collect(),
                ..whole.clone()
            };
            let second = EventTrace {
                samples: whole
                    .samples
                    .iter()
                    .filter(|s| s.timestamp_ms >= 1000.0)
                    .map(|s| TraceSample { timestamp_ms: s.timestamp_ms - 1000.0, rate_px_s: s.rate_px_s })
                    .collect(),
                ..whole.clone()
            };
            let a = run_session(&first, &cfg, &plat, &reg, &t, &lib).unwrap();
            let b = run_session(&second, &cfg, &plat, &reg, &t, &lib).unwrap();
            let sum = a.total_energy_j + b.total_energy_j;
            assert!(
                (sum - full.total_energy_j).abs() <= 1e-9 * full.total_energy_j,
                "{:?}: {} vs {}",
                cfg.governor,
                sum,
                full.total_energy_j
            );
            // per-window energies also add up to the total
            let wsum: f64 = full.window_energy_j.iter().sum();
            assert!((wsum - full.total_energy_j).abs() <= 1e-12 * full.total_energy_j.max(1.0));
        }
    }

    #[test]
    fn oracle_meets_fps_floor_on_feasible_trace() {
        let lib = library();
        let t = transform(&lib);
        let trace =
            generate_trace("p1", Gesture::Scroll, 2000.0, 100.0, RateProfile::Constant(1000.0), 0.0, 1)
                .unwrap();
        let cfg = SessionConfig::new(Governor::Oracle);
        let rep = run_session(&trace, &cfg, &platform(), &registry(&t), &t, &lib).unwrap();
        assert_eq!(rep.qos_violation, 0.0);
        assert!(rep.window_fps.iter().all(|&f| f >= cfg.fps_min));
    }

    #[test]
    fn throttle_baseline_beats_interactive_on_fast_input() {
        let lib = library();
        let t = transform(&lib);
        let reg = registry(&t);
        let plat = platform();
        let trace =
            generate_trace("p4", Gesture::Scroll, 2000.0, 100.0, RateProfile::Constant(16000.0), 0.0, 1)
                .unwrap();
        let e_int = run_session(&trace, &SessionConfig::new(Governor::Interactive), &plat, &reg, &t, &lib)
            .unwrap()
            .total_energy_j;
        let e_eb = run_session(&trace, &SessionConfig::new(Governor::Ebrowser), &plat, &reg, &t, &lib)
            .unwrap()
            .total_energy_j;
        assert!(e_eb < e_int, "throttled {e_eb} vs interactive {e_int}");
    }

    #[test]
    fn metrics_formulas() {
        let lib = library();
        let t = transform(&lib);
        let trace =
            generate_trace("p1", Gesture::Scroll, 1000.0, 100.0, RateProfile::Constant(500.0), 0.0, 1)
                .unwrap();
        let rep = run_session(&trace, &ml_cfg(), &platform(), &registry(&t), &t, &lib).unwrap();
        let same = compute_metrics(&rep, &rep).unwrap();
        assert_eq!(same.energy_reduction, 0.0);

        let mut a = rep.clone();
        let mut b = rep.clone();
        a.total_energy_j = 60.0;
        b.total_energy_j = 100.0;
        let m = compute_metrics(&a, &b).unwrap();
        assert!((m.energy_reduction - 0.40).abs() < 1e-12);

        b.total_energy_j = 0.0;
        assert!(compute_metrics(&a, &b).is_err());

        let mut c = rep.clone();
        c.page_id = "other".into();
        assert!(compute_metrics(&c, &rep).is_err());
    }

    #[test]
    fn windows_at_exact_floor_do_not_violate() {
        let lib = library();
        let t = transform(&lib);
        let trace =
            generate_trace("p1", Gesture::Scroll, 1000.0, 100.0, RateProfile::Constant(500.0), 0.0, 1)
                .unwrap();
        let mut cfg = SessionConfig::new(Governor::Oracle);
        let rep = run_session(&trace, &cfg, &platform(), &registry(&t), &t, &lib).unwrap();
        // any window exactly at fps_min contributes zero deficit
        cfg.fps_min = rep.window_fps.iter().cloned().fold(f64::INFINITY, f64::min);
        let deficit = ((cfg.fps_min - cfg.fps_min).max(0.0)) / cfg.fps_min;
        assert_eq!(deficit, 0.0);
    }
}
