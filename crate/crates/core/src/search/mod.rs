//! Processor-setting selection for a target FPS_min.
//!
//! Three routes: the binary search exactly as published (including its
//! post-loop tie rule and its quirks), a corrected variant that returns
//! the lowest-power setting whose predicted FPS meets the target, and an
//! exhaustive ground-truth scan used as the evaluation reference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::platform::{ClusterKind, ProcessorSetting};

/// Search mode selected by configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Literal,
    #[default]
    MinFeasible,
}

/// One probe recorded during a search, dumpable as JSON for debugging.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TraceStep {
    pub index: usize,
    pub predicted_fps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub index: usize,
    pub setting: ProcessorSetting,
    /// True when no setting met FPS_min and the highest-frequency
    /// setting was returned as the fallback.
    pub infeasible: bool,
    pub trace: Vec<TraceStep>,
}

/// Settings sorted by render frequency ascending, paired with a
/// predictor giving the expected FPS of each setting.
pub struct SettingTable<'a> {
    settings: Vec<ProcessorSetting>,
    predict: Box<dyn Fn(&ProcessorSetting) -> f64 + 'a>,
}

impl<'a> SettingTable<'a> {
    pub fn new(
        settings: Vec<ProcessorSetting>,
        predict: impl Fn(&ProcessorSetting) -> f64 + 'a,
    ) -> Result<Self> {
        if settings.len() < 2 {
            return Err(Error::invalid("setting table", "needs at least 2 settings"));
        }
        if !settings
            .windows(2)
            .all(|w| w[0].render_freq <= w[1].render_freq)
        {
            return Err(Error::invalid(
                "setting table",
                "settings must be sorted by render frequency ascending",
            ));
        }
        Ok(SettingTable {
            settings,
            predict: Box::new(predict),
        })
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn settings(&self) -> &[ProcessorSetting] {
        &self.settings
    }

    fn probe(&self, idx: usize, trace: &mut Vec<TraceStep>) -> f64 {
        let fps = (self.predict)(&self.settings[idx]);
        trace.push(TraceStep {
            index: idx,
            predicted_fps: fps,
        });
        fps
    }

    /// The published binary search, transcribed as written. Exact
    /// predicted matches return immediately; otherwise the post-loop
    /// rule picks between C[low+1] and C[high] by predicted-FPS
    /// distance. Out-of-range indices (the pseudocode leaves them
    /// unguarded) are clamped to [0, N-1].
    pub fn search_literal(&self, fps_min: f64) -> Result<SearchOutcome> {
        if fps_min <= 0.0 {
            return Err(Error::invalid("fps_min", "must be > 0"));
        }
        let n = self.settings.len();
        let mut trace = Vec::new();
        let mut low: isize = 0;
        let mut high: isize = n as isize - 1;
        while low <= high {
            let mid = ((low + high) / 2) as usize;
            let fps_pred = self.probe(mid, &mut trace);
            if fps_pred > fps_min {
                high = mid as isize - 1;
            } else if fps_pred < fps_min {
                low = mid as isize + 1;
            } else {
                return Ok(SearchOutcome {
                    index: mid,
                    setting: self.settings[mid],
                    infeasible: false,
                    trace,
                });
            }
        }
        let clamp = |i: isize| -> usize { i.clamp(0, n as isize - 1) as usize };
        let low_idx = clamp(low);
        let high_idx = clamp(high);
        let fps_low = self.probe(low_idx, &mut trace);
        let fps_high = self.probe(high_idx, &mut trace);
        // "Return the closest FPS setting": the next higher frequency
        // setting C[low+1] when C[low] overshoots by less than C[high]
        // undershoots.
        let index = if (fps_low - fps_min) < (fps_min - fps_high) {
            clamp(low + 1)
        } else {
            high_idx
        };
        let infeasible = low as usize >= n; // every prediction fell below fps_min
        Ok(SearchOutcome {
            index,
            setting: self.settings[index],
            infeasible,
            trace,
        })
    }

    /// Lowest-power setting whose predicted FPS meets fps_min. Binary
    /// search per cluster (prediction is monotone in frequency within a
    /// cluster); the cheaper cluster candidate wins by `power`, ties
    /// going to the little cluster. Falls back to the highest-frequency
    /// setting, flagged infeasible, when nothing qualifies.
    pub fn search_min_feasible(
        &self,
        fps_min: f64,
        power: impl Fn(&ProcessorSetting, f64) -> f64,
    ) -> Result<SearchOutcome> {
        if fps_min <= 0.0 {
            return Err(Error::invalid("fps_min", "must be > 0"));
        }
        let mut trace = Vec::new();
        let mut best: Option<(usize, f64)> = None; // (index, power)
        for kind in [ClusterKind::Little, ClusterKind::Big] {
            let cluster_idx: Vec<usize> = (0..self.settings.len())
                .filter(|&i| self.settings[i].render_cluster == kind)
                .collect();
            if cluster_idx.is_empty() {
                continue;
            }
            // binary search the cluster's monotone ladder for the first
            // feasible frequency
            let mut lo = 0usize;
            let mut hi = cluster_idx.len();
            while lo < hi {
                let mid = (lo + hi) / 2;
                let fps = self.probe(cluster_idx[mid], &mut trace);
                if fps >= fps_min {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            if lo < cluster_idx.len() {
                let idx = cluster_idx[lo];
                let fps = (self.predict)(&self.settings[idx]);
                let p = power(&self.settings[idx], fps);
                let better = match best {
                    None => true,
                    Some((best_idx, best_p)) => {
                        // strict improvement required: ties keep the
                        // earlier (little-cluster) candidate
                        p < best_p && best_idx != idx
                    }
                };
                if better {
                    best = Some((idx, p));
                }
            }
        }
        match best {
            Some((index, _)) => Ok(SearchOutcome {
                index,
                setting: self.settings[index],
                infeasible: false,
                trace,
            }),
            None => {
                let index = self.settings.len() - 1;
                Ok(SearchOutcome {
                    index,
                    setting: self.settings[index],
                    infeasible: true,
                    trace,
                })
            }
        }
    }
}

/// Linear scan over all settings using ground-truth FPS, returning the
/// minimum-energy setting that meets fps_min (highest-frequency fallback
/// otherwise). `true_fps` and `power(setting, fps)` both come from the
/// platform oracle, not the model.
pub fn exhaustive_oracle(
    settings: &[ProcessorSetting],
    fps_min: f64,
    true_fps: impl Fn(&ProcessorSetting) -> f64,
    power: impl Fn(&ProcessorSetting, f64) -> f64,
) -> Result<SearchOutcome> {
    if settings.is_empty() {
        return Err(Error::EmptyInput("exhaustive_oracle needs settings"));
    }
    if fps_min <= 0.0 {
        return Err(Error::invalid("fps_min", "must be > 0"));
    }
    let mut trace = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in settings.iter().enumerate() {
        let fps = true_fps(s);
        trace.push(TraceStep {
            index: i,
            predicted_fps: fps,
        });
        if fps >= fps_min {
            let p = power(s, fps);
            if best.is_none_or(|(_, bp)| p < bp) {
                best = Some((i, p));
            }
        }
    }
    match best {
        Some((index, _)) => Ok(SearchOutcome {
            index,
            setting: settings[index],
            infeasible: false,
            trace,
        }),
        None => Ok(SearchOutcome {
            index: settings.len() - 1,
            setting: settings[settings.len() - 1],
            infeasible: true,
            trace,
        }),
    }
}
