//! Interaction traces: time-ordered event-rate samples plus optional
//! page swaps, with a JSON-lines serialization and a synthetic
//! generator.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::platform::Gesture;
use crate::rng::substream;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TraceSample {
    pub timestamp_ms: f64,
    pub rate_px_s: f64,
}

/// Mid-session navigation to a different page.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DomSwap {
    pub timestamp_ms: f64,
    pub new_page_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EventTrace {
    pub gesture: Gesture,
    pub page_id: String,
    pub samples: Vec<TraceSample>,
    pub dom_swaps: Vec<DomSwap>,
}

impl EventTrace {
    pub fn validate(&self) -> Result<()> {
        if self.page_id.is_empty() {
            return Err(Error::invalid("trace", "page_id is empty"));
        }
        for w in self.samples.windows(2) {
            if w[1].timestamp_ms <= w[0].timestamp_ms {
                return Err(Error::invalid(
                    "trace",
                    "sample timestamps must be strictly increasing",
                ));
            }
        }
        if self
            .samples
            .iter()
            .any(|s| !(s.rate_px_s.is_finite() && s.rate_px_s >= 0.0 && s.timestamp_ms.is_finite() && s.timestamp_ms >= 0.0))
        {
            return Err(Error::invalid("trace", "rates/timestamps must be finite and >= 0"));
        }
        for w in self.dom_swaps.windows(2) {
            if w[1].timestamp_ms <= w[0].timestamp_ms {
                return Err(Error::invalid(
                    "trace",
                    "swap timestamps must be strictly increasing",
                ));
            }
        }
        Ok(())
    }

    /// Timestamp of the last sample; sessions run for this long.
    pub fn duration_ms(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.timestamp_ms)
    }

    /// Sample-and-hold event rate at time `t_ms`.
    pub fn rate_at(&self, t_ms: f64) -> f64 {
        let idx = self.samples.partition_point(|s| s.timestamp_ms <= t_ms);
        if idx == 0 {
            self.samples.first().map_or(0.0, |s| s.rate_px_s)
        } else {
            self.samples[idx - 1].rate_px_s
        }
    }

    /// Page on display at time `t_ms`, after any swaps at or before it.
    pub fn page_at(&self, t_ms: f64) -> &str {
        let idx = self.dom_swaps.partition_point(|s| s.timestamp_ms <= t_ms);
        if idx == 0 {
            &self.page_id
        } else {
            &self.dom_swaps[idx - 1].new_page_id
        }
    }
}

/// One line of the JSON-lines trace format. The first line carries the
/// header fields; subsequent lines are rate samples or page swaps.
#[derive(Debug, Serialize, Deserialize)]
struct TraceLine {
    #[serde(skip_serializing_if = "Option::is_none")]
    gesture: Option<Gesture>,
    #[serde(skip_serializing_if = "Option::is_none")]
    page_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate_px_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    swap_page_id: Option<String>,
}

pub fn write_trace_jsonl(trace: &EventTrace, mut w: impl Write) -> Result<()> {
    let header = TraceLine {
        gesture: Some(trace.gesture),
        page_id: Some(trace.page_id.clone()),
        timestamp_ms: None,
        rate_px_s: None,
        swap_page_id: None,
    };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    let mut swaps = trace.dom_swaps.iter().peekable();
    for s in &trace.samples {
        while let Some(sw) = swaps.peek() {
            if sw.timestamp_ms <= s.timestamp_ms {
                writeln!(
                    w,
                    "{}",
                    serde_json::to_string(&TraceLine {
                        gesture: None,
                        page_id: None,
                        timestamp_ms: Some(sw.timestamp_ms),
                        rate_px_s: None,
                        swap_page_id: Some(sw.new_page_id.clone()),
                    })?
                )?;
                swaps.next();
            } else {
                break;
            }
        }
        writeln!(
            w,
            "{}",
            serde_json::to_string(&TraceLine {
                gesture: None,
                page_id: None,
                timestamp_ms: Some(s.timestamp_ms),
                rate_px_s: Some(s.rate_px_s),
                swap_page_id: None,
            })?
        )?;
    }
    for sw in swaps {
        writeln!(
            w,
            "{}",
            serde_json::to_string(&TraceLine {
                gesture: None,
                page_id: None,
                timestamp_ms: Some(sw.timestamp_ms),
                rate_px_s: None,
                swap_page_id: Some(sw.new_page_id.clone()),
            })?
        )?;
    }
    Ok(())
}

pub fn read_trace_jsonl(r: impl BufRead) -> Result<EventTrace> {
    let mut lines = r.lines();
    let header: TraceLine = match lines.next() {
        Some(line) => serde_json::from_str(&line?)?,
        None => return Err(Error::EmptyInput("trace file")),
    };
    let (gesture, page_id) = match (header.gesture, header.page_id) {
        (Some(g), Some(p)) => (g, p),
        _ => return Err(Error::invalid("trace", "first line must carry gesture and page_id")),
    };
    let mut trace = EventTrace {
        gesture,
        page_id,
        samples: Vec::new(),
        dom_swaps: Vec::new(),
    };
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceLine = serde_json::from_str(&line)?;
        let ts = rec
            .timestamp_ms
            .ok_or_else(|| Error::invalid("trace", "event line missing timestamp_ms"))?;
        if let Some(page) = rec.swap_page_id {
            trace.dom_swaps.push(DomSwap {
                timestamp_ms: ts,
                new_page_id: page,
            });
        } else if let Some(rate) = rec.rate_px_s {
            trace.samples.push(TraceSample {
                timestamp_ms: ts,
                rate_px_s: rate,
            });
        } else {
            return Err(Error::invalid("trace", "event line has neither rate nor swap"));
        }
    }
    trace.validate()?;
    Ok(trace)
}

/// Shape of the synthetic rate signal over the session.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum RateProfile {
    /// Fixed rate for the whole session.
    Constant(f64),
    /// Linear sweep from start to end.
    Ramp { start: f64, end: f64 },
    /// Low base rate with a peak burst in the middle third.
    Burst { base: f64, peak: f64 },
}

/// Deterministic synthetic trace: one sample per `step_ms`, rates from
/// the profile with optional multiplicative jitter.
pub fn generate_trace(
    page_id: &str,
    gesture: Gesture,
    duration_ms: f64,
    step_ms: f64,
    profile: RateProfile,
    jitter_frac: f64,
    seed: u64,
) -> Result<EventTrace> {
    if duration_ms <= 0.0 || step_ms <= 0.0 {
        return Err(Error::invalid("trace generator", "duration and step must be > 0"));
    }
    if !(0.0..1.0).contains(&jitter_frac) {
        return Err(Error::invalid("trace generator", "jitter_frac must be in [0,1)"));
    }
    let mut rng = substream(seed, &format!("trace/{page_id}/{}", gesture.name()));
    let n = (duration_ms / step_ms).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = i as f64 * step_ms;
        let frac = t / duration_ms;
        let base = match profile {
            RateProfile::Constant(r) => r,
            RateProfile::Ramp { start, end } => start + (end - start) * frac,
            RateProfile::Burst { base, peak } => {
                if (0.33..0.66).contains(&frac) {
                    peak
                } else {
                    base
                }
            }
        };
        let jitter = if jitter_frac > 0.0 {
            1.0 + rng.gen_range(-jitter_frac..jitter_frac)
        } else {
            1.0
        };
        samples.push(TraceSample {
            timestamp_ms: t,
            rate_px_s: (base * jitter).max(0.0),
        });
    }
    let trace = EventTrace {
        gesture,
        page_id: page_id.to_string(),
        samples,
        dom_swaps: Vec::new(),
    };
    trace.validate()?;
    Ok(trace)
}
