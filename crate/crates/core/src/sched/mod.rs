//! Interaction-session replay under different frequency governors, with
//! energy accounting and QoS scoring.

mod governor;
mod session;
mod trace;

pub use governor::{
    builtin_governor_step, ebrowser_step, BuiltinKind, GovernorState, SleepDecision,
    UserRateModel,
};
pub use session::{
    compute_metrics, run_session, Governor, Metrics, PageLibrary, SessionConfig, SessionPage,
    SessionReport,
};
pub use trace::{
    generate_trace, read_trace_jsonl, write_trace_jsonl, DomSwap, EventTrace, RateProfile,
    TraceSample,
};
