//! Model files shipped with the toolkit, embedded at compile time.

/// Seven-state DFWCS model starting in state 1 (processor chain).
pub const DFWCS: &str = include_str!("../../../models/dfwcs.mdl");

/// Same model starting in state 4 (PID chain).
pub const DFWCS_PID: &str = include_str!("../../../models/dfwcs_pid.mdl");

/// Two-state exponential decay, rate 0.5 per hour.
pub const TOY_TWOSTATE: &str = include_str!("../../../models/toy_twostate.mdl");
