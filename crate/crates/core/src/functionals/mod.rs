//! Term-by-term verifiers for the weighted Hardy, Rellich and CKN families.
//!
//! Every verifier maps the ball of radius `R` to the unit ball, works in the
//! reduced measure `r^(Q-1) dr` with unit sphere measure, and reports the
//! named contributions of each side together with residual or slack.

mod chains;
mod ckn;
mod context;
mod fundamental;
mod hardy;
mod limits;
mod params;
mod rellich;
mod report;
mod weighted;

pub use chains::{verify_chains, ChainSpec};
pub use ckn::{resolve_ckn_params, verify_ckn, CknExponents, CknParams};
pub use fundamental::{convexity_quotient, fundamental_inequality_suite, FundamentalReport};
pub use hardy::{
    verify_high_l2, verify_high_lp, verify_l2_identity, verify_lp_identity, verify_unified_hardy,
    HighLpMode,
};
pub use limits::verify_log_limits;
pub use params::{HardyParams, Profile, VerifyOptions};
pub use rellich::{verify_radial_lower_bound, verify_rellich_l2, verify_rellich_lp, RellichL2Kind};
pub use report::{Status, Term, VerificationReport};
pub use weighted::{verify_hardy_b, verify_hardy_c, verify_ibp_identity, BoundaryMode, OriginMode};

pub(crate) use context::{Ctx, Hint, Point};
pub(crate) use report::Builder;
