//! Reconstruction of layered ego-network structure from interaction logs.
//!
//! The crate turns raw communication records (windowed interaction counts or
//! timestamped event logs) into per-ego tie-strength estimates, groups each
//! ego's ties into concentric circles of decreasing intimacy with an exact
//! one-dimensional clustering, and quantifies how information flows across
//! those circles through one-hop forwarding (retweet-style) statistics.
//!
//! Modules mirror the pipeline stages:
//!
//! * [`model`] — shared data types and structural validation
//! * [`ingest`] — CSV parsers, ego eligibility, alter classification
//! * [`tie_strength`] — contact-frequency estimation from counts or events
//! * [`layering`] — optimal 1D clustering, model selection, circle construction
//! * [`diffusion`] — normalized reply/retweet frequencies and per-ring fits
//! * [`synthgen`] — seeded synthetic populations with planted structure
//! * [`pipeline`] — orchestration used by the command-line front end
//! * [`report`] — CSV/JSON renderers for the result tables
//! * [`stats`] — numeric building blocks (compensated sums, moments, CIs)

pub mod diffusion;
pub mod ingest;
pub mod layering;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synthgen;
pub mod tie_strength;
