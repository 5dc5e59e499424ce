//! Service decomposition of monolithic systems from runtime traces.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`trace`] parses execution-trace logs and capability mappings.
//! 2. [`graph`] rebuilds caller/callee relations per capability and merges
//!    them into one weighted [`CallGraph`](graph::CallGraph).
//! 3. [`agent`] trains a PPO policy in the [`env`] assignment environment to
//!    partition methods into services, scored by [`metrics`].
//!
//! [`oracle`] provides exhaustive and hill-climbing baselines for checking
//! the learned decompositions.

pub mod agent;
pub mod env;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod synthetic;
pub mod trace;
