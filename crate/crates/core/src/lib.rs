//! Search for order-sensitive strong backdoors in mixed-binary integer programs.
//!
//! A strong backdoor is a small ordered set of binary variables such that
//! branching exclusively on those variables, in that order, proves optimality
//! or infeasibility of the instance. This crate bundles everything needed to
//! look for them at desk scale:
//!
//! * [`mip`] — instance model and MPS ingestion,
//! * [`lp`] — a bounded-variable two-phase primal simplex,
//! * [`bnb`] — restricted branch-and-bound candidate evaluation with the
//!   tree-weight completion measure, plus a full solve mode with branching
//!   priorities,
//! * [`mcts`] — the Monte Carlo tree search over ordered candidate sets,
//! * [`baselines`] — biased fractionality sampling and greedy set cover over
//!   fractional vertices,
//! * [`oracle`] — brute-force candidate enumeration for ground truth on tiny
//!   instances,
//! * [`metrics`] — shifted geometric means and paired run comparison,
//! * [`instance_gen`] — deterministic generators for crafted test families.

pub mod baselines;
pub mod bnb;
pub mod config;
pub mod instance_gen;
pub mod lp;
pub mod mcts;
pub mod metrics;
pub mod mip;
pub mod mps;
pub mod oracle;
pub(crate) mod pool;
pub mod seed;
pub mod trace;

pub use bnb::{evaluate_candidate, solve_with_priorities, Backdoor, EvalResult, SolveReport};
pub use config::{EvalLimits, Tolerances};
pub use lp::{solve_lp, BoundDelta, LpSolution, LpStatus, RootLpCache};
pub use mip::{fractional_set, lp_relaxation, ActionSpace, MipInstance};
pub use mps::{parse_mps, write_mps};
