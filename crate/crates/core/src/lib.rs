//! Multi-agent code-as-policies bench for a simulated guide-dog robot.
//!
//! Three agent-team configurations turn natural-language requests into
//! programs in a small sandboxed robot language; the programs run against a
//! deterministic fiducial world and every attempt is measured.
//!
//! Modules, bottom up:
//!
//! - [`world`]: room, robot and fiducial simulation with an event trace
//! - [`lang`]: parser, printer, static checks and interpreter for robot programs
//! - [`agent`]: agent roles, prompts, token accounting and chat backends
//! - [`orchestrator`]: speaker selection and the review/approval loop
//! - [`bench`]: the trial definitions, run matrix and append-only record store
//! - [`feedback`]: observer ratings, aggregate reports and case-study export

pub mod agent;
pub mod bench;
pub mod feedback;
pub mod lang;
pub mod orchestrator;
pub mod world;
