//! Non-oblivious local search for monotone submodular maximization over
//! k-exchange systems, with baselines, an exact solver and an auditor for
//! the locality-gap argument.

pub mod baselines;
pub mod campaign;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod generate;
pub mod instance;
pub mod io;
pub mod objective;
pub mod rational;
pub mod search;
pub mod setops;
pub mod systems;

pub use error::{Error, Result};
pub use instance::Instance;
pub use objective::{CoverageObjective, LinearObjective, Objective, Oracle, SetFunction};
pub use rational::{ObjectiveValue, Rational};
pub use search::{run, AcceptanceRule, Caps, SearchConfig, SearchTrace, SolutionState};
pub use systems::{ExplicitSystem, IndependenceSystem, SetPackingSystem, System};
