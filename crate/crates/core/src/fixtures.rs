//! Bundled instances.

use crate::instance::Instance;
use crate::objective::{CoverageObjective, Objective};
use crate::systems::{ExplicitSystem, System};

/// Text of the bundled two-bases instance in the `.kx` format.
pub const TWO_BASES_KX: &str = include_str!("../fixtures/two_bases.kx");

/// Four sets `{a,b}, {a,c}, {x,y}, {x,z}` with maximal independent sets
/// `P = {1,2}` and `Q = {3,4}`. Under marginal weights the squared-weight
/// search alternates between P and Q forever.
pub fn two_bases() -> Instance {
    let labels = ["1", "2", "3", "4"].map(String::from).to_vec();
    let universe = ["a", "b", "c", "x", "y", "z"].map(String::from).to_vec();
    let system = ExplicitSystem::new(4, vec![vec![0, 1], vec![2, 3]], 2).expect("valid bases");
    let objective = CoverageObjective::new(
        universe,
        vec![vec![0, 1], vec![0, 2], vec![3, 4], vec![3, 5]],
        None,
    )
    .expect("valid coverage");
    Instance::new(
        "two_bases",
        labels,
        System::Explicit(system),
        Objective::Coverage(objective),
    )
    .expect("consistent instance")
}
