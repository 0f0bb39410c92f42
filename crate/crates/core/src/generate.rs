//! Seeded random k-set packing instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::objective::{CoverageObjective, LinearObjective, Objective};
use crate::rational::integer;
use crate::systems::{SetPackingSystem, System};

fn check_params(n: usize, k: usize, universe_size: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if universe_size < k {
        return Err(Error::Domain(format!(
            "universe size {universe_size} is smaller than k = {k}"
        )));
    }
    if universe_size > 64 {
        return Err(Error::Domain(format!(
            "universe size {universe_size} exceeds 64 items"
        )));
    }
    Ok(())
}

fn random_sets(rng: &mut ChaCha8Rng, n: usize, k: usize, universe_size: usize) -> Vec<Vec<usize>> {
    let items: Vec<usize> = (0..universe_size).collect();
    (0..n)
        .map(|_| {
            let size = rng.gen_range(1..=k);
            let mut set: Vec<usize> = items.choose_multiple(rng, size).copied().collect();
            set.sort_unstable();
            set
        })
        .collect()
}

fn packing_system(
    sets: Vec<Vec<usize>>,
    k: usize,
    universe_size: usize,
) -> Result<(Vec<String>, System)> {
    let labels = (1..=sets.len()).map(|i| format!("e{i}")).collect();
    let items = (1..=universe_size).map(|i| format!("u{i}")).collect();
    Ok((
        labels,
        System::SetPacking(SetPackingSystem::new(items, sets, k)?),
    ))
}

/// `n` random sets over `universe_size` items, each of uniform size in
/// `1..=k`. The objective is an unweighted coverage function over a second
/// universe of the same size, where each element covers each item with
/// probability `density` (and at least one item).
pub fn generate_packing(
    n: usize,
    k: usize,
    universe_size: usize,
    density: f64,
    seed: u64,
) -> Result<Instance> {
    check_params(n, k, universe_size)?;
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Domain(format!(
            "density {density} is outside (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = random_sets(&mut rng, n, k, universe_size);
    let covers: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut cover: Vec<usize> = (0..universe_size)
                .filter(|_| rng.gen_bool(density))
                .collect();
            if cover.is_empty() {
                cover.push(rng.gen_range(0..universe_size));
            }
            cover
        })
        .collect();
    let universe = (1..=universe_size).map(|i| format!("c{i}")).collect();
    let (labels, system) = packing_system(sets, k, universe_size)?;
    let objective = Objective::Coverage(CoverageObjective::new(universe, covers, None)?);
    let name = format!("packing-n{n}-k{k}-u{universe_size}-s{seed}");
    Ok(Instance::new(name, labels, system, objective)?.with_seed(seed))
}

/// Random k-set packing with a linear objective: integer weights in
/// `1..=10`, or all ones when `unit` is set.
pub fn generate_linear_packing(
    n: usize,
    k: usize,
    universe_size: usize,
    unit: bool,
    seed: u64,
) -> Result<Instance> {
    check_params(n, k, universe_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = random_sets(&mut rng, n, k, universe_size);
    let weights = (0..n)
        .map(|_| integer(if unit { 1 } else { rng.gen_range(1..=10) }))
        .collect();
    let (labels, system) = packing_system(sets, k, universe_size)?;
    let objective = Objective::Linear(LinearObjective::new(weights)?);
    let kind = if unit { "unit" } else { "linear" };
    let name = format!("{kind}-n{n}-k{k}-u{universe_size}-s{seed}");
    Ok(Instance::new(name, labels, system, objective)?.with_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_instance, serialize_instance};
    use crate::objective::certify_monotone_submodular;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_packing(6, 2, 8, 0.4, 1).unwrap();
        let b = generate_packing(6, 2, 8, 0.4, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serialize_instance(&a).unwrap(),
            serialize_instance(&b).unwrap()
        );
        assert_ne!(a, generate_packing(6, 2, 8, 0.4, 2).unwrap());
    }

    #[test]
    fn set_sizes_are_bounded() {
        for seed in 0..20 {
            let inst = generate_packing(10, 3, 9, 0.3, seed).unwrap();
            let sys = inst.system.as_packing().unwrap();
            for e in 0..inst.n() {
                assert!((1..=3).contains(&sys.set_of(e).len()));
            }
        }
    }

    #[test]
    fn generated_objective_is_certified() {
        let inst = generate_packing(6, 2, 8, 0.4, 1).unwrap();
        assert!(certify_monotone_submodular(&inst.objective, 15)
            .unwrap()
            .passed());
    }

    #[test]
    fn generated_instances_round_trip() {
        let inst = generate_linear_packing(7, 2, 6, false, 3).unwrap();
        assert_eq!(
            parse_instance(&serialize_instance(&inst).unwrap()).unwrap(),
            inst
        );
    }

    #[test]
    fn unit_weights() {
        let inst = generate_linear_packing(5, 2, 6, true, 3).unwrap();
        assert!(inst
            .objective
            .as_linear()
            .unwrap()
            .weights()
            .iter()
            .all(|w| *w == integer(1)));
    }

    #[test]
    fn infeasible_parameters() {
        assert!(generate_packing(5, 0, 4, 0.5, 0).is_err());
        assert!(generate_packing(5, 3, 2, 0.5, 0).is_err());
        assert!(generate_packing(5, 2, 4, 0.0, 0).is_err());
        assert!(generate_packing(0, 2, 4, 0.5, 0).is_err());
    }
}
