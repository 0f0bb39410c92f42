//! Reference algorithms: greedy, oblivious local search, the linear
//! squared-weight search and the naive marginal-weight variant that can cycle.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::objective::{ObjectiveValue, Oracle};
use crate::rational::{checked_add, checked_mul, floor_multiple, integer, Rational};
use crate::search::{for_each_k_replacement, Caps};
use crate::setops;
use crate::systems::IndependenceSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineResult {
    pub solution: Vec<usize>,
    pub value: ObjectiveValue,
    /// Accepted moves (insertions for greedy).
    pub iterations: usize,
    /// `false` when the iteration cap was hit or a cycle was detected.
    pub terminated: bool,
    /// Period of the detected cycle, if any.
    pub cycle_period: Option<usize>,
    /// Every solution visited, starting with the initial one.
    pub trajectory: Vec<Vec<usize>>,
    pub oracle_calls: u64,
}

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if *epsilon <= Rational::zero() || *epsilon >= Rational::one() {
        return Err(Error::Domain(format!(
            "epsilon {epsilon} is outside (0, 1)"
        )));
    }
    Ok(())
}

/// Adds the feasible element of largest positive marginal gain (ties to the
/// smallest index) until none is left.
pub fn greedy(instance: &Instance) -> Result<BaselineResult> {
    let oracle = Oracle::new(&instance.objective);
    let mut solution: Vec<usize> = Vec::new();
    let mut value = oracle.evaluate(&solution)?;
    let mut trajectory = vec![solution.clone()];
    loop {
        let mut best: Option<(usize, ObjectiveValue)> = None;
        for e in (0..instance.n()).filter(|&e| !setops::contains(&solution, e)) {
            let candidate = setops::union(&solution, &[e]);
            if !instance.system.is_independent(&candidate)? {
                continue;
            }
            let v = oracle.evaluate(&candidate)?;
            if v > value && best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((e, v));
            }
        }
        match best {
            Some((e, v)) => {
                solution = setops::union(&solution, &[e]);
                value = v;
                trajectory.push(solution.clone());
            }
            None => break,
        }
    }
    Ok(BaselineResult {
        value,
        iterations: trajectory.len() - 1,
        solution,
        terminated: true,
        cycle_period: None,
        trajectory,
        oracle_calls: oracle.calls(),
    })
}

/// Oblivious local search over the same k-replacement neighborhood,
/// started from the greedy solution.
pub fn oblivious_ls(
    instance: &Instance,
    epsilon: &Rational,
    caps: &Caps,
) -> Result<BaselineResult> {
    let start = greedy(instance)?;
    let mut result = oblivious_ls_from(instance, &start.solution, epsilon, caps)?;
    result.oracle_calls += start.oracle_calls;
    Ok(result)
}

/// Accepts the first `(A, B)` with `f((S \ B) ∪ A) > (1 + epsilon/n) f(S)`.
pub fn oblivious_ls_from(
    instance: &Instance,
    start: &[usize],
    epsilon: &Rational,
    caps: &Caps,
) -> Result<BaselineResult> {
    check_epsilon(epsilon)?;
    let oracle = Oracle::new(&instance.objective);
    let n = instance.n().max(1) as i128;
    let factor = Rational::one() + epsilon / integer(n);
    let mut solution = setops::normalize(start.to_vec());
    if !instance.system.is_independent(&solution)? {
        return Err(Error::Precondition(
            "start solution is not independent".into(),
        ));
    }
    let mut value = oracle.evaluate(&solution)?;
    let mut trajectory = vec![solution.clone()];
    loop {
        let threshold = checked_mul(&value.get(), &factor)?;
        let current = solution.clone();
        let next = for_each_k_replacement(
            &instance.system,
            &current,
            instance.k(),
            caps,
            |add, remove| {
                let candidate = setops::union(&setops::difference(&current, remove), add);
                let v = oracle.evaluate(&candidate)?;
                if v.get() > threshold {
                    Ok(ControlFlow::Break((candidate, v)))
                } else {
                    Ok(ControlFlow::Continue(()))
                }
            },
        )?;
        match next {
            Some((s, v)) => {
                solution = s;
                value = v;
                trajectory.push(solution.clone());
            }
            None => break,
        }
    }
    Ok(BaselineResult {
        solution,
        value,
        iterations: trajectory.len() - 1,
        terminated: true,
        cycle_period: None,
        trajectory,
        oracle_calls: oracle.calls(),
    })
}

/// Squared-weight search for a linear objective with static weights rounded
/// down to multiples of `alpha = w(S_init) epsilon / n`.
pub fn linear_nols(instance: &Instance, epsilon: &Rational, caps: &Caps) -> Result<BaselineResult> {
    check_epsilon(epsilon)?;
    let linear = instance
        .objective
        .as_linear()
        .ok_or_else(|| Error::Precondition("linear_nols needs a linear objective".into()))?;
    let n = instance.n();
    if n == 0 {
        return Err(Error::Domain("ground set is empty".into()));
    }
    let oracle = Oracle::new(&instance.objective);
    let init = crate::search::init_solution(instance, &oracle)?;
    let mut solution = init.set;
    let mut trajectory = vec![solution.clone()];
    let top = init.value.get();
    if top.is_zero() {
        let value = oracle.evaluate(&solution)?;
        return Ok(BaselineResult {
            solution,
            value,
            iterations: 0,
            terminated: true,
            cycle_period: None,
            trajectory,
            oracle_calls: oracle.calls(),
        });
    }
    let alpha = checked_mul(&top, epsilon)? / integer(n as i128);
    let units = (0..n)
        .map(|e| floor_multiple(&linear.weight(e), &alpha))
        .collect::<Result<Vec<u64>>>()?;
    let sq = |set: &[usize]| -> u128 { set.iter().map(|&e| (units[e] as u128).pow(2)).sum() };

    loop {
        let current = solution.clone();
        let next = for_each_k_replacement(
            &instance.system,
            &current,
            instance.k(),
            caps,
            |add, remove| {
                if sq(add) > sq(remove) {
                    Ok(ControlFlow::Break(setops::union(
                        &setops::difference(&current, remove),
                        add,
                    )))
                } else {
                    Ok(ControlFlow::Continue(()))
                }
            },
        )?;
        match next {
            Some(s) => {
                solution = s;
                trajectory.push(solution.clone());
            }
            None => break,
        }
    }
    let value = oracle.evaluate(&solution)?;
    Ok(BaselineResult {
        solution,
        value,
        iterations: trajectory.len() - 1,
        terminated: true,
        cycle_period: None,
        trajectory,
        oracle_calls: oracle.calls(),
    })
}

/// `w(e) = f(S + e) - f(S - e)` for every ground element.
pub fn naive_weights(oracle: &Oracle, s: &[usize]) -> Result<Vec<Rational>> {
    let s = setops::normalize(s.to_vec());
    let fs = oracle.evaluate(&s)?;
    (0..oracle.ground_size())
        .map(|e| {
            if setops::contains(&s, e) {
                let without = setops::difference(&s, &[e]);
                Ok(fs.checked_sub(&oracle.evaluate(&without)?)?.get())
            } else {
                Ok(oracle
                    .evaluate(&setops::union(&s, &[e]))?
                    .checked_sub(&fs)?
                    .get())
            }
        })
        .collect()
}

fn squared_weight(weights: &[Rational], set: &[usize]) -> Result<Rational> {
    set.iter().try_fold(Rational::zero(), |acc, &e| {
        checked_add(&acc, &checked_mul(&weights[e], &weights[e])?)
    })
}

/// The marginal-weight variant: weights are recomputed from the current
/// solution each iteration and the replacement with the largest squared
/// weight gain is applied. Stops at a fixpoint, at `max_iters`, or when a
/// solution repeats.
pub fn naive_marginal_nols(
    instance: &Instance,
    start: Option<&[usize]>,
    max_iters: usize,
    caps: &Caps,
) -> Result<BaselineResult> {
    if max_iters == 0 {
        return Err(Error::Precondition("max_iters must be at least 1".into()));
    }
    let oracle = Oracle::new(&instance.objective);
    let mut solution = match start {
        Some(s) => setops::normalize(s.to_vec()),
        None => {
            let init = crate::search::init_solution(instance, &oracle)?;
            init.set
        }
    };
    if !instance.system.is_independent(&solution)? {
        return Err(Error::Precondition(
            "start solution is not independent".into(),
        ));
    }
    let mut visited: HashMap<Vec<usize>, usize> = HashMap::new();
    visited.insert(solution.clone(), 0);
    let mut trajectory = vec![solution.clone()];
    let mut terminated = false;
    let mut cycle_period = None;
    let mut iterations = 0;

    for it in 1..=max_iters {
        let weights = naive_weights(&oracle, &solution)?;
        let current = solution.clone();
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for_each_k_replacement::<(), _>(
            &instance.system,
            &current,
            instance.k(),
            caps,
            |add, remove| {
                let gain = squared_weight(&weights, add)? - squared_weight(&weights, remove)?;
                if gain > Rational::zero() && best.as_ref().is_none_or(|(g, _)| gain > *g) {
                    best = Some((
                        gain,
                        setops::union(&setops::difference(&current, remove), add),
                    ));
                }
                Ok(ControlFlow::Continue(()))
            },
        )?;
        let Some((_, next)) = best else {
            terminated = true;
            break;
        };
        iterations = it;
        solution = next;
        trajectory.push(solution.clone());
        if let Some(&seen) = visited.get(&solution) {
            cycle_period = Some(it - seen);
            break;
        }
        visited.insert(solution.clone(), it);
    }
    let value = oracle.evaluate(&solution)?;
    Ok(BaselineResult {
        solution,
        value,
        iterations,
        terminated,
        cycle_period,
        trajectory,
        oracle_calls: oracle.calls(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::objective::{LinearObjective, Objective};
    use crate::rational::rational;
    use crate::systems::{ExplicitSystem, System};

    fn single_basis_linear() -> Instance {
        Instance::new(
            "single",
            vec!["a".into(), "b".into(), "c".into()],
            System::Explicit(ExplicitSystem::new(3, vec![vec![0, 2]], 2).unwrap()),
            Objective::Linear(
                LinearObjective::new(vec![integer(4), integer(9), integer(1)]).unwrap(),
            ),
        )
        .unwrap()
    }

    #[test]
    fn greedy_on_two_bases() {
        let r = greedy(&fixtures::two_bases()).unwrap();
        assert_eq!(r.solution, vec![0, 1]);
        assert_eq!(r.value, ObjectiveValue::from_integer(3));
        assert_eq!(r.trajectory, vec![vec![], vec![0], vec![0, 1]]);
    }

    #[test]
    fn greedy_on_empty_ground_set() {
        let inst = Instance::new(
            "empty",
            vec![],
            System::Explicit(ExplicitSystem::new(0, vec![], 1).unwrap()),
            Objective::Linear(LinearObjective::new(vec![]).unwrap()),
        )
        .unwrap();
        let r = greedy(&inst).unwrap();
        assert!(r.solution.is_empty());
        assert!(r.value.is_zero());
    }

    #[test]
    fn greedy_on_single_basis() {
        assert_eq!(greedy(&single_basis_linear()).unwrap().solution, vec![0, 2]);
    }

    #[test]
    fn oblivious_on_two_bases() {
        let r = oblivious_ls(&fixtures::two_bases(), &rational(1, 2), &Caps::default()).unwrap();
        assert_eq!(r.value, ObjectiveValue::from_integer(3));
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn oblivious_from_optimum_makes_no_moves() {
        let inst = single_basis_linear();
        let r = oblivious_ls_from(&inst, &[0, 2], &rational(1, 4), &Caps::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.solution, vec![0, 2]);
    }

    #[test]
    fn linear_nols_single_element() {
        let inst = Instance::new(
            "one",
            vec!["a".into()],
            System::Explicit(ExplicitSystem::new(1, vec![vec![0]], 1).unwrap()),
            Objective::Linear(LinearObjective::new(vec![integer(3)]).unwrap()),
        )
        .unwrap();
        let r = linear_nols(&inst, &rational(1, 2), &Caps::default()).unwrap();
        assert_eq!(r.solution, vec![0]);
        assert!(r.terminated);
    }

    #[test]
    fn linear_nols_rejects_coverage() {
        assert!(matches!(
            linear_nols(&fixtures::two_bases(), &rational(1, 2), &Caps::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn linear_nols_reaches_the_basis() {
        let r = linear_nols(&single_basis_linear(), &rational(1, 2), &Caps::default()).unwrap();
        assert_eq!(r.solution, vec![0, 2]);
        assert_eq!(r.value, ObjectiveValue::from_integer(5));
    }

    #[test]
    fn naive_weights_at_p() {
        let inst = fixtures::two_bases();
        let o = Oracle::new(&inst.objective);
        let w = naive_weights(&o, &[0, 1]).unwrap();
        assert_eq!(w, vec![integer(1), integer(1), integer(2), integer(2)]);
        let w = naive_weights(&o, &[2, 3]).unwrap();
        assert_eq!(w, vec![integer(2), integer(2), integer(1), integer(1)]);
    }

    #[test]
    fn naive_cycles_between_the_bases() {
        let inst = fixtures::two_bases();
        let r = naive_marginal_nols(&inst, Some(&[0, 1]), 10, &Caps::default()).unwrap();
        assert!(!r.terminated);
        assert_eq!(r.cycle_period, Some(2));
        assert_eq!(r.trajectory, vec![vec![0, 1], vec![2, 3], vec![0, 1]]);
        assert!(r.iterations <= 3);
    }

    #[test]
    fn naive_from_default_start_still_cycles() {
        let r = naive_marginal_nols(&fixtures::two_bases(), None, 10, &Caps::default()).unwrap();
        assert!(!r.terminated);
        assert!(r.cycle_period.is_some());
    }

    #[test]
    fn naive_terminates_on_single_basis() {
        let r = naive_marginal_nols(&single_basis_linear(), None, 10, &Caps::default()).unwrap();
        assert!(r.terminated);
        assert_eq!(r.solution, vec![0, 2]);
    }

    #[test]
    fn naive_iteration_cap() {
        let r = naive_marginal_nols(&fixtures::two_bases(), Some(&[0, 1]), 1, &Caps::default())
            .unwrap();
        assert!(!r.terminated);
        assert_eq!(r.cycle_period, None);
        assert_eq!(r.iterations, 1);
        assert!(naive_marginal_nols(&fixtures::two_bases(), None, 0, &Caps::default()).is_err());
    }
}
