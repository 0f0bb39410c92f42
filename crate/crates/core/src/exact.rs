//! Exact optimum by enumeration, and an auditor that rebuilds the
//! charging argument behind the locality gap and checks every inequality
//! of it on a concrete locally optimal solution.

use std::collections::BTreeMap;
use std::io::Write;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::objective::{ObjectiveValue, Oracle, SetFunction};
use crate::rational::{checked_add, checked_mul, checked_sub, integer, rational, Rational};
use crate::search::{
    self, find_improvement, max_removed, replacement_weights, AcceptanceRule, Caps, ElementOrder,
    SearchTrace, SolutionState, WeightTable,
};
use crate::setops;
use crate::systems::{
    build_witness, verify_witness, ExchangeWitness, IndependenceSystem, SetPackingSystem,
    DEFAULT_K3_CAP,
};

pub const DEFAULT_BRUTE_CAP: usize = 20;

/// A maximum-value independent set, the lexicographically first among ties.
///
/// Depth-first over the subset lattice, skipping every superset of a
/// dependent set. Top-level branches run in parallel.
pub fn brute_force_opt(instance: &Instance, cap: usize) -> Result<(Vec<usize>, ObjectiveValue)> {
    let n = instance.n();
    if n > cap {
        return Err(Error::SizeCap {
            what: "ground set",
            size: n,
            cap,
        });
    }
    let system: &dyn IndependenceSystem = &instance.system;
    let objective: &dyn SetFunction = &instance.objective;
    let empty_value = objective.value(&[])?;
    let branches: Vec<Option<(Vec<usize>, ObjectiveValue)>> = (0..n)
        .into_par_iter()
        .map(|e| {
            let mut current = vec![e];
            if !system.is_independent(&current)? {
                return Ok(None);
            }
            let mut best = (current.clone(), objective.value(&current)?);
            descend(system, objective, &mut current, &mut best)?;
            Ok(Some(best))
        })
        .collect::<Result<_>>()?;
    let mut best = (Vec::new(), empty_value);
    for (set, value) in branches.into_iter().flatten() {
        if value > best.1 {
            best = (set, value);
        }
    }
    Ok(best)
}

fn descend(
    system: &dyn IndependenceSystem,
    objective: &dyn SetFunction,
    current: &mut Vec<usize>,
    best: &mut (Vec<usize>, ObjectiveValue),
) -> Result<()> {
    let last = *current.last().expect("nonempty branch");
    for e in last + 1..system.ground_size() {
        current.push(e);
        if system.is_independent(current)? {
            let v = objective.value(current)?;
            if v > best.1 {
                *best = (current.clone(), v);
            }
            descend(system, objective, current, best)?;
        }
        current.pop();
    }
    Ok(())
}

/// The charging structure between a solution `S` and an optimum `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionWitness {
    /// Neighborhoods in `S` of the elements of `O`.
    pub neighborhoods: ExchangeWitness,
    /// `P_x`: elements of `O` whose heaviest neighbor is `x`. Keys are all of `S`.
    pub parts: BTreeMap<usize, Vec<usize>>,
    /// `N_x`: union of the neighborhoods of `P_x`.
    pub conflicts: BTreeMap<usize, Vec<usize>>,
    /// Elements of `O` with an empty neighborhood.
    pub free: Vec<usize>,
}

impl PartitionWitness {
    pub fn part(&self, x: usize) -> &[usize] {
        self.parts.get(&x).map_or(&[], Vec::as_slice)
    }

    pub fn conflict(&self, x: usize) -> &[usize] {
        self.conflicts.get(&x).map_or(&[], Vec::as_slice)
    }
}

fn weight_of(weights: &WeightTable, e: usize) -> u64 {
    weights.get(&e).map_or(0, |w| w.0)
}

/// Assigns each `e ∈ O` to the heaviest `x ∈ Y_e` (ties to the smallest
/// index) and checks the resulting structure.
pub fn build_partition_witness(
    system: &SetPackingSystem,
    s: &[usize],
    o: &[usize],
    weights: &WeightTable,
) -> Result<PartitionWitness> {
    let s = setops::normalize(s.to_vec());
    let o = setops::normalize(o.to_vec());
    let k = system.k();
    let neighborhoods = build_witness(system, &o, &s)?;
    let mut parts: BTreeMap<usize, Vec<usize>> = s.iter().map(|&x| (x, Vec::new())).collect();
    let mut free = Vec::new();
    for &e in &o {
        let ys = neighborhoods.neighborhood(e);
        // ys is sorted, so the first maximum has the smallest index
        match ys.iter().copied().reduce(|a, b| {
            if weight_of(weights, b) > weight_of(weights, a) {
                b
            } else {
                a
            }
        }) {
            Some(x) => parts.get_mut(&x).expect("neighborhoods lie in S").push(e),
            None => free.push(e),
        }
    }
    let conflicts: BTreeMap<usize, Vec<usize>> = parts
        .iter()
        .map(|(&x, p)| {
            let n = p.iter().fold(Vec::new(), |acc, &e| {
                setops::union(&acc, neighborhoods.neighborhood(e))
            });
            (x, n)
        })
        .collect();

    let assigned: usize = parts.values().map(Vec::len).sum::<usize>() + free.len();
    let mut seen = free.clone();
    for p in parts.values() {
        seen = setops::union(&seen, p);
    }
    if assigned != o.len() || seen != o {
        return Err(Error::Audit(format!(
            "parts and free elements do not partition O = {o:?}"
        )));
    }
    for (&x, p) in &parts {
        let n = &conflicts[&x];
        for &e in p {
            let ys = neighborhoods.neighborhood(e);
            if !setops::contains(ys, x) {
                return Err(Error::Audit(format!("{x} is not a neighbor of {e}")));
            }
            if let Some(&z) = ys
                .iter()
                .find(|&&z| weight_of(weights, z) > weight_of(weights, x))
            {
                return Err(Error::Audit(format!("neighbor {z} of {e} outweighs {x}")));
            }
        }
        if p.len() > k {
            return Err(Error::Audit(format!(
                "|P_{x}| = {} exceeds k = {k}",
                p.len()
            )));
        }
        if n.len() > max_removed(k) {
            return Err(Error::Audit(format!(
                "|N_{x}| = {} exceeds k² - k + 1",
                n.len()
            )));
        }
        if !setops::is_subset(n, &s) {
            return Err(Error::Audit(format!("N_{x} is not inside S")));
        }
        let kept = setops::difference(&s, n);
        if p.iter().any(|&e| setops::contains(&kept, e)) {
            return Err(Error::Audit(format!("P_{x} meets S \\ N_{x}")));
        }
        if !system.is_independent(&setops::union(&kept, p))? {
            return Err(Error::Audit(format!(
                "(P_{x}, N_{x}) is not a feasible exchange"
            )));
        }
        if n.iter()
            .any(|&z| weight_of(weights, z) > weight_of(weights, x))
        {
            return Err(Error::Audit(format!(
                "{x} is not the heaviest element of N_{x}"
            )));
        }
    }
    Ok(PartitionWitness {
        neighborhoods,
        parts,
        conflicts,
        free,
    })
}

/// One checked inequality `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub subject: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

impl LemmaCheck {
    pub fn new(
        name: &'static str,
        subject: impl Into<String>,
        lhs: Rational,
        rhs: Rational,
    ) -> Self {
        let holds = lhs <= rhs;
        LemmaCheck {
            name,
            subject: subject.into(),
            lhs,
            rhs,
            holds,
        }
    }
}

/// `f(S ∪ T) - f(S) <= sum_i (f(S ∪ T_i) - f(S))` for a partition `{T_i}`
/// of `T \ S`.
pub fn check_lemma1(
    oracle: &Oracle,
    s: &[usize],
    t: &[usize],
    blocks: &[Vec<usize>],
) -> Result<LemmaCheck> {
    let s = setops::normalize(s.to_vec());
    let t = setops::normalize(t.to_vec());
    let outside = setops::difference(&t, &s);
    let mut covered = Vec::new();
    let mut total = 0;
    for block in blocks {
        let block = setops::normalize(block.clone());
        if block.is_empty() {
            return Err(Error::Precondition("partition has an empty block".into()));
        }
        total += block.len();
        covered = setops::union(&covered, &block);
    }
    if covered != outside || total != outside.len() {
        return Err(Error::Precondition("blocks do not partition T \\ S".into()));
    }
    let fs = oracle.evaluate(&s)?;
    let lhs = oracle
        .evaluate(&setops::union(&s, &t))?
        .checked_sub(&fs)?
        .get();
    let mut rhs = Rational::zero();
    for block in blocks {
        let gain = oracle
            .evaluate(&setops::union(&s, &setops::normalize(block.clone())))?
            .checked_sub(&fs)?;
        rhs = checked_add(&rhs, &gain.get())?;
    }
    Ok(LemmaCheck::new(
        "partition_sum",
        format!("S={s:?} T={t:?}"),
        lhs,
        rhs,
    ))
}

/// `w_x (2 w_e - w(Y_e)) <= w_e² - w²(Y_e - x)`, where `y_weights` lists
/// the weights of all of `Y_e`, including `x` itself.
pub fn check_lemma2(w_x: &Rational, w_e: &Rational, y_weights: &[Rational]) -> Result<LemmaCheck> {
    let zero = Rational::zero();
    if *w_x < zero || *w_e < zero || y_weights.iter().any(|w| *w < zero) {
        return Err(Error::Precondition("weights must be nonnegative".into()));
    }
    if y_weights.iter().any(|w| w > w_x) {
        return Err(Error::Precondition("a neighbor outweighs x".into()));
    }
    if !y_weights.contains(w_x) {
        return Err(Error::Precondition(
            "the neighbor weights do not include x".into(),
        ));
    }
    let mut y_sum = zero;
    let mut y_sq = zero;
    for w in y_weights {
        y_sum = checked_add(&y_sum, w)?;
        y_sq = checked_add(&y_sq, &checked_mul(w, w)?)?;
    }
    let rest_sq = checked_sub(&y_sq, &checked_mul(w_x, w_x)?)?;
    let lhs = checked_mul(w_x, &checked_sub(&checked_mul(&integer(2), w_e)?, &y_sum)?)?;
    let rhs = checked_sub(&checked_mul(w_e, w_e)?, &rest_sq)?;
    Ok(LemmaCheck::new(
        "neighborhood_weight",
        format!("w_x={w_x} w_e={w_e} Y={}", join(y_weights)),
        lhs,
        rhs,
    ))
}

fn join(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(" "))
}

/// Result of auditing one locally optimal solution against the optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub solution: Vec<usize>,
    pub value: ObjectiveValue,
    pub opt_set: Vec<usize>,
    pub opt_value: ObjectiveValue,
    /// `f(O) / f(S)`; `None` when `f(S) = 0`.
    pub ratio: Option<Rational>,
    /// `(k + 3)/2 + epsilon`.
    pub bound: Rational,
    pub witness: Option<PartitionWitness>,
    pub checks: Vec<LemmaCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| !c.holds)
    }

    pub fn checks_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a LemmaCheck> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }

    /// Columns `check,subject,lhs,rhs,holds`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["check", "subject", "lhs", "rhs", "holds"])?;
        for c in &self.checks {
            w.write_record([
                c.name,
                &c.subject,
                &c.lhs.to_string(),
                &c.rhs.to_string(),
                if c.holds { "true" } else { "false" },
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `(k + 3)/2 + epsilon`.
pub fn locality_bound(k: usize, epsilon: &Rational) -> Rational {
    rational(k as i128 + 3, 2) + epsilon
}

/// Audits the output `state` of a search run: local optimality, the weight
/// sandwich, the charging inequalities for every `x ∈ S`, the counting
/// bound, the partition inequality and finally `f(O) <= ((k+3)/2 + eps) f(S)`.
///
/// Only set-packing systems get the charging checks; other systems are
/// audited for local optimality and the final ratio.
pub fn check_lemma3_and_theorem1(
    instance: &Instance,
    state: &SolutionState,
    trace: &SearchTrace,
    epsilon: &Rational,
    caps: &Caps,
    brute_cap: usize,
) -> Result<AuditReport> {
    let k = instance.k();
    let oracle = Oracle::new(&instance.objective);
    let (opt_set, opt_value) = brute_force_opt(instance, brute_cap)?;
    let s = setops::normalize(state.set.clone());
    let fs = oracle.evaluate(&s)?;
    let bound = locality_bound(k, epsilon);
    let mut checks = Vec::new();
    let mut witness = None;

    if !trace.degenerate {
        let alpha = &trace.alpha;
        let order = &trace.final_order;
        let current = search::evaluate_state(&oracle, &s, order, alpha)?;
        let improving = find_improvement(
            instance,
            &oracle,
            &current,
            order,
            alpha,
            AcceptanceRule::RemovedSet,
            caps,
        )?;
        checks.push(LemmaCheck::new(
            "local_optimum",
            "improving k-replacements",
            integer(improving.is_some() as i128),
            Rational::zero(),
        ));
        let weight_sum = checked_mul(&integer(current.weight_sum() as i128), alpha)?;
        checks.push(LemmaCheck::new(
            "sandwich_upper",
            "sum w(S) <= f(S)",
            weight_sum,
            fs.get(),
        ));
        let lower = checked_sub(&fs.get(), &checked_mul(&integer(s.len() as i128), alpha)?)?;
        checks.push(LemmaCheck::new(
            "sandwich_lower",
            "f(S) - |S| alpha <= sum w(S)",
            lower,
            weight_sum,
        ));

        if let Some(packing) = instance.system.as_packing() {
            match build_partition_witness(packing, &s, &opt_set, &current.weights) {
                Ok(pw) => {
                    charging_checks(
                        &oracle,
                        packing,
                        &current,
                        order,
                        alpha,
                        &opt_set,
                        &pw,
                        &mut checks,
                    )?;
                    witness = Some(pw);
                }
                Err(Error::Audit(msg)) => checks.push(LemmaCheck::new(
                    "partition_witness",
                    msg,
                    integer(1),
                    Rational::zero(),
                )),
                Err(e) => return Err(e),
            }
        }

        let o_alpha = checked_mul(&integer(opt_set.len() as i128), alpha)?;
        let union_value = oracle.evaluate(&setops::union(&s, &opt_set))?.get();
        let half = rational(k as i128 + 3, 2);
        checks.push(LemmaCheck::new(
            "union_bound",
            "f(S ∪ O) - |O| alpha <= (k+3)/2 f(S)",
            checked_sub(&union_value, &o_alpha)?,
            checked_mul(&half, &fs.get())?,
        ));
        checks.push(LemmaCheck::new(
            "rounding_slack",
            "|O| alpha <= delta f(O)",
            o_alpha,
            checked_mul(&trace.delta, &opt_value.get())?,
        ));
    }

    checks.push(LemmaCheck::new(
        "locality_gap",
        "f(O) <= ((k+3)/2 + eps) f(S)",
        opt_value.get(),
        checked_mul(&bound, &fs.get())?,
    ));
    let ratio = if fs.is_zero() {
        None
    } else {
        Some(opt_value.get() / fs.get())
    };
    Ok(AuditReport {
        solution: s,
        value: fs,
        opt_set,
        opt_value,
        ratio,
        bound,
        witness,
        checks,
    })
}

#[allow(clippy::too_many_arguments)]
fn charging_checks(
    oracle: &Oracle,
    system: &SetPackingSystem,
    state: &SolutionState,
    order: &ElementOrder,
    alpha: &Rational,
    o: &[usize],
    pw: &PartitionWitness,
    checks: &mut Vec<LemmaCheck>,
) -> Result<()> {
    let s = &state.set;
    let k = system.k();
    let fs = state.value.get();
    let value = |e: usize| state.weight(e).value(alpha);
    let y_weight = |e: usize| -> Result<Rational> {
        pw.neighborhoods
            .neighborhood(e)
            .iter()
            .try_fold(Rational::zero(), |acc, &z| checked_add(&acc, &value(z)?))
    };

    let o_minus_s = setops::difference(o, s);
    if o_minus_s.len() <= DEFAULT_K3_CAP {
        let report = verify_witness(system, o, s, &pw.neighborhoods, k, DEFAULT_K3_CAP)?;
        checks.push(LemmaCheck::new(
            "exchange_witness",
            format!("{report:?}"),
            integer(!report.passed() as i128),
            Rational::zero(),
        ));
    }

    // twice the summed gains of the blocks, for the summed charge inequality
    let mut gains = Rational::zero();
    let mut blocks: Vec<Vec<usize>> = Vec::new();

    for &x in s {
        let p = pw.part(x);
        if p.is_empty() {
            continue;
        }
        let n = pw.conflict(x);
        let w_pn = replacement_weights(oracle, s, p, n, order, alpha)?;
        let w_x = value(x)?;
        let mut charge = Rational::zero();
        let mut add_sq = 0u128;
        let mut add_sum = Rational::zero();
        for &e in p {
            let w_e = w_pn[&e].value(alpha)?;
            add_sq += w_pn[&e].squared();
            add_sum = checked_add(&add_sum, &w_e)?;
            let ys: Vec<Rational> = pw
                .neighborhoods
                .neighborhood(e)
                .iter()
                .map(|&z| value(z))
                .collect::<Result<_>>()?;
            let mut neighborhood = check_lemma2(&w_x, &w_e, &ys)?;
            neighborhood.subject = format!("x={x} e={e}");
            checks.push(neighborhood);
            let term = checked_sub(&checked_mul(&integer(2), &w_e)?, &y_weight(e)?)?;
            charge = checked_add(&charge, &term)?;
        }
        let removed_sq: u128 = n.iter().map(|&z| state.weight(z).squared()).sum();
        checks.push(LemmaCheck::new(
            "local_exchange",
            format!("x={x}: w²(P_x) <= w²(N_x) in alpha² units"),
            integer(add_sq as i128),
            integer(removed_sq as i128),
        ));
        checks.push(LemmaCheck::new("charge", format!("x={x}"), charge, w_x));
        let gain = oracle.evaluate(&setops::union(s, p))?.get() - fs;
        let slack = checked_mul(&integer(p.len() as i128), alpha)?;
        checks.push(LemmaCheck::new(
            "replacement_bound",
            format!("x={x}: f(S ∪ P_x) - f(S) - |P_x| alpha <= sum w(P_x)"),
            checked_sub(&gain, &slack)?,
            add_sum,
        ));
        gains = checked_add(&gains, &gain)?;
        let outside = setops::difference(p, s);
        if !outside.is_empty() {
            blocks.push(outside);
        }
    }

    for &e in &pw.free {
        let w = replacement_weights(oracle, s, &[e], &[], order, alpha)?;
        let w_e = w[&e].value(alpha)?;
        checks.push(LemmaCheck::new(
            "free_element",
            format!("e={e}: w(e) <= 0"),
            w_e,
            Rational::zero(),
        ));
        let gain = oracle.evaluate(&setops::union(s, &[e]))?.get() - fs;
        checks.push(LemmaCheck::new(
            "replacement_bound",
            format!("e={e}: f(S + e) - f(S) - alpha <= w(e)"),
            checked_sub(&gain, alpha)?,
            w_e,
        ));
        gains = checked_add(&gains, &gain)?;
        blocks.push(vec![e]);
    }

    let mut y_total = Rational::zero();
    for &e in o {
        y_total = checked_add(&y_total, &y_weight(e)?)?;
    }
    checks.push(LemmaCheck::new(
        "counting_bound",
        "sum_{e in O} w(Y_e) <= k f(S)",
        y_total,
        checked_mul(&integer(k as i128), &fs)?,
    ));
    let o_alpha = checked_mul(&integer(o.len() as i128), alpha)?;
    let charged = checked_sub(
        &checked_sub(
            &checked_mul(&integer(2), &gains)?,
            &checked_mul(&integer(2), &o_alpha)?,
        )?,
        &y_total,
    )?;
    checks.push(LemmaCheck::new(
        "charge_sum",
        "2 sum (f(S ∪ P_x) - f(S)) - 2|O| alpha - sum w(Y_e) <= f(S)",
        charged,
        fs,
    ));
    let mut partition = check_lemma1(oracle, s, o, &blocks)?;
    partition.subject = "blocks of O \\ S".into();
    checks.push(partition);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::objective::{CoverageObjective, LinearObjective, Objective};
    use crate::search::{run, RoundedWeight, SearchConfig};
    use crate::systems::{ExplicitSystem, System};

    fn packing(sets: Vec<Vec<usize>>, k: usize, items: usize) -> Instance {
        let n = sets.len();
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let item_names: Vec<String> = (0..items).map(|i| format!("u{i}")).collect();
        let system = SetPackingSystem::new(item_names.clone(), sets.clone(), k).unwrap();
        let objective = CoverageObjective::new(item_names, sets, None).unwrap();
        Instance::new(
            "t",
            labels,
            System::SetPacking(system),
            Objective::Coverage(objective),
        )
        .unwrap()
    }

    /// Every subset, no pruning.
    fn unpruned_opt(instance: &Instance) -> (Vec<usize>, ObjectiveValue) {
        let n = instance.n();
        let mut best = (Vec::new(), ObjectiveValue::zero());
        let mut subsets: Vec<Vec<usize>> = (0u32..1 << n)
            .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
            .collect();
        subsets.sort();
        for set in subsets {
            if instance.system.is_independent(&set).unwrap() {
                let v = instance.objective.value(&set).unwrap();
                if v > best.1 {
                    best = (set, v);
                }
            }
        }
        best
    }

    #[test]
    fn brute_force_on_two_bases() {
        let (o, v) = brute_force_opt(&fixtures::two_bases(), DEFAULT_BRUTE_CAP).unwrap();
        assert_eq!(o, vec![0, 1]);
        assert_eq!(v, ObjectiveValue::from_integer(3));
    }

    #[test]
    fn brute_force_on_empty_instance() {
        let inst = Instance::new(
            "empty",
            vec![],
            System::Explicit(ExplicitSystem::new(0, vec![], 1).unwrap()),
            Objective::Linear(LinearObjective::new(vec![]).unwrap()),
        )
        .unwrap();
        assert_eq!(
            brute_force_opt(&inst, 5).unwrap(),
            (vec![], ObjectiveValue::zero())
        );
    }

    #[test]
    fn brute_force_on_single_basis() {
        let inst = Instance::new(
            "single",
            vec!["a".into(), "b".into(), "c".into()],
            System::Explicit(ExplicitSystem::new(3, vec![vec![0, 2]], 1).unwrap()),
            Objective::Linear(
                LinearObjective::new(vec![integer(1), integer(5), integer(1)]).unwrap(),
            ),
        )
        .unwrap();
        assert_eq!(brute_force_opt(&inst, 5).unwrap().0, vec![0, 2]);
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        assert!(matches!(
            brute_force_opt(&fixtures::two_bases(), 3),
            Err(Error::SizeCap {
                size: 4,
                cap: 3,
                ..
            })
        ));
    }

    #[test]
    fn brute_force_matches_unpruned_enumeration() {
        let inst = packing(
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3],
                vec![0, 4],
                vec![4, 5],
                vec![5],
                vec![1, 5],
            ],
            2,
            6,
        );
        let (o, v) = brute_force_opt(&inst, 20).unwrap();
        assert_eq!((o, v), unpruned_opt(&inst));
    }

    #[test]
    fn witness_for_o_equal_s() {
        let inst = packing(vec![vec![0, 1], vec![2], vec![1, 2]], 2, 3);
        let sys = inst.system.as_packing().unwrap();
        let weights: WeightTable = [(0, RoundedWeight(2)), (1, RoundedWeight(1))]
            .into_iter()
            .collect();
        let pw = build_partition_witness(sys, &[0, 1], &[0, 1], &weights).unwrap();
        assert_eq!(pw.part(0), &[0]);
        assert_eq!(pw.part(1), &[1]);
        assert_eq!(pw.conflict(0), &[0]);
        assert!(pw.free.is_empty());
    }

    #[test]
    fn witness_assigns_to_the_heaviest_neighbor() {
        // O-element 2 = {0,3} meets S-elements 0 = {0} and 1 = {3}
        let inst = packing(vec![vec![0], vec![3], vec![0, 3]], 2, 4);
        let sys = inst.system.as_packing().unwrap();
        let tied: WeightTable = [(0, RoundedWeight(3)), (1, RoundedWeight(3))]
            .into_iter()
            .collect();
        let pw = build_partition_witness(sys, &[0, 1], &[2], &tied).unwrap();
        assert_eq!(pw.part(0), &[2]);
        assert_eq!(pw.conflict(0), &[0, 1]);
        let heavier: WeightTable = [(0, RoundedWeight(1)), (1, RoundedWeight(3))]
            .into_iter()
            .collect();
        let pw = build_partition_witness(sys, &[0, 1], &[2], &heavier).unwrap();
        assert_eq!(pw.part(1), &[2]);
        assert!(pw.part(0).is_empty());
    }

    #[test]
    fn witness_with_disjoint_solutions() {
        let inst = packing(vec![vec![0, 1], vec![0, 2], vec![3, 4], vec![3, 5]], 2, 6);
        let sys = inst.system.as_packing().unwrap();
        let weights: WeightTable = [(2, RoundedWeight(2))].into_iter().collect();
        let pw = build_partition_witness(sys, &[2], &[0], &weights).unwrap();
        assert_eq!(pw.free, vec![0]);
        assert!(pw.neighborhoods.neighborhood(0).is_empty());
        assert!(pw.part(2).is_empty());
    }

    #[test]
    fn partition_sum_examples() {
        let inst = packing(vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]], 2, 4);
        let o = Oracle::new(&inst.objective);
        let c = check_lemma1(&o, &[0], &[1, 2, 3], &[vec![1], vec![2], vec![3]]).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, integer(2));
        assert_eq!(c.rhs, integer(4));
        let trivial = check_lemma1(&o, &[0, 1], &[1], &[]).unwrap();
        assert_eq!((trivial.lhs, trivial.rhs), (integer(0), integer(0)));
        assert!(check_lemma1(&o, &[0], &[1, 2], &[vec![1]]).is_err());
        assert!(check_lemma1(&o, &[0], &[1], &[vec![1], vec![1]]).is_err());
    }

    #[test]
    fn neighborhood_weight_examples() {
        let zero = Rational::zero();
        let c = check_lemma2(&zero, &zero, &[zero]).unwrap();
        assert!(c.holds);
        // w_x = w_e = 3, Y = {x}: a = 3/2, b = c = 3/2, tight
        let c = check_lemma2(&integer(3), &integer(3), &[integer(3)]).unwrap();
        assert_eq!(c.lhs, c.rhs);
        let c = check_lemma2(&integer(4), &integer(1), &[integer(4), integer(2)]).unwrap();
        assert!(c.holds);
        assert!(check_lemma2(&integer(1), &integer(1), &[integer(2)]).is_err());
        assert!(check_lemma2(&integer(2), &integer(1), &[integer(1)]).is_err());
        assert!(check_lemma2(&integer(-1), &integer(1), &[integer(-1)]).is_err());
    }

    #[test]
    fn audit_two_bases_after_run() {
        let inst = fixtures::two_bases();
        let eps = rational(1, 2);
        let (state, trace) = run(&inst, &SearchConfig::new(eps)).unwrap();
        let report =
            check_lemma3_and_theorem1(&inst, &state, &trace, &eps, &Caps::default(), 20).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure());
        assert_eq!(report.ratio, Some(integer(1)));
        assert_eq!(report.bound, rational(3, 1));
    }

    #[test]
    fn audit_packing_run() {
        let inst = packing(
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3],
                vec![0, 4],
                vec![4, 5],
                vec![5],
                vec![1, 5],
            ],
            2,
            6,
        );
        let eps = rational(1, 4);
        let (state, trace) = run(&inst, &SearchConfig::new(eps)).unwrap();
        let report =
            check_lemma3_and_theorem1(&inst, &state, &trace, &eps, &Caps::default(), 20).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure());
        assert!(report.witness.is_some());
        assert!(report.checks_named("charge").count() > 0);
        assert_eq!(report.checks_named("partition_sum").count(), 1);
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("check,subject,lhs,rhs,holds\n"));
        assert_eq!(text.lines().count(), report.checks.len() + 1);
    }

    #[test]
    fn audit_flags_a_non_optimal_solution() {
        let inst = packing(vec![vec![0], vec![0, 1], vec![1]], 2, 2);
        let eps = rational(1, 2);
        let (_, trace) = run(&inst, &SearchConfig::new(eps)).unwrap();
        let oracle = Oracle::new(&inst.objective);
        let state =
            search::evaluate_state(&oracle, &[2], &trace.final_order, &trace.alpha).unwrap();
        let report =
            check_lemma3_and_theorem1(&inst, &state, &trace, &eps, &Caps::default(), 20).unwrap();
        assert!(!report.passed());
        assert_eq!(report.first_failure().unwrap().name, "local_optimum");
    }
}
