//! Non-oblivious local search with prefix-marginal weights.
//!
//! Each solution element gets the marginal gain it contributes over the
//! elements of the solution that precede it in a maintained total order,
//! floored to a multiple of a granularity `alpha`. A candidate replacement
//! `(A, B)` weighs the elements of `A` the same way on top of `S \ B`, and is
//! accepted when it strictly increases the sum of squared weights. After
//! each move the order is updated so that the surviving elements precede the
//! inserted ones, which makes the squared-weight potential grow by at least
//! `alpha^2` per move.
//!
//! Weights are stored as integer multiples of `alpha` and potentials as
//! integers in units of `alpha^2`, so every comparison is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::ops::ControlFlow;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::objective::{ObjectiveValue, Oracle};
use crate::rational::{checked_mul, checked_sub, integer, Rational};
use crate::setops;
use crate::systems::IndependenceSystem;

/// Total order on the ground set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementOrder {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl ElementOrder {
    /// Ascending element index.
    pub fn identity(n: usize) -> Self {
        ElementOrder {
            order: (0..n).collect(),
            rank: (0..n).collect(),
        }
    }

    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (r, &e) in order.iter().enumerate() {
            if e >= n || rank[e] != usize::MAX {
                return Err(Error::Precondition(format!(
                    "order is not a permutation of 0..{n}"
                )));
            }
            rank[e] = r;
        }
        Ok(ElementOrder { order, rank })
    }

    pub fn rank(&self, e: usize) -> usize {
        self.rank[e]
    }

    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    /// The elements of `set` sorted by this order.
    pub fn sorted(&self, set: &[usize]) -> Vec<usize> {
        let mut v = set.to_vec();
        v.sort_by_key(|&e| self.rank[e]);
        v
    }

    /// Order after a move that keeps `kept` and inserts `added`.
    ///
    /// Every element of `kept` precedes every element of `added`; relative
    /// order within `kept`, within `added` and among all other elements is
    /// unchanged. Elements of `added` that sat before the last kept element
    /// are moved to just after it, which is the smallest change that keeps
    /// the result a total order.
    pub fn after_replacement(&self, kept: &[usize], added: &[usize]) -> ElementOrder {
        let Some(last_kept) = kept.iter().copied().max_by_key(|&e| self.rank[e]) else {
            return self.clone();
        };
        let pivot = self.rank[last_kept];
        let early: Vec<usize> = self
            .sorted(added)
            .into_iter()
            .filter(|&a| self.rank[a] < pivot)
            .collect();
        let mut order = Vec::with_capacity(self.order.len());
        for &e in &self.order {
            if early.contains(&e) {
                continue;
            }
            order.push(e);
            if e == last_kept {
                order.extend_from_slice(&early);
            }
        }
        let mut rank = vec![0; order.len()];
        for (r, &e) in order.iter().enumerate() {
            rank[e] = r;
        }
        ElementOrder { order, rank }
    }
}

/// A weight stored as the integer `m` in `m * alpha`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoundedWeight(pub u64);

impl RoundedWeight {
    pub fn multiple(self) -> u64 {
        self.0
    }

    pub fn squared(self) -> u128 {
        (self.0 as u128) * (self.0 as u128)
    }

    pub fn value(self, alpha: &Rational) -> Result<Rational> {
        checked_mul(&integer(self.0 as i128), alpha)
    }

    fn floor_of(marginal: &ObjectiveValue, alpha: &Rational) -> Result<Self> {
        crate::rational::floor_multiple(&marginal.get(), alpha).map(RoundedWeight)
    }
}

pub type WeightTable = BTreeMap<usize, RoundedWeight>;

pub fn squared_sum<'a, I: IntoIterator<Item = &'a RoundedWeight>>(weights: I) -> u128 {
    weights.into_iter().map(|w| w.squared()).sum()
}

/// Current solution, its weights and potential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionState {
    /// Sorted by element index.
    pub set: Vec<usize>,
    pub weights: WeightTable,
    pub value: ObjectiveValue,
    /// Sum of squared weights in units of `alpha^2`.
    pub potential: u128,
}

impl SolutionState {
    pub fn weight(&self, e: usize) -> RoundedWeight {
        self.weights.get(&e).copied().unwrap_or_default()
    }

    /// Sum of weights in units of `alpha`.
    pub fn weight_sum(&self) -> u128 {
        self.weights.values().map(|w| w.0 as u128).sum()
    }
}

/// Candidate move `(A, B)`: insert `add`, remove `remove`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KReplacement {
    pub add: Vec<usize>,
    pub remove: Vec<usize>,
    pub add_weights: WeightTable,
}

impl KReplacement {
    pub fn add_potential(&self) -> u128 {
        squared_sum(self.add_weights.values())
    }
}

/// Limits on neighborhood enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Refuse when the estimated number of candidate pairs exceeds this.
    pub max_candidates: u128,
}

pub const DEFAULT_MAX_CANDIDATES: u128 = 1_000_000_000;

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

/// Which side an insertion's squared weight is compared against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AcceptanceRule {
    /// `w²_{(A,B)}(A) > w²(B)`.
    #[default]
    RemovedSet,
    /// `w²_{(A,B)}(A) > w²(S)`, the condition as printed in the pseudocode.
    WholeSolution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub epsilon: Rational,
    pub caps: Caps,
    pub rule: AcceptanceRule,
    /// Check the replacement-weight lower bound on every enumerated candidate.
    pub check_replacements: bool,
}

impl SearchConfig {
    pub fn new(epsilon: Rational) -> Self {
        SearchConfig {
            epsilon,
            caps: Caps::default(),
            rule: AcceptanceRule::default(),
            check_replacements: false,
        }
    }
}

/// One accepted move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Improvement {
    pub step: usize,
    pub add: Vec<usize>,
    pub remove: Vec<usize>,
    pub potential_before: u128,
    pub potential_after: u128,
    pub value_before: ObjectiveValue,
    pub value_after: ObjectiveValue,
}

/// Everything recorded during a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchTrace {
    pub improvements: Vec<Improvement>,
    pub oracle_calls: u64,
    pub alpha: Rational,
    pub delta: Rational,
    /// `(n - 1) (n / delta)^2`.
    pub improvement_bound: Rational,
    pub weight_checks: u64,
    pub replacement_checks: u64,
    pub candidates_examined: u64,
    pub final_order: ElementOrder,
    /// The best singleton had value 0 and the search was skipped.
    pub degenerate: bool,
}

impl SearchTrace {
    pub fn improvement_count(&self) -> usize {
        self.improvements.len()
    }

    /// One line per improvement: step, |A|, |B|, potential increase in
    /// units of alpha², f before and after.
    pub fn write_log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# alpha={} delta={}", self.alpha, self.delta)?;
        writeln!(out, "# step size_a size_b potential_delta f_before f_after")?;
        for imp in &self.improvements {
            writeln!(
                out,
                "{} {} {} {} {} {}",
                imp.step,
                imp.add.len(),
                imp.remove.len(),
                imp.potential_after - imp.potential_before,
                imp.value_before,
                imp.value_after
            )?;
        }
        Ok(())
    }
}

/// `{argmax_e f({e})}` over independent singletons, ties to the smallest
/// index; empty when every singleton is dependent. Weights are left empty
/// until the granularity is known.
pub fn init_solution(instance: &Instance, oracle: &Oracle) -> Result<SolutionState> {
    let n = instance.n();
    if n == 0 {
        return Err(Error::Domain("ground set is empty".into()));
    }
    let mut best: Option<(usize, ObjectiveValue)> = None;
    for e in 0..n {
        if !instance.system.is_independent(&[e])? {
            continue;
        }
        let v = oracle.evaluate(&[e])?;
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((e, v));
        }
    }
    let (set, value) = match best {
        Some((e, v)) => (vec![e], v),
        None => (Vec::new(), ObjectiveValue::zero()),
    };
    Ok(SolutionState {
        set,
        weights: WeightTable::new(),
        value,
        potential: 0,
    })
}

/// `delta = (1 + (k+3)/(2 eps))^-1` and `alpha = f_init * delta / n`.
pub fn compute_scale(
    k: usize,
    n: usize,
    epsilon: &Rational,
    f_init: &ObjectiveValue,
) -> Result<(Rational, Rational)> {
    if *epsilon <= Rational::zero() || *epsilon > Rational::one() {
        return Err(Error::Domain(format!(
            "epsilon {epsilon} is outside (0, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("ground set is empty".into()));
    }
    if f_init.is_zero() {
        return Err(Error::Degenerate);
    }
    let two_eps = checked_mul(&integer(2), epsilon)?;
    // 1 / (1 + (k+3)/(2 eps)) = 2 eps / (2 eps + k + 3)
    let delta = two_eps / (two_eps + integer(k as i128 + 3));
    let alpha = checked_mul(&f_init.get(), &delta)? / integer(n as i128);
    Ok((delta, alpha))
}

/// Prefix-marginal weights of `set` under `order`, floored to multiples of `alpha`.
pub fn solution_weights(
    oracle: &Oracle,
    set: &[usize],
    order: &ElementOrder,
    alpha: &Rational,
) -> Result<WeightTable> {
    prefix_weights(oracle, &[], &order.sorted(set), alpha).map(|(w, _)| w)
}

/// Weights of `order`-sorted `elements` added one by one on top of `base`.
/// Also returns `f(base ∪ elements)`.
fn prefix_weights(
    oracle: &Oracle,
    base: &[usize],
    elements: &[usize],
    alpha: &Rational,
) -> Result<(WeightTable, ObjectiveValue)> {
    let mut x = base.to_vec();
    let mut prev = oracle.evaluate(&x)?;
    let mut weights = WeightTable::new();
    for &e in elements {
        x.push(e);
        let next = oracle.evaluate(&x)?;
        let gain = next.checked_sub(&prev)?;
        weights.insert(e, RoundedWeight::floor_of(&gain, alpha)?);
        prev = next;
    }
    Ok((weights, prev))
}

fn check_replacement_shape(s: &[usize], add: &[usize], remove: &[usize]) -> Result<()> {
    if !setops::is_subset(remove, s) {
        return Err(Error::Precondition("B is not a subset of S".into()));
    }
    let kept = setops::difference(s, remove);
    if add.iter().any(|&a| setops::contains(&kept, a)) {
        return Err(Error::Precondition("A meets S \\ B".into()));
    }
    Ok(())
}

/// `w_{(A,B)}`: weights of `A` in `order`, each over `S \ B` plus the
/// preceding elements of `A`.
pub fn replacement_weights(
    oracle: &Oracle,
    s: &[usize],
    add: &[usize],
    remove: &[usize],
    order: &ElementOrder,
    alpha: &Rational,
) -> Result<WeightTable> {
    let s = setops::normalize(s.to_vec());
    let add = setops::normalize(add.to_vec());
    let remove = setops::normalize(remove.to_vec());
    check_replacement_shape(&s, &add, &remove)?;
    let kept = setops::difference(&s, &remove);
    prefix_weights(oracle, &kept, &order.sorted(&add), alpha).map(|(w, _)| w)
}

/// Largest allowed `|B|` for exchange parameter `k`.
pub fn max_removed(k: usize) -> usize {
    k * k - k + 1
}

fn binomial_prefix_sum(n: usize, max: usize) -> u128 {
    // sum_{i <= max} C(n, i), saturating
    let mut term: u128 = 1;
    let mut total: u128 = 1;
    for i in 1..=max.min(n) {
        term = term.saturating_mul((n - i + 1) as u128) / i as u128;
        total = total.saturating_add(term);
    }
    total
}

/// Upper bound on the number of pairs `(A, B)` with `|A| <= k` from
/// `n` elements and `|B| <= k² - k + 1` from a solution of size `s_len`.
pub fn estimate_candidates(n: usize, s_len: usize, k: usize) -> u128 {
    binomial_prefix_sum(n, k).saturating_mul(binomial_prefix_sum(s_len, max_removed(k)))
}

/// Visits every k-replacement `(A, B)` of `s` in lexicographic order of
/// `(|A|, A, |B|, B)`. Stops at the first `Break`.
pub fn for_each_k_replacement<T, F>(
    system: &dyn IndependenceSystem,
    s: &[usize],
    k: usize,
    caps: &Caps,
    mut visit: F,
) -> Result<Option<T>>
where
    F: FnMut(&[usize], &[usize]) -> Result<ControlFlow<T>>,
{
    let n = system.ground_size();
    let estimate = estimate_candidates(n, s.len(), k);
    if estimate > caps.max_candidates {
        return Err(Error::CapRefusal {
            estimate,
            cap: caps.max_candidates,
        });
    }
    let s = setops::normalize(s.to_vec());
    let b_max = max_removed(k).min(s.len());
    let mut add = Vec::with_capacity(k);
    for size in 0..=k.min(n) {
        let flow = visit_adds(system, &s, size, 0, &mut add, b_max, &mut visit)?;
        if let ControlFlow::Break(t) = flow {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn visit_adds<T, F>(
    system: &dyn IndependenceSystem,
    s: &[usize],
    size: usize,
    start: usize,
    add: &mut Vec<usize>,
    b_max: usize,
    visit: &mut F,
) -> Result<ControlFlow<T>>
where
    F: FnMut(&[usize], &[usize]) -> Result<ControlFlow<T>>,
{
    if add.len() == size {
        return visit_removals(system, s, add, b_max, visit);
    }
    let n = system.ground_size();
    let remaining = size - add.len();
    for e in start..n {
        if n - e < remaining {
            break;
        }
        add.push(e);
        // hereditary: a dependent A cannot be part of any independent (S \ B) ∪ A
        if system.is_independent(add)? {
            if let ControlFlow::Break(t) = visit_adds(system, s, size, e + 1, add, b_max, visit)? {
                add.pop();
                return Ok(ControlFlow::Break(t));
            }
        }
        add.pop();
    }
    Ok(ControlFlow::Continue(()))
}

fn visit_removals<T, F>(
    system: &dyn IndependenceSystem,
    s: &[usize],
    add: &[usize],
    b_max: usize,
    visit: &mut F,
) -> Result<ControlFlow<T>>
where
    F: FnMut(&[usize], &[usize]) -> Result<ControlFlow<T>>,
{
    // A may only contain elements of S that B removes
    let forced = setops::intersection(add, s);
    if forced.len() > b_max {
        return Ok(ControlFlow::Continue(()));
    }
    let optional = setops::difference(s, &forced);
    let mut outcome: Result<ControlFlow<T>> = Ok(ControlFlow::Continue(()));
    for size in forced.len()..=b_max {
        setops::for_each_combination(&optional, size - forced.len(), |extra| {
            let remove = setops::union(&forced, extra);
            let step = (|| {
                let candidate = setops::union(&setops::difference(s, &remove), add);
                if system.is_independent(&candidate)? {
                    visit(add, &remove)
                } else {
                    Ok(ControlFlow::Continue(()))
                }
            })();
            match step {
                Ok(ControlFlow::Continue(())) => true,
                other => {
                    outcome = other;
                    false
                }
            }
        });
        if !matches!(outcome, Ok(ControlFlow::Continue(()))) {
            return outcome;
        }
    }
    outcome
}

/// All k-replacements of `s`, in enumeration order.
pub fn enumerate_k_replacements(
    system: &dyn IndependenceSystem,
    s: &[usize],
    k: usize,
    caps: &Caps,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let mut out = Vec::new();
    for_each_k_replacement::<(), _>(system, s, k, caps, |a, b| {
        out.push((a.to_vec(), b.to_vec()));
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(out)
}

#[derive(Default)]
struct ScanStats {
    candidates: u64,
    replacement_checks: u64,
}

#[allow(clippy::too_many_arguments)]
fn scan(
    instance: &Instance,
    oracle: &Oracle,
    state: &SolutionState,
    order: &ElementOrder,
    alpha: &Rational,
    rule: AcceptanceRule,
    caps: &Caps,
    check_replacements: bool,
    stats: &mut ScanStats,
) -> Result<Option<KReplacement>> {
    let s = &state.set;
    let threshold_all = state.potential;
    for_each_k_replacement(&instance.system, s, instance.k(), caps, |add, remove| {
        stats.candidates += 1;
        let kept = setops::difference(s, remove);
        let (add_weights, _) = prefix_weights(oracle, &kept, &order.sorted(add), alpha)?;
        if check_replacements {
            check_replacement_bound(oracle, state, add, &add_weights, alpha)?;
            stats.replacement_checks += 1;
        }
        let gained = squared_sum(add_weights.values());
        let threshold = match rule {
            AcceptanceRule::RemovedSet => squared_sum(remove.iter().map(|b| &state.weights[b])),
            AcceptanceRule::WholeSolution => threshold_all,
        };
        if gained > threshold {
            Ok(ControlFlow::Break(KReplacement {
                add: add.to_vec(),
                remove: remove.to_vec(),
                add_weights,
            }))
        } else {
            Ok(ControlFlow::Continue(()))
        }
    })
}

/// `sum_a w_{(A,B)}(a) >= f(S ∪ A) - f(S) - |A| alpha`.
fn check_replacement_bound(
    oracle: &Oracle,
    state: &SolutionState,
    add: &[usize],
    add_weights: &WeightTable,
    alpha: &Rational,
) -> Result<()> {
    let units: u128 = add_weights.values().map(|w| w.0 as u128).sum();
    let lhs = checked_mul(&integer(units as i128), alpha)?;
    let union_value = oracle.evaluate(&setops::union(&state.set, add))?;
    let gain = union_value.checked_sub(&state.value)?.get();
    let slack = checked_mul(&integer(add.len() as i128), alpha)?;
    let rhs = checked_sub(&gain, &slack)?;
    if lhs < rhs {
        return Err(Error::Invariant(format!(
            "replacement weights of {add:?} sum to {lhs}, below f(S ∪ A) - f(S) - |A|alpha = {rhs}"
        )));
    }
    Ok(())
}

/// `f(S) - |S| alpha <= sum w(x) <= f(S)`.
fn check_weight_sandwich(state: &SolutionState, alpha: &Rational) -> Result<()> {
    let sum = checked_mul(&integer(state.weight_sum() as i128), alpha)?;
    let value = state.value.get();
    let lower = checked_sub(
        &value,
        &checked_mul(&integer(state.set.len() as i128), alpha)?,
    )?;
    if sum > value || sum < lower {
        return Err(Error::Invariant(format!(
            "weight sum {sum} outside [{lower}, {value}] for S = {:?}",
            state.set
        )));
    }
    Ok(())
}

/// First k-replacement in enumeration order that strictly improves the
/// squared-weight potential, or `None` at a local optimum.
pub fn find_improvement(
    instance: &Instance,
    oracle: &Oracle,
    state: &SolutionState,
    order: &ElementOrder,
    alpha: &Rational,
    rule: AcceptanceRule,
    caps: &Caps,
) -> Result<Option<KReplacement>> {
    let mut stats = ScanStats::default();
    scan(
        instance, oracle, state, order, alpha, rule, caps, false, &mut stats,
    )
}

/// Builds a full state (weights, value, potential) for `set` under `order`.
pub fn evaluate_state(
    oracle: &Oracle,
    set: &[usize],
    order: &ElementOrder,
    alpha: &Rational,
) -> Result<SolutionState> {
    let set = setops::normalize(set.to_vec());
    let (weights, value) = prefix_weights(oracle, &[], &order.sorted(&set), alpha)?;
    let potential = squared_sum(weights.values());
    Ok(SolutionState {
        set,
        weights,
        value,
        potential,
    })
}

/// Applies `repl`, updates the order and recomputes the state from scratch.
///
/// Fails with [`Error::Invariant`] if the potential did not grow by at least
/// one unit of `alpha^2`, or if a surviving or inserted element lost weight.
pub fn apply_replacement(
    oracle: &Oracle,
    state: &SolutionState,
    order: &ElementOrder,
    repl: &KReplacement,
    alpha: &Rational,
) -> Result<(SolutionState, ElementOrder)> {
    check_replacement_shape(&state.set, &repl.add, &repl.remove)?;
    let kept = setops::difference(&state.set, &repl.remove);
    let next_order = order.after_replacement(&kept, &repl.add);
    let next_set = setops::union(&kept, &setops::normalize(repl.add.clone()));
    let next = evaluate_state(oracle, &next_set, &next_order, alpha)?;

    for &x in &kept {
        if next.weight(x) < state.weight(x) {
            return Err(Error::Invariant(format!(
                "weight of surviving element {x} dropped from {} to {}",
                state.weight(x).0,
                next.weight(x).0
            )));
        }
    }
    for (&y, &w) in &repl.add_weights {
        if next.weight(y) < w {
            return Err(Error::Invariant(format!(
                "weight of inserted element {y} dropped from {} to {}",
                w.0,
                next.weight(y).0
            )));
        }
    }
    if next.potential < state.potential + 1 {
        return Err(Error::Invariant(format!(
            "potential went from {} to {} (units of alpha^2)",
            state.potential, next.potential
        )));
    }
    Ok((next, next_order))
}

/// Runs the search from the best singleton until no improving k-replacement
/// exists.
pub fn run(instance: &Instance, config: &SearchConfig) -> Result<(SolutionState, SearchTrace)> {
    if config.epsilon <= Rational::zero() || config.epsilon >= Rational::one() {
        return Err(Error::Domain(format!(
            "epsilon {} is outside (0, 1)",
            config.epsilon
        )));
    }
    let n = instance.n();
    let oracle = Oracle::new(&instance.objective);
    let init = init_solution(instance, &oracle)?;
    let order = ElementOrder::identity(n);

    let (delta, alpha) = match compute_scale(instance.k(), n, &config.epsilon, &init.value) {
        Ok(scale) => scale,
        Err(Error::Degenerate) => {
            log::warn!(
                "instance {:?}: best singleton has value 0; returning it unchanged",
                instance.name
            );
            let trace = SearchTrace {
                improvements: Vec::new(),
                oracle_calls: oracle.calls(),
                alpha: Rational::zero(),
                delta: Rational::zero(),
                improvement_bound: Rational::zero(),
                weight_checks: 0,
                replacement_checks: 0,
                candidates_examined: 0,
                final_order: order,
                degenerate: true,
            };
            return Ok((init, trace));
        }
        Err(e) => return Err(e),
    };
    let n_over_delta = integer(n as i128) / delta;
    let improvement_bound = checked_mul(
        &integer(n as i128 - 1),
        &checked_mul(&n_over_delta, &n_over_delta)?,
    )?;

    let mut state = evaluate_state(&oracle, &init.set, &order, &alpha)?;
    let mut order = order;
    check_weight_sandwich(&state, &alpha)?;
    let mut weight_checks = 1;
    let mut stats = ScanStats::default();
    let mut improvements = Vec::new();

    while let Some(repl) = scan(
        instance,
        &oracle,
        &state,
        &order,
        &alpha,
        config.rule,
        &config.caps,
        config.check_replacements,
        &mut stats,
    )? {
        let (next, next_order) = apply_replacement(&oracle, &state, &order, &repl, &alpha)?;
        check_weight_sandwich(&next, &alpha)?;
        weight_checks += 1;
        improvements.push(Improvement {
            step: improvements.len() + 1,
            add: repl.add,
            remove: repl.remove,
            potential_before: state.potential,
            potential_after: next.potential,
            value_before: state.value,
            value_after: next.value,
        });
        if integer(improvements.len() as i128) > improvement_bound {
            return Err(Error::Invariant(format!(
                "{} improvements exceed the bound {improvement_bound}",
                improvements.len()
            )));
        }
        state = next;
        order = next_order;
    }

    let trace = SearchTrace {
        improvements,
        oracle_calls: oracle.calls(),
        alpha,
        delta,
        improvement_bound,
        weight_checks,
        replacement_checks: stats.replacement_checks,
        candidates_examined: stats.candidates,
        final_order: order,
        degenerate: false,
    };
    Ok((state, trace))
}

impl fmt::Display for RoundedWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}α", self.0)
    }
}
