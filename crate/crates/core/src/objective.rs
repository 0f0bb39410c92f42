//! Value oracles for monotone submodular objectives.
//!
//! Ground elements are dense indices `0..n`. A set is passed as a slice of
//! distinct indices; order does not matter.

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
pub use crate::rational::ObjectiveValue;
use crate::rational::{checked_add, Rational};

/// A set function `f : 2^G -> Q` over the ground set `0..ground_size()`.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Raw evaluation. Implementations must reject out-of-range elements.
    fn value(&self, set: &[usize]) -> Result<ObjectiveValue>;
}

fn check_elements(set: &[usize], n: usize) -> Result<()> {
    match set.iter().find(|&&e| e >= n) {
        Some(&e) => Err(Error::UnknownElement(e)),
        None => Ok(()),
    }
}

/// Weighted coverage: `f(S)` is the total weight of the items covered by `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageObjective {
    universe: Vec<String>,
    covers: Vec<Vec<usize>>,
    item_weight: Vec<Rational>,
    unit_weights: bool,
}

impl CoverageObjective {
    /// `covers[e]` lists indices into `universe`. Weights default to 1.
    pub fn new(
        universe: Vec<String>,
        covers: Vec<Vec<usize>>,
        item_weight: Option<Vec<Rational>>,
    ) -> Result<Self> {
        let item_weight = item_weight.unwrap_or_else(|| vec![Rational::one(); universe.len()]);
        if item_weight.len() != universe.len() {
            return Err(Error::Semantic(format!(
                "{} item weights given for a universe of {} items",
                item_weight.len(),
                universe.len()
            )));
        }
        if let Some((i, w)) = item_weight
            .iter()
            .enumerate()
            .find(|(_, w)| w.is_negative())
        {
            return Err(Error::Semantic(format!(
                "item {:?} has negative weight {w}",
                universe[i]
            )));
        }
        let mut normalized = Vec::with_capacity(covers.len());
        for (e, mut c) in covers.into_iter().enumerate() {
            c.sort_unstable();
            c.dedup();
            if c.is_empty() {
                return Err(Error::Semantic(format!("element {e} covers no items")));
            }
            if let Some(&bad) = c.iter().find(|&&i| i >= universe.len()) {
                return Err(Error::Semantic(format!(
                    "element {e} covers item {bad} outside the universe"
                )));
            }
            normalized.push(c);
        }
        let unit_weights = item_weight.iter().all(|w| w.is_one());
        Ok(CoverageObjective {
            universe,
            covers: normalized,
            item_weight,
            unit_weights,
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn covers(&self, e: usize) -> &[usize] {
        &self.covers[e]
    }

    pub fn item_weights(&self) -> &[Rational] {
        &self.item_weight
    }

    pub fn has_unit_weights(&self) -> bool {
        self.unit_weights
    }
}

impl SetFunction for CoverageObjective {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: &[usize]) -> Result<ObjectiveValue> {
        check_elements(set, self.covers.len())?;
        let mut seen = vec![false; self.universe.len()];
        let mut count: i128 = 0;
        let mut total = Rational::zero();
        for &e in set {
            for &item in &self.covers[e] {
                if !seen[item] {
                    seen[item] = true;
                    if self.unit_weights {
                        count += 1;
                    } else {
                        total = checked_add(&total, &self.item_weight[item])?;
                    }
                }
            }
        }
        if self.unit_weights {
            Ok(ObjectiveValue::from_integer(count))
        } else {
            Ok(ObjectiveValue(total))
        }
    }
}

/// Modular objective `f(S) = sum of w(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearObjective {
    elem_weight: Vec<Rational>,
}

impl LinearObjective {
    pub fn new(elem_weight: Vec<Rational>) -> Result<Self> {
        if let Some((e, w)) = elem_weight
            .iter()
            .enumerate()
            .find(|(_, w)| w.is_negative())
        {
            return Err(Error::Semantic(format!(
                "element {e} has negative weight {w}"
            )));
        }
        Ok(LinearObjective { elem_weight })
    }

    pub fn weight(&self, e: usize) -> Rational {
        self.elem_weight[e]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.elem_weight
    }
}

impl SetFunction for LinearObjective {
    fn ground_size(&self) -> usize {
        self.elem_weight.len()
    }

    fn value(&self, set: &[usize]) -> Result<ObjectiveValue> {
        check_elements(set, self.elem_weight.len())?;
        let mut total = Rational::zero();
        for &e in set {
            total = checked_add(&total, &self.elem_weight[e])?;
        }
        Ok(ObjectiveValue(total))
    }
}

/// The objectives an instance file can carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Coverage(CoverageObjective),
    Linear(LinearObjective),
}

impl Objective {
    pub fn kind(&self) -> &'static str {
        match self {
            Objective::Coverage(_) => "coverage",
            Objective::Linear(_) => "linear",
        }
    }

    pub fn as_linear(&self) -> Option<&LinearObjective> {
        match self {
            Objective::Linear(l) => Some(l),
            Objective::Coverage(_) => None,
        }
    }
}

impl SetFunction for Objective {
    fn ground_size(&self) -> usize {
        match self {
            Objective::Coverage(c) => c.ground_size(),
            Objective::Linear(l) => l.ground_size(),
        }
    }

    fn value(&self, set: &[usize]) -> Result<ObjectiveValue> {
        match self {
            Objective::Coverage(c) => c.value(set),
            Objective::Linear(l) => l.value(set),
        }
    }
}

/// Counting front end to a [`SetFunction`]. Every `evaluate` is one oracle
/// call; `marginal` costs two.
pub struct Oracle<'a> {
    f: &'a dyn SetFunction,
    calls: AtomicU64,
}

impl<'a> Oracle<'a> {
    pub fn new(f: &'a dyn SetFunction) -> Self {
        Oracle {
            f,
            calls: AtomicU64::new(0),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.f.ground_size()
    }

    pub fn evaluate(&self, set: &[usize]) -> Result<ObjectiveValue> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.f.value(set)
    }

    /// `f(base + e) - f(base)`; `e` must not already be in `base`.
    pub fn marginal(&self, base: &[usize], e: usize) -> Result<ObjectiveValue> {
        if base.contains(&e) {
            return Err(Error::Precondition(format!(
                "element {e} is already in the base set"
            )));
        }
        let before = self.evaluate(base)?;
        let mut with = Vec::with_capacity(base.len() + 1);
        with.extend_from_slice(base);
        with.push(e);
        self.evaluate(&with)?.checked_sub(&before)
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Outcome of exhaustive certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    Pass {
        subsets: usize,
    },
    /// `f(set + element) < f(set)`.
    NotMonotone {
        set: Vec<usize>,
        element: usize,
    },
    /// `f(smaller + element) - f(smaller) < f(larger + element) - f(larger)`.
    NotSubmodular {
        smaller: Vec<usize>,
        larger: Vec<usize>,
        element: usize,
    },
}

impl Certification {
    pub fn passed(&self) -> bool {
        matches!(self, Certification::Pass { .. })
    }
}

pub const DEFAULT_CERTIFY_CAP: usize = 15;

fn mask_to_set(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Exhaustively certifies monotonicity and decreasing marginals.
///
/// Decreasing marginals are checked on every triple `(S, S + y, x)`; by
/// induction along chains this is equivalent to the condition for every
/// `S ⊆ T`. Monotonicity is likewise checked on single-element steps.
pub fn certify_monotone_submodular(f: &dyn SetFunction, max_n: usize) -> Result<Certification> {
    let n = f.ground_size();
    if n > max_n || n > 25 {
        return Err(Error::SizeCap {
            what: "ground set",
            size: n,
            cap: max_n.min(25),
        });
    }
    let total = 1u32 << n;
    let values = (0..total)
        .map(|m| f.value(&mask_to_set(m, n)).map(|v| v.get()))
        .collect::<Result<Vec<_>>>()?;

    for s in 0..total {
        for x in (0..n).filter(|&x| s & (1 << x) == 0) {
            if values[(s | (1 << x)) as usize] < values[s as usize] {
                return Ok(Certification::NotMonotone {
                    set: mask_to_set(s, n),
                    element: x,
                });
            }
        }
    }
    for s in 0..total {
        for y in (0..n).filter(|&y| s & (1 << y) == 0) {
            let t = s | (1 << y);
            for x in (0..n).filter(|&x| t & (1 << x) == 0) {
                let gain_s = values[(s | (1 << x)) as usize] - values[s as usize];
                let gain_t = values[(t | (1 << x)) as usize] - values[t as usize];
                if gain_s < gain_t {
                    return Ok(Certification::NotSubmodular {
                        smaller: mask_to_set(s, n),
                        larger: mask_to_set(t, n),
                        element: x,
                    });
                }
            }
        }
    }
    Ok(Certification::Pass {
        subsets: total as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{integer, rational};
    use proptest::prelude::*;

    fn labels(names: &str) -> Vec<String> {
        names.chars().map(|c| c.to_string()).collect()
    }

    /// Universe {a,b,c,x,y,z}; S1={a,b}, S2={a,c}, S3={x,y}, S4={x,z}.
    fn two_bases_coverage() -> CoverageObjective {
        CoverageObjective::new(
            labels("abcxyz"),
            vec![vec![0, 1], vec![0, 2], vec![3, 4], vec![3, 5]],
            None,
        )
        .unwrap()
    }

    struct SquaredCardinality(usize);

    impl SetFunction for SquaredCardinality {
        fn ground_size(&self) -> usize {
            self.0
        }
        fn value(&self, set: &[usize]) -> Result<ObjectiveValue> {
            check_elements(set, self.0)?;
            Ok(ObjectiveValue::from_integer(
                (set.len() * set.len()) as i128,
            ))
        }
    }

    #[test]
    fn evaluate_examples() {
        let f = two_bases_coverage();
        let o = Oracle::new(&f);
        assert_eq!(
            o.evaluate(&[0, 1]).unwrap(),
            ObjectiveValue::from_integer(3)
        );
        assert_eq!(o.evaluate(&[]).unwrap(), ObjectiveValue::zero());
        assert_eq!(
            o.evaluate(&[0, 1, 2, 3]).unwrap(),
            ObjectiveValue::from_integer(6)
        );
        assert_eq!(o.evaluate(&[7]), Err(Error::UnknownElement(7)));
        assert_eq!(o.calls(), 4);
    }

    #[test]
    fn marginal_examples() {
        let f = two_bases_coverage();
        let o = Oracle::new(&f);
        assert_eq!(
            o.marginal(&[0, 1], 2).unwrap(),
            ObjectiveValue::from_integer(2)
        );
        assert_eq!(o.marginal(&[], 0).unwrap(), ObjectiveValue::from_integer(2));
        assert!(matches!(
            o.marginal(&[0, 1], 1),
            Err(Error::Precondition(_))
        ));
        assert_eq!(o.calls(), 4);

        let dominated =
            CoverageObjective::new(labels("ab"), vec![vec![0, 1], vec![1]], None).unwrap();
        let o = Oracle::new(&dominated);
        assert_eq!(o.marginal(&[0], 1).unwrap(), ObjectiveValue::zero());
    }

    #[test]
    fn weighted_coverage_counts_each_item_once() {
        let f = CoverageObjective::new(
            labels("ab"),
            vec![vec![0], vec![0, 1]],
            Some(vec![rational(1, 2), integer(3)]),
        )
        .unwrap();
        assert_eq!(f.value(&[0, 1]).unwrap().get(), rational(7, 2));
        assert_eq!(f.value(&[0]).unwrap().get(), rational(1, 2));
    }

    #[test]
    fn constructor_rejects_bad_covers() {
        assert!(CoverageObjective::new(labels("a"), vec![vec![]], None).is_err());
        assert!(CoverageObjective::new(labels("a"), vec![vec![1]], None).is_err());
        assert!(
            CoverageObjective::new(labels("a"), vec![vec![0]], Some(vec![integer(-1)])).is_err()
        );
        assert!(LinearObjective::new(vec![integer(1), integer(-2)]).is_err());
    }

    #[test]
    fn certification_examples() {
        let f = two_bases_coverage();
        assert!(certify_monotone_submodular(&f, DEFAULT_CERTIFY_CAP)
            .unwrap()
            .passed());

        let sq = SquaredCardinality(3);
        assert_eq!(
            certify_monotone_submodular(&sq, DEFAULT_CERTIFY_CAP).unwrap(),
            Certification::NotSubmodular {
                smaller: vec![],
                larger: vec![0],
                element: 1
            }
        );

        let lin = LinearObjective::new(vec![integer(3), rational(1, 2), integer(0)]).unwrap();
        assert!(certify_monotone_submodular(&lin, DEFAULT_CERTIFY_CAP)
            .unwrap()
            .passed());

        let big = SquaredCardinality(16);
        assert!(matches!(
            certify_monotone_submodular(&big, DEFAULT_CERTIFY_CAP),
            Err(Error::SizeCap { .. })
        ));
    }

    struct Decreasing;

    impl SetFunction for Decreasing {
        fn ground_size(&self) -> usize {
            2
        }
        fn value(&self, set: &[usize]) -> Result<ObjectiveValue> {
            Ok(ObjectiveValue::from_integer(-(set.len() as i128)))
        }
    }

    #[test]
    fn certification_reports_non_monotone() {
        assert_eq!(
            certify_monotone_submodular(&Decreasing, 15).unwrap(),
            Certification::NotMonotone {
                set: vec![],
                element: 0
            }
        );
    }

    fn coverage_strategy() -> impl Strategy<Value = CoverageObjective> {
        (1usize..7, 1usize..8).prop_flat_map(|(n, u)| {
            prop::collection::vec(prop::collection::btree_set(0..u, 1..=u.min(4)), n).prop_map(
                move |covers| {
                    let universe = (0..u).map(|i| format!("i{i}")).collect();
                    let covers = covers
                        .into_iter()
                        .map(|c| c.into_iter().collect())
                        .collect();
                    CoverageObjective::new(universe, covers, None).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn coverage_is_monotone_along_chains(f in coverage_strategy(), order in prop::collection::vec(any::<u8>(), 8)) {
            let n = f.ground_size();
            let mut chain: Vec<usize> = Vec::new();
            let mut prev = f.value(&chain).unwrap();
            prop_assert!(prev.is_zero());
            for i in 0..n {
                let e = (order[i] as usize + i) % n;
                if chain.contains(&e) { continue; }
                chain.push(e);
                let v = f.value(&chain).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
        }

        #[test]
        fn prefix_marginals_telescope(f in coverage_strategy(), seed in any::<u64>()) {
            let n = f.ground_size();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let o = Oracle::new(&f);
            let mut total = Rational::zero();
            for i in 0..n {
                total += o.marginal(&perm[..i], perm[i]).unwrap().get();
            }
            prop_assert_eq!(total, f.value(&perm).unwrap().get());
        }

        #[test]
        fn marginals_decrease(f in coverage_strategy(), smask in any::<u8>(), extra in any::<u8>(), x in 0usize..7) {
            let n = f.ground_size();
            let x = x % n;
            let s: Vec<usize> = (0..n).filter(|&i| i != x && smask & (1 << i) != 0).collect();
            let t: Vec<usize> = (0..n).filter(|&i| i != x && (smask | extra) & (1 << i) != 0).collect();
            let o = Oracle::new(&f);
            prop_assert!(o.marginal(&s, x).unwrap() >= o.marginal(&t, x).unwrap());
        }
    }

    /// Oracle check: the single-step certification agrees with a direct
    /// enumeration of every `S ⊆ T`, `x ∉ T`.
    #[test]
    fn local_certification_matches_full_enumeration() {
        fn full_check(f: &dyn SetFunction) -> bool {
            let n = f.ground_size();
            let v = |m: u32| f.value(&mask_to_set(m, n)).unwrap().get();
            for t in 0u32..(1 << n) {
                let mut s = t;
                loop {
                    if v(s) > v(t) {
                        return false;
                    }
                    for x in (0..n).filter(|&x| t & (1 << x) == 0) {
                        if v(s | 1 << x) - v(s) < v(t | 1 << x) - v(t) {
                            return false;
                        }
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & t;
                }
            }
            true
        }
        let sq = SquaredCardinality(4);
        assert_eq!(
            full_check(&sq),
            certify_monotone_submodular(&sq, 15).unwrap().passed()
        );
        let cov = two_bases_coverage();
        assert_eq!(
            full_check(&cov),
            certify_monotone_submodular(&cov, 15).unwrap().passed()
        );
        // a budget-additive function: min(|S|, 2) is submodular; max-style supermodular is not
        struct Capped;
        impl SetFunction for Capped {
            fn ground_size(&self) -> usize {
                4
            }
            fn value(&self, set: &[usize]) -> Result<ObjectiveValue> {
                Ok(ObjectiveValue::from_integer(set.len().min(2) as i128))
            }
        }
        assert!(full_check(&Capped));
        assert!(certify_monotone_submodular(&Capped, 15).unwrap().passed());
    }
}
