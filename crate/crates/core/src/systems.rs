//! Independence systems and k-exchange neighborhood witnesses.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::setops::{self, for_each_combination};

/// Membership oracle for a hereditary family over `0..ground_size()`.
pub trait IndependenceSystem: Send + Sync {
    fn ground_size(&self) -> usize;

    /// The exchange parameter `k` the system is (claimed to be) a k-exchange system for.
    fn exchange_k(&self) -> usize;

    fn is_independent(&self, set: &[usize]) -> Result<bool>;
}

fn check_elements(set: &[usize], n: usize) -> Result<()> {
    match set.iter().find(|&&e| e >= n) {
        Some(&e) => Err(Error::UnknownElement(e)),
        None => Ok(()),
    }
}

/// k-set packing: element `e` is the item set `sets[e]`, and a collection is
/// independent iff its item sets are pairwise disjoint.
#[derive(Clone, Debug)]
pub struct SetPackingSystem {
    items: Vec<String>,
    sets: Vec<Vec<usize>>,
    k: usize,
    masks: Vec<Vec<u64>>,
}

impl PartialEq for SetPackingSystem {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items && self.sets == other.sets && self.k == other.k
    }
}

impl Eq for SetPackingSystem {}

impl SetPackingSystem {
    pub fn new(items: Vec<String>, sets: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Semantic("set packing requires k >= 1".into()));
        }
        let words = items.len().div_ceil(64).max(1);
        let mut normalized = Vec::with_capacity(sets.len());
        let mut masks = Vec::with_capacity(sets.len());
        for (e, set) in sets.into_iter().enumerate() {
            let set = setops::normalize(set);
            if set.is_empty() || set.len() > k {
                return Err(Error::Semantic(format!(
                    "element {e} has {} items; set packing with k = {k} needs between 1 and {k}",
                    set.len()
                )));
            }
            let mut mask = vec![0u64; words];
            for &item in &set {
                if item >= items.len() {
                    return Err(Error::Semantic(format!(
                        "element {e} uses item {item} outside the {}-item universe",
                        items.len()
                    )));
                }
                mask[item / 64] |= 1 << (item % 64);
            }
            normalized.push(set);
            masks.push(mask);
        }
        Ok(SetPackingSystem {
            items,
            sets: normalized,
            k,
            masks,
        })
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn set_of(&self, e: usize) -> &[usize] {
        &self.sets[e]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn intersects(&self, a: usize, b: usize) -> bool {
        self.masks[a]
            .iter()
            .zip(&self.masks[b])
            .any(|(x, y)| x & y != 0)
    }
}

impl IndependenceSystem for SetPackingSystem {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn exchange_k(&self) -> usize {
        self.k
    }

    fn is_independent(&self, set: &[usize]) -> Result<bool> {
        check_elements(set, self.sets.len())?;
        let mut used = vec![0u64; self.masks.first().map_or(1, Vec::len)];
        for &e in set {
            for (u, m) in used.iter_mut().zip(&self.masks[e]) {
                if *u & m != 0 {
                    return Ok(false);
                }
                *u |= m;
            }
        }
        Ok(true)
    }
}

/// A system given by its bases: independent sets are the subsets of a listed
/// maximal set. `declared_k` is trusted rather than verified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSystem {
    n: usize,
    maximal_sets: Vec<Vec<usize>>,
    declared_k: usize,
}

impl ExplicitSystem {
    pub fn new(n: usize, maximal_sets: Vec<Vec<usize>>, declared_k: usize) -> Result<Self> {
        let maximal_sets: Vec<Vec<usize>> =
            maximal_sets.into_iter().map(setops::normalize).collect();
        for set in &maximal_sets {
            if let Some(&e) = set.iter().find(|&&e| e >= n) {
                return Err(Error::Semantic(format!(
                    "maximal set references unknown element {e}"
                )));
            }
        }
        Ok(ExplicitSystem {
            n,
            maximal_sets,
            declared_k,
        })
    }

    pub fn maximal_sets(&self) -> &[Vec<usize>] {
        &self.maximal_sets
    }
}

impl IndependenceSystem for ExplicitSystem {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn exchange_k(&self) -> usize {
        self.declared_k
    }

    fn is_independent(&self, set: &[usize]) -> Result<bool> {
        check_elements(set, self.n)?;
        if set.is_empty() {
            return Ok(true);
        }
        let sorted = setops::normalize(set.to_vec());
        if sorted.len() != set.len() {
            return Ok(false);
        }
        Ok(self
            .maximal_sets
            .iter()
            .any(|basis| setops::is_subset(&sorted, basis)))
    }
}

/// The systems an instance file can carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum System {
    SetPacking(SetPackingSystem),
    Explicit(ExplicitSystem),
}

impl System {
    pub fn kind(&self) -> &'static str {
        match self {
            System::SetPacking(_) => "set_packing",
            System::Explicit(_) => "explicit",
        }
    }

    pub fn as_packing(&self) -> Option<&SetPackingSystem> {
        match self {
            System::SetPacking(p) => Some(p),
            System::Explicit(_) => None,
        }
    }
}

impl IndependenceSystem for System {
    fn ground_size(&self) -> usize {
        match self {
            System::SetPacking(p) => p.ground_size(),
            System::Explicit(x) => x.ground_size(),
        }
    }

    fn exchange_k(&self) -> usize {
        match self {
            System::SetPacking(p) => p.exchange_k(),
            System::Explicit(x) => x.exchange_k(),
        }
    }

    fn is_independent(&self, set: &[usize]) -> Result<bool> {
        match self {
            System::SetPacking(p) => p.is_independent(set),
            System::Explicit(x) => x.is_independent(set),
        }
    }
}

/// Neighborhoods `Y_e ⊆ B \ A` for `e ∈ A \ B`, extended with `Y_x = {x}`
/// for `x ∈ A ∩ B`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExchangeWitness {
    pub neighborhoods: BTreeMap<usize, Vec<usize>>,
}

impl ExchangeWitness {
    pub fn neighborhood(&self, e: usize) -> &[usize] {
        self.neighborhoods.get(&e).map_or(&[], Vec::as_slice)
    }
}

fn require_independent(system: &dyn IndependenceSystem, set: &[usize], name: &str) -> Result<()> {
    if system.is_independent(set)? {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} is not independent")))
    }
}

/// For set packing, `Y_e` is every set of `B \ A` that meets `e`.
pub fn build_witness(
    system: &SetPackingSystem,
    a: &[usize],
    b: &[usize],
) -> Result<ExchangeWitness> {
    let a = setops::normalize(a.to_vec());
    let b = setops::normalize(b.to_vec());
    require_independent(system, &a, "A")?;
    require_independent(system, &b, "B")?;
    let b_only = setops::difference(&b, &a);
    let mut neighborhoods = BTreeMap::new();
    for &e in &a {
        if setops::contains(&b, e) {
            neighborhoods.insert(e, vec![e]);
        } else {
            let ys = b_only
                .iter()
                .copied()
                .filter(|&z| system.intersects(e, z))
                .collect();
            neighborhoods.insert(e, ys);
        }
    }
    Ok(ExchangeWitness { neighborhoods })
}

/// Which exchange property failed, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessReport {
    Pass {
        subsets_checked: usize,
    },
    MissingNeighborhood {
        element: usize,
    },
    /// `Y_e` contains something outside `B \ A` (or an extension set is not `{x}`).
    Malformed {
        element: usize,
    },
    K1 {
        element: usize,
        size: usize,
    },
    K2 {
        element: usize,
        occurrences: usize,
    },
    K3 {
        subset: Vec<usize>,
    },
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        matches!(self, WitnessReport::Pass { .. })
    }
}

pub const DEFAULT_K3_CAP: usize = 20;

/// Checks K1 and K2 directly and K3 by enumerating every `C ⊆ A \ B` in
/// increasing cardinality, stopping at the first failure.
pub fn verify_witness(
    system: &dyn IndependenceSystem,
    a: &[usize],
    b: &[usize],
    witness: &ExchangeWitness,
    k: usize,
    c_cap: usize,
) -> Result<WitnessReport> {
    let a = setops::normalize(a.to_vec());
    let b = setops::normalize(b.to_vec());
    let a_only = setops::difference(&a, &b);
    let b_only = setops::difference(&b, &a);
    if a_only.len() > c_cap {
        return Err(Error::SizeCap {
            what: "A \\ B",
            size: a_only.len(),
            cap: c_cap,
        });
    }

    for &e in &a_only {
        let Some(ys) = witness.neighborhoods.get(&e) else {
            return Ok(WitnessReport::MissingNeighborhood { element: e });
        };
        if !ys.iter().all(|&z| setops::contains(&b_only, z)) {
            return Ok(WitnessReport::Malformed { element: e });
        }
    }
    for x in setops::intersection(&a, &b) {
        if let Some(ys) = witness.neighborhoods.get(&x) {
            if ys.as_slice() != [x] {
                return Ok(WitnessReport::Malformed { element: x });
            }
        }
    }

    for (&e, ys) in &witness.neighborhoods {
        if ys.len() > k {
            return Ok(WitnessReport::K1 {
                element: e,
                size: ys.len(),
            });
        }
    }

    for &z in &b_only {
        let occurrences = a_only
            .iter()
            .filter(|&&e| witness.neighborhood(e).contains(&z))
            .count();
        if occurrences > k {
            return Ok(WitnessReport::K2 {
                element: z,
                occurrences,
            });
        }
    }

    let mut checked = 0usize;
    let mut failure: Option<Result<Vec<usize>>> = None;
    for size in 0..=a_only.len() {
        for_each_combination(&a_only, size, |c| {
            checked += 1;
            let removed: Vec<usize> = setops::normalize(
                c.iter()
                    .flat_map(|&e| witness.neighborhood(e).to_vec())
                    .collect(),
            );
            let candidate = setops::union(&setops::difference(&b, &removed), c);
            match system.is_independent(&candidate) {
                Ok(true) => true,
                Ok(false) => {
                    failure = Some(Ok(c.to_vec()));
                    false
                }
                Err(err) => {
                    failure = Some(Err(err));
                    false
                }
            }
        });
        if let Some(f) = failure {
            return f.map(|subset| WitnessReport::K3 { subset });
        }
    }
    Ok(WitnessReport::Pass {
        subsets_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("u{i}")).collect()
    }

    fn two_bases() -> ExplicitSystem {
        ExplicitSystem::new(4, vec![vec![0, 1], vec![2, 3]], 2).unwrap()
    }

    #[test]
    fn explicit_membership() {
        let s = two_bases();
        assert!(s.is_independent(&[0, 1]).unwrap());
        assert!(!s.is_independent(&[0, 2]).unwrap());
        assert!(s.is_independent(&[]).unwrap());
        assert!(s.is_independent(&[3]).unwrap());
        assert_eq!(s.is_independent(&[4]), Err(Error::UnknownElement(4)));
    }

    #[test]
    fn packing_membership() {
        // e0 = {0,1}, e1 = {1,2}, e2 = {3}
        let p = SetPackingSystem::new(items(4), vec![vec![0, 1], vec![1, 2], vec![3]], 2).unwrap();
        assert!(p.is_independent(&[]).unwrap());
        assert!(p.is_independent(&[0, 2]).unwrap());
        assert!(!p.is_independent(&[0, 1]).unwrap());
        assert!(SetPackingSystem::new(items(4), vec![vec![0, 1, 2]], 2).is_err());
        assert!(SetPackingSystem::new(items(4), vec![vec![]], 2).is_err());
        assert!(SetPackingSystem::new(items(2), vec![vec![5]], 2).is_err());
    }

    #[test]
    fn witness_for_two_conflicts() {
        // a: e={u,v}; b: b1={u,w}, b2={v,z}
        let p =
            SetPackingSystem::new(items(4), vec![vec![0, 1], vec![0, 2], vec![1, 3]], 2).unwrap();
        let w = build_witness(&p, &[0], &[1, 2]).unwrap();
        assert_eq!(w.neighborhood(0), &[1, 2]);
        let report = verify_witness(&p, &[0], &[1, 2], &w, 2, DEFAULT_K3_CAP).unwrap();
        assert_eq!(report, WitnessReport::Pass { subsets_checked: 2 });
    }

    #[test]
    fn witness_for_equal_sets_is_extension_only() {
        let p = SetPackingSystem::new(items(4), vec![vec![0], vec![1], vec![2, 3]], 2).unwrap();
        let w = build_witness(&p, &[0, 2], &[0, 2]).unwrap();
        assert_eq!(w.neighborhood(0), &[0]);
        assert_eq!(w.neighborhood(2), &[2]);
        assert!(verify_witness(&p, &[0, 2], &[0, 2], &w, 2, 20)
            .unwrap()
            .passed());
    }

    #[test]
    fn witness_over_disjoint_universes_is_empty() {
        let p = SetPackingSystem::new(items(4), vec![vec![0, 1], vec![2, 3]], 2).unwrap();
        let w = build_witness(&p, &[0], &[1]).unwrap();
        assert!(w.neighborhood(0).is_empty());
        assert!(verify_witness(&p, &[0], &[1], &w, 2, 20).unwrap().passed());
    }

    #[test]
    fn build_witness_rejects_dependent_inputs() {
        let p = SetPackingSystem::new(items(3), vec![vec![0, 1], vec![1, 2]], 2).unwrap();
        assert!(matches!(
            build_witness(&p, &[0, 1], &[]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn oversized_neighborhood_is_a_k1_violation() {
        let p = SetPackingSystem::new(items(6), vec![vec![0, 1, 2], vec![0], vec![1], vec![2]], 3)
            .unwrap();
        let w = build_witness(&p, &[0], &[1, 2, 3]).unwrap();
        assert!(verify_witness(&p, &[0], &[1, 2, 3], &w, 3, 20)
            .unwrap()
            .passed());
        assert_eq!(
            verify_witness(&p, &[0], &[1, 2, 3], &w, 2, 20).unwrap(),
            WitnessReport::K1 {
                element: 0,
                size: 3
            }
        );
    }

    #[test]
    fn over_shared_neighbor_is_a_k2_violation() {
        // b-element 2 = {0,1} meets both a-elements; with k = 1 that is too many.
        let p = SetPackingSystem::new(items(2), vec![vec![0], vec![1], vec![0, 1]], 2).unwrap();
        let w = build_witness(&p, &[0, 1], &[2]).unwrap();
        assert_eq!(
            verify_witness(&p, &[0, 1], &[2], &w, 1, 20).unwrap(),
            WitnessReport::K2 {
                element: 2,
                occurrences: 2
            }
        );
    }

    #[test]
    fn bogus_witness_fails_k3() {
        let p = SetPackingSystem::new(items(2), vec![vec![0], vec![0, 1]], 2).unwrap();
        let mut w = ExchangeWitness::default();
        w.neighborhoods.insert(0, vec![]);
        assert_eq!(
            verify_witness(&p, &[0], &[1], &w, 2, 20).unwrap(),
            WitnessReport::K3 { subset: vec![0] }
        );
        assert!(matches!(
            verify_witness(&p, &[0], &[1], &w, 2, 0),
            Err(Error::SizeCap { .. })
        ));
    }
}
