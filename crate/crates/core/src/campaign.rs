//! Experiment grids: every (instance, algorithm, epsilon) cell is run
//! independently and reported as one CSV row.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{greedy, linear_nols, naive_marginal_nols, oblivious_ls, BaselineResult};
use crate::error::{Error, Result};
use crate::exact::{brute_force_opt, check_lemma3_and_theorem1, locality_bound, DEFAULT_BRUTE_CAP};
use crate::generate::generate_packing;
use crate::instance::Instance;
use crate::rational::{rational, to_decimal, ObjectiveValue, Rational};
use crate::search::{self, AcceptanceRule, Caps, SearchConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Nols,
    Oblivious,
    Greedy,
    LinearNols,
    Naive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Nols,
        Algorithm::Oblivious,
        Algorithm::Greedy,
        Algorithm::LinearNols,
        Algorithm::Naive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nols => "nols",
            Algorithm::Oblivious => "oblivious",
            Algorithm::Greedy => "greedy",
            Algorithm::LinearNols => "linear-nols",
            Algorithm::Naive => "naive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown algorithm {s:?}")))
    }
}

/// How each cell is run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub caps: Caps,
    pub rule: AcceptanceRule,
    /// Compute `f(O)` when `n` is at most this.
    pub brute_cap: usize,
    /// Audit every `nols` output (needs `f(O)`).
    pub audit: bool,
    pub naive_max_iters: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            caps: Caps::default(),
            rule: AcceptanceRule::default(),
            brute_cap: DEFAULT_BRUTE_CAP,
            audit: false,
            naive_max_iters: 100,
        }
    }
}

/// A generated grid of instances plus the algorithms and epsilons to run.
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignSpec {
    pub n_min: usize,
    pub n_max: usize,
    pub k: usize,
    pub universe_size: usize,
    pub density: f64,
    pub seed: u64,
    pub repetitions: usize,
    pub epsilons: Vec<Rational>,
    pub algorithms: Vec<Algorithm>,
    pub options: RunOptions,
}

impl CampaignSpec {
    pub fn new(n_min: usize, n_max: usize, k: usize, seed: u64) -> Self {
        CampaignSpec {
            n_min,
            n_max,
            k,
            universe_size: 2 * k + 2,
            density: 0.3,
            seed,
            repetitions: 1,
            epsilons: vec![rational(1, 2)],
            algorithms: vec![Algorithm::Nols],
            options: RunOptions::default(),
        }
    }

    /// Seed of repetition `rep` at size `n`: `seed·10⁶ + n·10³ + rep`.
    pub fn instance_seed(&self, n: usize, rep: usize) -> u64 {
        self.seed
            .wrapping_mul(1_000_000)
            .wrapping_add(n as u64 * 1_000)
            .wrapping_add(rep as u64)
    }

    pub fn instances(&self) -> Result<Vec<Instance>> {
        if self.n_min > self.n_max {
            return Err(Error::Domain(format!(
                "n range {}..={} is empty",
                self.n_min, self.n_max
            )));
        }
        let mut out = Vec::new();
        for n in self.n_min..=self.n_max {
            for rep in 0..self.repetitions {
                out.push(generate_packing(
                    n,
                    self.k,
                    self.universe_size,
                    self.density,
                    self.instance_seed(n, rep),
                )?);
            }
        }
        Ok(out)
    }
}

/// One CSV row. Optional columns are empty when not computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignRow {
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub epsilon: Rational,
    pub algorithm: Algorithm,
    pub f_s: Option<ObjectiveValue>,
    pub f_opt: Option<ObjectiveValue>,
    pub ratio: Option<Rational>,
    pub bound: Rational,
    pub improvements: Option<usize>,
    pub oracle_calls: Option<u64>,
    pub terminated: Option<bool>,
    pub cycle: Option<usize>,
    /// `pass`, or `fail:<check>`.
    pub audit: Option<String>,
    pub error: Option<String>,
    pub wall_ms: u128,
}

pub const CSV_HEADER: [&str; 16] = [
    "instance",
    "n",
    "k",
    "epsilon",
    "algorithm",
    "f_s",
    "f_opt",
    "ratio",
    "bound",
    "improvements",
    "oracle_calls",
    "terminated",
    "cycle",
    "audit",
    "error",
    "wall_ms",
];

/// Decimal places of the ratio, bound and value columns.
pub const DECIMAL_PLACES: u32 = 6;

/// Constant in the soft oracle-call ceiling `c (I + 1) k² n^(k² + 1)`.
pub const ORACLE_CEILING_FACTOR: u128 = 4;

/// `c (I + 1) k² n^(k² + 1)`, saturating.
pub fn oracle_ceiling(improvements: usize, n: usize, k: usize) -> u128 {
    let k2 = (k * k) as u32;
    (n as u128)
        .checked_pow(k2 + 1)
        .and_then(|p| p.checked_mul((k * k) as u128))
        .and_then(|p| p.checked_mul(improvements as u128 + 1))
        .and_then(|p| p.checked_mul(ORACLE_CEILING_FACTOR))
        .unwrap_or(u128::MAX)
}

fn opt_string<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl CampaignRow {
    fn record(&self, wall_time: bool) -> Vec<String> {
        let decimal = |v: &Option<ObjectiveValue>| {
            v.map(|v| to_decimal(&v.get(), DECIMAL_PLACES))
                .unwrap_or_default()
        };
        let mut r = vec![
            self.instance.clone(),
            self.n.to_string(),
            self.k.to_string(),
            to_decimal(&self.epsilon, DECIMAL_PLACES),
            self.algorithm.to_string(),
            decimal(&self.f_s),
            decimal(&self.f_opt),
            self.ratio
                .as_ref()
                .map(|r| to_decimal(r, DECIMAL_PLACES))
                .unwrap_or_default(),
            to_decimal(&self.bound, DECIMAL_PLACES),
            opt_string(&self.improvements),
            opt_string(&self.oracle_calls),
            opt_string(&self.terminated),
            opt_string(&self.cycle),
            opt_string(&self.audit),
            opt_string(&self.error),
        ];
        if wall_time {
            r.push(self.wall_ms.to_string());
        }
        r
    }
}

/// Writes the header and rows; `wall_time = false` drops the last column so
/// that reruns are byte-identical.
pub fn write_csv<W: Write>(rows: &[CampaignRow], out: W, wall_time: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header = if wall_time {
        &CSV_HEADER[..]
    } else {
        &CSV_HEADER[..CSV_HEADER.len() - 1]
    };
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.record(wall_time))?;
    }
    w.flush()?;
    Ok(())
}

struct Outcome {
    solution_value: ObjectiveValue,
    improvements: usize,
    oracle_calls: u64,
    terminated: bool,
    cycle: Option<usize>,
    audit: Option<String>,
}

fn from_baseline(r: BaselineResult) -> Outcome {
    Outcome {
        solution_value: r.value,
        improvements: r.iterations,
        oracle_calls: r.oracle_calls,
        terminated: r.terminated,
        cycle: r.cycle_period,
        audit: None,
    }
}

fn run_cell(
    instance: &Instance,
    algorithm: Algorithm,
    epsilon: &Rational,
    options: &RunOptions,
    f_opt: Option<ObjectiveValue>,
) -> Result<Outcome> {
    match algorithm {
        Algorithm::Nols => {
            let mut config = SearchConfig::new(*epsilon);
            config.caps = options.caps;
            config.rule = options.rule;
            let (state, trace) = search::run(instance, &config)?;
            let ceiling = oracle_ceiling(trace.improvement_count(), instance.n(), instance.k());
            if trace.oracle_calls as u128 > ceiling {
                log::warn!(
                    "instance {:?}: {} oracle calls exceed the soft ceiling {ceiling}",
                    instance.name,
                    trace.oracle_calls
                );
            }
            let audit = if options.audit && f_opt.is_some() {
                let report = check_lemma3_and_theorem1(
                    instance,
                    &state,
                    &trace,
                    epsilon,
                    &options.caps,
                    options.brute_cap,
                )?;
                Some(match report.first_failure() {
                    None => "pass".to_string(),
                    Some(c) => format!("fail:{}", c.name),
                })
            } else {
                None
            };
            Ok(Outcome {
                solution_value: state.value,
                improvements: trace.improvement_count(),
                oracle_calls: trace.oracle_calls,
                terminated: true,
                cycle: None,
                audit,
            })
        }
        Algorithm::Oblivious => oblivious_ls(instance, epsilon, &options.caps).map(from_baseline),
        Algorithm::Greedy => greedy(instance).map(from_baseline),
        Algorithm::LinearNols => linear_nols(instance, epsilon, &options.caps).map(from_baseline),
        Algorithm::Naive => {
            naive_marginal_nols(instance, None, options.naive_max_iters, &options.caps)
                .map(from_baseline)
        }
    }
}

/// Runs every cell of `instances × algorithms × epsilons` on a worker pool.
/// Rows come out in cell order regardless of completion order; failing
/// cells become rows with an error tag.
pub fn run_cells(
    instances: &[Instance],
    algorithms: &[Algorithm],
    epsilons: &[Rational],
    options: &RunOptions,
) -> Vec<CampaignRow> {
    let opts: Vec<Option<ObjectiveValue>> = instances
        .par_iter()
        .map(|inst| {
            if inst.n() > options.brute_cap || algorithms.is_empty() {
                return None;
            }
            match brute_force_opt(inst, options.brute_cap) {
                Ok((_, v)) => Some(v),
                Err(e) => {
                    log::warn!("instance {:?}: no optimum ({e})", inst.name);
                    None
                }
            }
        })
        .collect();
    let cells: Vec<(usize, Algorithm, Rational)> = (0..instances.len())
        .flat_map(|i| {
            algorithms
                .iter()
                .flat_map(move |&a| epsilons.iter().map(move |e| (i, a, *e)))
        })
        .collect();
    cells
        .par_iter()
        .map(|(i, algorithm, epsilon)| {
            let instance = &instances[*i];
            let f_opt = opts[*i];
            let started = Instant::now();
            let outcome = run_cell(instance, *algorithm, epsilon, options, f_opt);
            let wall_ms = started.elapsed().as_millis();
            let mut row = CampaignRow {
                instance: instance.name.clone(),
                n: instance.n(),
                k: instance.k(),
                epsilon: *epsilon,
                algorithm: *algorithm,
                f_s: None,
                f_opt,
                ratio: None,
                bound: locality_bound(instance.k(), epsilon),
                improvements: None,
                oracle_calls: None,
                terminated: None,
                cycle: None,
                audit: None,
                error: None,
                wall_ms,
            };
            match outcome {
                Ok(o) => {
                    row.ratio = match f_opt {
                        Some(opt) if !o.solution_value.is_zero() => {
                            Some(opt.get() / o.solution_value.get())
                        }
                        _ => None,
                    };
                    row.f_s = Some(o.solution_value);
                    row.improvements = Some(o.improvements);
                    row.oracle_calls = Some(o.oracle_calls);
                    row.terminated = Some(o.terminated);
                    row.cycle = o.cycle;
                    row.audit = o.audit;
                }
                Err(e) => {
                    log::warn!("instance {:?}, {algorithm}: {e}", instance.name);
                    row.error = Some(e.tag().to_string());
                }
            }
            row
        })
        .collect()
}

/// Generates the spec's instances and runs every cell.
pub fn run_campaign(spec: &CampaignSpec) -> Result<Vec<CampaignRow>> {
    let instances = spec.instances()?;
    Ok(run_cells(
        &instances,
        &spec.algorithms,
        &spec.epsilons,
        &spec.options,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("tabu".parse::<Algorithm>().is_err());
    }

    #[test]
    fn two_bases_nols_and_naive() {
        let rows = run_cells(
            &[fixtures::two_bases()],
            &[Algorithm::Nols, Algorithm::Naive],
            &[rational(1, 2)],
            &RunOptions {
                audit: true,
                ..RunOptions::default()
            },
        );
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].algorithm, Algorithm::Nols);
        assert_eq!(rows[0].terminated, Some(true));
        assert_eq!(rows[0].audit.as_deref(), Some("pass"));
        assert_eq!(rows[0].ratio, Some(rational(1, 1)));
        assert_eq!(rows[1].terminated, Some(false));
        assert!(rows[1].cycle.is_some());
    }

    #[test]
    fn empty_algorithm_list_gives_header_only() {
        let mut spec = CampaignSpec::new(4, 5, 2, 1);
        spec.algorithms.clear();
        let rows = run_campaign(&spec).unwrap();
        assert!(rows.is_empty());
        let mut out = Vec::new();
        write_csv(&rows, &mut out, true).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn ratio_within_bound_and_reproducible() {
        let mut spec = CampaignSpec::new(4, 7, 2, 11);
        spec.repetitions = 2;
        spec.epsilons = vec![rational(1, 4), rational(1, 2)];
        spec.algorithms = vec![Algorithm::Nols, Algorithm::Greedy];
        spec.options.audit = true;
        let rows = run_campaign(&spec).unwrap();
        assert_eq!(rows.len(), 4 * 2 * 2 * 2);
        for row in rows.iter().filter(|r| r.algorithm == Algorithm::Nols) {
            assert!(row.error.is_none());
            assert!(row.ratio.unwrap() <= row.bound);
            assert_eq!(row.audit.as_deref(), Some("pass"));
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&rows, &mut a, false).unwrap();
        write_csv(&run_campaign(&spec).unwrap(), &mut b, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failing_cells_become_error_rows() {
        let rows = run_cells(
            &[fixtures::two_bases()],
            &[Algorithm::LinearNols],
            &[rational(1, 2)],
            &RunOptions::default(),
        );
        assert_eq!(rows[0].error.as_deref(), Some("precondition"));
        assert!(rows[0].f_s.is_none());
    }

    #[test]
    fn ceiling_grows_with_improvements() {
        assert_eq!(oracle_ceiling(0, 2, 1), 4 * 4);
        assert!(oracle_ceiling(3, 5, 2) > oracle_ceiling(2, 5, 2));
        assert_eq!(oracle_ceiling(1, 1000, 5), u128::MAX);
    }
}
