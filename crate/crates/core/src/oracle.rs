//! Ground truth: burst enumeration, exhaustive distinguishability checks,
//! counting bounds and a reference lookup decoder.
//!
//! Every structured decoder in this crate is tested against
//! [`LookupDecoder`], and every builder runs [`check_distinguishable`] on its
//! output before handing it out.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    ceil_log, BinaryMatrix, Burst, BurstSpace, Decoded, OutcomeVector, Scheme, Thresholds,
    WindowSums,
};
use crate::report::{BuildOptions, Verification};

/// All admissible bursts in canonical `(length, head)` order.
pub fn enumerate_bursts(n: usize, space: BurstSpace) -> Vec<Burst> {
    let lengths = match space {
        BurstSpace::Fixed { ell } => ell..=ell,
        BurstSpace::Bounded { ell } => 1..=ell,
    };
    lengths
        .filter(|&len| len >= 1 && len <= n)
        .flat_map(|len| (0..=n - len).map(move |head| Burst::new(head, len).expect("len >= 1")))
        .collect()
}

/// Which burst pairs must receive different outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairPredicate {
    /// Every pair.
    All,
    /// Pairs whose heads are at least this far apart.
    Far(usize),
    /// Pairs whose heads are strictly closer than this.
    Near(usize),
}

impl PairPredicate {
    pub fn holds(&self, a: &Burst, b: &Burst) -> bool {
        let d = a.head().abs_diff(b.head());
        match *self {
            PairPredicate::All => true,
            PairPredicate::Far(min) => d >= min,
            PairPredicate::Near(max) => d < max,
        }
    }

    /// Parses `all`, `far:D` or `near:D`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || {
            Error::param(format!(
                "predicate must be all, far:D or near:D, got {text:?}"
            ))
        };
        if text == "all" {
            return Ok(PairPredicate::All);
        }
        let (kind, dist) = text.split_once(':').ok_or_else(bad)?;
        let dist: usize = dist.parse().map_err(|_| bad())?;
        match kind {
            "far" => Ok(PairPredicate::Far(dist)),
            "near" => Ok(PairPredicate::Near(dist)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PairPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairPredicate::All => f.write_str("all"),
            PairPredicate::Far(d) => write!(f, "far:{d}"),
            PairPredicate::Near(d) => write!(f, "near:{d}"),
        }
    }
}

/// Two distinct bursts with the same outcome. `first < second` in
/// `(length, head)` order, and the pair is the least such pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionWitness {
    pub first: Burst,
    pub second: Burst,
    pub outcome: OutcomeVector,
}

impl fmt::Display for CollisionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} and {} share outcome [{}]",
            self.first, self.second, self.outcome
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishReport {
    pub bursts: usize,
    pub classes: usize,
    pub witness: Option<CollisionWitness>,
}

impl DistinguishReport {
    pub fn is_ok(&self) -> bool {
        self.witness.is_none()
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::param(format!("cannot start {jobs} workers: {e}")))
}

/// Groups all admissible bursts by outcome and looks for the least pair
/// inside a group that satisfies `predicate`. The result does not depend on
/// `jobs`.
pub fn check_distinguishable(
    matrix: &BinaryMatrix,
    thresholds: &Thresholds,
    space: BurstSpace,
    predicate: PairPredicate,
    jobs: usize,
) -> Result<DistinguishReport> {
    check_distinguishable_by(
        matrix,
        thresholds,
        space,
        |a, b| predicate.holds(a, b),
        jobs,
    )
}

/// [`check_distinguishable`] with an arbitrary pure pair predicate.
pub fn check_distinguishable_by<F>(
    matrix: &BinaryMatrix,
    thresholds: &Thresholds,
    space: BurstSpace,
    predicate: F,
    jobs: usize,
) -> Result<DistinguishReport>
where
    F: Fn(&Burst, &Burst) -> bool + Sync,
{
    space.validate(matrix.cols())?;
    let bursts = enumerate_bursts(matrix.cols(), space);
    let sums = WindowSums::new(matrix);
    let rows = matrix.rows();

    pool(jobs)?.install(|| {
        let outcomes: Vec<OutcomeVector> = bursts
            .par_iter()
            .map(|b| sums.levels(thresholds, b, 0..rows))
            .collect();

        let mut groups: HashMap<&OutcomeVector, Vec<usize>> = HashMap::new();
        for (i, o) in outcomes.iter().enumerate() {
            groups.entry(o).or_default().push(i);
        }
        let classes = groups.len();
        let collisions: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() > 1).collect();

        // Indices follow canonical burst order, so (i, j) order is pair order.
        let least = collisions
            .par_iter()
            .filter_map(|group| {
                group.iter().enumerate().find_map(|(k, &i)| {
                    group[k + 1..]
                        .iter()
                        .find(|&&j| predicate(&bursts[i], &bursts[j]))
                        .map(|&j| (i, j))
                })
            })
            .min();

        Ok(DistinguishReport {
            bursts: bursts.len(),
            classes,
            witness: least.map(|(i, j)| CollisionWitness {
                first: bursts[i],
                second: bursts[j],
                outcome: outcomes[i].clone(),
            }),
        })
    })
}

/// Runs the oracle unless the matrix is wider than the cap; a collision
/// becomes an [`Error::UnverifiedConstruction`].
pub fn verify_construction(
    matrix: &BinaryMatrix,
    thresholds: &Thresholds,
    space: BurstSpace,
    predicate: PairPredicate,
    opts: &BuildOptions,
    what: &str,
) -> Result<Verification> {
    if matrix.cols() > opts.verify_cap {
        return Ok(Verification::BeyondCap {
            cols: matrix.cols(),
            cap: opts.verify_cap,
        });
    }
    let report = check_distinguishable(matrix, thresholds, space, predicate, opts.jobs)?;
    match report.witness {
        None => Ok(Verification::Exhaustive),
        Some(w) => Err(Error::UnverifiedConstruction {
            what: format!("{what}, predicate {predicate}"),
            witness: Box::new(w),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountingBound {
    pub bursts: u64,
    /// `⌈log_{s+1}(bursts)⌉`.
    pub min_tests: u32,
    /// `log_{s+1}((n−ℓ+1)/ℓ)`, for fixed-length bursts.
    pub sketch_bound: Option<f64>,
}

pub fn counting_bound(n: usize, s: u32, space: BurstSpace) -> Result<CountingBound> {
    space.validate(n)?;
    if s == 0 {
        return Err(Error::param("s must be at least 1"));
    }
    let bursts = space.burst_count(n);
    let base = s as u64 + 1;
    let sketch_bound = match space {
        BurstSpace::Fixed { ell } => {
            Some(((n - ell + 1) as f64 / ell as f64).ln() / (base as f64).ln())
        }
        BurstSpace::Bounded { .. } => None,
    };
    Ok(CountingBound {
        bursts,
        min_tests: ceil_log(base, bursts),
        sketch_bound,
    })
}

/// Reference decoder: a table from every realizable outcome to its burst.
#[derive(Clone, Debug)]
pub struct LookupDecoder {
    table: HashMap<OutcomeVector, Burst>,
}

impl LookupDecoder {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// The unique burst with this outcome; an unrealized all-zero outcome
    /// means no burst is present.
    pub fn decode(&self, outcome: &OutcomeVector) -> Result<Decoded> {
        if let Some(&b) = self.table.get(outcome) {
            return Ok(Decoded::Burst(b));
        }
        if outcome.is_zero() {
            return Ok(Decoded::NoBurst);
        }
        Err(Error::inconsistent(format!(
            "outcome [{outcome}] is not produced by any burst"
        )))
    }
}

/// Builds the lookup table, failing with the least collision if the scheme
/// is not injective on its burst space.
pub fn build_lookup(scheme: &Scheme) -> Result<LookupDecoder> {
    let bursts = enumerate_bursts(scheme.n(), scheme.space());
    let sums = WindowSums::new(scheme.matrix());
    let mut table: HashMap<OutcomeVector, Burst> = HashMap::with_capacity(bursts.len());
    for b in bursts {
        let o = sums.levels(scheme.thresholds(), &b, 0..scheme.rows());
        if let Some(&prev) = table.get(&o) {
            return Err(Error::UnverifiedConstruction {
                what: "lookup table".into(),
                witness: Box::new(CollisionWitness {
                    first: prev,
                    second: b,
                    outcome: o,
                }),
            });
        }
        table.insert(o, b);
    }
    Ok(LookupDecoder { table })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyReport {
    pub rows: usize,
    pub bound: CountingBound,
    /// `rows / max(1, min_tests)`.
    pub ratio: f64,
    /// Row count promised by the construction's explicit formula, if it has one.
    pub formula_rows: Option<f64>,
    pub within_formula: Option<bool>,
    pub within_factor_2: bool,
    pub within_factor_4: bool,
}

/// Explicit row-count formula for the construction that fits this scheme's
/// parameters.
pub fn formula_rows(n: usize, thresholds: &Thresholds, space: BurstSpace) -> Option<f64> {
    let s = thresholds.s() as u64;
    let ell = space.ell();
    match space {
        BurstSpace::Fixed { ell } if s == ell as u64 => {
            Some(ceil_log(ell as u64 + 1, (n - ell + 1) as u64) as f64)
        }
        BurstSpace::Fixed { ell } => {
            let gap = 2 * thresholds.largest() as i64 - 4;
            (gap > 0).then(|| {
                let refine = (ell as u64).div_ceil(gap as u64);
                let sketch = crate::model::ceil_log_ratio(s + 1, (n - ell + 1) as u64, ell as u64);
                (refine + sketch as u64 + 1) as f64
            })
        }
        BurstSpace::Bounded { .. } if s >= ell as u64 => Some(ceil_log(2, n as u64) as f64 + 1.0),
        BurstSpace::Bounded { .. } => {
            Some(2.0 * ell as f64 / s as f64 + 2.0 * (n as f64).log2() + 3.0)
        }
    }
}

pub fn efficiency_report(scheme: &Scheme) -> Result<EfficiencyReport> {
    let bound = counting_bound(scheme.n(), scheme.thresholds().s(), scheme.space())?;
    let rows = scheme.rows();
    let floor = bound.min_tests.max(1) as usize;
    let formula = formula_rows(scheme.n(), scheme.thresholds(), scheme.space());
    Ok(EfficiencyReport {
        rows,
        ratio: rows as f64 / floor as f64,
        within_formula: formula.map(|f| rows as f64 <= f + 1e-9),
        formula_rows: formula,
        within_factor_2: rows <= 2 * floor,
        within_factor_4: rows <= 4 * floor,
        bound,
    })
}
