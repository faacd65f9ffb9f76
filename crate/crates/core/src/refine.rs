//! The refinement matrix `R` and the stacked fixed-length scheme.
//!
//! `R` is built from a binary matrix `B` with `ℓ` columns such that
//!
//! 1. the `2ℓ` vectors formed by the columns of `B` and their complements are distinct,
//! 2. column 0 of `B` is zero,
//! 3. every row of `shiftleft(B) − B` has exactly `η_s − 1` entries equal to `−1`.
//!
//! With `R⁻`/`R⁺` the negative/positive parts of `shiftleft(B) − B` (the last
//! column of `R⁺` forced to ones), `R = [R⁻ R⁺ R⁻ R⁺ …]` gives every head `i`
//! a count vector `(η_s−1)·1 + B(·, i)` or `η_s·1 − B(·, i−ℓ)` depending on
//! `i mod 2ℓ`, and those are pairwise distinct by condition 1.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gray::gray_matrix;
use crate::model::{
    BinaryMatrix, Burst, BurstSpace, Component, Decoded, OutcomeVector, Role, Scheme, Thresholds,
    WindowSums,
};
use crate::oracle::{verify_construction, PairPredicate};
use crate::report::{BuildOptions, BuildReport};
use crate::sketch::{build_k, SketchBuild, SketchDecoder};

/// The block matrix `B`: `c` rows and `ℓ = c·2^h + 1` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMatrix {
    h: u32,
    c: usize,
    matrix: BinaryMatrix,
}

impl BMatrix {
    pub fn h(&self) -> u32 {
        self.h
    }

    /// Number of blocks, which is also the row count.
    pub fn c(&self) -> usize {
        self.c
    }

    pub fn ell(&self) -> usize {
        self.matrix.cols()
    }

    /// The threshold this `B` is designed for: `2^{h−1} + 2`.
    pub fn largest_threshold(&self) -> u32 {
        refine_threshold(self.h)
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }
}

pub fn refine_threshold(h: u32) -> u32 {
    (1 << (h - 1)) + 2
}

/// A column of `B`, possibly complemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnRef {
    pub index: usize,
    pub complemented: bool,
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complemented {
            write!(f, "~col {}", self.index)
        } else {
            write!(f, "col {}", self.index)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Duplicate {
        first: ColumnRef,
        second: ColumnRef,
    },
    NonZeroFirstColumn {
        row: usize,
    },
    RunCount {
        row: usize,
        found: usize,
        expected: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Duplicate { first, second } => {
                write!(f, "condition 1: {first} equals {second}")
            }
            Violation::NonZeroFirstColumn { row } => {
                write!(f, "condition 2: column 0 has a 1 in row {row}")
            }
            Violation::RunCount {
                row,
                found,
                expected,
            } => write!(
                f,
                "condition 3: row {row} has {found} falling edges, expected {expected}"
            ),
        }
    }
}

/// Outcome of checking the three conditions; `None` means the condition holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub distinct: Option<Violation>,
    pub zero_first: Option<Violation>,
    pub falling_edges: Option<Violation>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.distinct.is_none() && self.zero_first.is_none() && self.falling_edges.is_none()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        [&self.distinct, &self.zero_first, &self.falling_edges]
            .into_iter()
            .flatten()
    }
}

/// Number of `−1` entries in row `r` of `shiftleft(B) − B` (cyclic falling edges).
fn falling_edges(row: &[u8]) -> usize {
    let l = row.len();
    (0..l)
        .filter(|&i| row[i] == 1 && row[(i + 1) % l] == 0)
        .count()
}

pub fn check_b(b: &BinaryMatrix, largest_threshold: u32) -> ConditionReport {
    let mut seen: HashMap<Vec<u8>, ColumnRef> = HashMap::new();
    let mut distinct = None;
    'outer: for complemented in [false, true] {
        for index in 0..b.cols() {
            let mut col = b.column(index);
            if complemented {
                col.iter_mut().for_each(|x| *x ^= 1);
            }
            let here = ColumnRef {
                index,
                complemented,
            };
            if let Some(&first) = seen.get(&col) {
                distinct = Some(Violation::Duplicate {
                    first,
                    second: here,
                });
                break 'outer;
            }
            seen.insert(col, here);
        }
    }

    let zero_first = (0..b.rows())
        .find(|&r| b.get(r, 0) != 0)
        .map(|row| Violation::NonZeroFirstColumn { row });

    let expected = largest_threshold.saturating_sub(1) as usize;
    let falling = (0..b.rows()).find_map(|r| {
        let found = falling_edges(b.row(r));
        (found != expected).then_some(Violation::RunCount {
            row: r,
            found,
            expected,
        })
    });

    ConditionReport {
        distinct,
        zero_first,
        falling_edges: falling,
    }
}

/// Builds `B` from the binary reflected Gray code of length `h`.
///
/// After a zero column come `c` blocks of width `2^h`. Reading left to
/// right, block `t` puts its all-ones row at row `i = c−1−t` and the Gray
/// rows at rows `i+1, …, i+h` (mod `c`), so every row is a cyclic shift of
/// `[1^{2^h} | Gray rows]` padded with zeros.
pub fn build_b(h: u32, c: usize) -> Result<BMatrix> {
    if h == 0 || h > 16 {
        return Err(Error::param(format!("h must lie in [1, 16], got {h}")));
    }
    if c <= 2 * (h as usize + 1) {
        return Err(Error::param(format!(
            "block count c={c} must exceed 2(h+1) = {}",
            2 * (h + 1)
        )));
    }
    let block = 1usize << h;
    let ell = c * block + 1;
    let gray = gray_matrix(2, h)?;
    let mut m = BinaryMatrix::zeros(c, ell)?;
    for t in 0..c {
        let i = c - 1 - t;
        let base = 1 + t * block;
        for k in 0..block {
            m.set(i, base + k, 1);
            for g in 0..h as usize {
                m.set((i + 1 + g) % c, base + k, gray.get(g, k) as u8);
            }
        }
    }
    let report = check_b(&m, refine_threshold(h));
    if let Some(v) = report.violations().next() {
        return Err(Error::Construction(format!("B(h={h}, c={c}): {v}")));
    }
    Ok(BMatrix { h, c, matrix: m })
}

/// The refinement matrix, `c × n`, with period `2ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrix {
    pub matrix: BinaryMatrix,
    pub ell: usize,
    pub largest_threshold: u32,
}

/// One period `[R⁻ | R⁺]` of the refinement matrix.
fn r_period(b: &BMatrix) -> BinaryMatrix {
    let ell = b.ell();
    let rows: Vec<Vec<u8>> = (0..b.c())
        .map(|r| {
            let row = b.matrix.row(r);
            let next = |i: usize| row[(i + 1) % ell];
            let minus = (0..ell).map(|i| (row[i] == 1 && next(i) == 0) as u8);
            let plus = (0..ell).map(|i| {
                if i == ell - 1 {
                    1
                } else {
                    (row[i] == 0 && next(i) == 1) as u8
                }
            });
            minus.chain(plus).collect()
        })
        .collect();
    BinaryMatrix::from_rows(&rows).expect("non-empty B")
}

pub fn build_r(b: &BMatrix, thresholds: &Thresholds, n: usize) -> Result<RMatrix> {
    if thresholds.largest() != b.largest_threshold() {
        return Err(Error::param(format!(
            "largest threshold {} does not match 2^(h-1)+2 = {} for h={}",
            thresholds.largest(),
            b.largest_threshold(),
            b.h()
        )));
    }
    let ell = b.ell();
    if n < ell {
        return Err(Error::param(format!("n={n} is smaller than ell={ell}")));
    }
    let period = r_period(b);
    let rows: Vec<Vec<u8>> = (0..period.rows())
        .map(|r| period.row(r).iter().copied().cycle().take(n).collect())
        .collect();
    Ok(RMatrix {
        matrix: BinaryMatrix::from_rows(&rows)?,
        ell,
        largest_threshold: thresholds.largest(),
    })
}

/// The count vector `R·b⁽ⁱ⁾` predicted for a head with residue `i mod 2ℓ`.
pub fn predicted_counts(b: &BMatrix, residue: usize) -> Vec<u32> {
    let ell = b.ell();
    let top = b.largest_threshold();
    let r = residue % (2 * ell);
    (0..b.c())
        .map(|row| {
            if r < ell {
                top - 1 + b.matrix.get(row, r) as u32
            } else {
                top - b.matrix.get(row, r - ell) as u32
            }
        })
        .collect()
}

/// Recovers `head mod 2ℓ` from the refinement rows of an outcome.
pub fn decode_r(b: &BMatrix, thresholds: &Thresholds, levels: &[u32]) -> Result<usize> {
    let s = thresholds.s();
    if levels.len() != b.c() {
        return Err(Error::inconsistent(format!(
            "refinement outcome has {} levels, expected {}",
            levels.len(),
            b.c()
        )));
    }
    let bits: Vec<u8> = levels
        .iter()
        .map(|&l| match l {
            l if l == s => Ok(1),
            l if l + 1 == s => Ok(0),
            other => Err(Error::inconsistent(format!(
                "refinement level {other} is neither {s} nor {}",
                s as i64 - 1
            ))),
        })
        .collect::<Result<_>>()?;
    let ell = b.ell();
    for i in 0..ell {
        let col = b.matrix.column(i);
        if col == bits {
            return Ok(i);
        }
        if col.iter().zip(&bits).all(|(x, y)| x != y) {
            return Ok(i + ell);
        }
    }
    Err(Error::inconsistent(
        "refinement outcome matches no column of B or its complement",
    ))
}

/// A fixed-length scheme with its parts.
#[derive(Clone, Debug)]
pub struct FixedBuild {
    pub scheme: Scheme,
    pub sketch: SketchBuild,
    pub b: BMatrix,
    pub report: BuildReport,
}

/// Stacks the sketch `K` over the refinement `R` for bursts of length
/// `ℓ = c·2^h + 1` among `n` items.
pub fn build_fixed_scheme(
    n: usize,
    h: u32,
    c: usize,
    thresholds: &Thresholds,
    opts: &BuildOptions,
) -> Result<FixedBuild> {
    let b = build_b(h, c)?;
    let ell = b.ell();
    if n < ell {
        return Err(Error::param(format!("n={n} is smaller than ell={ell}")));
    }
    let r = build_r(&b, thresholds, n)?;
    let sketch = build_k(n, ell, thresholds, opts)?;
    let k_rows = sketch.matrix.rows();
    let matrix = BinaryMatrix::stack(&[&sketch.matrix, &r.matrix])?;
    let rows = matrix.rows();
    let space = BurstSpace::Fixed { ell };
    let verification = verify_construction(
        &matrix,
        thresholds,
        space,
        PairPredicate::All,
        opts,
        &format!("fixed scheme n={n}, h={h}, c={c}"),
    )?;
    let scheme = Scheme::new(
        matrix,
        thresholds.clone(),
        space,
        vec![
            Component {
                role: Role::Sketch,
                rows: 0..k_rows,
            },
            Component {
                role: Role::Refine,
                rows: k_rows..rows,
            },
        ],
    )?;
    let report = BuildReport {
        verification,
        deviations: sketch.report.deviations.clone(),
    };
    Ok(FixedBuild {
        scheme,
        sketch,
        b,
        report,
    })
}

/// Recovers `(h, c)` from `ℓ = c·2^h + 1` and `η_s = 2^{h−1} + 2`.
pub fn fixed_parameters(ell: usize, largest_threshold: u32) -> Result<(u32, usize)> {
    let bad = || {
        Error::Validation(format!(
            "ell={ell} and largest threshold {largest_threshold} do not fit ell = c*2^h+1, eta_s = 2^(h-1)+2"
        ))
    };
    let step = largest_threshold.checked_sub(2).ok_or_else(bad)?;
    if step == 0 || !step.is_power_of_two() {
        return Err(bad());
    }
    let h = step.trailing_zeros() + 1;
    let block = 1usize << h;
    if ell < 1 || !(ell - 1).is_multiple_of(block) {
        return Err(bad());
    }
    Ok((h, (ell - 1) / block))
}

/// Structured decoder for fixed-length schemes: the sketch narrows the head
/// to a window of at most `ℓ+2` heads and the refinement picks the one with
/// the right residue mod `2ℓ`.
#[derive(Clone, Debug)]
pub struct FixedDecoder {
    scheme: Scheme,
    sums: WindowSums,
    sketch: SketchDecoder,
    b: BMatrix,
}

impl FixedDecoder {
    pub fn new(scheme: &Scheme) -> Result<Self> {
        let BurstSpace::Fixed { ell } = scheme.space() else {
            return Err(Error::Validation(
                "fixed decoder needs a fixed-length scheme".into(),
            ));
        };
        let sketch_rows = scheme
            .component(Role::Sketch)
            .ok_or_else(|| Error::Validation("scheme has no sketch component".into()))?;
        let (h, c) = fixed_parameters(ell, scheme.thresholds().largest())?;
        let b = build_b(h, c)?;
        if scheme.component(Role::Refine).map(|r| r.len()) != Some(c) {
            return Err(Error::Validation(format!(
                "refine component must have {c} rows"
            )));
        }
        let k = scheme.matrix().row_slice(sketch_rows)?;
        let sketch = SketchDecoder::from_matrix(&k, scheme.thresholds(), ell)?;
        Ok(FixedDecoder {
            scheme: scheme.clone(),
            sums: WindowSums::new(scheme.matrix()),
            sketch,
            b,
        })
    }

    pub fn decode(&self, outcome: &OutcomeVector) -> Result<Decoded> {
        match self.decode_burst(outcome) {
            Ok(b) => Ok(Decoded::Burst(b)),
            Err(_) if outcome.len() == self.scheme.rows() && outcome.is_zero() => {
                Ok(Decoded::NoBurst)
            }
            Err(e) => Err(e),
        }
    }

    fn decode_burst(&self, outcome: &OutcomeVector) -> Result<Burst> {
        let scheme = &self.scheme;
        if outcome.len() != scheme.rows() {
            return Err(Error::inconsistent(format!(
                "outcome has {} levels, scheme has {} rows",
                outcome.len(),
                scheme.rows()
            )));
        }
        let ell = scheme.space().ell();
        let sketch_rows = scheme.component(Role::Sketch).expect("checked in new");
        let refine_rows = scheme.component(Role::Refine).expect("checked in new");
        let window = self.sketch.decode(outcome.slice(sketch_rows))?;
        let residue = decode_r(&self.b, scheme.thresholds(), outcome.slice(refine_rows))?;
        let mut hits = window.filter(|h| h % (2 * ell) == residue);
        let head = hits
            .next()
            .ok_or_else(|| Error::inconsistent("sketch window and refinement residue disagree"))?;
        if hits.next().is_some() {
            return Err(Error::inconsistent(
                "sketch window holds two heads with the same residue",
            ));
        }
        let burst = Burst::new(head, ell)?;
        if self
            .sums
            .levels(scheme.thresholds(), &burst, 0..scheme.rows())
            != *outcome
        {
            return Err(Error::inconsistent(format!(
                "decoded {burst} does not reproduce the outcome"
            )));
        }
        Ok(burst)
    }
}

/// One-shot structured decode of a fixed-length scheme outcome.
pub fn decode_fixed(scheme: &Scheme, outcome: &OutcomeVector) -> Result<Decoded> {
    FixedDecoder::new(scheme)?.decode(outcome)
}
