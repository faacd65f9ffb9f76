//! The sketch matrix: rows whose outcomes over burst heads trace a paired
//! Gray code, so that heads far apart always receive different outcomes.
//!
//! The building block is the pattern `m(c)`. One period is
//!
//! ```text
//! oll(0)^c | 0 oll(η₁)^c | … | 0 oll(η_s)^c | 1 llo(ℓ)^c | 1 llo(η_s−1)^c | … | 1 llo(η₁−1)^c | 0
//! ```
//!
//! with `oll(x) = 0^{ℓ−x}1^x` and `llo(x) = 1^x0^{ℓ−x}`. A window of `ℓ`
//! positions sliding over it reports levels `0, 1, …, s, s, …, 0`, each held
//! for `cℓ+1` consecutive heads. Stacking a slow pattern over repeated copies
//! of faster ones yields a paired Gray code over heads.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::gray::gray_index;
use crate::model::{
    ceil_log, ceil_log_ratio, BinaryMatrix, Burst, BurstSpace, OutcomeVector, Thresholds,
    WindowSums,
};
use crate::oracle::{verify_construction, PairPredicate};
use crate::report::{BuildOptions, BuildReport, Deviation};

/// Widest recursive sketch the builders will materialize.
pub const MAX_SKETCH_COLS: usize = 1 << 23;

fn check_pattern_args(ell: usize, thresholds: &Thresholds, c: usize) -> Result<()> {
    if ell == 0 {
        return Err(Error::param("burst length must be at least 1"));
    }
    if thresholds.largest() as usize > ell {
        return Err(Error::param(format!(
            "largest threshold {} exceeds burst length {ell}",
            thresholds.largest()
        )));
    }
    if c == 0 {
        return Err(Error::param("pattern repetition c must be at least 1"));
    }
    Ok(())
}

/// Length of one period of `m(c)`: `(2s+2)(cℓ+1)`.
pub fn m_period_len(ell: usize, s: usize, c: usize) -> usize {
    (2 * s + 2) * (c * ell + 1)
}

/// The blocks of one period: an optional lead bit, then a unit of `ℓ` bits
/// repeated `c` times. A single trailing 0 closes the period.
fn period_blocks(ell: usize, thresholds: &Thresholds) -> Vec<(Option<u8>, Vec<u8>)> {
    let oll = |x: usize| [vec![0u8; ell - x], vec![1u8; x]].concat();
    let llo = |x: usize| [vec![1u8; x], vec![0u8; ell - x]].concat();
    let eta: Vec<usize> = thresholds.values().iter().map(|&t| t as usize).collect();
    let mut blocks = vec![(None, oll(0))];
    blocks.extend(eta.iter().map(|&t| (Some(0), oll(t))));
    blocks.push((Some(1), llo(ell)));
    blocks.extend(eta.iter().rev().map(|&t| (Some(1), llo(t - 1))));
    blocks
}

/// The first `width` bits of the periodic extension of `m(c)`.
pub fn m_pattern(ell: usize, thresholds: &Thresholds, c: usize, width: usize) -> Result<Vec<u8>> {
    check_pattern_args(ell, thresholds, c)?;
    if width == 0 {
        return Err(Error::param("pattern width must be at least 1"));
    }
    let period = m_period_len(ell, thresholds.s() as usize, c);
    let limit = width.min(period);
    let mut out = Vec::with_capacity(limit + ell);
    'period: for (lead, unit) in period_blocks(ell, thresholds) {
        out.extend(lead);
        for _ in 0..c {
            if out.len() >= limit {
                break 'period;
            }
            out.extend_from_slice(&unit);
        }
    }
    out.push(0);
    if width <= out.len() {
        out.truncate(width);
        return Ok(out);
    }
    debug_assert_eq!(out.len(), period);
    Ok(out.iter().copied().cycle().take(width).collect())
}

/// One full period of `m(c)`.
pub fn m_period(ell: usize, thresholds: &Thresholds, c: usize) -> Result<Vec<u8>> {
    let period = m_period_len(ell, thresholds.s() as usize, c);
    m_pattern(ell, thresholds, c, period)
}

/// `c_i = ((ℓ+1)^i − 1)/ℓ`, the repetition count of level `i` when `s = ℓ`.
fn saturated_repetition(ell: usize, i: u32) -> Result<usize> {
    (ell as u64 + 1)
        .checked_pow(i)
        .map(|p| ((p - 1) / ell as u64) as usize)
        .ok_or_else(|| Error::param("sketch recursion depth overflows"))
}

/// One period (`2(ℓ+1)^{i+1}` columns) of the saturated recursion: `m(c_i)`
/// stacked over `ℓ+1` copies of the depth `i−1` matrix.
pub fn rec_saturated(ell: usize, i: u32) -> Result<BinaryMatrix> {
    if ell < 2 || i == 0 {
        return Err(Error::param("rec_saturated needs ell >= 2 and i >= 1"));
    }
    let thresholds = Thresholds::saturation(ell as u32)?;
    let width = (ell as u64 + 1)
        .checked_pow(i + 1)
        .map(|p| 2 * p)
        .filter(|&w| w <= MAX_SKETCH_COLS as u64)
        .ok_or_else(|| Error::param(format!("rec({i}) for ell={ell} exceeds the size cap")))?
        as usize;
    let top = m_period(ell, &thresholds, saturated_repetition(ell, i)?)?;
    debug_assert_eq!(top.len(), width);
    if i == 1 {
        return BinaryMatrix::from_rows(&[top]);
    }
    let lower = rec_saturated(ell, i - 1)?;
    let copies: Vec<&BinaryMatrix> = std::iter::repeat_n(&lower, ell + 1).collect();
    let lower = BinaryMatrix::concat(&copies)?;
    let top = BinaryMatrix::from_rows(&[top])?;
    BinaryMatrix::stack(&[&top, &lower])
}

/// The truncated recursion for general thresholds, without validation.
///
/// With `W` the width of level `i−1`, `α = W/2 − 1` and `r = α mod ℓ`,
/// level `i` is `0^r m(⌊α/ℓ⌋) 0^r` stacked over `s+1` copies of level
/// `i−1`: the first loses `r` columns on the right, the middle `s−1` lose
/// `r` on both sides and the last loses `r` on the left.
pub fn rec_general_raw(ell: usize, thresholds: &Thresholds, i: u32) -> Result<BinaryMatrix> {
    check_pattern_args(ell, thresholds, 1)?;
    if i == 0 {
        return Err(Error::param("recursion depth must be at least 1"));
    }
    if i == 1 {
        return BinaryMatrix::from_rows(&[m_period(ell, thresholds, 1)?]);
    }
    let prev = rec_general_raw(ell, thresholds, i - 1)?;
    let s = thresholds.s() as usize;
    let w = prev.cols();
    let alpha = w / 2 - 1;
    let (c, r) = (alpha / ell, alpha % ell);
    let next_width = (s + 1) * w - 2 * s * r;
    if next_width > MAX_SKETCH_COLS {
        return Err(Error::param(format!(
            "rec'({i}) would have {next_width} columns, above the cap {MAX_SKETCH_COLS}"
        )));
    }

    let mut top = vec![0u8; r];
    top.extend(m_period(ell, thresholds, c)?);
    top.extend(std::iter::repeat_n(0u8, r));

    let left = prev.col_slice(0..w - r)?;
    let middle = prev.col_slice(r..w - r)?;
    let right = prev.col_slice(r..w)?;
    let mut parts = vec![&left];
    parts.extend(std::iter::repeat_n(&middle, s - 1));
    parts.push(&right);
    let lower = BinaryMatrix::concat(&parts)?;
    if lower.cols() != top.len() {
        return Err(Error::Construction(format!(
            "rec'({i}) rows disagree on width: {} vs {}",
            top.len(),
            lower.cols()
        )));
    }
    BinaryMatrix::stack(&[&BinaryMatrix::from_rows(&[top])?, &lower])
}

/// The truncated recursion, validated: over its first `W/2` heads, any two
/// heads at distance `≥ ℓ+2` must receive different outcomes.
pub fn rec_general(
    ell: usize,
    thresholds: &Thresholds,
    i: u32,
    opts: &BuildOptions,
) -> Result<BinaryMatrix> {
    let m = rec_general_raw(ell, thresholds, i)?;
    let n = m.cols() / 2 + ell - 1;
    let front = m.truncate_cols(n)?;
    verify_construction(
        &front,
        thresholds,
        BurstSpace::Fixed { ell },
        PairPredicate::Far(ell + 2),
        opts,
        &format!("rec'({i}) for ell={ell}, thresholds {thresholds}"),
    )?;
    Ok(m)
}

/// Row count of the saturated sketch: `⌈log_{ℓ+1}(n−ℓ+1)⌉`, at least 1.
pub fn saturated_sketch_rows(n: usize, ell: usize) -> usize {
    (ceil_log(ell as u64 + 1, (n - ell + 1) as u64) as usize).max(1)
}

/// Nominal row count for general thresholds: `⌈log_{s+1}((n−ℓ+1)/ℓ)⌉`.
pub fn general_sketch_rows(n: usize, ell: usize, s: u32) -> usize {
    ceil_log_ratio(s as u64 + 1, (n - ell + 1) as u64, ell as u64) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SketchKind {
    /// `s = ℓ`: rows are periodic `m(c_i)` patterns; outcomes are Gray columns.
    Saturated,
    /// Truncated recursion over all thresholds.
    Recursive,
    /// Truncated recursion over the largest threshold only.
    SingleThreshold,
}

#[derive(Clone, Debug)]
pub struct SketchBuild {
    pub matrix: BinaryMatrix,
    pub kind: SketchKind,
    /// Row count given by the nominal formula.
    pub target_rows: usize,
    pub report: BuildReport,
}

/// Builds the sketch `K` for `n` items and bursts of length `ell`: any two
/// heads at distance `≥ ℓ+2` receive different outcomes.
pub fn build_k(
    n: usize,
    ell: usize,
    thresholds: &Thresholds,
    opts: &BuildOptions,
) -> Result<SketchBuild> {
    if ell < 2 || ell > n {
        return Err(Error::param(format!(
            "sketch needs 2 <= ell <= n, got ell={ell}, n={n}"
        )));
    }
    check_pattern_args(ell, thresholds, 1)?;
    let space = BurstSpace::Fixed { ell };
    let far = PairPredicate::Far(ell + 2);
    let s = thresholds.s();

    if s as usize == ell {
        let rows = saturated_sketch_rows(n, ell);
        let patterns = (0..rows)
            .map(|d| {
                m_pattern(
                    ell,
                    thresholds,
                    saturated_repetition(ell, (rows - d) as u32)?,
                    n,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let matrix = BinaryMatrix::from_rows(&patterns)?;
        let verification =
            verify_construction(&matrix, thresholds, space, far, opts, "saturated sketch")?;
        return Ok(SketchBuild {
            matrix,
            kind: SketchKind::Saturated,
            target_rows: rows,
            report: BuildReport {
                verification,
                deviations: vec![],
            },
        });
    }

    let target = general_sketch_rows(n, ell, s);
    let single = Thresholds::new(vec![thresholds.largest()])?;
    sketch_attempt(
        n,
        ell,
        thresholds,
        thresholds,
        SketchKind::Recursive,
        target,
        opts,
    )
    .or_else(|_| {
        sketch_attempt(
            n,
            ell,
            thresholds,
            &single,
            SketchKind::SingleThreshold,
            target,
            opts,
        )
    })
}

/// One try at the general sketch: the truncated recursion with patterns drawn
/// from `pattern_thresholds`, at its nominal depth and one row deeper, checked
/// under the real `thresholds`.
fn sketch_attempt(
    n: usize,
    ell: usize,
    thresholds: &Thresholds,
    pattern_thresholds: &Thresholds,
    kind: SketchKind,
    target: usize,
    opts: &BuildOptions,
) -> Result<SketchBuild> {
    let space = BurstSpace::Fixed { ell };
    let far = PairPredicate::Far(ell + 2);
    let nominal = general_sketch_rows(n, ell, pattern_thresholds.s());
    let mut last_err = None;
    for depth in [nominal.max(1), nominal.max(1) + 1] {
        let full = match rec_general_raw(ell, pattern_thresholds, depth as u32) {
            Ok(m) => m,
            Err(e) => {
                last_err = Some(e);
                break;
            }
        };
        // Heads past the first half revisit earlier outcomes.
        if full.cols() / 2 < n - ell + 1 {
            continue;
        }
        let matrix = full.truncate_cols(n)?;
        match verify_construction(&matrix, thresholds, space, far, opts, "sketch") {
            Ok(verification) => {
                let mut deviations = Vec::new();
                if kind == SketchKind::SingleThreshold {
                    deviations.push(Deviation::SingleThresholdSketch);
                }
                if target == 0 {
                    deviations.push(Deviation::PlaceholderSketchRow);
                } else if depth != target {
                    deviations.push(Deviation::SketchRows {
                        target,
                        actual: depth,
                    });
                }
                return Ok(SketchBuild {
                    matrix,
                    kind,
                    target_rows: target,
                    report: BuildReport {
                        verification,
                        deviations,
                    },
                });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::Construction(format!(
            "no sketch found for n={n}, ell={ell}, thresholds {thresholds}"
        ))
    }))
}

/// The saturated identifier: `⌈log_{ℓ+1}(n−ℓ+1)⌉ − 1` rows of the saturated
/// recursion stacked over the fast row `0^ℓ(1^{ℓ+1}0^{ℓ+1})^∞`. Every head
/// gets its own outcome, so it solves the fixed-length problem alone when
/// `s = ℓ`.
pub fn build_saturated_identifier(
    n: usize,
    ell: usize,
    opts: &BuildOptions,
) -> Result<BinaryMatrix> {
    if ell < 2 || ell > n {
        return Err(Error::param(format!(
            "identifier needs 2 <= ell <= n, got ell={ell}, n={n}"
        )));
    }
    let thresholds = Thresholds::saturation(ell as u32)?;
    let rows = saturated_sketch_rows(n, ell);
    let mut patterns = (0..rows - 1)
        .map(|d| {
            m_pattern(
                ell,
                &thresholds,
                saturated_repetition(ell, (rows - 1 - d) as u32)?,
                n,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let fast: Vec<u8> = (0..n)
        .map(|j| {
            if j >= ell && (j - ell) % (2 * ell + 2) <= ell {
                1
            } else {
                0
            }
        })
        .collect();
    patterns.push(fast);
    let matrix = BinaryMatrix::from_rows(&patterns)?;
    verify_construction(
        &matrix,
        &thresholds,
        BurstSpace::Fixed { ell },
        PairPredicate::All,
        opts,
        "saturated identifier",
    )?;
    Ok(matrix)
}

/// Maps sketch outcomes back to windows of candidate heads.
#[derive(Clone, Debug)]
pub enum SketchDecoder {
    /// Gray-code ranking; class `k` covers heads `k(ℓ+1) ..= k(ℓ+1)+ℓ`.
    Saturated { n: usize, ell: usize },
    /// Precomputed outcome classes.
    Classes {
        classes: HashMap<OutcomeVector, (usize, usize)>,
    },
}

impl SketchDecoder {
    pub fn saturated(n: usize, ell: usize) -> Self {
        SketchDecoder::Saturated { n, ell }
    }

    /// Tabulates the head window of every outcome of `sketch`; fails if a
    /// class is wider than `ℓ+2` heads.
    pub fn from_matrix(sketch: &BinaryMatrix, thresholds: &Thresholds, ell: usize) -> Result<Self> {
        let n = sketch.cols();
        BurstSpace::Fixed { ell }.validate(n)?;
        let sums = WindowSums::new(sketch);
        let mut classes: HashMap<OutcomeVector, (usize, usize)> = HashMap::new();
        for head in 0..=n - ell {
            let b = Burst::new(head, ell)?;
            let o = sums.levels(thresholds, &b, 0..sketch.rows());
            let entry = classes.entry(o).or_insert((head, head));
            entry.1 = head;
            if entry.1 - entry.0 > ell + 1 {
                return Err(Error::Construction(format!(
                    "sketch class spans heads {} and {}, wider than ell+1",
                    entry.0, entry.1
                )));
            }
        }
        Ok(SketchDecoder::Classes { classes })
    }

    pub fn for_build(build: &SketchBuild, thresholds: &Thresholds, ell: usize) -> Result<Self> {
        match build.kind {
            SketchKind::Saturated => Ok(Self::saturated(build.matrix.cols(), ell)),
            _ => Self::from_matrix(&build.matrix, thresholds, ell),
        }
    }

    /// Window of consecutive heads that contains the true head.
    pub fn decode(&self, levels: &[u32]) -> Result<RangeInclusive<usize>> {
        match self {
            SketchDecoder::Saturated { n, ell } => {
                let rank = gray_index(*ell as u32 + 1, levels)
                    .map_err(|e| Error::inconsistent(format!("sketch outcome: {e}")))?;
                let start = rank as usize * (ell + 1);
                let last_head = n - ell;
                if start > last_head {
                    return Err(Error::inconsistent(format!(
                        "sketch outcome rank {rank} points past the last head {last_head}"
                    )));
                }
                Ok(start..=(start + ell).min(last_head))
            }
            SketchDecoder::Classes { classes } => classes
                .get(&OutcomeVector(levels.to_vec()))
                .map(|&(lo, hi)| lo..=hi)
                .ok_or_else(|| {
                    Error::inconsistent(format!("sketch outcome {levels:?} is not realizable"))
                }),
        }
    }
}
