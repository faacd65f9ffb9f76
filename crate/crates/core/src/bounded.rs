//! Bursts of length at most `ℓ` under the saturation model `(1, …, s)`.
//!
//! When `s ≥ ℓ` every test count is exact and the integer code `N` (binary
//! column indices plus an all-ones row) pins the burst down from the sum of
//! its positions. When `s < ℓ` the scheme stacks a coarse localizer `C₁`,
//! the block matrix `C₂` (which reveals the length and both endpoints modulo
//! its period) and `N` for the short bursts `C₂` cannot resolve.

use crate::error::{Error, Result};
use crate::model::{
    ceil_log, BinaryMatrix, Burst, BurstSpace, Component, Decoded, OutcomeVector, Role, Scheme,
    Thresholds, WindowSums,
};
use crate::oracle::{verify_construction, PairPredicate};
use crate::report::{BuildOptions, BuildReport, Deviation};

/// Number of index rows of the integer code, `⌈log₂ n⌉`.
pub fn index_rows(n: usize) -> usize {
    ceil_log(2, n as u64) as usize
}

/// Builds the integer code: row `r < ⌈log₂ n⌉` holds bit `r` of each column
/// index (row 0 least significant); the last row is all ones.
pub fn build_n(n: usize) -> Result<BinaryMatrix> {
    if n < 2 {
        return Err(Error::param(format!("integer code needs n >= 2, got {n}")));
    }
    let bits = index_rows(n);
    let mut m = BinaryMatrix::zeros(bits + 1, n)?;
    for j in 0..n {
        for r in 0..bits {
            m.set(r, j, ((j >> r) & 1) as u8);
        }
        m.set(bits, j, 1);
    }
    Ok(m)
}

/// Decodes integer-code levels, which must be exact counts: the last level
/// is the length and the index rows weigh to `Σ_{j=head}^{tail} j`.
pub fn decode_n(levels: &[u32], n: usize, s: u32) -> Result<Decoded> {
    let bits = index_rows(n);
    if levels.len() != bits + 1 {
        return Err(Error::inconsistent(format!(
            "integer-code outcome has {} levels, expected {}",
            levels.len(),
            bits + 1
        )));
    }
    let len = levels[bits] as u64;
    if len == 0 {
        return if levels.iter().all(|&l| l == 0) {
            Ok(Decoded::NoBurst)
        } else {
            Err(Error::inconsistent(
                "index levels are nonzero but the length is 0",
            ))
        };
    }
    if len > s as u64 {
        return Err(Error::inconsistent(format!(
            "length level {len} exceeds the saturation cap {s}"
        )));
    }
    let k: u64 = levels[..bits]
        .iter()
        .enumerate()
        .map(|(r, &l)| (l as u64) << r)
        .sum();
    let twice = 2 * k;
    let offset = len * (len - 1);
    if twice < offset || !(twice - offset).is_multiple_of(2 * len) {
        return Err(Error::inconsistent(format!(
            "position sum {k} is not a run of {len} consecutive indices"
        )));
    }
    let head = ((twice - offset) / (2 * len)) as usize;
    let burst = Burst::new(head, len as usize)?;
    if !burst.fits(n) {
        return Err(Error::inconsistent(format!(
            "decoded {burst} runs past item {n}"
        )));
    }
    Ok(Decoded::Burst(burst))
}

/// `C₂`: `t = ⌈2ℓ/s⌉` rows, each a block of `s` ones repeated with period `p = t·s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C2Matrix {
    pub matrix: BinaryMatrix,
    pub s: usize,
    pub t: usize,
    pub period: usize,
}

pub fn c2_rows(ell: usize, s: usize) -> usize {
    (2 * ell).div_ceil(s)
}

pub fn build_c2(n: usize, ell: usize, s: usize) -> Result<C2Matrix> {
    if s == 0 || s >= ell || ell > n {
        return Err(Error::param(format!(
            "C2 needs 1 <= s < ell <= n, got s={s}, ell={ell}, n={n}"
        )));
    }
    let t = c2_rows(ell, s);
    let period = t * s;
    let mut m = BinaryMatrix::zeros(t, n)?;
    for j in 0..n {
        m.set((j % period) / s, j, 1);
    }
    Ok(C2Matrix {
        matrix: m,
        s,
        t,
        period,
    })
}

/// What `C₂` reveals about a burst.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct C2Reading {
    pub len: usize,
    /// `(head mod p, tail mod p)`, present when `len > s`.
    pub residues: Option<(usize, usize)>,
}

/// Reads the length and, for bursts longer than `s`, the endpoint residues
/// from the single circular run of nonzero `C₂` levels.
pub fn decode_c2(levels: &[u32], ell: usize, s: usize) -> Result<C2Reading> {
    let t = c2_rows(ell, s);
    if levels.len() != t {
        return Err(Error::inconsistent(format!(
            "C2 outcome has {} levels, expected {t}",
            levels.len()
        )));
    }
    if let Some(&l) = levels.iter().find(|&&l| l as usize > s) {
        return Err(Error::inconsistent(format!("C2 level {l} exceeds s={s}")));
    }
    let len: usize = levels.iter().map(|&l| l as usize).sum();
    if len == 0 {
        return Ok(C2Reading {
            len,
            residues: None,
        });
    }
    if len > ell {
        return Err(Error::inconsistent(format!(
            "C2 levels sum to {len} > ell={ell}"
        )));
    }
    let starts: Vec<usize> = (0..t)
        .filter(|&i| levels[i] != 0 && levels[(i + t - 1) % t] == 0)
        .collect();
    if starts.len() != 1 {
        return Err(Error::inconsistent(
            "C2 levels do not form a single circular run",
        ));
    }
    let first = starts[0];
    let mut last = first;
    while levels[(last + 1) % t] != 0 {
        last = (last + 1) % t;
    }
    let span = (last + t - first) % t;
    if (1..span).any(|k| levels[(first + k) % t] as usize != s) {
        return Err(Error::inconsistent(
            "C2 run has an unsaturated interior block",
        ));
    }
    if len <= s {
        return Ok(C2Reading {
            len,
            residues: None,
        });
    }
    let p = t * s;
    let head = ((first + 1) * s - levels[first] as usize) % p;
    let tail = (last * s + levels[last] as usize - 1) % p;
    if (tail + p - head) % p != len - 1 {
        return Err(Error::inconsistent(
            "C2 run endpoints disagree with its length",
        ));
    }
    Ok(C2Reading {
        len,
        residues: Some((head, tail)),
    })
}

/// Default coarse localizer.
///
/// Columns are grouped into aligned blocks of the `C₂` period `p`; a second
/// family of windows of width `p` is centred on each block boundary. Any
/// burst of length at most `ℓ ≤ p/2` lies inside an aligned block or inside
/// a boundary window. The first `⌈log₂ K⌉` rows carry the binary index of
/// the aligned block, the next `⌈log₂(K−1)⌉` rows the index of the boundary
/// window. Returns `None` when a single block covers all items.
pub fn build_c1(n: usize, ell: usize, s: usize) -> Result<Option<BinaryMatrix>> {
    if s == 0 || s >= ell || ell > n {
        return Err(Error::param(format!(
            "C1 needs 1 <= s < ell <= n, got s={s}, ell={ell}, n={n}"
        )));
    }
    let p = c2_rows(ell, s) * s;
    let blocks = n.div_ceil(p);
    if blocks <= 1 {
        return Ok(None);
    }
    let block_rows = index_rows(blocks);
    let window_rows = index_rows(blocks - 1);
    let rows = block_rows + window_rows;
    let mut m = BinaryMatrix::zeros(rows.max(1), n)?;
    let (below, above) = (p.div_ceil(2), p / 2);
    for j in 0..n {
        let block = j / p;
        for r in 0..block_rows {
            m.set(r, j, ((block >> r) & 1) as u8);
        }
        // Boundary k sits at column k·p; its window is [kp − ⌈p/2⌉, kp + ⌊p/2⌋).
        let k = (j + below) / p;
        if k >= 1 && k < blocks && j + below >= k * p && j < k * p + above {
            for r in 0..window_rows {
                m.set(block_rows + r, j, (((k - 1) >> r) & 1) as u8);
            }
        }
    }
    if rows == 0 {
        return Ok(None);
    }
    Ok(Some(m))
}

#[derive(Clone, Debug)]
pub struct BoundedBuild {
    pub scheme: Scheme,
    pub report: BuildReport,
}

/// Builds the bounded-length scheme. For `s ≥ ℓ` this is the integer code
/// alone; otherwise `C₁` over `C₂` over `N`, where `phase1` replaces the
/// default `C₁` when given.
pub fn build_bounded_scheme(
    n: usize,
    ell: usize,
    s: u32,
    phase1: Option<BinaryMatrix>,
    opts: &BuildOptions,
) -> Result<BoundedBuild> {
    let space = BurstSpace::Bounded { ell };
    space.validate(n)?;
    let thresholds = Thresholds::saturation(s)?;
    let integer = build_n(n)?;
    let s_us = s as usize;

    if s_us >= ell {
        if phase1.is_some() {
            return Err(Error::param("a phase-1 matrix is only used when s < ell"));
        }
        let rows = integer.rows();
        let verification = verify_construction(
            &integer,
            &thresholds,
            space,
            PairPredicate::All,
            opts,
            "integer code",
        )?;
        let scheme = Scheme::new(
            integer,
            thresholds,
            space,
            vec![Component {
                role: Role::Integer,
                rows: 0..rows,
            }],
        )?;
        return Ok(BoundedBuild {
            scheme,
            report: BuildReport {
                verification,
                deviations: vec![],
            },
        });
    }

    let c2 = build_c2(n, ell, s_us)?;
    let mut deviations = Vec::new();
    let c1 = match phase1 {
        Some(m) => {
            if m.cols() != n {
                return Err(Error::param(format!(
                    "phase-1 matrix has {} columns, expected {n}",
                    m.cols()
                )));
            }
            deviations.push(Deviation::CustomPhase1);
            Some(m)
        }
        None => build_c1(n, ell, s_us)?,
    };
    let c1_rows = c1.as_ref().map_or(0, BinaryMatrix::rows);
    let target = index_rows(n) + 1;
    if c1_rows > target {
        deviations.push(Deviation::Phase1Height {
            target,
            actual: c1_rows,
        });
    }

    let mut parts: Vec<&BinaryMatrix> = Vec::new();
    if let Some(m) = &c1 {
        parts.push(m);
    }
    parts.push(&c2.matrix);
    parts.push(&integer);
    let matrix = BinaryMatrix::stack(&parts)?;
    let a = c1_rows;
    let b = a + c2.t;
    let rows = matrix.rows();
    let verification = verify_construction(
        &matrix,
        &thresholds,
        space,
        PairPredicate::All,
        opts,
        &format!("bounded scheme n={n}, ell={ell}, s={s}"),
    )?;
    let scheme = Scheme::new(
        matrix,
        thresholds,
        space,
        vec![
            Component {
                role: Role::Phase1,
                rows: 0..a,
            },
            Component {
                role: Role::Phase2,
                rows: a..b,
            },
            Component {
                role: Role::Integer,
                rows: b..rows,
            },
        ],
    )?;
    Ok(BoundedBuild {
        scheme,
        report: BuildReport {
            verification,
            deviations,
        },
    })
}

/// Structured decoder for bounded-length schemes.
#[derive(Clone, Debug)]
pub struct BoundedDecoder {
    scheme: Scheme,
    sums: WindowSums,
}

impl BoundedDecoder {
    pub fn new(scheme: &Scheme) -> Result<Self> {
        let BurstSpace::Bounded { ell } = scheme.space() else {
            return Err(Error::Validation(
                "bounded decoder needs a bounded-length scheme".into(),
            ));
        };
        if !scheme.thresholds().is_saturation() {
            return Err(Error::Validation(
                "bounded schemes use saturation thresholds".into(),
            ));
        }
        let integer = scheme
            .component(Role::Integer)
            .ok_or_else(|| Error::Validation("scheme has no integer component".into()))?;
        if integer.len() != index_rows(scheme.n()) + 1 {
            return Err(Error::Validation(
                "integer component has the wrong height".into(),
            ));
        }
        let s = scheme.thresholds().s() as usize;
        if s < ell {
            let phase2 = scheme
                .component(Role::Phase2)
                .ok_or_else(|| Error::Validation("scheme has no phase2 component".into()))?;
            if phase2.len() != c2_rows(ell, s) {
                return Err(Error::Validation(
                    "phase2 component has the wrong height".into(),
                ));
            }
        }
        Ok(BoundedDecoder {
            scheme: scheme.clone(),
            sums: WindowSums::new(scheme.matrix()),
        })
    }

    pub fn decode(&self, outcome: &OutcomeVector) -> Result<Decoded> {
        let scheme = &self.scheme;
        if outcome.len() != scheme.rows() {
            return Err(Error::inconsistent(format!(
                "outcome has {} levels, scheme has {} rows",
                outcome.len(),
                scheme.rows()
            )));
        }
        if outcome.is_zero() {
            return Ok(Decoded::NoBurst);
        }
        let n = scheme.n();
        let ell = scheme.space().ell();
        let s = scheme.thresholds().s();
        let integer = scheme.component(Role::Integer).expect("checked in new");

        let burst = if s as usize >= ell {
            self.expect_burst(decode_n(outcome.slice(integer), n, s)?)?
        } else {
            let phase2 = scheme.component(Role::Phase2).expect("checked in new");
            let reading = decode_c2(outcome.slice(phase2), ell, s as usize)?;
            match reading.residues {
                None => self.expect_burst(decode_n(outcome.slice(integer), n, s)?)?,
                Some((head_residue, _)) => {
                    self.filter_candidates(outcome, reading.len, head_residue)?
                }
            }
        };
        if self
            .sums
            .levels(scheme.thresholds(), &burst, 0..scheme.rows())
            != *outcome
        {
            return Err(Error::inconsistent(format!(
                "decoded {burst} does not reproduce the outcome"
            )));
        }
        Ok(Decoded::Burst(burst))
    }

    fn expect_burst(&self, d: Decoded) -> Result<Burst> {
        match d {
            Decoded::Burst(b) if b.len() <= self.scheme.space().ell() => Ok(b),
            Decoded::Burst(b) => Err(Error::inconsistent(format!("decoded {b} is too long"))),
            Decoded::NoBurst => Err(Error::inconsistent("integer rows report no burst")),
        }
    }

    /// The unique head `≡ head_residue (mod p)` whose phase-1 outcome matches.
    fn filter_candidates(
        &self,
        outcome: &OutcomeVector,
        len: usize,
        head_residue: usize,
    ) -> Result<Burst> {
        let scheme = &self.scheme;
        let ell = scheme.space().ell();
        let s = scheme.thresholds().s() as usize;
        let p = c2_rows(ell, s) * s;
        let phase1 = scheme.component(Role::Phase1).unwrap_or(0..0);
        let target = outcome.slice(phase1.clone());
        let mut found = None;
        let mut head = head_residue;
        while head + len <= scheme.n() {
            let b = Burst::new(head, len)?;
            if self
                .sums
                .levels(scheme.thresholds(), &b, phase1.clone())
                .levels()
                == target
            {
                if let Some(prev) = found {
                    return Err(Error::inconsistent(format!(
                        "phase-1 rows do not separate {prev} from {b}"
                    )));
                }
                found = Some(b);
            }
            head += p;
        }
        found.ok_or_else(|| Error::inconsistent("no candidate matches the phase-1 rows"))
    }
}

/// One-shot structured decode of a bounded-length scheme outcome.
pub fn decode_bounded(scheme: &Scheme, outcome: &OutcomeVector) -> Result<Decoded> {
    BoundedDecoder::new(scheme)?.decode(outcome)
}
