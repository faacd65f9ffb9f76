//! Domain types shared by every construction: thresholds and the SQGT
//! quantizer, bursts, 0/1 measurement matrices, outcome vectors and schemes.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// Strictly increasing positive thresholds `η₁ < … < η_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Thresholds(Vec<u32>);

impl Thresholds {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("at least one threshold is required"));
        }
        if values[0] == 0 {
            return Err(Error::param("thresholds must be positive"));
        }
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::param(format!(
                "thresholds must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        Ok(Thresholds(values))
    }

    /// The saturation model `(1, …, s)`: outcomes are exact counts capped at `s`.
    pub fn saturation(s: u32) -> Result<Self> {
        Self::new((1..=s).collect())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// Number of thresholds, i.e. the top outcome level.
    pub fn s(&self) -> u32 {
        self.0.len() as u32
    }

    /// The largest threshold `η_s`.
    pub fn largest(&self) -> u32 {
        *self.0.last().expect("non-empty by construction")
    }

    pub fn is_saturation(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v == i as u32 + 1)
    }

    /// Number of thresholds not exceeding `count`.
    pub fn quantize(&self, count: u32) -> u32 {
        self.0.partition_point(|&t| t <= count) as u32
    }
}

impl fmt::Display for Thresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Free-function form of [`Thresholds::quantize`].
pub fn quantize(count: u32, thresholds: &Thresholds) -> u32 {
    thresholds.quantize(count)
}

/// A run of consecutive positives `head, head+1, …, head+len−1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Burst {
    // Field order gives the canonical (length, head) ordering.
    len: usize,
    head: usize,
}

// A burst always holds at least one item, so there is no `is_empty`.
#[allow(clippy::len_without_is_empty)]
impl Burst {
    pub fn new(head: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::param("a burst has at least one positive"));
        }
        Ok(Burst { len, head })
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn tail(&self) -> usize {
        self.head + self.len - 1
    }

    pub fn fits(&self, n: usize) -> bool {
        self.head + self.len <= n
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.fits(n) {
            Ok(())
        } else {
            Err(Error::param(format!(
                "burst {self} does not fit in {n} items"
            )))
        }
    }
}

impl fmt::Display for Burst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(head {}, len {})", self.head, self.len)
    }
}

/// Result of a decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoded {
    Burst(Burst),
    NoBurst,
}

/// A dense row-major 0/1 matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        Ok(BinaryMatrix {
            rows,
            cols,
            bits: vec![0; rows * cols],
        })
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut m = Self::zeros(rows.len(), cols)?;
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::param(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(&b) = row.iter().find(|&&b| b > 1) {
                return Err(Error::param(format!("entry {b} in row {r} is not 0/1")));
            }
            m.bits[r * cols..(r + 1) * cols].copy_from_slice(row);
        }
        Ok(m)
    }

    /// Parses rows of `'0'`/`'1'` characters; spaces are ignored.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<Vec<u8>> = rows
            .iter()
            .map(|s| {
                s.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(Error::param(format!("invalid matrix character {other:?}"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        Self::from_rows(&parsed)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        m.bits.fill(1);
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!(v <= 1);
        self.bits[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Rows `range` as a new matrix.
    pub fn row_slice(&self, range: Range<usize>) -> Result<Self> {
        let rows: Vec<&[u8]> = range.map(|r| self.row(r)).collect();
        Self::from_rows(&rows)
    }

    /// Columns `range` as a new matrix.
    pub fn col_slice(&self, range: Range<usize>) -> Result<Self> {
        let rows: Vec<&[u8]> = (0..self.rows)
            .map(|r| &self.row(r)[range.clone()])
            .collect();
        Self::from_rows(&rows)
    }

    /// Keeps the leftmost `cols` columns.
    pub fn truncate_cols(&self, cols: usize) -> Result<Self> {
        if cols > self.cols {
            return Err(Error::param(format!(
                "cannot truncate {} columns to {cols}",
                self.cols
            )));
        }
        self.col_slice(0..cols)
    }

    /// Vertical concatenation.
    pub fn stack(parts: &[&BinaryMatrix]) -> Result<Self> {
        let cols = parts.first().map(|m| m.cols).unwrap_or(0);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::param("stacked matrices must share a column count"));
        }
        let rows: Vec<&[u8]> = parts
            .iter()
            .flat_map(|m| (0..m.rows).map(move |r| m.row(r)))
            .collect();
        Self::from_rows(&rows)
    }

    /// Horizontal concatenation.
    pub fn concat(parts: &[&BinaryMatrix]) -> Result<Self> {
        let rows = parts.first().map(|m| m.rows).unwrap_or(0);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::param("concatenated matrices must share a row count"));
        }
        let joined: Vec<Vec<u8>> = (0..rows)
            .map(|r| {
                parts
                    .iter()
                    .flat_map(|m| m.row(r).iter().copied())
                    .collect()
            })
            .collect();
        Self::from_rows(&joined)
    }

    /// Raw window sums `Σ_{j=head}^{tail} M[r, j]` for each row.
    pub fn counts(&self, burst: &Burst) -> Result<Vec<u32>> {
        burst.check(self.cols)?;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)[burst.head()..=burst.tail()]
                    .iter()
                    .map(|&b| b as u32)
                    .sum()
            })
            .collect())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = self
                .row(r)
                .iter()
                .map(|&b| if b == 1 { '1' } else { '0' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Per-row prefix sums; window counts in O(rows) per burst.
#[derive(Clone, Debug)]
pub struct WindowSums {
    cols: usize,
    prefix: Vec<Vec<u32>>,
}

impl WindowSums {
    pub fn new(m: &BinaryMatrix) -> Self {
        let prefix = (0..m.rows())
            .map(|r| {
                let mut acc = 0u32;
                std::iter::once(0)
                    .chain(m.row(r).iter().map(|&b| {
                        acc += b as u32;
                        acc
                    }))
                    .collect()
            })
            .collect();
        WindowSums {
            cols: m.cols(),
            prefix,
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.prefix.len()
    }

    pub fn count(&self, row: usize, burst: &Burst) -> u32 {
        let p = &self.prefix[row];
        p[burst.head() + burst.len()] - p[burst.head()]
    }

    /// Quantized outcome restricted to `rows`; the burst must fit.
    pub fn levels(
        &self,
        thresholds: &Thresholds,
        burst: &Burst,
        rows: Range<usize>,
    ) -> OutcomeVector {
        OutcomeVector(
            rows.map(|r| thresholds.quantize(self.count(r, burst)))
                .collect(),
        )
    }

    pub fn outcome(&self, thresholds: &Thresholds, burst: &Burst) -> Result<OutcomeVector> {
        burst.check(self.cols)?;
        Ok(self.levels(thresholds, burst, 0..self.rows()))
    }
}

/// Quantized test results, one level per matrix row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeVector(pub Vec<u32>);

impl OutcomeVector {
    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&l| l == 0)
    }

    pub fn slice(&self, range: Range<usize>) -> &[u32] {
        &self.0[range]
    }

    /// Parses whitespace-separated levels.
    pub fn parse(text: &str) -> Result<Self> {
        text.split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::param(format!("invalid outcome level {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(OutcomeVector)
    }
}

impl fmt::Display for OutcomeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Quantized outcome of `matrix` for `burst`.
pub fn outcome(
    matrix: &BinaryMatrix,
    thresholds: &Thresholds,
    burst: &Burst,
) -> Result<OutcomeVector> {
    let counts = matrix.counts(burst)?;
    Ok(OutcomeVector(
        counts.into_iter().map(|c| thresholds.quantize(c)).collect(),
    ))
}

/// Which bursts are admissible: exactly `ell` positives, or between 1 and `ell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BurstSpace {
    Fixed { ell: usize },
    Bounded { ell: usize },
}

impl BurstSpace {
    pub fn ell(&self) -> usize {
        match *self {
            BurstSpace::Fixed { ell } | BurstSpace::Bounded { ell } => ell,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ell = self.ell();
        if ell == 0 || ell > n {
            return Err(Error::param(format!(
                "burst length bound {ell} must lie in [1, {n}]"
            )));
        }
        Ok(())
    }

    /// Number of admissible bursts among `n` items.
    pub fn burst_count(&self, n: usize) -> u64 {
        match *self {
            BurstSpace::Fixed { ell } => (n + 1).saturating_sub(ell) as u64,
            BurstSpace::Bounded { ell } => (1..=ell.min(n)).map(|len| (n - len + 1) as u64).sum(),
        }
    }
}

/// Outcomes of every admissible burst, in canonical burst order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeMatrix {
    pub bursts: Vec<Burst>,
    pub columns: Vec<OutcomeVector>,
}

impl OutcomeMatrix {
    /// Row `r` across all burst columns.
    pub fn row(&self, r: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c.0[r]).collect()
    }
}

pub fn outcome_matrix(
    matrix: &BinaryMatrix,
    thresholds: &Thresholds,
    space: BurstSpace,
) -> Result<OutcomeMatrix> {
    space.validate(matrix.cols())?;
    let sums = WindowSums::new(matrix);
    let bursts = crate::oracle::enumerate_bursts(matrix.cols(), space);
    let columns = bursts
        .iter()
        .map(|b| sums.levels(thresholds, b, 0..sums.rows()))
        .collect();
    Ok(OutcomeMatrix { bursts, columns })
}

/// Role of a named row range inside a [`Scheme`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Sketch,
    Refine,
    Phase1,
    Phase2,
    Integer,
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Sketch => "sketch",
            Role::Refine => "refine",
            Role::Phase1 => "phase1",
            Role::Phase2 => "phase2",
            Role::Integer => "integer",
        }
    }

    pub fn from_name(name: &str) -> Option<Role> {
        Some(match name {
            "sketch" => Role::Sketch,
            "refine" => Role::Refine,
            "phase1" => Role::Phase1,
            "phase2" => Role::Phase2,
            "integer" => Role::Integer,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub role: Role,
    pub rows: Range<usize>,
}

/// A measurement matrix together with everything needed to interpret it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheme {
    matrix: BinaryMatrix,
    thresholds: Thresholds,
    n: usize,
    space: BurstSpace,
    components: Vec<Component>,
}

impl Scheme {
    /// Validates that components tile `[0, rows)` in order and that the
    /// matrix width is `n`.
    pub fn new(
        matrix: BinaryMatrix,
        thresholds: Thresholds,
        space: BurstSpace,
        components: Vec<Component>,
    ) -> Result<Self> {
        let n = matrix.cols();
        space.validate(n)?;
        let mut next = 0;
        for c in &components {
            if c.rows.start != next || c.rows.end < c.rows.start {
                return Err(Error::Validation(format!(
                    "component {} rows {:?} do not continue from row {next}",
                    c.role.name(),
                    c.rows
                )));
            }
            next = c.rows.end;
        }
        if next != matrix.rows() {
            return Err(Error::Validation(format!(
                "components cover {next} rows but the matrix has {}",
                matrix.rows()
            )));
        }
        Ok(Scheme {
            matrix,
            thresholds,
            n,
            space,
            components,
        })
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> BurstSpace {
        self.space
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, role: Role) -> Option<Range<usize>> {
        self.components
            .iter()
            .find(|c| c.role == role)
            .map(|c| c.rows.clone())
    }

    pub fn outcome(&self, burst: &Burst) -> Result<OutcomeVector> {
        self.admits(burst)?;
        outcome(&self.matrix, &self.thresholds, burst)
    }

    /// Errors unless `burst` belongs to this scheme's burst space.
    pub fn admits(&self, burst: &Burst) -> Result<()> {
        burst.check(self.n)?;
        let ok = match self.space {
            BurstSpace::Fixed { ell } => burst.len() == ell,
            BurstSpace::Bounded { ell } => burst.len() <= ell,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!(
                "burst {burst} is outside the burst space {:?}",
                self.space
            )))
        }
    }
}

/// Smallest `e` with `base^e ≥ value` (so `⌈log_base value⌉` for value ≥ 1; 0 for value ≤ 1).
pub fn ceil_log(base: u64, value: u64) -> u32 {
    assert!(base >= 2);
    let mut e = 0;
    let mut p: u128 = 1;
    while p < value as u128 {
        p *= base as u128;
        e += 1;
    }
    e
}

/// `⌈log_base(num / den)⌉` evaluated exactly; 0 when the ratio is ≤ 1.
pub fn ceil_log_ratio(base: u64, num: u64, den: u64) -> u32 {
    assert!(base >= 2 && den >= 1);
    let mut e = 0;
    let mut p: u128 = den as u128;
    while p < num as u128 {
        p *= base as u128;
        e += 1;
    }
    e
}
