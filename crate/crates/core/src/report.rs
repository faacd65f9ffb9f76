use std::fmt;

/// Knobs shared by the builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Schemes with more columns than this are not exhaustively verified.
    pub verify_cap: usize,
    /// Worker threads for verification.
    pub jobs: usize,
}

pub const DEFAULT_VERIFY_CAP: usize = 1 << 20;

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            verify_cap: DEFAULT_VERIFY_CAP,
            jobs: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verification {
    /// Every relevant burst pair was checked.
    Exhaustive,
    /// The scheme is wider than the verification cap and was not checked.
    BeyondCap { cols: usize, cap: usize },
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verification::Exhaustive => f.write_str("verified exhaustively"),
            Verification::BeyondCap { cols, cap } => {
                write!(f, "unverified beyond cap ({cols} columns > {cap})")
            }
        }
    }
}

/// A place where a built scheme departs from the nominal row count or
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deviation {
    /// The sketch needed more rows than the nominal formula.
    SketchRows { target: usize, actual: usize },
    /// The sketch was built from the largest threshold alone.
    SingleThresholdSketch,
    /// The sketch has a row even though no head pair is far enough apart to need one.
    PlaceholderSketchRow,
    /// The coarse localizer is taller than the `⌈log₂ n⌉ + 1` target.
    Phase1Height { target: usize, actual: usize },
    /// The coarse localizer was supplied by the caller.
    CustomPhase1,
}

impl fmt::Display for Deviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deviation::SketchRows { target, actual } => {
                write!(f, "sketch uses {actual} rows (formula: {target})")
            }
            Deviation::SingleThresholdSketch => {
                f.write_str("sketch built from the largest threshold only")
            }
            Deviation::PlaceholderSketchRow => {
                f.write_str("sketch formula gives 0 rows; one placeholder row kept")
            }
            Deviation::Phase1Height { target, actual } => {
                write!(f, "phase-1 localizer uses {actual} rows (target: {target})")
            }
            Deviation::CustomPhase1 => f.write_str("phase-1 localizer supplied by caller"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildReport {
    pub verification: Verification,
    pub deviations: Vec<Deviation>,
}
