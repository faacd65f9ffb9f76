use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use burst_sqgt::bounded::{
    build_bounded_scheme, build_c2, build_n, decode_c2, decode_n, BoundedDecoder,
};
use burst_sqgt::gray::{gray_index, gray_matrix};
use burst_sqgt::io::{load_matrix, load_scheme, save_scheme, SchemeFilePair};
use burst_sqgt::model::{
    BinaryMatrix, Burst, BurstSpace, Decoded, OutcomeVector, Scheme, Thresholds,
};
use burst_sqgt::oracle::{
    build_lookup, check_distinguishable, counting_bound, formula_rows, PairPredicate,
};
use burst_sqgt::refine::{build_b, build_fixed_scheme, check_b, FixedDecoder};
use burst_sqgt::report::{BuildOptions, BuildReport, DEFAULT_VERIFY_CAP};
use burst_sqgt::sketch::m_pattern;
use burst_sqgt::Error;

#[derive(Parser)]
#[command(
    name = "sqgt",
    version,
    about = "Burst-locating semiquantitative group testing schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sketch-and-refine scheme for bursts of length c*2^h+1.
    BuildFixed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        c: usize,
        /// Comma-separated increasing thresholds, e.g. 1,2,4.
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<u32>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VERIFY_CAP)]
        verify_cap: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Build a scheme for bursts of length at most ell under thresholds (1..s).
    BuildBounded {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        out: PathBuf,
        /// Matrix file replacing the default phase-1 localizer.
        #[arg(long)]
        c1: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_VERIFY_CAP)]
        verify_cap: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Exhaustively check that a scheme separates its bursts.
    Verify {
        #[arg(long)]
        scheme: PathBuf,
        /// all, far:DIST or near:DIST
        #[arg(long, default_value = "all")]
        predicate: String,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the outcome levels of one burst.
    Simulate {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        head: usize,
        /// Defaults to the scheme's burst length bound.
        #[arg(long)]
        len: Option<usize>,
    },
    /// Recover the burst from outcome levels.
    Decode {
        #[arg(long)]
        scheme: PathBuf,
        /// Space-separated levels.
        #[arg(long, allow_hyphen_values = true)]
        outcome: String,
    },
    /// Print the counting bound as a CSV line:
    /// mode,n,ell,s,bursts,min_tests,formula_rows.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        s: u32,
        #[arg(long, value_enum, default_value_t = Mode::Fixed)]
        mode: Mode,
    },
    /// Run the built-in golden checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fixed,
    Bounded,
}

/// Exit statuses.
const VERIFY_FAILED: u8 = 1;
const BAD_PARAMS: u8 = 2;
const IO_FAILED: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnverifiedConstruction { .. } | Error::Construction(_) => VERIFY_FAILED,
        Error::Parameter(_) | Error::InconsistentOutcome(_) => BAD_PARAMS,
        Error::Parse { .. } | Error::Validation(_) | Error::Io { .. } => IO_FAILED,
    }
}

fn options(verify_cap: usize, jobs: Option<usize>) -> Result<BuildOptions, Error> {
    let mut opts = BuildOptions {
        verify_cap,
        ..BuildOptions::default()
    };
    if let Some(j) = jobs {
        opts.jobs = checked_jobs(j)?;
    }
    Ok(opts)
}

fn checked_jobs(jobs: usize) -> Result<usize, Error> {
    if jobs == 0 {
        return Err(Error::Parameter("--jobs must be at least 1".into()));
    }
    Ok(jobs)
}

fn print_build(scheme: &Scheme, report: &BuildReport, pair: &SchemeFilePair) {
    println!(
        "wrote {} and {}",
        pair.matrix.display(),
        pair.metadata.display()
    );
    let parts: Vec<String> = scheme
        .components()
        .iter()
        .map(|c| format!("{} {}", c.role.name(), c.rows.len()))
        .collect();
    println!(
        "n={} ell={} thresholds={} rows={} ({})",
        scheme.n(),
        scheme.space().ell(),
        scheme.thresholds(),
        scheme.rows(),
        parts.join(", ")
    );
    println!("{}", report.verification);
    for d in &report.deviations {
        println!("deviation: {d}");
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::BuildFixed {
            n,
            h,
            c,
            thresholds,
            out,
            verify_cap,
            jobs,
        } => {
            let opts = options(verify_cap, jobs)?;
            let thresholds = Thresholds::new(thresholds)?;
            let built = build_fixed_scheme(n, h, c, &thresholds, &opts)?;
            let pair = SchemeFilePair::from_prefix(&out);
            save_scheme(&built.scheme, &pair)?;
            print_build(&built.scheme, &built.report, &pair);
        }
        Command::BuildBounded {
            n,
            ell,
            s,
            out,
            c1,
            verify_cap,
            jobs,
        } => {
            let opts = options(verify_cap, jobs)?;
            let phase1 = c1.map(|p| load_matrix(&p)).transpose()?;
            let built = build_bounded_scheme(n, ell, s, phase1, &opts)?;
            let pair = SchemeFilePair::from_prefix(&out);
            save_scheme(&built.scheme, &pair)?;
            print_build(&built.scheme, &built.report, &pair);
        }
        Command::Verify {
            scheme,
            predicate,
            jobs,
        } => {
            let predicate = PairPredicate::parse(&predicate)?;
            let jobs = match jobs {
                Some(j) => checked_jobs(j)?,
                None => BuildOptions::default().jobs,
            };
            let scheme = load_scheme(&SchemeFilePair::from_prefix(&scheme))?;
            let report = check_distinguishable(
                scheme.matrix(),
                scheme.thresholds(),
                scheme.space(),
                predicate,
                jobs,
            )?;
            println!("predicate {predicate}");
            println!("bursts {}", report.bursts);
            println!("classes {}", report.classes);
            if let Some(w) = &report.witness {
                println!("collision {w}");
                return Ok(VERIFY_FAILED);
            }
            println!("ok");
        }
        Command::Simulate { scheme, head, len } => {
            let scheme = load_scheme(&SchemeFilePair::from_prefix(&scheme))?;
            let burst = Burst::new(head, len.unwrap_or(scheme.space().ell()))?;
            println!("{}", scheme.outcome(&burst)?);
        }
        Command::Decode { scheme, outcome } => {
            let scheme = load_scheme(&SchemeFilePair::from_prefix(&scheme))?;
            let outcome = OutcomeVector::parse(&outcome)?;
            match decode(&scheme, &outcome)? {
                Decoded::Burst(b) => println!("{} {}", b.head(), b.len()),
                Decoded::NoBurst => println!("NO_BURST"),
            }
        }
        Command::Bounds { n, ell, s, mode } => {
            let space = match mode {
                Mode::Fixed => BurstSpace::Fixed { ell },
                Mode::Bounded => BurstSpace::Bounded { ell },
            };
            let bound = counting_bound(n, s, space)?;
            let formula = formula_rows(n, &Thresholds::saturation(s)?, space)
                .map(|f| format!("{f:.3}"))
                .unwrap_or_default();
            let mode = match mode {
                Mode::Fixed => "fixed",
                Mode::Bounded => "bounded",
            };
            println!(
                "{mode},{n},{ell},{s},{},{},{formula}",
                bound.bursts, bound.min_tests
            );
        }
        Command::Selftest => return Ok(selftest()),
    }
    Ok(0)
}

/// Structured decoding when the scheme has a known layout, table lookup otherwise.
fn decode(scheme: &Scheme, outcome: &OutcomeVector) -> Result<Decoded, Error> {
    if outcome.len() != scheme.rows() {
        return Err(Error::InconsistentOutcome(format!(
            "outcome has {} levels, scheme has {} rows",
            outcome.len(),
            scheme.rows()
        )));
    }
    let structured = match scheme.space() {
        BurstSpace::Fixed { .. } => FixedDecoder::new(scheme).map(|d| d.decode(outcome)),
        BurstSpace::Bounded { .. } => BoundedDecoder::new(scheme).map(|d| d.decode(outcome)),
    };
    match structured {
        Ok(result) => result,
        Err(Error::Validation(_)) => build_lookup(scheme)?.decode(outcome),
        Err(e) => Err(e),
    }
}

const M_GOLDEN: &str = "000000 0000001 0000011 0001111 1111111 1111000 1100000 1000000 0";

const B_GOLDEN: [&str; 7] = [
    "0 0011 0110 0000 0000 0000 0000 1111",
    "0 0110 0000 0000 0000 0000 1111 0011",
    "0 0000 0000 0000 0000 1111 0011 0110",
    "0 0000 0000 0000 1111 0011 0110 0000",
    "0 0000 0000 1111 0011 0110 0000 0000",
    "0 0000 1111 0011 0110 0000 0000 0000",
    "0 1111 0011 0110 0000 0000 0000 0000",
];

fn bits(s: &str) -> Vec<u8> {
    s.bytes()
        .filter(|b| !b.is_ascii_whitespace())
        .map(|b| b - b'0')
        .collect()
}

fn check(name: &str, f: impl FnOnce() -> Result<(), String>) -> bool {
    match f() {
        Ok(()) => {
            println!("PASS {name}");
            true
        }
        Err(msg) => {
            println!("FAIL {name}: {msg}");
            false
        }
    }
}

fn ensure(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn round_trip(
    scheme: &Scheme,
    decode_one: impl Fn(&OutcomeVector) -> Result<Decoded, Error>,
) -> Result<(), String> {
    for b in burst_sqgt::oracle::enumerate_bursts(scheme.n(), scheme.space()) {
        let o = scheme.outcome(&b).map_err(|e| e.to_string())?;
        let got = decode_one(&o).map_err(|e| format!("{b}: {e}"))?;
        ensure(got == Decoded::Burst(b), &format!("{b} decoded as {got:?}"))?;
    }
    Ok(())
}

fn selftest() -> u8 {
    let e = |e: Error| e.to_string();
    let opts = BuildOptions::default();
    let results = [
        check("m pattern for ell=6, thresholds 1,2,4", || {
            let t = Thresholds::new(vec![1, 2, 4]).map_err(e)?;
            ensure(
                m_pattern(6, &t, 1, 56).map_err(e)? == bits(M_GOLDEN),
                "pattern differs",
            )
        }),
        check("B for h=2, c=7", || {
            let b = build_b(2, 7).map_err(e)?;
            let rows: Vec<Vec<u8>> = B_GOLDEN.iter().map(|r| bits(r)).collect();
            let golden = BinaryMatrix::from_rows(&rows).map_err(e)?;
            ensure(*b.matrix() == golden, "matrix differs")?;
            ensure(check_b(b.matrix(), 4).all_pass(), "conditions fail")
        }),
        check("integer code for n=8", || {
            let m = build_n(8).map_err(e)?;
            let counts = m.counts(&Burst::new(2, 3).map_err(e)?).map_err(e)?;
            ensure(counts == [1, 2, 1, 3], "levels differ")?;
            ensure(
                decode_n(&counts, 8, 8).map_err(e)? == Decoded::Burst(Burst::new(2, 3).map_err(e)?),
                "decode differs",
            )
        }),
        check("C2 wrap-around for n=16, ell=4, s=2", || {
            let c2 = build_c2(16, 4, 2).map_err(e)?;
            let counts = c2.matrix.counts(&Burst::new(7, 3).map_err(e)?).map_err(e)?;
            let reading = decode_c2(&counts, 4, 2).map_err(e)?;
            ensure(reading.residues == Some((7, 1)), "residues differ")
        }),
        check("Gray ranking q=3, h=3", || {
            let g = gray_matrix(3, 3).map_err(e)?;
            for col in 0..g.cols() {
                ensure(
                    gray_index(3, &g.column(col)).map_err(e)? == col as u64,
                    "rank differs",
                )?;
            }
            Ok(())
        }),
        check("fixed scheme n=116, h=2, c=7", || {
            let t = Thresholds::new(vec![1, 2, 4]).map_err(e)?;
            let built = build_fixed_scheme(116, 2, 7, &t, &opts).map_err(e)?;
            let dec = FixedDecoder::new(&built.scheme).map_err(e)?;
            round_trip(&built.scheme, |o| dec.decode(o))
        }),
        check("bounded scheme n=128, ell=8, s=2", || {
            let built = build_bounded_scheme(128, 8, 2, None, &opts).map_err(e)?;
            let dec = BoundedDecoder::new(&built.scheme).map_err(e)?;
            round_trip(&built.scheme, |o| dec.decode(o))?;
            let zero = OutcomeVector(vec![0; built.scheme.rows()]);
            ensure(
                dec.decode(&zero).map_err(e)? == Decoded::NoBurst,
                "zero outcome",
            )
        }),
    ];
    if results.iter().all(|&ok| ok) {
        0
    } else {
        VERIFY_FAILED
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
