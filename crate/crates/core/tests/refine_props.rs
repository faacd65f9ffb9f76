mod common;

use burst_sqgt::oracle::{check_distinguishable, PairPredicate};
use burst_sqgt::refine::{build_b, build_r, check_b, decode_r, refine_threshold};
use burst_sqgt::{BurstSpace, Thresholds};
use common::{naive_bursts, naive_least_collision, naive_outcome};

fn thresholds_for(h: u32) -> Vec<u32> {
    match h {
        1 => vec![1, 3],
        2 => vec![1, 2, 4],
        3 => vec![1, 2, 4, 6],
        4 => vec![2, 5, 10],
        _ => unreachable!(),
    }
}

const CASES: [(u32, usize); 6] = [(1, 5), (2, 7), (2, 8), (2, 9), (3, 9), (4, 11)];

/// Row `i` of B, minus its leading zero, is `[1^{2^h} | Gray rows | 0…]`
/// rotated right by `(c−1−i)·2^h`.
fn reference_b(h: u32, c: usize) -> Vec<Vec<u8>> {
    let block = 1usize << h;
    let width = c * block;
    let mut v = vec![1u8; block];
    for g in 0..h {
        v.extend((0..block).map(|k| (((k ^ (k >> 1)) >> (h - 1 - g)) & 1) as u8));
    }
    v.resize(width, 0);
    (0..c)
        .map(|i| {
            let shift = (c - 1 - i) * block;
            let mut row = vec![0u8];
            row.extend((0..width).map(|k| v[(k + width - shift) % width]));
            row
        })
        .collect()
}

#[test]
fn b_matches_rotation_description() {
    for (h, c) in CASES {
        let b = build_b(h, c).unwrap();
        let expected = reference_b(h, c);
        for (r, row) in expected.iter().enumerate() {
            assert_eq!(b.matrix().row(r), row.as_slice(), "h={h} c={c} row {r}");
        }
        assert!(check_b(b.matrix(), refine_threshold(h)).all_pass());
    }
}

#[test]
fn b_rejects_small_block_counts() {
    assert!(build_b(2, 6).is_err());
    assert!(build_b(3, 8).is_err());
    assert!(build_b(0, 9).is_err());
}

#[test]
fn window_counts_follow_b_columns() {
    for (h, c) in CASES {
        let b = build_b(h, c).unwrap();
        let ell = b.ell();
        let eta = thresholds_for(h);
        let top = *eta.last().unwrap();
        let n = 4 * ell;
        let r = build_r(&b, &Thresholds::new(eta).unwrap(), n).unwrap();
        for head in 0..=n - ell {
            let counts: Vec<u32> = (0..r.matrix.rows())
                .map(|row| {
                    (head..head + ell)
                        .map(|j| r.matrix.get(row, j) as u32)
                        .sum()
                })
                .collect();
            let i = head % (2 * ell);
            let expected: Vec<u32> = (0..c)
                .map(|row| {
                    if i < ell {
                        top - 1 + b.matrix().get(row, i) as u32
                    } else {
                        top - b.matrix().get(row, i - ell) as u32
                    }
                })
                .collect();
            assert_eq!(counts, expected, "h={h} c={c} head {head}");
        }
    }
}

#[test]
fn residues_are_separated_even_by_the_top_threshold_alone() {
    for (h, c) in CASES {
        let b = build_b(h, c).unwrap();
        let ell = b.ell();
        let eta = thresholds_for(h);
        let n = 4 * ell;
        let r = build_r(&b, &Thresholds::new(eta.clone()).unwrap(), n).unwrap();
        let near = PairPredicate::Near(2 * ell);
        let space = BurstSpace::Fixed { ell };
        for t in [eta.clone(), vec![*eta.last().unwrap()]] {
            let report = check_distinguishable(
                &r.matrix,
                &Thresholds::new(t.clone()).unwrap(),
                space,
                near,
                2,
            )
            .unwrap();
            assert!(
                report.is_ok(),
                "h={h} c={c} thresholds {t:?}: {:?}",
                report.witness
            );
            let naive =
                naive_least_collision(&r.matrix, &t, &naive_bursts(n, ell..=ell), |a, b| {
                    a.0.abs_diff(b.0) < 2 * ell
                });
            assert_eq!(naive, None);
        }
    }
}

#[test]
fn residue_decoding_round_trips() {
    for (h, c) in CASES {
        let b = build_b(h, c).unwrap();
        let ell = b.ell();
        let eta = thresholds_for(h);
        let t = Thresholds::new(eta.clone()).unwrap();
        let r = build_r(&b, &t, 4 * ell).unwrap();
        for head in 0..=3 * ell {
            let levels = naive_outcome(&r.matrix, &eta, head, ell);
            assert_eq!(
                decode_r(&b, &t, &levels).unwrap(),
                head % (2 * ell),
                "h={h} c={c}"
            );
        }
    }
}

#[test]
fn r_rejects_mismatched_threshold() {
    let b = build_b(2, 7).unwrap();
    assert!(build_r(&b, &Thresholds::new(vec![1, 2, 5]).unwrap(), 116).is_err());
    assert!(build_r(&b, &Thresholds::new(vec![1, 2, 4]).unwrap(), 28).is_err());
}
