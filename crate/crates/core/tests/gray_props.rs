use std::collections::HashMap;

use burst_sqgt::gray::{gray_column, gray_index, gray_matrix, paired_gray_matrix, GrayMatrix};

fn columns(g: &GrayMatrix) -> Vec<Vec<u32>> {
    (0..g.cols()).map(|c| g.column(c)).collect()
}

/// Reflected code built from the textbook recursion: prefix digit d to the
/// shorter code, reversing it for odd d.
fn reference(q: u32, h: u32) -> Vec<Vec<u32>> {
    if h == 0 {
        return vec![vec![]];
    }
    let shorter = reference(q, h - 1);
    let mut out = Vec::new();
    for d in 0..q {
        let mut block = shorter.clone();
        if d % 2 == 1 {
            block.reverse();
        }
        for tail in block {
            let mut col = vec![d];
            col.extend(tail);
            out.push(col);
        }
    }
    out
}

fn single_unit_step(a: &[u32], b: &[u32]) -> bool {
    let diffs: Vec<i64> = a
        .iter()
        .zip(b)
        .filter(|(x, y)| x != y)
        .map(|(&x, &y)| x as i64 - y as i64)
        .collect();
    diffs.len() == 1 && diffs[0].abs() == 1
}

fn cases() -> impl Iterator<Item = (u32, u32)> {
    (2..=4).flat_map(|q| (1..=4).map(move |h| (q, h)))
}

#[test]
fn reflected_code_invariants() {
    for (q, h) in cases() {
        let g = gray_matrix(q, h).unwrap();
        let cols = columns(&g);
        assert_eq!(cols, reference(q, h), "q={q} h={h}");
        assert_eq!(cols.len(), (q as usize).pow(h));
        let mut seen = cols.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), cols.len(), "columns repeat for q={q} h={h}");
        assert!(cols.iter().flatten().all(|&d| d < q));
        for w in cols.windows(2) {
            assert!(
                single_unit_step(&w[0], &w[1]),
                "q={q} h={h}: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn ranking_round_trips() {
    for (q, h) in cases() {
        let g = gray_matrix(q, h).unwrap();
        for c in 0..g.cols() {
            assert_eq!(gray_index(q, &g.column(c)).unwrap(), c as u64);
            assert_eq!(gray_column(q, h, c as u64), g.column(c));
        }
    }
}

#[test]
fn ranking_rejects_bad_digits() {
    assert!(gray_index(3, &[0, 3]).is_err());
    assert!(gray_index(1, &[0]).is_err());
}

#[test]
fn paired_code_invariants() {
    for (q, h) in cases() {
        let p = paired_gray_matrix(q, h).unwrap();
        let cols = columns(&p);
        let half = (q as usize).pow(h);
        assert_eq!(cols.len(), 2 * half);

        let mut rev = cols.clone();
        rev.reverse();
        assert_eq!(rev, cols, "palindrome q={q} h={h}");

        let mut counts: HashMap<&Vec<u32>, usize> = HashMap::new();
        for c in &cols {
            *counts.entry(c).or_default() += 1;
        }
        assert_eq!(counts.len(), half);
        assert!(
            counts.values().all(|&k| k == 2),
            "each vector twice q={q} h={h}"
        );

        for w in cols.windows(2) {
            assert!(
                w[0] == w[1] || single_unit_step(&w[0], &w[1]),
                "q={q} h={h}"
            );
        }

        assert_eq!(cols[..half].to_vec(), columns(&gray_matrix(q, h).unwrap()));
    }
}

#[test]
fn paired_code_tiles_periodically() {
    // Row r repeats with period 2q^(h-r).
    for (q, h) in cases() {
        let p = paired_gray_matrix(q, h).unwrap();
        for r in 0..h as usize {
            let period = 2 * (q as usize).pow(h - r as u32);
            let row = p.row(r);
            assert!((period..row.len()).all(|c| row[c] == row[c - period]));
        }
    }
}
