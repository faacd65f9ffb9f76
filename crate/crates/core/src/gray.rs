//! q-ary reflected Gray codes and paired Gray codes.
//!
//! Row 0 of every code matrix is the slowest-varying digit. The reflected
//! code of length `h` lists digit `d` of row 0 in blocks of width
//! `q^(h-1)`; below it the length-`h-1` code runs forward in even blocks and
//! backward in odd blocks. The paired code of length `h` is the reflected
//! code followed by its mirror image, so it is a palindrome of width `2q^h`.

use crate::error::{Error, Result};

/// Largest number of columns a code matrix may have.
pub const MAX_COLUMNS: u64 = 1 << 24;

fn width(q: u32, h: u32) -> Result<u64> {
    if q < 2 || h == 0 {
        return Err(Error::param(format!(
            "gray code needs q >= 2 and h >= 1, got q={q}, h={h}"
        )));
    }
    (q as u64)
        .checked_pow(h)
        .filter(|&w| w <= MAX_COLUMNS)
        .ok_or_else(|| {
            Error::param(format!(
                "{q}^{h} columns exceeds the size cap {MAX_COLUMNS}"
            ))
        })
}

/// An `h × q^h` matrix of digits in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayMatrix {
    q: u32,
    h: u32,
    cols: usize,
    digits: Vec<u32>,
}

impl GrayMatrix {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.digits[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.digits[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<u32> {
        (0..self.h as usize).map(|r| self.get(r, col)).collect()
    }
}

/// Paired Gray matrix: `h × 2q^h`, palindromic.
pub type PairedGrayMatrix = GrayMatrix;

/// Digits of the rank-`rank` column of the reflected code, row 0 first.
pub fn gray_column(q: u32, h: u32, rank: u64) -> Vec<u32> {
    let q = q as u64;
    let mut block = q.pow(h);
    let mut rest = rank % block;
    let mut out = Vec::with_capacity(h as usize);
    for _ in 0..h {
        block /= q;
        let digit = rest / block;
        rest %= block;
        if digit % 2 == 1 {
            rest = block - 1 - rest;
        }
        out.push(digit as u32);
    }
    out
}

pub fn gray_matrix(q: u32, h: u32) -> Result<GrayMatrix> {
    let cols = width(q, h)? as usize;
    let mut digits = vec![0; h as usize * cols];
    for c in 0..cols {
        for (r, d) in gray_column(q, h, c as u64).into_iter().enumerate() {
            digits[r * cols + c] = d;
        }
    }
    Ok(GrayMatrix { q, h, cols, digits })
}

/// Rank of `column` in the reflected code; inverse of [`gray_column`].
pub fn gray_index(q: u32, column: &[u32]) -> Result<u64> {
    if q < 2 || column.is_empty() {
        return Err(Error::param(
            "gray_index needs q >= 2 and a non-empty column",
        ));
    }
    if let Some(&d) = column.iter().find(|&&d| d >= q) {
        return Err(Error::param(format!("digit {d} out of range for base {q}")));
    }
    let h = column.len() as u32;
    let q = q as u64;
    q.checked_pow(h)
        .ok_or_else(|| Error::param("gray code length overflows u64"))?;
    // Walk from the least significant digit up, undoing reflections.
    let mut rank = 0u64;
    let mut sub = 1u64;
    for &d in column.iter().rev() {
        let d = d as u64;
        if d % 2 == 1 {
            rank = sub - 1 - rank;
        }
        rank += d * sub;
        sub *= q;
    }
    Ok(rank)
}

/// The base pattern `[0, 1, …, q−1, q−1, …, 0]`.
pub fn paired_base(q: u32) -> Vec<u32> {
    (0..q).chain((0..q).rev()).collect()
}

/// Row `r` of the paired code of length `h` is the base pattern with each
/// entry repeated `q^(h−1−r)` times, tiled to width `2q^h`.
pub fn paired_gray_matrix(q: u32, h: u32) -> Result<PairedGrayMatrix> {
    let cols = (2 * width(q, h)?) as usize;
    let base = paired_base(q);
    let mut digits = vec![0; h as usize * cols];
    for r in 0..h as usize {
        let stretch = (q as usize).pow(h - 1 - r as u32);
        for c in 0..cols {
            digits[r * cols + c] = base[(c / stretch) % base.len()];
        }
    }
    Ok(GrayMatrix { q, h, cols, digits })
}

/// Number of maximal blocks of consecutive ones (non-cyclic).
pub fn runs_of_ones(row: &[u8]) -> usize {
    let mut prev = 0;
    let mut runs = 0;
    for &b in row {
        if b == 1 && prev == 0 {
            runs += 1;
        }
        prev = b;
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn columns(g: &GrayMatrix) -> Vec<Vec<u32>> {
        (0..g.cols()).map(|c| g.column(c)).collect()
    }

    #[test]
    fn small_codes() {
        assert_eq!(columns(&gray_matrix(2, 1).unwrap()), vec![vec![0], vec![1]]);
        assert_eq!(
            columns(&gray_matrix(2, 2).unwrap()),
            vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0]]
        );
        assert_eq!(
            columns(&gray_matrix(3, 1).unwrap()),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn paired_examples() {
        assert_eq!(
            paired_gray_matrix(3, 1).unwrap().row(0),
            &[0, 1, 2, 2, 1, 0]
        );
        assert_eq!(paired_gray_matrix(2, 1).unwrap().row(0), &[0, 1, 1, 0]);
        let p = paired_gray_matrix(2, 2).unwrap();
        assert_eq!(p.row(0), &[0, 0, 1, 1, 1, 1, 0, 0]);
        assert_eq!(p.row(1), &[0, 1, 1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn paired_code_matches_recursive_definition() {
        // P(1) = base; P(i) = [base ⊗ 1^{q^{i-1}} ; P(i-1) repeated q times].
        fn recursive(q: u32, h: u32) -> Vec<Vec<u32>> {
            let base = paired_base(q);
            if h == 1 {
                return vec![base];
            }
            let lower = recursive(q, h - 1);
            let stretch = (q as usize).pow(h - 1);
            let top: Vec<u32> = base
                .iter()
                .flat_map(|&d| std::iter::repeat_n(d, stretch))
                .collect();
            let mut rows = vec![top];
            for r in lower {
                rows.push(
                    r.iter()
                        .copied()
                        .cycle()
                        .take(r.len() * q as usize)
                        .collect(),
                );
            }
            rows
        }
        for q in 2..=4 {
            for h in 1..=3 {
                let p = paired_gray_matrix(q, h).unwrap();
                let rows: Vec<Vec<u32>> = (0..h as usize).map(|r| p.row(r).to_vec()).collect();
                assert_eq!(rows, recursive(q, h), "q={q} h={h}");
            }
        }
    }

    #[test]
    fn index_examples() {
        assert_eq!(gray_index(2, &[0, 0]).unwrap(), 0);
        assert_eq!(gray_index(2, &[1, 0]).unwrap(), 3);
        assert_eq!(gray_index(3, &[2]).unwrap(), 2);
        assert!(gray_index(2, &[2, 0]).is_err());
        assert!(gray_index(2, &[]).is_err());
    }

    #[test]
    fn runs_examples() {
        assert_eq!(runs_of_ones(&[0, 0, 1, 1, 0, 1, 1, 0]), 2);
        assert_eq!(runs_of_ones(&[0, 0, 0, 0]), 0);
        assert_eq!(runs_of_ones(&[1, 0, 1]), 2);
        // A row of the h=2 block matrix: leading 0, the 1-block, then the Gray rows.
        let g = gray_matrix(2, 2).unwrap();
        let mut row = vec![0u8, 1, 1, 1, 1];
        for r in 0..2 {
            row.extend(g.row(r).iter().map(|&d| d as u8));
        }
        assert_eq!(runs_of_ones(&row), 3);
    }

    #[test]
    fn size_cap() {
        assert!(gray_matrix(2, 30).is_err());
        assert!(gray_matrix(1, 3).is_err());
        assert!(paired_gray_matrix(2, 0).is_err());
    }
}
