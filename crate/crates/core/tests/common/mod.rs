#![allow(dead_code)]

use burst_sqgt::{BinaryMatrix, Burst};

/// Level by direct comparison against every threshold.
pub fn naive_level(count: u32, thresholds: &[u32]) -> u32 {
    thresholds.iter().filter(|&&t| t <= count).count() as u32
}

/// Outcome by summing each row over the burst, no prefix sums.
pub fn naive_outcome(m: &BinaryMatrix, thresholds: &[u32], head: usize, len: usize) -> Vec<u32> {
    (0..m.rows())
        .map(|r| {
            let count: u32 = (head..head + len).map(|j| m.get(r, j) as u32).sum();
            naive_level(count, thresholds)
        })
        .collect()
}

/// Every `(head, len)` with `len` in `lens`, listed by length then head.
pub fn naive_bursts(n: usize, lens: std::ops::RangeInclusive<usize>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for len in lens {
        if len > n {
            break;
        }
        for head in 0..=n - len {
            out.push((head, len));
        }
    }
    out
}

/// Least colliding pair (by position in `bursts`) satisfying `pred`, by comparing all pairs.
pub fn naive_least_collision(
    m: &BinaryMatrix,
    thresholds: &[u32],
    bursts: &[(usize, usize)],
    pred: impl Fn((usize, usize), (usize, usize)) -> bool,
) -> Option<((usize, usize), (usize, usize))> {
    let outcomes: Vec<Vec<u32>> = bursts
        .iter()
        .map(|&(h, l)| naive_outcome(m, thresholds, h, l))
        .collect();
    for i in 0..bursts.len() {
        for j in i + 1..bursts.len() {
            if outcomes[i] == outcomes[j] && pred(bursts[i], bursts[j]) {
                return Some((bursts[i], bursts[j]));
            }
        }
    }
    None
}

pub fn burst(head: usize, len: usize) -> Burst {
    Burst::new(head, len).unwrap()
}

pub fn bits(s: &str) -> Vec<u8> {
    s.bytes()
        .filter(|b| !b.is_ascii_whitespace())
        .map(|b| b - b'0')
        .collect()
}
