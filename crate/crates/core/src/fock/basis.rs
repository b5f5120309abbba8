use std::collections::HashMap;

use crate::error::{Error, Result};

/// Default ceiling on the number of occupation states in one basis.
pub const DEFAULT_STATE_CAP: usize = 60_000;

const NONE: usize = usize::MAX;

/// Occupation-number basis of the bosonic Fock space over a `d`-mode
/// one-body space, truncated at total particle number `N_max`.
///
/// States are ordered by total particle number, then lexicographically
/// within each particle-number sector. A basis with a smaller `N_max` is
/// therefore always a prefix of one with a larger `N_max`.
#[derive(Debug, Clone)]
pub struct OccupationBasis {
    dim: usize,
    max_total: usize,
    states: Vec<Vec<u16>>,
    totals: Vec<usize>,
    index: HashMap<Vec<u16>, usize>,
    sector_start: Vec<usize>,
    raise: Vec<usize>,
    lower: Vec<usize>,
}

impl PartialEq for OccupationBasis {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.max_total == other.max_total
    }
}

/// `binomial(n, k)` or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

impl OccupationBasis {
    pub fn build(dim: usize, max_total: usize) -> Result<Self> {
        Self::build_with_cap(dim, max_total, DEFAULT_STATE_CAP)
    }

    pub fn build_with_cap(dim: usize, max_total: usize, cap: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain(
                "one-body dimension must be at least 1".into(),
            ));
        }
        if max_total > u16::MAX as usize {
            return Err(Error::Domain(format!("N_max = {max_total} is too large")));
        }
        let size = binomial(max_total + dim, dim).unwrap_or(usize::MAX);
        if size > cap {
            return Err(Error::Sizing {
                what: "occupation basis",
                count: size,
                cap,
            });
        }
        let mut states = Vec::with_capacity(size);
        let mut totals = Vec::with_capacity(size);
        let mut sector_start = Vec::with_capacity(max_total + 2);
        for total in 0..=max_total {
            sector_start.push(states.len());
            let mut current = vec![0u16; dim];
            push_compositions(total, 0, &mut current, &mut states);
            totals.resize(states.len(), total);
        }
        sector_start.push(states.len());
        debug_assert_eq!(states.len(), size);

        let index: HashMap<Vec<u16>, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();

        let mut raise = vec![NONE; size * dim];
        let mut lower = vec![NONE; size * dim];
        let mut scratch = vec![0u16; dim];
        for (s, occ) in states.iter().enumerate() {
            for mode in 0..dim {
                if totals[s] < max_total {
                    scratch.copy_from_slice(occ);
                    scratch[mode] += 1;
                    raise[s * dim + mode] = index[&scratch];
                }
                if occ[mode] > 0 {
                    scratch.copy_from_slice(occ);
                    scratch[mode] -= 1;
                    lower[s * dim + mode] = index[&scratch];
                }
            }
        }

        Ok(Self {
            dim,
            max_total,
            states,
            totals,
            index,
            sector_start,
            raise,
            lower,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<u16>] {
        &self.states
    }

    pub fn occupation(&self, idx: usize) -> &[u16] {
        &self.states[idx]
    }

    pub fn total(&self, idx: usize) -> usize {
        self.totals[idx]
    }

    pub fn index_of(&self, occupation: &[u16]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Index range of the sector with exactly `total` particles.
    pub fn sector(&self, total: usize) -> std::ops::Range<usize> {
        self.sector_start[total]..self.sector_start[total + 1]
    }

    /// Index of `occupation + e_mode`, or `None` past the truncation.
    pub fn raised(&self, idx: usize, mode: usize) -> Option<usize> {
        let r = self.raise[idx * self.dim + mode];
        (r != NONE).then_some(r)
    }

    pub fn lowered(&self, idx: usize, mode: usize) -> Option<usize> {
        let r = self.lower[idx * self.dim + mode];
        (r != NONE).then_some(r)
    }
}

fn push_compositions(
    remaining: usize,
    pos: usize,
    current: &mut Vec<u16>,
    out: &mut Vec<Vec<u16>>,
) {
    let last = current.len() - 1;
    if pos == last {
        current[pos] = remaining as u16;
        out.push(current.clone());
        return;
    }
    for first in 0..=remaining {
        current[pos] = first as u16;
        push_compositions(remaining - first, pos + 1, current, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode() {
        let b = OccupationBasis::build(1, 3).unwrap();
        let expected: Vec<Vec<u16>> = vec![vec![0], vec![1], vec![2], vec![3]];
        assert_eq!(b.states(), expected.as_slice());
    }

    #[test]
    fn sizes() {
        assert_eq!(OccupationBasis::build(2, 2).unwrap().len(), 6);
        assert_eq!(OccupationBasis::build(3, 10).unwrap().len(), 286);
        // Σ_{N≤10} binomial(N+2, 2)
        let by_sectors: usize = (0..=10).map(|n| binomial(n + 2, 2).unwrap()).sum();
        assert_eq!(by_sectors, 286);
    }

    #[test]
    fn graded_lex_order_without_duplicates() {
        let b = OccupationBasis::build(3, 5).unwrap();
        for w in b.states().windows(2) {
            let (ta, tb) = (
                w[0].iter().map(|&x| x as usize).sum::<usize>(),
                w[1].iter().map(|&x| x as usize).sum::<usize>(),
            );
            assert!(ta < tb || (ta == tb && w[0] < w[1]));
        }
        assert_eq!(b.index.len(), b.len());
    }

    #[test]
    fn smaller_basis_is_prefix() {
        let small = OccupationBasis::build(2, 4).unwrap();
        let big = OccupationBasis::build(2, 9).unwrap();
        assert_eq!(small.states(), &big.states()[..small.len()]);
    }

    #[test]
    fn cap_is_enforced() {
        let err = OccupationBasis::build_with_cap(3, 10, 100).unwrap_err();
        assert_eq!(
            err,
            Error::Sizing {
                what: "occupation basis",
                count: 286,
                cap: 100
            }
        );
    }
}
