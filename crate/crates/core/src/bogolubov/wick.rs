use crate::error::{Error, Result};
use crate::linalg::C64;

/// Longest operator string accepted by [`wick_expectation`].
pub const MAX_WICK_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WickValue {
    pub value: C64,
    pub pairings: usize,
    /// Set for odd-length strings, whose quasi-free expectation vanishes.
    pub odd_moment: bool,
}

/// Expectation of an ordered product of ladder operators in a quasi-free
/// state: the sum over all pairings of products of ordered two-point values.
pub fn wick_expectation<T, F>(ops: &[T], two_point: F) -> Result<WickValue>
where
    F: Fn(&T, &T) -> C64,
{
    if ops.len() > MAX_WICK_LEN {
        return Err(Error::Domain(format!(
            "Wick expansion supports at most {MAX_WICK_LEN} operators, got {}",
            ops.len()
        )));
    }
    if ops.len() % 2 == 1 {
        return Ok(WickValue {
            value: C64::new(0.0, 0.0),
            pairings: 0,
            odd_moment: true,
        });
    }
    let mut remaining: Vec<usize> = (0..ops.len()).collect();
    let mut pairings = 0;
    let value = sum_pairings(ops, &two_point, &mut remaining, &mut pairings);
    Ok(WickValue {
        value,
        pairings,
        odd_moment: false,
    })
}

fn sum_pairings<T, F>(
    ops: &[T],
    two_point: &F,
    remaining: &mut Vec<usize>,
    count: &mut usize,
) -> C64
where
    F: Fn(&T, &T) -> C64,
{
    if remaining.is_empty() {
        *count += 1;
        return C64::new(1.0, 0.0);
    }
    let first = remaining.remove(0);
    let mut total = C64::new(0.0, 0.0);
    for k in 0..remaining.len() {
        let partner = remaining.remove(k);
        let pair = two_point(&ops[first], &ops[partner]);
        total += pair * sum_pairings(ops, two_point, remaining, count);
        remaining.insert(k, partner);
    }
    remaining.insert(0, first);
    total
}

/// `(2m-1)!!`, the number of pairings of `2m` objects.
pub fn pairing_count(len: usize) -> usize {
    if len % 2 == 1 {
        return 0;
    }
    (1..len).step_by(2).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for (len, n) in [(0, 1), (2, 1), (4, 3), (6, 15), (8, 105)] {
            let ops: Vec<usize> = (0..len).collect();
            let w = wick_expectation(&ops, |_, _| C64::new(1.0, 0.0)).unwrap();
            assert_eq!(w.pairings, n);
            assert_eq!(pairing_count(len), n);
            assert_eq!(w.value.re, n as f64);
        }
    }

    #[test]
    fn four_point_three_terms() {
        // Symbolic check with distinct primes as pair values.
        let val = |i: &usize, j: &usize| C64::new(((i + 1) * 10 + j + 1) as f64, 0.0);
        let w = wick_expectation(&[0usize, 1, 2, 3], val).unwrap();
        let expected = 12.0 * 34.0 + 13.0 * 24.0 + 14.0 * 23.0;
        assert_eq!(w.value.re, expected);
    }

    #[test]
    fn odd_flagged() {
        let w = wick_expectation(&[0usize, 1, 2], |_, _| C64::new(1.0, 0.0)).unwrap();
        assert!(w.odd_moment);
        assert_eq!(w.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn too_long() {
        assert!(wick_expectation(&[0usize; 10], |_, _| C64::new(1.0, 0.0)).is_err());
    }
}
