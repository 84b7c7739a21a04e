//! Betti numbers and Euler characteristics of ordered configuration spaces
//! of the sphere, in exact integer arithmetic.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Cohomology ranks indexed by degree, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiVector {
    pub ranks: Vec<BigUint>,
}

impl BettiVector {
    fn from_coefficients(mut c: Vec<BigUint>) -> Self {
        while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        BettiVector { ranks: c }
    }

    /// The Poincaré polynomial evaluated at an integer.
    pub fn eval(&self, t: i64) -> BigInt {
        let t = BigInt::from(t);
        let mut acc = BigInt::zero();
        for c in self.ranks.iter().rev() {
            acc = acc * &t + BigInt::from(c.clone());
        }
        acc
    }

    pub fn as_u64(&self) -> Vec<u64> {
        self.ranks
            .iter()
            .map(|c| u64::try_from(c.clone()).expect("rank fits in u64"))
            .collect()
    }
}

/// ∏ (1 + k t) over `factors`.
fn product_of_linear(factors: impl Iterator<Item = u64>) -> Vec<BigUint> {
    let mut c = vec![BigUint::one()];
    for k in factors {
        let k = BigUint::from(k);
        let mut next = vec![BigUint::zero(); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i] += a;
            next[i + 1] += a * &k;
        }
        c = next;
    }
    c
}

/// Poincaré polynomial of the ordered configuration space.
///
/// Unreduced: (1+t)(1+2t)···(1+(N−1)t). Reduced (modulo rotations of the
/// sphere): (1+2t)···(1+(N−2)t).
pub fn poincare_polynomial(n: usize, reduced: bool) -> Result<BettiVector> {
    if reduced {
        if n < 3 {
            return Err(Error::Domain(format!(
                "reduced polynomial needs N >= 3, got {n}"
            )));
        }
        Ok(BettiVector::from_coefficients(product_of_linear(
            2..=(n as u64 - 2),
        )))
    } else {
        if n < 1 {
            return Err(Error::Domain("polynomial needs N >= 1".into()));
        }
        Ok(BettiVector::from_coefficients(product_of_linear(
            1..n as u64,
        )))
    }
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, k| a * k)
}

/// (−1)^(N−3) (N−3)!
pub fn euler_characteristic(n: usize) -> Result<BigInt> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "Euler characteristic needs N >= 3, got {n}"
        )));
    }
    let f = BigInt::from(factorial(n as u64 - 3));
    Ok(if (n - 3).is_multiple_of(2) { f } else { -f })
}

/// Unsigned Stirling number of the first kind, by the standard recurrence.
pub fn stirling_first_unsigned(n: usize, k: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for m in 0..n {
        let mut next = vec![BigUint::zero(); m + 2];
        for (j, a) in row.iter().enumerate() {
            next[j] += a * BigUint::from(m as u64);
            next[j + 1] += a;
        }
        row = next;
    }
    row.get(k).cloned().unwrap_or_default()
}

/// Whether coefficient `k` of the unreduced polynomial equals [N, N−k].
pub fn stirling_check(n: usize, k: usize) -> bool {
    if n < 1 || k > n - 1 {
        return false;
    }
    match poincare_polynomial(n, false) {
        Ok(p) => p.ranks.get(k).cloned().unwrap_or_default() == stirling_first_unsigned(n, n - k),
        Err(_) => false,
    }
}

/// Σ N!/|Aut| over the listed automorphism-group orders.
pub fn component_count(n: usize, aut_orders: &[u64]) -> Result<BigUint> {
    let f = factorial(n as u64);
    let mut total = BigUint::zero();
    for &a in aut_orders {
        let a = BigUint::from(a);
        if a.is_zero() || !(&f % &a).is_zero() {
            return Err(Error::Domain(format!("{a} does not divide {n}!")));
        }
        total += &f / a;
    }
    Ok(total)
}

/// Σ count·(−1)^index over critical orbits, compared with χ.
pub fn morse_euler_check(critical: &[(u64, usize)], n: usize) -> bool {
    let sum: i64 = critical
        .iter()
        .map(|&(c, idx)| if idx % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    euler_characteristic(n).is_ok_and(|chi| chi == BigInt::from(sum))
}

/// N = 4: two tetrahedral maxima (index 0 in the reduced count) and three
/// 4-ring saddles (co-index 1).
pub fn morse_euler_check_n4() -> bool {
    morse_euler_check(&[(2, 0), (3, 1)], 4)
}

/// Rows of coefficients as a right-aligned text table, one row per N.
pub fn format_table(rows: &[(usize, BettiVector)]) -> String {
    let width = rows
        .iter()
        .flat_map(|(_, b)| b.ranks.iter().map(|c| c.to_string().len()))
        .max()
        .unwrap_or(1);
    let cols = rows.iter().map(|(_, b)| b.ranks.len()).max().unwrap_or(0);
    let mut out = format!("{:>4}", "N");
    for k in 0..cols {
        out.push_str(&format!(" {:>width$}", format!("t^{k}")));
    }
    out.push('\n');
    for (n, b) in rows {
        out.push_str(&format!("{n:>4}"));
        for c in &b.ranks {
            out.push_str(&format!(" {:>width$}", c.to_string()));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ranks(n: usize, reduced: bool) -> Vec<u64> {
        poincare_polynomial(n, reduced).unwrap().as_u64()
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(ranks(5, true), vec![1, 5, 6]);
        assert_eq!(ranks(12, true)[8], 6_999_840);
        assert_eq!(ranks(4, false), vec![1, 6, 11, 6]);
        assert_eq!(ranks(3, true), vec![1]);
        assert_eq!(ranks(1, false), vec![1]);
        assert!(poincare_polynomial(2, true).is_err());
        assert!(poincare_polynomial(0, false).is_err());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_characteristic(4).unwrap(), BigInt::from(-1));
        assert_eq!(euler_characteristic(3).unwrap(), BigInt::from(1));
        assert_eq!(euler_characteristic(12).unwrap(), BigInt::from(-362_880));
        assert_eq!(
            poincare_polynomial(4, true).unwrap().eval(-1),
            BigInt::from(-1)
        );
    }

    #[test]
    fn stirling_examples() {
        assert!(stirling_check(9, 4));
        assert_eq!(ranks(9, false)[4], 22_449);
        assert!(stirling_check(7, 6));
        assert_eq!(ranks(7, false)[6], 720);
        for n in 1..12 {
            assert!(stirling_check(n, 0));
        }
        assert!(!stirling_check(5, 5));
        assert_eq!(stirling_first_unsigned(4, 2), BigUint::from(11u32));
    }

    #[test]
    fn component_examples() {
        assert_eq!(
            component_count(12, &[60]).unwrap(),
            BigUint::from(7_983_360u64)
        );
        assert_eq!(component_count(4, &[12]).unwrap(), BigUint::from(2u32));
        assert_eq!(
            component_count(12, &[24]).unwrap(),
            BigUint::from(19_958_400u64)
        );
        assert_eq!(
            component_count(12, &[6]).unwrap(),
            BigUint::from(79_833_600u64)
        );
        assert!(component_count(4, &[5]).is_err());
        assert!(component_count(4, &[0]).is_err());
    }

    #[test]
    fn morse_examples() {
        assert!(morse_euler_check_n4());
        assert!(!morse_euler_check(&[(3, 0), (3, 1)], 4));
    }

    #[test]
    fn row_sums_are_factorials() {
        for n in 1..=9 {
            let p = poincare_polynomial(n, false).unwrap();
            assert_eq!(p.eval(1), BigInt::from(factorial(n as u64)));
        }
    }

    #[test]
    fn table_layout() {
        let rows: Vec<_> = (3..=6)
            .map(|n| (n, poincare_polynomial(n, true).unwrap()))
            .collect();
        let s = format_table(&rows);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[4].trim_start().starts_with('6'));
        assert!(lines[4].ends_with("24"));
    }

    proptest! {
        #[test]
        fn reduced_euler_identity(n in 3usize..40) {
            let p = poincare_polynomial(n, true).unwrap();
            prop_assert_eq!(p.eval(-1), euler_characteristic(n).unwrap());
        }

        #[test]
        fn stirling_all(n in 1usize..25, k in 0usize..25) {
            prop_assume!(k < n);
            prop_assert!(stirling_check(n, k));
        }

        #[test]
        fn reduced_times_rotation_factor(n in 3usize..30) {
            // P_N(t) = (1+t) P̃_N(t) (1+(N−1)t) for the sphere-vs-plane identification
            let full = poincare_polynomial(n, false).unwrap();
            let red = poincare_polynomial(n, true).unwrap();
            for t in [-3i64, 2, 5] {
                let lhs = full.eval(t);
                let rhs = red.eval(t) * BigInt::from(1 + t) * BigInt::from(1 + (n as i64 - 1) * t);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
