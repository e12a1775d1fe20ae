//! Exact combinatorial kernels: binomials (including negative upper index),
//! factorials, Stirling numbers of the second kind, and ordered compositions.
//!
//! Everything returns arbitrary-precision integers or rationals; nothing here
//! knows about rings or windows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision integer used throughout the crate.
pub type Int = BigInt;
/// Arbitrary-precision rational used throughout the crate.
pub type Rat = BigRational;

/// Rational from an integer numerator.
pub fn rat_i<T: Into<Int>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

/// Rational `p/q`; panics on `q = 0`.
pub fn rat<T: Into<Int>, U: Into<Int>>(p: T, q: U) -> Rat {
    Rat::new(p.into(), q.into())
}

/// Binomial coefficient `C(n, k)` for integer `n` of either sign and `k >= 0`.
///
/// For negative `n` this is the coefficient in the formal expansion of
/// `(1+z)^n`, so e.g. `C(-2, 3) = -4`.
pub fn binom(n: i64, k: u32) -> Int {
    let mut acc = Int::one();
    for i in 0..k as i64 {
        acc *= Int::from(n - i);
        acc /= Int::from(i + 1);
    }
    acc
}

/// Binomial coefficient with big-integer upper index.
pub fn binom_big(n: &Int, k: u32) -> Int {
    let mut acc = Int::one();
    for i in 0..k {
        acc *= n - Int::from(i);
        acc /= Int::from(i + 1);
    }
    acc
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> Int {
    let mut acc = Int::one();
    for i in 2..=n {
        acc *= Int::from(i);
    }
    acc
}

/// Stirling number of the second kind `S(m, n)`: partitions of an m-set into
/// n nonempty blocks. Computed by the standard recurrence.
pub fn stirling2(m: u32, n: u32) -> Int {
    if n > m {
        return Int::zero();
    }
    if m == n {
        return Int::one();
    }
    if n == 0 {
        return Int::zero(); // m > 0 here
    }
    // row[j] = S(i, j) while filling row i upward
    let mut row = vec![Int::zero(); n as usize + 1];
    row[0] = Int::one(); // S(0, 0)
    for _i in 1..=m {
        for j in (1..=n as usize).rev() {
            let carry = row[j - 1].clone();
            row[j] = Int::from(j) * &row[j] + carry;
        }
        row[0] = Int::zero();
    }
    row[n as usize].clone()
}

/// The integer `(mn)! / (m! (n!)^m)`: the coefficient governing composition of
/// divided powers, `gamma_m(gamma_n(z)) = coeff * gamma_{mn}(z)`.
pub fn pd_composition_coeff(m: u32, n: u32) -> Int {
    let num = factorial(m * n);
    let den = factorial(m) * factorial(n).pow(m);
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// All ordered compositions of `total` into exactly `parts` parts, each at
/// least `min_part`. Lexicographic order; the empty composition is returned
/// for `parts = 0` iff `total = 0`.
pub fn compositions(total: u32, parts: u32, min_part: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts as usize);
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, left: u32, parts: u32, min_part: u32) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // remaining parts after this one still need (parts-1)*min_part
        let reserve = (parts - 1) * min_part;
        if left < min_part + reserve {
            return;
        }
        for v in min_part..=(left - reserve) {
            cur.push(v);
            rec(out, cur, left - v, parts - 1, min_part);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, total, parts, min_part);
    out
}

/// `base^exp` as a big integer (exact, negative bases included).
pub fn int_pow(base: i64, exp: u32) -> Int {
    num_traits::pow(Int::from(base), exp as usize)
}

/// Format a rational as `p` or `p/q` (lowest terms, sign on the numerator).
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q` into a rational.
pub fn parse_rat(s: &str) -> crate::Result<Rat> {
    s.parse::<Rat>()
        .map_err(|e| crate::Error::Json(format!("bad rational `{s}`: {e}")))
}

/// True if the rational is a negative number (used by printers).
pub fn is_negative(r: &Rat) -> bool {
    r.numer().is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: u32, k: u32) -> Int {
        // independent oracle: Pascal's triangle
        let mut row = vec![Int::one()];
        for _ in 0..n {
            let mut next = vec![Int::one()];
            for i in 1..row.len() {
                next.push(&row[i - 1] + &row[i]);
            }
            next.push(Int::one());
            row = next;
        }
        row.get(k as usize).cloned().unwrap_or_else(Int::zero)
    }

    #[test]
    fn binom_matches_pascal() {
        for n in 0..12u32 {
            for k in 0..14u32 {
                assert_eq!(binom(n as i64, k), pascal(n, k), "C({n},{k})");
            }
        }
    }

    #[test]
    fn binom_negative_upper_index() {
        // long-division oracle: (1+z)^(-2) = 1 - 2z + 3z^2 - 4z^3 + ...
        assert_eq!(binom(-2, 0), Int::from(1));
        assert_eq!(binom(-2, 1), Int::from(-2));
        assert_eq!(binom(-2, 2), Int::from(3));
        assert_eq!(binom(-2, 3), Int::from(-4));
        // (1+z)^(-1) alternates
        for k in 0..8 {
            assert_eq!(binom(-1, k), Int::from(if k % 2 == 0 { 1 } else { -1 }));
        }
        // reflection C(-n,k) = (-1)^k C(n+k-1, k)
        for n in 1..6i64 {
            for k in 0..8u32 {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                assert_eq!(binom(-n, k), binom(n + k as i64 - 1, k) * Int::from(sign));
            }
        }
    }

    #[test]
    fn binom_big_agrees() {
        for n in -6..12i64 {
            for k in 0..10u32 {
                assert_eq!(binom_big(&Int::from(n), k), binom(n, k));
            }
        }
    }

    #[test]
    fn factorial_small() {
        let expect = [1u64, 1, 2, 6, 24, 120, 720, 5040];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(factorial(n as u32), Int::from(*e));
        }
    }

    #[test]
    fn stirling2_against_formula() {
        // inclusion-exclusion oracle: S(m,n) = (1/n!) sum_j (-1)^j C(n,j) (n-j)^m
        fn oracle(m: u32, n: u32) -> Int {
            if n == 0 {
                return if m == 0 { Int::one() } else { Int::zero() };
            }
            let mut acc = Int::zero();
            for j in 0..=n {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc += Int::from(sign) * binom(n as i64, j) * Int::from(n - j).pow(m);
            }
            acc / factorial(n)
        }
        for m in 0..10 {
            for n in 0..10 {
                assert_eq!(stirling2(m, n), oracle(m, n), "S({m},{n})");
            }
        }
        // frozen values
        assert_eq!(stirling2(3, 2), Int::from(3));
        assert_eq!(stirling2(4, 2), Int::from(7));
        assert_eq!(stirling2(5, 2), Int::from(15));
        assert_eq!(stirling2(5, 3), Int::from(25));
    }

    #[test]
    fn pd_composition_coeff_frozen() {
        // gamma_2(gamma_2) -> 3, gamma_3(gamma_2) -> 15, gamma_2(gamma_3) -> 10
        assert_eq!(pd_composition_coeff(2, 2), Int::from(3));
        assert_eq!(pd_composition_coeff(3, 2), Int::from(15));
        assert_eq!(pd_composition_coeff(2, 3), Int::from(10));
        assert_eq!(pd_composition_coeff(1, 5), Int::from(1));
        assert_eq!(pd_composition_coeff(4, 1), Int::from(1));
    }

    #[test]
    fn compositions_enumerate() {
        assert_eq!(compositions(5, 2, 2), vec![vec![2, 3], vec![3, 2]]);
        assert_eq!(compositions(0, 0, 2), vec![Vec::<u32>::new()]);
        assert!(compositions(3, 2, 2).is_empty());
        assert_eq!(compositions(4, 2, 0).len(), 5);
        // ordered compositions of n into k positive parts: C(n-1, k-1)
        for n in 1..9u32 {
            for k in 1..=n {
                assert_eq!(
                    Int::from(compositions(n, k, 1).len() as u64),
                    binom(n as i64 - 1, k - 1)
                );
            }
        }
    }

    #[test]
    fn rat_round_trip() {
        for (s, num, den) in [("3", 3, 1), ("-7/2", -7, 2), ("0", 0, 1)] {
            let r = parse_rat(s).unwrap();
            assert_eq!(r, rat(num, den));
            assert_eq!(fmt_rat(&r), s);
        }
        assert!(parse_rat("x/y").is_err());
    }
}
