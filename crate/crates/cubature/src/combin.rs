//! Exact combinatorial helpers: binomials, multinomials, double factorials.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// binom(n, k) as an exact big integer; zero when k > n.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// binom(n, k) as usize; panics on overflow (callers stay desk-scale).
pub fn binomial_usize(n: usize, k: usize) -> usize {
    use num_traits::ToPrimitive;
    binomial(n, k).to_usize().expect("binomial overflows usize")
}

/// Multinomial coefficient d! / (a_1! ... a_m!) with d = sum a_i.
pub fn multinomial(parts: &[u16]) -> BigInt {
    let mut acc = BigInt::one();
    let mut seen = 0usize;
    for &p in parts {
        for i in 1..=(p as usize) {
            seen += 1;
            acc = acc * BigInt::from(seen) / BigInt::from(i);
        }
    }
    acc
}

/// (2l-1)!! = 1*3*5*...*(2l-1); equals 1 for l = 0.
pub fn double_factorial_odd(l: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut f = 1u64;
    for _ in 0..l {
        acc *= BigInt::from(f);
        f += 2;
    }
    acc
}

/// All exponent vectors of length `nvars` with total degree exactly `deg`,
/// in lexicographic order (deterministic iteration for tests and reports).
pub fn compositions(nvars: usize, deg: u16) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; nvars];
    fn rec(out: &mut Vec<Vec<u16>>, cur: &mut Vec<u16>, idx: usize, left: u16) {
        if idx + 1 == cur.len() {
            cur[idx] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[idx] = v;
            rec(out, cur, idx + 1, left - v);
        }
    }
    if nvars == 0 {
        if deg == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut out, &mut cur, 0, deg);
    out
}

/// All k-element subsets of {0, .., n-1} in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial_usize(28, 5), 98280);
        assert_eq!(binomial_usize(4, 2), 6);
        assert_eq!(binomial(2, 5), BigInt::zero());
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 2]), BigInt::from(6));
        assert_eq!(multinomial(&[1, 1, 1]), BigInt::from(6));
        assert_eq!(multinomial(&[4]), BigInt::from(1));
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(0), BigInt::from(1));
        assert_eq!(double_factorial_odd(3), BigInt::from(15));
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(3, 4).len(), binomial_usize(6, 2));
        assert_eq!(compositions(1, 7), vec![vec![7]]);
    }
}
