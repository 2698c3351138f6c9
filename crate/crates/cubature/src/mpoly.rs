//! Sparse multivariate polynomials over a generic scalar.
//!
//! Used for moment-criterion expansions, harmonic projections, exact
//! polynomial-identity validation and representation matrices. Terms are kept
//! in a BTreeMap so iteration order (and therefore every downstream report)
//! is deterministic.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::combin::{compositions, multinomial};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct MPoly<S> {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u16>, S>,
}

impl<S: Scalar> MPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate monomial x_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.add_term(e, S::one());
        p
    }

    /// x_1^2 + ... + x_n^2.
    pub fn norm_squared(nvars: usize) -> Self {
        let mut p = MPoly::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0u16; nvars];
            e[i] = 2;
            p.add_term(e, S::one());
        }
        p
    }

    pub fn monomial(nvars: usize, expo: Vec<u16>, c: S) -> Self {
        assert_eq!(expo.len(), nvars);
        let mut p = MPoly::zero(nvars);
        p.add_term(expo, c);
        p
    }

    pub fn add_term(&mut self, expo: Vec<u16>, c: S) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(expo.len(), self.nvars);
        let entry = self.terms.entry(expo);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, expo: &[u16]) -> S {
        self.terms.get(expo).cloned().unwrap_or_else(S::zero)
    }

    pub fn total_degree(&self) -> u16 {
        self.terms.keys().map(|e| e.iter().sum::<u16>()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u16>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-S::one())))
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        let mut out = MPoly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn powu(&self, k: u32) -> Self {
        let mut acc = MPoly::constant(self.nvars, S::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// (c . x)^d for the linear form with the given coefficient vector,
    /// expanded by the multinomial theorem (much faster than repeated mul).
    pub fn linear_form_power(coeffs: &[S], d: u16) -> Self {
        let n = coeffs.len();
        let mut out = MPoly::zero(n);
        for expo in compositions(n, d) {
            let mut c = S::from_rational(&BigRational::from_integer(multinomial(&expo)));
            let mut skip = false;
            for (i, &e) in expo.iter().enumerate() {
                if e > 0 {
                    if coeffs[i].is_zero() {
                        skip = true;
                        break;
                    }
                    c = c * coeffs[i].powu(e as u32);
                }
            }
            if !skip {
                out.add_term(expo, c);
            }
        }
        out
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.clone() * S::from_int(e[i] as i64));
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            for i in 0..self.nvars {
                if e[i] >= 2 {
                    let mut e2 = e.clone();
                    e2[i] -= 2;
                    out.add_term(e2, c.clone() * S::from_int((e[i] as i64) * (e[i] as i64 - 1)));
                }
            }
        }
        out
    }

    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.nvars);
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    t = t * x[i].powu(ei as u32);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitute x_i -> sum_j a[i][j] y_j (linear change of variables).
    pub fn substitute_linear(&self, a: &[Vec<S>]) -> Self {
        assert_eq!(a.len(), self.nvars);
        let m = if a.is_empty() { 0 } else { a[0].len() };
        let forms: Vec<MPoly<S>> = a
            .iter()
            .map(|row| {
                let mut f = MPoly::zero(m);
                for (j, c) in row.iter().enumerate() {
                    let mut e = vec![0u16; m];
                    e[j] = 1;
                    f.add_term(e, c.clone());
                }
                f
            })
            .collect();
        let mut out = MPoly::zero(m);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(m, c.clone());
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    t = t.mul(&forms[i].powu(ei as u32));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Largest |coefficient| as f64; crude magnitude gauge for tolerances.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Harmonic projection of a homogeneous polynomial: the unique harmonic h of
/// the same degree with f - h divisible by |x|^2. Computed from iterated
/// Laplacians, h = sum_j a_j |x|^(2j) Lap^j f with a_0 = 1 and
/// a_(j+1) = -a_j / (2(j+1)(n + 2k - 2j - 4)), which is exact for n >= 3.
pub fn harmonic_projection<S: Scalar>(f: &MPoly<S>, _n_check: usize) -> MPoly<S> {
    assert!(f.is_homogeneous(), "harmonic projection needs a homogeneous input");
    let n = f.nvars;
    let k = f.total_degree() as i64;
    if k <= 1 || f.is_zero() {
        return f.clone();
    }
    assert!(n >= 3, "harmonic projection implemented for n >= 3");
    let r2 = MPoly::<S>::norm_squared(n);
    let mut out = f.clone();
    let mut a = S::one();
    let mut lap = f.clone();
    let mut r2j = MPoly::constant(n, S::one());
    let mut j: i64 = 0;
    loop {
        lap = lap.laplacian();
        if lap.is_zero() {
            break;
        }
        let denom = 2 * (j + 1) * (n as i64 + 2 * k - 2 * j - 4);
        assert!(denom > 0, "harmonic projection recurrence degenerates");
        a = a * (-S::one()) / S::from_int(denom);
        r2j = r2j.mul(&r2);
        out = out.add(&r2j.mul(&lap).scale(&a));
        j += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Quad;

    #[test]
    fn linear_form_power_matches_repeated_mul() {
        let coeffs = vec![Quad::int(2), Quad::int(-1), Quad::int(3)];
        let mut lin = MPoly::zero(3);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0u16; 3];
            e[i] = 1;
            lin.add_term(e, c.clone());
        }
        assert_eq!(lin.powu(4), MPoly::linear_form_power(&coeffs, 4));
    }

    #[test]
    fn laplacian_of_harmonic_quadratic() {
        // x^2 - y^2 is harmonic; x^2 + y^2 + z^2 is not.
        let mut p = MPoly::<Quad>::zero(3);
        p.add_term(vec![2, 0, 0], Quad::int(1));
        p.add_term(vec![0, 2, 0], Quad::int(-1));
        assert!(p.laplacian().is_zero());
        assert!(!MPoly::<Quad>::norm_squared(3).laplacian().is_zero());
    }

    #[test]
    fn harmonic_projection_is_harmonic_and_top_aligned() {
        // Project x^4 in R^3. The harmonic component of t^4 in the Legendre
        // expansion t^4 = (8 P4 + 20 P2 + 7 P0)/35 gives
        // h = x^4 - (6/7)|x|^2 x^2 + (3/35)|x|^4, worked out monomial by
        // monomial below.
        let f = MPoly::<Quad>::monomial(3, vec![4, 0, 0], Quad::int(1));
        let h = harmonic_projection(&f, 3);
        assert!(h.laplacian().is_zero());
        let mut want = MPoly::<Quad>::zero(3);
        want.add_term(vec![4, 0, 0], Quad::ratio(8, 35));
        want.add_term(vec![0, 4, 0], Quad::ratio(3, 35));
        want.add_term(vec![0, 0, 4], Quad::ratio(3, 35));
        want.add_term(vec![2, 2, 0], Quad::ratio(-24, 35));
        want.add_term(vec![2, 0, 2], Quad::ratio(-24, 35));
        want.add_term(vec![0, 2, 2], Quad::ratio(6, 35));
        assert_eq!(h, want);
    }

    #[test]
    fn substitution_rotates_quadratic() {
        // Under x -> (y2, -y1), x1^2 + x2^2 is preserved.
        let p = MPoly::<Quad>::norm_squared(2);
        let rot = vec![
            vec![Quad::int(0), Quad::int(1)],
            vec![Quad::int(-1), Quad::int(0)],
        ];
        assert_eq!(p.substitute_linear(&rot), p);
    }
}
