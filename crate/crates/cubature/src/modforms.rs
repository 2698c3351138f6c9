//! Exact q-series arithmetic: the discriminant series and its tau
//! coefficients, Jacobi theta constants on the quarter-exponent grid, the
//! rank-8 theta form Q, the derived coefficient sequences mu, nu and
//! kappa^[n], nonvanishing scans, and harmonic theta series of even
//! lattices.
//!
//! Exponent bookkeeping: a series holds integer coefficients on slots
//! s = 0, 1, 2, ... standing for q^(s/grid) with grid 1, 2, or 4. Products
//! of truncated series are valid to the shorter truncation. The
//! discriminant is handled in x-units (x = q^2), where its expansion reads
//! x - 24x^2 + 252x^3 - 1472x^4 + ...; the third power of the Euler
//! product is expanded by its pentagonal-style sparse identity
//! phi^3 = sum (-1)^k (2k+1) x^(k(k+1)/2) and cubed up by squarings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::lattices::IntegralLattice;
use crate::mpoly::MPoly;
use crate::scalar::Quad;
use crate::{CubatureError, Result};

// ---------------------------------------------------------------------------
// QSeries
// ---------------------------------------------------------------------------

/// Truncated integer q-series on a fractional exponent grid: slot s holds
/// the coefficient of q^(s/grid).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    grid: i64,
    coeffs: Vec<BigInt>,
}

fn conv(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

impl QSeries {
    pub fn zero(grid: i64, len: usize) -> Self {
        assert!(grid == 1 || grid == 2 || grid == 4, "grid must be 1, 2, or 4");
        assert!(len > 0);
        QSeries { grid, coeffs: vec![BigInt::zero(); len] }
    }

    pub fn one(grid: i64, len: usize) -> Self {
        let mut s = Self::zero(grid, len);
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn grid_denominator(&self) -> i64 {
        self.grid
    }

    /// Number of valid slots; exponents below truncation()/grid are exact.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, slot: usize) -> &BigInt {
        assert!(slot < self.coeffs.len(), "slot beyond truncation");
        &self.coeffs[slot]
    }

    pub fn set_coeff(&mut self, slot: usize, v: BigInt) {
        assert!(slot < self.coeffs.len(), "slot beyond truncation");
        self.coeffs[slot] = v;
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        assert_eq!(self.grid, other.grid, "grid mismatch in series product");
        let len = self.coeffs.len().min(other.coeffs.len());
        QSeries { grid: self.grid, coeffs: conv(&self.coeffs, &other.coeffs, len) }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        assert_eq!(self.grid, other.grid, "grid mismatch in series sum");
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..len).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect();
        QSeries { grid: self.grid, coeffs }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        assert_eq!(self.grid, other.grid, "grid mismatch in series difference");
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..len).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect();
        QSeries { grid: self.grid, coeffs }
    }

    pub fn powu(&self, k: u32) -> QSeries {
        let len = self.coeffs.len();
        let mut result = QSeries::one(self.grid, len);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division of all coefficients by an integer.
    pub fn div_exact_int(&self, d: i64) -> Result<QSeries> {
        let dv = BigInt::from(d);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (s, c) in self.coeffs.iter().enumerate() {
            if (c % &dv) != BigInt::zero() {
                return Err(CubatureError::InvalidInput(format!(
                    "coefficient at slot {s} is not divisible by {d}"
                )));
            }
            coeffs.push(c / &dv);
        }
        Ok(QSeries { grid: self.grid, coeffs })
    }

    /// Re-express on another grid; errors when a nonzero coefficient sits
    /// on an exponent the target grid cannot represent.
    pub fn to_grid(&self, grid: i64) -> Result<QSeries> {
        assert!(grid == 1 || grid == 2 || grid == 4);
        if grid == self.grid {
            return Ok(self.clone());
        }
        // slot s on old grid = exponent s/self.grid = slot s*grid/self.grid
        let len_new = ((self.coeffs.len() as i64 - 1) * grid / self.grid + 1) as usize;
        let mut out = QSeries::zero(grid, len_new.max(1));
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let num = s as i64 * grid;
            if num % self.grid != 0 {
                return Err(CubatureError::InvalidInput(format!(
                    "exponent {s}/{} does not lie on grid 1/{grid}",
                    self.grid
                )));
            }
            let ns = (num / self.grid) as usize;
            if ns < out.coeffs.len() {
                out.coeffs[ns] = c.clone();
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Discriminant and tau
// ---------------------------------------------------------------------------

/// tau(1..=mmax) as table[m]; table[0] is zero padding. Computed from the
/// cube identity of the Euler product followed by three squarings.
pub fn tau_table(mmax: usize) -> Vec<BigInt> {
    assert!(mmax >= 1);
    let xmax = mmax - 1; // phi^24 needed through x^(m-1)
    let len = xmax + 1;
    let mut phi3 = vec![BigInt::zero(); len];
    let mut k = 0i64;
    loop {
        let e = (k * (k + 1) / 2) as usize;
        if e > xmax {
            break;
        }
        let c = BigInt::from(2 * k + 1);
        phi3[e] = if k % 2 == 0 { c } else { -c };
        k += 1;
    }
    let phi6 = conv(&phi3, &phi3, len);
    let phi12 = conv(&phi6, &phi6, len);
    let phi24 = conv(&phi12, &phi12, len);
    let mut table = vec![BigInt::zero(); mmax + 1];
    for m in 1..=mmax {
        table[m] = phi24[m - 1].clone();
    }
    table
}

pub fn tau(m: usize) -> Result<BigInt> {
    if m < 1 {
        return Err(CubatureError::InvalidInput("tau needs m >= 1".into()));
    }
    Ok(tau_table(m)[m].clone())
}

/// The discriminant series as a q-series on the integer grid: the
/// coefficient of q^(2m) is tau(m); odd slots vanish.
pub fn delta24(order: usize) -> QSeries {
    let mut s = QSeries::zero(1, order + 1);
    if order >= 2 {
        let table = tau_table(order / 2);
        for m in 1..=order / 2 {
            s.coeffs[2 * m] = table[m].clone();
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Jacobi thetas and the rank-8 form Q
// ---------------------------------------------------------------------------

/// Theta constants truncated at q-exponent `order_q`, all on grid 4:
/// theta2 = 2 sum q^((2k+1)^2/4), theta3 = sum q^(m^2),
/// theta4 = sum (-1)^m q^(m^2).
pub fn jacobi_thetas(order_q: usize) -> (QSeries, QSeries, QSeries) {
    let len = 4 * order_q + 1;
    let mut t2 = QSeries::zero(4, len);
    let mut t3 = QSeries::zero(4, len);
    let mut t4 = QSeries::zero(4, len);
    let two = BigInt::from(2);
    let mut k = 0usize;
    loop {
        let slot = (2 * k + 1) * (2 * k + 1);
        if slot >= len {
            break;
        }
        t2.coeffs[slot] = two.clone();
        k += 1;
    }
    t3.coeffs[0] = BigInt::one();
    t4.coeffs[0] = BigInt::one();
    let mut m = 1usize;
    loop {
        let slot = 4 * m * m;
        if slot >= len {
            break;
        }
        t3.coeffs[slot] = two.clone();
        t4.coeffs[slot] = if m % 2 == 0 { two.clone() } else { -two.clone() };
        m += 1;
    }
    (t2, t3, t4)
}

/// Q = theta3^8 - (theta2 theta4)^4 on the integer grid; its expansion
/// starts 1 + 240 q^2 + 2160 q^4, the even-slot coefficients being the
/// shell sizes of the even unimodular rank-8 lattice.
pub fn q_form(order_q: usize) -> Result<QSeries> {
    let (t2, t3, t4) = jacobi_thetas(order_q);
    let t38 = t3.powu(8);
    let mid = t2.mul(&t4).powu(4);
    t38.sub(&mid).to_grid(1)
}

/// theta3^8 on the integer grid (the eight-squares representation counts).
pub fn theta3_pow8(order_q: usize) -> Result<QSeries> {
    let (_, t3, _) = jacobi_thetas(order_q);
    t3.powu(8).to_grid(1)
}

/// Theta^[n] = (1/16)(theta2 theta4)^4 theta3^n for n >= 8, integer grid;
/// its q^1 coefficient is 1.
pub fn theta_series_n(n: usize, order_q: usize) -> Result<QSeries> {
    if n < 8 {
        return Err(CubatureError::InvalidInput("theta family needs n >= 8".into()));
    }
    let (t2, t3, t4) = jacobi_thetas(order_q);
    let mid = t2.mul(&t4).powu(4).div_exact_int(16)?;
    mid.mul(&t3.powu(n as u32)).to_grid(1)
}

// ---------------------------------------------------------------------------
// Coefficient sequences
// ---------------------------------------------------------------------------

/// mu(m) = sum over j = 1..m-1 of tau(j) tau(m-j), m >= 2.
pub fn mu(m: usize) -> Result<BigInt> {
    if m < 2 {
        return Err(CubatureError::InvalidInput("mu needs m >= 2".into()));
    }
    let table = tau_table(m - 1);
    let mut s = BigInt::zero();
    for j in 1..m {
        s += &table[j] * &table[m - j];
    }
    Ok(s)
}

/// Q in x-units (x = q^2): slot m = coefficient of q^(2m).
fn q_form_x_units(xmax: usize) -> Result<Vec<BigInt>> {
    let q = q_form(2 * xmax)?;
    let mut out = vec![BigInt::zero(); xmax + 1];
    for m in 0..=xmax {
        let c = q.coeff(2 * m).clone();
        out[m] = c;
    }
    // odd q-slots of Q must vanish
    for s in (1..q.truncation()).step_by(2) {
        if !q.coeff(s).is_zero() {
            return Err(CubatureError::VerificationFailed(
                "Q has an odd-exponent coefficient".into(),
            ));
        }
    }
    Ok(out)
}

/// nu_m: the x^m coefficient of Q times the discriminant (x-units).
pub fn nu(m: usize) -> Result<BigInt> {
    if m < 1 {
        return Err(CubatureError::InvalidInput("nu needs m >= 1".into()));
    }
    let qx = q_form_x_units(m - 1)?;
    let table = tau_table(m);
    let mut s = BigInt::zero();
    for j in 0..m {
        s += &qx[j] * &table[m - j];
    }
    Ok(s)
}

/// kappa^[n]_m: the q^m coefficient of Theta^[n], n >= 8.
pub fn kappa(n: usize, m: usize) -> Result<BigInt> {
    if m < 1 {
        return Err(CubatureError::InvalidInput("kappa needs m >= 1".into()));
    }
    Ok(theta_series_n(n, m)?.coeff(m).clone())
}

// ---------------------------------------------------------------------------
// Nonvanishing scans
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanSequence {
    Tau,
    Mu,
    Nu,
    Kappa(usize),
}

impl ScanSequence {
    pub fn parse(name: &str, n: Option<usize>) -> Result<Self> {
        match name {
            "tau" => Ok(ScanSequence::Tau),
            "mu" => Ok(ScanSequence::Mu),
            "nu" => Ok(ScanSequence::Nu),
            "kappa" => Ok(ScanSequence::Kappa(n.ok_or_else(|| {
                CubatureError::InvalidInput("kappa scan needs a dimension n".into())
            })?)),
            other => Err(CubatureError::InvalidInput(format!("unknown sequence '{other}'"))),
        }
    }

    /// First index the sequence is defined at.
    pub fn start(&self) -> usize {
        match self {
            ScanSequence::Mu => 2,
            _ => 1,
        }
    }
}

/// Index of the first zero value, scanning positions start..start+len.
pub fn first_zero(values: &[BigInt], start: usize) -> Option<usize> {
    values.iter().position(|v| v.is_zero()).map(|i| start + i)
}

/// Scan a coefficient sequence for zeros through index mmax; None means
/// every value in range is nonzero.
pub fn nonvanishing_scan(seq: ScanSequence, mmax: usize) -> Result<Option<usize>> {
    if mmax < 1 {
        return Err(CubatureError::InvalidInput("scan needs mmax >= 1".into()));
    }
    let start = seq.start();
    if mmax < start {
        return Ok(None);
    }
    let values: Vec<BigInt> = match seq {
        ScanSequence::Tau => {
            let t = tau_table(mmax);
            t[1..=mmax].to_vec()
        }
        ScanSequence::Mu => {
            let t = tau_table(mmax - 1);
            let prod = conv(&t, &t, mmax + 1);
            prod[2..=mmax].to_vec()
        }
        ScanSequence::Nu => {
            let qx = q_form_x_units(mmax - 1)?;
            let t = tau_table(mmax);
            let prod = conv(&qx, &t, mmax + 1);
            prod[1..=mmax].to_vec()
        }
        ScanSequence::Kappa(n) => {
            let s = theta_series_n(n, mmax)?;
            (1..=mmax).map(|m| s.coeff(m).clone()).collect()
        }
    };
    Ok(first_zero(&values, start))
}

// ---------------------------------------------------------------------------
// Harmonic theta series of even lattices
// ---------------------------------------------------------------------------

/// Exact harmonic theta series: slot m holds scale * sum of P(x) over the
/// norm-2m shell, where scale is the integer den^deg(P) times the common
/// coefficient denominator of P (so all slots are integers). The scale is
/// returned alongside; ratios of slots are scale-free. P must be
/// homogeneous with rational coefficients and exactly harmonic; the
/// lattice must be even.
pub fn harmonic_theta(
    lat: &IntegralLattice,
    p: &MPoly<Quad>,
    order: usize,
) -> Result<(QSeries, BigRational)> {
    if !lat.is_even() {
        return Err(CubatureError::InvalidInput(
            "harmonic theta needs an even lattice".into(),
        ));
    }
    if !p.is_homogeneous() {
        return Err(CubatureError::InvalidInput(
            "harmonic theta needs a homogeneous polynomial".into(),
        ));
    }
    if !p.laplacian().is_zero() {
        return Err(CubatureError::InvalidInput("polynomial is not harmonic".into()));
    }
    let deg = p.total_degree() as u32;
    // clear denominators
    let mut denom = BigInt::one();
    let mut terms_r: Vec<(Vec<u16>, BigRational)> = Vec::new();
    for (expo, c) in &p.terms {
        let r = c.as_rational().ok_or_else(|| {
            CubatureError::InvalidInput("harmonic theta needs rational coefficients".into())
        })?;
        denom = num_integer::lcm(denom.clone(), r.denom().clone());
        terms_r.push((expo.clone(), r.clone()));
    }
    let terms: Vec<(Vec<u16>, BigInt)> = terms_r
        .into_iter()
        .map(|(e, r)| {
            let v = r.numer() * (&denom / r.denom());
            (e, v)
        })
        .collect();
    let mut series = QSeries::zero(1, order + 1);
    // slot 0: the zero vector contributes P(0)
    if deg == 0 {
        let c: BigInt = terms.iter().map(|(_, v)| v.clone()).sum();
        series.coeffs[0] = c;
    }
    if order >= 1 {
        let buckets = lat.shells_upto(2 * order as i64)?;
        // i128 fast path when coefficient and value bounds allow it
        let max_coeff = terms
            .iter()
            .map(|(_, v)| v.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0f64, f64::max);
        let max_entry = buckets
            .values()
            .flat_map(|vs| vs.iter().flat_map(|v| v.iter().map(|&c| c.unsigned_abs())))
            .max()
            .unwrap_or(1)
            .max(1) as f64;
        let nvec: usize = buckets.values().map(|v| v.len()).sum();
        let bound = max_coeff
            * max_entry.powi(deg as i32)
            * terms.len().max(1) as f64
            * nvec.max(1) as f64;
        let fast = bound < 1e30 && terms.iter().all(|(_, v)| v.to_i64().is_some());
        for (norm, vecs) in &buckets {
            if norm % 2 != 0 {
                return Err(CubatureError::VerificationFailed(
                    "even lattice produced an odd-norm shell".into(),
                ));
            }
            let slot = (norm / 2) as usize;
            if slot > order {
                continue;
            }
            let total: BigInt = if fast {
                let terms_i: Vec<(&[u16], i64)> =
                    terms.iter().map(|(e, v)| (e.as_slice(), v.to_i64().unwrap())).collect();
                let mut acc: i128 = 0;
                for v in vecs {
                    acc += eval_int_terms(&terms_i, v);
                }
                BigInt::from(acc)
            } else {
                let mut acc = BigInt::zero();
                for v in vecs {
                    for (expo, c) in &terms {
                        let mut prod = BigInt::one();
                        for (i, &e) in expo.iter().enumerate() {
                            for _ in 0..e {
                                prod *= BigInt::from(v[i]);
                            }
                        }
                        acc += c * prod;
                    }
                }
                acc
            };
            series.coeffs[slot] = total;
        }
    }
    let mut scale = BigRational::from(denom);
    for _ in 0..deg {
        scale *= BigRational::from(BigInt::from(lat.denominator()));
    }
    Ok((series, scale))
}

/// Integer evaluation of scaled terms at an integer point (i128 window).
fn eval_int_terms(terms: &[(&[u16], i64)], v: &[i64]) -> i128 {
    let mut acc: i128 = 0;
    for (expo, c) in terms {
        let mut prod: i128 = *c as i128;
        for (i, &e) in expo.iter().enumerate() {
            for _ in 0..e {
                prod *= v[i] as i128;
            }
        }
        acc += prod;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::standard;

    #[test]
    fn tau_head_values() {
        assert_eq!(tau(1).unwrap(), BigInt::from(1));
        assert_eq!(tau(2).unwrap(), BigInt::from(-24));
        assert_eq!(tau(3).unwrap(), BigInt::from(252));
        assert_eq!(tau(4).unwrap(), BigInt::from(-1472));
        assert_eq!(tau(5).unwrap(), BigInt::from(4830));
    }

    #[test]
    fn delta_series_slots() {
        let d = delta24(8);
        assert_eq!(d.coeff(2), &BigInt::from(1));
        assert_eq!(d.coeff(3), &BigInt::zero());
        assert_eq!(d.coeff(4), &BigInt::from(-24));
        assert_eq!(d.coeff(6), &BigInt::from(252));
        assert_eq!(d.coeff(8), &BigInt::from(-1472));
    }

    #[test]
    fn theta_heads() {
        let (t2, t3, t4) = jacobi_thetas(9);
        // theta3 = 1 + 2q + 2q^4 + 2q^9
        assert_eq!(t3.coeff(0), &BigInt::from(1));
        assert_eq!(t3.coeff(4), &BigInt::from(2));
        assert_eq!(t3.coeff(16), &BigInt::from(2));
        assert_eq!(t3.coeff(36), &BigInt::from(2));
        // theta2 = 2q^(1/4) + 2q^(9/4) + ...
        assert_eq!(t2.coeff(1), &BigInt::from(2));
        assert_eq!(t2.coeff(9), &BigInt::from(2));
        // theta4 alternates
        assert_eq!(t4.coeff(4), &BigInt::from(-2));
        assert_eq!(t4.coeff(16), &BigInt::from(2));
    }

    #[test]
    fn q_form_heads_and_eight_squares() {
        let q = q_form(8).unwrap();
        assert_eq!(q.coeff(0), &BigInt::from(1));
        assert_eq!(q.coeff(2), &BigInt::from(240));
        assert_eq!(q.coeff(4), &BigInt::from(2160));
        assert_eq!(q.coeff(6), &BigInt::from(6720));
        assert_eq!(q.coeff(1), &BigInt::zero());
        let r8 = theta3_pow8(4).unwrap();
        assert_eq!(r8.coeff(1), &BigInt::from(16));
    }

    #[test]
    fn sequence_heads() {
        assert_eq!(mu(2).unwrap(), BigInt::from(1));
        assert_eq!(mu(3).unwrap(), BigInt::from(-48)); // 2 tau(1) tau(2)
        assert_eq!(nu(1).unwrap(), BigInt::from(1));
        assert_eq!(nu(2).unwrap(), BigInt::from(216)); // 240 tau(1) + tau(2)
        assert_eq!(kappa(8, 1).unwrap(), BigInt::from(1));
        assert!(kappa(7, 1).is_err());
    }

    #[test]
    fn scan_finds_planted_zero_and_small_ranges() {
        let vals = vec![BigInt::from(3), BigInt::zero(), BigInt::from(5)];
        assert_eq!(first_zero(&vals, 1), Some(2));
        assert_eq!(nonvanishing_scan(ScanSequence::Tau, 60).unwrap(), None);
        assert_eq!(nonvanishing_scan(ScanSequence::Mu, 60).unwrap(), None);
        assert_eq!(nonvanishing_scan(ScanSequence::Nu, 40).unwrap(), None);
        assert_eq!(nonvanishing_scan(ScanSequence::Kappa(8), 40).unwrap(), None);
    }

    #[test]
    fn series_algebra_spot_checks() {
        let (t2, t3, t4) = jacobi_thetas(16);
        let ab = t2.mul(&t3);
        let ba = t3.mul(&t2);
        assert_eq!(ab, ba);
        let left = t2.mul(&t3).mul(&t4);
        let right = t2.mul(&t3.mul(&t4));
        assert_eq!(left, right);
        let sq = t3.powu(2);
        assert_eq!(sq, t3.mul(&t3));
    }

    #[test]
    fn plain_theta_matches_shells() {
        let e8 = standard("E8").unwrap();
        let one = MPoly::constant(8, Quad::int(1));
        let (series, scale) = harmonic_theta(&e8, &one, 3).unwrap();
        assert_eq!(scale, BigRational::from(BigInt::one()));
        assert_eq!(series.coeff(0), &BigInt::from(1));
        assert_eq!(series.coeff(1), &BigInt::from(240));
        assert_eq!(series.coeff(2), &BigInt::from(2160));
        assert_eq!(series.coeff(3), &BigInt::from(6720));
        // matches the q-form slots
        let q = q_form(6).unwrap();
        for m in 0..=3usize {
            assert_eq!(series.coeff(m), q.coeff(2 * m));
        }
    }

    #[test]
    fn degree_two_harmonic_theta_vanishes() {
        let e8 = standard("E8").unwrap();
        let mut p = MPoly::<Quad>::zero(8);
        p.add_term(vec![2, 0, 0, 0, 0, 0, 0, 0], Quad::int(1));
        p.add_term(vec![0, 2, 0, 0, 0, 0, 0, 0], Quad::int(-1));
        let (series, _) = harmonic_theta(&e8, &p, 2).unwrap();
        for m in 0..=2usize {
            assert_eq!(series.coeff(m), &BigInt::zero());
        }
        // non-harmonic rejected
        let mut bad = MPoly::<Quad>::zero(8);
        bad.add_term(vec![2, 0, 0, 0, 0, 0, 0, 0], Quad::int(1));
        assert!(harmonic_theta(&e8, &bad, 1).is_err());
    }
}
