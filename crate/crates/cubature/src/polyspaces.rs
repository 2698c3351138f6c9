//! Polynomial infrastructure on spheres and intervals.
//!
//! Houses the kernel polynomials Q/C/R in the inner-product variable T,
//! the dimension formulas they reproduce at T = 1, Legendre polynomials,
//! Gauss and Newton-Cotes quadrature on intervals, and the exact moment
//! constants of the round sphere and the Gaussian measure.
//!
//! Kernel conventions for the sphere of dimension n (ambient R^n, n >= 2):
//! Q^(0) = 1, Q^(1) = n T, and for k >= 1
//!     Q^(k+1) = ((n+2k)/(k+1)) (T Q^(k) - ((n+k-3)/(n+2k-4)) Q^(k-1)).
//! At n = 2 the recurrence denominator degenerates at k = 1, so that
//! dimension uses Q^(k) = 2 T_k (Chebyshev) with Q^(0) = 1; both branches
//! are validated against the exact harmonicity oracle in the tests.
//! C^(k) = sum of Q^(k-2j) over j <= k/2, R^(k) = sum of Q^(j) over j <= k.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combin::{binomial, binomial_usize, double_factorial_odd};
use crate::scalar::{br, bri, Scalar};
use crate::{CubatureError, Result};

// ---------------------------------------------------------------------------
// Dimension formulas
// ---------------------------------------------------------------------------

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(CubatureError::InvalidInput(format!(
            "sphere dimension parameter n must be >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Dimension of the space of degree-k harmonics on the (n-1)-sphere:
/// binom(n+k-1, n-1) - binom(n+k-3, n-1). Degenerate n = 1 is allowed so
/// that S^0 = {-1, +1} diagnostics work; kernels themselves need n >= 2.
pub fn dim_h(n: usize, k: usize) -> usize {
    assert!(n >= 1);
    let a = binomial(n + k - 1, n - 1);
    let b = if n + k >= 3 { binomial(n + k - 3, n - 1) } else { BigInt::zero() };
    (a - b).to_usize().expect("dim_h overflow")
}

/// Dimension of degree-k polynomial functions on the sphere (restrictions of
/// homogeneous degree-k polynomials): binom(n+k-1, n-1).
pub fn dim_p(n: usize, k: usize) -> usize {
    assert!(n >= 1);
    binomial_usize(n + k - 1, n - 1)
}

/// Dimension of all polynomial functions of degree <= k on the sphere:
/// dim_p(n, k) + dim_p(n, k-1).
pub fn dim_f(n: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    dim_p(n, k) + dim_p(n, k - 1)
}

// ---------------------------------------------------------------------------
// Kernel polynomials
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Q,
    C,
    R,
}

/// A kernel polynomial in the normalized inner-product variable T, with
/// exact rational coefficients (coeffs[i] multiplies T^i).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelPolynomial {
    pub ambient_dim: usize,
    pub degree: usize,
    pub kind: KernelKind,
    pub coeffs: Vec<BigRational>,
}

fn poly_trim(c: &mut Vec<BigRational>) {
    while c.len() > 1 && c.last().map(|v| v.is_zero()).unwrap_or(false) {
        c.pop();
    }
}

fn poly_add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in b.iter().enumerate() {
        out[i] += v;
    }
    poly_trim(&mut out);
    out
}

fn poly_scale(a: &[BigRational], s: &BigRational) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = a.iter().map(|v| v * s).collect();
    poly_trim(&mut out);
    out
}

fn poly_shift_mul_t(a: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    out.extend_from_slice(a);
    out
}

/// All Q^(j) for j = 0..=kmax in dimension n.
pub fn q_kernels_upto(n: usize, kmax: usize) -> Result<Vec<KernelPolynomial>> {
    check_n(n)?;
    let mut coeffs: Vec<Vec<BigRational>> = Vec::with_capacity(kmax + 1);
    coeffs.push(vec![BigRational::one()]);
    if kmax >= 1 {
        if n == 2 {
            // 2 T_k via the Chebyshev recurrence T_{k+1} = 2 t T_k - T_{k-1}.
            coeffs.push(vec![BigRational::zero(), bri(2)]);
            for k in 1..kmax {
                let prev = &coeffs[k - 1];
                let cur = &coeffs[k];
                let mut next = poly_scale(&poly_shift_mul_t(cur), &bri(2));
                // subtract previous; at k = 1 the "previous" is Q^(0) = 1,
                // whose Chebyshev normalization is 2 T_0 = 2, hence halved.
                let sub = if k == 1 { poly_scale(prev, &bri(2)) } else { prev.clone() };
                next = poly_add(&next, &poly_scale(&sub, &bri(-1)));
                coeffs.push(next);
            }
        } else {
            coeffs.push(vec![BigRational::zero(), bri(n as i64)]);
            for k in 1..kmax {
                let ki = k as i64;
                let ni = n as i64;
                let t_qk = poly_shift_mul_t(&coeffs[k]);
                let ratio = br(ni + ki - 3, ni + 2 * ki - 4);
                let inner = poly_add(&t_qk, &poly_scale(&coeffs[k - 1], &(-ratio)));
                let lead = br(ni + 2 * ki, ki + 1);
                coeffs.push(poly_scale(&inner, &lead));
            }
        }
    }
    Ok(coeffs
        .into_iter()
        .enumerate()
        .map(|(k, c)| KernelPolynomial { ambient_dim: n, degree: k, kind: KernelKind::Q, coeffs: c })
        .collect())
}

/// The degree-k kernel Q^(k) for dimension n.
pub fn gegenbauer_q(n: usize, k: usize) -> Result<KernelPolynomial> {
    Ok(q_kernels_upto(n, k)?.pop().expect("nonempty"))
}

/// C^(k) = Q^(k) + Q^(k-2) + ... ; value at 1 is dim_p(n, k).
pub fn kernel_c(n: usize, k: usize) -> Result<KernelPolynomial> {
    let qs = q_kernels_upto(n, k)?;
    let mut acc = vec![BigRational::zero()];
    let mut j = k as i64;
    while j >= 0 {
        acc = poly_add(&acc, &qs[j as usize].coeffs);
        j -= 2;
    }
    Ok(KernelPolynomial { ambient_dim: n, degree: k, kind: KernelKind::C, coeffs: acc })
}

/// R^(k) = Q^(0) + Q^(1) + ... + Q^(k); value at 1 is dim_f(n, k).
pub fn kernel_r(n: usize, k: usize) -> Result<KernelPolynomial> {
    let qs = q_kernels_upto(n, k)?;
    let mut acc = vec![BigRational::zero()];
    for q in &qs {
        acc = poly_add(&acc, &q.coeffs);
    }
    Ok(KernelPolynomial { ambient_dim: n, degree: k, kind: KernelKind::R, coeffs: acc })
}

impl KernelPolynomial {
    pub fn eval<S: Scalar>(&self, t: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + S::from_rational(c);
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.eval(&t)
    }

    pub fn value_at_one(&self) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn derivative(&self) -> Vec<BigRational> {
        if self.coeffs.len() <= 1 {
            return vec![BigRational::zero()];
        }
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * bri(i as i64))
            .collect()
    }

    /// Real roots inside [-1, 1], found by sign-scan plus bisection. The
    /// kernels used for root-set diagnostics have simple roots there.
    pub fn roots_in_unit_interval(&self) -> Vec<f64> {
        let f = |t: f64| self.eval_f64(t);
        let grid = 1 << 14;
        let mut roots = Vec::new();
        let mut prev_t = -1.0f64;
        let mut prev_v = f(prev_t);
        for i in 1..=grid {
            let t = -1.0 + 2.0 * (i as f64) / (grid as f64);
            let v = f(t);
            if prev_v == 0.0 {
                roots.push(prev_t);
            } else if prev_v * v < 0.0 {
                let (mut lo, mut hi) = (prev_t, t);
                let (mut flo, _fhi) = (prev_v, v);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if flo * fm < 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_t = t;
            prev_v = v;
        }
        if prev_v == 0.0 {
            roots.push(1.0);
        }
        roots
    }
}

/// Evaluate Q^(1)..Q^(kmax) at a scalar value via the three-term recurrence
/// (no coefficient expansion; the fast path for residual sums).
pub fn q_values_at<S: Scalar>(n: usize, kmax: usize, t: &S) -> Vec<S> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(S::one());
    if kmax == 0 {
        return out;
    }
    if n == 2 {
        // 2 T_k: T_{k+1} = 2 t T_k - T_{k-1}
        let mut tk_prev = S::one();
        let mut tk = t.clone();
        out.push(S::from_int(2) * tk.clone());
        for _ in 1..kmax {
            let next = S::from_int(2) * t.clone() * tk.clone() - tk_prev.clone();
            tk_prev = tk;
            tk = next;
            out.push(S::from_int(2) * tk.clone());
        }
        return out;
    }
    out.push(S::from_int(n as i64) * t.clone());
    for k in 1..kmax {
        let ki = k as i64;
        let ni = n as i64;
        let ratio = S::ratio(ni + ki - 3, ni + 2 * ki - 4);
        let lead = S::ratio(ni + 2 * ki, ki + 1);
        let next = lead * (t.clone() * out[k].clone() - ratio * out[k - 1].clone());
        out.push(next);
    }
    out
}

// ---------------------------------------------------------------------------
// Legendre polynomials and quadrature
// ---------------------------------------------------------------------------

/// Exact coefficients of the Legendre polynomial P_l on [-1, 1].
pub fn legendre(l: usize) -> Vec<BigRational> {
    let mut p0 = vec![BigRational::one()];
    if l == 0 {
        return p0;
    }
    let mut p1 = vec![BigRational::zero(), BigRational::one()];
    for k in 1..l {
        let ki = k as i64;
        let a = poly_scale(&poly_shift_mul_t(&p1), &br(2 * ki + 1, ki + 1));
        let b = poly_scale(&p0, &br(-ki, ki + 1));
        let next = poly_add(&a, &b);
        p0 = p1;
        p1 = next;
    }
    p1
}

fn eval_rational_poly(c: &[BigRational], t: f64) -> f64 {
    let mut acc = 0.0f64;
    for v in c.iter().rev() {
        acc = acc * t + v.to_f64().unwrap();
    }
    acc
}

/// A one-dimensional quadrature rule. `exact_degree` is the largest total
/// degree the rule reproduces exactly; Gauss rules have positive weights.
#[derive(Clone, Debug)]
pub struct QuadratureRule<S> {
    pub nodes: Vec<S>,
    pub weights: Vec<S>,
    pub interval: (S, S),
    pub exact_degree: usize,
    pub positive_weights: bool,
}

impl<S: Scalar> QuadratureRule<S> {
    pub fn integrate<F: Fn(&S) -> S>(&self, f: F) -> S {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w.clone() * f(x))
            .sum()
    }

    pub fn integrate_monomial(&self, d: u32) -> S {
        self.integrate(|x| x.powu(d))
    }

    /// Total mass, which must equal the interval length.
    pub fn total_weight(&self) -> S {
        self.weights.iter().cloned().sum()
    }

    /// Affine transport of the rule onto [a, b].
    pub fn scaled_to(&self, a: S, b: S) -> QuadratureRule<S> {
        let (lo, hi) = self.interval.clone();
        let len = hi - lo.clone();
        let half = (b.clone() - a.clone()) / len.clone();
        let nodes = self
            .nodes
            .iter()
            .map(|x| a.clone() + (x.clone() - lo.clone()) * half.clone())
            .collect();
        let weights = self.weights.iter().map(|w| w.clone() * half.clone()).collect();
        QuadratureRule {
            nodes,
            weights,
            interval: (a, b),
            exact_degree: self.exact_degree,
            positive_weights: self.positive_weights,
        }
    }
}

/// Gauss rule with l nodes on (a, b): nodes are the roots of P_l (Newton from
/// Chebyshev guesses, bisection fallback), weights 2/((1-x^2) P_l'(x)^2);
/// exact through degree 2l - 1 with all weights positive.
pub fn gauss_rule(l: usize, interval: (f64, f64)) -> Result<QuadratureRule<f64>> {
    if l < 1 {
        return Err(CubatureError::InvalidInput("gauss rule needs l >= 1".into()));
    }
    let pl = legendre(l);
    let dpl: Vec<BigRational> = {
        let kp = KernelPolynomial {
            ambient_dim: 2,
            degree: l,
            kind: KernelKind::Q,
            coeffs: pl.clone(),
        };
        kp.derivative()
    };
    let f = |t: f64| eval_rational_poly(&pl, t);
    let df = |t: f64| eval_rational_poly(&dpl, t);
    let mut nodes = Vec::with_capacity(l);
    for j in 1..=l {
        // Chebyshev-based initial guess, then safeguarded Newton.
        let mut x = (std::f64::consts::PI * (j as f64 - 0.25) / (l as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let fx = f(x);
            let dfx = df(x);
            if dfx == 0.0 {
                break;
            }
            let step = fx / dfx;
            x -= step;
            if step.abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged && f(x).abs() > 1e-13 {
            // Bisection fallback on a bracket around the Chebyshev guess.
            let guess = (std::f64::consts::PI * (j as f64 - 0.25) / (l as f64 + 0.5)).cos();
            let mut lo = (guess - 2.0 / (l as f64)).max(-1.0);
            let mut hi = (guess + 2.0 / (l as f64)).min(1.0);
            if f(lo) * f(hi) > 0.0 {
                return Err(CubatureError::NonConvergence(format!(
                    "legendre root {j} of P_{l} did not converge"
                )));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            x = 0.5 * (lo + hi);
        }
        nodes.push(-x); // ascending order: guesses come out descending
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let d = df(x);
            2.0 / ((1.0 - x * x) * d * d)
        })
        .collect();
    let base = QuadratureRule {
        nodes,
        weights,
        interval: (-1.0, 1.0),
        exact_degree: 2 * l - 1,
        positive_weights: true,
    };
    Ok(if interval == (-1.0, 1.0) { base } else { base.scaled_to(interval.0, interval.1) })
}

/// Newton-Cotes rule with l equispaced nodes on [-1, 1]: exact rational
/// weights (integrals of the Lagrange basis), exact through degree l - 1.
/// All weights are positive iff l <= 8 or l = 10; the flag reports it.
pub fn newton_cotes_rule(l: usize) -> Result<QuadratureRule<crate::scalar::Quad>> {
    use crate::scalar::Quad;
    if l < 2 {
        return Err(CubatureError::InvalidInput("newton-cotes needs l >= 2".into()));
    }
    let nodes_r: Vec<BigRational> = (1..=l)
        .map(|j| bri(-1) + br(2 * (j as i64 - 1), l as i64 - 1))
        .collect();
    let mut weights_r = Vec::with_capacity(l);
    for j in 0..l {
        // Lagrange basis polynomial through node j.
        let mut num = vec![BigRational::one()];
        let mut den = BigRational::one();
        for i in 0..l {
            if i == j {
                continue;
            }
            // multiply num by (t - x_i)
            let mut next = vec![BigRational::zero(); num.len() + 1];
            for (d, c) in num.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * &nodes_r[i];
            }
            num = next;
            den *= &nodes_r[j] - &nodes_r[i];
        }
        // integral over [-1, 1]: only even powers contribute.
        let mut int = BigRational::zero();
        for (d, c) in num.iter().enumerate() {
            if d % 2 == 0 {
                int += c * br(2, d as i64 + 1);
            }
        }
        weights_r.push(int / den);
    }
    let positive = weights_r.iter().all(|w| w.is_positive());
    Ok(QuadratureRule {
        nodes: nodes_r.into_iter().map(Quad::rational).collect(),
        weights: weights_r.into_iter().map(Quad::rational).collect(),
        interval: (Quad::int(-1), Quad::int(1)),
        exact_degree: l - 1,
        positive_weights: positive,
    })
}

/// The classical three-point error bound instance: for a C^4 integrand on
/// [a, b], |three-point rule - integral| <= (b-a)^5 / 2880 * sup |phi''''|.
pub fn simpson_error_bound(a: &BigRational, b: &BigRational, sup4: &BigRational) -> BigRational {
    let len = b - a;
    let len5 = &len * &len * &len * &len * &len;
    len5 / bri(2880) * sup4
}

// ---------------------------------------------------------------------------
// Moment constants
// ---------------------------------------------------------------------------

/// c_(2l) = (2l-1)!! / (n (n+2) ... (n+2l-2)); c_0 = 1. This is the common
/// value of the normalized even moments integral over the unit sphere.
/// n = 1 (the two-point sphere) is allowed and gives c_(2l) = 1.
pub fn moment_constant_sphere(n: usize, l: usize) -> Result<BigRational> {
    if n < 1 {
        return Err(CubatureError::InvalidInput("need n >= 1".into()));
    }
    let mut den = BigInt::one();
    for i in 0..l {
        den *= BigInt::from(n + 2 * i);
    }
    Ok(BigRational::new(double_factorial_odd(l), den))
}

/// Normalized Gaussian even moment: the integral of <a|x>^(2l) against the
/// normalized density exp(-|x|^2) equals ((2l-1)!!/2^l) <a|a>^l.
pub fn moment_constant_gauss(l: usize) -> BigRational {
    BigRational::new(double_factorial_odd(l), BigInt::from(2u32).pow(l as u32))
}

/// Exact integral of x^a over the unit sphere against the normalized
/// rotation-invariant measure; zero when any exponent is odd.
pub fn monomial_sphere_integral(n: usize, exponents: &[u16]) -> Result<BigRational> {
    check_n(n)?;
    if exponents.len() != n {
        return Err(CubatureError::InvalidInput(format!(
            "expected {n} exponents, got {}",
            exponents.len()
        )));
    }
    if exponents.iter().any(|&a| a % 2 == 1) {
        return Ok(BigRational::zero());
    }
    let total_half: usize = exponents.iter().map(|&a| (a / 2) as usize).sum();
    let mut num = BigInt::one();
    for &a in exponents {
        num *= double_factorial_odd((a / 2) as usize);
    }
    let mut den = BigInt::one();
    for j in 0..total_half {
        den *= BigInt::from(n + 2 * j);
    }
    Ok(BigRational::new(num, den))
}

/// Exact integral of x^a against the normalized Gaussian exp(-|x|^2) on R^n
/// (any n >= 1 consistent with the exponent count); zero for odd exponents.
pub fn monomial_gauss_integral(exponents: &[u16]) -> BigRational {
    if exponents.iter().any(|&a| a % 2 == 1) {
        return BigRational::zero();
    }
    let mut out = BigRational::one();
    for &a in exponents {
        let l = (a / 2) as usize;
        out *= BigRational::new(double_factorial_odd(l), BigInt::from(2u32).pow(l as u32));
    }
    out
}

/// Even moments of the normalized measure (1-t^2)^e dt on (-1, 1), where the
/// exponent is passed doubled (two_e = 2e) so half-integer exponents stay
/// exact. Returns moments 0..=dmax (odd ones zero).
pub fn interval_measure_moments(two_e: i64, dmax: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); dmax + 1];
    out[0] = BigRational::one();
    let mut cur = BigRational::one();
    let mut j = 1i64;
    while (2 * j) as usize <= dmax {
        cur *= br(2 * j - 1, two_e + 2 * j + 1);
        out[(2 * j) as usize] = cur.clone();
        j += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_examples() {
        // Q^(0) = 1 in any dimension.
        assert_eq!(gegenbauer_q(5, 0).unwrap().coeffs, vec![bri(1)]);
        // Q^(1) = n T.
        assert_eq!(gegenbauer_q(3, 1).unwrap().coeffs, vec![bri(0), bri(3)]);
        // Q^(2) for n = 3 is (15 T^2 - 5)/2.
        assert_eq!(
            gegenbauer_q(3, 2).unwrap().coeffs,
            vec![br(-5, 2), bri(0), br(15, 2)]
        );
    }

    #[test]
    fn c_and_r_examples() {
        assert_eq!(kernel_c(3, 2).unwrap().coeffs, vec![br(-3, 2), bri(0), br(15, 2)]);
        assert_eq!(kernel_r(2, 0).unwrap().coeffs, vec![bri(1)]);
        assert_eq!(kernel_c(24, 5).unwrap().value_at_one(), bri(98280));
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(gegenbauer_q(1, 3).is_err());
    }

    #[test]
    fn dims() {
        assert_eq!(dim_f(3, 2), 9);
        assert_eq!(dim_f(6, 2), 27);
        for k in 0..=8 {
            assert_eq!(dim_h(3, k), 2 * k + 1);
        }
        assert_eq!(dim_p(24, 5), 98280);
    }

    #[test]
    fn moment_constants() {
        assert_eq!(moment_constant_sphere(3, 2).unwrap(), br(1, 5));
        assert_eq!(moment_constant_sphere(4, 2).unwrap(), br(1, 8));
        assert_eq!(moment_constant_sphere(7, 0).unwrap(), bri(1));
        assert_eq!(moment_constant_gauss(1), br(1, 2));
    }

    #[test]
    fn monomial_integrals() {
        assert_eq!(monomial_sphere_integral(3, &[1, 0, 0]).unwrap(), bri(0));
        assert_eq!(monomial_sphere_integral(3, &[2, 0, 0]).unwrap(), br(1, 3));
        assert_eq!(monomial_sphere_integral(3, &[2, 2, 0]).unwrap(), br(1, 15));
    }

    #[test]
    fn q_values_recurrence_matches_coefficients() {
        for n in [2usize, 3, 4, 8] {
            let qs = q_kernels_upto(n, 9).unwrap();
            let t = crate::scalar::Quad::rational(br(3, 7));
            let vals = q_values_at(n, 9, &t);
            for (k, q) in qs.iter().enumerate() {
                assert_eq!(vals[k], q.eval(&t), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn newton_cotes_simpson_weights() {
        let r = newton_cotes_rule(3).unwrap();
        let w: Vec<BigRational> =
            r.weights.iter().map(|q| q.as_rational().unwrap().clone()).collect();
        assert_eq!(w, vec![br(1, 3), br(4, 3), br(1, 3)]);
    }
}
