//! Strength verification and tightness diagnostics for weighted point sets.
//!
//! Two independent criteria are implemented and cross-validated:
//!
//! * kernel criterion: residual(j) = sum over pairs of
//!   W(x) W(y) Q^(j)(<x|y>/rho^2) is nonnegative, and the set has strength k
//!   iff residuals 1..k all vanish;
//! * moment criterion: sum of W(x) <x|u>^d equals, as a polynomial identity
//!   in u, the constant c_d rho^d (u' P u)^(d/2) for even d (P the projection
//!   onto the span of the points) and 0 for odd d.
//!
//! The two must agree on every input; they are deliberately kept separate so
//! each can catch bugs in the other. Exact sets are verified exactly by
//! grouping pairs over their distinct normalized inner products; float sets
//! use deterministic parallel compensated summation.
//!
//! Also here: tightness tests, root-set diagnostics for tight sets, weight
//! uniformity, the Banach-space embedding, and Gaussian-measure strength.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::budget_cap;
use crate::linalg;
use crate::mpoly::MPoly;
use crate::pointsets::{
    dot, inner_product_profile, AnyPointSet, GaussianPointSet, PointSet,
};
use crate::polyspaces::{
    dim_f, dim_p, kernel_c, kernel_r, moment_constant_gauss, moment_constant_sphere,
    q_values_at, KernelPolynomial,
};
use crate::scalar::{Quad, Scalar};
use crate::{CubatureError, Result};

/// Default float tolerance for residual zero-tests.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Kernel,
    Moments,
}

#[derive(Clone, Debug)]
pub struct StrengthReport {
    pub max_strength: usize,
    /// (degree j, residual magnitude) for j = 1..=k_max. For the kernel
    /// criterion this is the pair sum against Q^(j); for the moment
    /// criterion it is the largest coefficient deviation at degree j.
    pub residuals: Vec<(usize, f64)>,
    pub tight: bool,
    pub criterion: Criterion,
    pub exact: bool,
    pub tol: f64,
    /// True when the scan ran out of degrees with every residual zero, so
    /// max_strength is only a lower bound.
    pub capped: bool,
}

impl StrengthReport {
    /// Key-value report body, one `key=value` per line.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("strength={}\n", self.max_strength));
        out.push_str(&format!("tight={}\n", self.tight));
        out.push_str(&format!(
            "criterion={}\n",
            match self.criterion {
                Criterion::Kernel => "kernel",
                Criterion::Moments => "moments",
            }
        ));
        out.push_str(&format!("mode={}\n", if self.exact { "exact" } else { "float" }));
        out.push_str(&format!("capped={}\n", self.capped));
        for (j, r) in &self.residuals {
            out.push_str(&format!("residual_{j}={r:.3e}\n"));
        }
        out
    }
}

/// |X| equals the minimal possible size for the given strength: dim_f(n, l)
/// when k = 2l, twice dim_p(n, l) when k = 2l + 1.
pub fn tightness(npoints: usize, dim: usize, strength: usize) -> bool {
    if strength == 0 {
        return false;
    }
    let l = strength / 2;
    if strength % 2 == 0 {
        npoints == dim_f(dim, l)
    } else {
        npoints == 2 * dim_p(dim, l)
    }
}

// ---------------------------------------------------------------------------
// Kernel criterion
// ---------------------------------------------------------------------------

/// Ordering wrapper so exact scalars can key a BTreeMap.
#[derive(Clone, Debug)]
struct OrdKey<S: Scalar>(S);

impl<S: Scalar> PartialEq for OrdKey<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp_real(&other.0) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for OrdKey<S> {}
impl<S: Scalar> PartialOrd for OrdKey<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for OrdKey<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_real(&other.0)
    }
}

/// Exact kernel residuals from a (t, mass) profile: residual(j) =
/// sum of mass * Q^(j)(t). The profile must already include the diagonal
/// pairs (t = 1, mass = sum of W^2) and count unordered pairs twice.
pub fn kernel_residuals_from_profile(
    n: usize,
    k_max: usize,
    profile: &[(Quad, Quad)],
) -> Result<Vec<Quad>> {
    if n < 2 {
        return Err(CubatureError::InvalidInput(
            "kernel criterion needs span dimension >= 2".into(),
        ));
    }
    let mut residuals = vec![Quad::int(0); k_max + 1];
    for (t, mass) in profile {
        let q = q_values_at(n, k_max, t);
        for (j, qv) in q.into_iter().enumerate() {
            residuals[j] = residuals[j].clone() + mass.clone() * qv;
        }
    }
    for (j, r) in residuals.iter().enumerate() {
        if j >= 1 && r.sign() < 0 {
            return Err(CubatureError::VerificationFailed(format!(
                "exact kernel residual at degree {j} is negative: {}",
                r.to_f64()
            )));
        }
    }
    Ok(residuals)
}

/// Exact kernel strength. Pairs are grouped by their distinct normalized
/// inner products, so the cost is dominated by the pairwise dot products.
pub fn strength_kernel_exact(ps: &PointSet<Quad>, k_max: usize) -> Result<StrengthReport> {
    let npts = ps.len();
    let work = npts
        .checked_mul(npts)
        .and_then(|p| p.checked_mul(ps.coord_len()))
        .unwrap_or(usize::MAX);
    if work > budget_cap(2_000_000_000) {
        return Err(CubatureError::Budget(format!(
            "exact kernel pass over {npts} points exceeds the work budget; \
             use the shell inner-product distribution path"
        )));
    }
    let ps = ps.normalized();
    let mut groups: BTreeMap<OrdKey<Quad>, Quad> = BTreeMap::new();
    for i in 0..npts {
        let wi = &ps.weights()[i];
        for j in i..npts {
            let t = dot(&ps.points()[i], &ps.points()[j]) / ps.radius2().clone();
            let mut mass = wi.clone() * ps.weights()[j].clone();
            if j > i {
                mass = mass.clone() + mass;
            }
            let entry = groups.entry(OrdKey(t)).or_insert_with(|| Quad::int(0));
            *entry = entry.clone() + mass;
        }
    }
    let profile: Vec<(Quad, Quad)> = groups.into_iter().map(|(k, v)| (k.0, v)).collect();
    let residuals = kernel_residuals_from_profile(ps.dim(), k_max, &profile)?;
    finish_kernel_report(ps.len(), ps.dim(), residuals.iter().map(|r| r.to_f64()).collect(), true, 0.0, k_max, |j| residuals[j].is_zero())
}

fn finish_kernel_report(
    npts: usize,
    dim: usize,
    resid_f64: Vec<f64>,
    exact: bool,
    tol: f64,
    k_max: usize,
    mut is_zero: impl FnMut(usize) -> bool,
) -> Result<StrengthReport> {
    let mut residuals = Vec::with_capacity(k_max);
    let mut strength = 0;
    let mut capped = true;
    for j in 1..=k_max {
        residuals.push((j, resid_f64[j]));
        if capped {
            if is_zero(j) {
                strength = j;
            } else {
                capped = false;
            }
        }
    }
    Ok(StrengthReport {
        max_strength: strength,
        residuals,
        tight: tightness(npts, dim, strength),
        criterion: Criterion::Kernel,
        exact,
        tol,
        capped,
    })
}

/// Float kernel strength: deterministic parallel pass over point pairs with
/// per-row compensated accumulation.
pub fn strength_kernel_float(
    ps: &PointSet<f64>,
    k_max: usize,
    tol: f64,
) -> Result<StrengthReport> {
    let n = ps.dim();
    if n < 2 {
        return Err(CubatureError::InvalidInput(
            "kernel criterion needs span dimension >= 2; use the moment criterion".into(),
        ));
    }
    let npts = ps.len();
    let work = npts
        .checked_mul(npts)
        .and_then(|p| p.checked_mul(k_max.max(1)))
        .unwrap_or(usize::MAX);
    if work > budget_cap(4_000_000_000) {
        return Err(CubatureError::Budget(format!(
            "float kernel pass needs about {work} operations, over budget"
        )));
    }
    let ps = ps.normalized();
    let points = ps.points();
    let weights = ps.weights();
    let rho2 = *ps.radius2();
    // recurrence constants; index k produces Q^(k+1) from Q^(k), Q^(k-1)
    let mut lead = vec![0.0f64; k_max + 1];
    let mut ratio = vec![0.0f64; k_max + 1];
    for k in 1..k_max {
        lead[k] = (n as f64 + 2.0 * k as f64) / (k as f64 + 1.0);
        ratio[k] = if n == 2 {
            // handled by the Chebyshev branch below
            0.0
        } else {
            (n as f64 + k as f64 - 3.0) / (n as f64 + 2.0 * k as f64 - 4.0)
        };
    }
    let chebyshev = n == 2;
    let rows: Vec<Vec<f64>> = (0..npts)
        .into_par_iter()
        .map(|i| {
            let mut sum = vec![0.0f64; k_max + 1];
            let mut comp = vec![0.0f64; k_max + 1];
            let kahan_add = |acc: &mut Vec<f64>, c: &mut Vec<f64>, j: usize, v: f64| {
                let y = v - c[j];
                let t = acc[j] + y;
                c[j] = (t - acc[j]) - y;
                acc[j] = t;
            };
            let pi = &points[i];
            for j in i..npts {
                let t: f64 = pi.iter().zip(&points[j]).map(|(a, b)| a * b).sum::<f64>() / rho2;
                let ww = weights[i] * weights[j] * if j > i { 2.0 } else { 1.0 };
                kahan_add(&mut sum, &mut comp, 0, ww);
                if k_max == 0 {
                    continue;
                }
                if chebyshev {
                    let mut t_prev = 1.0;
                    let mut t_cur = t;
                    kahan_add(&mut sum, &mut comp, 1, ww * 2.0 * t_cur);
                    for k in 2..=k_max {
                        let t_next = 2.0 * t * t_cur - t_prev;
                        t_prev = t_cur;
                        t_cur = t_next;
                        kahan_add(&mut sum, &mut comp, k, ww * 2.0 * t_cur);
                    }
                } else {
                    let mut q_prev = 1.0;
                    let mut q_cur = n as f64 * t;
                    kahan_add(&mut sum, &mut comp, 1, ww * q_cur);
                    for k in 1..k_max {
                        let q_next = lead[k] * (t * q_cur - ratio[k] * q_prev);
                        q_prev = q_cur;
                        q_cur = q_next;
                        kahan_add(&mut sum, &mut comp, k + 1, ww * q_cur);
                    }
                }
            }
            sum
        })
        .collect();
    let mut resid = vec![0.0f64; k_max + 1];
    for row in rows {
        for (j, v) in row.into_iter().enumerate() {
            resid[j] += v;
        }
    }
    for (j, r) in resid.iter().enumerate() {
        if j >= 1 && *r < -1e-12 {
            return Err(CubatureError::VerificationFailed(format!(
                "kernel residual at degree {j} is negative beyond tolerance: {r}"
            )));
        }
    }
    let resid_copy = resid.clone();
    finish_kernel_report(ps.len(), n, resid, false, tol, k_max, move |j| {
        resid_copy[j].abs() <= tol
    })
}

/// Kernel strength in whichever mode the set carries.
pub fn strength_kernel(ps: &AnyPointSet, k_max: usize, tol: f64) -> Result<StrengthReport> {
    match ps {
        AnyPointSet::Exact(e) => strength_kernel_exact(e, k_max),
        AnyPointSet::Float(f) => strength_kernel_float(f, k_max, tol),
    }
}

// ---------------------------------------------------------------------------
// Moment criterion
// ---------------------------------------------------------------------------

/// Orthogonal projection onto the span of the points, as a coord_len x
/// coord_len matrix: B' (B B')^{-1} B for a row basis B.
fn span_projection<S: Scalar>(ps: &PointSet<S>) -> Result<Vec<Vec<S>>> {
    let w = ps.coord_len();
    let mut m: Vec<Vec<S>> = ps.points().to_vec();
    let tol = 1e-9;
    linalg::row_reduce(&mut m, tol);
    let basis: Vec<Vec<S>> = m
        .into_iter()
        .filter(|row| !row.iter().all(|c| c.is_zero_within(tol)))
        .collect();
    let r = basis.len();
    // G = B B'
    let mut g = vec![vec![S::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            g[i][j] = dot(&basis[i], &basis[j]);
        }
    }
    // columns of G^{-1} via solves
    let mut ginv_cols: Vec<Vec<S>> = Vec::with_capacity(r);
    for c in 0..r {
        let mut e = vec![S::zero(); r];
        e[c] = S::one();
        let col = linalg::solve(&g, &e, tol).ok_or_else(|| {
            CubatureError::InvalidInput("span basis Gram matrix is singular".into())
        })?;
        ginv_cols.push(col);
    }
    // P = B' G^{-1} B
    let mut p = vec![vec![S::zero(); w]; w];
    for a in 0..w {
        for b in 0..w {
            let mut acc = S::zero();
            for i in 0..r {
                for j in 0..r {
                    acc = acc
                        + basis[i][a].clone() * ginv_cols[j][i].clone() * basis[j][b].clone();
                }
            }
            p[a][b] = acc;
        }
    }
    Ok(p)
}

/// Moment-criterion strength: at each degree d <= k_max the polynomial
/// identity in u is checked coefficient by coefficient, exactly in exact
/// mode. Reported residuals are the largest relative coefficient deviation
/// per degree.
pub fn strength_moments<S: Scalar>(
    ps: &PointSet<S>,
    k_max: usize,
    tol: f64,
) -> Result<StrengthReport> {
    let ps = ps.normalized();
    let w = ps.coord_len();
    let n = ps.dim();
    let cap = budget_cap(200_000);
    let top_terms = crate::combin::binomial(w + k_max.max(1) - 1, k_max.max(1));
    if top_terms > num_bigint::BigInt::from(cap) {
        return Err(CubatureError::Budget(format!(
            "moment expansion at degree {k_max} in {w} variables needs {top_terms} \
             coefficients, over the cap {cap}"
        )));
    }
    // quadratic form u' P u; identity when the points span the full space
    let quad_form: MPoly<S> = if n == w {
        MPoly::norm_squared(w)
    } else {
        let p = span_projection(&ps)?;
        let mut q = MPoly::zero(w);
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    let mut e = vec![0u16; w];
                    e[i] += 1;
                    e[j] += 1;
                    q.add_term(e, v.clone());
                }
            }
        }
        q
    };
    let mut residuals = Vec::with_capacity(k_max);
    let mut strength = 0;
    let mut capped = true;
    for d in 1..=k_max {
        // LHS: sum of W(x) <x|u>^d
        let mut lhs = MPoly::zero(w);
        for (p, wt) in ps.iter() {
            let term = MPoly::linear_form_power(p, d as u16).scale(wt);
            lhs = lhs.add(&term);
        }
        let rhs = if d % 2 == 0 {
            let l = d / 2;
            let c = S::from_rational(&moment_constant_sphere(n.max(1), l)?);
            let scale = c * ps.radius2().powu(l as u32);
            quad_form.powu(l as u32).scale(&scale)
        } else {
            MPoly::zero(w)
        };
        let diff = lhs.sub(&rhs);
        let scale = lhs.max_abs_coeff().max(rhs.max_abs_coeff()).max(1.0);
        let dev = if S::EXACT {
            if diff.is_zero() {
                0.0
            } else {
                diff.max_abs_coeff() / scale
            }
        } else {
            diff.max_abs_coeff() / scale
        };
        residuals.push((d, dev));
        if capped {
            let ok = if S::EXACT { diff.is_zero() } else { dev <= tol };
            if ok {
                strength = d;
            } else {
                capped = false;
            }
        }
    }
    Ok(StrengthReport {
        max_strength: strength,
        residuals,
        tight: tightness(ps.len(), n, strength),
        criterion: Criterion::Moments,
        exact: S::EXACT,
        tol: if S::EXACT { 0.0 } else { tol },
        capped,
    })
}

/// Moment strength of a Gaussian-measure point set: for even d the identity
/// sum of W(x) <x|u>^d = ((d-1)!!/2^(d/2)) (u.u)^(d/2) must hold, odd
/// degrees must vanish.
pub fn gauss_strength_moments<S: Scalar>(
    gps: &GaussianPointSet<S>,
    k_max: usize,
    tol: f64,
) -> Result<usize> {
    let w = gps.ambient_dim();
    let norm2 = MPoly::<S>::norm_squared(w);
    let total: S = gps.weights.iter().cloned().sum();
    let mut strength = 0;
    for d in 1..=k_max {
        let mut lhs = MPoly::zero(w);
        for (p, wt) in gps.points.iter().zip(&gps.weights) {
            let weight = wt.clone() / total.clone();
            lhs = lhs.add(&MPoly::linear_form_power(p, d as u16).scale(&weight));
        }
        let rhs = if d % 2 == 0 {
            let c = S::from_rational(&moment_constant_gauss(d / 2));
            norm2.powu((d / 2) as u32).scale(&c)
        } else {
            MPoly::zero(w)
        };
        let diff = lhs.sub(&rhs);
        let scale = lhs.max_abs_coeff().max(rhs.max_abs_coeff()).max(1.0);
        let ok = if S::EXACT {
            diff.is_zero()
        } else {
            diff.max_abs_coeff() / scale <= tol
        };
        if ok {
            strength = d;
        } else {
            break;
        }
    }
    Ok(strength)
}

// ---------------------------------------------------------------------------
// Root sets
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RootSetReport {
    pub strength: usize,
    pub tight: bool,
    /// true: compared B_X against roots of C^(l) (odd strength);
    /// false: compared A_X against roots of R^(l) (even strength).
    pub uses_b_set: bool,
    pub observed: Vec<f64>,
    pub expected_roots: Vec<f64>,
    /// Tight case only: the observed set equals the full root set.
    pub matched: bool,
    /// Containment of observed values in the root set (meaningful for
    /// non-tight sets as a weaker diagnostic).
    pub contained: bool,
    pub max_deviation: f64,
    pub skipped: Option<String>,
}

fn root_report_skipped(reason: &str) -> RootSetReport {
    RootSetReport {
        strength: 0,
        tight: false,
        uses_b_set: false,
        observed: Vec::new(),
        expected_roots: Vec::new(),
        matched: false,
        contained: false,
        max_deviation: 0.0,
        skipped: Some(reason.to_string()),
    }
}

/// Compare the inner-product set of a verified design against the root set
/// of the matching kernel polynomial: A_X vs R^(l) when the strength is 2l,
/// B_X vs C^(l) when it is 2l + 1. Exact sets are tested exactly.
pub fn root_set_check<S: Scalar>(ps: &PointSet<S>, strength: usize) -> Result<RootSetReport> {
    if ps.dim() < 2 {
        return Ok(root_report_skipped("span dimension < 2, kernel roots undefined"));
    }
    if strength == 0 {
        return Ok(root_report_skipped("strength 0, no root structure"));
    }
    let n = ps.dim();
    let profile = inner_product_profile(ps);
    let (kernel, observed, uses_b_set): (KernelPolynomial, Vec<S>, bool) = if strength % 2 == 0 {
        (kernel_r(n, strength / 2)?, profile.a_set.clone(), false)
    } else {
        (kernel_c(n, strength / 2)?, profile.b_set.clone(), true)
    };
    let roots = kernel.roots_in_unit_interval();
    let tight = tightness(ps.len(), n, strength);
    let mut max_dev = 0.0f64;
    let mut contained = true;
    for v in &observed {
        if S::EXACT {
            let val = kernel.eval(v);
            if !val.is_zero() {
                contained = false;
                max_dev = max_dev.max(val.to_f64().abs());
            }
        } else {
            let vf = v.to_f64();
            let dev = roots
                .iter()
                .map(|r| (r - vf).abs())
                .fold(f64::INFINITY, f64::min);
            max_dev = max_dev.max(dev);
            if dev > 1e-10 {
                contained = false;
            }
        }
    }
    // equality needs the counts to agree as well; the kernels involved have
    // simple real roots, so the root count equals the polynomial degree.
    let expected_count = kernel.coeffs.len() - 1;
    let matched = contained && observed.len() == expected_count && roots.len() == expected_count;
    Ok(RootSetReport {
        strength,
        tight,
        uses_b_set,
        observed: observed.iter().map(|v| v.to_f64()).collect(),
        expected_roots: roots,
        matched,
        contained,
        max_deviation: max_dev,
        skipped: None,
    })
}

/// Tight designs must be uniformly weighted: max/min weight ratio is 1,
/// exactly in exact mode, within 1e-12 otherwise.
pub fn weight_uniformity_of_tight<S: Scalar>(ps: &PointSet<S>) -> bool {
    let w0 = &ps.weights()[0];
    ps.weights().iter().all(|w| {
        let diff = w.clone() - w0.clone();
        diff.is_zero_within(1e-12 * w0.to_f64().abs().max(1.0))
    })
}

// ---------------------------------------------------------------------------
// Banach embedding
// ---------------------------------------------------------------------------

/// Row k of the embedding matrix is (W_k / c_2l)^(1/2l) x_k / rho; the map
/// u -> (row_k . u) is then an isometry from euclidean n-space into the
/// 2l-norm on |X| coordinates, provided the set has strength 2l.
pub fn embed_to_banach(ps: &PointSet<f64>, l: usize) -> Result<Vec<Vec<f64>>> {
    if l == 0 {
        return Err(CubatureError::InvalidInput("embedding needs l >= 1".into()));
    }
    let ps = ps.normalized();
    let c = moment_constant_sphere(ps.dim(), l)?
        .to_f64()
        .ok_or_else(|| CubatureError::InvalidInput("moment constant overflow".into()))?;
    let rho = ps.radius2().sqrt();
    let rows = ps
        .iter()
        .map(|(p, w)| {
            let factor = (w / c).powf(1.0 / (2.0 * l as f64));
            p.iter().map(|x| factor * x / rho).collect()
        })
        .collect();
    Ok(rows)
}

/// Inverse of `embed_to_banach` up to permutation and per-point sign:
/// x_k = row_k / |row_k| on the unit sphere with weight c_2l |row_k|^2l.
pub fn banach_to_cubature(rows: &[Vec<f64>], l: usize) -> Result<PointSet<f64>> {
    if rows.is_empty() {
        return Err(CubatureError::InvalidInput("empty embedding matrix".into()));
    }
    if l == 0 {
        return Err(CubatureError::InvalidInput("embedding needs l >= 1".into()));
    }
    let dim = rows[0].len();
    let mut points = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    // the span of the rows decides the moment constant, as in the forward map
    let span = linalg::rank(&rows.to_vec(), 1e-12);
    let c = moment_constant_sphere(span, l)?
        .to_f64()
        .ok_or_else(|| CubatureError::InvalidInput("moment constant overflow".into()))?;
    for (k, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(CubatureError::InvalidInput("ragged embedding matrix".into()));
        }
        let norm2: f64 = row.iter().map(|x| x * x).sum();
        if norm2 <= 0.0 {
            return Err(CubatureError::InvalidInput(format!(
                "degenerate embedding: row {k} is zero"
            )));
        }
        let norm = norm2.sqrt();
        points.push(row.iter().map(|x| x / norm).collect());
        weights.push(c * norm2.powi(l as i32));
    }
    PointSet::new(points, weights, 1.0)
}

/// Largest deviation |(sum_k |row_k . u|^2l)^(1/2l) - |u|_2| over random
/// unit-ish vectors u; a strength-2l set embeds isometrically.
pub fn banach_isometry_error(rows: &[Vec<f64>], l: usize, trials: usize, seed: u64) -> f64 {
    let dim = rows[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u_norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if u_norm < 1e-6 {
            continue;
        }
        let sum: f64 = rows
            .iter()
            .map(|row| {
                let d: f64 = row.iter().zip(&u).map(|(a, b)| a * b).sum();
                d.abs().powi(2 * l as i32)
            })
            .sum();
        let j_norm = sum.powf(1.0 / (2.0 * l as f64));
        worst = worst.max((j_norm - u_norm).abs());
    }
    worst
}

// ---------------------------------------------------------------------------
// Exact rational helpers used by cross-validation tests
// ---------------------------------------------------------------------------

/// Exact R-form sum: sum over pairs of W(x) W(y) R^(k)(<x|y>/rho^2).
/// For a strength-k set this equals exactly 1.
pub fn r_form_sum(ps: &PointSet<Quad>, k: usize) -> Result<Quad> {
    let ps = ps.normalized();
    let rk = kernel_r(ps.dim(), k)?;
    let mut acc = Quad::int(0);
    for i in 0..ps.len() {
        for j in 0..ps.len() {
            let t = dot(&ps.points()[i], &ps.points()[j]) / ps.radius2().clone();
            acc = acc + ps.weights()[i].clone() * ps.weights()[j].clone() * rk.eval(&t);
        }
    }
    Ok(acc)
}

/// Exact kernel residuals for an exact set, degrees 0..=k_max.
pub fn kernel_residuals_exact(ps: &PointSet<Quad>, k_max: usize) -> Result<Vec<Quad>> {
    let ps = ps.normalized();
    let npts = ps.len();
    let mut groups: BTreeMap<OrdKey<Quad>, Quad> = BTreeMap::new();
    for i in 0..npts {
        for j in i..npts {
            let t = dot(&ps.points()[i], &ps.points()[j]) / ps.radius2().clone();
            let mut mass = ps.weights()[i].clone() * ps.weights()[j].clone();
            if j > i {
                mass = mass.clone() + mass;
            }
            let entry = groups.entry(OrdKey(t)).or_insert_with(|| Quad::int(0));
            *entry = entry.clone() + mass;
        }
    }
    let profile: Vec<(Quad, Quad)> = groups.into_iter().map(|(k, v)| (k.0, v)).collect();
    kernel_residuals_from_profile(ps.dim(), k_max, &profile)
}

/// Uniform-weight kernel residuals from an integer inner-product
/// distribution: each entry (m, cnt) says cnt ordered pairs (diagonal
/// included) have <x|y> = m, on a shell of squared norm `norm`. This is
/// the fast exact path for lattice shells.
pub fn kernel_residuals_from_counts(
    n: usize,
    k_max: usize,
    counts: &[(i64, u64)],
    norm: i64,
    npoints: usize,
) -> Result<Vec<Quad>> {
    let npts_r = BigRational::from(num_bigint::BigInt::from(npoints as u64));
    let total = &npts_r * &npts_r;
    let profile: Vec<(Quad, Quad)> = counts
        .iter()
        .map(|&(m, cnt)| {
            let t = Quad::rational(crate::scalar::br(m, norm));
            let mass = Quad::rational(
                BigRational::from(num_bigint::BigInt::from(cnt)) / total.clone(),
            );
            (t, mass)
        })
        .collect();
    kernel_residuals_from_profile(n, k_max, &profile)
}

/// Strength from exact residual list (degrees 0..=k_max).
pub fn strength_from_exact_residuals(residuals: &[Quad]) -> (usize, bool) {
    let mut strength = 0;
    for (j, r) in residuals.iter().enumerate().skip(1) {
        if r.is_zero() {
            strength = j;
        } else {
            return (strength, false);
        }
    }
    (strength, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::antipodal_double;
    use crate::scalar::{br, bri};

    fn qi(v: i64) -> Quad {
        Quad::int(v)
    }

    fn cross_polytope(n: usize) -> PointSet<Quad> {
        let mut pts = Vec::new();
        for i in 0..n {
            for s in [1i64, -1] {
                let mut p = vec![qi(0); n];
                p[i] = qi(s);
                pts.push(p);
            }
        }
        PointSet::new_uniform(pts, qi(1)).unwrap()
    }

    fn polygon_exact(nsides: usize) -> PointSet<f64> {
        let pts: Vec<Vec<f64>> = (0..nsides)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / nsides as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        PointSet::new_uniform(pts, 1.0).unwrap()
    }

    #[test]
    fn cross_polytope_strength_three_tight() {
        let ps = cross_polytope(3);
        let rep = strength_kernel_exact(&ps, 5).unwrap();
        assert_eq!(rep.max_strength, 3);
        assert!(rep.tight);
        let rep_m = strength_moments(&ps, 5, DEFAULT_TOL).unwrap();
        assert_eq!(rep_m.max_strength, 3);
        assert!(rep_m.tight);
    }

    #[test]
    fn heptagon_strength_six() {
        let ps = polygon_exact(7);
        let rep = strength_kernel_float(&ps, 8, DEFAULT_TOL).unwrap();
        assert_eq!(rep.max_strength, 6);
        assert!(!rep.capped);
    }

    #[test]
    fn moments_and_kernel_agree_on_pair() {
        // {e1, e2}: strength 0 (barycenter nonzero)
        let ps = PointSet::new_uniform(
            vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]],
            qi(1),
        )
        .unwrap();
        assert_eq!(strength_kernel_exact(&ps, 4).unwrap().max_strength, 0);
        assert_eq!(strength_moments(&ps, 4, DEFAULT_TOL).unwrap().max_strength, 0);
    }

    #[test]
    fn embedded_pair_uses_span_moments() {
        // {+-e1} inside R^2: strength via moments on the 1-dim span is
        // unbounded; the scan caps at k_max.
        let half = PointSet::new_uniform(vec![vec![qi(1), qi(0)]], qi(1)).unwrap();
        let ps = antipodal_double(&half).unwrap();
        let rep = strength_moments(&ps, 6, DEFAULT_TOL).unwrap();
        assert_eq!(rep.max_strength, 6);
        assert!(rep.capped);
    }

    #[test]
    fn r_form_matches_residual_sum() {
        let ps = cross_polytope(3);
        let resid = kernel_residuals_exact(&ps, 4).unwrap();
        for k in 1..=4usize {
            let lhs = r_form_sum(&ps, k).unwrap() - Quad::int(1);
            let rhs: Quad = resid[1..=k].iter().cloned().fold(qi(0), |a, b| a + b);
            assert_eq!(lhs, rhs, "k={k}");
        }
    }

    #[test]
    fn simplex_root_set() {
        // regular simplex for n = 3 built from 4 embedded points in R^4
        let mut pts = Vec::new();
        for i in 0..4usize {
            let mut p = vec![br(-1, 4); 4];
            p[i] += bri(1);
            pts.push(p.into_iter().map(Quad::rational).collect::<Vec<_>>());
        }
        let ps = PointSet::new_uniform(pts, Quad::rational(br(3, 4))).unwrap();
        assert_eq!(ps.dim(), 3);
        let rep = strength_kernel_exact(&ps, 3).unwrap();
        assert_eq!(rep.max_strength, 2);
        assert!(rep.tight);
        let rr = root_set_check(&ps, 2).unwrap();
        assert!(rr.matched);
        assert_eq!(rr.observed.len(), 1);
        assert!((rr.observed[0] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pair_root_check_skipped() {
        let half = PointSet::new_uniform(vec![vec![qi(1), qi(0)]], qi(1)).unwrap();
        let ps = antipodal_double(&half).unwrap();
        let rr = root_set_check(&ps, 1).unwrap();
        assert!(rr.skipped.is_some());
    }

    #[test]
    fn banach_roundtrip_cross_polytope() {
        let ps = cross_polytope(4).to_float();
        let rows = embed_to_banach(&ps, 1).unwrap();
        assert!(banach_isometry_error(&rows, 1, 50, 7) < 1e-10);
        let back = banach_to_cubature(&rows, 1).unwrap();
        assert_eq!(back.len(), ps.len());
        // weights recovered uniformly
        for w in back.weights() {
            assert!((w - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_moment_strength_of_scaled_cross_polytope() {
        // sqrt(n/2)-scaled cross-polytope integrates Gaussian moments to
        // degree 3: points at radius^2 = n/2 in R^n
        let n = 3usize;
        let mut pts = Vec::new();
        for i in 0..n {
            for s in [1f64, -1.0] {
                let mut p = vec![0.0; n];
                p[i] = s * (n as f64 / 2.0).sqrt();
                pts.push(p);
            }
        }
        let gps = GaussianPointSet::new(pts, vec![1.0; 2 * n]).unwrap();
        let s = gauss_strength_moments(&gps, 5, 1e-10).unwrap();
        assert_eq!(s, 3);
    }
}
