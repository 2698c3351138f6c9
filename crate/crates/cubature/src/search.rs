//! Weight reduction and numerical design search.
//!
//! The reduction step removes points from a cubature formula without
//! changing any integral it computes: whenever the evaluation matrix of
//! the target function space has a null combination of its columns, the
//! weights can slide along that combination until one of them reaches
//! zero, and the corresponding point is dropped. Iterating pushes the
//! support below the dimension of the space.
//!
//! The search side minimizes the nonnegative kernel potential
//! sum_{j=1..k} sum_{x,y} (1/N^2) Q^(j)(<x,y>) over N-tuples of unit
//! vectors by projected gradient descent; the potential vanishes exactly
//! on the strength-k designs with uniform weights, and any claimed
//! success is confirmed by the independent verifier.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{jacobi_eigen, nullspace};
use crate::pointsets::{AnyPointSet, PointSet};
use crate::polyspaces::{dim_f, dim_p, monomial_sphere_integral, q_kernels_upto, KernelPolynomial};
use crate::scalar::Scalar;
use crate::verify::{strength_kernel_float, StrengthReport};
use crate::{combin, CubatureError, Result};

// ---------------------------------------------------------------------------
// Caratheodory reduction
// ---------------------------------------------------------------------------

/// Function space the reduction preserves: all polynomials of degree <= k
/// restricted to the sphere (F) or the homogeneous degree-k ones (P).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetSpace {
    F(usize),
    P(usize),
}

impl TargetSpace {
    pub fn degree(&self) -> usize {
        match *self {
            TargetSpace::F(k) | TargetSpace::P(k) => k,
        }
    }

    /// Dimension of the restriction to the unit sphere of R^n.
    pub fn dim(&self, n: usize) -> usize {
        match *self {
            TargetSpace::F(k) => dim_f(n, k),
            TargetSpace::P(k) => dim_p(n, k),
        }
    }

    /// Monomial exponents spanning the restriction: degrees {k, k-1} for
    /// F (lower degrees climb by multiplying with <x,x> = 1), degree k
    /// for P.
    fn basis_exponents(&self, nvars: usize) -> Vec<Vec<u16>> {
        let k = self.degree();
        let mut out = monomial_exponents(nvars, k);
        if let TargetSpace::F(_) = self {
            if k >= 1 {
                out.extend(monomial_exponents(nvars, k - 1));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (head, tail) = text
            .split_once(':')
            .ok_or_else(|| CubatureError::Parse(format!("expected F:k or P:k, got '{text}'")))?;
        let k: usize = tail
            .parse()
            .map_err(|_| CubatureError::Parse(format!("bad degree in '{text}'")))?;
        match head {
            "F" | "f" => Ok(TargetSpace::F(k)),
            "P" | "p" => Ok(TargetSpace::P(k)),
            _ => Err(CubatureError::Parse(format!("unknown space '{head}'"))),
        }
    }
}

fn monomial_exponents(nvars: usize, k: usize) -> Vec<Vec<u16>> {
    combin::compositions(nvars, k as u16)
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub initial_size: usize,
    pub final_size: usize,
    /// original indices of dropped points, in drop order
    pub dropped: Vec<usize>,
    /// per-step residual of the null combination, |A c| (float view)
    pub null_residuals: Vec<f64>,
    /// per-step deviation of the moment vector from its initial value
    pub moment_drift: Vec<f64>,
    /// the Caratheodory bound that was enforced
    pub space_dim: usize,
}

/// evaluation matrix: rows = basis monomials, columns = points
fn evaluation_matrix<S: Scalar>(points: &[Vec<S>], expos: &[Vec<u16>]) -> Vec<Vec<S>> {
    expos
        .iter()
        .map(|e| {
            points
                .iter()
                .map(|p| {
                    let mut acc = S::one();
                    for (i, &ei) in e.iter().enumerate() {
                        for _ in 0..ei {
                            acc = acc * p[i].clone();
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn moment_vector<S: Scalar>(a: &[Vec<S>], w: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| row.iter().zip(w).map(|(v, wi)| v.clone() * wi.clone()).sum())
        .collect()
}

/// One null combination of the columns of A restricted to the live
/// columns, or None when the columns are independent.
fn null_combination<S: Scalar>(a: &[Vec<S>], live: &[usize]) -> Option<(Vec<S>, f64)> {
    let sub: Vec<Vec<S>> = a
        .iter()
        .map(|row| live.iter().map(|&c| row[c].clone()).collect())
        .collect();
    if S::EXACT {
        let ns = nullspace(&sub, 0.0);
        let c = ns.into_iter().next()?;
        Some((c, 0.0))
    } else {
        // smallest eigenvalue of the column Gram matrix
        let m = live.len();
        let mut gram = vec![vec![0.0f64; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut s = 0.0;
                for row in &sub {
                    s += row[i].to_f64() * row[j].to_f64();
                }
                gram[i][j] = s;
            }
        }
        let scale = gram
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
            .max(1.0);
        let (eig, vecs) = jacobi_eigen(&gram);
        let mut best = 0usize;
        for (i, e) in eig.iter().enumerate() {
            if e.abs() < eig[best].abs() {
                best = i;
            }
        }
        if eig[best].abs() > 1e-10 * scale {
            return None;
        }
        // true residual |A c| of the candidate combination
        let mut res2 = 0.0f64;
        for row in &sub {
            let mut s = 0.0;
            for (i, v) in row.iter().enumerate() {
                s += v.to_f64() * vecs[best][i];
            }
            res2 += s * s;
        }
        let cf: Vec<S> = vecs[best]
            .iter()
            .map(|&v| float_to_scalar::<S>(v))
            .collect();
        Some((cf, res2.sqrt()))
    }
}

fn float_to_scalar<S: Scalar>(v: f64) -> S {
    // only used on the float path, where S = f64 round-trips exactly
    let r = num_rational::BigRational::from_float(v)
        .unwrap_or_else(|| num_rational::BigRational::from_integer(0.into()));
    S::from_rational(&r)
}

/// Carathéodory-style support reduction: returns a subset of the points
/// with positive weights, at most dim(space) of them, computing the same
/// integrals on the target space. The input must already be a cubature
/// formula for that space.
pub fn caratheodory_reduce<S: Scalar>(
    ps: &PointSet<S>,
    space: TargetSpace,
) -> Result<(PointSet<S>, ReductionTrace)> {
    let nvars = ps.coord_len();
    let k = space.degree();
    if k == 0 {
        return Err(CubatureError::InvalidInput("target degree must be >= 1".into()));
    }
    // the formula must integrate the space correctly before reduction
    check_is_cubature(ps, space)?;
    let expos = space.basis_exponents(nvars);
    let a = evaluation_matrix(ps.points(), &expos);
    let mut weights: Vec<S> = ps.weights().to_vec();
    let mut live: Vec<usize> = (0..ps.len()).collect();
    let b0 = moment_vector(&a, &weights);
    let mut trace = ReductionTrace {
        initial_size: ps.len(),
        final_size: ps.len(),
        dropped: Vec::new(),
        null_residuals: Vec::new(),
        moment_drift: Vec::new(),
        space_dim: space.dim(ps.dim()),
    };
    loop {
        let live_w: Vec<S> = live.iter().map(|&i| weights[i].clone()).collect();
        let Some((mut c, residual)) = null_combination(&a, &live) else {
            break;
        };
        // direction sign: make sure some coefficient is positive so a
        // weight decreases toward zero
        let any_positive = c
            .iter()
            .any(|v| v.cmp_real(&S::zero()) == std::cmp::Ordering::Greater && !v.is_zero_within(1e-14));
        if !any_positive {
            for v in &mut c {
                *v = -v.clone();
            }
        }
        // first weight to vanish: min over positive c of w/c, ties to the
        // smallest point index
        let mut t_best: Option<S> = None;
        for (pos, v) in c.iter().enumerate() {
            if v.cmp_real(&S::zero()) != std::cmp::Ordering::Greater || v.is_zero_within(1e-14) {
                continue;
            }
            let ratio = live_w[pos].clone() / v.clone();
            let better = match &t_best {
                None => true,
                Some(t) => ratio.cmp_real(t) == std::cmp::Ordering::Less,
            };
            if better {
                t_best = Some(ratio);
            }
        }
        let Some(t) = t_best else {
            break;
        };
        // slide the weights and drop everything that reached zero
        let mut removed = Vec::new();
        for (pos, &idx) in live.iter().enumerate() {
            let nw = weights[idx].clone() - t.clone() * c[pos].clone();
            weights[idx] = nw;
        }
        for (pos, &idx) in live.iter().enumerate() {
            let w = &weights[idx];
            let zero = if S::EXACT { w.is_zero() } else { w.to_f64().abs() <= 1e-13 };
            if zero {
                removed.push(idx);
            } else if w.cmp_real(&S::zero()) == std::cmp::Ordering::Less {
                return Err(CubatureError::VerificationFailed(format!(
                    "reduction produced a negative weight at point {idx} (step {})",
                    trace.dropped.len()
                )));
            }
            let _ = pos;
        }
        if removed.is_empty() {
            break;
        }
        live.retain(|i| !removed.contains(i));
        trace.dropped.extend(removed.iter().copied());
        trace.null_residuals.push(residual);
        // moments must be untouched at every step
        let live_weights: Vec<S> = live.iter().map(|&i| weights[i].clone()).collect();
        let sub: Vec<Vec<S>> = a
            .iter()
            .map(|row| live.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let bnow = moment_vector(&sub, &live_weights);
        let mut drift = 0.0f64;
        for (x, y) in bnow.iter().zip(&b0) {
            let d = x.clone() - y.clone();
            if S::EXACT && !d.is_zero() {
                return Err(CubatureError::VerificationFailed(
                    "exact reduction drifted the moment vector".into(),
                ));
            }
            drift = drift.max(d.to_f64().abs());
        }
        if drift > 1e-10 {
            return Err(CubatureError::VerificationFailed(format!(
                "reduction drifted the moment vector by {drift:.3e}"
            )));
        }
        trace.moment_drift.push(drift);
    }
    trace.final_size = live.len();
    if trace.final_size > trace.space_dim {
        return Err(CubatureError::VerificationFailed(format!(
            "reduction stalled at {} points, above the dimension {}",
            trace.final_size, trace.space_dim
        )));
    }
    let points: Vec<Vec<S>> = live.iter().map(|&i| ps.points()[i].clone()).collect();
    let final_weights: Vec<S> = live.iter().map(|&i| weights[i].clone()).collect();
    let reduced = PointSet::new(points, final_weights, ps.radius2().clone())?;
    Ok((reduced, trace))
}

/// The input integrates every basis monomial of the space like the
/// uniform measure does (exactly in exact mode, 1e-10 in float).
fn check_is_cubature<S: Scalar>(ps: &PointSet<S>, space: TargetSpace) -> Result<()> {
    let total = ps.total_weight();
    if !total.approx_eq(&S::one(), 1e-12) {
        return Err(CubatureError::InvalidInput(
            "reduction expects weights of total mass one".into(),
        ));
    }
    let nvars = ps.coord_len();
    let n = ps.dim();
    let expos = space.basis_exponents(nvars);
    // moments against the rotation-invariant measure of the spanned
    // sphere only make sense in full span; embedded sets (dim < coords)
    // are checked through the verifier instead
    if n == nvars {
        for e in &expos {
            let unit = monomial_sphere_integral(n, e)?;
            let mut want = S::from_rational(&unit);
            if !num_traits::Zero::is_zero(&unit) {
                // points live on a sphere of squared radius rho2; the
                // even-degree moments pick up rho2^(d/2)
                let d: u32 = e.iter().map(|&x| u32::from(x)).sum();
                for _ in 0..d / 2 {
                    want = want * ps.radius2().clone();
                }
            }
            let mut got = S::zero();
            for (p, w) in ps.iter() {
                let mut acc = S::one();
                for (i, &ei) in e.iter().enumerate() {
                    for _ in 0..ei {
                        acc = acc * p[i].clone();
                    }
                }
                got = got + acc * w.clone();
            }
            if !got.approx_eq(&want, 1e-10) {
                return Err(CubatureError::InvalidInput(format!(
                    "input is not a cubature formula for the space: monomial {e:?} integrates to {got} instead of {want}"
                )));
            }
        }
        Ok(())
    } else {
        let fps = PointSet::new(
            ps.points()
                .iter()
                .map(|p| p.iter().map(|c| c.to_f64()).collect())
                .collect(),
            ps.weights().iter().map(|w| w.to_f64()).collect(),
            ps.radius2().to_f64(),
        )?;
        let report = strength_kernel_float(&fps, space.degree(), 1e-9)?;
        if report.max_strength < space.degree() {
            return Err(CubatureError::InvalidInput(format!(
                "input has strength {} but the space needs {}",
                report.max_strength,
                space.degree()
            )));
        }
        Ok(())
    }
}

/// Reduce an exact or float set, staying in its arithmetic mode.
pub fn caratheodory_reduce_any(
    ps: &AnyPointSet,
    space: TargetSpace,
) -> Result<(AnyPointSet, ReductionTrace)> {
    match ps {
        AnyPointSet::Exact(p) => {
            let (r, t) = caratheodory_reduce(p, space)?;
            Ok((AnyPointSet::Exact(r), t))
        }
        AnyPointSet::Float(p) => {
            let (r, t) = caratheodory_reduce(p, space)?;
            Ok((AnyPointSet::Float(r), t))
        }
    }
}

// ---------------------------------------------------------------------------
// Kernel-potential minimization
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PotentialOutcome {
    /// present when the residual dropped below tolerance and the verifier
    /// confirmed strength k
    pub point_set: Option<PointSet<f64>>,
    /// best residual over all restarts
    pub residual: f64,
    pub restarts: usize,
    pub verified: Option<StrengthReport>,
}

struct Potential {
    n: usize,
    npoints: usize,
    /// kernel coefficient vectors (in t), degrees 1..=k
    kernels: Vec<Vec<f64>>,
    /// their derivatives
    dkernels: Vec<Vec<f64>>,
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

impl Potential {
    fn new(n: usize, k: usize, npoints: usize) -> Result<Self> {
        let all = q_kernels_upto(n, k)?;
        let mut kernels = Vec::new();
        let mut dkernels = Vec::new();
        for kp in all.iter().skip(1) {
            let c = kernel_coeffs_f64(kp);
            let mut d = vec![0.0; c.len().saturating_sub(1).max(1)];
            for (i, &ci) in c.iter().enumerate().skip(1) {
                d[i - 1] = ci * i as f64;
            }
            kernels.push(c);
            dkernels.push(d);
        }
        Ok(Potential { n, npoints, kernels, dkernels })
    }

    /// sum over degrees 1..=k of the doubled kernel sums, scaled 1/N^2
    fn value(&self, x: &[Vec<f64>]) -> f64 {
        let nn = (self.npoints * self.npoints) as f64;
        let mut total = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                let t: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum();
                for c in &self.kernels {
                    total += horner(c, t);
                }
            }
        }
        total / nn
    }

    /// full Euclidean gradient (2/N^2) sum_j sum_y Q_j'(<x_i,y>) y
    fn gradient(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let nn = (self.npoints * self.npoints) as f64;
        let mut g = vec![vec![0.0; self.n]; x.len()];
        for i in 0..x.len() {
            for j in 0..x.len() {
                let t: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum();
                let mut dsum = 0.0;
                for d in &self.dkernels {
                    dsum += horner(d, t);
                }
                for c in 0..self.n {
                    g[i][c] += 2.0 * dsum * x[j][c] / nn;
                }
            }
        }
        g
    }
}

fn kernel_coeffs_f64(kp: &KernelPolynomial) -> Vec<f64> {
    kp.coeffs.iter().map(|c| c.to_f64().unwrap_or(0.0)).collect()
}

fn normalize_rows(x: &mut [Vec<f64>]) {
    for row in x.iter_mut() {
        let n: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.0 {
            for v in row.iter_mut() {
                *v /= n;
            }
        }
    }
}

fn tangent_project(x: &[Vec<f64>], g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .zip(g)
        .map(|(xi, gi)| {
            let d: f64 = xi.iter().zip(gi).map(|(a, b)| a * b).sum();
            xi.iter().zip(gi).map(|(a, b)| b - d * a).collect()
        })
        .collect()
}

fn descend(pot: &Potential, mut x: Vec<Vec<f64>>, tol: f64, max_iters: usize) -> (Vec<Vec<f64>>, f64) {
    normalize_rows(&mut x);
    let mut value = pot.value(&x);
    let mut step = 0.1f64;
    for _ in 0..max_iters {
        if value < tol {
            break;
        }
        let grad = tangent_project(&x, &pot.gradient(&x));
        let gnorm2: f64 = grad.iter().flat_map(|r| r.iter().map(|v| v * v)).sum();
        if gnorm2 < 1e-30 {
            break;
        }
        let mut advanced = false;
        while step > 1e-16 {
            let mut cand = x.clone();
            for (ci, gi) in cand.iter_mut().zip(&grad) {
                for (cv, gv) in ci.iter_mut().zip(gi) {
                    *cv -= step * gv;
                }
            }
            normalize_rows(&mut cand);
            let cv = pot.value(&cand);
            if cv < value {
                x = cand;
                value = cv;
                step = (step * 1.5).min(1.0);
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    (x, value)
}

/// Projected-gradient search for a strength-k design of npoints points on
/// the sphere of R^n. Deterministic in the seed; restarts run in
/// parallel. A result below tolerance is re-verified independently before
/// being returned as success; failure returns the best residual.
pub fn potential_minimize(
    n: usize,
    k: usize,
    npoints: usize,
    restarts: usize,
    tol: f64,
    seed: u64,
) -> Result<PotentialOutcome> {
    if npoints < 2 {
        return Err(CubatureError::InvalidInput("need at least two points".into()));
    }
    if n < 2 || k < 1 {
        return Err(CubatureError::InvalidInput("need n >= 2 and k >= 1".into()));
    }
    let pot = Potential::new(n, k, npoints)?;
    let runs: Vec<(Vec<Vec<f64>>, f64)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            let x: Vec<Vec<f64>> = (0..npoints)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            // Box-Muller gives a rotation-invariant start
                            let u: f64 = rng.gen::<f64>().max(1e-12);
                            let v: f64 = rng.gen();
                            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
                        })
                        .collect()
                })
                .collect();
            descend(&pot, x, tol, 4000)
        })
        .collect();
    let (best_x, best_v) = runs
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite residuals"))
        .expect("at least one restart");
    if best_v < tol {
        let ps = PointSet::new(best_x, vec![1.0 / npoints as f64; npoints], 1.0)?;
        let report = strength_kernel_float(&ps, k, 10.0 * tol.max(1e-12))?;
        if report.max_strength < k {
            return Err(CubatureError::VerificationFailed(format!(
                "optimizer reported residual {best_v:.3e} but verification sees strength {}",
                report.max_strength
            )));
        }
        return Ok(PotentialOutcome {
            point_set: Some(ps),
            residual: best_v,
            restarts: restarts.max(1),
            verified: Some(report),
        });
    }
    Ok(PotentialOutcome { point_set: None, residual: best_v, restarts: restarts.max(1), verified: None })
}

/// Largest relative disagreement between the analytic potential gradient
/// and central finite differences with spacing h, over a random
/// configuration drawn from the seed.
pub fn gradient_check(n: usize, k: usize, npoints: usize, h: f64, seed: u64) -> Result<f64> {
    let pot = Potential::new(n, k, npoints)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Vec<f64>> = (0..npoints)
        .map(|_| (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
        .collect();
    normalize_rows(&mut x);
    let grad = pot.gradient(&x);
    let mut worst = 0.0f64;
    let gscale = grad
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1e-12);
    for i in 0..npoints {
        for c in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i][c] += h;
            xm[i][c] -= h;
            let fd = (pot.value(&xp) - pot.value(&xm)) / (2.0 * h);
            let rel = (fd - grad[i][c]).abs() / gscale;
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{catalog, icosahedron, simplex};
    use crate::pointsets::AnyPointSet;
    use crate::verify::strength_kernel;

    fn unit_float(ps: &AnyPointSet) -> PointSet<f64> {
        match ps {
            AnyPointSet::Exact(p) => p.to_float().to_unit(),
            AnyPointSet::Float(p) => p.to_unit(),
        }
    }

    fn rotate_z(ps: &PointSet<f64>, theta: f64) -> PointSet<f64> {
        let (s, c) = theta.sin_cos();
        let pts: Vec<Vec<f64>> = ps
            .points()
            .iter()
            .map(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]])
            .collect();
        PointSet::new(pts, ps.weights().to_vec(), 1.0).unwrap()
    }

    #[test]
    fn doubled_icosahedron_reduces_for_f2() {
        let ico = unit_float(&icosahedron().unwrap());
        let rot = rotate_z(&ico, 0.7331);
        let mut pts = ico.points().to_vec();
        pts.extend(rot.points().iter().cloned());
        let w = vec![1.0 / 24.0; 24];
        let ps = PointSet::new(pts, w, 1.0).unwrap();
        let (red, trace) = caratheodory_reduce(&ps, TargetSpace::F(2)).unwrap();
        assert_eq!(trace.initial_size, 24);
        assert!(red.len() <= 9, "got {} points", red.len());
        assert_eq!(trace.final_size, red.len());
        assert_eq!(trace.dropped.len(), 24 - red.len());
        assert!(red.weights().iter().all(|&w| w > 0.0));
        // strength 2 preserved
        let rep = strength_kernel_float(&red, 2, 1e-8).unwrap();
        assert!(rep.max_strength >= 2);
    }

    #[test]
    fn minimal_simplex_unchanged() {
        let sim = match simplex(3).unwrap() {
            AnyPointSet::Exact(p) => p,
            AnyPointSet::Float(_) => panic!("simplex is exact"),
        };
        let (red, trace) = caratheodory_reduce(&sim, TargetSpace::F(1)).unwrap();
        assert_eq!(red.len(), 4);
        assert!(trace.dropped.is_empty());
    }

    #[test]
    fn kempner_reduces_for_p4_exactly() {
        let kem = match catalog("kempner_s3").unwrap().set {
            AnyPointSet::Exact(p) => p,
            AnyPointSet::Float(_) => panic!("kempner is exact"),
        };
        assert_eq!(kem.len(), 48);
        let (red, trace) = caratheodory_reduce(&kem, TargetSpace::P(4)).unwrap();
        assert!(red.len() <= 35, "got {}", red.len());
        assert!(trace.null_residuals.iter().all(|&r| r == 0.0));
        // degree-4 moments still exact: re-run the checker
        check_is_cubature(&red, TargetSpace::P(4)).unwrap();
    }

    #[test]
    fn pentagon_found_by_search() {
        let out = potential_minimize(2, 4, 5, 16, 1e-12, 42).unwrap();
        assert!(out.residual < 1e-12, "residual {}", out.residual);
        let ps = out.point_set.expect("success");
        let rep = strength_kernel(&AnyPointSet::Float(ps), 5, 1e-6).unwrap();
        assert!(rep.max_strength >= 4);
    }

    #[test]
    fn five_points_cannot_reach_strength_four_on_s2() {
        let out = potential_minimize(3, 4, 5, 8, 1e-12, 7).unwrap();
        assert!(out.point_set.is_none());
        assert!(out.residual > 1e-4, "residual {}", out.residual);
    }

    #[test]
    fn search_finds_twelve_point_four_design() {
        let out = potential_minimize(3, 4, 12, 16, 1e-12, 2024).unwrap();
        assert!(out.point_set.is_some(), "best residual {}", out.residual);
        let rep = out.verified.unwrap();
        assert!(rep.max_strength >= 4);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for (n, k, npts, seed) in [(2usize, 3usize, 4usize, 1u64), (3, 4, 6, 2), (4, 2, 5, 3)] {
            let err = gradient_check(n, k, npts, 1e-5, seed).unwrap();
            assert!(err < 1e-6, "({n},{k},{npts}): {err}");
        }
        // smaller h shrinks the error roughly quadratically
        let e1 = gradient_check(3, 3, 5, 1e-4, 9).unwrap();
        let e2 = gradient_check(3, 3, 5, 1e-5, 9).unwrap();
        assert!(e2 < e1);
    }

    #[test]
    fn objective_is_rotation_invariant() {
        let pot = Potential::new(3, 4, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        normalize_rows(&mut x);
        let v0 = pot.value(&x);
        for _ in 0..10 {
            let theta = rng.gen::<f64>() * 6.28;
            let (s, c) = theta.sin_cos();
            let rx: Vec<Vec<f64>> = x
                .iter()
                .map(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]])
                .collect();
            assert!((pot.value(&rx) - v0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_tangent_gradient_at_design() {
        let ico = unit_float(&icosahedron().unwrap());
        let pot = Potential::new(3, 5, 12).unwrap();
        let x: Vec<Vec<f64>> = ico.points().to_vec();
        assert!(pot.value(&x) < 1e-12);
        let g = tangent_project(&x, &pot.gradient(&x));
        let gmax = g.iter().flat_map(|r| r.iter()).fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!(gmax < 1e-9, "tangent gradient {gmax}");
    }
}
