//! Markov operators on the harmonic spaces of the two-sphere: orthonormal
//! harmonic bases, representation matrices of orthogonal maps, closed-form
//! traces, spectra of weighted averages, the homothety criterion linking
//! those averages to cubature strength, and Kesten-style word-count
//! comparisons.
//!
//! Everything here fixes the ambient dimension to 3. The degree-k harmonic
//! space has dimension 2k+1; an orthogonal map g acts on it by
//! phi -> phi o g^(-1), and the trace of that action depends only on the
//! rotation angle and determinant of g: sin((2k+1)t/2)/sin(t/2) for
//! det +1 and cos((2k+1)t/2)/cos(t/2) for det -1.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::linalg::jacobi_eigen;
use crate::mpoly::{harmonic_projection, MPoly};
use crate::pointsets::PointSet;
use crate::polyspaces::monomial_sphere_integral;
use crate::scalar::{Quad, Scalar};
use crate::verify::{strength_kernel_float, StrengthReport, DEFAULT_TOL};
use crate::{budget_cap, CubatureError, Result};

pub type Mat3 = [[f64; 3]; 3];

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|t| a[i][t] * b[t][j]).sum();
        }
    }
    c
}

pub fn mat_transpose(a: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[j][i];
        }
    }
    c
}

pub fn mat_det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn mat_identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_max_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

fn is_orthogonal(g: &Mat3, tol: f64) -> bool {
    mat_max_diff(&mat_mul(&mat_transpose(g), g), &mat_identity()) <= tol
}

/// Rotation by theta about the z axis.
pub fn rotation_z(theta: f64) -> Mat3 {
    let (s, c) = theta.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Householder reflection 1 - 2xx^T fixing the hyperplane orthogonal
/// to x (determinant -1); x and -x give the same matrix.
pub fn householder_reflection(x: &[f64]) -> Mat3 {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let u = [x[0] / n, x[1] / n, x[2] / n];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = if i == j { 1.0 } else { 0.0 } - 2.0 * u[i] * u[j];
        }
    }
    m
}

/// The hyperplane reflections fixing each point's orthogonal complement,
/// one per point of a set on S^2.
pub fn reflections_of_points(ps: &PointSet<f64>) -> Result<Vec<Mat3>> {
    if ps.coord_len() != 3 {
        return Err(CubatureError::InvalidInput(
            "point-set reflections need ambient dimension 3".into(),
        ));
    }
    let unit = ps.to_unit();
    Ok(unit.points().iter().map(|p| householder_reflection(p)).collect())
}

// ---------------------------------------------------------------------------
// Orthonormal harmonic basis
// ---------------------------------------------------------------------------

/// Orthonormal basis of the degree-k harmonic polynomials on R^3 with
/// respect to the rotation-invariant probability measure on S^2.
///
/// Construction: the azimuthal components Re (x+iy)^m and Im (x+iy)^m
/// times z^(k-m) are projected to their harmonic parts; distinct azimuthal
/// orders are orthogonal by symmetry, so only normalization remains. The
/// unnormalized polynomials are exact (rational coefficients, exactly
/// harmonic); norms are carried as floats.
pub struct HarmonicBasisK {
    k: usize,
    /// exponent vectors of the degree-k monomials, the coordinate order
    /// for all coefficient vectors
    monomials: Vec<Vec<u16>>,
    /// exact pairwise-orthogonal harmonic polynomials, 2k+1 of them
    polys: Vec<MPoly<Quad>>,
    /// L2 norms of the polys (sqrt of exact rational squared norms)
    norms: Vec<f64>,
    /// float coefficient vectors of polys / norms in `monomials` order
    vectors: Vec<Vec<f64>>,
    /// integral of x^(alpha+beta) over S^2 for degree-2k exponent sums
    integral_cache: HashMap<Vec<u16>, f64>,
}

fn monomials_of_degree(k: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    for a in (0..=k).rev() {
        for b in (0..=k - a).rev() {
            let c = k - a - b;
            out.push(vec![a as u16, b as u16, c as u16]);
        }
    }
    out
}

/// Re((x+iy)^m) and Im((x+iy)^m) as integer-coefficient polynomials.
fn azimuthal_pair(m: usize) -> (MPoly<Quad>, MPoly<Quad>) {
    let mut re = MPoly::zero(3);
    let mut im = MPoly::zero(3);
    let mut binom: i64 = 1;
    for j in 0..=m {
        // (x + iy)^m = sum_j C(m,j) x^(m-j) (iy)^j
        let expo = vec![(m - j) as u16, j as u16, 0];
        let c = Quad::int(match j % 4 {
            0 => binom,
            2 => -binom,
            1 => binom,
            _ => -binom,
        });
        if j % 2 == 0 {
            re.add_term(expo, c);
        } else {
            im.add_term(expo, c);
        }
        binom = binom * ((m - j) as i64) / (j as i64 + 1);
    }
    (re, im)
}

impl HarmonicBasisK {
    pub fn new(k: usize) -> Result<Self> {
        let monomials = monomials_of_degree(k);
        let index: HashMap<Vec<u16>, usize> =
            monomials.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut polys: Vec<MPoly<Quad>> = Vec::with_capacity(2 * k + 1);
        if k == 0 {
            polys.push(MPoly::constant(3, Quad::int(1)));
        } else {
            let zonal = MPoly::monomial(3, vec![0, 0, k as u16], Quad::int(1));
            polys.push(harmonic_projection(&zonal, 3));
            for m in 1..=k {
                let (re, im) = azimuthal_pair(m);
                let zpow = MPoly::monomial(3, vec![0, 0, (k - m) as u16], Quad::int(1));
                polys.push(harmonic_projection(&re.mul(&zpow), 3));
                polys.push(harmonic_projection(&im.mul(&zpow), 3));
            }
        }
        if polys.len() != 2 * k + 1 {
            return Err(CubatureError::VerificationFailed(format!(
                "harmonic basis size {} for degree {k}",
                polys.len()
            )));
        }
        let mut basis = HarmonicBasisK {
            k,
            monomials,
            polys,
            norms: Vec::new(),
            vectors: Vec::new(),
            integral_cache: HashMap::new(),
        };
        for j in 0..2 * k + 1 {
            let n2 = basis.inner_f64_polys(j, j)?;
            if !(n2.is_finite() && n2 > 0.0) {
                return Err(CubatureError::VerificationFailed(
                    "degenerate harmonic basis norm".into(),
                ));
            }
            basis.norms.push(n2.sqrt());
        }
        for j in 0..2 * k + 1 {
            let mut v = vec![0.0; basis.monomials.len()];
            for (expo, c) in &basis.polys[j].terms {
                v[index[expo]] = c.to_f64() / basis.norms[j];
            }
            basis.vectors.push(v);
        }
        Ok(basis)
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        2 * self.k + 1
    }

    pub fn monomials(&self) -> &[Vec<u16>] {
        &self.monomials
    }

    /// Orthonormal coefficient vectors in `monomials` order.
    pub fn coefficient_vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// The exact unnormalized polynomials (pairwise orthogonal, harmonic).
    pub fn raw_polys(&self) -> &[MPoly<Quad>] {
        &self.polys
    }

    fn sphere_integral_f64(&mut self, expo: Vec<u16>) -> Result<f64> {
        if let Some(v) = self.integral_cache.get(&expo) {
            return Ok(*v);
        }
        let v = monomial_sphere_integral(3, &expo)?
            .to_f64()
            .ok_or_else(|| CubatureError::InvalidInput("integral overflow".into()))?;
        self.integral_cache.insert(expo.clone(), v);
        Ok(v)
    }

    fn inner_f64_polys(&mut self, i: usize, j: usize) -> Result<f64> {
        let pi = self.polys[i].clone();
        let pj = self.polys[j].clone();
        self.inner_f64(&pi, &pj)
    }

    /// L2(S^2, sigma) pairing of two degree-k polynomials (float).
    fn inner_f64(&mut self, p: &MPoly<Quad>, q: &MPoly<Quad>) -> Result<f64> {
        let mut acc = 0.0;
        for (ea, ca) in &p.terms {
            let fa = ca.to_f64();
            for (eb, cb) in &q.terms {
                let expo: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                acc += fa * cb.to_f64() * self.sphere_integral_f64(expo)?;
            }
        }
        Ok(acc)
    }

    fn inner_f64_float(&mut self, p: &MPoly<f64>, q: &MPoly<Quad>, qnorm: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (ea, ca) in &p.terms {
            for (eb, cb) in &q.terms {
                let expo: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                acc += ca * (cb.to_f64() / qnorm) * self.sphere_integral_f64(expo)?;
            }
        }
        Ok(acc)
    }

    /// Exact pairing of basis elements i, j before normalization.
    pub fn inner_product_exact(&self, i: usize, j: usize) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (ea, ca) in &self.polys[i].terms {
            let ra = ca.as_rational().expect("rational basis coefficients");
            for (eb, cb) in &self.polys[j].terms {
                let rb = cb.as_rational().expect("rational basis coefficients");
                let expo: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                acc += ra * rb * monomial_sphere_integral(3, &expo)?;
            }
        }
        Ok(acc)
    }

    /// Values of the orthonormal basis at a point of S^2.
    pub fn eval_orthonormal(&self, x: &[f64]) -> Vec<f64> {
        let xs = [x[0], x[1], x[2]];
        self.polys
            .iter()
            .zip(&self.norms)
            .map(|(p, n)| {
                let mut acc = 0.0;
                for (expo, c) in &p.terms {
                    let mut t = c.to_f64();
                    for (i, &e) in expo.iter().enumerate() {
                        t *= xs[i].powi(e as i32);
                    }
                    acc += t;
                }
                acc / n
            })
            .collect()
    }

    /// Gram matrix of the orthonormal basis (float; near identity).
    pub fn gram_f64(&mut self) -> Result<Vec<Vec<f64>>> {
        let d = self.dim();
        let mut g = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                g[i][j] = self.inner_f64_polys(i, j)? / (self.norms[i] * self.norms[j]);
            }
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// Representation matrices and traces
// ---------------------------------------------------------------------------

/// Matrix of an operator on the degree-k harmonic space in the orthonormal
/// basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub k: usize,
    pub matrix: Vec<Vec<f64>>,
    pub symmetric: bool,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.matrix.len()).map(|i| self.matrix[i][i]).sum()
    }

    fn detect_symmetry(matrix: &[Vec<f64>]) -> bool {
        let d = matrix.len();
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                dev = dev.max((matrix[i][j] - matrix[j][i]).abs());
            }
        }
        dev <= 1e-10
    }
}

fn rep_matrix_in(basis: &mut HarmonicBasisK, g: &Mat3) -> Result<OperatorMatrix> {
    if !is_orthogonal(g, 1e-12) {
        return Err(CubatureError::InvalidInput(
            "representation needs an orthogonal matrix".into(),
        ));
    }
    let d = basis.dim();
    // phi o g^(-1) (x) = phi(g^T x): substitute x_i -> sum_j g[j][i] x_j
    let subst: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| g[j][i]).collect()).collect();
    let mut matrix = vec![vec![0.0; d]; d];
    for j in 0..d {
        let pj_f: MPoly<f64> = float_poly(&basis.polys[j]);
        let moved = pj_f.substitute_linear(&subst);
        let njnorm = basis.norms[j];
        for i in 0..d {
            let pi = basis.polys[i].clone();
            let ni = basis.norms[i];
            matrix[i][j] = basis.inner_f64_float(&moved, &pi, ni)? / njnorm;
        }
    }
    // orthogonality of the representation matrix
    let mut dev = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for t in 0..d {
                s += matrix[t][i] * matrix[t][j];
            }
            dev = dev.max((s - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    if dev > 1e-10 {
        return Err(CubatureError::VerificationFailed(format!(
            "representation matrix deviates from orthogonality by {dev:.3e}"
        )));
    }
    Ok(OperatorMatrix {
        k: basis.degree(),
        symmetric: OperatorMatrix::detect_symmetry(&matrix),
        matrix,
    })
}

fn float_poly(p: &MPoly<Quad>) -> MPoly<f64> {
    let mut out = MPoly::zero(p.nvars);
    for (expo, c) in &p.terms {
        out.add_term(expo.clone(), c.to_f64());
    }
    out
}

/// Matrix of phi -> phi o g^(-1) on the orthonormal degree-k basis.
pub fn rep_matrix(g: &Mat3, k: usize) -> Result<OperatorMatrix> {
    let mut basis = HarmonicBasisK::new(k)?;
    rep_matrix_in(&mut basis, g)
}

/// Closed-form trace of the degree-k action of an orthogonal map: with
/// rotation angle t, sin((2k+1)t/2)/sin(t/2) when det = +1 (2k+1 at t = 0,
/// (-1)^k at t = pi) and cos((2k+1)t/2)/cos(t/2) when det = -1
/// ((-1)^k (2k+1) at t = pi, where g is minus the identity).
pub fn trace_formula(g: &Mat3, k: usize) -> Result<f64> {
    if !is_orthogonal(g, 1e-9) {
        return Err(CubatureError::InvalidInput(
            "trace formula needs an orthogonal matrix".into(),
        ));
    }
    let det = mat_det(g);
    let tr = g[0][0] + g[1][1] + g[2][2];
    Ok(trace_from_class(det, tr, k))
}

/// Trace from determinant sign and 3x3 trace alone.
fn trace_from_class(det: f64, tr: f64, k: usize) -> f64 {
    let kk = k as f64;
    if det > 0.0 {
        let c = ((tr - 1.0) / 2.0).clamp(-1.0, 1.0);
        let theta = c.acos();
        if theta < 1e-8 {
            2.0 * kk + 1.0
        } else {
            ((2.0 * kk + 1.0) * theta / 2.0).sin() / (theta / 2.0).sin()
        }
    } else {
        let c = ((tr + 1.0) / 2.0).clamp(-1.0, 1.0);
        let theta = c.acos();
        if theta > std::f64::consts::PI - 1e-8 {
            // g = -identity: the action is (-1)^k times the identity
            if k % 2 == 0 { 2.0 * kk + 1.0 } else { -(2.0 * kk + 1.0) }
        } else {
            ((2.0 * kk + 1.0) * theta / 2.0).cos() / (theta / 2.0).cos()
        }
    }
}

// ---------------------------------------------------------------------------
// Markov operators and spectra
// ---------------------------------------------------------------------------

/// Weighted average of representation matrices. Weights must be positive;
/// they are normalized to total mass one.
pub fn markov_operator(s: &[Mat3], weights: &[f64], k: usize) -> Result<OperatorMatrix> {
    if s.is_empty() || s.len() != weights.len() {
        return Err(CubatureError::InvalidInput(
            "operator needs matching nonempty matrices and weights".into(),
        ));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(CubatureError::InvalidInput("weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    let mut basis = HarmonicBasisK::new(k)?;
    let d = basis.dim();
    let mut matrix = vec![vec![0.0; d]; d];
    for (g, &w) in s.iter().zip(weights) {
        let rep = rep_matrix_in(&mut basis, g)?;
        for i in 0..d {
            for j in 0..d {
                matrix[i][j] += w / total * rep.matrix[i][j];
            }
        }
    }
    Ok(OperatorMatrix { k, symmetric: OperatorMatrix::detect_symmetry(&matrix), matrix })
}

/// Eigenvalues of an operator matrix. Symmetric matrices go straight to
/// the Jacobi solver; otherwise the symmetric part is used and the
/// `symmetrized` flag is set.
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub symmetrized: bool,
}

pub fn spectrum(op: &OperatorMatrix) -> Spectrum {
    if op.symmetric {
        let (eig, _) = jacobi_eigen(&op.matrix);
        Spectrum { eigenvalues: eig, symmetrized: false }
    } else {
        let d = op.matrix.len();
        let mut sym = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                sym[i][j] = 0.5 * (op.matrix[i][j] + op.matrix[j][i]);
            }
        }
        let (eig, _) = jacobi_eigen(&sym);
        Spectrum { eigenvalues: eig, symmetrized: true }
    }
}

// ---------------------------------------------------------------------------
// Homothety criterion
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct HomothetyReport {
    pub degree: usize,
    /// the expected factor 1/(2l+1)
    pub factor: f64,
    pub max_deviation: f64,
    pub is_homothety: bool,
}

/// Whether the average of the hyperplane reflections of a weighted set on
/// S^2 acts on degree-l harmonics as the scalar 1/(2l+1). For a set of
/// verified strength >= 2l this always holds (a fact the tests enforce);
/// the check itself does not require any strength.
pub fn cubature_homothety_check(ps: &PointSet<f64>, l: usize) -> Result<HomothetyReport> {
    let s = reflections_of_points(ps)?;
    let weights: Vec<f64> = ps.weights().to_vec();
    let op = markov_operator(&s, &weights, l)?;
    let factor = 1.0 / (2.0 * l as f64 + 1.0);
    let mut dev = 0.0f64;
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            let want = if i == j { factor } else { 0.0 };
            dev = dev.max((op.matrix[i][j] - want).abs());
        }
    }
    Ok(HomothetyReport { degree: l, factor, max_deviation: dev, is_homothety: dev <= 1e-9 })
}

/// Converse direction: an antipodal set with symmetric weights whose
/// reflection average is a homothety on degree-l harmonics must be a
/// design of strength at least 2l+1; runs the independent verifier and
/// errors if that fails.
pub fn homothety_implies_design(ps: &PointSet<f64>, l: usize) -> Result<StrengthReport> {
    if !ps.is_antipodal() {
        return Err(CubatureError::InvalidInput(
            "converse needs an antipodal set with symmetric weights".into(),
        ));
    }
    let rep = cubature_homothety_check(ps, l)?;
    if !rep.is_homothety {
        return Err(CubatureError::InvalidInput(format!(
            "operator is not a homothety (deviation {:.3e}); converse not applicable",
            rep.max_deviation
        )));
    }
    let report = strength_kernel_float(ps, 2 * l + 2, DEFAULT_TOL)?;
    if report.max_strength < 2 * l + 1 {
        return Err(CubatureError::VerificationFailed(format!(
            "homothety held at degree {l} but verified strength is only {}",
            report.max_strength
        )));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Kesten moments
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct KestenReport {
    pub set_size: usize,
    pub n_max: usize,
    /// identity-word counts per length 0..=n_max
    pub identity_counts: Vec<u64>,
    /// m_N = identity_counts[N] / |S|^N
    pub m: Vec<f64>,
    /// degrees the trace moments were computed at
    pub ks: Vec<usize>,
    /// trace_table[N][i] = trace((2k_i+1)-normalized degree-k_i power N)
    pub trace_table: Vec<Vec<f64>>,
    /// 2 sqrt(|S|-1)/|S|
    pub kesten_bound: f64,
    /// sqrt(2p+1)/(p+1) for |S| = 2p
    pub pair_bound: Option<f64>,
    /// true when all entries were exact integers (exact identity test)
    pub exact: bool,
}

/// Word statistics of a symmetric generating set: exhaustive enumeration
/// of all words up to length n_max, counting those equal to the identity,
/// next to the closed-form trace moments of the averaged operator at a
/// geometric ladder of degrees up to k_max.
pub fn kesten_moments(s: &[Mat3], n_max: usize, k_max: usize) -> Result<KestenReport> {
    if s.is_empty() {
        return Err(CubatureError::InvalidInput("empty generating set".into()));
    }
    for g in s {
        if !is_orthogonal(g, 1e-9) {
            return Err(CubatureError::InvalidInput(
                "generators must be orthogonal matrices".into(),
            ));
        }
        if mat_max_diff(g, &mat_identity()) <= 1e-9 {
            return Err(CubatureError::InvalidInput(
                "the identity may not be a generator".into(),
            ));
        }
    }
    for g in s {
        let gi = mat_transpose(g);
        if !s.iter().any(|h| mat_max_diff(h, &gi) <= 1e-9) {
            return Err(CubatureError::InvalidInput(
                "generating set must be closed under inverses".into(),
            ));
        }
    }
    let q = s.len();
    let mut words: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 1..=n_max {
        pw = pw.saturating_mul(q as u128);
        words = words.saturating_add(pw);
    }
    if words > budget_cap(20_000_000) as u128 {
        return Err(CubatureError::Budget(format!(
            "word enumeration needs {words} products"
        )));
    }
    let exact = s
        .iter()
        .all(|g| g.iter().flatten().all(|&v| v.fract() == 0.0 && v.abs() <= 1e6));
    // geometric ladder of degrees
    let mut ks: Vec<usize> = Vec::new();
    let mut kv = 1usize;
    while kv < k_max {
        ks.push(kv);
        kv *= 2;
    }
    if k_max >= 1 {
        ks.push(k_max);
    }
    ks.dedup();

    struct Acc {
        ident: Vec<u64>,
        traces: Vec<Vec<f64>>,
    }
    fn walk(s: &[Mat3], ks: &[usize], g: Mat3, depth: usize, n_max: usize, acc: &mut Acc) {
        let det = mat_det(&g);
        let tr = g[0][0] + g[1][1] + g[2][2];
        if mat_max_diff(&g, &mat_identity()) <= 1e-9 {
            acc.ident[depth] += 1;
        }
        for (i, &k) in ks.iter().enumerate() {
            acc.traces[depth][i] += trace_from_class(det, tr, k);
        }
        if depth < n_max {
            for h in s {
                walk(s, ks, mat_mul(&g, h), depth + 1, n_max, acc);
            }
        }
    }

    let blocks: Vec<Acc> = s
        .par_iter()
        .map(|first| {
            let mut acc = Acc {
                ident: vec![0; n_max + 1],
                traces: vec![vec![0.0; ks.len()]; n_max + 1],
            };
            if n_max >= 1 {
                walk(s, &ks, *first, 1, n_max, &mut acc);
            }
            acc
        })
        .collect();
    let mut ident = vec![0u64; n_max + 1];
    let mut traces = vec![vec![0.0; ks.len()]; n_max + 1];
    ident[0] = 1;
    for (i, &k) in ks.iter().enumerate() {
        traces[0][i] = 2.0 * k as f64 + 1.0;
    }
    for b in &blocks {
        for d in 1..=n_max {
            ident[d] += b.ident[d];
            for i in 0..ks.len() {
                traces[d][i] += b.traces[d][i];
            }
        }
    }
    let mut m = Vec::with_capacity(n_max + 1);
    let mut table = Vec::with_capacity(n_max + 1);
    for d in 0..=n_max {
        let denom = (q as f64).powi(d as i32);
        m.push(ident[d] as f64 / denom);
        table.push(
            (0..ks.len())
                .map(|i| traces[d][i] / denom / (2.0 * ks[i] as f64 + 1.0))
                .collect(),
        );
    }
    let kesten_bound = 2.0 * ((q - 1) as f64).sqrt() / q as f64;
    let pair_bound = if q % 2 == 0 {
        let p = (q / 2) as f64;
        Some((2.0 * p + 1.0).sqrt() / (p + 1.0))
    } else {
        None
    };
    Ok(KestenReport {
        set_size: q,
        n_max,
        identity_counts: ident,
        m,
        ks,
        trace_table: table,
        kesten_bound,
        pair_bound,
        exact,
    })
}

// ---------------------------------------------------------------------------
// Spectral-norm sandwich
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SandwichReport {
    pub k_cap: usize,
    pub max_norm: f64,
    pub k_at_max: usize,
    pub lower_bound: f64,
    /// lower bound attained within the truncation
    pub confirmed: bool,
}

impl SandwichReport {
    pub fn status(&self) -> &'static str {
        if self.confirmed {
            "confirmed"
        } else {
            "inconclusive"
        }
    }
}

/// Largest operator norm of the uniform average over degrees 1..=k_cap,
/// checked against the window [1/sqrt(|S|), 1]. Exceeding 1 is an error;
/// falling short of the lower bound within the truncation is reported as
/// inconclusive (the supremum over all degrees is not computable).
pub fn sandwich_check(s: &[Mat3], k_cap: usize) -> Result<SandwichReport> {
    if s.is_empty() {
        return Err(CubatureError::InvalidInput("empty generating set".into()));
    }
    let weights = vec![1.0; s.len()];
    let mut max_norm = 0.0f64;
    let mut k_at_max = 1usize;
    for k in 1..=k_cap {
        let op = markov_operator(s, &weights, k)?;
        if !op.symmetric {
            return Err(CubatureError::InvalidInput(
                "sandwich check needs a symmetric averaged operator".into(),
            ));
        }
        let spec = spectrum(&op);
        let radius = spec
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if radius > max_norm {
            max_norm = radius;
            k_at_max = k;
        }
    }
    if max_norm > 1.0 + 1e-9 {
        return Err(CubatureError::VerificationFailed(format!(
            "operator norm {max_norm} exceeds 1"
        )));
    }
    let lower = 1.0 / (s.len() as f64).sqrt();
    Ok(SandwichReport {
        k_cap,
        max_norm,
        k_at_max,
        lower_bound: lower,
        confirmed: max_norm >= lower - 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{catalog, icosahedron};
    use crate::pointsets::AnyPointSet;
    use crate::polyspaces::gegenbauer_q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
        // QR-style orthogonalization of a random matrix
        let mut v: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        for i in 0..3 {
            for j in 0..i {
                let d: f64 = (0..3).map(|t| v[i][t] * v[j][t]).sum();
                for t in 0..3 {
                    v[i][t] -= d * v[j][t];
                }
            }
            let n: f64 = (0..3).map(|t| v[i][t] * v[i][t]).sum::<f64>().sqrt();
            for t in 0..3 {
                v[i][t] /= n;
            }
        }
        let mut g = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = v[i][j];
            }
        }
        if mat_det(&g) < 0.0 {
            for t in 0..3 {
                g[0][t] = -g[0][t];
            }
        }
        g
    }

    fn unit_icosahedron() -> PointSet<f64> {
        match icosahedron().unwrap() {
            AnyPointSet::Exact(ps) => ps.to_float().to_unit(),
            AnyPointSet::Float(ps) => ps.to_unit(),
        }
    }

    #[test]
    fn basis_is_orthonormal_and_harmonic() {
        for k in 0..=4usize {
            let mut b = HarmonicBasisK::new(k).unwrap();
            assert_eq!(b.dim(), 2 * k + 1);
            for p in b.raw_polys() {
                assert!(p.laplacian().is_zero(), "degree {k} basis not harmonic");
            }
            let g = b.gram_f64().unwrap();
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (g[i][j] - want).abs() < 1e-12,
                        "gram({i},{j}) = {} at degree {k}",
                        g[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn exact_cross_inner_products_vanish() {
        let b = HarmonicBasisK::new(3).unwrap();
        for i in 0..b.dim() {
            for j in 0..i {
                assert!(b.inner_product_exact(i, j).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn kernel_identity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [1usize, 2, 4] {
            let basis = HarmonicBasisK::new(k).unwrap();
            let q = gegenbauer_q(3, k).unwrap();
            for _ in 0..20 {
                let mut w = [0.0f64; 3];
                let mut v = [0.0f64; 3];
                for t in 0..3 {
                    w[t] = rng.gen::<f64>() * 2.0 - 1.0;
                    v[t] = rng.gen::<f64>() * 2.0 - 1.0;
                }
                let nw = (w.iter().map(|x| x * x).sum::<f64>()).sqrt();
                let nv = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
                for t in 0..3 {
                    w[t] /= nw;
                    v[t] /= nv;
                }
                let ew = basis.eval_orthonormal(&w);
                let ev = basis.eval_orthonormal(&v);
                let lhs: f64 = ew.iter().zip(&ev).map(|(a, b)| a * b).sum();
                let dot: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
                let rhs = q.eval_f64(dot);
                assert!((lhs - rhs).abs() < 1e-9, "k={k}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn dimension_identity_via_integrals() {
        for k in [1usize, 3, 5] {
            let mut b = HarmonicBasisK::new(k).unwrap();
            let g = b.gram_f64().unwrap();
            let total: f64 = (0..b.dim()).map(|i| g[i][i]).sum();
            assert!((total - (2 * k + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn rep_matrix_identity_and_rotation() {
        let id = mat_identity();
        let rep = rep_matrix(&id, 3).unwrap();
        for i in 0..rep.dim() {
            for j in 0..rep.dim() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((rep.matrix[i][j] - want).abs() < 1e-10);
            }
        }
        let theta = 0.83;
        let rep = rep_matrix(&rotation_z(theta), 1).unwrap();
        assert!((rep.trace() - (1.0 + 2.0 * theta.cos())).abs() < 1e-10);
    }

    #[test]
    fn trace_formula_against_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // random rotation at k = 5
        let g = random_rotation(&mut rng);
        let rep = rep_matrix(&g, 5).unwrap();
        let f = trace_formula(&g, 5).unwrap();
        assert!((rep.trace() - f).abs() < 1e-10);
        // both determinant classes, many random g
        for trial in 0..100 {
            let mut g = random_rotation(&mut rng);
            if trial % 2 == 1 {
                for t in 0..3 {
                    g[0][t] = -g[0][t];
                }
                // still orthogonal, det -1
            }
            let k = 1 + (trial % 4);
            let rep = rep_matrix(&g, k).unwrap();
            let f = trace_formula(&g, k).unwrap();
            assert!((rep.trace() - f).abs() < 1e-9, "trial {trial}");
        }
        // limit conventions
        assert!((trace_formula(&mat_identity(), 4).unwrap() - 9.0).abs() < 1e-12);
        let half_turn = rotation_z(std::f64::consts::PI);
        assert!((trace_formula(&half_turn, 3).unwrap() + 1.0).abs() < 1e-9);
        assert!((trace_formula(&half_turn, 4).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn icosahedron_markov_spectrum() {
        let ps = unit_icosahedron();
        let s = reflections_of_points(&ps).unwrap();
        let w = vec![1.0; s.len()];
        for k in [1usize, 2] {
            let op = markov_operator(&s, &w, k).unwrap();
            assert!(op.symmetric);
            let spec = spectrum(&op);
            assert!(!spec.symmetrized);
            let want = 1.0 / (2.0 * k as f64 + 1.0);
            for ev in &spec.eigenvalues {
                assert!((ev - want).abs() < 1e-9, "k={k}: eigenvalue {ev}");
                assert!(*ev >= -1.0 - 1e-12 && *ev <= 1.0 + 1e-12);
            }
        }
        // identity set: all eigenvalues 1
        let op = markov_operator(&[mat_identity()], &[1.0], 2).unwrap();
        let spec = spectrum(&op);
        for ev in &spec.eigenvalues {
            assert!((ev - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn homothety_forward_and_converse() {
        let ps = unit_icosahedron();
        let rep = cubature_homothety_check(&ps, 2).unwrap();
        assert!(rep.is_homothety);
        assert!((rep.factor - 0.2).abs() < 1e-15);
        let report = homothety_implies_design(&ps, 2).unwrap();
        assert!(report.max_strength >= 5);
        // cross-polytope at l = 1: factor 1/3, converse gives >= 3
        let oct = match catalog("octahedron").unwrap().set {
            AnyPointSet::Exact(ps) => ps.to_float().to_unit(),
            AnyPointSet::Float(ps) => ps.to_unit(),
        };
        let rep = cubature_homothety_check(&oct, 1).unwrap();
        assert!(rep.is_homothety && (rep.factor - 1.0 / 3.0).abs() < 1e-15);
        let report = homothety_implies_design(&oct, 1).unwrap();
        assert!(report.max_strength >= 3);
        // perturbed icosahedron (one vertex nudged along the sphere):
        // not a homothety any more
        let mut pts: Vec<Vec<f64>> = ps.points().to_vec();
        pts[0][0] += 1e-3;
        let n = pts[0].iter().map(|c| c * c).sum::<f64>().sqrt();
        for c in pts[0].iter_mut() {
            *c /= n;
        }
        let per = PointSet::new(pts, ps.weights().to_vec(), 1.0).unwrap();
        let rep = cubature_homothety_check(&per, 2).unwrap();
        assert!(!rep.is_homothety);
    }

    /// Antipodal points induce the same reflection; keep one per line.
    fn distinct_reflections(ps: &PointSet<f64>) -> Vec<Mat3> {
        let refl = reflections_of_points(ps).unwrap();
        let mut out: Vec<Mat3> = Vec::new();
        for g in refl {
            if !out.iter().any(|h| {
                (0..3).all(|i| (0..3).all(|j| (h[i][j] - g[i][j]).abs() < 1e-9))
            }) {
                out.push(g);
            }
        }
        out
    }

    #[test]
    fn kesten_word_counts() {
        // rotation of irrational angle and its inverse: m_2 = 1/2
        let r = rotation_z(1.0);
        let s = [r, mat_transpose(&r)];
        let rep = kesten_moments(&s, 4, 8).unwrap();
        assert_eq!(rep.identity_counts[0], 1);
        assert_eq!(rep.identity_counts[1], 0);
        assert!((rep.m[2] - 0.5).abs() < 1e-15);
        // 6 of 16 length-4 words balance r against its inverse
        assert!((rep.m[4] - 6.0 / 16.0).abs() < 1e-15);
        assert!((rep.kesten_bound - 1.0).abs() < 1e-15);
        assert_eq!(rep.pair_bound, Some(3.0f64.sqrt() / 2.0));
        // reflection set: every generator is an involution, m_2 = 1/|S|
        let ps = unit_icosahedron();
        let half = distinct_reflections(&ps);
        assert_eq!(half.len(), 6);
        let rep = kesten_moments(&half, 2, 4).unwrap();
        assert!((rep.m[2] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn sandwich_window() {
        let ps = unit_icosahedron();
        let half = distinct_reflections(&ps);
        let rep = sandwich_check(&half, 12).unwrap();
        assert!(rep.max_norm <= 1.0 + 1e-9);
        assert!(rep.lower_bound > 0.0);
        // involutions force identity returns, the norm cannot be tiny
        assert!(rep.max_norm >= 0.2);
    }
}
