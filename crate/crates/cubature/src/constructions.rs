//! Construction catalog: classical polytopes and root systems, point sets
//! derived from the classical quartic through decic power identities
//! (Liouville 1859, Kempner 1912, Hurwitz 1908, Schur 1909, and the Lucas
//! seven-point set), the two-shell configuration on S^7, product designs,
//! interval designs, the derived tight 4-design slice, Gaussian-measure
//! lifts, and the 53-biquadrate Waring decomposition.
//!
//! Identity-based sets are generated from their family descriptors and the
//! defining polynomial identity is machine-checked before any points are
//! produced, so a transcription error in a coefficient is caught at
//! construction time rather than at verification time.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::combin::combinations;
use crate::linalg;
use crate::mpoly::MPoly;
use crate::pointsets::{
    antipodal_double, dot, AnyPointSet, GaussianPointSet, PointSet,
};
use crate::polyspaces::{interval_measure_moments, moment_constant_sphere};
use crate::scalar::{br, bri, Quad, Scalar};
use crate::verify::{
    gauss_strength_moments, strength_kernel, strength_kernel_float, tightness, StrengthReport,
    DEFAULT_TOL,
};
use crate::{CubatureError, Result};

// ---------------------------------------------------------------------------
// Identity families
// ---------------------------------------------------------------------------

/// A power identity sum over vector families:
/// sum over families of coeff * sum over v of <v|u>^(2l) = rhs * <u|u>^l.
#[derive(Clone, Debug)]
pub struct IdentityFamily {
    pub name: &'static str,
    pub ambient_dim: usize,
    /// 2l, the common power.
    pub degree: usize,
    /// (integer coefficient, integer vectors).
    pub families: Vec<(i64, Vec<Vec<i64>>)>,
    pub rhs_constant: i64,
}

impl IdentityFamily {
    /// Machine-check the defining identity by exact expansion in u.
    pub fn validate(&self) -> Result<()> {
        let n = self.ambient_dim;
        let mut lhs: MPoly<Quad> = MPoly::zero(n);
        for (coeff, vectors) in &self.families {
            for v in vectors {
                let vq: Vec<Quad> = v.iter().map(|&c| Quad::int(c)).collect();
                let term = MPoly::linear_form_power(&vq, self.degree as u16)
                    .scale(&Quad::int(*coeff));
                lhs = lhs.add(&term);
            }
        }
        let rhs = MPoly::<Quad>::norm_squared(n)
            .powu((self.degree / 2) as u32)
            .scale(&Quad::int(self.rhs_constant));
        if !lhs.sub(&rhs).is_zero() {
            return Err(CubatureError::VerificationFailed(format!(
                "identity '{}' does not hold as a polynomial identity",
                self.name
            )));
        }
        Ok(())
    }

    /// All vectors with their coefficients flattened.
    fn flattened(&self) -> Vec<(i64, Vec<i64>)> {
        let mut out = Vec::new();
        for (coeff, vectors) in &self.families {
            for v in vectors {
                out.push((*coeff, v.clone()));
            }
        }
        out
    }
}

fn sign_patterns(k: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0..(1u32 << k) {
        out.push((0..k).map(|i| if mask >> i & 1 == 0 { 1 } else { -1 }).collect());
    }
    out
}

/// {(1, e_i +- e_j) : i < j}, 12 vectors in dimension 4.
fn family_pair_sums() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for ij in combinations(4, 2) {
        for s in [1i64, -1] {
            let mut v = vec![0i64; 4];
            v[ij[0]] = 1;
            v[ij[1]] = s;
            out.push(v);
        }
    }
    out
}

/// {2e_i +- e_j +- e_k : i fixed, j < k, all distinct}, 48 vectors.
fn family_two_one_one() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..4usize {
        let rest: Vec<usize> = (0..4).filter(|&r| r != i).collect();
        for jk in combinations(3, 2) {
            for sj in [1i64, -1] {
                for sk in [1i64, -1] {
                    let mut v = vec![0i64; 4];
                    v[i] = 2;
                    v[rest[jk[0]]] = sj;
                    v[rest[jk[1]]] = sk;
                    out.push(v);
                }
            }
        }
    }
    out
}

/// {(1, eps2, eps3, eps4)}, 8 vectors.
fn family_all_ones_4() -> Vec<Vec<i64>> {
    sign_patterns(3)
        .into_iter()
        .map(|s| vec![1, s[0], s[1], s[2]])
        .collect()
}

fn family_doubled_axes(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0i64; n];
            v[i] = 2;
            v
        })
        .collect()
}

fn family_axes(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0i64; n];
            v[i] = 1;
            v
        })
        .collect()
}

/// 8 u1^4 + 8 u2^4 + 8 u3^4 + sum over eps of (u1 + eps2 u2 + eps3 u3)^4
/// = 12 <u|u>^2.
pub fn lucas_identity() -> IdentityFamily {
    let diag: Vec<Vec<i64>> = sign_patterns(2)
        .into_iter()
        .map(|s| vec![1, s[0], s[1]])
        .collect();
    IdentityFamily {
        name: "lucas",
        ambient_dim: 3,
        degree: 4,
        families: vec![(8, family_axes(3)), (1, diag)],
        rhs_constant: 12,
    }
}

/// sum (2u_i)^4 + sum over eps of (u1 + eps2 u2 + eps3 u3 + eps4 u4)^4
/// = 24 <u|u>^2.
pub fn liouville_identity() -> IdentityFamily {
    IdentityFamily {
        name: "liouville",
        ambient_dim: 4,
        degree: 4,
        families: vec![(1, family_doubled_axes(4)), (1, family_all_ones_4())],
        rhs_constant: 24,
    }
}

/// sum (2u_i)^6 + 8 sum (u_i +- u_j)^6 + sum (u1 +- u2 +- u3 +- u4)^6
/// = 120 <u|u>^3.
pub fn kempner_identity() -> IdentityFamily {
    IdentityFamily {
        name: "kempner",
        ambient_dim: 4,
        degree: 6,
        families: vec![
            (1, family_doubled_axes(4)),
            (8, family_pair_sums()),
            (1, family_all_ones_4()),
        ],
        rhs_constant: 120,
    }
}

/// 6 sum (2u_i)^8 + 60 sum (u_i +- u_j)^8 + sum (2u_i +- u_j +- u_k)^8
/// + 6 sum (u1 +- u2 +- u3 +- u4)^8 = 5040 <u|u>^4.
pub fn hurwitz_identity() -> IdentityFamily {
    IdentityFamily {
        name: "hurwitz",
        ambient_dim: 4,
        degree: 8,
        families: vec![
            (6, family_doubled_axes(4)),
            (60, family_pair_sums()),
            (1, family_two_one_one()),
            (6, family_all_ones_4()),
        ],
        rhs_constant: 5040,
    }
}

/// 9 sum (2u_i)^10 + 180 sum (u_i +- u_j)^10 + sum (2u_i +- u_j +- u_k)^10
/// + 9 sum (u1 +- u2 +- u3 +- u4)^10 = 22680 <u|u>^5.
pub fn schur_identity() -> IdentityFamily {
    IdentityFamily {
        name: "schur",
        ambient_dim: 4,
        degree: 10,
        families: vec![
            (9, family_doubled_axes(4)),
            (180, family_pair_sums()),
            (1, family_two_one_one()),
            (9, family_all_ones_4()),
        ],
        rhs_constant: 22680,
    }
}

/// sum over i < j and eps of (u_i + eps u_j)^4 = 6 <u|u>^2 in dimension 4.
/// This is the identity behind the biquadrate decomposition.
pub fn pair_sum_quartic_identity() -> IdentityFamily {
    IdentityFamily {
        name: "pair-sum-quartic",
        ambient_dim: 4,
        degree: 4,
        families: vec![(1, family_pair_sums())],
        rhs_constant: 6,
    }
}

fn square_free_part(mut m: i64) -> i64 {
    let mut out = 1i64;
    let mut p = 2i64;
    while p * p <= m {
        let mut count = 0;
        while m % p == 0 {
            m /= p;
            count += 1;
        }
        if count % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    out * m
}

/// Build the half point set of a validated identity: every vector is
/// normalized to the unit sphere and weighted by coeff * |v|^(2l), scaled
/// so the weights sum to 1. The result is a cubature formula for the
/// homogeneous even degree 2l. Exact coordinates are used whenever all
/// vector norms lie in a single quadratic extension.
pub fn identity_to_pointset(f: &IdentityFamily) -> Result<AnyPointSet> {
    f.validate()?;
    let flat = f.flattened();
    let l = f.degree / 2;
    // exact when the square-free parts of the norms agree (or are 1)
    let mut surd = 1i64;
    let mut single_surd = true;
    let mut norms = Vec::with_capacity(flat.len());
    for (_, v) in &flat {
        let norm2: i64 = v.iter().map(|c| c * c).sum();
        let sf = square_free_part(norm2);
        if sf != 1 {
            if surd == 1 {
                surd = sf;
            } else if surd != sf {
                single_surd = false;
            }
        }
        norms.push(norm2);
    }
    let mut raw_weights: Vec<BigRational> = Vec::with_capacity(flat.len());
    for ((coeff, _), norm2) in flat.iter().zip(&norms) {
        let mut w = BigRational::from(num_bigint::BigInt::from(*coeff));
        for _ in 0..l {
            w *= bri(*norm2);
        }
        if !w.is_positive() {
            return Err(CubatureError::InvalidInput(
                "identity family with nonpositive effective weight".into(),
            ));
        }
        raw_weights.push(w);
    }
    let total: BigRational = raw_weights.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
    if single_surd {
        // v / sqrt(norm2) with norm2 = s^2 f: coordinate c becomes
        // (c / (s f)) sqrt(f)
        let mut points = Vec::with_capacity(flat.len());
        for ((_, v), norm2) in flat.iter().zip(&norms) {
            let f_part = square_free_part(*norm2);
            let s = ((*norm2 / f_part) as f64).sqrt().round() as i64;
            debug_assert_eq!(s * s * f_part, *norm2);
            let p: Vec<Quad> = v
                .iter()
                .map(|&c| {
                    if f_part == 1 {
                        Quad::rational(br(c, s))
                    } else {
                        Quad::new(BigRational::zero(), br(c, s * f_part), f_part)
                    }
                })
                .collect();
            points.push(p);
        }
        let weights: Vec<Quad> = raw_weights
            .into_iter()
            .map(|w| Quad::rational(w / total.clone()))
            .collect();
        Ok(AnyPointSet::Exact(PointSet::new(points, weights, Quad::int(1))?))
    } else {
        let points: Vec<Vec<f64>> = flat
            .iter()
            .zip(&norms)
            .map(|((_, v), norm2)| {
                let inv = 1.0 / (*norm2 as f64).sqrt();
                v.iter().map(|&c| c as f64 * inv).collect()
            })
            .collect();
        let weights: Vec<f64> = raw_weights
            .into_iter()
            .map(|w| (w / total.clone()).to_f64().unwrap())
            .collect();
        Ok(AnyPointSet::Float(PointSet::new(points, weights, 1.0)?))
    }
}

fn doubled(ps: AnyPointSet) -> Result<AnyPointSet> {
    Ok(match ps {
        AnyPointSet::Exact(e) => AnyPointSet::Exact(antipodal_double(&e)?),
        AnyPointSet::Float(f) => AnyPointSet::Float(antipodal_double(&f)?),
    })
}

// ---------------------------------------------------------------------------
// Classical coordinate constructions
// ---------------------------------------------------------------------------

fn golden_ratio() -> Quad {
    Quad::new(br(1, 2), br(1, 2), 5)
}

/// Regular N-gon on the unit circle; exact for N in {3, 4, 6}.
pub fn polygon(nsides: usize) -> Result<AnyPointSet> {
    if nsides < 3 {
        return Err(CubatureError::InvalidInput("polygon needs N >= 3".into()));
    }
    match nsides {
        3 | 6 => {
            // cos/sin values in {+-1, +-1/2, +-sqrt(3)/2}
            let h = Quad::new(BigRational::zero(), br(1, 2), 3);
            let half = Quad::rational(br(1, 2));
            let mut pts = vec![vec![Quad::int(1), Quad::int(0)]];
            if nsides == 3 {
                pts.push(vec![-half.clone(), h.clone()]);
                pts.push(vec![-half, -h]);
            } else {
                pts.push(vec![half.clone(), h.clone()]);
                pts.push(vec![-half.clone(), h.clone()]);
                pts.push(vec![Quad::int(-1), Quad::int(0)]);
                pts.push(vec![-half.clone(), -h.clone()]);
                pts.push(vec![half, -h]);
            }
            Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(1))?))
        }
        4 => {
            let pts = vec![
                vec![Quad::int(1), Quad::int(0)],
                vec![Quad::int(0), Quad::int(1)],
                vec![Quad::int(-1), Quad::int(0)],
                vec![Quad::int(0), Quad::int(-1)],
            ];
            Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(1))?))
        }
        _ => {
            let pts: Vec<Vec<f64>> = (0..nsides)
                .map(|j| {
                    let a = 2.0 * std::f64::consts::PI * j as f64 / nsides as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect();
            Ok(AnyPointSet::Float(PointSet::new_uniform(pts, 1.0)?))
        }
    }
}

/// Regular simplex: n + 1 points e_i - (1,..,1)/(n+1) in R^(n+1), spanning
/// an n-dimensional subspace, squared radius n/(n+1).
pub fn simplex(n: usize) -> Result<AnyPointSet> {
    if n < 1 {
        return Err(CubatureError::InvalidInput("simplex needs n >= 1".into()));
    }
    let m = n + 1;
    let mut pts = Vec::with_capacity(m);
    for i in 0..m {
        let mut p = vec![Quad::rational(br(-1, m as i64)); m];
        p[i] = p[i].clone() + Quad::int(1);
        pts.push(p);
    }
    Ok(AnyPointSet::Exact(PointSet::new_uniform(
        pts,
        Quad::rational(br(n as i64, m as i64)),
    )?))
}

/// {+-e_1, .., +-e_n} on the unit sphere.
pub fn cross_polytope(n: usize) -> Result<AnyPointSet> {
    if n < 2 {
        return Err(CubatureError::InvalidInput("cross-polytope needs n >= 2".into()));
    }
    let mut pts = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1i64, -1] {
            let mut p = vec![Quad::int(0); n];
            p[i] = Quad::int(s);
            pts.push(p);
        }
    }
    Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(1))?))
}

/// All 2^n sign vectors (+-1, .., +-1), squared radius n.
pub fn hypercube(n: usize) -> Result<AnyPointSet> {
    if n < 2 {
        return Err(CubatureError::InvalidInput("hypercube needs n >= 2".into()));
    }
    if n > 20 {
        return Err(CubatureError::InvalidInput("hypercube cap n <= 20".into()));
    }
    let pts: Vec<Vec<Quad>> = sign_patterns(n)
        .into_iter()
        .map(|s| s.into_iter().map(Quad::int).collect())
        .collect();
    Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(n as i64))?))
}

/// Vertices (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1): the regular simplex
/// for n = 3 in its integer form, squared radius 3.
pub fn tetrahedron() -> Result<AnyPointSet> {
    let pts = vec![
        vec![Quad::int(1), Quad::int(1), Quad::int(1)],
        vec![Quad::int(1), Quad::int(-1), Quad::int(-1)],
        vec![Quad::int(-1), Quad::int(1), Quad::int(-1)],
        vec![Quad::int(-1), Quad::int(-1), Quad::int(1)],
    ];
    Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(3))?))
}

/// 12 vertices: cyclic permutations of (0, +-1, +-phi), squared radius
/// (5 + sqrt 5)/2, exact in Q(sqrt 5).
pub fn icosahedron() -> Result<AnyPointSet> {
    let phi = golden_ratio();
    let z = Quad::int(0);
    let mut pts = Vec::with_capacity(12);
    for s1 in [1i64, -1] {
        for s2 in [1i64, -1] {
            let a = Quad::int(s1);
            let b = phi.clone() * Quad::int(s2);
            pts.push(vec![z.clone(), a.clone(), b.clone()]);
            pts.push(vec![a.clone(), b.clone(), z.clone()]);
            pts.push(vec![b, z.clone(), a]);
        }
    }
    let radius2 = Quad::new(br(5, 2), br(1, 2), 5);
    Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, radius2)?))
}

/// 20 vertices: the cube (+-1,+-1,+-1) plus cyclic permutations of
/// (0, +-1/phi, +-phi), squared radius 3, exact in Q(sqrt 5).
pub fn dodecahedron() -> Result<AnyPointSet> {
    let phi = golden_ratio();
    let inv_phi = Quad::new(br(-1, 2), br(1, 2), 5); // phi - 1 = 1/phi
    let z = Quad::int(0);
    let mut pts: Vec<Vec<Quad>> = sign_patterns(3)
        .into_iter()
        .map(|s| s.into_iter().map(Quad::int).collect())
        .collect();
    for s1 in [1i64, -1] {
        for s2 in [1i64, -1] {
            let a = inv_phi.clone() * Quad::int(s1);
            let b = phi.clone() * Quad::int(s2);
            pts.push(vec![z.clone(), a.clone(), b.clone()]);
            pts.push(vec![a.clone(), b.clone(), z.clone()]);
            pts.push(vec![b, z.clone(), a]);
        }
    }
    Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(3))?))
}

/// The 24 vectors (+-1, +-1, 0, 0) and permutations, squared radius 2.
pub fn d4_roots() -> Result<AnyPointSet> {
    let mut pts = Vec::with_capacity(24);
    for ij in combinations(4, 2) {
        for s1 in [1i64, -1] {
            for s2 in [1i64, -1] {
                let mut p = vec![Quad::int(0); 4];
                p[ij[0]] = Quad::int(s1);
                p[ij[1]] = Quad::int(s2);
                pts.push(p);
            }
        }
    }
    Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(2))?))
}

/// Integer-pair and half-integer vectors of squared norm 2 in dimension 8:
/// 112 + 128 = 240 points, squared radius 2.
pub fn e8_roots() -> Result<AnyPointSet> {
    let mut pts = Vec::with_capacity(240);
    for ij in combinations(8, 2) {
        for s1 in [1i64, -1] {
            for s2 in [1i64, -1] {
                let mut p = vec![Quad::int(0); 8];
                p[ij[0]] = Quad::int(s1);
                p[ij[1]] = Quad::int(s2);
                pts.push(p);
            }
        }
    }
    for mask in 0..256u32 {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let p: Vec<Quad> = (0..8)
            .map(|i| Quad::rational(br(if mask >> i & 1 == 0 { 1 } else { -1 }, 2)))
            .collect();
        pts.push(p);
    }
    Ok(AnyPointSet::Exact(PointSet::new_uniform(pts, Quad::int(2))?))
}

/// Axes with weight 8/60 plus the four normalized diagonals (1,+-1,+-1)
/// with weight 9/60: integrates all homogeneous quartics on S^2.
pub fn lucas_s2() -> Result<AnyPointSet> {
    identity_to_pointset(&lucas_identity())
}

pub fn liouville_s3() -> Result<AnyPointSet> {
    doubled(identity_to_pointset(&liouville_identity())?)
}

pub fn kempner_s3() -> Result<AnyPointSet> {
    doubled(identity_to_pointset(&kempner_identity())?)
}

/// The degree-8 identity certifies strength 9 for this set. Its actual
/// strength is 11: the degree-8 and degree-10 coefficient vectors weight
/// the same 72 directions proportionally (family for family, the ratio of
/// coefficients times the squared vector norm is the constant 6), so this
/// weighted set and [`schur_s3`] coincide point for point and weight for
/// weight, and the strength-11 certificate of the degree-10 identity
/// applies to both.
pub fn hurwitz_s3() -> Result<AnyPointSet> {
    doubled(identity_to_pointset(&hurwitz_identity())?)
}

/// Strength 11; equal as a weighted set to [`hurwitz_s3`].
pub fn schur_s3() -> Result<AnyPointSet> {
    doubled(identity_to_pointset(&schur_identity())?)
}

/// Shell vectors of squared norm 2 in the even unimodular rank-8 lattice,
/// as integer numerators over denominator 2 (240 vectors).
pub(crate) fn e8_shell2_numerators() -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(240);
    for ij in combinations(8, 2) {
        for s1 in [2i64, -2] {
            for s2 in [2i64, -2] {
                let mut v = vec![0i64; 8];
                v[ij[0]] = s1;
                v[ij[1]] = s2;
                out.push(v);
            }
        }
    }
    for mask in 0..256u32 {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        out.push((0..8).map(|i| if mask >> i & 1 == 0 { 1 } else { -1 }).collect());
    }
    out
}

/// Shell vectors of squared norm 4, same convention (2160 vectors):
/// (+-2, 0^7), (+-1)^4 0^4, and one +-3/2 with seven +-1/2 at even sum.
pub(crate) fn e8_shell4_numerators() -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(2160);
    for i in 0..8 {
        for s in [4i64, -4] {
            let mut v = vec![0i64; 8];
            v[i] = s;
            out.push(v);
        }
    }
    for pos in combinations(8, 4) {
        for s in sign_patterns(4) {
            let mut v = vec![0i64; 8];
            for (idx, &p) in pos.iter().enumerate() {
                v[p] = 2 * s[idx];
            }
            out.push(v);
        }
    }
    for i in 0..8usize {
        for s3 in [3i64, -3] {
            for mask in 0..128u32 {
                let mut v = Vec::with_capacity(8);
                let mut bit = 0;
                for j in 0..8 {
                    if j == i {
                        v.push(s3);
                    } else {
                        v.push(if mask >> bit & 1 == 0 { 1 } else { -1 });
                        bit += 1;
                    }
                }
                // lattice membership: the Euclidean coordinate sum v/2 must
                // be an even integer
                let sum: i64 = v.iter().sum();
                if sum.rem_euclid(4) == 0 {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// 2400 points on S^7: the 240 norm-2 shell vectors scaled by 1/sqrt(2)
/// with weight 1/1680 each, and the 2160 norm-4 shell vectors scaled by
/// 1/2 with weight 1/2520 each.
pub fn e8_two_shell_s7() -> Result<AnyPointSet> {
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(2400);
    let mut weights = Vec::with_capacity(2400);
    let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
    for v in e8_shell2_numerators() {
        points.push(v.iter().map(|&c| c as f64 / 2.0 * inv_sqrt2).collect());
        weights.push(1.0 / 1680.0);
    }
    for v in e8_shell4_numerators() {
        points.push(v.iter().map(|&c| c as f64 / 4.0).collect());
        weights.push(1.0 / 2520.0);
    }
    Ok(AnyPointSet::Float(PointSet::new(points, weights, 1.0)?))
}

// ---------------------------------------------------------------------------
// Catalog dispatch with expected metadata
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub set: AnyPointSet,
    pub expected_size: usize,
    /// None when the entry is only a formula for one even degree.
    pub expected_strength: Option<usize>,
    pub expected_tight: bool,
    /// Degree 2l for entries that integrate exactly the homogeneous
    /// degree-2l polynomials (the Lucas set).
    pub covers_even_degree: Option<usize>,
}

/// Parse names like "polygon(7)" into ("polygon", Some(7)).
fn parse_catalog_name(name: &str) -> Result<(String, Option<usize>)> {
    if let Some(open) = name.find('(') {
        if !name.ends_with(')') {
            return Err(CubatureError::Parse(format!("malformed catalog name '{name}'")));
        }
        let base = name[..open].to_string();
        let arg: usize = name[open + 1..name.len() - 1]
            .parse()
            .map_err(|_| CubatureError::Parse(format!("bad parameter in '{name}'")))?;
        Ok((base, Some(arg)))
    } else {
        Ok((name.to_string(), None))
    }
}

/// Fixed catalog names (parametrized entries take an argument in
/// parentheses, e.g. polygon(7), simplex(5)).
pub const CATALOG_NAMES: &[&str] = &[
    "polygon(N)",
    "simplex(n)",
    "cross_polytope(n)",
    "hypercube(n)",
    "tetrahedron",
    "octahedron",
    "cube",
    "icosahedron",
    "dodecahedron",
    "d4_roots",
    "e8_roots",
    "lucas_s2",
    "liouville_s3",
    "kempner_s3",
    "hurwitz_s3",
    "schur_s3",
    "e8_two_shell_s7",
];

pub fn catalog(name: &str) -> Result<CatalogEntry> {
    let (base, arg) = parse_catalog_name(name)?;
    let need_arg = || {
        arg.ok_or_else(|| {
            CubatureError::InvalidInput(format!("catalog entry '{base}' needs a parameter"))
        })
    };
    let entry = match base.as_str() {
        "polygon" => {
            let n = need_arg()?;
            CatalogEntry {
                name: name.to_string(),
                set: polygon(n)?,
                expected_size: n,
                expected_strength: Some(n - 1),
                expected_tight: true,
                covers_even_degree: None,
            }
        }
        "simplex" => {
            let n = need_arg()?;
            CatalogEntry {
                name: name.to_string(),
                set: simplex(n)?,
                expected_size: n + 1,
                expected_strength: Some(2),
                expected_tight: true,
                covers_even_degree: None,
            }
        }
        "cross_polytope" => {
            let n = need_arg()?;
            CatalogEntry {
                name: name.to_string(),
                set: cross_polytope(n)?,
                expected_size: 2 * n,
                expected_strength: Some(3),
                expected_tight: true,
                covers_even_degree: None,
            }
        }
        "hypercube" => {
            let n = need_arg()?;
            CatalogEntry {
                name: name.to_string(),
                set: hypercube(n)?,
                expected_size: 1 << n,
                expected_strength: Some(3),
                expected_tight: n == 2,
                covers_even_degree: None,
            }
        }
        "tetrahedron" => CatalogEntry {
            name: name.to_string(),
            set: tetrahedron()?,
            expected_size: 4,
            expected_strength: Some(2),
            expected_tight: true,
            covers_even_degree: None,
        },
        "octahedron" => CatalogEntry {
            name: name.to_string(),
            set: cross_polytope(3)?,
            expected_size: 6,
            expected_strength: Some(3),
            expected_tight: true,
            covers_even_degree: None,
        },
        "cube" => CatalogEntry {
            name: name.to_string(),
            set: hypercube(3)?,
            expected_size: 8,
            expected_strength: Some(3),
            expected_tight: false,
            covers_even_degree: None,
        },
        "icosahedron" => CatalogEntry {
            name: name.to_string(),
            set: icosahedron()?,
            expected_size: 12,
            expected_strength: Some(5),
            expected_tight: true,
            covers_even_degree: None,
        },
        "dodecahedron" => CatalogEntry {
            name: name.to_string(),
            set: dodecahedron()?,
            expected_size: 20,
            expected_strength: Some(5),
            expected_tight: false,
            covers_even_degree: None,
        },
        "d4_roots" => CatalogEntry {
            name: name.to_string(),
            set: d4_roots()?,
            expected_size: 24,
            expected_strength: Some(5),
            expected_tight: false,
            covers_even_degree: None,
        },
        "e8_roots" => CatalogEntry {
            name: name.to_string(),
            set: e8_roots()?,
            expected_size: 240,
            expected_strength: Some(7),
            expected_tight: true,
            covers_even_degree: None,
        },
        "lucas_s2" => CatalogEntry {
            name: name.to_string(),
            set: lucas_s2()?,
            expected_size: 7,
            expected_strength: None,
            expected_tight: false,
            covers_even_degree: Some(4),
        },
        "liouville_s3" => CatalogEntry {
            name: name.to_string(),
            set: liouville_s3()?,
            expected_size: 24,
            expected_strength: Some(5),
            expected_tight: false,
            covers_even_degree: None,
        },
        "kempner_s3" => CatalogEntry {
            name: name.to_string(),
            set: kempner_s3()?,
            expected_size: 48,
            expected_strength: Some(7),
            expected_tight: false,
            covers_even_degree: None,
        },
        "hurwitz_s3" => CatalogEntry {
            name: name.to_string(),
            set: hurwitz_s3()?,
            expected_size: 144,
            expected_strength: Some(11),
            expected_tight: false,
            covers_even_degree: None,
        },
        "schur_s3" => CatalogEntry {
            name: name.to_string(),
            set: schur_s3()?,
            expected_size: 144,
            expected_strength: Some(11),
            expected_tight: false,
            covers_even_degree: None,
        },
        "e8_two_shell_s7" => CatalogEntry {
            name: name.to_string(),
            set: e8_two_shell_s7()?,
            expected_size: 2400,
            expected_strength: Some(11),
            expected_tight: false,
            covers_even_degree: None,
        },
        other => {
            return Err(CubatureError::InvalidInput(format!(
                "unknown catalog entry '{other}'"
            )))
        }
    };
    if entry.set.len() != entry.expected_size {
        return Err(CubatureError::VerificationFailed(format!(
            "catalog entry '{}' built {} points, expected {}",
            entry.name,
            entry.set.len(),
            entry.expected_size
        )));
    }
    Ok(entry)
}

// ---------------------------------------------------------------------------
// Product designs
// ---------------------------------------------------------------------------

/// Lift a design Y on the sphere of R^(n-1) and an equal-weight interval
/// design Z for the measure (1-t^2)^((n-3)/2) to the sphere of R^n:
/// points (sqrt(1-z^2) y, z), weights W(y)/|Z|. Inputs are verified to
/// strength k first; the output is verified before being returned.
pub fn product_design(y: &PointSet<f64>, z_nodes: &[f64], k: usize) -> Result<PointSet<f64>> {
    let n = y.coord_len() + 1;
    let rep = strength_kernel_float(&y.to_unit(), k, DEFAULT_TOL)?;
    if rep.max_strength < k {
        return Err(CubatureError::VerificationFailed(format!(
            "factor on the sphere has strength {} < {k}",
            rep.max_strength
        )));
    }
    if z_nodes.is_empty() {
        return Err(CubatureError::InvalidInput("empty interval design".into()));
    }
    let mu = interval_measure_moments(n as i64 - 3, k);
    for d in 1..=k {
        let m: f64 = z_nodes.iter().map(|z| z.powi(d as i32)).sum::<f64>() / z_nodes.len() as f64;
        if (m - mu[d].to_f64().unwrap()).abs() > 1e-9 {
            return Err(CubatureError::VerificationFailed(format!(
                "interval design misses moment {d} by {:.3e}",
                (m - mu[d].to_f64().unwrap()).abs()
            )));
        }
    }
    if z_nodes.iter().any(|z| z.abs() >= 1.0) {
        return Err(CubatureError::InvalidInput(
            "interval design nodes must lie in (-1, 1)".into(),
        ));
    }
    let yu = y.to_unit();
    let mut points = Vec::with_capacity(yu.len() * z_nodes.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (py, wy) in yu.iter() {
        for &z in z_nodes {
            let s = (1.0 - z * z).sqrt();
            let mut p: Vec<f64> = py.iter().map(|c| c * s).collect();
            p.push(z);
            points.push(p);
            weights.push(wy / z_nodes.len() as f64);
        }
    }
    let out = PointSet::new(points, weights, 1.0)?;
    let rep = strength_kernel_float(&out, k, DEFAULT_TOL)?;
    if rep.max_strength < k {
        return Err(CubatureError::VerificationFailed(format!(
            "product design reached strength {} < {k}",
            rep.max_strength
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Interval designs
// ---------------------------------------------------------------------------

/// Search for N equal-weight nodes in (-1, 1) whose moments against the
/// normalized measure (1-t^2)^e match degrees 1..=k, with 2e = two_e.
/// A symmetric node pattern is used (pairs +-t, plus 0 when N is odd), so
/// odd moments vanish identically; the even-moment system is solved by a
/// damped Gauss-Newton iteration with restarts. Nodes come back sorted.
pub fn interval_design_search(
    k: usize,
    two_e: i64,
    npoints: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if npoints == 0 {
        return Err(CubatureError::InvalidInput("need at least one node".into()));
    }
    let pairs = npoints / 2;
    let center = npoints % 2 == 1;
    // required even degrees, then padding to a square system when possible
    let required: Vec<usize> = (1..=k).filter(|d| d % 2 == 0).collect();
    if pairs == 0 {
        return if required.is_empty() {
            Ok(vec![0.0])
        } else {
            Err(CubatureError::NonConvergence(
                "a single node cannot match positive even moments".into(),
            ))
        };
    }
    let mut degrees = required.clone();
    let mut next = degrees.last().copied().unwrap_or(0) + 2;
    while degrees.len() < pairs {
        degrees.push(next);
        next += 2;
    }
    let mu = interval_measure_moments(two_e, *degrees.last().unwrap_or(&2));
    let target: Vec<f64> = degrees.iter().map(|&d| mu[d].to_f64().unwrap()).collect();
    let nf = npoints as f64;
    let residual = |t: &[f64]| -> Vec<f64> {
        degrees
            .iter()
            .enumerate()
            .map(|(row, &d)| {
                let s: f64 = t.iter().map(|x| x.powi(d as i32)).sum();
                2.0 * s / nf - target[row]
            })
            .collect()
    };
    let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for restart in 0..40 {
        // spread starting nodes over (0,1), Chebyshev-like with jitter
        let mut t: Vec<f64> = (0..pairs)
            .map(|i| {
                let base = (i as f64 + 0.5) / (pairs as f64 + 0.5);
                let jitter = if restart == 0 { 0.0 } else { rng.gen_range(-0.2..0.2) };
                (base + jitter * base).clamp(1e-3, 0.999)
            })
            .collect();
        let mut f = residual(&t);
        let mut best = norm2(&f);
        for _ in 0..400 {
            if best < 1e-26 {
                break;
            }
            // Gauss-Newton step via normal equations
            let m = degrees.len();
            let mut jt_j = vec![vec![0.0f64; pairs]; pairs];
            let mut jt_f = vec![0.0f64; pairs];
            for (row, &d) in degrees.iter().enumerate() {
                let grad: Vec<f64> = t
                    .iter()
                    .map(|x| 2.0 * d as f64 * x.powi(d as i32 - 1) / nf)
                    .collect();
                for a in 0..pairs {
                    jt_f[a] += grad[a] * f[row];
                    for b in 0..pairs {
                        jt_j[a][b] += grad[a] * grad[b];
                    }
                }
            }
            let _ = m;
            for a in 0..pairs {
                jt_j[a][a] += 1e-12;
            }
            let step = match linalg::solve(&jt_j, &jt_f, 1e-14) {
                Some(s) => s,
                None => break,
            };
            let mut improved = false;
            let mut damp = 1.0f64;
            for _ in 0..30 {
                let cand: Vec<f64> = t
                    .iter()
                    .zip(&step)
                    .map(|(x, s)| (x - damp * s).clamp(1e-6, 1.0 - 1e-9))
                    .collect();
                let fc = residual(&cand);
                let nc = norm2(&fc);
                if nc < best {
                    t = cand;
                    f = fc;
                    best = nc;
                    improved = true;
                    break;
                }
                damp *= 0.5;
            }
            if !improved {
                break;
            }
        }
        // success when the required moments (degrees <= k) are met
        let fin = residual(&t);
        let required_ok = degrees
            .iter()
            .zip(&fin)
            .filter(|(d, _)| **d <= k)
            .all(|(_, r)| r.abs() < 1e-11);
        if required_ok && best < 1e-20 {
            let mut distinct = t.clone();
            distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if distinct.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-9) {
                continue; // coincident nodes: not a valid N-point design
            }
            let mut nodes = Vec::with_capacity(npoints);
            for &x in distinct.iter().rev() {
                nodes.push(-x);
            }
            if center {
                nodes.push(0.0);
            }
            for &x in &distinct {
                nodes.push(x);
            }
            nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
            return Ok(nodes);
        }
    }
    Err(CubatureError::NonConvergence(format!(
        "no {npoints}-point interval design of strength {k} found after 40 restarts"
    )))
}

// ---------------------------------------------------------------------------
// Derived tight 4-design
// ---------------------------------------------------------------------------

fn derive_slice<S: Scalar>(ps: &PointSet<S>, e_index: usize) -> Result<PointSet<S>> {
    let n = ps.dim();
    let e = ps.points()[e_index].clone();
    let rho2 = ps.radius2().clone();
    // alpha^2 = 1/(n+2); select points with <x|e>/rho^2 = +alpha
    let alpha2 = S::ratio(1, n as i64 + 2);
    let mut slice = Vec::new();
    for p in ps.points() {
        let t = dot(p, &e) / rho2.clone();
        if t.cmp_real(&S::zero()) == std::cmp::Ordering::Greater {
            let t2 = t.clone() * t.clone();
            if (t2 - alpha2.clone()).is_zero_within(1e-9) {
                slice.push(p.clone());
            }
        }
    }
    if slice.is_empty() {
        return Err(CubatureError::VerificationFailed(
            "no slice at the tight inner-product level; input is not a tight 5-design".into(),
        ));
    }
    // remove the component along e; alpha rho is the slice height
    let mut flattened = Vec::with_capacity(slice.len());
    for p in &slice {
        let t = dot(p, &e) / rho2.clone();
        let q: Vec<S> = p
            .iter()
            .zip(&e)
            .map(|(pc, ec)| pc.clone() - t.clone() * ec.clone())
            .collect();
        flattened.push(q);
    }
    // squared radius rho^2 (1 - alpha^2) = rho^2 (n+1)/(n+2)
    let r2 = rho2 * S::ratio(n as i64 + 1, n as i64 + 2);
    PointSet::new_uniform(flattened, r2)
}

/// Slice a tight 5-design at inner-product level alpha = 1/sqrt(n+2) from
/// one of its points and project out that direction: the result is a tight
/// 4-design one dimension down. The input is verified first.
pub fn derived_tight4(ps: &AnyPointSet, e_index: usize) -> Result<AnyPointSet> {
    if e_index >= ps.len() {
        return Err(CubatureError::InvalidInput("base point index out of range".into()));
    }
    let rep = strength_kernel(ps, 6, DEFAULT_TOL)?;
    if rep.max_strength != 5 || !tightness(ps.len(), ps.dim(), 5) {
        return Err(CubatureError::VerificationFailed(format!(
            "input must be a tight 5-design; got strength {} with {} points",
            rep.max_strength,
            ps.len()
        )));
    }
    let out = match ps {
        AnyPointSet::Exact(e) => AnyPointSet::Exact(derive_slice(e, e_index)?),
        AnyPointSet::Float(f) => AnyPointSet::Float(derive_slice(f, e_index)?),
    };
    let rep = strength_kernel(&out, 5, DEFAULT_TOL)?;
    if rep.max_strength != 4 || !tightness(out.len(), out.dim(), 4) {
        return Err(CubatureError::VerificationFailed(format!(
            "derived slice is not a tight 4-design (strength {}, {} points)",
            rep.max_strength,
            out.len()
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Gaussian lifts
// ---------------------------------------------------------------------------

/// Exact squared radii of the two-radius Gaussian lift in dimension n:
/// (n -+ sqrt(2n))/2. They satisfy (r1 + r2)/2 = n/2 and
/// (r1^2 + r2^2)/2 = n(n+2)/4 exactly.
pub fn gauss_double_radii2(n: usize) -> (Quad, Quad) {
    let ni = n as i64;
    let r1 = Quad::rational(br(ni, 2)) - Quad::new(BigRational::zero(), br(1, 2), 2 * ni);
    let r2 = Quad::rational(br(ni, 2)) + Quad::new(BigRational::zero(), br(1, 2), 2 * ni);
    (r1, r2)
}

/// Check the defining identities of the two lift radii exactly.
pub fn gauss_radii_identities_hold(n: usize) -> bool {
    let (r1, r2) = gauss_double_radii2(n);
    let ni = n as i64;
    let sum_ok = (r1.clone() + r2.clone()) * Quad::rational(br(1, 2)) == Quad::rational(br(ni, 2));
    let sq_ok = (r1.clone() * r1 + r2.clone() * r2) * Quad::rational(br(1, 2))
        == Quad::rational(br(ni * (ni + 2), 4));
    sum_ok && sq_ok
}

/// Scale a strength >= 3 spherical design onto radius sqrt(n/2): the
/// result integrates Gaussian moments through degree 3.
pub fn gaussian_lift_low(ps: &AnyPointSet) -> Result<GaussianPointSet<f64>> {
    let rep = strength_kernel(ps, 3, DEFAULT_TOL)?;
    if rep.max_strength < 3 {
        return Err(CubatureError::VerificationFailed(format!(
            "lift needs strength >= 3, input has {}",
            rep.max_strength
        )));
    }
    let f = ps.to_float().to_unit();
    let n = f.dim();
    let r = (n as f64 / 2.0).sqrt();
    let gps = GaussianPointSet::new(
        f.points().iter().map(|p| p.iter().map(|c| c * r).collect()).collect(),
        f.weights().to_vec(),
    )?;
    let got = gauss_strength_moments(&gps, 3, 1e-10)?;
    if got < 3 {
        return Err(CubatureError::VerificationFailed(format!(
            "lifted set only integrates Gaussian moments to degree {got}"
        )));
    }
    Ok(gps)
}

/// Two-radius lift of a strength >= 5 spherical design: copies at radii
/// r1, r2 with (r1 r2)^2 = (n -+ sqrt(2n))/2, each keeping half its weight.
/// The result integrates Gaussian moments through degree 5.
pub fn gaussian_lift_double(ps: &AnyPointSet) -> Result<GaussianPointSet<f64>> {
    let rep = strength_kernel(ps, 5, DEFAULT_TOL)?;
    if rep.max_strength < 5 {
        return Err(CubatureError::VerificationFailed(format!(
            "two-radius lift needs strength >= 5, input has {}",
            rep.max_strength
        )));
    }
    let f = ps.to_float().to_unit();
    let n = f.dim();
    if !gauss_radii_identities_hold(n) {
        return Err(CubatureError::VerificationFailed(
            "lift radii identities failed".into(),
        ));
    }
    let (r1q, r2q) = gauss_double_radii2(n);
    let (r1, r2) = (r1q.to_f64().sqrt(), r2q.to_f64().sqrt());
    let mut points = Vec::with_capacity(2 * f.len());
    let mut weights = Vec::with_capacity(2 * f.len());
    for r in [r1, r2] {
        for (p, w) in f.iter() {
            points.push(p.iter().map(|c| c * r).collect());
            weights.push(w / 2.0);
        }
    }
    let gps = GaussianPointSet::new(points, weights)?;
    let got = gauss_strength_moments(&gps, 5, 1e-10)?;
    if got < 5 {
        return Err(CubatureError::VerificationFailed(format!(
            "two-radius lift only integrates Gaussian moments to degree {got}"
        )));
    }
    Ok(gps)
}

// ---------------------------------------------------------------------------
// Waring: 53 biquadrates
// ---------------------------------------------------------------------------

/// Smallest-leading four-square decomposition m = a^2 + b^2 + c^2 + d^2
/// with a <= b <= c <= d, by bounded search.
pub fn four_square(m: u64) -> [u64; 4] {
    if m == 0 {
        return [0, 0, 0, 0];
    }
    let isqrt = |v: u64| -> u64 {
        let mut r = (v as f64).sqrt() as u64;
        while r * r > v {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= v {
            r += 1;
        }
        r
    };
    let top = isqrt(m);
    for a in 0..=top {
        let ra = m - a * a;
        let tb = isqrt(ra);
        for b in a..=tb {
            let rb = ra - b * b;
            // c <= d forces 2c^2 <= rb, and then d = sqrt(rb - c^2) >= c
            let mut c = b;
            while 2 * c * c <= rb {
                let rc = rb - c * c;
                let d = isqrt(rc);
                if d * d == rc {
                    return [a, b, c, d];
                }
                c += 1;
            }
        }
    }
    unreachable!("every nonnegative integer is a sum of four squares");
}

/// Decompose N as a sum of at most 53 fourth powers: N = 6M + r, M as four
/// squares, each square's root again as four squares n, and the quartic
/// pair-sum identity turns 6 <n|n>^2 into 12 fourth powers; r ones finish.
/// Returns the fourth-power values (not their roots), zeros dropped.
pub fn waring_biquadrates(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(CubatureError::InvalidInput("need N >= 1".into()));
    }
    let m = n / 6;
    let r = n % 6;
    let mut terms: Vec<u64> = Vec::new();
    for ni in four_square(m) {
        if ni == 0 {
            continue;
        }
        // 6 ni^2 = sum over i<j and signs of (x_i + eps x_j)^4 for any
        // four-square representation x of ni
        let x = four_square(ni);
        for ij in combinations(4, 2) {
            for s in [1i64, -1] {
                let v = x[ij[0]] as i64 + s * x[ij[1]] as i64;
                let v4 = (v * v * v * v) as u64;
                if v4 > 0 {
                    terms.push(v4);
                }
            }
        }
    }
    for _ in 0..r {
        terms.push(1);
    }
    let sum: u64 = terms.iter().sum();
    if sum != n || terms.len() > 53 {
        return Err(CubatureError::VerificationFailed(format!(
            "biquadrate decomposition failed: sum {sum}, {} terms",
            terms.len()
        )));
    }
    Ok(terms)
}

// ---------------------------------------------------------------------------
// Metadata verification used by the CLI and the acceptance battery
// ---------------------------------------------------------------------------

/// Verify a catalog entry against its expected metadata with the strict
/// criterion: documented strength holds and strength + 1 fails. The Lucas
/// entry instead checks its even-degree identity with the exact moment
/// constant. Returns the strength report for display.
pub fn verify_catalog_entry(entry: &CatalogEntry) -> Result<Option<StrengthReport>> {
    if let Some(expected) = entry.expected_strength {
        let rep = strength_kernel(&entry.set, expected + 1, DEFAULT_TOL)?;
        if rep.max_strength != expected {
            return Err(CubatureError::VerificationFailed(format!(
                "'{}': strength {} != expected {expected}",
                entry.name, rep.max_strength
            )));
        }
        if rep.tight != entry.expected_tight {
            return Err(CubatureError::VerificationFailed(format!(
                "'{}': tight = {}, expected {}",
                entry.name, rep.tight, entry.expected_tight
            )));
        }
        Ok(Some(rep))
    } else if let Some(degree) = entry.covers_even_degree {
        let l = degree / 2;
        match &entry.set {
            AnyPointSet::Exact(ps) => {
                let ps = ps.normalized();
                let c = Quad::rational(moment_constant_sphere(ps.dim(), l)?);
                let mut lhs: MPoly<Quad> = MPoly::zero(ps.coord_len());
                for (p, w) in ps.iter() {
                    lhs = lhs.add(&MPoly::linear_form_power(p, degree as u16).scale(w));
                }
                let rho2l = ps.radius2().powu(l as u32);
                let rhs = MPoly::<Quad>::norm_squared(ps.coord_len())
                    .powu(l as u32)
                    .scale(&(c * rho2l));
                if !lhs.sub(&rhs).is_zero() {
                    return Err(CubatureError::VerificationFailed(format!(
                        "'{}': degree-{degree} identity does not hold exactly",
                        entry.name
                    )));
                }
                Ok(None)
            }
            AnyPointSet::Float(_) => Err(CubatureError::InvalidInput(
                "even-degree coverage check expects an exact set".into(),
            )),
        }
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::strength_moments;

    #[test]
    fn identities_validate() {
        for f in [
            lucas_identity(),
            liouville_identity(),
            kempner_identity(),
            hurwitz_identity(),
            schur_identity(),
            pair_sum_quartic_identity(),
        ] {
            f.validate().unwrap_or_else(|e| panic!("{}: {e}", f.name));
        }
    }

    #[test]
    fn broken_identity_rejected() {
        let mut f = liouville_identity();
        f.rhs_constant = 23;
        assert!(f.validate().is_err());
        let degenerate = IdentityFamily {
            name: "axes-only",
            ambient_dim: 3,
            degree: 4,
            families: vec![(1, family_axes(3))],
            rhs_constant: 1,
        };
        assert!(identity_to_pointset(&degenerate).is_err());
    }

    #[test]
    fn lucas_weights_exact() {
        let entry = catalog("lucas_s2").unwrap();
        match &entry.set {
            AnyPointSet::Exact(ps) => {
                assert_eq!(ps.len(), 7);
                assert_eq!(ps.weights()[0].as_rational().unwrap(), &br(8, 60));
                assert_eq!(ps.weights()[3].as_rational().unwrap(), &br(9, 60));
            }
            _ => panic!("lucas set should be exact"),
        }
        verify_catalog_entry(&entry).unwrap();
    }

    #[test]
    fn liouville_is_uniform_24() {
        let entry = catalog("liouville_s3").unwrap();
        match &entry.set {
            AnyPointSet::Exact(ps) => {
                assert_eq!(ps.len(), 24);
                for w in ps.weights() {
                    assert_eq!(w.as_rational().unwrap(), &br(1, 24));
                }
            }
            _ => panic!("liouville set should be exact"),
        }
    }

    #[test]
    fn small_catalog_strengths() {
        for name in ["simplex(3)", "octahedron", "cube", "icosahedron", "polygon(4)"] {
            let entry = catalog(name).unwrap();
            verify_catalog_entry(&entry).unwrap();
        }
    }

    #[test]
    fn kempner_strength_seven_by_moments() {
        let entry = catalog("kempner_s3").unwrap();
        match &entry.set {
            AnyPointSet::Exact(ps) => {
                let rep = strength_moments(ps, 8, 1e-9).unwrap();
                assert_eq!(rep.max_strength, 7);
            }
            _ => panic!("kempner set should be exact"),
        }
    }

    #[test]
    fn waring_small_and_examples() {
        assert_eq!(waring_biquadrates(1).unwrap(), vec![1]);
        for n in [2u64, 5, 16, 81, 150, 13792, 99991] {
            let terms = waring_biquadrates(n).unwrap();
            assert!(terms.len() <= 53, "N={n}: {} terms", terms.len());
            assert_eq!(terms.iter().sum::<u64>(), n, "N={n}");
            for t in terms {
                let root = (t as f64).powf(0.25).round() as u64;
                assert_eq!(root.pow(4), t, "N={n}: {t} not a fourth power");
            }
        }
    }

    #[test]
    fn four_square_exact() {
        for m in [0u64, 1, 2, 3, 7, 15, 25, 112, 4097] {
            let s = four_square(m);
            assert_eq!(s.iter().map(|x| x * x).sum::<u64>(), m);
        }
    }

    #[test]
    fn interval_design_examples() {
        // flat measure, 4 symmetric nodes matching moments through 3
        let nodes = interval_design_search(3, 0, 4, 1).unwrap();
        assert_eq!(nodes.len(), 4);
        let mu = interval_measure_moments(0, 4);
        for d in 1..=3usize {
            let m: f64 = nodes.iter().map(|z| z.powi(d as i32)).sum::<f64>() / 4.0;
            assert!((m - mu[d].to_f64().unwrap()).abs() < 1e-11);
        }
        // two nodes for strength 1 exist and are canonicalized
        let two = interval_design_search(1, 0, 2, 1).unwrap();
        assert!((two[0] + two[1]).abs() < 1e-12);
        // nine nodes reach strength 9 for the flat measure
        let nine = interval_design_search(9, 0, 9, 1).unwrap();
        let mu = interval_measure_moments(0, 9);
        for d in 1..=9usize {
            let m: f64 = nine.iter().map(|z| z.powi(d as i32)).sum::<f64>() / 9.0;
            assert!((m - mu[d].to_f64().unwrap()).abs() < 1e-10, "degree {d}");
        }
    }

    #[test]
    fn product_design_square_times_interval() {
        let square = match polygon(4).unwrap() {
            AnyPointSet::Exact(e) => e.to_float(),
            AnyPointSet::Float(f) => f,
        };
        let z = interval_design_search(3, 0, 2, 1).unwrap();
        let x = product_design(&square, &z, 3).unwrap();
        assert_eq!(x.len(), 8);
        let rep = strength_kernel_float(&x, 3, DEFAULT_TOL).unwrap();
        assert!(rep.max_strength >= 3);
    }

    #[test]
    fn derived_pentagon_from_icosahedron() {
        let ico = catalog("icosahedron").unwrap().set;
        let derived = derived_tight4(&ico, 0).unwrap();
        assert_eq!(derived.len(), 5);
        assert_eq!(derived.dim(), 2);
        // rejected for a non-tight-5 input
        let oct = catalog("octahedron").unwrap().set;
        assert!(derived_tight4(&oct, 0).is_err());
    }

    #[test]
    fn gaussian_lift_examples() {
        let oct = catalog("octahedron").unwrap().set;
        let low = gaussian_lift_low(&oct).unwrap();
        // degree-2 monomial check: (1/N) sum x1^2 = 1/2
        let m2: f64 = low
            .points
            .iter()
            .zip(&low.weights)
            .map(|(p, w)| w * p[0] * p[0])
            .sum::<f64>()
            / low.weights.iter().sum::<f64>();
        assert!((m2 - 0.5).abs() < 1e-12);
        assert!(gauss_radii_identities_hold(3));
        assert!(gauss_radii_identities_hold(8)); // sqrt(16) = 4 folds to rational
        let ico = catalog("icosahedron").unwrap().set;
        let double = gaussian_lift_double(&ico).unwrap();
        assert_eq!(double.len(), 24);
    }
}
