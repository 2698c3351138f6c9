//! Integral lattices with exact arithmetic over denominators 2^k: standard
//! families (Z^n, D_n, the Witt lattices Gamma_n with Gamma_8 the E8 root
//! lattice), complete shell enumeration, design strength of normalized
//! shells, Voronoi-style eutaxy/perfection tests, and the index-2 neighbor
//! construction with its reflection and mod-2 class bookkeeping in rank 8.
//!
//! A lattice is stored as an integer basis-numerator matrix over a power-of-
//! two denominator; every predicate (integral, even, unimodular, equality,
//! membership) is decided exactly. Shell enumeration walks the ellipsoid
//! with a floating-point triangular bound but admits vectors only after an
//! exact integer norm check, and sizes can be cross-checked against theta
//! coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::budget_cap;
use crate::linalg;
use crate::mpoly::{harmonic_projection, MPoly};
use crate::scalar::{br, Quad, Scalar};
use crate::verify::{
    kernel_residuals_from_counts, strength_from_exact_residuals, tightness, Criterion,
    StrengthReport,
};
use crate::{CubatureError, Result};

// ---------------------------------------------------------------------------
// Core type
// ---------------------------------------------------------------------------

/// A full-rank lattice in R^n given by basis rows bnum[i] / den, with den a
/// power of two. All derived data (Gram matrix, flags) is exact.
#[derive(Clone, Debug)]
pub struct IntegralLattice {
    name: String,
    den: i64,
    bnum: Vec<Vec<i64>>,
}

impl IntegralLattice {
    pub fn new(name: impl Into<String>, bnum: Vec<Vec<i64>>, den: i64) -> Result<Self> {
        let n = bnum.len();
        if n == 0 || bnum.iter().any(|r| r.len() != n) {
            return Err(CubatureError::InvalidInput("basis must be square".into()));
        }
        if den < 1 || (den & (den - 1)) != 0 || den > 1 << 20 {
            return Err(CubatureError::InvalidInput(
                "denominator must be a power of two within range".into(),
            ));
        }
        let mut lat = IntegralLattice { name: name.into(), den, bnum };
        lat.reduce();
        let det = linalg::int_det(&lat.bnum_i128());
        if det.is_zero() {
            return Err(CubatureError::InvalidInput("basis is singular".into()));
        }
        Ok(lat)
    }

    /// Divide out common powers of two shared by every numerator and den.
    fn reduce(&mut self) {
        while self.den % 2 == 0
            && self.bnum.iter().all(|r| r.iter().all(|&v| v % 2 == 0))
        {
            self.den /= 2;
            for r in self.bnum.iter_mut() {
                for v in r.iter_mut() {
                    *v /= 2;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.bnum.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn basis_numerators(&self) -> &[Vec<i64>] {
        &self.bnum
    }

    fn bnum_i128(&self) -> Vec<Vec<i128>> {
        self.bnum
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect()
    }

    /// Numerator Gram matrix: (den^2 times) the true Gram matrix.
    pub fn gram_scaled(&self) -> Vec<Vec<i128>> {
        let n = self.rank();
        let mut g = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in i..n {
                let s: i128 = self.bnum[i]
                    .iter()
                    .zip(&self.bnum[j])
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                g[i][j] = s;
                g[j][i] = s;
            }
        }
        g
    }

    /// Exact Gram matrix of the basis.
    pub fn gram(&self) -> Vec<Vec<BigRational>> {
        let d2 = BigInt::from(self.den) * BigInt::from(self.den);
        self.gram_scaled()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| BigRational::new(BigInt::from(v), d2.clone()))
                    .collect()
            })
            .collect()
    }

    /// Integer Gram matrix; errors when the lattice is not integral.
    pub fn gram_int(&self) -> Result<Vec<Vec<i64>>> {
        let d2 = (self.den * self.den) as i128;
        let gs = self.gram_scaled();
        let mut out = Vec::with_capacity(gs.len());
        for row in gs {
            let mut r = Vec::with_capacity(row.len());
            for v in row {
                if v % d2 != 0 {
                    return Err(CubatureError::InvalidInput(
                        "lattice is not integral".into(),
                    ));
                }
                r.push((v / d2) as i64);
            }
            out.push(r);
        }
        Ok(out)
    }

    pub fn is_integral(&self) -> bool {
        self.gram_int().is_ok()
    }

    /// Even: integral with every basis norm even; by the parity of the
    /// expansion <x|x> = sum a_i^2 <b_i|b_i> + 2 sum_{i<j} a_i a_j <b_i|b_j>
    /// this makes every vector norm even.
    pub fn is_even(&self) -> bool {
        match self.gram_int() {
            Ok(g) => (0..g.len()).all(|i| g[i][i] % 2 == 0),
            Err(_) => false,
        }
    }

    /// det(Gram) = 1, decided through |det(basis numerators)| = den^rank.
    pub fn is_unimodular(&self) -> bool {
        let det = linalg::int_det(&self.bnum_i128());
        let mut pow = BigInt::one();
        for _ in 0..self.rank() {
            pow *= BigInt::from(self.den);
        }
        det.abs() == pow
    }

    /// Canonical form at a common scale; equal lattices share it.
    fn canonical_at_scale(&self, scale: i64) -> Vec<Vec<i128>> {
        let f = (scale / self.den) as i128;
        let m: Vec<Vec<i128>> = self
            .bnum
            .iter()
            .map(|r| r.iter().map(|&v| v as i128 * f).collect())
            .collect();
        linalg::hnf(&m)
    }

    pub fn same_lattice(&self, other: &IntegralLattice) -> bool {
        if self.rank() != other.rank() {
            return false;
        }
        let scale = self.den.max(other.den);
        self.canonical_at_scale(scale) == other.canonical_at_scale(scale)
    }

    /// Inverse of the basis matrix (rows = basis vectors), exact.
    fn basis_inverse(&self) -> Vec<Vec<BigRational>> {
        let n = self.rank();
        // row k of B^{-1} solves a.B = e_k
        let bt: Vec<Vec<Quad>> = (0..n)
            .map(|j| (0..n).map(|i| Quad::rational(br(self.bnum[i][j], self.den))).collect())
            .collect();
        let mut inv = vec![vec![BigRational::zero(); n]; n];
        for k in 0..n {
            let mut rhs = vec![Quad::int(0); n];
            rhs[k] = Quad::int(1);
            let x = linalg::solve(&bt, &rhs, 0.0).expect("basis is invertible");
            for (i, v) in x.into_iter().enumerate() {
                inv[k][i] = v
                    .as_rational()
                    .expect("rational basis inverse")
                    .clone();
            }
        }
        inv
    }

    /// Coefficients a with a.B = v for a Euclidean vector v = vnum / vden.
    pub fn coords_of(&self, vnum: &[i64], vden: i64) -> Result<Vec<BigRational>> {
        if vnum.len() != self.rank() {
            return Err(CubatureError::InvalidInput("vector length mismatch".into()));
        }
        let inv = self.basis_inverse();
        Ok(coords_with_inverse(&inv, vnum, vden))
    }

    /// Integer coordinates of a lattice member; errors when v is outside.
    pub fn integer_coords(&self, vnum: &[i64], vden: i64) -> Result<Vec<i64>> {
        let a = self.coords_of(vnum, vden)?;
        let mut out = Vec::with_capacity(a.len());
        for c in a {
            if !c.is_integer() {
                return Err(CubatureError::InvalidInput(
                    "vector is not a lattice member".into(),
                ));
            }
            out.push(c.to_integer().to_i64().ok_or_else(|| {
                CubatureError::InvalidInput("coordinate overflow".into())
            })?);
        }
        Ok(out)
    }

    pub fn contains(&self, vnum: &[i64], vden: i64) -> bool {
        self.integer_coords(vnum, vden).is_ok()
    }

    /// Gram matrix as a text block (one row per line, rational entries).
    pub fn gram_text(&self) -> String {
        let mut out = format!("gram rank={} name={}\n", self.rank(), self.name);
        for row in self.gram() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out.push_str(&format!(
            "integral={} even={} unimodular={}\n",
            self.is_integral(),
            self.is_even(),
            self.is_unimodular()
        ));
        out
    }
}

fn coords_with_inverse(inv: &[Vec<BigRational>], vnum: &[i64], vden: i64) -> Vec<BigRational> {
    let n = inv.len();
    (0..n)
        .map(|j| {
            let mut s = BigRational::zero();
            for (k, &v) in vnum.iter().enumerate() {
                if v != 0 {
                    s += BigRational::from(BigInt::from(v)) * inv[k][j].clone();
                }
            }
            s / BigRational::from(BigInt::from(vden))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Standard lattices
// ---------------------------------------------------------------------------

fn lattice_from_generators(
    name: &str,
    gens: Vec<Vec<i64>>,
    den: i64,
    n: usize,
) -> Result<IntegralLattice> {
    let m: Vec<Vec<i128>> = gens
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let h = linalg::hnf(&m);
    if h.len() != n {
        return Err(CubatureError::InvalidInput(format!(
            "generators of '{name}' span rank {} != {n}",
            h.len()
        )));
    }
    let bnum: Vec<Vec<i64>> = h
        .iter()
        .map(|r| r.iter().map(|&v| v as i64).collect())
        .collect();
    IntegralLattice::new(name, bnum, den)
}

fn dn_generators(n: usize) -> Vec<Vec<i64>> {
    let mut gens = Vec::new();
    let mut first = vec![0i64; n];
    first[0] = 1;
    first[1] = 1;
    gens.push(first);
    for i in 0..n - 1 {
        let mut v = vec![0i64; n];
        v[i] = 1;
        v[i + 1] = -1;
        gens.push(v);
    }
    gens
}

/// Standard lattices by name: "Zn(n)", "Dn(n)", "Witt(n)" (4 | n), "E8".
pub fn standard(name: &str) -> Result<IntegralLattice> {
    let (base, arg) = match name.find('(') {
        Some(open) if name.ends_with(')') => {
            let v: usize = name[open + 1..name.len() - 1]
                .parse()
                .map_err(|_| CubatureError::Parse(format!("bad lattice parameter in '{name}'")))?;
            (&name[..open], Some(v))
        }
        Some(_) => return Err(CubatureError::Parse(format!("malformed lattice name '{name}'"))),
        None => (name, None),
    };
    match (base, arg) {
        ("Zn", Some(n)) if n >= 1 => {
            let mut b = vec![vec![0i64; n]; n];
            for (i, row) in b.iter_mut().enumerate() {
                row[i] = 1;
            }
            IntegralLattice::new(name, b, 1)
        }
        ("Dn", Some(n)) if n >= 2 => lattice_from_generators(name, dn_generators(n), 1, n),
        ("Witt", Some(n)) if n >= 4 && n % 4 == 0 => {
            let mut gens: Vec<Vec<i64>> = dn_generators(n)
                .into_iter()
                .map(|r| r.into_iter().map(|v| 2 * v).collect())
                .collect();
            gens.push(vec![1i64; n]);
            lattice_from_generators(name, gens, 2, n)
        }
        ("E8", None) => {
            let mut lat = standard("Witt(8)")?;
            lat.name = "E8".into();
            Ok(lat)
        }
        _ => Err(CubatureError::InvalidInput(format!(
            "unknown or invalid lattice '{name}' (use Zn(n), Dn(n), Witt(4k), E8)"
        ))),
    }
}

pub const STANDARD_NAMES: &[&str] = &["Zn(n)", "Dn(n)", "Witt(n)", "E8"];

// ---------------------------------------------------------------------------
// Shell enumeration
// ---------------------------------------------------------------------------

/// All lattice vectors of one squared norm, as Euclidean numerators over
/// `denom`, sorted lexicographically (so closed under negation by symmetry
/// of the enumeration, which tests assert).
#[derive(Clone, Debug)]
pub struct Shell {
    pub norm: i64,
    pub denom: i64,
    pub vectors: Vec<Vec<i64>>,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_negation_closed(&self) -> bool {
        let set: std::collections::BTreeSet<&Vec<i64>> = self.vectors.iter().collect();
        self.vectors
            .iter()
            .all(|v| set.contains(&v.iter().map(|&c| -c).collect::<Vec<i64>>()))
    }
}

struct ShellSearch<'a> {
    n: usize,
    d: Vec<f64>,
    u: Vec<Vec<f64>>,
    gs: &'a [Vec<i128>],
    mmax: i64,
    den2: i128,
    visits: usize,
    cap: usize,
    x: Vec<i64>,
    buckets: BTreeMap<i64, Vec<Vec<i64>>>,
    bnum: &'a [Vec<i64>],
}

impl ShellSearch<'_> {
    fn run(&mut self) -> Result<()> {
        let budget = self.mmax as f64 + 0.5;
        self.descend(self.n, budget)
    }

    /// Enumerate x_i for i < level given the remaining quadratic budget.
    fn descend(&mut self, level: usize, remaining: f64) -> Result<()> {
        self.visits += 1;
        if self.visits > self.cap {
            return Err(CubatureError::Budget(format!(
                "shell enumeration exceeded {} nodes",
                self.cap
            )));
        }
        if level == 0 {
            self.admit();
            return Ok(());
        }
        let i = level - 1;
        let center: f64 = (i + 1..self.n).map(|j| self.u[i][j] * self.x[j] as f64).sum();
        let half = (remaining.max(0.0) / self.d[i]).sqrt() + 1e-9;
        let lo = (-center - half).ceil() as i64;
        let hi = (-center + half).floor() as i64;
        for xi in lo..=hi {
            self.x[i] = xi;
            let t = xi as f64 + center;
            let used = self.d[i] * t * t;
            self.descend(i, remaining - used)?;
        }
        self.x[i] = 0;
        Ok(())
    }

    /// Exact norm filter and bucket insert.
    fn admit(&mut self) {
        if self.x.iter().all(|&v| v == 0) {
            return;
        }
        let mut scaled: i128 = 0;
        for i in 0..self.n {
            if self.x[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if self.x[j] != 0 {
                    scaled += self.x[i] as i128 * self.x[j] as i128 * self.gs[i][j];
                }
            }
        }
        if scaled <= 0 || scaled % self.den2 != 0 {
            return;
        }
        let norm = (scaled / self.den2) as i64;
        if norm > self.mmax {
            return;
        }
        let v: Vec<i64> = (0..self.n)
            .map(|j| {
                self.x
                    .iter()
                    .zip(self.bnum)
                    .map(|(&a, row)| a * row[j])
                    .sum()
            })
            .collect();
        self.buckets.entry(norm).or_default().push(v);
    }
}

impl IntegralLattice {
    /// Enumerate all nonzero vectors of squared norm <= mmax, bucketed by
    /// norm. Complete by construction (exact filter inside a float bound
    /// with slack); guarded by the node budget.
    pub fn shells_upto(&self, mmax: i64) -> Result<BTreeMap<i64, Vec<Vec<i64>>>> {
        if mmax < 1 {
            return Err(CubatureError::InvalidInput("shell norm must be >= 1".into()));
        }
        let n = self.rank();
        let gs = self.gram_scaled();
        let den2 = (self.den * self.den) as i128;
        // exact LDL bound data via float; positive definiteness required
        let g: Vec<Vec<f64>> = gs
            .iter()
            .map(|r| r.iter().map(|&v| v as f64 / den2 as f64).collect())
            .collect();
        let mut d = vec![0.0f64; n];
        let mut u = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            let mut di = g[i][i];
            for k in 0..i {
                di -= d[k] * u[k][i] * u[k][i];
            }
            if di <= 1e-12 {
                return Err(CubatureError::InvalidInput(
                    "Gram matrix is not positive definite".into(),
                ));
            }
            d[i] = di;
            for j in (i + 1)..n {
                let mut v = g[i][j];
                for k in 0..i {
                    v -= d[k] * u[k][i] * u[k][j];
                }
                u[i][j] = v / di;
            }
        }
        let mut search = ShellSearch {
            n,
            d,
            u,
            gs: &gs,
            mmax,
            den2,
            visits: 0,
            cap: budget_cap(100_000_000),
            x: vec![0; n],
            buckets: BTreeMap::new(),
            bnum: &self.bnum,
        };
        search.run()?;
        let mut buckets = search.buckets;
        for v in buckets.values_mut() {
            v.sort();
        }
        Ok(buckets)
    }

    pub fn shell(&self, m: i64) -> Result<Shell> {
        let buckets = self.shells_upto(m)?;
        Ok(Shell {
            norm: m,
            denom: self.den,
            vectors: buckets.get(&m).cloned().unwrap_or_default(),
        })
    }

    /// Shell sizes |Lambda_m| for m = 0..=mmax (theta coefficients).
    pub fn theta_coefficients(&self, mmax: i64) -> Result<Vec<u64>> {
        let buckets = self.shells_upto(mmax)?;
        let mut out = vec![0u64; mmax as usize + 1];
        out[0] = 1;
        for (m, v) in buckets {
            out[m as usize] = v.len() as u64;
        }
        Ok(out)
    }

    /// Smallest nonzero squared norm.
    pub fn min_norm(&self) -> Result<i64> {
        let g = self.gram_scaled();
        let den2 = (self.den * self.den) as i128;
        let bound = (0..self.rank())
            .map(|i| g[i][i])
            .min()
            .expect("nonempty basis");
        let bound = (bound / den2) as i64 + 1;
        for m in 1..=bound {
            if !self.shell(m)?.is_empty() {
                return Ok(m);
            }
        }
        Err(CubatureError::InvalidInput(
            "no vector found within the basis-norm bound".into(),
        ))
    }

    /// A norm-1 vector u makes the lattice split as Zu + (u-orthogonal
    /// part): verified by checking b - <b|u> u stays in the lattice for
    /// every basis vector b. Returns false when shell(1) is empty.
    pub fn splits_off_unit(&self) -> Result<bool> {
        let s1 = self.shell(1)?;
        let Some(unum) = s1.vectors.first() else {
            return Ok(false);
        };
        let den2 = self.den * self.den;
        for b in &self.bnum {
            // <b|u> = (bnum . unum) / den^2, an integer for integral lattices
            let dp: i64 = b.iter().zip(unum).map(|(&a, &c)| a * c).sum();
            if dp % den2 != 0 {
                return Ok(false);
            }
            let t = dp / den2;
            let w: Vec<i64> = b.iter().zip(unum).map(|(&a, &c)| a - t * c).collect();
            if !self.contains(&w, self.den) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// Shell designs
// ---------------------------------------------------------------------------

/// Exact design strength of the normalized shell: inner products <x|y>/m
/// are rational, so the kernel residuals are computed exactly from the
/// integer inner-product distribution.
pub fn shell_design_strength(
    lat: &IntegralLattice,
    m: i64,
    k_max: usize,
) -> Result<StrengthReport> {
    let shell = lat.shell(m)?;
    if shell.is_empty() {
        return Err(CubatureError::InvalidInput(format!("shell {m} is empty")));
    }
    let rows: Vec<Vec<Quad>> = shell
        .vectors
        .iter()
        .map(|v| v.iter().map(|&c| Quad::int(c)).collect())
        .collect();
    let span = linalg::rank(&rows, 0.0);
    if span < 2 {
        return Err(CubatureError::InvalidInput(
            "shell spans less than two dimensions".into(),
        ));
    }
    let npts = shell.len();
    let cap = budget_cap(4_000_000_000);
    if npts * npts * lat.rank() > cap {
        return Err(CubatureError::Budget(format!(
            "shell pair scan {}^2 x {} exceeds budget {cap}",
            npts,
            lat.rank()
        )));
    }
    let norm_num = m * lat.den * lat.den;
    let counts: BTreeMap<i64, u64> = shell
        .vectors
        .par_iter()
        .enumerate()
        .fold(BTreeMap::new, |mut acc: BTreeMap<i64, u64>, (i, vi)| {
            for vj in shell.vectors.iter().skip(i) {
                let mut dp: i64 = 0;
                for (a, b) in vi.iter().zip(vj) {
                    dp += a * b;
                }
                let same = std::ptr::eq(vi, vj);
                *acc.entry(dp).or_insert(0) += if same { 1 } else { 2 };
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let counts: Vec<(i64, u64)> = counts.into_iter().collect();
    let residuals = kernel_residuals_from_counts(span, k_max, &counts, norm_num, npts)?;
    let (strength, capped) = strength_from_exact_residuals(&residuals);
    Ok(StrengthReport {
        max_strength: strength,
        residuals: residuals
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, r)| (j, r.to_f64().abs()))
            .collect(),
        tight: tightness(npts, span, strength),
        criterion: Criterion::Kernel,
        exact: true,
        tol: 0.0,
        capped,
    })
}

// ---------------------------------------------------------------------------
// Eutaxy, perfection, extremeness
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VoronoiReport {
    pub perfect: bool,
    pub eutactic: bool,
    pub strongly_perfect: bool,
    pub extreme: bool,
    pub min_norm: i64,
    pub short_shell_size: usize,
}

/// Half shell: one representative per antipodal pair (the lexicographically
/// larger of v, -v).
fn half_shell(shell: &Shell) -> Vec<Vec<i64>> {
    shell
        .vectors
        .iter()
        .filter(|v| {
            let neg: Vec<i64> = v.iter().map(|&c| -c).collect();
            **v > neg
        })
        .cloned()
        .collect()
}

/// Perfection, eutaxy, strong perfection, extremeness of the short shell.
///
/// perfect: the projections lambda lambda^T span the full space of
/// symmetric matrices. eutactic: some strictly positive weights w make
/// sum w lambda lambda^T a multiple of the identity, decided by an exact
/// interior-point feasibility LP (maximize the margin t with w = w' + t).
/// strongly perfect: the short shell is a 5-design with uniform weights.
/// extreme: perfect and eutactic.
pub fn voronoi_tests(lat: &IntegralLattice) -> Result<VoronoiReport> {
    let n = lat.rank();
    let m = lat.min_norm()?;
    let shell = lat.shell(m)?;
    let half = half_shell(&shell);
    if half.len() * 2 != shell.len() {
        return Err(CubatureError::VerificationFailed(
            "short shell is not negation-closed".into(),
        ));
    }
    // perfection: rank of vectorized projections
    let cols = n * (n + 1) / 2;
    let rows: Vec<Vec<Quad>> = half
        .iter()
        .map(|v| {
            let mut row = Vec::with_capacity(cols);
            for i in 0..n {
                for j in i..n {
                    row.push(Quad::int(v[i] * v[j]));
                }
            }
            row
        })
        .collect();
    let perfect = linalg::rank(&rows, 0.0) == cols;
    // eutaxy LP: sum_p (w'_p + t) A_p = I, w' >= 0, t >= 0, maximize t
    let pairs = half.len();
    let mut a = vec![vec![BigRational::zero(); pairs + 1]; cols];
    let mut b = vec![BigRational::zero(); cols];
    let mut row = 0usize;
    for i in 0..n {
        for j in i..n {
            for (p, v) in half.iter().enumerate() {
                let e = BigRational::from(BigInt::from(v[i] * v[j]));
                a[row][pairs] += e.clone();
                a[row][p] = e;
            }
            if i == j {
                b[row] = BigRational::one();
            }
            row += 1;
        }
    }
    let mut c = vec![BigRational::zero(); pairs + 1];
    c[pairs] = BigRational::one();
    let eutactic = match linalg::simplex_max(&a, &b, &c) {
        Some((opt, _)) => opt.is_positive(),
        None => false,
    };
    let strongly_perfect = shell_design_strength(lat, m, 6)?.max_strength >= 5;
    Ok(VoronoiReport {
        perfect,
        eutactic,
        strongly_perfect,
        extreme: perfect && eutactic,
        min_norm: m,
        short_shell_size: shell.len(),
    })
}

// ---------------------------------------------------------------------------
// Neighbors
// ---------------------------------------------------------------------------

/// Integer norm of a lattice member given by numerators over the lattice
/// denominator.
fn member_norm(lat: &IntegralLattice, vnum: &[i64]) -> Result<i64> {
    let den2 = (lat.den * lat.den) as i128;
    let s: i128 = vnum.iter().map(|&v| v as i128 * v as i128).sum();
    if s % den2 != 0 {
        return Err(CubatureError::InvalidInput("norm is not an integer".into()));
    }
    Ok((s / den2) as i64)
}

/// The index-2 neighbor M^z = M_z + Z (z/2) of an even unimodular lattice,
/// where M_z is the kernel of m -> <m|z> mod 2. Requires z in M, z not in
/// 2M, and <z|z> divisible by 4. The result is integral unimodular, even
/// exactly when <z|z> is divisible by 8.
pub fn neighbor(lat: &IntegralLattice, znum: &[i64]) -> Result<IntegralLattice> {
    if !(lat.is_even() && lat.is_unimodular()) {
        return Err(CubatureError::InvalidInput(
            "neighbor step needs an even unimodular lattice".into(),
        ));
    }
    let coords = lat.integer_coords(znum, lat.den)?;
    if coords.iter().all(|c| c % 2 == 0) {
        return Err(CubatureError::InvalidInput("z lies in 2M".into()));
    }
    let norm = member_norm(lat, znum)?;
    if norm % 4 != 0 {
        return Err(CubatureError::InvalidInput(
            "z must have norm divisible by 4".into(),
        ));
    }
    let n = lat.rank();
    let g = lat.gram_int()?;
    // phi(b_i) = <b_i|z> mod 2 computed through integer coordinates
    let phi: Vec<i64> = (0..n)
        .map(|i| {
            let dp: i64 = (0..n).map(|j| g[i][j] * coords[j]).sum();
            dp.rem_euclid(2)
        })
        .collect();
    let Some(p) = phi.iter().position(|&v| v == 1) else {
        return Err(CubatureError::InvalidInput(
            "z/2 is already in the dual; z lies in 2M".into(),
        ));
    };
    // generators of M^z scaled to denominator 2 den
    let newden = 2 * lat.den;
    let mut gens: Vec<Vec<i64>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        if i == p {
            // 2 b_p, scaled by 2
            gens.push(lat.bnum[p].iter().map(|&v| 4 * v).collect());
        } else {
            let row: Vec<i64> = lat.bnum[i]
                .iter()
                .zip(&lat.bnum[p])
                .map(|(&a, &b)| 2 * (a - phi[i] * b))
                .collect();
            gens.push(row);
        }
    }
    gens.push(znum.to_vec()); // z/2 = znum / (2 den)
    let out = lattice_from_generators(&format!("{}^z", lat.name), gens, newden, n)?;
    if !(out.is_integral() && out.is_unimodular()) {
        return Err(CubatureError::VerificationFailed(
            "neighbor is not integral unimodular".into(),
        ));
    }
    if out.is_even() != (norm % 8 == 0) {
        return Err(CubatureError::VerificationFailed(
            "neighbor parity disagrees with the norm of z mod 8".into(),
        ));
    }
    Ok(out)
}

/// Observed and predicted equality of two neighbors: M^z = M^z' exactly
/// when z - z' lands in 2M and the two norms agree mod 8.
pub fn neighbor_equality_rule(
    lat: &IntegralLattice,
    z1: &[i64],
    z2: &[i64],
) -> Result<(bool, bool)> {
    let n1 = neighbor(lat, z1)?;
    let n2 = neighbor(lat, z2)?;
    let observed = n1.same_lattice(&n2);
    let diff: Vec<i64> = z1.iter().zip(z2).map(|(&a, &b)| a - b).collect();
    let in_2m = match lat.integer_coords(&diff, lat.den) {
        Ok(c) => c.iter().all(|v| v % 2 == 0),
        Err(_) => false,
    };
    let predicted = in_2m && (member_norm(lat, z1)? - member_norm(lat, z2)?).rem_euclid(8) == 0;
    Ok((observed, predicted))
}

// ---------------------------------------------------------------------------
// Mod-2 classes and fibers (rank 8 experiments)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModTwoSplit {
    /// Always 1.
    pub zero: usize,
    /// Classes with representative norm 2 mod 4.
    pub root_type: usize,
    /// Nonzero classes with representative norm 0 mod 4.
    pub isotropic: usize,
}

/// Classify M/2M by the parity class of the norm (well defined mod 4 for
/// even lattices).
pub fn mod_two_class_split(lat: &IntegralLattice) -> Result<ModTwoSplit> {
    let n = lat.rank();
    if n > 16 {
        return Err(CubatureError::Budget("mod-2 class scan capped at rank 16".into()));
    }
    if !lat.is_even() {
        return Err(CubatureError::InvalidInput(
            "mod-2 norm classes need an even lattice".into(),
        ));
    }
    let g = lat.gram_int()?;
    let mut root_type = 0usize;
    let mut isotropic = 0usize;
    for mask in 1u32..(1 << n) {
        let eps: Vec<i64> = (0..n).map(|i| (mask >> i & 1) as i64).collect();
        let mut norm = 0i64;
        for i in 0..n {
            if eps[i] == 1 {
                for j in 0..n {
                    if eps[j] == 1 {
                        norm += g[i][j];
                    }
                }
            }
        }
        if norm.rem_euclid(4) == 0 {
            isotropic += 1;
        } else {
            root_type += 1;
        }
    }
    Ok(ModTwoSplit { zero: 1, root_type, isotropic })
}

/// Class bits (coordinates mod 2) of shell vectors; used for the root
/// pairing and the norm-4 fiber census.
fn shell_classes(lat: &IntegralLattice, m: i64) -> Result<BTreeMap<Vec<u8>, usize>> {
    let shell = lat.shell(m)?;
    let inv = lat.basis_inverse();
    let mut classes: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for v in &shell.vectors {
        let coords = coords_with_inverse(&inv, v, lat.den);
        let mut bits = Vec::with_capacity(coords.len());
        for c in coords {
            if !c.is_integer() {
                return Err(CubatureError::VerificationFailed(
                    "shell vector outside its own lattice".into(),
                ));
            }
            let b = c.to_integer();
            bits.push(if (b % BigInt::from(2)).is_zero() { 0u8 } else { 1u8 });
        }
        *classes.entry(bits).or_insert(0) += 1;
    }
    Ok(classes)
}

/// Distinct mod-2 classes met by the norm-2 shell and the largest number
/// of roots sharing one class (2 means exactly the pairs +-r).
pub fn root_class_pairing(lat: &IntegralLattice) -> Result<(usize, usize)> {
    let classes = shell_classes(lat, 2)?;
    let max = classes.values().copied().max().unwrap_or(0);
    Ok((classes.len(), max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub classes: usize,
    pub min_fiber: usize,
    pub max_fiber: usize,
    pub total: usize,
}

/// Census of the map from the norm-4 shell to M/2M.
pub fn shell4_fiber_report(lat: &IntegralLattice) -> Result<FiberReport> {
    let classes = shell_classes(lat, 4)?;
    let min = classes.values().copied().min().unwrap_or(0);
    let max = classes.values().copied().max().unwrap_or(0);
    let total = classes.values().sum();
    Ok(FiberReport { classes: classes.len(), min_fiber: min, max_fiber: max, total })
}

// ---------------------------------------------------------------------------
// Reflections
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ReflectionOutcome {
    pub image: IntegralLattice,
    /// z = x - 2r over the input lattice denominator.
    pub znum: Vec<i64>,
    pub matches_neighbor: bool,
}

/// Image of the lattice under the reflection s_x(v) = v - (<v|x>/2) x for
/// a norm-4 vector x, together with the even neighbor M^z for z = x - 2r
/// (r a root with <r|x> = 1) and the exact equality check between the two.
pub fn reflection_image(lat: &IntegralLattice, xnum: &[i64]) -> Result<ReflectionOutcome> {
    if member_norm(lat, xnum)? != 4 {
        return Err(CubatureError::InvalidInput("x must have norm 4".into()));
    }
    if !lat.contains(xnum, lat.den) {
        return Err(CubatureError::InvalidInput("x must be a lattice member".into()));
    }
    let den2 = (lat.den * lat.den) as i128;
    let roots = lat.shell(2)?;
    let r = roots
        .vectors
        .iter()
        .find(|r| {
            let dp: i128 = r.iter().zip(xnum).map(|(&a, &b)| a as i128 * b as i128).sum();
            dp == den2
        })
        .ok_or_else(|| {
            CubatureError::VerificationFailed("no root r with <r|x> = 1 exists".into())
        })?;
    let znum: Vec<i64> = xnum.iter().zip(r).map(|(&x, &r)| x - 2 * r).collect();
    // s_x(b) = b - (<b|x>/2) x; over denominator 2 den the rows are
    // 2 bnum - <b|x> xnum
    let n = lat.rank();
    let mut gens = Vec::with_capacity(n);
    for b in &lat.bnum {
        let dp_scaled: i128 = b.iter().zip(xnum).map(|(&a, &c)| a as i128 * c as i128).sum();
        if dp_scaled % den2 != 0 {
            return Err(CubatureError::VerificationFailed(
                "non-integral inner product against x".into(),
            ));
        }
        let dp = (dp_scaled / den2) as i64;
        let row: Vec<i64> = b.iter().zip(xnum).map(|(&a, &c)| 2 * a - dp * c).collect();
        gens.push(row);
    }
    let image = lattice_from_generators(&format!("s_x({})", lat.name), gens, 2 * lat.den, n)?;
    let nb = neighbor(lat, &znum)?;
    Ok(ReflectionOutcome {
        matches_neighbor: image.same_lattice(&nb),
        image,
        znum,
    })
}

// ---------------------------------------------------------------------------
// Two-shell harmonic cancellation on S^7
// ---------------------------------------------------------------------------

/// For each degree d = 1..=11, draw a random degree-d monomial, take its
/// harmonic projection P, and check exactly that
/// (3/2) sum over the norm-2 shell of P(x/sqrt 2) plus the sum over the
/// norm-4 shell of P(x/2) vanishes. Returns the largest absolute deviation
/// observed (0 when every degree cancels exactly).
pub fn two_shell_harmonic_cancellation(seed: u64) -> Result<f64> {
    let lat = standard("E8")?;
    let buckets = lat.shells_upto(4)?;
    let s2 = &buckets[&2];
    let s4 = &buckets[&4];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for d in 1..=11usize {
        // random monomial of total degree d in 8 variables, with a nonzero
        // harmonic projection (resampled if the projection degenerates)
        let mut attempt = 0;
        let (a_list, laps) = loop {
            attempt += 1;
            if attempt > 8 {
                return Err(CubatureError::NonConvergence(
                    "no usable harmonic projection found".into(),
                ));
            }
            let mut expo = vec![0u16; 8];
            for _ in 0..d {
                expo[rng.gen_range(0..8)] += 1;
            }
            let f = MPoly::monomial(8, expo, Quad::int(1));
            // a_j coefficients and iterated Laplacians of the projection
            let mut laps = vec![f.clone()];
            let mut a_list = vec![Quad::int(1)];
            let mut lap = f.clone();
            let mut j: i64 = 0;
            loop {
                lap = lap.laplacian();
                if lap.is_zero() {
                    break;
                }
                let denom = 2 * (j + 1) * (8 + 2 * d as i64 - 2 * j - 4);
                let prev = a_list.last().unwrap().clone();
                a_list.push(prev * Quad::rational(br(-1, denom)));
                laps.push(lap.clone());
                j += 1;
            }
            // consistency: the assembled series is the harmonic projection
            let nsq = MPoly::<Quad>::norm_squared(8);
            let mut assembled = MPoly::zero(8);
            for (j, (aj, lj)) in a_list.iter().zip(&laps).enumerate() {
                assembled = assembled.add(&nsq.powu(j as u32).mul(lj).scale(aj));
            }
            let proj = harmonic_projection(&f, 8);
            if assembled.sub(&proj).is_zero() && !proj.is_zero() {
                break (a_list, laps);
            }
        };
        // structural evaluation: P(v) = sum_j a_j |v|^(2j) (Lap^j f)(v)
        let eval_sum = |vecs: &[Vec<i64>], norm_num: i64| -> Quad {
            let mut total = Quad::int(0);
            for v in vecs {
                let vq: Vec<Quad> = v.iter().map(|&c| Quad::int(c)).collect();
                let mut pv = Quad::int(0);
                let mut npow = Quad::int(1);
                for (aj, lj) in a_list.iter().zip(&laps) {
                    pv = pv + aj.clone() * npow.clone() * lj.eval(&vq);
                    npow = npow * Quad::int(norm_num);
                }
                total = total + pv;
            }
            total
        };
        // numerators live over denominator 2: x/sqrt2 = (sqrt2/4) v for the
        // norm-2 shell, x/2 = v/4 for the norm-4 shell
        let a = eval_sum(s2, 8);
        let b = eval_sum(s4, 16);
        let f2 = Quad::new(BigRational::zero(), br(1, 4), 2).powu(d as u32);
        let f4 = Quad::rational(br(1, 4)).powu(d as u32);
        let total = Quad::rational(br(3, 2)) * f2 * a + f4 * b;
        if !total.is_zero() {
            worst = worst.max(total.to_f64().abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_flags() {
        let e8 = standard("E8").unwrap();
        assert!(e8.is_integral() && e8.is_even() && e8.is_unimodular());
        let w12 = standard("Witt(12)").unwrap();
        assert!(w12.is_integral() && !w12.is_even() && w12.is_unimodular());
        let z3 = standard("Zn(3)").unwrap();
        assert!(z3.is_integral() && !z3.is_even() && z3.is_unimodular());
        let d4 = standard("Dn(4)").unwrap();
        assert!(d4.is_integral() && d4.is_even() && !d4.is_unimodular());
        assert!(standard("Witt(6)").is_err());
        assert!(standard("Dn(1)").is_err());
        assert!(standard("Leech").is_err());
    }

    #[test]
    fn shell_sizes() {
        let e8 = standard("E8").unwrap();
        let s2 = e8.shell(2).unwrap();
        assert_eq!(s2.len(), 240);
        assert!(s2.is_negation_closed());
        assert_eq!(e8.shell(4).unwrap().len(), 2160);
        assert_eq!(e8.shell(3).unwrap().len(), 0);
        let z4 = standard("Zn(4)").unwrap();
        assert_eq!(z4.shell(2).unwrap().len(), 24);
        assert_eq!(standard("Zn(3)").unwrap().shell(1).unwrap().len(), 6);
    }

    #[test]
    fn special_shell_strengths() {
        let z4 = standard("Zn(4)").unwrap();
        let rep = shell_design_strength(&z4, 2, 6).unwrap();
        assert_eq!(rep.max_strength, 5);
        let z7 = standard("Zn(7)").unwrap();
        let rep = shell_design_strength(&z7, 3, 6).unwrap();
        assert_eq!(rep.max_strength, 5);
        // generic shell of Z^4 only reaches 3
        let rep = shell_design_strength(&z4, 1, 4).unwrap();
        assert_eq!(rep.max_strength, 3);
    }

    #[test]
    fn e8_roots_are_a_seven_design() {
        let e8 = standard("E8").unwrap();
        let rep = shell_design_strength(&e8, 2, 8).unwrap();
        assert_eq!(rep.max_strength, 7);
        assert!(rep.tight);
    }

    #[test]
    fn voronoi_small_cases() {
        let z2 = voronoi_tests(&standard("Zn(2)").unwrap()).unwrap();
        assert!(z2.eutactic && !z2.perfect && !z2.strongly_perfect && !z2.extreme);
        let d4 = voronoi_tests(&standard("Dn(4)").unwrap()).unwrap();
        assert!(d4.perfect && d4.eutactic && d4.strongly_perfect && d4.extreme);
        assert_eq!(d4.short_shell_size, 24);
    }

    #[test]
    fn odd_neighbor_of_e8_is_cubic() {
        let e8 = standard("E8").unwrap();
        let x = e8.shell(4).unwrap().vectors[0].clone();
        let nb = neighbor(&e8, &x).unwrap();
        assert!(nb.is_integral() && nb.is_unimodular() && !nb.is_even());
        assert_eq!(nb.shell(1).unwrap().len(), 16);
    }

    #[test]
    fn reflection_equals_even_neighbor() {
        let e8 = standard("E8").unwrap();
        let x = e8.shell(4).unwrap().vectors[7].clone();
        let out = reflection_image(&e8, &x).unwrap();
        assert!(out.matches_neighbor);
        assert_eq!(member_norm(&e8, &out.znum).unwrap(), 8);
        let img = &out.image;
        assert!(img.is_even() && img.is_unimodular());
        assert_eq!(img.shell(2).unwrap().len(), 240);
    }

    #[test]
    fn equality_rule_one_pair() {
        let e8 = standard("E8").unwrap();
        let z1 = e8.shell(4).unwrap().vectors[0].clone();
        // z2 = z1 + 2 b_0 keeps the class and the norm mod 8 may change;
        // the rule must hold either way
        let b0: Vec<i64> = e8.basis_numerators()[0].clone();
        let z2: Vec<i64> = z1.iter().zip(&b0).map(|(&a, &b)| a + 2 * b).collect();
        let (observed, predicted) = neighbor_equality_rule(&e8, &z1, &z2).unwrap();
        assert_eq!(observed, predicted);
    }

    #[test]
    fn mod_two_census() {
        let e8 = standard("E8").unwrap();
        let split = mod_two_class_split(&e8).unwrap();
        assert_eq!(split, ModTwoSplit { zero: 1, root_type: 120, isotropic: 135 });
        let (classes, max) = root_class_pairing(&e8).unwrap();
        assert_eq!((classes, max), (120, 2));
        let fibers = shell4_fiber_report(&e8).unwrap();
        assert_eq!(
            fibers,
            FiberReport { classes: 135, min_fiber: 16, max_fiber: 16, total: 2160 }
        );
    }

    #[test]
    fn unit_splitting() {
        assert!(standard("Zn(3)").unwrap().splits_off_unit().unwrap());
        let w4 = standard("Witt(4)").unwrap();
        assert!(!w4.is_even() && w4.is_unimodular());
        assert!(w4.splits_off_unit().unwrap());
        assert!(!standard("Dn(4)").unwrap().splits_off_unit().unwrap());
    }

    #[test]
    fn membership_and_equality() {
        let e8 = standard("E8").unwrap();
        assert!(e8.contains(&[1, 1, 1, 1, 1, 1, 1, 1], 2)); // all-halves vector
        assert!(e8.contains(&[2, 2, 0, 0, 0, 0, 0, 0], 2)); // e1 + e2
        assert!(!e8.contains(&[2, 0, 0, 0, 0, 0, 0, 0], 2)); // e1 alone
        let again = standard("Witt(8)").unwrap();
        assert!(e8.same_lattice(&again));
        assert!(!e8.same_lattice(&standard("Dn(8)").unwrap()));
    }

    #[test]
    fn theta_counts_match_shells() {
        let z2 = standard("Zn(2)").unwrap();
        // sums of two squares: 1, 4, 4, 0, 4, 8, ...
        assert_eq!(z2.theta_coefficients(5).unwrap(), vec![1, 4, 4, 0, 4, 8]);
    }
}
