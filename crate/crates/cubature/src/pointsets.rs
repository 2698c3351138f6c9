//! Weighted point sets on spheres: the core data model, structural
//! predicates (antipodality, duplicate detection, the Gram 2-design test,
//! inner-product profiles) and text file I/O.
//!
//! A set carries its ambient coordinate width and, separately, the
//! dimension of the linear span of its points. Sets such as the regular
//! simplex are naturally written with one more coordinate than their
//! intrinsic dimension; all strength criteria use the span dimension.
//!
//! Numeric mode is per set: exact coordinates (rationals, possibly with a
//! single quadratic surd) when the construction permits, floats otherwise.

use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;

use crate::linalg;
use crate::scalar::{Quad, Scalar};
use crate::{CubatureError, Result};

/// Duplicate / antipodal-pair tolerance in float mode.
pub const DUP_TOL: f64 = 1e-10;
/// On-sphere tolerance in float mode (relative to 1 + radius^2).
pub const SPHERE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<S: Scalar> {
    dim: usize,
    radius2: S,
    points: Vec<Vec<S>>,
    weights: Vec<S>,
}

impl<S: Scalar> PointSet<S> {
    /// Validating constructor: equal coordinate widths, strictly positive
    /// weights, every point on the sphere of the given squared radius, no
    /// duplicate points. The span dimension is computed here.
    pub fn new(points: Vec<Vec<S>>, weights: Vec<S>, radius2: S) -> Result<Self> {
        if points.is_empty() {
            return Err(CubatureError::InvalidInput("empty point set".into()));
        }
        if points.len() != weights.len() {
            return Err(CubatureError::InvalidInput(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let width = points[0].len();
        if width == 0 {
            return Err(CubatureError::InvalidInput("zero-width points".into()));
        }
        if radius2.cmp_real(&S::zero()) != std::cmp::Ordering::Greater {
            return Err(CubatureError::InvalidInput("radius^2 must be positive".into()));
        }
        for w in &weights {
            if w.cmp_real(&S::zero()) != std::cmp::Ordering::Greater {
                return Err(CubatureError::InvalidInput(format!("nonpositive weight {w}")));
            }
        }
        let sph_tol = SPHERE_TOL * (1.0 + radius2.to_f64().abs());
        for (i, p) in points.iter().enumerate() {
            if p.len() != width {
                return Err(CubatureError::InvalidInput(format!(
                    "point {i} has width {} but point 0 has width {width}",
                    p.len()
                )));
            }
            let norm2: S = p.iter().map(|c| c.clone() * c.clone()).sum();
            let diff = norm2 - radius2.clone();
            if !diff.is_zero_within(sph_tol) {
                return Err(CubatureError::InvalidInput(format!(
                    "point {i} is off the sphere by {}",
                    diff.to_f64()
                )));
            }
        }
        if let Some((i, j)) = find_duplicate(&points) {
            return Err(CubatureError::InvalidInput(format!(
                "duplicate points at indices {i} and {j}"
            )));
        }
        let dim = span_dimension(&points);
        Ok(PointSet { dim, radius2, points, weights })
    }

    /// Uniform weights totalling 1.
    pub fn new_uniform(points: Vec<Vec<S>>, radius2: S) -> Result<Self> {
        let n = points.len();
        let w = S::one() / S::from_int(n as i64);
        Self::new(points, vec![w; n], radius2)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimension of the linear span of the points (the sphere the set
    /// actually lives on). At most `coord_len`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of coordinates per point.
    pub fn coord_len(&self) -> usize {
        self.points[0].len()
    }

    pub fn radius2(&self) -> &S {
        &self.radius2
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<S>, &S)> {
        self.points.iter().zip(self.weights.iter())
    }

    pub fn total_weight(&self) -> S {
        self.weights.iter().cloned().sum()
    }

    /// Same points with weights scaled to total 1.
    pub fn normalized(&self) -> PointSet<S> {
        let t = self.total_weight();
        let weights = self.weights.iter().map(|w| w.clone() / t.clone()).collect();
        PointSet { dim: self.dim, radius2: self.radius2.clone(), points: self.points.clone(), weights }
    }

    /// True when every point's negative is present with equal weight.
    pub fn is_antipodal(&self) -> bool {
        let tol = DUP_TOL;
        'outer: for (p, w) in self.iter() {
            let neg: Vec<S> = p.iter().map(|c| -c.clone()).collect();
            for (q, v) in self.iter() {
                if vec_approx_eq(&neg, q, tol) {
                    if w.clone().approx_eq(v, tol) {
                        continue 'outer;
                    }
                    return false;
                }
            }
            return false;
        }
        true
    }
}

impl PointSet<Quad> {
    /// Float copy of an exact set.
    pub fn to_float(&self) -> PointSet<f64> {
        PointSet {
            dim: self.dim,
            radius2: self.radius2.to_f64(),
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|c| c.to_f64()).collect())
                .collect(),
            weights: self.weights.iter().map(|w| w.to_f64()).collect(),
        }
    }
}

impl PointSet<f64> {
    /// Scale points onto the unit sphere (weights unchanged).
    pub fn to_unit(&self) -> PointSet<f64> {
        let rho = self.radius2.sqrt();
        PointSet {
            dim: self.dim,
            radius2: 1.0,
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|c| c / rho).collect())
                .collect(),
            weights: self.weights.clone(),
        }
    }
}

fn vec_approx_eq<S: Scalar>(a: &[S], b: &[S], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.clone().approx_eq(y, tol))
}

/// First duplicate pair, if any. Points are compared coordinate-wise,
/// exactly in exact mode and within DUP_TOL in float mode.
fn find_duplicate<S: Scalar>(points: &[Vec<S>]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i][0].cmp_real(&points[j][0]));
    for a in 0..order.len() {
        for b in (a + 1)..order.len() {
            let (i, j) = (order[a], order[b]);
            let gap = points[j][0].clone() - points[i][0].clone();
            if !gap.is_zero_within(DUP_TOL) {
                break; // sorted by first coordinate
            }
            if vec_approx_eq(&points[i], &points[j], DUP_TOL) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// Rank of the span of the points, via the coord_len x coord_len second
/// moment matrix (cheap for many points in low ambient dimension).
fn span_dimension<S: Scalar>(points: &[Vec<S>]) -> usize {
    let w = points[0].len();
    let mut m = vec![vec![S::zero(); w]; w];
    for p in points {
        for i in 0..w {
            for j in i..w {
                let prod = p[i].clone() * p[j].clone();
                m[i][j] = m[i][j].clone() + prod.clone();
                if j > i {
                    m[j][i] = m[j][i].clone() + prod;
                }
            }
        }
    }
    let scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v.to_f64().abs())
        .fold(0.0, f64::max);
    linalg::rank(&m, 1e-9 * (1.0 + scale))
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()).sum()
}

// ---------------------------------------------------------------------------
// Antipodal doubling
// ---------------------------------------------------------------------------

/// X joined with -X, each weight halved. Errors if the set already
/// contains an antipodal pair.
pub fn antipodal_double<S: Scalar>(ps: &PointSet<S>) -> Result<PointSet<S>> {
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            let neg: Vec<S> = ps.points[j].iter().map(|c| -c.clone()).collect();
            if vec_approx_eq(&ps.points[i], &neg, DUP_TOL) {
                return Err(CubatureError::InvalidInput(format!(
                    "antipodal pair already present at indices {i}, {j}"
                )));
            }
        }
    }
    let half = S::ratio(1, 2);
    let mut points = ps.points.clone();
    let mut weights: Vec<S> = ps.weights.iter().map(|w| w.clone() * half.clone()).collect();
    for p in &ps.points {
        points.push(p.iter().map(|c| -c.clone()).collect());
    }
    weights.extend(weights.clone());
    PointSet::new(points, weights, ps.radius2.clone())
}

// ---------------------------------------------------------------------------
// Gram 2-design test
// ---------------------------------------------------------------------------

/// For a uniformly weighted set: true iff the normalized Gram matrix Z
/// (entries <x|y>/rho^2) satisfies Z J = 0 and Z^2 = (|X|/n) Z, with n the
/// span dimension. Exact in exact mode, tolerance 1e-9 in float mode.
pub fn gram_two_design_test<S: Scalar>(ps: &PointSet<S>) -> Result<bool> {
    let w0 = &ps.weights[0];
    for w in ps.weights() {
        if !w.clone().approx_eq(w0, 1e-12) {
            return Err(CubatureError::InvalidInput(
                "gram 2-design test needs uniform weights".into(),
            ));
        }
    }
    let npts = ps.len();
    let tol = 1e-9;
    let mut z = vec![vec![S::zero(); npts]; npts];
    for i in 0..npts {
        for j in 0..npts {
            z[i][j] = dot(&ps.points[i], &ps.points[j]) / ps.radius2.clone();
        }
    }
    for row in &z {
        let sum: S = row.iter().cloned().sum();
        if !sum.is_zero_within(tol) {
            return Ok(false);
        }
    }
    let factor = S::from_int(npts as i64) / S::from_int(ps.dim as i64);
    for i in 0..npts {
        for j in 0..npts {
            let mut acc = S::zero();
            for (k, zik) in z[i].iter().enumerate() {
                acc = acc + zik.clone() * z[k][j].clone();
            }
            let diff = acc - factor.clone() * z[i][j].clone();
            if !diff.is_zero_within(tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Inner-product profile
// ---------------------------------------------------------------------------

/// Sorted distinct normalized inner products over distinct pairs.
/// `a_set` covers all pairs x != y; `b_set` excludes antipodal pairs.
#[derive(Clone, Debug)]
pub struct InnerProductProfile<S: Scalar> {
    pub a_set: Vec<S>,
    pub b_set: Vec<S>,
    pub antipodal: bool,
}

pub fn inner_product_profile<S: Scalar>(ps: &PointSet<S>) -> InnerProductProfile<S> {
    let mut values: Vec<S> = Vec::new();
    let mut antipodal = false;
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            let t = dot(&ps.points[i], &ps.points[j]) / ps.radius2.clone();
            values.push(t);
        }
    }
    values.sort_by(|a, b| a.cmp_real(b));
    let mut a_set: Vec<S> = Vec::new();
    for v in values {
        match a_set.last() {
            Some(last) if last.clone().approx_eq(&v, DUP_TOL) => {}
            _ => a_set.push(v),
        }
    }
    let mut b_set = a_set.clone();
    if let Some(first) = b_set.first() {
        let one_plus = first.clone() + S::one();
        if one_plus.is_zero_within(DUP_TOL) {
            antipodal = true;
            b_set.remove(0);
        }
    }
    InnerProductProfile { a_set, b_set, antipodal }
}

// ---------------------------------------------------------------------------
// Gaussian-weighted point sets (no common-radius invariant)
// ---------------------------------------------------------------------------

/// Weighted points in R^n for Gaussian-measure cubature; points may lie on
/// several spheres, so only widths and weight positivity are enforced.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPointSet<S: Scalar> {
    pub points: Vec<Vec<S>>,
    pub weights: Vec<S>,
}

impl<S: Scalar> GaussianPointSet<S> {
    pub fn new(points: Vec<Vec<S>>, weights: Vec<S>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(CubatureError::InvalidInput("bad gaussian point set shape".into()));
        }
        let w0 = points[0].len();
        if points.iter().any(|p| p.len() != w0) {
            return Err(CubatureError::InvalidInput("ragged gaussian point set".into()));
        }
        for w in &weights {
            if w.cmp_real(&S::zero()) != std::cmp::Ordering::Greater {
                return Err(CubatureError::InvalidInput("nonpositive weight".into()));
            }
        }
        Ok(GaussianPointSet { points, weights })
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// A loaded set in either numeric mode.
#[derive(Clone, Debug)]
pub enum AnyPointSet {
    Exact(PointSet<Quad>),
    Float(PointSet<f64>),
}

impl AnyPointSet {
    pub fn len(&self) -> usize {
        match self {
            AnyPointSet::Exact(ps) => ps.len(),
            AnyPointSet::Float(ps) => ps.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyPointSet::Exact(ps) => ps.dim(),
            AnyPointSet::Float(ps) => ps.dim(),
        }
    }

    pub fn coord_len(&self) -> usize {
        match self {
            AnyPointSet::Exact(ps) => ps.coord_len(),
            AnyPointSet::Float(ps) => ps.coord_len(),
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            AnyPointSet::Exact(_) => "exact",
            AnyPointSet::Float(_) => "float",
        }
    }

    pub fn to_float(&self) -> PointSet<f64> {
        match self {
            AnyPointSet::Exact(ps) => ps.to_float(),
            AnyPointSet::Float(ps) => ps.clone(),
        }
    }
}

fn parse_rational(tok: &str) -> Result<BigRational> {
    let err = || CubatureError::Parse(format!("bad rational token '{tok}'"));
    if let Some((p, q)) = tok.split_once('/') {
        let num: num_bigint::BigInt = p.parse().map_err(|_| err())?;
        let den: num_bigint::BigInt = q.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = tok.split_once('.') {
        // exact base-10 decimal
        let neg = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let joined = format!("{int_digits}{frac_part}");
        let num: num_bigint::BigInt = joined.parse().map_err(|_| err())?;
        let den = num_bigint::BigInt::from(10u32).pow(frac_part.len() as u32);
        let r = BigRational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let num: num_bigint::BigInt = tok.parse().map_err(|_| err())?;
    Ok(BigRational::from(num))
}

fn parse_float(tok: &str) -> Result<f64> {
    let v: f64 = if let Some((p, q)) = tok.split_once('/') {
        let num: f64 = p.parse().map_err(|_| CubatureError::Parse(format!("bad float '{tok}'")))?;
        let den: f64 = q.parse().map_err(|_| CubatureError::Parse(format!("bad float '{tok}'")))?;
        num / den
    } else {
        tok.parse().map_err(|_| CubatureError::Parse(format!("bad float '{tok}'")))?
    };
    if !v.is_finite() {
        return Err(CubatureError::Parse(format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

/// Parse the point-set text format. Header:
/// `pointset n=<int> radius2=<rational> mode=<exact|float> total_weight=<rational>`
/// then one `<weight> <x1> ... <xn>` record per line; `#` starts a comment.
pub fn parse_pointset(text: &str) -> Result<AnyPointSet> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CubatureError::Parse("empty point-set file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "pointset" {
        return Err(CubatureError::Parse(format!("malformed header '{header}'")));
    }
    let field = |tok: &str, key: &str| -> Result<String> {
        tok.strip_prefix(&format!("{key}="))
            .map(str::to_string)
            .ok_or_else(|| CubatureError::Parse(format!("expected {key}=..., got '{tok}'")))
    };
    let n: usize = field(toks[1], "n")?
        .parse()
        .map_err(|_| CubatureError::Parse("bad n".into()))?;
    let radius2_tok = field(toks[2], "radius2")?;
    let mode = field(toks[3], "mode")?;
    let total_tok = field(toks[4], "total_weight")?;
    if n == 0 {
        return Err(CubatureError::Parse("n must be positive".into()));
    }
    match mode.as_str() {
        "exact" => {
            let radius2 = Quad::rational(parse_rational(&radius2_tok)?);
            let declared_total = parse_rational(&total_tok)?;
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for line in lines {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != n + 1 {
                    return Err(CubatureError::Parse(format!(
                        "record '{line}' has {} entries, expected {}",
                        toks.len(),
                        n + 1
                    )));
                }
                weights.push(Quad::rational(parse_rational(toks[0])?));
                points.push(
                    toks[1..]
                        .iter()
                        .map(|t| parse_rational(t).map(Quad::rational))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            let ps = PointSet::new(points, weights, radius2)?;
            let total = ps.total_weight();
            if total.as_rational() != Some(&declared_total) {
                return Err(CubatureError::Parse(format!(
                    "total_weight header says {declared_total}, records sum to {total}"
                )));
            }
            Ok(AnyPointSet::Exact(ps))
        }
        "float" => {
            let radius2 = parse_float(&radius2_tok)?;
            let declared_total = parse_float(&total_tok)?;
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for line in lines {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != n + 1 {
                    return Err(CubatureError::Parse(format!(
                        "record '{line}' has {} entries, expected {}",
                        toks.len(),
                        n + 1
                    )));
                }
                weights.push(parse_float(toks[0])?);
                points.push(toks[1..].iter().map(|t| parse_float(t)).collect::<Result<Vec<_>>>()?);
            }
            let ps = PointSet::new(points, weights, radius2)?;
            if (ps.total_weight() - declared_total).abs() > 1e-9 * (1.0 + declared_total.abs()) {
                return Err(CubatureError::Parse("total_weight header mismatch".into()));
            }
            Ok(AnyPointSet::Float(ps))
        }
        other => Err(CubatureError::Parse(format!("unknown mode '{other}'"))),
    }
}

fn quad_token(q: &Quad) -> Option<String> {
    q.as_rational().map(|r| r.to_string())
}

/// Render a set in the text format. Exact sets with any irrational entry
/// fall back to float rendering (shortest round-trip decimals).
pub fn format_pointset(ps: &AnyPointSet) -> String {
    if let AnyPointSet::Exact(e) = ps {
        let all_rational = e.radius2().as_rational().is_some()
            && e.iter().all(|(p, w)| {
                w.as_rational().is_some() && p.iter().all(|c| c.as_rational().is_some())
            });
        if all_rational {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "pointset n={} radius2={} mode=exact total_weight={}",
                e.coord_len(),
                quad_token(e.radius2()).unwrap(),
                quad_token(&e.total_weight()).unwrap()
            );
            for (p, w) in e.iter() {
                let mut line = quad_token(w).unwrap();
                for c in p {
                    let _ = write!(line, " {}", quad_token(c).unwrap());
                }
                let _ = writeln!(out, "{line}");
            }
            return out;
        }
    }
    let f = ps.to_float();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "pointset n={} radius2={} mode=float total_weight={}",
        f.coord_len(),
        f.radius2(),
        f.total_weight()
    );
    for (p, w) in f.iter() {
        let mut line = format!("{w}");
        for c in p {
            let _ = write!(line, " {c}");
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

pub fn save(ps: &AnyPointSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_pointset(ps))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<AnyPointSet> {
    let text = std::fs::read_to_string(path)?;
    parse_pointset(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{br, bri};

    fn qi(v: i64) -> Quad {
        Quad::int(v)
    }

    fn cross_polytope_3() -> PointSet<Quad> {
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [1i64, -1] {
                let mut p = vec![qi(0); 3];
                p[i] = qi(s);
                pts.push(p);
            }
        }
        PointSet::new_uniform(pts, qi(1)).unwrap()
    }

    #[test]
    fn constructor_validates() {
        assert!(PointSet::new(vec![vec![qi(1)]], vec![qi(0)], qi(1)).is_err()); // zero weight
        assert!(PointSet::new(vec![vec![qi(1)], vec![qi(1)]], vec![qi(1), qi(1)], qi(1)).is_err()); // dup
        assert!(PointSet::new(vec![vec![qi(2)]], vec![qi(1)], qi(1)).is_err()); // off sphere
    }

    #[test]
    fn span_dim_of_embedded_pair() {
        let ps = PointSet::new_uniform(vec![vec![qi(1), qi(0)], vec![-qi(1), qi(0)]], qi(1)).unwrap();
        assert_eq!(ps.dim(), 1);
        assert_eq!(ps.coord_len(), 2);
    }

    #[test]
    fn antipodal_predicates() {
        let ps = cross_polytope_3();
        assert!(ps.is_antipodal());
        assert!(antipodal_double(&ps).is_err());
        let half = PointSet::new_uniform(
            vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]],
            qi(1),
        )
        .unwrap();
        let doubled = antipodal_double(&half).unwrap();
        assert_eq!(doubled.len(), 4);
        assert!(doubled.is_antipodal());
        assert_eq!(doubled.total_weight(), qi(1));
        // barycenter exactly zero
        for c in 0..2 {
            let s: Quad = doubled.iter().map(|(p, w)| p[c].clone() * w.clone()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn profile_of_cross_polytope() {
        let prof = inner_product_profile(&cross_polytope_3());
        assert!(prof.antipodal);
        assert_eq!(prof.a_set, vec![qi(-1), qi(0)]);
        assert_eq!(prof.b_set, vec![qi(0)]);
    }

    #[test]
    fn gram_test_examples() {
        // square in S^1
        let square = PointSet::new_uniform(
            vec![
                vec![qi(1), qi(0)],
                vec![qi(0), qi(1)],
                vec![-qi(1), qi(0)],
                vec![qi(0), -qi(1)],
            ],
            qi(1),
        )
        .unwrap();
        assert!(gram_two_design_test(&square).unwrap());
        // two orthonormal points: barycenter is not zero
        let pair =
            PointSet::new_uniform(vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]], qi(1)).unwrap();
        assert!(!gram_two_design_test(&pair).unwrap());
    }

    #[test]
    fn file_roundtrip_exact() {
        let ps = AnyPointSet::Exact(cross_polytope_3());
        let text = format_pointset(&ps);
        assert!(text.starts_with("pointset n=3 radius2=1 mode=exact total_weight=1\n"));
        let back = parse_pointset(&text).unwrap();
        let again = format_pointset(&back);
        assert_eq!(text, again);
    }

    #[test]
    fn file_roundtrip_float() {
        let ps = AnyPointSet::Float(cross_polytope_3().to_float());
        let text = format_pointset(&ps);
        let back = parse_pointset(&text).unwrap();
        assert_eq!(format_pointset(&back), text);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_pointset("").is_err());
        assert!(parse_pointset("pointset n=2 radius2=1 mode=exact total_weight=1\n0 1 0\n").is_err());
        assert!(parse_pointset("pointset n=2 radius2=1 mode=exact total_weight=1\n1 1\n").is_err());
        // minimal valid antipodal pair on S^1
        let good = "pointset n=2 radius2=1 mode=exact total_weight=1\n1/2 1 0\n1/2 -1 0\n";
        assert_eq!(parse_pointset(good).unwrap().len(), 2);
    }

    #[test]
    fn decimal_tokens_parse_exactly() {
        assert_eq!(parse_rational("0.5").unwrap(), br(1, 2));
        assert_eq!(parse_rational("-2.25").unwrap(), br(-9, 4));
        assert_eq!(parse_rational("7").unwrap(), bri(7));
        assert!(parse_rational("1/0").is_err());
    }
}
