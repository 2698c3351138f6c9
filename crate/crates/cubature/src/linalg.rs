//! Small dense linear algebra used across the crate:
//! elimination/rank/nullspace over any scalar, a deterministic cyclic Jacobi
//! eigensolver for symmetric float matrices, Hermite normal form for scaled
//! integer lattice bases, and an exact rational simplex for feasibility LPs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Generic elimination
// ---------------------------------------------------------------------------

/// Row-reduce `m` in place (Gauss-Jordan). Returns the pivot column of each
/// pivot row. Pivot choice: first column whose entry is nonzero (exact) or
/// of largest magnitude in the column (float), which keeps exact runs
/// deterministic per the smallest-index rule.
pub fn row_reduce<S: Scalar>(m: &mut Vec<Vec<S>>, tol: f64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // choose pivot row
        let mut pr = None;
        if S::EXACT {
            for i in r..rows {
                if !m[i][c].is_zero() {
                    pr = Some(i);
                    break;
                }
            }
        } else {
            let mut best = tol;
            for i in r..rows {
                let a = m[i][c].to_f64().abs();
                if a > best {
                    best = a;
                    pr = Some(i);
                }
            }
        }
        let Some(pr) = pr else { continue };
        m.swap(r, pr);
        let inv = S::one() / m[r][c].clone();
        for j in c..cols {
            m[r][j] = m[r][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero_within(0.0) {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = f.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &[Vec<S>], tol: f64) -> usize {
    let mut work = m.to_vec();
    row_reduce(&mut work, tol).len()
}

/// A basis of the nullspace of `m` (viewing rows as equations on R^cols).
/// Free columns are taken in increasing index order.
pub fn nullspace<S: Scalar>(m: &[Vec<S>], tol: f64) -> Vec<Vec<S>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut work = m.to_vec();
    let pivots = row_reduce(&mut work, tol);
    let mut basis = Vec::new();
    let piv_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    for free in 0..cols {
        if piv_set.contains(&free) {
            continue;
        }
        let mut v = vec![S::zero(); cols];
        v[free] = S::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -work[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve A x = b for one solution (A square or overdetermined-consistent).
/// Returns None when inconsistent or rank-deficient in the needed columns.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S], tol: f64) -> Option<Vec<S>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut work: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut work, tol);
    // inconsistency: pivot in the rhs column
    if pivots.iter().any(|&c| c == cols) {
        return None;
    }
    // consistency of zero rows
    for row in work.iter() {
        let lhs_zero = row[..cols].iter().all(|v| v.is_zero_within(tol.max(1e-12)));
        if lhs_zero && !row[cols].is_zero_within(if S::EXACT { 0.0 } else { 1e-9 }) {
            return None;
        }
    }
    let mut x = vec![S::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = work[r][cols].clone();
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Symmetric eigensolver (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Deterministic: fixed sweep order, rotations applied until the
/// off-diagonal Frobenius norm falls below 1e-12 (50 sweeps cap).
/// Returns eigenvalues ascending with matching eigenvector columns.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..50 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() <= 1e-12 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap());
    let evals: Vec<f64> = idx.iter().map(|&i| m[i][i]).collect();
    let evecs: Vec<Vec<f64>> = idx
        .iter()
        .map(|&col| (0..n).map(|r| v[r][col]).collect())
        .collect();
    (evals, evecs)
}

// ---------------------------------------------------------------------------
// Hermite normal form (row style) for integer matrices
// ---------------------------------------------------------------------------

/// Row-style HNF of an integer matrix with i128 arithmetic. Returns the
/// nonzero rows: upper triangular up to column order, positive pivots,
/// entries above a pivot reduced into [0, pivot). Canonical for full-rank
/// lattice bases, so lattice equality reduces to HNF equality.
pub fn hnf(mat: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut m: Vec<Vec<i128>> = mat.to_vec();
    let mut pivot_row = 0usize;
    for c in 0..cols {
        if pivot_row >= rows {
            break;
        }
        loop {
            // find row with smallest nonzero |entry| in column c at/below pivot_row
            let mut best: Option<(usize, i128)> = None;
            for r in pivot_row..rows {
                let v = m[r][c];
                if v != 0 {
                    match best {
                        None => best = Some((r, v)),
                        Some((_, bv)) if v.abs() < bv.abs() => best = Some((r, v)),
                        _ => {}
                    }
                }
            }
            let Some((br, bv)) = best else { break };
            m.swap(pivot_row, br);
            if bv < 0 {
                for j in 0..cols {
                    m[pivot_row][j] = -m[pivot_row][j];
                }
            }
            let p = m[pivot_row][c];
            let mut done = true;
            for r in (pivot_row + 1)..rows {
                if m[r][c] != 0 {
                    let q = m[r][c].div_euclid(p);
                    for j in 0..cols {
                        m[r][j] -= q * m[pivot_row][j];
                    }
                    if m[r][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][c] != 0 {
            // reduce entries above the pivot
            let p = m[pivot_row][c];
            for r in 0..pivot_row {
                let q = m[r][c].div_euclid(p);
                if q != 0 {
                    for j in 0..cols {
                        m[r][j] -= q * m[pivot_row][j];
                    }
                }
            }
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    m
}

/// Determinant of a square integer matrix (Bareiss, exact in BigInt).
pub fn int_det(mat: &[Vec<i128>]) -> BigInt {
    let n = mat.len();
    let mut m: Vec<Vec<BigInt>> = mat
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
        for i in (k + 1)..n {
            m[i][k] = BigInt::zero();
        }
    }
    sign * m[n - 1][n - 1].clone()
}

// ---------------------------------------------------------------------------
// Exact simplex (small feasibility LPs)
// ---------------------------------------------------------------------------

/// max c.x subject to A x = b, x >= 0, in exact rational arithmetic with
/// Bland's rule (deterministic, non-cycling). Returns (optimum, solution) or
/// None when infeasible. Unbounded problems return None as well (callers
/// only pose bounded feasibility programs).
pub fn simplex_max(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    c: &[BigRational],
) -> Option<(BigRational, Vec<BigRational>)> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    // Phase 1: add artificial variables, minimize their sum.
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<BigRational> = Vec::with_capacity(n + m + 1);
        let flip = b[i].is_negative();
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { BigRational::one() } else { BigRational::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let total = n + m;
    // objective rows built on demand
    let run = |tab: &mut Vec<Vec<BigRational>>,
               basis: &mut Vec<usize>,
               cost: &dyn Fn(usize) -> BigRational,
               ncols: usize|
     -> Option<()> {
        loop {
            // reduced costs: c_j - c_B . B^-1 A_j  (tableau already reduced)
            let mut entering: Option<usize> = None;
            for j in 0..ncols {
                if basis.contains(&j) {
                    continue;
                }
                let mut red = cost(j);
                for (i, &bi) in basis.iter().enumerate() {
                    red = red - cost(bi) * tab[i][j].clone();
                }
                if red > BigRational::zero() {
                    entering = Some(j); // Bland: first improving index
                    break;
                }
            }
            let Some(e) = entering else { return Some(()) };
            // ratio test, Bland tie-break by smallest basis variable index
            let rhs = tab[0].len() - 1;
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..tab.len() {
                if tab[i][e] > BigRational::zero() {
                    let ratio = tab[i][rhs].clone() / tab[i][e].clone();
                    match &leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((li, _)) = leave else { return None }; // unbounded
            // pivot
            let pv = tab[li][e].clone();
            for v in tab[li].iter_mut() {
                *v = v.clone() / pv.clone();
            }
            for i in 0..tab.len() {
                if i != li && !tab[i][e].is_zero() {
                    let f = tab[i][e].clone();
                    for j in 0..tab[i].len() {
                        let sub = f.clone() * tab[li][j].clone();
                        tab[i][j] = tab[i][j].clone() - sub;
                    }
                }
            }
            basis[li] = e;
        }
    };
    // Phase 1: maximize -(sum of artificials)
    let phase1 = |j: usize| -> BigRational {
        if j >= n {
            -BigRational::one()
        } else {
            BigRational::zero()
        }
    };
    run(&mut tab, &mut basis, &phase1, total)?;
    let rhs = total;
    let mut p1 = BigRational::zero();
    for (i, &bi) in basis.iter().enumerate() {
        if bi >= n {
            p1 += tab[i][rhs].clone();
        }
    }
    if !p1.is_zero() {
        return None; // infeasible
    }
    // Drive artificials out of the basis where possible; drop their columns.
    for i in 0..basis.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab[i][j].is_zero()) {
                let pv = tab[i][j].clone();
                for v in tab[i].iter_mut() {
                    *v = v.clone() / pv.clone();
                }
                for r in 0..tab.len() {
                    if r != i && !tab[r][j].is_zero() {
                        let f = tab[r][j].clone();
                        for col in 0..tab[r].len() {
                            let sub = f.clone() * tab[i][col].clone();
                            tab[r][col] = tab[r][col].clone() - sub;
                        }
                    }
                }
                basis[i] = j;
            }
        }
    }
    // Remove redundant artificial-basic zero rows.
    let keep: Vec<usize> = (0..basis.len()).filter(|&i| basis[i] < n).collect();
    let tab2: Vec<Vec<BigRational>> = keep
        .iter()
        .map(|&i| {
            let mut row: Vec<BigRational> = tab[i][..n].to_vec();
            row.push(tab[i][rhs].clone());
            row
        })
        .collect();
    let mut tab = tab2;
    let mut basis: Vec<usize> = keep.iter().map(|&i| basis[i]).collect();
    // Phase 2
    let phase2 = |j: usize| -> BigRational {
        if j < n {
            c[j].clone()
        } else {
            BigRational::zero()
        }
    };
    run(&mut tab, &mut basis, &phase2, n)?;
    let rhs = n;
    let mut x = vec![BigRational::zero(); n];
    for (i, &bi) in basis.iter().enumerate() {
        x[bi] = tab[i][rhs].clone();
    }
    let mut opt = BigRational::zero();
    for j in 0..n {
        opt += c[j].clone() * x[j].clone();
    }
    Some((opt, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{bri, Quad};

    #[test]
    fn nullspace_of_rank_one() {
        let m = vec![vec![Quad::int(1), Quad::int(2), Quad::int(3)]];
        let ns = nullspace(&m, 0.0);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot = v[0].clone() + Quad::int(2) * v[1].clone() + Quad::int(3) * v[2].clone();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn jacobi_small_spectrum() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (evals, evecs) = jacobi_eigen(&a);
        assert!((evals[0] - 1.0).abs() < 1e-12);
        assert!((evals[1] - 3.0).abs() < 1e-12);
        // eigenvector of eigenvalue 3 is (1,1)/sqrt 2 up to sign
        assert!((evecs[1][0].abs() - 0.5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn hnf_canonicalizes_bases() {
        // Two bases of the same lattice 2Z x 3Z.
        let b1 = vec![vec![2, 0], vec![0, 3]];
        let b2 = vec![vec![2, 3], vec![4, 3]];
        assert_eq!(hnf(&b1), hnf(&b2));
        let b3 = vec![vec![2, 0], vec![0, 5]];
        assert_ne!(hnf(&b1), hnf(&b3));
    }

    #[test]
    fn det_small() {
        assert_eq!(int_det(&[vec![2, 1], vec![1, 1]]), BigInt::from(1));
        assert_eq!(int_det(&[vec![2, 0], vec![0, 3]]), BigInt::from(6));
    }

    #[test]
    fn simplex_feasibility() {
        // max t st w1 + w2 = 1, w1 - w2 = 0, both >= 0 via x = (w1, w2)
        // encoded: maximize w1 (expect 1/2).
        let a = vec![
            vec![bri(1), bri(1)],
            vec![bri(1), bri(-1)],
        ];
        let b = vec![bri(1), bri(0)];
        let c = vec![bri(1), bri(0)];
        let (opt, x) = simplex_max(&a, &b, &c).unwrap();
        assert_eq!(opt, crate::scalar::br(1, 2));
        assert_eq!(x[0], crate::scalar::br(1, 2));
    }

    #[test]
    fn simplex_detects_infeasible() {
        // w1 + w2 = -1 with w >= 0 is infeasible.
        let a = vec![vec![bri(1), bri(1)]];
        let b = vec![bri(-1)];
        let c = vec![bri(0), bri(0)];
        assert!(simplex_max(&a, &b, &c).is_none());
    }
}
