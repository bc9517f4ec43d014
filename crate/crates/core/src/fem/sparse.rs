use super::FemError;
use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use std::fmt::Write as _;

/// Compressed sparse row matrix with sorted, summed entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Builds from (row, col, value) triplets; duplicates are summed in input order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut raw = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            raw[next[r]] = (c, v);
            next[r] += 1;
        }
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        for i in 0..n {
            let row = &mut raw[counts[i]..counts[i + 1]];
            // Stable sort keeps the summation order deterministic.
            row.sort_by_key(|e| e.0);
            for &(c, v) in row.iter() {
                if cols.len() > row_ptr[i] && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.vals[k] * x[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j)
            .map_or(0.0, |k| self.vals[self.row_ptr[i] + k])
    }

    /// max |A_ij − A_ji| / max |A_ij|.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                scale = scale.max(self.vals[k].abs());
                worst = worst.max((self.vals[k] - self.get(j, i)).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>, FemError> {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                t.push(Triplet::new(i, self.cols[k], self.vals[k]));
            }
        }
        SparseColMat::try_new_from_triplets(self.n, self.n, &t)
            .map_err(|e| FemError::Solver(format!("{e:?}")))
    }

    /// Coordinate dump: one `row col value` line per stored entry.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "% {} {} {}", self.n, self.n, self.nnz());
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let _ = writeln!(s, "{} {} {:.16e}", i, self.cols[k], self.vals[k]);
            }
        }
        s
    }
}

/// Relative residual threshold for direct solves.
pub const SOLVE_TOL: f64 = 1e-10;

enum Factor {
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
    Llt(faer::sparse::linalg::solvers::Llt<usize, f64>),
    Bordered(Box<Bordered>),
}

/// Bordered system [[A, C], [Cᵀ, 0]] with singular A. The sparse core
/// S = A + Σ_k d e_{r_k} e_{r_k}ᵀ is nonsingular when each pin r_k hits one
/// null mode of A; the exact bordered solution is recovered from S⁻¹ and a
/// small dense system (Woodbury).
struct Bordered {
    n: usize,
    pins: Vec<usize>,
    d: f64,
    borders: Vec<Vec<f64>>,
    core: faer::sparse::linalg::solvers::Lu<usize, f64>,
    /// S⁻¹ [e_{r_1} … e_{r_m}, −C].
    y: Vec<Vec<f64>>,
    small: faer::linalg::solvers::PartialPivLu<f64>,
}

impl Bordered {
    fn new(full: &Csr, n: usize, pins: Vec<usize>) -> Result<Self, FemError> {
        let m = full.n - n;
        if pins.len() != m {
            return Err(FemError::Dimension {
                expected: m,
                got: pins.len(),
            });
        }
        let mut borders = vec![vec![0.0; n]; m];
        let mut trip = Vec::with_capacity(full.nnz());
        let mut d = 0.0f64;
        for i in 0..n {
            for k in full.row_ptr[i]..full.row_ptr[i + 1] {
                let (j, v) = (full.cols[k], full.vals[k]);
                if j < n {
                    trip.push((i, j, v));
                    if i == j {
                        d = d.max(v.abs());
                    }
                } else {
                    borders[j - n][i] = v;
                }
            }
        }
        let d = if d > 0.0 { d } else { 1.0 };
        for &r in &pins {
            trip.push((r, r, d));
        }
        let core_csr = Csr::from_triplets(n, &trip);
        let core = core_csr
            .to_faer()?
            .sp_lu()
            .map_err(|e| FemError::Singular(format!("{e:?}")))?;
        let mut w = Mat::<f64>::zeros(n, 2 * m);
        for (k, &r) in pins.iter().enumerate() {
            w[(r, k)] = 1.0;
            for i in 0..n {
                w[(i, m + k)] = -borders[k][i];
            }
        }
        core.solve_in_place(w.as_mut());
        let y: Vec<Vec<f64>> = (0..2 * m)
            .map(|c| (0..n).map(|i| w[(i, c)]).collect())
            .collect();
        // Unknowns [μ; λ]: Rᵀ Y [μ;λ] − μ/d = −Rᵀ X0 and Cᵀ Y [μ;λ] = g − Cᵀ X0.
        let mut g = Mat::<f64>::zeros(2 * m, 2 * m);
        for c in 0..2 * m {
            for k in 0..m {
                g[(k, c)] = y[c][pins[k]] - if c == k { 1.0 / d } else { 0.0 };
                g[(m + k, c)] = dot(&borders[k], &y[c]);
            }
        }
        let small = g.partial_piv_lu();
        Ok(Self {
            n,
            pins,
            d,
            borders,
            core,
            y,
            small,
        })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.pins.len());
        let mut x0 = Mat::<f64>::zeros(n, 1);
        for i in 0..n {
            x0[(i, 0)] = b[i];
        }
        self.core.solve_in_place(x0.as_mut());
        let x0: Vec<f64> = (0..n).map(|i| x0[(i, 0)]).collect();
        let mut r = Mat::<f64>::zeros(2 * m, 1);
        for k in 0..m {
            r[(k, 0)] = -x0[self.pins[k]];
            r[(m + k, 0)] = b[n + k] - dot(&self.borders[k], &x0);
        }
        let ml = self.small.solve(&r);
        let mut x = x0;
        for c in 0..2 * m {
            let coef = ml[(c, 0)];
            for i in 0..n {
                x[i] += coef * self.y[c][i];
            }
        }
        let _ = self.d;
        x.extend((0..m).map(|k| ml[(m + k, 0)]));
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A factorized sparse matrix; factor once, solve many right-hand sides.
pub struct Factorization {
    matrix: Csr,
    factor: Factor,
}

impl Factorization {
    /// LU with partial pivoting, suitable for symmetric indefinite systems.
    pub fn lu(matrix: Csr) -> Result<Self, FemError> {
        let lu = matrix
            .to_faer()?
            .sp_lu()
            .map_err(|e| FemError::Singular(format!("{e:?}")))?;
        Ok(Self {
            matrix,
            factor: Factor::Lu(lu),
        })
    }

    /// Sparse Cholesky for symmetric positive definite systems.
    pub fn cholesky(matrix: Csr) -> Result<Self, FemError> {
        let llt = matrix
            .to_faer()?
            .sp_cholesky(faer::Side::Lower)
            .map_err(|e| FemError::Singular(format!("{e:?}")))?;
        Ok(Self {
            matrix,
            factor: Factor::Llt(llt),
        })
    }

    /// Bordered system whose last rows are dense multiplier constraints on the
    /// first `n_core` unknowns. `pins` holds one core dof per multiplier, each
    /// inside the null mode that multiplier constrains.
    pub fn bordered(matrix: Csr, n_core: usize, pins: Vec<usize>) -> Result<Self, FemError> {
        let b = Bordered::new(&matrix, n_core, pins)?;
        Ok(Self {
            matrix,
            factor: Factor::Bordered(Box::new(b)),
        })
    }

    pub fn matrix(&self) -> &Csr {
        &self.matrix
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.matrix.n;
        match &self.factor {
            Factor::Bordered(f) => f.solve(b),
            other => {
                let mut x = Mat::<f64>::zeros(n, 1);
                for i in 0..n {
                    x[(i, 0)] = b[i];
                }
                match other {
                    Factor::Lu(f) => f.solve_in_place(x.as_mut()),
                    Factor::Llt(f) => f.solve_in_place(x.as_mut()),
                    Factor::Bordered(_) => unreachable!(),
                }
                (0..n).map(|i| x[(i, 0)]).collect()
            }
        }
    }

    /// Solves for each right-hand side and checks ‖Ax − b‖ ≤ tol ‖b‖, with one
    /// step of iterative refinement when needed.
    pub fn solve_many(&self, rhs: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>, FemError> {
        let n = self.matrix.n;
        rhs.iter()
            .map(|b| {
                if b.len() != n {
                    return Err(FemError::Dimension {
                        expected: n,
                        got: b.len(),
                    });
                }
                let mut x = self.raw_solve(b);
                let mut res = residual(&self.matrix, &x, b);
                if res > tol {
                    let ax = self.matrix.mul(&x);
                    let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
                    let dx = self.raw_solve(&r);
                    x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
                    res = residual(&self.matrix, &x, b);
                }
                if !(res <= tol) {
                    return Err(FemError::Residual(res));
                }
                Ok(x)
            })
            .collect()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, FemError> {
        Ok(self.solve_many(&[rhs.to_vec()], SOLVE_TOL)?.pop().unwrap())
    }
}

/// ‖Ax − b‖₂ / ‖b‖₂ (absolute when b = 0).
pub fn residual(a: &Csr, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul(x);
    let num: f64 = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}
