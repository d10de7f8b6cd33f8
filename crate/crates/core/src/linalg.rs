//! Sparse symmetric matrices over mesh vertices and their direct factorizations.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};

use crate::error::{Error, Result};

/// Symmetric matrix in CSR layout, full (both triangles) storage.
#[derive(Clone, Debug)]
pub struct SymmetricMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymmetricMatrix {
    /// Duplicate entries are summed. The caller supplies both (i, j) and (j, i).
    pub fn from_triplets(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SymmetricMatrix { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `Σ_{j≠i} a_ij (x_j − x_i)`, which equals `A x` when every row sums to
    /// zero and vanishes exactly on constant vectors.
    pub fn mul_vec_zero_row_sum(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).filter(|&(j, _)| j != i).map(|(j, v)| v * (x[j] - x[i])).sum())
            .collect()
    }

    /// `self + diag(d)`.
    pub fn plus_diagonal(&self, d: &[f64]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(self.vals.len() + self.n);
        for i in 0..self.n {
            entries.extend(self.row(i).map(|(j, v)| (i, j, v)));
            entries.push((i, i, d[i]));
        }
        SymmetricMatrix::from_triplets(self.n, entries)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let triplets: Vec<Triplet<usize, usize, f64>> = (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| Triplet::new(i, j, v)))
            .collect();
        SparseColMat::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))
    }

    /// Cholesky when the matrix is positive definite, otherwise pivoted LU.
    pub fn factorize(&self) -> Result<Factorization> {
        let a = self.to_faer()?;
        match a.sp_cholesky(Side::Lower) {
            Ok(llt) => Ok(Factorization::Cholesky(llt)),
            Err(_) => a
                .sp_lu()
                .map(Factorization::Lu)
                .map_err(|e| Error::Numerical(format!("sparse factorization failed: {e:?}"))),
        }
    }

    /// Cholesky only; fails if the matrix is not positive definite.
    pub fn factorize_spd(&self) -> Result<Factorization> {
        self.to_faer()?
            .sp_cholesky(Side::Lower)
            .map(Factorization::Cholesky)
            .map_err(|e| Error::Numerical(format!("matrix is not positive definite: {e:?}")))
    }
}

pub enum Factorization {
    Cholesky(faer::sparse::linalg::solvers::Llt<usize, f64>),
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
}

impl Factorization {
    pub fn is_cholesky(&self) -> bool {
        matches!(self, Factorization::Cholesky(_))
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let b = Col::<f64>::from_fn(rhs.len(), |i| rhs[i]);
        let x = match self {
            Factorization::Cholesky(llt) => llt.solve(&b),
            Factorization::Lu(lu) => lu.solve(&b),
        };
        let out: Vec<f64> = (0..rhs.len()).map(|i| x[i]).collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Numerical("linear solve produced non-finite values".into()))
        }
    }
}
