//! Dense symmetric storage and thin wrappers over faer's eigen/SVD routines.

use faer::Mat;

use crate::error::{Error, Result};

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Builds from a full row-major buffer; rejects asymmetric input.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::invalid(format!("expected {} entries, got {}", n * n, data.len())));
        }
        let m = Self { n, data };
        for i in 0..n {
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::invalid(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Writes both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn map_entries<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Symmetric matrix stored as adjacency lists; each off-diagonal entry
/// appears in both endpoint rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSymMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds the pair `(i, j)`, `(j, i)`; callers must not repeat a pair.
    pub fn push_sym(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i != j);
        self.rows[i].push((j, v));
        self.rows[j].push((i, v));
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().map(|&(j, v)| v * x[j]).sum();
        }
    }

    pub fn to_dense(&self) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m.data[i * self.n + j] = v;
            }
        }
        m
    }
}

/// Dense kernels run single-threaded: faer's blocked parallel reductions would
/// make the last bits depend on the pool size. Callers parallelize over replicates.
fn sequential_kernels() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(faer::Parallelism::None));
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    if m.n() == 0 {
        return Ok(Vec::new());
    }
    sequential_kernels();
    let a = m.to_faer();
    let mut ev = a.selfadjoint_eigenvalues(faer::Side::Lower);
    check_finite(&ev)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenvalues ascending and, for one chosen coordinate `r`, the squared
/// overlaps `|⟨e_r, v_j⟩|²` in the same order.
pub fn sym_eigen_with_row(m: &SymMatrix, r: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.n();
    if r >= n {
        return Err(Error::invalid(format!("root index {r} out of range for n = {n}")));
    }
    sequential_kernels();
    let a = m.to_faer();
    let evd = a.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s();
    let u = evd.u();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v = u.read(r, j);
            (s.column_vector().read(j), v * v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (ev, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    check_finite(&ev)?;
    Ok((ev, w))
}

/// Singular values of a general real square matrix given row-major, descending.
pub fn singular_values(n: usize, data: &[f64]) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    sequential_kernels();
    let a = Mat::from_fn(n, n, |i, j| data[i * n + j]);
    let mut sv = a.singular_values();
    check_finite(&sv)?;
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Numerical rank with threshold `n · eps · σ_max`.
pub fn numerical_rank(m: &SymMatrix) -> Result<usize> {
    let n = m.n();
    if n == 0 {
        return Ok(0);
    }
    let ev = sym_eigenvalues(m)?;
    let top = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if top == 0.0 {
        return Ok(0);
    }
    let thr = n as f64 * f64::EPSILON * top;
    Ok(ev.iter().filter(|x| x.abs() > thr).count())
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric("eigensolver returned non-finite values".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = SymMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let ev = sym_eigenvalues(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let (_, w) = sym_eigen_with_row(&m, 0).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-14 && (w[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(SymMatrix::from_row_major(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
    }

    #[test]
    fn rank_of_rank_two() {
        let mut m = SymMatrix::zeros(5);
        m.set_sym(1, 3, 2.0);
        assert_eq!(numerical_rank(&m).unwrap(), 2);
        assert_eq!(numerical_rank(&SymMatrix::zeros(4)).unwrap(), 0);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let sv = singular_values(2, &[3.0, 0.0, 0.0, -4.0]).unwrap();
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }
}
