use super::csr::CsrMatrix;
use super::SolveError;

pub(crate) trait Precondition: Send + Sync {
    /// `z = P⁻¹ r`
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub(crate) struct Identity;

impl Precondition for Identity {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

pub(crate) struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub(crate) fn new(a: &CsrMatrix) -> Result<Self, SolveError> {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                if d > 0.0 {
                    Ok(1.0 / d)
                } else {
                    Err(SolveError::NotPositiveDefinite { row: i })
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { inv_diag })
    }
}

impl Precondition for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), d) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * d;
        }
    }
}

/// Zero fill-in incomplete Cholesky factor `L` on the lower pattern of `A`,
/// stored by rows with the diagonal last.
pub(crate) struct IncompleteCholesky {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    /// Diagonal shift `α` that was needed to factor `A + α·diag(A)`.
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) shift: f64,
}

impl IncompleteCholesky {
    pub(crate) fn new(a: &CsrMatrix) -> Result<Self, SolveError> {
        let diag = a.diagonal();
        if let Some(i) = diag.iter().position(|&d| d <= 0.0) {
            return Err(SolveError::NotPositiveDefinite { row: i });
        }
        let mut shift = 0.0;
        for _ in 0..40 {
            if let Some(f) = Self::try_factor(a, &diag, shift) {
                return Ok(f);
            }
            shift = if shift == 0.0 { 1e-3 } else { 2.0 * shift };
        }
        Err(SolveError::NotPositiveDefinite { row: 0 })
    }

    #[allow(clippy::needless_range_loop)]
    fn try_factor(a: &CsrMatrix, diag: &[f64], shift: f64) -> Option<Self> {
        let n = a.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            let (acols, avals) = a.row(i);
            let start = cols.len();
            for (&j, &v) in acols.iter().zip(avals) {
                if j < i {
                    cols.push(j);
                    vals.push(v);
                }
            }
            // off-diagonal entries, ascending in j
            for p in start..cols.len() {
                let k = cols[p];
                let (ks, ke) = (row_ptr[k], row_ptr[k + 1] - 1);
                // Σ_{j<k} L[i,j] L[k,j] over the shared pattern
                let (mut q, mut r) = (start, ks);
                let mut s = 0.0;
                while q < p && r < ke {
                    match cols[q].cmp(&cols[r]) {
                        std::cmp::Ordering::Less => q += 1,
                        std::cmp::Ordering::Greater => r += 1,
                        std::cmp::Ordering::Equal => {
                            s += vals[q] * vals[r];
                            q += 1;
                            r += 1;
                        }
                    }
                }
                vals[p] = (vals[p] - s) / vals[ke];
            }
            let off: f64 = vals[start..].iter().map(|v| v * v).sum();
            let d = diag[i] * (1.0 + shift) - off;
            if !d.is_finite() || d <= 0.0 {
                return None;
            }
            cols.push(i);
            vals.push(d.sqrt());
            row_ptr.push(cols.len());
        }
        Some(Self {
            row_ptr,
            cols,
            vals,
            shift,
        })
    }
}

impl Precondition for IncompleteCholesky {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        // L y = r
        for i in 0..n {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1] - 1);
            let mut acc = r[i];
            for p in s..e {
                acc -= self.vals[p] * z[self.cols[p]];
            }
            z[i] = acc / self.vals[e];
        }
        // Lᵀ x = y, column sweep over the rows of L
        for i in (0..n).rev() {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1] - 1);
            z[i] /= self.vals[e];
            let xi = z[i];
            for p in s..e {
                z[self.cols[p]] -= self.vals[p] * xi;
            }
        }
    }
}
