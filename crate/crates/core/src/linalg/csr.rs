use rayon::prelude::*;

/// Rows below this count are multiplied serially.
const PAR_ROWS: usize = 8192;

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Matrix with no stored entries.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from raw CSR arrays, checking the structural invariants.
    pub fn try_from_csr(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, String> {
        if row_ptr.len() != nrows + 1 || row_ptr[0] != 0 {
            return Err("row pointer array has the wrong length or start".into());
        }
        if col_idx.len() != values.len() || *row_ptr.last().unwrap() != col_idx.len() {
            return Err("column/value arrays disagree with row pointers".into());
        }
        for i in 0..nrows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(format!("row pointers decrease at row {i}"));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("row {i} has unsorted or duplicate columns"));
            }
            if cols.last().is_some_and(|&c| c >= ncols) {
                return Err(format!("row {i} has a column index out of range"));
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles from `(row, col, value)` triplets, summing duplicates in
    /// insertion order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of range");
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // bucket by row, keeping insertion order within each row
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut rows = Vec::with_capacity(nrows);
        for i in 0..nrows {
            let mut entries: Vec<(usize, f64)> = cols[counts[i]..counts[i + 1]]
                .iter()
                .copied()
                .zip(vals[counts[i]..counts[i + 1]].iter().copied())
                .collect();
            entries.sort_by_key(|e| e.0);
            rows.push(entries);
        }
        Self::from_sorted_rows(ncols, rows)
    }

    /// Builds from per-row entry lists. Columns must be sorted; equal columns
    /// are summed.
    pub fn from_sorted_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in rows {
            let start = col_idx.len();
            for (j, v) in row {
                assert!(j < ncols, "column {j} out of range");
                if col_idx.len() > start && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    debug_assert!(col_idx.len() == start || *col_idx.last().unwrap() < j);
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Builds from unsorted per-row entry lists.
    pub fn from_rows(ncols: usize, mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
        }
        Self::from_sorted_rows(ncols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "mat-vec dimension mismatch");
        assert_eq!(y.len(), self.nrows, "mat-vec dimension mismatch");
        let row_dot = |i: usize| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum::<f64>()
        };
        if self.nrows >= PAR_ROWS {
            y.par_iter_mut()
                .enumerate()
                .with_min_len(1024)
                .for_each(|(i, yi)| *yi = row_dot(i));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row_dot(i);
            }
        }
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                col_idx[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr: counts,
            col_idx,
            values,
        }
    }

    /// Sparse product `self * rhs` (Gustavson's row-by-row algorithm).
    pub fn matmul(&self, rhs: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "matmul dimension mismatch");
        let ncols = rhs.ncols;
        let rows: Vec<Vec<(usize, f64)>> = (0..self.nrows)
            .into_par_iter()
            .with_min_len(256)
            .map_init(
                || (vec![0.0; ncols], vec![usize::MAX; ncols]),
                |(acc, marker), i| {
                    let mut touched = Vec::new();
                    let (acols, avals) = self.row(i);
                    for (&k, &a) in acols.iter().zip(avals) {
                        let (bcols, bvals) = rhs.row(k);
                        for (&j, &b) in bcols.iter().zip(bvals) {
                            if marker[j] != i {
                                marker[j] = i;
                                acc[j] = 0.0;
                                touched.push(j);
                            }
                            acc[j] += a * b;
                        }
                    }
                    touched.sort_unstable();
                    touched.iter().map(|&j| (j, acc[j])).collect()
                },
            )
            .collect();
        Self::from_sorted_rows(ncols, rows)
    }

    /// `Σ cₖ Aₖ` over matrices of equal shape; the result pattern is the union.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Self {
        assert!(!terms.is_empty(), "empty linear combination");
        let (nrows, ncols) = (terms[0].1.nrows, terms[0].1.ncols);
        for (_, m) in terms {
            assert!(m.nrows == nrows && m.ncols == ncols, "shape mismatch");
        }
        let rows = (0..nrows)
            .map(|i| {
                let mut entries: Vec<(usize, f64)> = Vec::new();
                for &(c, m) in terms {
                    let (cols, vals) = m.row(i);
                    entries.extend(cols.iter().zip(vals).map(|(&j, &v)| (j, c * v)));
                }
                entries.sort_by_key(|e| e.0);
                entries
            })
            .collect();
        Self::from_sorted_rows(ncols, rows)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `(A + Aᵀ)/2`, which is symmetric bit-for-bit.
    pub fn symmetric_part(&self) -> Self {
        let t = self.transpose();
        Self::linear_combination(&[(0.5, self), (0.5, &t)])
    }

    /// Largest `|aᵢⱼ − aⱼᵢ|`; zero means exactly symmetric.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols);
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Row-major dense copy; intended for tests and small debugging matrices.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        out
    }

    /// Max over rows of `|i − j|` for stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.nrows)
            .flat_map(|i| self.row(i).0.iter().map(move |&j| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// Drops entries with `|v| <= tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let rows = (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .filter(|(_, v)| v.abs() > tol)
                    .map(|(&j, &v)| (j, v))
                    .collect()
            })
            .collect();
        Self::from_sorted_rows(self.ncols, rows)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        // [1 -1 0; 0 2 3; 4 0 5]
        CsrMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 1.0),
                (0, 1, -1.0),
                (1, 1, 2.0),
                (1, 2, 3.0),
                (2, 0, 4.0),
                (2, 2, 5.0),
            ],
        )
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (0, 1, 2.5), (1, 0, -1.0)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 3.5);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn matvec_and_transpose() {
        let m = sample();
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![0.0, 5.0, 9.0]);
        let t = m.transpose();
        assert_eq!(t.get(0, 2), 4.0);
        assert_eq!(t.get(2, 1), 3.0);
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn matmul_matches_dense() {
        let m = sample();
        let p = m.matmul(&m.transpose()).to_dense();
        let d = m.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let expect: f64 = (0..3).map(|k| d[i][k] * d[j][k]).sum();
                assert_eq!(p[i][j], expect);
            }
        }
    }

    #[test]
    fn symmetric_part_is_exact() {
        let s = sample().symmetric_part();
        assert_eq!(s.max_asymmetry(), 0.0);
        assert_eq!(s.get(0, 2), 2.0);
    }

    #[test]
    fn rejects_unsorted_columns() {
        let err = CsrMatrix::try_from_csr(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]);
        assert!(err.is_err());
    }
}
