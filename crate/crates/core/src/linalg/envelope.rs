//! Envelope (profile) Cholesky factorization under a reverse Cuthill-McKee
//! ordering. Fill-in of a Cholesky factor stays inside the row envelope, so
//! each row is stored densely from its first nonzero to the diagonal.

use std::collections::VecDeque;

use super::csr::CsrMatrix;
use super::SolveError;

pub(crate) struct EnvelopeCholesky {
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// First column of each permuted row.
    first: Vec<usize>,
    /// Offset of each row's segment in `vals`.
    offset: Vec<usize>,
    vals: Vec<f64>,
}

impl EnvelopeCholesky {
    pub(crate) fn new(a: &CsrMatrix) -> Result<Self, SolveError> {
        let n = a.nrows();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for &j in a.row(old).0 {
                let jn = inv[j];
                if jn < first[i] {
                    first[i] = jn;
                }
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + (i - first[i] + 1));
        }
        let mut vals = vec![0.0; offset[n]];
        for old in 0..n {
            let i = inv[old];
            let (cols, vs) = a.row(old);
            for (&j, &v) in cols.iter().zip(vs) {
                let jn = inv[j];
                if jn <= i {
                    vals[offset[i] + jn - first[i]] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let oi = offset[i];
            for j in fi..i {
                let fj = first[j];
                let oj = offset[j];
                let k0 = fi.max(fj);
                let mut s = vals[oi + j - fi];
                for k in k0..j {
                    s -= vals[oi + k - fi] * vals[oj + k - fj];
                }
                vals[oi + j - fi] = s / vals[oj + j - fj];
            }
            let mut d = vals[oi + i - fi];
            for k in fi..i {
                let l = vals[oi + k - fi];
                d -= l * l;
            }
            if !d.is_finite() || d <= 0.0 {
                return Err(SolveError::NotPositiveDefinite { row: perm[i] });
            }
            vals[oi + i - fi] = d.sqrt();
        }
        Ok(Self {
            perm,
            first,
            offset,
            vals,
        })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let (fi, oi) = (self.first[i], self.offset[i]);
            let row = &self.vals[oi..oi + i - fi];
            let s = row
                .iter()
                .zip(&y[fi..i])
                .fold(y[i], |s, (l, yk)| s - l * yk);
            y[i] = s / self.vals[oi + i - fi];
        }
        for i in (0..n).rev() {
            let (fi, oi) = (self.first[i], self.offset[i]);
            y[i] /= self.vals[oi + i - fi];
            let yi = y[i];
            for (yk, l) in y[fi..i].iter_mut().zip(&self.vals[oi..oi + i - fi]) {
                *yk -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    /// Stored entries of the factor.
    #[allow(dead_code)]
    pub(crate) fn envelope_size(&self) -> usize {
        self.vals.len()
    }
}

/// Reverse Cuthill-McKee ordering of the symmetric pattern of `a`, started
/// in each connected component from a pseudo-peripheral vertex.
pub(crate) fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let neighbors = |i: usize| a.row(i).0.iter().copied().filter(move |&j| j != i);
    let degree: Vec<usize> = (0..n).map(|i| neighbors(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, mark: &mut Vec<usize>, stamp: usize| -> (usize, usize) {
        // returns (eccentricity, a farthest vertex of minimum degree)
        let mut queue = VecDeque::from([(start, 0usize)]);
        mark[start] = stamp;
        let (mut ecc, mut far) = (0, start);
        while let Some((v, d)) = queue.pop_front() {
            if d > ecc || (d == ecc && degree[v] < degree[far]) {
                ecc = d;
                far = v;
            }
            for w in neighbors(v) {
                if mark[w] != stamp {
                    mark[w] = stamp;
                    queue.push_back((w, d + 1));
                }
            }
        }
        (ecc, far)
    };

    let mut mark = vec![usize::MAX; n];
    let mut stamp = 0;
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral start vertex
        let mut start = seed;
        let (mut ecc, mut far) = bfs_levels(start, &mut mark, stamp);
        stamp += 1;
        loop {
            let (e2, f2) = bfs_levels(far, &mut mark, stamp);
            stamp += 1;
            if e2 <= ecc {
                break;
            }
            start = far;
            ecc = e2;
            far = f2;
        }
        let component_start = order.len();
        visited[start] = true;
        order.push(start);
        let mut head = component_start;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = neighbors(v).filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    order
}
