//! Matrices of the discrete fourth-order bilinear forms.
//!
//! With `L` the recovered Laplacian, `M` the mass matrix and, per boundary
//! edge `e = (a, b)` with normal `n`:
//!
//! * `N` the trace of `G_h v · n` at `a` and `b`,
//! * `B` the trace of the second-order quantity at `a` and `b`,
//! * `W_e = |e|/6 [[2, 1], [1, 2]]` the edge mass matrix, `γ_e = C/|e|`,
//!
//! the Nitsche forms are `Σ XᵀMX − BᵀWN − NᵀWB + NᵀΓWN`.

use crate::fem::mass_matrix;
use crate::linalg::CsrMatrix;
use crate::mesh::Mesh;
use crate::recovery::{BoundaryMode, RecoveryOperator};

/// Sum of weighted rows of several matrices, as one sparse row.
fn combined_row(terms: &[(f64, &CsrMatrix, usize)]) -> Vec<(usize, f64)> {
    let mut row = Vec::new();
    for &(c, m, i) in terms {
        if c != 0.0 {
            let (cols, vals) = m.row(i);
            row.extend(cols.iter().zip(vals).map(|(&j, &v)| (j, c * v)));
        }
    }
    row
}

/// Two trace rows per boundary edge, one per endpoint.
fn edge_traces<F>(mesh: &Mesh, row: F) -> CsrMatrix
where
    F: Fn([f64; 2], usize) -> Vec<(usize, f64)>,
{
    let rows = mesh
        .boundary_edges()
        .iter()
        .flat_map(|e| e.vertices.map(|v| row(e.normal, v)))
        .collect();
    CsrMatrix::from_rows(mesh.num_vertices(), rows)
}

/// Block-diagonal edge mass matrix, scaled per edge by `scale(|e|)`.
fn edge_mass<F: Fn(f64) -> f64>(mesh: &Mesh, scale: F) -> CsrMatrix {
    let mut t = Vec::with_capacity(4 * mesh.boundary_edges().len());
    for (k, e) in mesh.boundary_edges().iter().enumerate() {
        let c = scale(e.length) * e.length / 6.0;
        let (a, b) = (2 * k, 2 * k + 1);
        t.extend([(a, a, 2.0 * c), (a, b, c), (b, a, c), (b, b, 2.0 * c)]);
    }
    let n = 2 * mesh.boundary_edges().len();
    CsrMatrix::from_triplets(n, n, &t)
}

fn normal_gradient_trace(mesh: &Mesh, rec: &RecoveryOperator) -> CsrMatrix {
    edge_traces(mesh, |n, v| {
        combined_row(&[(n[0], &rec.gx, v), (n[1], &rec.gy, v)])
    })
}

/// `−BᵀWN − NᵀWB + NᵀΓWN`
fn nitsche_terms(mesh: &Mesh, b: &CsrMatrix, n: &CsrMatrix, nitsche_c: f64) -> CsrMatrix {
    let w = edge_mass(mesh, |_| 1.0);
    let gw = edge_mass(mesh, |len| nitsche_c / len);
    let bwn = b.transpose().matmul(&w.matmul(n));
    let penalty = n.transpose().matmul(&gw.matmul(n));
    CsrMatrix::linear_combination(&[(-1.0, &bwn), (-1.0, &bwn.transpose()), (1.0, &penalty)])
}

/// `XᵀMX`
fn gram(x: &CsrMatrix, m: &CsrMatrix) -> CsrMatrix {
    x.transpose().matmul(&m.matmul(x))
}

fn expect_ls_patch(rec: &RecoveryOperator) {
    assert_eq!(
        rec.boundary_mode,
        BoundaryMode::LsPatch,
        "Nitsche forms need the least-squares gradient recovery"
    );
}

/// Nitsche form built on the recovered Laplacian.
pub fn assemble_a1h(mesh: &Mesh, rec: &RecoveryOperator, nitsche_c: f64) -> CsrMatrix {
    expect_ls_patch(rec);
    let m = mass_matrix(mesh);
    let b = edge_traces(mesh, |_, v| combined_row(&[(1.0, &rec.lap, v)]));
    let n = normal_gradient_trace(mesh, rec);
    let a = CsrMatrix::linear_combination(&[
        (1.0, &gram(&rec.lap, &m)),
        (1.0, &nitsche_terms(mesh, &b, &n, nitsche_c)),
    ]);
    a.symmetric_part()
}

/// Nitsche form built on the recovered Hessian, with the Frobenius inner
/// product in the volume term and `nᵀ H_h v n` on the boundary.
pub fn assemble_a2h(mesh: &Mesh, rec: &RecoveryOperator, nitsche_c: f64) -> CsrMatrix {
    expect_ls_patch(rec);
    let m = mass_matrix(mesh);
    let volume = CsrMatrix::linear_combination(&[
        (1.0, &gram(&rec.hxx, &m)),
        (2.0, &gram(&rec.hxy, &m)),
        (1.0, &gram(&rec.hyy, &m)),
    ]);
    let b = edge_traces(mesh, |n, v| {
        combined_row(&[
            (n[0] * n[0], &rec.hxx, v),
            (2.0 * n[0] * n[1], &rec.hxy, v),
            (n[1] * n[1], &rec.hyy, v),
        ])
    });
    let n = normal_gradient_trace(mesh, rec);
    let a = CsrMatrix::linear_combination(&[
        (1.0, &volume),
        (1.0, &nitsche_terms(mesh, &b, &n, nitsche_c)),
    ]);
    a.symmetric_part()
}

/// `LᵀML` with the ghost-point Laplacian; no boundary terms, since the
/// Neumann condition is part of `L`.
pub fn assemble_a3h(mesh: &Mesh, ghost: &RecoveryOperator) -> CsrMatrix {
    assert_eq!(
        ghost.boundary_mode,
        BoundaryMode::GhostPoint,
        "expected the ghost-point Laplacian"
    );
    gram(&ghost.lap, &mass_matrix(mesh)).symmetric_part()
}
