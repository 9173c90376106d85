use std::collections::BTreeSet;

use super::{Mesh, MeshError, Point};
use crate::recovery::satisfies_rank_condition;

/// Sampling patch of a vertex: the smallest element layer around it whose
/// nodes determine a unique least-squares quadratic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    center: usize,
    layers: usize,
    /// Center first, then ascending vertex index.
    nodes: Vec<usize>,
}

impl Patch {
    pub fn center(&self) -> usize {
        self.center
    }

    pub fn layer_count(&self) -> usize {
        self.layers
    }

    pub fn sample_nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Grows element layers around `z` until the rank condition holds.
///
/// Layer 1 is every triangle containing `z`; each further layer adds the
/// triangles sharing an edge with the previous layer.
pub fn build_patch(mesh: &Mesh, z: usize) -> Result<Patch, MeshError> {
    if z >= mesh.num_vertices() {
        return Err(MeshError::NoSuchVertex { vertex: z });
    }
    let center = mesh.vertex(z);
    let mut triangles: BTreeSet<usize> = mesh.vertex_triangles(z).iter().copied().collect();
    let mut layers = 1;
    loop {
        let nodes = patch_nodes(mesh, z, &triangles);
        let points: Vec<Point> = nodes.iter().map(|&v| mesh.vertex(v)).collect();
        if satisfies_rank_condition(&points, center) {
            return Ok(Patch {
                center: z,
                layers,
                nodes,
            });
        }
        let mut grown = triangles.clone();
        for &t in &triangles {
            grown.extend((0..3).filter_map(|k| mesh.neighbor(t, k)));
        }
        if grown.len() == triangles.len() {
            return Err(MeshError::PatchExhausted { vertex: z });
        }
        triangles = grown;
        layers += 1;
    }
}

fn patch_nodes(mesh: &Mesh, z: usize, triangles: &BTreeSet<usize>) -> Vec<usize> {
    let mut set: BTreeSet<usize> = triangles.iter().flat_map(|&t| mesh.triangle(t)).collect();
    set.remove(&z);
    std::iter::once(z).chain(set).collect()
}
