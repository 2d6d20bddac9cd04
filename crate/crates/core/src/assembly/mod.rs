//! Global system: DOF numbering, stiffness and load assembly, symmetry
//! constraints, sparse solve and health diagnostics.

mod element;
mod solve;

pub use element::{consistent_edge_load, element_stiffness, ElementMatrix, Enrichment, NODAL};
pub use solve::{solve, solve_model, LinearSystem, Solution, SolveReport};

pub(crate) use element::BMatrices;

use rayon::prelude::*;

use crate::asymptotics::Mode;
use crate::bell::{quadrature, triangle_geometry, RuleId, TriangleGeometry};
use crate::enrichment::EnrichedElement;
use crate::error::{Error, Result};
use crate::material::{ConstitutiveMatrices, MaterialParams};
use crate::mesh::{BoundaryTag, Mesh};

/// DOFs per node: u, u_x, u_y, u_xx, u_xy, u_yy, then the same for v.
pub const NODE_DOFS: usize = 12;

/// Global numbering: 12 DOFs per node followed by the amplitudes K1..K4.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub nodes: usize,
    constrained: Vec<bool>,
}

impl DofMap {
    pub fn new(nodes: usize) -> Self {
        Self { nodes, constrained: vec![false; NODE_DOFS * nodes + 4] }
    }

    pub fn total(&self) -> usize {
        NODE_DOFS * self.nodes + 4
    }

    /// Global index of local DOF `k` (0..12) of `node`.
    pub fn node_dof(&self, node: usize, k: usize) -> usize {
        NODE_DOFS * node + k
    }

    /// Global index of amplitude K_{n+1}.
    pub fn amplitude(&self, n: usize) -> usize {
        NODE_DOFS * self.nodes + n
    }

    /// Global indices of the 36 element DOFs in element order.
    pub fn element_dofs(&self, tri: &[usize; 3]) -> [usize; 36] {
        std::array::from_fn(|i| self.node_dof(tri[i / 12], i % 12))
    }

    pub fn constrain(&mut self, dof: usize) {
        self.constrained[dof] = true;
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn constrained_count(&self) -> usize {
        self.constrained.iter().filter(|c| **c).count()
    }

    /// Map from global DOF to reduced index (None when constrained).
    pub fn free_numbering(&self) -> (Vec<Option<usize>>, usize) {
        let mut next = 0;
        let map = self
            .constrained
            .iter()
            .map(|&c| {
                if c {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        (map, next)
    }
}

// local indices within the 12-DOF node block
const U: usize = 0;
const UX: usize = 1;
const UY: usize = 2;
const UXX: usize = 3;
const UXY: usize = 4;
const UYY: usize = 5;
const V: usize = 6;
const VX: usize = 7;
const VY: usize = 8;
const VXX: usize = 9;
const VXY: usize = 10;
const VYY: usize = 11;

/// Node DOFs fixed on the left symmetry line and on the ligament.
pub fn symmetry_dofs(mode: Mode) -> ([usize; 5], [usize; 5]) {
    match mode {
        Mode::I => ([U, UY, UYY, VX, VXY], [V, VX, VXX, UY, UXY]),
        Mode::II => ([V, VY, VYY, UX, UXY], [U, UX, UXX, VY, VXY]),
    }
}

/// Eliminate the symmetry DOFs of `mode` and the amplitudes that are not
/// in use (all four for conventional runs, the other mode's pair otherwise).
pub fn apply_symmetry_bcs(dofs: &mut DofMap, mesh: &Mesh, mode: Mode, enriched: bool) -> Result<()> {
    let (left, lig) = symmetry_dofs(mode);
    for (tag, set) in [(BoundaryTag::LeftSymmetry, left), (BoundaryTag::Ligament, lig)] {
        let nodes = mesh.nodes_with(tag);
        if nodes.is_empty() {
            return Err(Error::Config(format!("mesh has no '{}' nodes", tag.name())));
        }
        for n in nodes {
            for k in set {
                dofs.constrain(dofs.node_dof(n, k));
            }
        }
    }
    if mode == Mode::II {
        // Rotation about the crack centre satisfies every antisymmetry
        // condition; pin it with v_x = 0 there (strain-free gauge).
        let corner = mesh
            .nodes
            .iter()
            .position(|p| p[0] == -mesh.spec.d && p[1] == 0.0)
            .ok_or_else(|| Error::Config("mesh has no crack-centre node".into()))?;
        dofs.constrain(dofs.node_dof(corner, VX));
    }
    let active = mode.amplitude_indices();
    for n in 0..4 {
        if !enriched || !active.contains(&n) {
            dofs.constrain(dofs.amplitude(n));
        }
    }
    Ok(())
}

/// Applied traction per boundary segment for a loading mode.
pub fn mode_tractions(mode: Mode, t: f64) -> Vec<(BoundaryTag, [f64; 2])> {
    match mode {
        Mode::I => vec![(BoundaryTag::Top, [0.0, t])],
        Mode::II => vec![(BoundaryTag::Top, [t, 0.0]), (BoundaryTag::Right, [0.0, t])],
    }
}

/// Everything that defines one boundary value problem.
#[derive(Debug, Clone)]
pub struct Model {
    pub mesh: Mesh,
    pub material: MaterialParams,
    pub mode: Mode,
    pub enriched: bool,
    pub rule: RuleId,
    /// Applied traction magnitude [Pa].
    pub load: f64,
}

impl Model {
    pub fn constitutive(&self) -> ConstitutiveMatrices {
        self.material.constitutive()
    }

    pub fn geometry(&self, e: usize) -> Result<TriangleGeometry> {
        triangle_geometry(self.mesh.element_nodes(e))
    }

    pub fn amplitude_scale(&self) -> f64 {
        0.25 / self.material.mu
    }

    /// Renormalization data for element `e`, or None for conventional ones.
    pub fn enrichment(&self, e: usize, g: &TriangleGeometry) -> Result<Option<EnrichedElement>> {
        if self.enriched && self.mesh.is_fan(e) {
            Ok(Some(EnrichedElement::new(g, self.mesh.nodes[self.mesh.tip_node], self.material.eta)?))
        } else {
            Ok(None)
        }
    }

    pub fn dof_map(&self) -> Result<DofMap> {
        let mut d = DofMap::new(self.mesh.nodes.len());
        apply_symmetry_bcs(&mut d, &self.mesh, self.mode, self.enriched)?;
        Ok(d)
    }

    /// Global DOF indices of element `e` (36, plus the 4 amplitudes when
    /// enriched).
    pub fn element_dofs(&self, e: usize, dofs: &DofMap) -> Vec<usize> {
        let mut v = dofs.element_dofs(&self.mesh.elements[e]).to_vec();
        if self.enriched && self.mesh.is_fan(e) {
            v.extend((0..4).map(|n| dofs.amplitude(n)));
        }
        v
    }

    /// Unconstrained stiffness triplets and load vector. Element matrices
    /// are computed in parallel and accumulated in element order, so the
    /// result does not depend on the thread count.
    pub fn assemble(&self, dofs: &DofMap) -> Result<(Vec<(usize, usize, f64)>, Vec<f64>)> {
        let cm = self.constitutive();
        let rule = quadrature(self.rule);
        let scale = self.amplitude_scale();
        let mats: Vec<Result<ElementMatrix>> = (0..self.mesh.elements.len())
            .into_par_iter()
            .map(|e| {
                let g = self.geometry(e)?;
                let en = self.enrichment(e, &g)?;
                element_stiffness(&g, &cm, rule, en.as_ref().map(|el| Enrichment { element: el, scale }))
            })
            .collect();
        let mut trip = Vec::with_capacity(mats.len() * 36 * 36);
        for (e, m) in mats.into_iter().enumerate() {
            let m = m?;
            let idx = self.element_dofs(e, dofs);
            for (i, &gi) in idx.iter().enumerate() {
                for (j, &gj) in idx.iter().enumerate() {
                    let v = m.get(i, j);
                    if v != 0.0 {
                        trip.push((gi, gj, v));
                    }
                }
            }
        }
        let f = self.load_vector(dofs)?;
        Ok((trip, f))
    }

    pub fn load_vector(&self, dofs: &DofMap) -> Result<Vec<f64>> {
        let mut f = vec![0.0; dofs.total()];
        let edges = self.mesh.edges();
        let scale = self.amplitude_scale();
        for (tag, traction) in mode_tractions(self.mode, self.load) {
            for be in self.mesh.boundary_edges.iter().filter(|b| b.tag == tag) {
                let [a, b] = be.nodes;
                let e = edges[&(a.min(b), a.max(b))][0];
                let tri = self.mesh.elements[e];
                let la = tri.iter().position(|&n| n == a).unwrap();
                let lb = tri.iter().position(|&n| n == b).unwrap();
                let g = self.geometry(e)?;
                let en = self.enrichment(e, &g)?;
                let fe = consistent_edge_load(&g, [la, lb], traction, en.as_ref().map(|el| Enrichment { element: el, scale }))?;
                for (i, gi) in self.element_dofs(e, dofs).into_iter().enumerate() {
                    f[gi] += fe[i];
                }
            }
        }
        Ok(f)
    }
}
