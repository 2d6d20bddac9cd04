//! Graded triangulation of the quarter crack domain.
//!
//! The quarter model is the square [−d, L−d] × [0, L] with the crack tip at
//! the origin, the crack face on y = 0, x < 0 and the ligament on y = 0,
//! x ≥ 0. Around the tip sits a fan of M triangles with apex at the tip and
//! chord outer edges at radius R. Outside the fan the mesh is built from
//! nested level paths that run from the crack face (or left wall) over the
//! top to the ligament (or right wall): half circles near the tip, blending
//! into squares, and finally horizontal lines once both walls are reached.
//! Consecutive paths are stitched into triangle strips, so the mesh is fully
//! determined by the spec.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bell::{triangle_geometry, Point};
use crate::error::{Error, Result};

/// Geometry and refinement parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// Half crack length [m].
    pub d: f64,
    /// Half edge of the full square plate [m].
    #[serde(rename = "L")]
    pub l: f64,
    /// Fan radius [m].
    #[serde(rename = "R")]
    pub r: f64,
    /// Number of fan elements.
    #[serde(rename = "M")]
    pub m: usize,
    /// Geometric growth ratio of element size away from the tip.
    #[serde(default = "default_grading")]
    pub grading: f64,
    /// Largest element size; defaults to L/20.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_max: Option<f64>,
}

fn default_grading() -> f64 {
    1.3
}

impl DomainSpec {
    pub fn new(d: f64, l: f64, r: f64, m: usize) -> Self {
        Self { d, l, r, m, grading: default_grading(), h_max: None }
    }

    /// Width of the ligament, L − d.
    pub fn ligament(&self) -> f64 {
        self.l - self.d
    }

    pub fn h_max(&self) -> f64 {
        self.h_max.unwrap_or(self.l / 20.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MeshGeneration(msg));
        let finite = [self.d, self.l, self.r, self.grading, self.h_max()].iter().all(|v| v.is_finite());
        if !finite {
            return bad("non-finite geometry parameter".into());
        }
        if self.d <= 0.0 || self.l <= self.d {
            return bad(format!("need 0 < d < L, got d = {}, L = {}", self.d, self.l));
        }
        if self.m < 2 || self.m > 64 {
            return bad(format!("fan element count must lie in [2, 64], got {}", self.m));
        }
        let room = 0.25 * self.d.min(self.ligament());
        if self.r <= 0.0 || self.r > room {
            return bad(format!("fan radius {} does not fit; must lie in (0, {room}]", self.r));
        }
        if !(self.grading > 1.0 && self.grading <= 3.0) {
            return bad(format!("grading must lie in (1, 3], got {}", self.grading));
        }
        if self.h_max() <= 0.0 {
            return bad("h_max must be positive".into());
        }
        Ok(())
    }
}

/// Named boundary segments of the quarter model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    CrackFace,
    Ligament,
    LeftSymmetry,
    Top,
    Right,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 5] =
        [BoundaryTag::CrackFace, BoundaryTag::Ligament, BoundaryTag::LeftSymmetry, BoundaryTag::Top, BoundaryTag::Right];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::CrackFace => "crack_face",
            BoundaryTag::Ligament => "ligament",
            BoundaryTag::LeftSymmetry => "left_symmetry",
            BoundaryTag::Top => "top",
            BoundaryTag::Right => "right",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// Set of boundary tags carried by one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct TagSet(u8);

impl TagSet {
    pub fn contains(self, tag: BoundaryTag) -> bool {
        self.0 & tag.bit() != 0
    }

    pub fn insert(&mut self, tag: BoundaryTag) {
        self.0 |= tag.bit();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = BoundaryTag> {
        BoundaryTag::ALL.into_iter().filter(move |t| self.contains(*t))
    }
}

/// A boundary edge and the segment it lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub spec: DomainSpec,
    pub nodes: Vec<Point>,
    /// Counterclockwise node triples.
    pub elements: Vec<[usize; 3]>,
    /// Fan elements, ordered by angle from the ligament to the crack face.
    pub fan: Vec<usize>,
    pub tip_node: usize,
    pub node_tags: Vec<TagSet>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

/// Summary numbers for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshStats {
    pub nodes: usize,
    pub elements: usize,
    pub fan_elements: usize,
    pub min_delta: f64,
    pub min_quality: f64,
    pub min_diameter: f64,
    pub max_diameter: f64,
}

impl Mesh {
    pub fn is_fan(&self, element: usize) -> bool {
        element < self.fan.len() && self.fan[element] == element
    }

    pub fn nodes_with(&self, tag: BoundaryTag) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.node_tags[i].contains(tag)).collect()
    }

    pub fn element_nodes(&self, e: usize) -> [Point; 3] {
        let [a, b, c] = self.elements[e];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    /// Unique undirected edges with the elements that use them.
    pub fn edges(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (e, t) in self.elements.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(e);
            }
        }
        map
    }

    pub fn stats(&self) -> MeshStats {
        let mut s = MeshStats {
            nodes: self.nodes.len(),
            elements: self.elements.len(),
            fan_elements: self.fan.len(),
            min_delta: f64::INFINITY,
            min_quality: f64::INFINITY,
            min_diameter: f64::INFINITY,
            max_diameter: 0.0,
        };
        for e in 0..self.elements.len() {
            let p = self.element_nodes(e);
            let delta = signed_delta(p[0], p[1], p[2]);
            let h = diameter(&p);
            s.min_delta = s.min_delta.min(delta);
            s.min_quality = s.min_quality.min(quality(p[0], p[1], p[2]));
            s.min_diameter = s.min_diameter.min(h);
            s.max_diameter = s.max_diameter.max(h);
        }
        s
    }

    /// Plain-text dump: nodes with tags, elements with a fan flag, tagged
    /// boundary edges. Lines starting with '#' are comments.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let sp = &self.spec;
        writeln!(w, "# quarter crack mesh: d={} L={} R={} M={} grading={} h_max={}", sp.d, sp.l, sp.r, sp.m, sp.grading, sp.h_max())?;
        writeln!(w, "# sections: 'nodes N' then 'id x y tags' (tags comma-separated or '-'),")?;
        writeln!(w, "# 'elements N' then 'id n1 n2 n3 fan' (fan 1 for tip-fan elements),")?;
        writeln!(w, "# 'edges N' then 'n1 n2 tag'; tip node id on the 'tip' line")?;
        writeln!(w, "tip {}", self.tip_node)?;
        writeln!(w, "nodes {}", self.nodes.len())?;
        for (i, (p, t)) in self.nodes.iter().zip(&self.node_tags).enumerate() {
            let tags: Vec<&str> = t.iter().map(BoundaryTag::name).collect();
            let tags = if tags.is_empty() { "-".to_string() } else { tags.join(",") };
            writeln!(w, "{i} {:.17e} {:.17e} {tags}", p[0], p[1])?;
        }
        writeln!(w, "elements {}", self.elements.len())?;
        for (i, t) in self.elements.iter().enumerate() {
            writeln!(w, "{i} {} {} {} {}", t[0], t[1], t[2], u8::from(self.is_fan(i)))?;
        }
        writeln!(w, "edges {}", self.boundary_edges.len())?;
        for e in &self.boundary_edges {
            writeln!(w, "{} {} {}", e.nodes[0], e.nodes[1], e.tag.name())?;
        }
        Ok(())
    }
}

fn signed_delta(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn diameter(p: &[Point; 3]) -> f64 {
    dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
}

/// 4√3·area / Σ edge², 1 for an equilateral triangle.
fn quality(a: Point, b: Point, c: Point) -> f64 {
    let s = dist(a, b).powi(2) + dist(b, c).powi(2) + dist(c, a).powi(2);
    2.0 * 3f64.sqrt() * signed_delta(a, b, c) / s
}

/// A path piece whose end points are mesh nodes.
enum Piece {
    /// Straight segment.
    Line(Point, Point),
    /// Circle/square blend at level s with weight w, swept from angle π to 0.
    Blend { s: f64, w: f64 },
}

impl Piece {
    fn blend_point(s: f64, w: f64, phi: f64) -> Point {
        let (sn, cs) = phi.sin_cos();
        let rho = s * ((1.0 - w) + w / cs.abs().max(sn.abs()));
        [rho * cs, rho * sn]
    }

    /// Nodes along the piece, including both ends, at roughly `h` spacing
    /// and with at least `min_intervals` intervals.
    fn sample(&self, h: f64, min_intervals: usize) -> Vec<Point> {
        match *self {
            Piece::Line(a, b) => {
                let n = ((dist(a, b) / h).round() as usize).max(min_intervals).max(1);
                (0..=n)
                    .map(|i| {
                        if i == n {
                            return b;
                        }
                        let t = i as f64 / n as f64;
                        [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
                    })
                    .collect()
            }
            Piece::Blend { s, w } => {
                const FINE: usize = 4096;
                let pts: Vec<Point> = (0..=FINE).map(|i| Self::blend_point(s, w, PI * (1.0 - i as f64 / FINE as f64))).collect();
                let mut cum = vec![0.0; FINE + 1];
                for i in 1..=FINE {
                    cum[i] = cum[i - 1] + dist(pts[i - 1], pts[i]);
                }
                let total = cum[FINE];
                let n = ((total / h).round() as usize).max(min_intervals).max(1);
                let mut out = Vec::with_capacity(n + 1);
                out.push([-s, 0.0]);
                let mut j = 0;
                for i in 1..n {
                    let target = total * i as f64 / n as f64;
                    while cum[j + 1] < target {
                        j += 1;
                    }
                    let t = (target - cum[j]) / (cum[j + 1] - cum[j]);
                    let phi = PI * (1.0 - (j as f64 + t) / FINE as f64);
                    out.push(Self::blend_point(s, w, phi));
                }
                out.push([s, 0.0]);
                out
            }
        }
    }
}

/// Level path at parameter s, from left to right over the top.
fn level_pieces(s: f64, d: f64, w_lig: f64, top: f64, blend: (f64, f64)) -> Vec<Piece> {
    let (sa, sb) = blend;
    if s < sb {
        let w = ((s - sa) / (sb - sa)).clamp(0.0, 1.0);
        return vec![Piece::Blend { s, w }];
    }
    let y = s.min(top);
    let xl = -(s.min(d));
    let xr = s.min(w_lig);
    let mut pieces = Vec::new();
    if s <= d {
        pieces.push(Piece::Line([-s, 0.0], [-s, y]));
    }
    pieces.push(Piece::Line([xl, y], [xr, y]));
    if s <= w_lig {
        pieces.push(Piece::Line([s, y], [s, 0.0]));
    }
    pieces
}

/// Sequence of level parameters from the fan radius to the top edge.
fn level_values(spec: &DomainSpec) -> Vec<(f64, f64)> {
    let mut targets = vec![spec.d, spec.ligament(), spec.l];
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let g = spec.grading - 1.0;
    let hmax = spec.h_max();
    let mut s = spec.r;
    let mut out = Vec::new();
    for &sigma in &targets {
        while s < sigma {
            let h = (g * s).min(hmax);
            let rem = sigma - s;
            let next = if rem <= 1.5 * h {
                sigma
            } else if rem < 2.5 * h {
                s + 0.5 * rem
            } else {
                s + h
            };
            out.push((next, next - s));
            s = next;
        }
    }
    out
}

struct Builder {
    nodes: Vec<Point>,
    elements: Vec<[usize; 3]>,
}

impl Builder {
    fn add(&mut self, p: Point) -> usize {
        self.nodes.push(p);
        self.nodes.len() - 1
    }

    fn path(&mut self, pieces: &[Piece], h: f64, min_intervals: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = Vec::new();
        for piece in pieces {
            let pts = piece.sample(h, min_intervals);
            let skip = usize::from(!ids.is_empty());
            for p in pts.into_iter().skip(skip) {
                ids.push(self.add(p));
            }
        }
        ids
    }

    /// Triangulate the strip between an inner and an outer path, both
    /// ordered left to right (clockwise about the tip).
    fn zip(&mut self, a: &[usize], b: &[usize]) -> Result<()> {
        let (mut i, mut j) = (0, 0);
        let p = |k: usize| self.nodes[k];
        while i + 1 < a.len() || j + 1 < b.len() {
            let ok = |t: &[usize; 3]| quality(p(t[0]), p(t[1]), p(t[2])) > 1e-3;
            let adv_a = (i + 1 < a.len()).then(|| [a[i], a[i + 1], b[j]]).filter(ok);
            let adv_b = (j + 1 < b.len()).then(|| [a[i], b[j + 1], b[j]]).filter(ok);
            let (pick, along_a) = match (adv_a, adv_b) {
                // shorter new diagonal first
                (Some(ta), Some(tb)) => {
                    if dist(p(a[i + 1]), p(b[j])) <= dist(p(a[i]), p(b[j + 1])) {
                        (ta, true)
                    } else {
                        (tb, false)
                    }
                }
                (Some(ta), None) => (ta, true),
                (None, Some(tb)) => (tb, false),
                (None, None) => {
                    return Err(Error::MeshGeneration(format!(
                        "cannot stitch strip near ({:.3e}, {:.3e})",
                        p(a[i])[0],
                        p(a[i])[1]
                    )))
                }
            };
            if along_a {
                i += 1;
            } else {
                j += 1;
            }
            self.elements.push(pick);
        }
        Ok(())
    }
}

/// Generate the graded quarter mesh for `spec`.
pub fn generate_quarter_mesh(spec: &DomainSpec) -> Result<Mesh> {
    spec.validate()?;
    let (d, l, w_lig, m) = (spec.d, spec.l, spec.ligament(), spec.m);
    let mut b = Builder { nodes: Vec::new(), elements: Vec::new() };

    let tip = b.add([0.0, 0.0]);
    // fan nodes from the crack face (angle π) to the ligament (angle 0)
    let mut inner: Vec<usize> = (0..=m)
        .map(|j| {
            let k = m - j;
            if k == 0 {
                [spec.r, 0.0]
            } else if k == m {
                [-spec.r, 0.0]
            } else {
                let phi = PI * k as f64 / m as f64;
                [spec.r * phi.cos(), spec.r * phi.sin()]
            }
        })
        .map(|p| b.add(p))
        .collect();
    // fan elements ordered from the ligament side; node j of the fan path
    // sits at angle π(m−j)/m
    for k in 0..m {
        let lo = inner[m - k];
        let hi = inner[m - k - 1];
        b.elements.push([tip, lo, hi]);
    }

    let sb = 0.5 * d.min(w_lig);
    let sa = sb / 3.0;
    for (s, h) in level_values(spec) {
        let pieces = level_pieces(s, d, w_lig, l, (sa, sb));
        let min_int = if matches!(pieces[0], Piece::Blend { .. }) { m } else { 1 };
        let outer = b.path(&pieces, h, min_int);
        b.zip(&inner, &outer)?;
        // the next strip starts at the wall corners once a wall is reached
        let first = outer.iter().rposition(|&k| b.nodes[k][0] == -d).unwrap_or(0);
        let last = outer.iter().position(|&k| b.nodes[k][0] == w_lig).unwrap_or(outer.len() - 1);
        inner = outer[first..=last].to_vec();
    }

    let node_tags: Vec<TagSet> = b
        .nodes
        .iter()
        .map(|p| {
            let mut t = TagSet::default();
            if p[1] == 0.0 && p[0] < 0.0 {
                t.insert(BoundaryTag::CrackFace);
            }
            if p[1] == 0.0 && p[0] >= 0.0 {
                t.insert(BoundaryTag::Ligament);
            }
            if p[0] == -d {
                t.insert(BoundaryTag::LeftSymmetry);
            }
            if p[1] == l {
                t.insert(BoundaryTag::Top);
            }
            if p[0] == w_lig {
                t.insert(BoundaryTag::Right);
            }
            t
        })
        .collect();

    let mut mesh = Mesh {
        spec: *spec,
        nodes: b.nodes,
        elements: b.elements,
        fan: (0..m).collect(),
        tip_node: tip,
        node_tags,
        boundary_edges: Vec::new(),
    };

    for e in 0..mesh.elements.len() {
        let g = triangle_geometry(mesh.element_nodes(e))?;
        if g.delta <= 0.0 {
            return Err(Error::MeshGeneration(format!("element {e} is not counterclockwise")));
        }
    }

    let mut edges: Vec<(usize, usize)> = mesh.edges().into_iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| k).collect();
    edges.sort_unstable();
    for (a, c) in edges {
        let (pa, pc) = (mesh.nodes[a], mesh.nodes[c]);
        let mid = [(pa[0] + pc[0]) / 2.0, (pa[1] + pc[1]) / 2.0];
        let tag = if pa[1] == 0.0 && pc[1] == 0.0 {
            if mid[0] < 0.0 {
                BoundaryTag::CrackFace
            } else {
                BoundaryTag::Ligament
            }
        } else if pa[0] == -d && pc[0] == -d {
            BoundaryTag::LeftSymmetry
        } else if pa[1] == l && pc[1] == l {
            BoundaryTag::Top
        } else if pa[0] == w_lig && pc[0] == w_lig {
            BoundaryTag::Right
        } else {
            return Err(Error::MeshGeneration(format!("untagged boundary edge near ({:.3e}, {:.3e})", mid[0], mid[1])));
        };
        mesh.boundary_edges.push(BoundaryEdge { nodes: [a, c], tag });
    }
    Ok(mesh)
}
