//! Graph-state stabilizers and the products that survive a bulk X measurement.
//!
//! Every element carries both the list of generators `G_u` it is built from
//! and a support claim written down independently from the closed forms.
//! [`verify_factorization`] multiplies the generators out and compares.

use serde::Serialize;

use crate::atg::{AtgGraph, MeasurementPattern, VertexId};
use crate::code::LogicalBasis;
use crate::error::{AtgError, Result};
use crate::gf2::BitVector;

/// `G_u = X_u Z_{N(u)}` as vertex-indexed supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphStabilizer {
    pub center: usize,
    pub x: BitVector,
    pub z: BitVector,
}

pub fn graph_stabilizer(g: &AtgGraph, u: VertexId) -> Result<GraphStabilizer> {
    Ok(graph_stabilizer_at(g, g.index_of(u)?))
}

pub fn graph_stabilizer_at(g: &AtgGraph, u: usize) -> GraphStabilizer {
    let nv = g.num_vertices();
    GraphStabilizer {
        center: u,
        x: BitVector::from_support(nv, &[u]),
        z: BitVector::from_support(nv, g.neighbors(u)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerKind {
    MetaCheckZ,
    MetaCheckX,
    BoundaryZCheck,
    BoundaryXCheck,
    LogicalXX,
    LogicalZZ,
}

impl StabilizerKind {
    pub fn is_meta(self) -> bool {
        matches!(self, StabilizerKind::MetaCheckZ | StabilizerKind::MetaCheckX)
    }
}

/// An element of the measured-bulk stabilizer groups. All supports are
/// indexed by ATG vertex; which vertices count as bulk is fixed by the
/// measurement pattern the element was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerElement {
    pub kind: StabilizerKind,
    /// Check index or logical index, depending on `kind`.
    pub index: usize,
    /// Layer of a meta-check, or the surface of a boundary check.
    pub layer: usize,
    /// Position of the surface pair for pairwise ZZ elements.
    pub pair: Option<usize>,
    pub generators: Vec<usize>,
    pub bulk_x: BitVector,
    pub boundary_x: BitVector,
    pub boundary_z: BitVector,
}

impl StabilizerElement {
    fn new(g: &AtgGraph, kind: StabilizerKind, index: usize, layer: usize) -> Self {
        let nv = g.num_vertices();
        Self {
            kind,
            index,
            layer,
            pair: None,
            generators: Vec::new(),
            bulk_x: BitVector::zeros(nv),
            boundary_x: BitVector::zeros(nv),
            boundary_z: BitVector::zeros(nv),
        }
    }

    pub fn label(&self) -> String {
        let kind = match self.kind {
            StabilizerKind::MetaCheckZ => "meta_z",
            StabilizerKind::MetaCheckX => "meta_x",
            StabilizerKind::BoundaryZCheck => "check_z",
            StabilizerKind::BoundaryXCheck => "check_x",
            StabilizerKind::LogicalXX => "logical_x",
            StabilizerKind::LogicalZZ => "logical_zz",
        };
        match self.pair {
            Some(p) => format!("{kind}[{}] pair {p}", self.index),
            None => format!("{kind}[{}] layer {}", self.index, self.layer),
        }
    }

    /// Parity of the overlap between the bulk X support and `v`.
    pub fn bulk_parity(&self, v: &BitVector) -> bool {
        self.bulk_x.dot(v)
    }
}

/// Result of multiplying out an element's generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub ok: bool,
    /// Vertices where the product disagrees with the claim.
    pub stray: Vec<usize>,
    /// Vertices carrying both X and Z in the product.
    pub y_sites: Vec<usize>,
    pub negative_phase: bool,
}

/// Product of generators as `(sign, x, z)` with the operator read as `(-1)^sign X(x) Z(z)`.
pub fn multiply_generators(g: &AtgGraph, generators: &[usize]) -> (bool, BitVector, BitVector) {
    let nv = g.num_vertices();
    let mut x = BitVector::zeros(nv);
    let mut z = BitVector::zeros(nv);
    let mut sign = false;
    for &u in generators {
        let gu = graph_stabilizer_at(g, u);
        // X(a)Z(b) X(c)Z(d) = (-1)^{b.c} X(a+c) Z(b+d)
        sign ^= z.dot(&gu.x);
        x.xor_assign(&gu.x);
        z.xor_assign(&gu.z);
    }
    (sign, x, z)
}

pub fn verify_factorization(
    g: &AtgGraph,
    pattern: &MeasurementPattern,
    e: &StabilizerElement,
) -> FactorizationReport {
    let (sign, x, z) = multiply_generators(g, &e.generators);
    let measured = &pattern.measured;
    let unmeasured = pattern.unmeasured();

    let mut claimed_x = e.bulk_x.and(measured);
    claimed_x.xor_assign(&e.boundary_x.and(&unmeasured));
    let claimed_z = e.boundary_z.and(&unmeasured);

    // claims that put bulk support off the measured set are themselves wrong
    let mut stray = x.xor(&claimed_x);
    stray.or_assign(&z.xor(&claimed_z));
    stray.or_assign(&e.bulk_x.and(&unmeasured));
    stray.or_assign(&e.boundary_x.and(measured));
    stray.or_assign(&e.boundary_z.and(measured));

    let y_sites = x.and(&z).support();
    let meta_with_boundary =
        e.kind.is_meta() && !(e.boundary_x.is_zero() && e.boundary_z.is_zero());
    let stray = stray.support();
    FactorizationReport {
        ok: stray.is_empty() && y_sites.is_empty() && !sign && !meta_with_boundary,
        stray,
        y_sites,
        negative_phase: sign,
    }
}

pub fn verify_all(
    g: &AtgGraph,
    pattern: &MeasurementPattern,
    elements: &[StabilizerElement],
) -> Result<()> {
    for e in elements {
        let r = verify_factorization(g, pattern, e);
        if !r.ok {
            return Err(AtgError::Factorization {
                label: e.label(),
                stray: r.stray.len() + r.y_sites.len(),
            });
        }
    }
    Ok(())
}

/// Meta-checks for a pattern leaving the code qubits of `surfaces` unmeasured:
/// one Z meta-check per even layer and Z check, one X meta-check per odd
/// layer strictly inside the stack that is not itself a surface.
pub fn meta_checks_for(g: &AtgGraph, surfaces: &[usize]) -> Vec<StabilizerElement> {
    let code = &g.code;
    let mut out = Vec::new();
    for t in (2..g.layers).step_by(2) {
        for c in 0..code.m_z {
            out.push(meta_element(g, StabilizerKind::MetaCheckZ, c, t, &code.z_check_support(c)));
        }
    }
    for t in (3..g.layers.saturating_sub(1)).step_by(2) {
        if surfaces.contains(&t) {
            continue;
        }
        for c in 0..code.m_x {
            out.push(meta_element(g, StabilizerKind::MetaCheckX, c, t, &code.x_check_support(c)));
        }
    }
    out
}

fn meta_element(
    g: &AtgGraph,
    kind: StabilizerKind,
    c: usize,
    t: usize,
    qubits: &[usize],
) -> StabilizerElement {
    let mut e = StabilizerElement::new(g, kind, c, t);
    let below = g.check_vertex(c, t - 1);
    let above = g.check_vertex(c, t + 1);
    e.generators.push(below);
    e.generators.push(above);
    e.generators.extend(qubits.iter().map(|&i| g.code_vertex(i, t)));
    e.bulk_x.set(below, true);
    e.bulk_x.set(above, true);
    for &i in qubits {
        e.bulk_x.set(g.code_vertex(i, t), true);
    }
    e
}

pub fn meta_checks(g: &AtgGraph) -> Vec<StabilizerElement> {
    meta_checks_for(g, &[1, g.layers])
}

/// Z check `c` read on surface `t`: the single generator `G_(c,t)`.
pub(crate) fn surface_z_check(g: &AtgGraph, c: usize, t: usize) -> StabilizerElement {
    let mut e = StabilizerElement::new(g, StabilizerKind::BoundaryZCheck, c, t);
    let v = g.check_vertex(c, t);
    e.generators.push(v);
    e.bulk_x.set(v, true);
    for i in g.code.z_check_support(c) {
        e.boundary_z.set(g.code_vertex(i, t), true);
    }
    e
}

/// X check `c` on an outer surface `t`, closed off through the single
/// neighbouring X-check layer `inner`.
pub(crate) fn end_surface_x_check(g: &AtgGraph, c: usize, t: usize, inner: usize) -> StabilizerElement {
    let mut e = StabilizerElement::new(g, StabilizerKind::BoundaryXCheck, c, t);
    let v = g.check_vertex(c, inner);
    e.generators.push(v);
    e.bulk_x.set(v, true);
    for i in g.code.x_check_support(c) {
        let q = g.code_vertex(i, t);
        e.generators.push(q);
        e.boundary_x.set(q, true);
    }
    e
}

/// Boundary-code checks of the two outer surfaces: Z checks on layer 1,
/// X checks on layer 1, then the same on the last layer.
pub fn boundary_code_stabilizers(g: &AtgGraph) -> Vec<StabilizerElement> {
    let code = &g.code;
    let last = g.layers;
    let mut out = Vec::new();
    for (t, inner) in [(1, 2), (last, last - 1)] {
        for c in 0..code.m_z {
            out.push(surface_z_check(g, c, t));
        }
        for c in 0..code.m_x {
            out.push(end_surface_x_check(g, c, t, inner));
        }
    }
    out
}

/// The encoded `XX` and `ZZ` elements between the outer surfaces, X first.
pub fn encoded_logical_stabilizers(g: &AtgGraph, lb: &LogicalBasis) -> Vec<StabilizerElement> {
    let last = g.layers;
    let mut out = Vec::new();
    for (j, ax) in lb.x_logicals.iter().enumerate() {
        let mut e = StabilizerElement::new(g, StabilizerKind::LogicalXX, j, 1);
        for t in (1..=last).step_by(2) {
            for i in ax.iter_ones() {
                let q = g.code_vertex(i, t);
                e.generators.push(q);
                if t == 1 || t == last {
                    e.boundary_x.set(q, true);
                } else {
                    e.bulk_x.set(q, true);
                }
            }
        }
        out.push(e);
    }
    for (j, az) in lb.z_logicals.iter().enumerate() {
        let mut e = StabilizerElement::new(g, StabilizerKind::LogicalZZ, j, 1);
        e.pair = Some(0);
        for t in (2..last).step_by(2) {
            for i in az.iter_ones() {
                let q = g.code_vertex(i, t);
                e.generators.push(q);
                e.bulk_x.set(q, true);
            }
        }
        for i in az.iter_ones() {
            e.boundary_z.set(g.code_vertex(i, 1), true);
            e.boundary_z.set(g.code_vertex(i, last), true);
        }
        out.push(e);
    }
    out
}

/// The two stabilizer families of a measurement pattern.
#[derive(Clone, Debug)]
pub struct StabilizerSet {
    pub surfaces: Vec<usize>,
    pub s0: Vec<StabilizerElement>,
    pub s1: Vec<StabilizerElement>,
}

impl StabilizerSet {
    pub fn of_kind(&self, kind: StabilizerKind) -> impl Iterator<Item = (usize, &StabilizerElement)> {
        self.s1.iter().enumerate().filter(move |(_, e)| e.kind == kind)
    }

    pub fn verify(&self, g: &AtgGraph, pattern: &MeasurementPattern) -> Result<()> {
        verify_all(g, pattern, &self.s0)?;
        verify_all(g, pattern, &self.s1)
    }
}

/// S0 and S1 for the two-surface pattern.
pub fn bell_stabilizers(g: &AtgGraph, lb: &LogicalBasis) -> StabilizerSet {
    let mut s1 = boundary_code_stabilizers(g);
    s1.extend(encoded_logical_stabilizers(g, lb));
    StabilizerSet {
        surfaces: vec![1, g.layers],
        s0: meta_checks(g),
        s1,
    }
}

#[derive(Serialize)]
pub struct ElementJson {
    pub label: String,
    pub kind: StabilizerKind,
    pub generators: Vec<usize>,
    pub bulk_x: Vec<usize>,
    pub boundary_x: Vec<usize>,
    pub boundary_z: Vec<usize>,
    pub verified: bool,
}

pub fn element_json(g: &AtgGraph, pattern: &MeasurementPattern, e: &StabilizerElement) -> ElementJson {
    ElementJson {
        label: e.label(),
        kind: e.kind,
        generators: e.generators.clone(),
        bulk_x: e.bulk_x.support(),
        boundary_x: e.boundary_x.support(),
        boundary_z: e.boundary_z.support(),
        verified: verify_factorization(g, pattern, e).ok,
    }
}
