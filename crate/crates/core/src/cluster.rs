//! Syndrome adjacency graphs, mismatch clusters and the threshold bounds.
//!
//! Every node of a syndrome adjacency graph stands for one ATG vertex. The X
//! graph holds the odd-layer code qubits and the even-layer X checks; the Z
//! graph holds the even-layer code qubits, the odd-layer Z checks and one
//! extra group of code qubits per unmeasured surface, attached to that
//! surface's Z checks.

use serde::Serialize;

use crate::atg::{AtgGraph, VertexKind};
use crate::code::CssCode;
use crate::decoder::UnionFind;
use crate::error::{AtgError, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::noise::ErrorPattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    X,
    Z,
}

#[derive(Clone, Debug)]
pub struct Sag {
    pub side: Side,
    /// ATG vertex of each node, ascending.
    pub vertex: Vec<usize>,
    /// Surface group of each node, `None` for bulk nodes.
    pub group: Vec<Option<usize>>,
    /// Surface layer of each group.
    pub surfaces: Vec<usize>,
    pub adjacency: Vec<Vec<usize>>,
    node_of: Vec<Option<usize>>,
}

impl Sag {
    pub fn num_nodes(&self) -> usize {
        self.vertex.len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn node_of_vertex(&self, v: usize) -> Option<usize> {
        self.node_of[v]
    }

    pub fn boundary_nodes(&self, group: usize) -> Vec<usize> {
        (0..self.num_nodes())
            .filter(|&u| self.group[u] == Some(group))
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Pairs of qubits that share a row of `h`.
fn shared_check_pairs(h: &BitMatrix) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for row in h.row_iter() {
        let s = row.support();
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

pub fn build_sag(g: &AtgGraph, side: Side, surfaces: &[usize]) -> Sag {
    let code = &g.code;
    let nv = g.num_vertices();
    let is_surface = |t: usize| surfaces.contains(&t);
    let mut vertex = Vec::new();
    let mut group = Vec::new();
    for (v, id) in g.vertices.iter().enumerate() {
        let odd = id.layer % 2 == 1;
        let keep = match (side, id.kind) {
            (Side::X, VertexKind::CodeQubit) => odd,
            (Side::X, VertexKind::XCheck) => true,
            (Side::Z, VertexKind::CodeQubit) => !odd || is_surface(id.layer),
            (Side::Z, VertexKind::ZCheck) => true,
            _ => false,
        };
        if keep {
            vertex.push(v);
            let grp = if id.kind == VertexKind::CodeQubit && is_surface(id.layer) {
                surfaces.iter().position(|&s| s == id.layer)
            } else {
                None
            };
            group.push(grp);
        }
    }
    let mut node_of = vec![None; nv];
    for (u, &v) in vertex.iter().enumerate() {
        node_of[v] = Some(u);
    }

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut link = |a: usize, b: usize| {
        if let (Some(x), Some(y)) = (node_of[a], node_of[b]) {
            edges.push((x.min(y), x.max(y)));
        }
    };
    let (h, code_parity, check_parity) = match side {
        Side::X => (&code.h_x, 1, 0),
        Side::Z => (&code.h_z, 0, 1),
    };
    let pairs = shared_check_pairs(h);
    for t in 1..=g.layers {
        if t % 2 == code_parity || (side == Side::Z && is_surface(t)) {
            for &(i, j) in &pairs {
                link(g.code_vertex(i, t), g.code_vertex(j, t));
            }
        }
        if t % 2 != check_parity {
            continue;
        }
        for c in 0..h.rows() {
            let cv = g.check_vertex(c, t);
            for i in h.row(c).iter_ones() {
                for u in [t - 1, t + 1] {
                    if u >= 1 && u <= g.layers {
                        link(cv, g.code_vertex(i, u));
                    }
                }
                if side == Side::Z && is_surface(t) {
                    link(cv, g.code_vertex(i, t));
                }
            }
            if t + 2 <= g.layers {
                link(cv, g.check_vertex(c, t + 2));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut adjacency = vec![Vec::new(); vertex.len()];
    for (a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for nb in adjacency.iter_mut() {
        nb.sort_unstable();
    }
    Sag {
        side,
        vertex,
        group,
        surfaces: surfaces.to_vec(),
        adjacency,
        node_of,
    }
}

/// Bulk nodes marked where the true and inferred errors differ; surface
/// nodes marked where the residual correction `rep` acts.
pub fn mark_mismatch(sag: &Sag, eta: &ErrorPattern, beta: &BitVector, rep: &BitVector) -> BitVector {
    BitVector::from_bits(sag.vertex.iter().zip(&sag.group).map(|(&v, grp)| match grp {
        Some(_) => rep.get(v),
        None => eta.bits.get(v) != beta.get(v),
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    #[serde(skip)]
    pub nodes: Vec<usize>,
    pub size: usize,
    pub true_weight: usize,
    pub inferred_weight: usize,
    /// Surface layers the component contains or borders.
    pub touches: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub components: Vec<Component>,
    pub cc_ok: bool,
    pub max_size: usize,
}

/// Maximal connected components of the marked nodes, with per-component
/// weights of the true and inferred errors on bulk nodes.
pub fn components(sag: &Sag, marked: &BitVector, eta: &ErrorPattern, beta: &BitVector) -> ClusterReport {
    let n = sag.num_nodes();
    let mut uf = UnionFind::new(n);
    for u in marked.iter_ones() {
        for &w in &sag.adjacency[u] {
            if marked.get(w) {
                uf.union(u, w);
            }
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in marked.iter_ones() {
        by_root[uf.find(u)].push(u);
    }
    let mut comps = Vec::new();
    for nodes in by_root.into_iter().filter(|c| !c.is_empty()) {
        let mut touched = vec![false; sag.surfaces.len()];
        let (mut true_weight, mut inferred_weight) = (0, 0);
        for &u in &nodes {
            match sag.group[u] {
                Some(gi) => touched[gi] = true,
                None => {
                    let v = sag.vertex[u];
                    true_weight += eta.bits.get(v) as usize;
                    inferred_weight += beta.get(v) as usize;
                    for &w in &sag.adjacency[u] {
                        if let Some(gi) = sag.group[w] {
                            touched[gi] = true;
                        }
                    }
                }
            }
        }
        let touches = sag
            .surfaces
            .iter()
            .zip(&touched)
            .filter(|(_, &t)| t)
            .map(|(&s, _)| s)
            .collect();
        comps.push(Component {
            size: nodes.len(),
            nodes,
            true_weight,
            inferred_weight,
            touches,
        });
    }
    let cc_ok = comps.iter().all(|c| c.touches.len() <= 1);
    let max_size = comps.iter().map(|c| c.size).max().unwrap_or(0);
    ClusterReport {
        components: comps,
        cc_ok,
        max_size,
    }
}

/// Inferred weight never exceeds true weight on any component.
pub fn check_cluster_weight(report: &ClusterReport) -> bool {
    report
        .components
        .iter()
        .all(|c| c.inferred_weight <= c.true_weight)
}

/// Number of `s`-subsets `S ⊇ anchor` of the nodes of `adjacency` such that
/// every connected component of the induced subgraph on `S` meets `anchor`.
pub fn count_connected_sets(adjacency: &[Vec<usize>], anchor: &[usize], s: usize) -> Result<u64> {
    let n = adjacency.len();
    if n > 20 {
        return Err(AtgError::CapExceeded {
            what: "connected-set enumeration",
            size: n,
            cap: 20,
        });
    }
    let nbr: Vec<u32> = adjacency
        .iter()
        .map(|nb| nb.iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let anchor_mask = anchor.iter().fold(0u32, |m, &a| m | (1 << a));
    let t = anchor_mask.count_ones() as usize;
    if s < t || s > n {
        return Ok(0);
    }
    let free: Vec<usize> = (0..n).filter(|&v| anchor_mask & (1 << v) == 0).collect();
    let mut count = 0u64;
    // subsets of the free vertices of size s - t
    let k = s - t;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let set = idx.iter().fold(anchor_mask, |m, &i| m | (1 << free[i]));
        // grow from the anchor inside the set; all of it must be reached
        let mut reach = anchor_mask;
        loop {
            let mut next = reach;
            let mut rest = reach;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                next |= nbr[v] & set;
            }
            if next == reach {
                break;
            }
            reach = next;
        }
        if reach == set {
            count += 1;
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            if idx[i] < free.len() - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return Ok(count);
        }
    }
}

/// Threshold constants for a given LDPC parameter, kept as exact
/// denominators alongside their floating-point values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdBounds {
    pub ell: u64,
    pub z: u64,
    pub p0_denominator: u128,
    pub p1_denominator: u128,
    pub p2_denominator: u128,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p_star: f64,
}

pub fn threshold_bounds(ell: u64) -> Result<ThresholdBounds> {
    if ell == 0 {
        return Err(AtgError::InvalidConfig("ell must be at least 1".into()));
    }
    let z = ell * (ell + 1);
    let base = 8 * z as u128;
    let d0 = base * base;
    let d1 = d0 * d0;
    let (p0, p1) = (1.0 / d0 as f64, 1.0 / d1 as f64);
    Ok(ThresholdBounds {
        ell,
        z,
        p0_denominator: d0,
        p1_denominator: d1,
        p2_denominator: d1,
        p0,
        p1,
        p2: p1,
        p_star: p0.min(p1),
    })
}

/// Bound on a cluster spanning two surfaces: `m (p/p0)^{T/2} / (1 - sqrt(p/p0))`.
pub fn spanning_cluster_bound(m: usize, t: usize, p: f64, b: &ThresholdBounds) -> Result<f64> {
    if !(0.0..b.p0).contains(&p) {
        return Err(AtgError::InvalidConfig(format!("p = {p} must lie in [0, p0)")));
    }
    let r = p / b.p0;
    Ok(m as f64 * r.powf(t as f64 / 2.0) / (1.0 - r.sqrt()))
}

/// Bound on a size-`a` surface set lying inside the residual error, jointly
/// with the clustering condition: `(p/p1)^{a/2} / (1 - (p/p1)^{1/4})`.
pub fn residual_support_bound(a: usize, p: f64, b: &ThresholdBounds) -> Result<f64> {
    if !(0.0..b.p1).contains(&p) {
        return Err(AtgError::InvalidConfig(format!("p = {p} must lie in [0, p1)")));
    }
    let r = p / b.p1;
    Ok(r.powf(a as f64 / 2.0) / (1.0 - r.powf(0.25)))
}

/// Bound on a nontrivial logical correction jointly with the clustering
/// condition: `2 n T (p/p2)^{d/4} / (1 - (p/p2)^{1/4})`.
pub fn logical_error_bound(n: usize, t: usize, d: usize, p: f64, b: &ThresholdBounds) -> Result<f64> {
    if !(0.0..b.p2).contains(&p) {
        return Err(AtgError::InvalidConfig(format!("p = {p} must lie in [0, p2)")));
    }
    let r = p / b.p2;
    Ok(2.0 * (n * t) as f64 * r.powf(d as f64 / 4.0) / (1.0 - r.powf(0.25)))
}

/// Union bound on failure (a spanning cluster or a logical correction, on
/// either side). An upper bound only.
pub fn failure_bound(code: &CssCode, t: usize, p: f64, b: &ThresholdBounds) -> Result<f64> {
    if !(0.0..b.p_star).contains(&p) {
        return Err(AtgError::InvalidConfig(format!(
            "p = {p} must lie below p* = {}",
            b.p_star
        )));
    }
    let d = code
        .d
        .ok_or_else(|| AtgError::InvalidConfig("code distance is unknown".into()))?;
    let mut total = 0.0;
    for m in [code.m_x, code.m_z] {
        total += spanning_cluster_bound(m, t, p, b)?;
        total += logical_error_bound(code.n, t, d, p, b)?;
    }
    Ok(total)
}
