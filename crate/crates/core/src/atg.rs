//! The layered alternating Tanner graph and its measurement patterns.

use std::fmt;

use serde::Serialize;

use crate::code::CssCode;
use crate::error::{AtgError, Result};
use crate::gf2::BitVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    CodeQubit,
    XCheck,
    ZCheck,
}

impl VertexKind {
    pub fn tag(self) -> &'static str {
        match self {
            VertexKind::CodeQubit => "q",
            VertexKind::XCheck => "x",
            VertexKind::ZCheck => "z",
        }
    }
}

/// A vertex `(kind, index, layer)`; layers are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub kind: VertexKind,
    pub index: usize,
    pub layer: usize,
}

impl VertexId {
    pub fn code(index: usize, layer: usize) -> Self {
        Self {
            kind: VertexKind::CodeQubit,
            index,
            layer,
        }
    }

    /// The check vertex native to `layer`: Z on odd layers, X on even.
    pub fn check(index: usize, layer: usize) -> Self {
        let kind = if layer % 2 == 1 {
            VertexKind::ZCheck
        } else {
            VertexKind::XCheck
        };
        Self { kind, index, layer }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{},{})", self.kind.tag(), self.index, self.layer)
    }
}

#[derive(Clone, Debug)]
pub struct AtgGraph {
    pub code: CssCode,
    pub t: usize,
    pub layers: usize,
    pub vertices: Vec<VertexId>,
    pub adjacency: Vec<Vec<usize>>,
    /// Sorted pairs `(u, v)` with `u < v`.
    pub edges: Vec<(usize, usize)>,
    pub bulk: BitVector,
    pub boundary: BitVector,
    offsets: Vec<usize>,
}

pub fn build_atg(code: &CssCode, t: usize) -> Result<AtgGraph> {
    if t == 0 {
        return Err(AtgError::InvalidConfig("T must be at least 1".into()));
    }
    Ok(AtgGraph::layered(code, 2 * t + 1, &[1, 2 * t + 1]))
}

impl AtgGraph {
    /// Alternating stack of `layers` layers whose code qubits on
    /// `boundary_layers` form the boundary.
    pub fn layered(code: &CssCode, layers: usize, boundary_layers: &[usize]) -> AtgGraph {
        let checks_on = |t: usize| if t % 2 == 1 { code.m_z } else { code.m_x };
        let mut offsets = vec![0usize; layers + 2];
        let mut vertices = Vec::new();
        for (t, off) in offsets.iter_mut().enumerate().take(layers + 1).skip(1) {
            *off = vertices.len();
            vertices.extend((0..code.n).map(|i| VertexId::code(i, t)));
            vertices.extend((0..checks_on(t)).map(|c| VertexId::check(c, t)));
        }
        offsets[layers + 1] = vertices.len();

        let nv = vertices.len();
        let mut edges = Vec::new();
        for t in 1..=layers {
            let base = offsets[t];
            if t < layers {
                for i in 0..code.n {
                    edges.push((base + i, offsets[t + 1] + i));
                }
            }
            let h = if t % 2 == 1 { &code.h_z } else { &code.h_x };
            for (c, row) in h.row_iter().enumerate() {
                for i in row.iter_ones() {
                    edges.push((base + i, base + code.n + c));
                }
            }
        }
        edges.sort_unstable();

        let mut adjacency = vec![Vec::new(); nv];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nb in adjacency.iter_mut() {
            nb.sort_unstable();
        }

        let mut boundary = BitVector::zeros(nv);
        for &t in boundary_layers {
            for i in 0..code.n {
                boundary.set(offsets[t] + i, true);
            }
        }
        let mut bulk = BitVector::ones(nv);
        bulk.xor_assign(&boundary);

        AtgGraph {
            code: code.clone(),
            t: layers / 2,
            layers,
            vertices,
            adjacency,
            edges,
            bulk,
            boundary,
            offsets,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, v: VertexId) -> Result<usize> {
        let unknown = || AtgError::InvalidConfig(format!("vertex {v} is not in the graph"));
        if v.layer == 0 || v.layer > self.layers {
            return Err(unknown());
        }
        let base = self.offsets[v.layer];
        let (checks, kind) = if v.layer % 2 == 1 {
            (self.code.m_z, VertexKind::ZCheck)
        } else {
            (self.code.m_x, VertexKind::XCheck)
        };
        match v.kind {
            VertexKind::CodeQubit if v.index < self.code.n => Ok(base + v.index),
            k if k == kind && v.index < checks => Ok(base + self.code.n + v.index),
            _ => Err(unknown()),
        }
    }

    /// Index of code qubit `i` on layer `t`. Panics if out of range.
    pub fn code_vertex(&self, i: usize, t: usize) -> usize {
        assert!(i < self.code.n && (1..=self.layers).contains(&t));
        self.offsets[t] + i
    }

    /// Index of check `c` on layer `t` (Z on odd, X on even). Panics if out of range.
    pub fn check_vertex(&self, c: usize, t: usize) -> usize {
        assert!((1..=self.layers).contains(&t));
        assert!(c < self.checks_on_layer(t), "check {c} out of range on layer {t}");
        self.offsets[t] + self.code.n + c
    }

    pub fn checks_on_layer(&self, t: usize) -> usize {
        if t % 2 == 1 {
            self.code.m_z
        } else {
            self.code.m_x
        }
    }

    /// Range of vertex indices on layer `t`.
    pub fn layer_range(&self, t: usize) -> std::ops::Range<usize> {
        self.offsets[t]..self.offsets[t + 1]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    /// Code-qubit slice of a vertex-indexed vector on layer `t`.
    pub fn code_slice(&self, v: &BitVector, t: usize) -> BitVector {
        v.slice(self.offsets[t], self.code.n)
    }

    /// Check slice of a vertex-indexed vector on layer `t`.
    pub fn check_slice(&self, v: &BitVector, t: usize) -> BitVector {
        v.slice(self.offsets[t] + self.code.n, self.checks_on_layer(t))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| (v.kind.tag().to_string(), v.index, v.layer))
                .collect(),
            edges: self.edges.clone(),
            bulk: self.bulk.support(),
            boundary: self.boundary.support(),
        }
    }
}

#[derive(Serialize)]
pub struct GraphJson {
    pub vertices: Vec<(String, usize, usize)>,
    pub edges: Vec<(usize, usize)>,
    pub bulk: Vec<usize>,
    pub boundary: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPattern {
    pub measured: BitVector,
    pub unmeasured_layers: Vec<usize>,
}

impl MeasurementPattern {
    /// Everything measured except the code qubits on `layers`.
    pub fn leaving_layers(g: &AtgGraph, layers: &[usize]) -> Self {
        let mut measured = BitVector::ones(g.num_vertices());
        let mut sorted = layers.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &t in &sorted {
            for i in 0..g.code.n {
                measured.set(g.code_vertex(i, t), false);
            }
        }
        Self {
            measured,
            unmeasured_layers: sorted,
        }
    }

    pub fn unmeasured(&self) -> BitVector {
        let mut u = BitVector::ones(self.measured.len());
        u.xor_assign(&self.measured);
        u
    }
}

pub fn bell_pattern(g: &AtgGraph) -> MeasurementPattern {
    MeasurementPattern::leaving_layers(g, &[1, g.layers])
}

/// Greedy proper edge colouring in canonical edge order; each colour class is one CZ layer.
pub fn prep_schedule(g: &AtgGraph) -> Vec<Vec<(usize, usize)>> {
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices()];
    let mut layers: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(u, v) in &g.edges {
        let color = (0..)
            .find(|c| !used[u].contains(c) && !used[v].contains(c))
            .expect("unbounded search");
        if color == layers.len() {
            layers.push(Vec::new());
        }
        layers[color].push((u, v));
        used[u].push(color);
        used[v].push(color);
    }
    layers
}
