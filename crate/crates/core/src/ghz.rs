//! Patterns that leave several odd code layers unmeasured, producing an
//! encoded GHZ state across `m` surfaces.

use serde::Serialize;

use crate::atg::{build_atg, AtgGraph, MeasurementPattern};
use crate::cluster::{build_sag, Sag, Side};
use crate::code::{logical_basis, CssCode, LogicalBasis};
use crate::decoder::{DecodeMode, Pipeline};
use crate::error::{AtgError, Result};
use crate::stabilizers::{
    end_surface_x_check, meta_checks_for, surface_z_check, StabilizerElement, StabilizerKind, StabilizerSet,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhzPattern {
    pub m: usize,
    pub layers: Vec<usize>,
    pub delta: usize,
}

/// Evenly spaced odd layers `1 = i_1 < ... < i_m = 2T+1`.
pub fn ghz_layers(t: usize, m: usize) -> Result<GhzPattern> {
    if m < 2 {
        return Err(AtgError::InvalidConfig(format!("need at least 2 surfaces, got {m}")));
    }
    if t < m - 1 {
        return Err(AtgError::Infeasible(format!(
            "{m} surfaces need T >= {}, got T = {t}",
            m - 1
        )));
    }
    let layers: Vec<usize> = (0..m).map(|j| 2 * (j * t / (m - 1)) + 1).collect();
    let delta = layers.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(0);
    Ok(GhzPattern { m, layers, delta })
}

pub fn ghz_measurement(g: &AtgGraph, pattern: &GhzPattern) -> MeasurementPattern {
    MeasurementPattern::leaving_layers(g, &pattern.layers)
}

/// X check `c` on an interior surface `t`, closed through both neighbouring X-check layers.
fn in_plane_x_check(g: &AtgGraph, c: usize, t: usize) -> StabilizerElement {
    let mut e = end_surface_x_check(g, c, t, t - 1);
    let above = g.check_vertex(c, t + 1);
    e.generators.insert(1, above);
    e.bulk_x.set(above, true);
    e
}

/// Per-surface code checks, one global logical X per logical qubit and one
/// logical ZZ per logical qubit and consecutive pair of surfaces.
pub fn ghz_stabilizers(g: &AtgGraph, pattern: &GhzPattern, lb: &LogicalBasis) -> StabilizerSet {
    let code = &g.code;
    let layers = &pattern.layers;
    let last = g.layers;
    let mut s1 = Vec::new();
    for &t in layers {
        for c in 0..code.m_z {
            s1.push(surface_z_check(g, c, t));
        }
        for c in 0..code.m_x {
            s1.push(match t {
                1 => end_surface_x_check(g, c, 1, 2),
                _ if t == last => end_surface_x_check(g, c, last, last - 1),
                _ => in_plane_x_check(g, c, t),
            });
        }
    }
    for (j, ax) in lb.x_logicals.iter().enumerate() {
        let mut e = blank(g, StabilizerKind::LogicalXX, j, 1);
        for t in (1..=last).step_by(2) {
            for i in ax.iter_ones() {
                let q = g.code_vertex(i, t);
                e.generators.push(q);
                if layers.contains(&t) {
                    e.boundary_x.set(q, true);
                } else {
                    e.bulk_x.set(q, true);
                }
            }
        }
        s1.push(e);
    }
    for (j, az) in lb.z_logicals.iter().enumerate() {
        for (pair, w) in layers.windows(2).enumerate() {
            let mut e = blank(g, StabilizerKind::LogicalZZ, j, w[0]);
            e.pair = Some(pair);
            for t in (w[0] + 1..w[1]).filter(|t| t % 2 == 0) {
                for i in az.iter_ones() {
                    let q = g.code_vertex(i, t);
                    e.generators.push(q);
                    e.bulk_x.set(q, true);
                }
            }
            for i in az.iter_ones() {
                e.boundary_z.set(g.code_vertex(i, w[0]), true);
                e.boundary_z.set(g.code_vertex(i, w[1]), true);
            }
            s1.push(e);
        }
    }
    StabilizerSet {
        surfaces: layers.clone(),
        s0: meta_checks_for(g, layers),
        s1,
    }
}

fn blank(g: &AtgGraph, kind: StabilizerKind, index: usize, layer: usize) -> StabilizerElement {
    let nv = g.num_vertices();
    StabilizerElement {
        kind,
        index,
        layer,
        pair: None,
        generators: Vec::new(),
        bulk_x: crate::gf2::BitVector::zeros(nv),
        boundary_x: crate::gf2::BitVector::zeros(nv),
        boundary_z: crate::gf2::BitVector::zeros(nv),
    }
}

/// The Z syndrome adjacency graph with one group of surface nodes per unmeasured layer.
pub fn modified_z_sag(g: &AtgGraph, pattern: &GhzPattern) -> Sag {
    build_sag(g, Side::Z, &pattern.layers)
}

impl Pipeline {
    pub fn ghz(code: &CssCode, t: usize, m: usize, mode: DecodeMode, exact_cap: usize) -> Result<Self> {
        let pattern = ghz_layers(t, m)?;
        let graph = build_atg(code, t)?;
        let meas = ghz_measurement(&graph, &pattern);
        let basis = logical_basis(code);
        let set = ghz_stabilizers(&graph, &pattern, &basis);
        Pipeline::from_parts(graph, meas, set, basis, mode, exact_cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atg::bell_pattern;
    use crate::code::fixtures;
    use crate::stabilizers::bell_stabilizers;

    #[test]
    fn layer_choices() {
        assert_eq!(ghz_layers(2, 3).unwrap().layers, vec![1, 3, 5]);
        assert_eq!(ghz_layers(2, 3).unwrap().delta, 2);
        assert_eq!(ghz_layers(1, 2).unwrap().layers, vec![1, 3]);
        assert!(matches!(ghz_layers(1, 3), Err(AtgError::Infeasible(_))));
        assert_eq!(ghz_layers(4, 3).unwrap().layers, vec![1, 5, 9]);
    }

    #[test]
    fn c422_three_surfaces() {
        let code = fixtures::c422();
        let g = build_atg(&code, 2).unwrap();
        let pat = ghz_layers(2, 3).unwrap();
        let lb = logical_basis(&code);
        let set = ghz_stabilizers(&g, &pat, &lb);
        let checks = set
            .s1
            .iter()
            .filter(|e| matches!(e.kind, StabilizerKind::BoundaryXCheck | StabilizerKind::BoundaryZCheck))
            .count();
        assert_eq!(checks, 6);
        assert_eq!(set.of_kind(StabilizerKind::LogicalXX).count(), 2);
        assert_eq!(set.of_kind(StabilizerKind::LogicalZZ).count(), 4);
        set.verify(&g, &ghz_measurement(&g, &pat)).unwrap();
        let sag = modified_z_sag(&g, &pat);
        for grp in 0..3 {
            assert_eq!(sag.boundary_nodes(grp).len(), 4);
        }
    }

    #[test]
    fn two_surfaces_match_bell() {
        for code in fixtures::all() {
            for t in 1..=3 {
                let g = build_atg(&code, t).unwrap();
                let lb = logical_basis(&code);
                let pat = ghz_layers(t, 2).unwrap();
                let ghz = ghz_stabilizers(&g, &pat, &lb);
                let bell = bell_stabilizers(&g, &lb);
                assert_eq!(ghz.s0, bell.s0);
                assert_eq!(ghz.s1, bell.s1);
                assert_eq!(ghz_measurement(&g, &pat), bell_pattern(&g));
            }
        }
    }
}
