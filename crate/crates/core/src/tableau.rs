//! Stabilizer tableau simulator (up to 64 qubits) and an end-to-end check of
//! the classical decoding pipeline against simulated measurements.

use rand::Rng;
use serde::Serialize;

use crate::atg::{prep_schedule, AtgGraph};
use crate::code::CssCode;
use crate::decoder::{corrected_syndromes, extract_meta_syndromes, rec, Pipeline};
use crate::error::{AtgError, Result};
use crate::gf2::BitVector;
use crate::mbqc::{
    error_layers_from_eta, foliated_graph, foliated_pattern, record_from_outcomes, ErrorLayers, FoliatedRecord,
};
use crate::noise::{rng_from_seed, sample_error, trial_seed, ErrorPattern, NoiseConfig};
use crate::stabilizers::{graph_stabilizer_at, StabilizerKind};

pub const MAX_QUBITS: usize = 64;

/// `i^phase` times a tensor product of single-qubit Paulis; a qubit with
/// both bits set carries `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { x: 0, z: 0, phase: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        Self { x, z, phase: 0 }
    }

    pub fn x_on(q: usize) -> Self {
        Self::new(1 << q, 0)
    }

    pub fn z_on(q: usize) -> Self {
        Self::new(0, 1 << q)
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    /// `Some(true)` for a leading minus sign, `None` if the phase is imaginary.
    pub fn sign(&self) -> Option<bool> {
        self.is_hermitian().then_some(self.phase == 2)
    }

    pub fn commutes(&self, other: &Pauli) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &Pauli) -> Pauli {
        let mut phase = self.phase as i32 + other.phase as i32;
        let mut active = (self.x | self.z) & (other.x | other.z);
        while active != 0 {
            let q = active.trailing_zeros();
            active &= active - 1;
            let bit = |v: u64| ((v >> q) & 1) as i32;
            phase += g(bit(self.x), bit(self.z), bit(other.x), bit(other.z));
        }
        Pauli {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: phase.rem_euclid(4) as u8,
        }
    }
}

/// Exponent of `i` picked up when the Pauli `(x1, z1)` is multiplied on the right by `(x2, z2)`.
fn g(x1: i32, z1: i32, x2: i32, z2: i32) -> i32 {
    match (x1, z1) {
        (0, 0) => 0,
        (1, 1) => z2 - x2,
        (1, 0) => z2 * (2 * x2 - 1),
        _ => x2 * (1 - 2 * z2),
    }
}

/// Destabilizer/stabilizer tableau of an `n`-qubit stabilizer state.
#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    /// Rows `0..n` are destabilizers, rows `n..2n` stabilizers; all phases real.
    rows: Vec<Pauli>,
}

impl Tableau {
    /// The all-zeros computational basis state.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(AtgError::CapExceeded {
                what: "tableau qubits",
                size: n,
                cap: MAX_QUBITS,
            });
        }
        let mut rows: Vec<Pauli> = (0..n).map(Pauli::x_on).collect();
        rows.extend((0..n).map(Pauli::z_on));
        Ok(Self { n, rows })
    }

    /// `|+>` on every qubit followed by a CZ for every edge.
    pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut t = Self::new(n)?;
        for q in 0..n {
            t.h(q);
        }
        for &(a, b) in edges {
            t.cz(a, b);
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[Pauli] {
        &self.rows[self.n..]
    }

    pub fn h(&mut self, a: usize) {
        let m = 1u64 << a;
        for r in &mut self.rows {
            if r.x & r.z & m != 0 {
                r.phase ^= 2;
            }
            let (xa, za) = (r.x & m, r.z & m);
            r.x = (r.x & !m) | za;
            r.z = (r.z & !m) | xa;
        }
    }

    pub fn s(&mut self, a: usize) {
        let m = 1u64 << a;
        for r in &mut self.rows {
            if r.x & r.z & m != 0 {
                r.phase ^= 2;
            }
            r.z ^= r.x & m;
        }
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1u64 << a, 1u64 << b);
        for r in &mut self.rows {
            let xa = r.x & ma != 0;
            let zb = r.z & mb != 0;
            let xb = r.x & mb != 0;
            let za = r.z & ma != 0;
            if xa && zb && (xb == za) {
                r.phase ^= 2;
            }
            if xa {
                r.x ^= mb;
            }
            if zb {
                r.z ^= ma;
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    pub fn x(&mut self, a: usize) {
        for r in &mut self.rows {
            if r.z >> a & 1 == 1 {
                r.phase ^= 2;
            }
        }
    }

    pub fn z(&mut self, a: usize) {
        for r in &mut self.rows {
            if r.x >> a & 1 == 1 {
                r.phase ^= 2;
            }
        }
    }

    /// Applies a Pauli operator (phase ignored).
    pub fn apply(&mut self, p: &Pauli) {
        for r in &mut self.rows {
            if !r.commutes(p) {
                r.phase ^= 2;
            }
        }
    }

    /// Z-basis measurement; `true` is the `-1` outcome.
    pub fn measure_z<R: Rng>(&mut self, a: usize, rng: &mut R) -> bool {
        let n = self.n;
        let m = 1u64 << a;
        if let Some(p) = (n..2 * n).find(|&i| self.rows[i].x & m != 0) {
            let pivot = self.rows[p];
            for i in 0..2 * n {
                if i != p && self.rows[i].x & m != 0 {
                    self.rows[i] = self.rows[i].mul(&pivot);
                }
            }
            self.rows[p - n] = pivot;
            let outcome: bool = rng.gen();
            let z = Pauli::z_on(a);
            self.rows[p] = if outcome { z.negated() } else { z };
            outcome
        } else {
            self.sign_of_product(|d| d.x & m != 0)
        }
    }

    pub fn measure_x<R: Rng>(&mut self, a: usize, rng: &mut R) -> bool {
        self.h(a);
        let out = self.measure_z(a, rng);
        self.h(a);
        out
    }

    /// Product of the stabilizers whose destabilizers satisfy `pick`; returns its sign.
    fn sign_of_product(&self, pick: impl Fn(&Pauli) -> bool) -> bool {
        let n = self.n;
        let mut acc = Pauli::IDENTITY;
        for i in 0..n {
            if pick(&self.rows[i]) {
                acc = acc.mul(&self.rows[i + n]);
            }
        }
        acc.phase == 2
    }

    /// `Some(false)` if `p` stabilizes the state, `Some(true)` if `-p` does,
    /// `None` if neither. The phase of `p` is taken into account.
    pub fn stabilizer_sign(&self, p: &Pauli) -> Option<bool> {
        if !p.is_hermitian() || self.stabilizers().iter().any(|s| !s.commutes(p)) {
            return None;
        }
        let n = self.n;
        let mut acc = Pauli::IDENTITY;
        for i in 0..n {
            if !self.rows[i].commutes(p) {
                acc = acc.mul(&self.rows[i + n]);
            }
        }
        debug_assert!(acc.x == p.x && acc.z == p.z);
        Some((acc.phase + p.phase) % 4 == 2)
    }
}

/// One trial replayed on a simulated cluster state.
#[derive(Clone, Debug, Serialize)]
pub struct OracleTrial {
    /// Meta-check syndromes read from outcomes equal those predicted from the error.
    pub meta_ok: bool,
    /// After the frame correction every S¹ sign equals its residual syndrome.
    pub residual_ok: bool,
    /// After the residual correction checks are `+1` and logical signs match the flags.
    pub flags_ok: bool,
    /// Every element of S⁰ ∪ S¹ is a graph-state stabilizer with sign `+1`.
    pub product_ok: bool,
    pub fail_x: bool,
    pub fail_z: bool,
}

impl OracleTrial {
    pub fn agrees(&self) -> bool {
        self.meta_ok && self.residual_ok && self.flags_ok && self.product_ok
    }
}

/// Prepares the cluster state, applies `eta`, measures the bulk in X with
/// outcomes drawn from `seed`, and checks each decoder output against the
/// stabilizer signs of the remaining surfaces.
pub fn oracle_trial(p: &Pipeline, eta: &ErrorPattern, seed: u64) -> Result<OracleTrial> {
    let g = &p.graph;
    let (mut t, s) = measure_cluster(g, &p.pattern.measured, &eta.bits, seed)?;

    let mut product_ok = true;
    let mut surface_paulis = Vec::with_capacity(p.set.s1.len());
    let unmeasured = p.pattern.unmeasured();
    let um_mask = to_mask(&unmeasured);
    for e in p.set.s0.iter().chain(&p.set.s1) {
        let k = e
            .generators
            .iter()
            .fold(Pauli::IDENTITY, |acc, &v| acc.mul(&graph_pauli(g, v)));
        let bulk = Pauli::new(k.x & !um_mask, k.z & !um_mask);
        let surf = Pauli {
            x: k.x & um_mask,
            z: k.z & um_mask,
            phase: k.phase,
        };
        product_ok &= bulk.x == to_mask(&e.bulk_x)
            && bulk.z == 0
            && surf.x == to_mask(&e.boundary_x)
            && surf.z == to_mask(&e.boundary_z)
            && k.sign() == Some(false);
        if !e.kind.is_meta() {
            surface_paulis.push(surf);
        }
    }

    let meta = BitVector::from_bits(p.set.s0.iter().map(|e| s.dot(&e.bulk_x)));
    let meta_ok = meta == extract_meta_syndromes(&p.set.s0, eta);

    let trace = p.trace(eta)?;
    let beta = &trace.decode.beta;
    let corrected = corrected_syndromes(&p.set.s1, &s, beta);
    let frame = rec(&p.pattern, &p.set.s1, &corrected)?;
    t.apply(&Pauli::new(to_mask(&frame.x), to_mask(&frame.z)));

    let signs = |t: &Tableau| -> Result<Vec<bool>> {
        surface_paulis
            .iter()
            .map(|q| {
                t.stabilizer_sign(q)
                    .ok_or_else(|| AtgError::Internal("surface element is not a stabilizer".into()))
            })
            .collect()
    };
    let after_frame = signs(&t)?;
    let residual_ok = after_frame
        .iter()
        .enumerate()
        .all(|(i, &b)| b == trace.residual.get(i));

    t.apply(&Pauli::new(to_mask(&trace.rep.rep_z), to_mask(&trace.rep.rep_x)));
    let after_rep = signs(&t)?;
    let (mut xf, mut zf) = (Vec::new(), Vec::new());
    let mut checks_clear = true;
    for (e, &b) in p.set.s1.iter().zip(&after_rep) {
        match e.kind {
            StabilizerKind::LogicalXX => xf.push(b),
            StabilizerKind::LogicalZZ => zf.push(b),
            _ => checks_clear &= !b,
        }
    }
    let flags_ok = checks_clear && xf == trace.rep.logical_x_flags && zf == trace.rep.logical_z_flags;
    Ok(OracleTrial {
        meta_ok,
        residual_ok,
        flags_ok,
        product_ok,
        fail_x: xf.iter().any(|&b| b),
        fail_z: zf.iter().any(|&b| b),
    })
}

/// Cluster state of `g` built gate by gate from the CZ schedule; fails if
/// some graph stabilizer does not stabilize the result with sign `+1`.
pub fn prepare_atg_state(g: &AtgGraph) -> Result<Tableau> {
    let mut t = Tableau::new(g.num_vertices())?;
    for q in 0..g.num_vertices() {
        t.h(q);
    }
    for round in prep_schedule(g) {
        for (a, b) in round {
            t.cz(a, b);
        }
    }
    for v in 0..g.num_vertices() {
        if t.stabilizer_sign(&graph_pauli(g, v)) != Some(false) {
            return Err(AtgError::Internal(format!("graph stabilizer at {} not satisfied", g.vertices[v])));
        }
    }
    Ok(t)
}

/// Prepares the graph state of `g` with the CZ schedule, applies Z on
/// `eta`, and measures `measured` in X in vertex order. Returns the
/// post-measurement tableau and the outcome bits (zero off `measured`).
pub fn measure_cluster(
    g: &AtgGraph,
    measured: &BitVector,
    eta: &BitVector,
    seed: u64,
) -> Result<(Tableau, BitVector)> {
    let nv = g.num_vertices();
    let mut t = prepare_atg_state(g)?;
    for v in eta.iter_ones() {
        t.z(v);
    }
    let mut rng = rng_from_seed(seed);
    let mut s = BitVector::zeros(nv);
    for v in measured.iter_ones() {
        s.set(v, t.measure_x(v, &mut rng));
    }
    Ok((t, s))
}

/// One noisy foliated run: Z errors with probability `p` on measured
/// vertices, raw (not frame-relative) outcomes, and the error locations.
pub fn foliated_run(code: &CssCode, rounds: usize, p: f64, seed: u64) -> Result<(FoliatedRecord, ErrorLayers)> {
    let g = foliated_graph(code, rounds)?;
    let pattern = foliated_pattern(&g);
    let cfg = NoiseConfig::new(p, trial_seed(seed, 0, 0))?;
    let eta = sample_error(&g, &pattern, &cfg);
    let (_, s) = measure_cluster(&g, &pattern.measured, &eta.bits, trial_seed(seed, 1, 0))?;
    Ok((record_from_outcomes(&g, &s), error_layers_from_eta(&g, &eta.bits)))
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleMismatch {
    pub trial: u64,
    pub noise_seed: u64,
    pub measurement_seed: u64,
    pub error_support: Vec<usize>,
    pub result: OracleTrial,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub trials: u64,
    pub failures_x: u64,
    pub failures_z: u64,
    pub mismatches: Vec<OracleMismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs `trials` oracle trials in parallel. Trial `i` draws its error from
/// stream 0 and its measurement outcomes from stream 1 of `seed`.
pub fn oracle_cross_check(p: &Pipeline, prob: f64, trials: u64, seed: u64) -> Result<OracleReport> {
    use rayon::prelude::*;
    NoiseConfig::new(prob, seed)?;
    let results: Vec<(u64, u64, u64, ErrorPattern, OracleTrial)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let noise_seed = trial_seed(seed, 0, i);
            let measurement_seed = trial_seed(seed, 1, i);
            let eta = sample_error(&p.graph, &p.pattern, &NoiseConfig { p: prob, seed: noise_seed });
            let r = oracle_trial(p, &eta, measurement_seed)?;
            Ok((i, noise_seed, measurement_seed, eta, r))
        })
        .collect::<Result<_>>()?;
    let mut report = OracleReport {
        trials,
        failures_x: 0,
        failures_z: 0,
        mismatches: Vec::new(),
    };
    for (trial, noise_seed, measurement_seed, eta, r) in results {
        report.failures_x += r.fail_x as u64;
        report.failures_z += r.fail_z as u64;
        if !r.agrees() {
            report.mismatches.push(OracleMismatch {
                trial,
                noise_seed,
                measurement_seed,
                error_support: eta.bits.support(),
                result: r,
            });
        }
    }
    Ok(report)
}

fn graph_pauli(g: &AtgGraph, v: usize) -> Pauli {
    let k = graph_stabilizer_at(g, v);
    Pauli::new(to_mask(&k.x), to_mask(&k.z))
}

fn to_mask(v: &BitVector) -> u64 {
    v.iter_ones().fold(0, |m, i| m | 1 << i)
}
