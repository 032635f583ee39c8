//! Frame-level decoding: meta-check syndromes, minimum-weight bulk
//! inference, the boundary Pauli frame, residual syndromes and the
//! residual-error decomposition.
//!
//! Outcomes are tracked relative to the noiseless reference, so the parity
//! an element reads off the measured string is simply its overlap with the
//! true error `eta`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::atg::{AtgGraph, MeasurementPattern};
use crate::cluster::{self, ClusterReport, Sag, Side};
use crate::code::{logical_basis, CssCode, LogicalBasis};
use crate::error::{AtgError, Result};
use crate::gf2::{self, BitMatrix, BitVector};
use crate::noise::{sample_error, ErrorPattern, NoiseConfig};
use crate::stabilizers::{bell_stabilizers, StabilizerElement, StabilizerKind, StabilizerSet};

pub const DEFAULT_EXACT_CAP: usize = 40;

/// Combinations examined while building a syndrome table.
const TABLE_BUDGET: u64 = 1 << 22;
/// Combinations examined by one fallback search.
const QUERY_BUDGET: u64 = 1 << 24;
/// Largest syndrome space tabulated up front.
const MAX_TABLE_RANK: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    /// Globally minimum weight; blocks above the cap are an error.
    Exact,
    Heuristic,
    /// Exact where the cap allows, heuristic elsewhere.
    Auto,
}

impl fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecodeMode::Exact => "exact",
            DecodeMode::Heuristic => "heuristic",
            DecodeMode::Auto => "auto",
        })
    }
}

impl FromStr for DecodeMode {
    type Err = AtgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DecodeMode::Exact),
            "heuristic" => Ok(DecodeMode::Heuristic),
            "auto" => Ok(DecodeMode::Auto),
            _ => Err(AtgError::InvalidConfig(format!("unknown decode mode {s:?}"))),
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Visits every weight-`w` subset of `0..cols` in lexicographic order of
/// sorted index lists. The callback gets the subset mask and the XOR of the
/// column syndromes, and returns `false` to stop.
fn for_each_combo(col_syn: &[u128], w: usize, f: &mut dyn FnMut(u64, u128) -> bool) -> bool {
    fn rec(
        col_syn: &[u128],
        start: usize,
        left: usize,
        mask: u64,
        syn: u128,
        f: &mut dyn FnMut(u64, u128) -> bool,
    ) -> bool {
        if left == 0 {
            return f(mask, syn);
        }
        for i in start..=col_syn.len() - left {
            if !rec(col_syn, i + 1, left - 1, mask | (1 << i), syn ^ col_syn[i], f) {
                return false;
            }
        }
        true
    }
    if w > col_syn.len() {
        return true;
    }
    rec(col_syn, 0, w, 0, 0, f)
}

fn pack_u128(v: &BitVector) -> u128 {
    v.iter_ones().fold(0u128, |acc, i| acc | (1u128 << i))
}

/// Minimum-weight solutions of `H x = s`. Among minimum-weight solutions
/// the one whose sorted support is lexicographically smallest is returned.
#[derive(Clone, Debug)]
pub struct CosetSolver {
    matrix: BitMatrix,
    kernel: Vec<BitVector>,
    exact: bool,
    col_syn: Vec<u128>,
    table: HashMap<u128, u64>,
    /// Every subset of weight below this has been tabulated.
    complete_weight: usize,
    full: bool,
}

impl CosetSolver {
    pub fn new(matrix: BitMatrix, exact: bool) -> Self {
        let kernel = gf2::nullspace_basis(&matrix);
        let rank = matrix.cols() - kernel.len();
        let exact = exact && matrix.cols() <= 64 && matrix.rows() <= 128;
        let mut solver = CosetSolver {
            col_syn: Vec::new(),
            table: HashMap::new(),
            complete_weight: 0,
            full: false,
            matrix,
            kernel,
            exact,
        };
        if solver.exact {
            solver.col_syn = (0..solver.matrix.cols())
                .map(|c| pack_u128(&solver.matrix.column(c)))
                .collect();
            if rank <= MAX_TABLE_RANK {
                solver.build_table(1usize << rank);
            }
        }
        solver
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    fn build_table(&mut self, reachable: usize) {
        let mut spent = 0u64;
        for w in 0..=self.cols() {
            let count = binomial(self.cols(), w);
            if spent.saturating_add(count) > TABLE_BUDGET {
                return;
            }
            spent += count;
            let table = &mut self.table;
            for_each_combo(&self.col_syn, w, &mut |mask, syn| {
                table.entry(syn).or_insert(mask);
                true
            });
            self.complete_weight = w + 1;
            if self.table.len() == reachable {
                self.full = true;
                return;
            }
        }
    }

    /// Returns a solution and whether it is certified minimum weight.
    pub fn solve(&self, s: &BitVector) -> Result<(BitVector, bool)> {
        if s.len() != self.matrix.rows() {
            return Err(AtgError::Dimension(format!(
                "syndrome of length {} for {} checks",
                s.len(),
                self.matrix.rows()
            )));
        }
        if self.exact {
            let key = pack_u128(s);
            if let Some(&mask) = self.table.get(&key) {
                return Ok((BitVector::from_u64(self.cols(), mask), true));
            }
            if self.full {
                return Err(AtgError::InconsistentSyndrome);
            }
            if let Some(mask) = self.search(key) {
                return Ok((BitVector::from_u64(self.cols(), mask), true));
            }
        }
        Ok((self.heuristic(s)?, false))
    }

    fn search(&self, key: u128) -> Option<u64> {
        let mut spent = 0u64;
        for w in self.complete_weight..=self.cols() {
            let count = binomial(self.cols(), w);
            if spent.saturating_add(count) > QUERY_BUDGET {
                return None;
            }
            spent += count;
            let mut found = None;
            for_each_combo(&self.col_syn, w, &mut |mask, syn| {
                if syn == key {
                    found = Some(mask);
                    false
                } else {
                    true
                }
            });
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Pivot solution followed by greedy weight-reducing kernel moves.
    pub fn heuristic(&self, s: &BitVector) -> Result<BitVector> {
        let mut x = gf2::solve(&self.matrix, s)?.ok_or(AtgError::InconsistentSyndrome)?;
        loop {
            let mut improved = false;
            for k in &self.kernel {
                let y = x.xor(k);
                if y.weight() < x.weight() {
                    x = y;
                    improved = true;
                }
            }
            if !improved {
                return Ok(x);
            }
        }
    }
}

/// One independent piece of the meta-check system.
#[derive(Clone, Debug)]
struct Block {
    /// Global vertex index of each local column, ascending.
    vars: Vec<usize>,
    /// Positions in the meta-check list of each local row.
    rows: Vec<usize>,
    solver: CosetSolver,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecodeResult {
    #[serde(skip)]
    pub beta: BitVector,
    pub weight: usize,
    pub optimal: bool,
}

/// Minimum-weight Z error on the measured vertices consistent with the
/// meta-check syndromes. The system splits into connected blocks that are
/// solved separately; the lexicographic tie-break is preserved by the split.
#[derive(Clone, Debug)]
pub struct BulkDecoder {
    nv: usize,
    supports: Vec<BitVector>,
    blocks: Vec<Block>,
}

impl BulkDecoder {
    pub fn new(
        g: &AtgGraph,
        pattern: &MeasurementPattern,
        s0: &[StabilizerElement],
        mode: DecodeMode,
        exact_cap: usize,
    ) -> Result<Self> {
        let nv = g.num_vertices();
        let supports: Vec<BitVector> = s0.iter().map(|e| e.bulk_x.and(&pattern.measured)).collect();

        let mut uf = UnionFind::new(nv);
        for s in &supports {
            let mut it = s.iter_ones();
            if let Some(first) = it.next() {
                for v in it {
                    uf.union(first, v);
                }
            }
        }
        let mut by_root: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
        let mut used = BitVector::zeros(nv);
        for (r, s) in supports.iter().enumerate() {
            if let Some(first) = s.first_one() {
                by_root.entry(uf.find(first)).or_default().1.push(r);
            }
            used.or_assign(s);
        }
        for v in used.iter_ones() {
            by_root.entry(uf.find(v)).or_default().0.push(v);
        }
        let mut groups: Vec<(Vec<usize>, Vec<usize>)> = by_root.into_values().collect();
        groups.sort_by_key(|(vars, _)| vars[0]);

        let mut blocks = Vec::with_capacity(groups.len());
        for (vars, rows) in groups {
            let want_exact = mode != DecodeMode::Heuristic;
            if mode == DecodeMode::Exact && vars.len() > exact_cap {
                return Err(AtgError::CapExceeded {
                    what: "exact decoding block",
                    size: vars.len(),
                    cap: exact_cap,
                });
            }
            let exact = want_exact && vars.len() <= exact_cap;
            let matrix_rows = rows
                .iter()
                .map(|&r| BitVector::from_bits(vars.iter().map(|&v| supports[r].get(v))))
                .collect();
            let matrix = BitMatrix::from_rows(vars.len(), matrix_rows)?;
            blocks.push(Block {
                solver: CosetSolver::new(matrix, exact),
                vars,
                rows,
            });
        }
        Ok(Self {
            nv,
            supports,
            blocks,
        })
    }

    /// Largest number of variables in any block.
    pub fn max_block(&self) -> usize {
        self.blocks.iter().map(|b| b.vars.len()).max().unwrap_or(0)
    }

    pub fn is_exact(&self) -> bool {
        self.blocks.iter().all(|b| b.solver.is_exact())
    }

    pub fn decode(&self, meta: &BitVector) -> Result<DecodeResult> {
        if meta.len() != self.supports.len() {
            return Err(AtgError::Dimension(format!(
                "{} meta syndromes for {} meta-checks",
                meta.len(),
                self.supports.len()
            )));
        }
        let mut beta = BitVector::zeros(self.nv);
        let mut optimal = true;
        for b in &self.blocks {
            let local = BitVector::from_bits(b.rows.iter().map(|&r| meta.get(r)));
            let (x, opt) = b.solver.solve(&local)?;
            optimal &= opt;
            for i in x.iter_ones() {
                beta.set(b.vars[i], true);
            }
        }
        let check = BitVector::from_bits(self.supports.iter().map(|s| s.dot(&beta)));
        if check != *meta {
            return Err(AtgError::Internal(
                "inferred bulk error disagrees with the meta syndromes".into(),
            ));
        }
        Ok(DecodeResult {
            weight: beta.weight(),
            beta,
            optimal,
        })
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Parity of each element's bulk support with `eta`.
pub fn extract_meta_syndromes(s0: &[StabilizerElement], eta: &ErrorPattern) -> BitVector {
    BitVector::from_bits(s0.iter().map(|e| e.bulk_parity(&eta.bits)))
}

/// `s . gamma + gamma . beta` per element, with `s` the outcome string (or,
/// in frame simulation, the error itself).
pub fn corrected_syndromes(s1: &[StabilizerElement], s: &BitVector, beta: &BitVector) -> BitVector {
    BitVector::from_bits(s1.iter().map(|e| e.bulk_parity(s) ^ e.bulk_parity(beta)))
}

/// `alpha . (beta + eta)` per element.
pub fn residual_syndrome(s1: &[StabilizerElement], eta: &ErrorPattern, beta: &BitVector) -> BitVector {
    let diff = eta.bits.xor(beta);
    BitVector::from_bits(s1.iter().map(|e| e.bulk_parity(&diff)))
}

/// A Pauli `X(x) Z(z)` on the unmeasured vertices, vertex-indexed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPauli {
    pub x: BitVector,
    pub z: BitVector,
}

impl BoundaryPauli {
    /// Bit per element: whether this Pauli anticommutes with its boundary part.
    pub fn syndromes(&self, s1: &[StabilizerElement]) -> BitVector {
        BitVector::from_bits(
            s1.iter()
                .map(|e| self.x.dot(&e.boundary_z) ^ self.z.dot(&e.boundary_x)),
        )
    }
}

/// Boundary Pauli whose anticommutation pattern with the S1 boundary parts
/// equals `corrected`. Unknowns are the X bits then the Z bits of the
/// unmeasured vertices in ascending order.
pub fn rec(pattern: &MeasurementPattern, s1: &[StabilizerElement], corrected: &BitVector) -> Result<BoundaryPauli> {
    let order: Vec<usize> = (0..2 * pattern.unmeasured().weight()).collect();
    rec_with_order(pattern, s1, corrected, &order)
}

/// As [`rec`], but with the unknowns eliminated in the order given by
/// `order`, a permutation of `0..2u`. Different orders can return different
/// frames for the same syndromes.
pub fn rec_with_order(
    pattern: &MeasurementPattern,
    s1: &[StabilizerElement],
    corrected: &BitVector,
    order: &[usize],
) -> Result<BoundaryPauli> {
    let boundary = pattern.unmeasured().support();
    let u = boundary.len();
    if order.len() != 2 * u {
        return Err(AtgError::Dimension(format!(
            "column order of length {} for {} unknowns",
            order.len(),
            2 * u
        )));
    }
    if corrected.len() != s1.len() {
        return Err(AtgError::Dimension(format!(
            "{} corrected syndromes for {} elements",
            corrected.len(),
            s1.len()
        )));
    }
    // unknown j < u is X on boundary[j]; j >= u is Z on boundary[j - u]
    let coeff = |e: &StabilizerElement, j: usize| {
        if j < u {
            e.boundary_z.get(boundary[j])
        } else {
            e.boundary_x.get(boundary[j - u])
        }
    };
    let rows = s1
        .iter()
        .map(|e| BitVector::from_bits(order.iter().map(|&j| coeff(e, j))))
        .collect();
    let m = BitMatrix::from_rows(2 * u, rows)?;
    let sol = gf2::solve(&m, corrected)?.ok_or_else(|| {
        AtgError::Internal("no boundary Pauli matches the corrected syndromes".into())
    })?;
    let nv = pattern.measured.len();
    let mut out = BoundaryPauli {
        x: BitVector::zeros(nv),
        z: BitVector::zeros(nv),
    };
    for (pos, &j) in order.iter().enumerate() {
        if sol.get(pos) {
            if j < u {
                out.x.set(boundary[j], true);
            } else {
                out.z.set(boundary[j - u], true);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RepResult {
    /// Z-type residual on the surfaces.
    pub rep_x: BitVector,
    /// X-type residual on the surfaces.
    pub rep_z: BitVector,
    pub logical_x_flags: Vec<bool>,
    pub logical_z_flags: Vec<bool>,
    pub optimal: bool,
}

/// Per-surface minimum-weight residual corrections plus logical flags.
#[derive(Clone, Debug)]
pub struct RepDecoder {
    x_solver: CosetSolver,
    z_solver: CosetSolver,
}

impl RepDecoder {
    pub fn new(code: &CssCode, mode: DecodeMode, exact_cap: usize) -> Self {
        let exact = mode != DecodeMode::Heuristic && code.n <= exact_cap;
        Self {
            x_solver: CosetSolver::new(code.h_x.clone(), exact),
            z_solver: CosetSolver::new(code.h_z.clone(), exact),
        }
    }

    pub fn rep(&self, g: &AtgGraph, set: &StabilizerSet, residual: &BitVector) -> Result<RepResult> {
        let code = &g.code;
        let nv = g.num_vertices();
        let mut rep_x = BitVector::zeros(nv);
        let mut rep_z = BitVector::zeros(nv);
        let mut optimal = true;
        for &surface in &set.surfaces {
            let mut sx = BitVector::zeros(code.m_x);
            let mut sz = BitVector::zeros(code.m_z);
            for (pos, e) in set.s1.iter().enumerate() {
                if e.layer != surface || !residual.get(pos) {
                    continue;
                }
                match e.kind {
                    StabilizerKind::BoundaryXCheck => sx.set(e.index, true),
                    StabilizerKind::BoundaryZCheck => sz.set(e.index, true),
                    _ => {}
                }
            }
            let (ex, ox) = self.x_solver.solve(&sx)?;
            let (ez, oz) = self.z_solver.solve(&sz)?;
            optimal &= ox && oz;
            for i in ex.iter_ones() {
                rep_x.set(g.code_vertex(i, surface), true);
            }
            for i in ez.iter_ones() {
                rep_z.set(g.code_vertex(i, surface), true);
            }
        }
        let mut logical_x_flags = Vec::new();
        let mut logical_z_flags = Vec::new();
        for (pos, e) in set.s1.iter().enumerate() {
            match e.kind {
                StabilizerKind::LogicalXX => {
                    logical_x_flags.push(residual.get(pos) ^ rep_x.dot(&e.boundary_x))
                }
                StabilizerKind::LogicalZZ => {
                    logical_z_flags.push(residual.get(pos) ^ rep_z.dot(&e.boundary_z))
                }
                _ => {}
            }
        }
        Ok(RepResult {
            rep_x,
            rep_z,
            logical_x_flags,
            logical_z_flags,
            optimal,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterSummary {
    pub x: ClusterReport,
    pub z: ClusterReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub logical_x_flags: Vec<u8>,
    pub logical_z_flags: Vec<u8>,
    pub cc_x_ok: bool,
    pub cc_z_ok: bool,
    pub residual_weight: usize,
    pub error_weight: usize,
    pub decode_weight: usize,
    pub optimal: bool,
    pub weight_ok: bool,
    pub clusters: ClusterSummary,
}

impl TrialOutcome {
    pub fn fail_x(&self) -> bool {
        self.logical_x_flags.iter().any(|&b| b != 0)
    }

    pub fn fail_z(&self) -> bool {
        self.logical_z_flags.iter().any(|&b| b != 0)
    }

    /// Largest cluster in either syndrome adjacency graph.
    pub fn max_cluster(&self) -> usize {
        self.clusters.x.max_size.max(self.clusters.z.max_size)
    }
}

/// Every intermediate quantity of one decoded trial.
#[derive(Clone, Debug)]
pub struct TrialTrace {
    pub eta: ErrorPattern,
    pub meta: BitVector,
    pub decode: DecodeResult,
    pub residual: BitVector,
    pub rep: RepResult,
    pub outcome: TrialOutcome,
}

/// Graph, pattern, stabilizers and decoders for repeated trials.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub graph: AtgGraph,
    pub pattern: MeasurementPattern,
    pub set: StabilizerSet,
    pub basis: LogicalBasis,
    pub mode: DecodeMode,
    pub x_sag: Sag,
    pub z_sag: Sag,
    bulk: BulkDecoder,
    rep: RepDecoder,
}

impl Pipeline {
    pub fn bell(code: &CssCode, t: usize, mode: DecodeMode, exact_cap: usize) -> Result<Self> {
        let graph = crate::atg::build_atg(code, t)?;
        let pattern = crate::atg::bell_pattern(&graph);
        let basis = logical_basis(code);
        let set = bell_stabilizers(&graph, &basis);
        Self::from_parts(graph, pattern, set, basis, mode, exact_cap)
    }

    pub fn from_parts(
        graph: AtgGraph,
        pattern: MeasurementPattern,
        set: StabilizerSet,
        basis: LogicalBasis,
        mode: DecodeMode,
        exact_cap: usize,
    ) -> Result<Self> {
        set.verify(&graph, &pattern)?;
        let bulk = BulkDecoder::new(&graph, &pattern, &set.s0, mode, exact_cap)?;
        if mode == DecodeMode::Exact && graph.code.n > exact_cap {
            return Err(AtgError::CapExceeded {
                what: "exact residual decoding",
                size: graph.code.n,
                cap: exact_cap,
            });
        }
        let rep = RepDecoder::new(&graph.code, mode, exact_cap);
        let x_sag = cluster::build_sag(&graph, Side::X, &set.surfaces);
        let z_sag = cluster::build_sag(&graph, Side::Z, &set.surfaces);
        Ok(Self {
            graph,
            pattern,
            set,
            basis,
            mode,
            x_sag,
            z_sag,
            bulk,
            rep,
        })
    }

    pub fn bulk_decoder(&self) -> &BulkDecoder {
        &self.bulk
    }

    pub fn rep_decoder(&self) -> &RepDecoder {
        &self.rep
    }

    pub fn trace(&self, eta: &ErrorPattern) -> Result<TrialTrace> {
        let meta = extract_meta_syndromes(&self.set.s0, eta);
        let decode = self.bulk.decode(&meta)?;
        let residual = residual_syndrome(&self.set.s1, eta, &decode.beta);
        let rep = self.rep.rep(&self.graph, &self.set, &residual)?;

        let x_marked = cluster::mark_mismatch(&self.x_sag, eta, &decode.beta, &rep.rep_x);
        let z_marked = cluster::mark_mismatch(&self.z_sag, eta, &decode.beta, &rep.rep_z);
        let x_report = cluster::components(&self.x_sag, &x_marked, eta, &decode.beta);
        let z_report = cluster::components(&self.z_sag, &z_marked, eta, &decode.beta);
        let weight_ok = cluster::check_cluster_weight(&x_report) && cluster::check_cluster_weight(&z_report);
        let optimal = decode.optimal && rep.optimal;
        if decode.optimal && !weight_ok {
            return Err(AtgError::Internal(
                "minimum-weight decode violates the per-cluster weight inequality".into(),
            ));
        }

        let bits = |v: &[bool]| v.iter().map(|&b| b as u8).collect::<Vec<u8>>();
        let outcome = TrialOutcome {
            success: !rep.logical_x_flags.iter().any(|&b| b) && !rep.logical_z_flags.iter().any(|&b| b),
            logical_x_flags: bits(&rep.logical_x_flags),
            logical_z_flags: bits(&rep.logical_z_flags),
            cc_x_ok: x_report.cc_ok,
            cc_z_ok: z_report.cc_ok,
            residual_weight: rep.rep_x.weight() + rep.rep_z.weight(),
            error_weight: eta.weight(),
            decode_weight: decode.weight,
            optimal,
            weight_ok,
            clusters: ClusterSummary {
                x: x_report,
                z: z_report,
            },
        };
        Ok(TrialTrace {
            eta: eta.clone(),
            meta,
            decode,
            residual,
            rep,
            outcome,
        })
    }

    pub fn decode_error(&self, eta: &ErrorPattern) -> Result<TrialOutcome> {
        Ok(self.trace(eta)?.outcome)
    }

    pub fn run_trial(&self, cfg: &NoiseConfig) -> Result<TrialOutcome> {
        let eta = sample_error(&self.graph, &self.pattern, cfg);
        self.decode_error(&eta)
    }
}
