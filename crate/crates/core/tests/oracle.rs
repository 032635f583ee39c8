//! Tableau simulator against a dense state vector, and tableau replays of
//! decoded trials.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use atg_core::atg::{bell_pattern, build_atg, AtgGraph};
use atg_core::code::{fixtures, logical_basis};
use atg_core::decoder::{DecodeMode, Pipeline, DEFAULT_EXACT_CAP};
use atg_core::gf2::{rank, BitMatrix, BitVector};
use atg_core::noise::{sample_error, trial_seed, ErrorPattern, NoiseConfig};
use atg_core::stabilizers::bell_stabilizers;
use atg_core::tableau::{measure_cluster, oracle_cross_check, oracle_trial, prepare_atg_state, Pauli, Tableau};

#[derive(Clone, Copy, Debug)]
enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

struct StateVector {
    n: usize,
    amp: Vec<Complex64>,
}

impl StateVector {
    fn zero(n: usize) -> Self {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[0] = Complex64::new(1.0, 0.0);
        Self { n, amp }
    }

    fn apply(&mut self, g: Gate) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, 1.0);
        match g {
            Gate::H(a) => {
                for b in 0..self.amp.len() {
                    if b >> a & 1 == 0 {
                        let (x, y) = (self.amp[b], self.amp[b | 1 << a]);
                        self.amp[b] = (x + y) * h;
                        self.amp[b | 1 << a] = (x - y) * h;
                    }
                }
            }
            Gate::S(a) => self.phase_where(|b| b >> a & 1 == 1, i),
            Gate::Z(a) => self.phase_where(|b| b >> a & 1 == 1, -Complex64::new(1.0, 0.0)),
            Gate::X(a) => {
                for b in 0..self.amp.len() {
                    if b >> a & 1 == 0 {
                        self.amp.swap(b, b | 1 << a);
                    }
                }
            }
            Gate::Cnot(c, t) => {
                for b in 0..self.amp.len() {
                    if b >> c & 1 == 1 && b >> t & 1 == 0 {
                        self.amp.swap(b, b | 1 << t);
                    }
                }
            }
            Gate::Cz(a, b2) => self.phase_where(|b| b >> a & 1 == 1 && b >> b2 & 1 == 1, -Complex64::new(1.0, 0.0)),
        }
    }

    fn phase_where(&mut self, pred: impl Fn(usize) -> bool, f: Complex64) {
        for (b, a) in self.amp.iter_mut().enumerate() {
            if pred(b) {
                *a *= f;
            }
        }
    }

    /// `P|psi>` for a Pauli in the tableau's convention.
    fn pauli(&self, p: &Pauli) -> Vec<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amp.len()];
        for (b, a) in self.amp.iter().enumerate() {
            let mut c = *a * i.powu(p.phase as u32);
            for q in 0..self.n {
                let (x, z) = (p.x >> q & 1 == 1, p.z >> q & 1 == 1);
                // Z = diag(1, -1), Y = iXZ
                if z && b >> q & 1 == 1 {
                    c = -c;
                }
                if x && z {
                    c *= i;
                }
            }
            out[b ^ p.x as usize] += c;
        }
        out
    }

    fn stabilized_by(&self, p: &Pauli) -> bool {
        self.pauli(p)
            .iter()
            .zip(&self.amp)
            .all(|(a, b)| (a - b).norm() < 1e-9)
    }

    fn project_z(&mut self, q: usize, one: bool) -> f64 {
        let mut norm = 0.0;
        for (b, a) in self.amp.iter_mut().enumerate() {
            if (b >> q & 1 == 1) != one {
                *a = Complex64::new(0.0, 0.0);
            } else {
                norm += a.norm_sqr();
            }
        }
        if norm > 0.0 {
            let s = norm.sqrt();
            for a in &mut self.amp {
                *a /= s;
            }
        }
        norm
    }
}

fn apply_both(t: &mut Tableau, sv: &mut StateVector, g: Gate) {
    match g {
        Gate::H(a) => t.h(a),
        Gate::S(a) => t.s(a),
        Gate::X(a) => t.x(a),
        Gate::Z(a) => t.z(a),
        Gate::Cnot(a, b) => t.cnot(a, b),
        Gate::Cz(a, b) => t.cz(a, b),
    }
    sv.apply(g);
}

fn gate_set(n: usize) -> Vec<Gate> {
    let mut gs = Vec::new();
    for a in 0..n {
        gs.extend([Gate::H(a), Gate::S(a), Gate::X(a), Gate::Z(a)]);
        for b in 0..n {
            if a != b {
                gs.push(Gate::Cnot(a, b));
                if a < b {
                    gs.push(Gate::Cz(a, b));
                }
            }
        }
    }
    gs
}

fn check_all_rows(t: &Tableau, sv: &StateVector) -> bool {
    t.stabilizers().iter().all(|p| sv.stabilized_by(p))
}

#[test]
fn pauli_action_matches_matrices() {
    // Y|0> = i|1>
    let sv = StateVector::zero(1);
    let y = sv.pauli(&Pauli { x: 1, z: 1, phase: 0 });
    assert!((y[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    assert!(y[0].norm() < 1e-12);
}

#[test]
fn exhaustive_three_gate_sequences() {
    // a fixed entangling prefix so that sign errors in every gate show up
    for n in [2usize, 3] {
        let gates = gate_set(n);
        let prefix = [Gate::H(0), Gate::S(0), Gate::Cnot(0, 1), Gate::H(n - 1)];
        for &a in &gates {
            for &b in &gates {
                for &c in &gates {
                    let mut t = Tableau::new(n).unwrap();
                    let mut sv = StateVector::zero(n);
                    for g in prefix.iter().copied().chain([a, b, c]) {
                        apply_both(&mut t, &mut sv, g);
                    }
                    assert!(check_all_rows(&t, &sv), "{n} qubits, sequence {a:?} {b:?} {c:?}");
                }
            }
        }
    }
}

#[test]
fn random_circuits_with_measurements() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let gates = gate_set(n);
        let mut t = Tableau::new(n).unwrap();
        let mut sv = StateVector::zero(n);
        for _ in 0..rng.gen_range(5..40) {
            if rng.gen_bool(0.15) {
                let q = rng.gen_range(0..n);
                let basis_x = rng.gen_bool(0.5);
                if basis_x {
                    apply_both(&mut t, &mut sv, Gate::H(q));
                }
                let out = t.measure_z(q, &mut rng);
                let prob = sv.project_z(q, out);
                assert!(prob > 1e-9, "tableau outcome has zero probability");
                if basis_x {
                    apply_both(&mut t, &mut sv, Gate::H(q));
                }
            } else {
                let g = gates[rng.gen_range(0..gates.len())];
                apply_both(&mut t, &mut sv, g);
            }
            assert!(check_all_rows(&t, &sv));
        }
    }
}

fn graph_stabilizer_pauli(g: &AtgGraph, v: usize) -> Pauli {
    let z = g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u);
    Pauli::new(1 << v, z)
}

#[test]
fn toy_graph_state() {
    let t = Tableau::graph_state(2, &[(0, 1)]).unwrap();
    assert_eq!(t.stabilizer_sign(&Pauli::new(0b01, 0b10)), Some(false));
    assert_eq!(t.stabilizer_sign(&Pauli::new(0b10, 0b01)), Some(false));
}

#[test]
fn cluster_states_stabilized_by_every_vertex() {
    for (code, t) in [(fixtures::c422(), 1), (fixtures::steane(), 2), (fixtures::c422(), 3)] {
        let g = build_atg(&code, t).unwrap();
        let tab = prepare_atg_state(&g).unwrap();
        for v in 0..g.num_vertices() {
            assert_eq!(tab.stabilizer_sign(&graph_stabilizer_pauli(&g, v)), Some(false));
        }
    }
}

#[test]
fn oracle_cap() {
    let g = build_atg(&fixtures::steane(), 3).unwrap();
    assert!(prepare_atg_state(&g).is_err());
}

#[test]
fn zero_error_boundary_state() {
    // after measuring the bulk with no error and applying the frame, every
    // surface element has sign +1 and together they fix the boundary state
    for (code, t) in [(fixtures::c422(), 1), (fixtures::c422(), 2), (fixtures::steane(), 2)] {
        let p = Pipeline::bell(&code, t, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
        for seed in 0..10 {
            let r = oracle_trial(&p, &ErrorPattern::zeros(&p.graph), seed).unwrap();
            assert!(r.agrees() && !r.fail_x && !r.fail_z);
        }
        let boundary = p.pattern.unmeasured();
        let idx: Vec<usize> = boundary.support();
        let rows: Vec<BitVector> = p
            .set
            .s1
            .iter()
            .map(|e| {
                let x = BitVector::from_bits(idx.iter().map(|&v| e.boundary_x.get(v)));
                let z = BitVector::from_bits(idx.iter().map(|&v| e.boundary_z.get(v)));
                x.concat(&z)
            })
            .collect();
        let m = BitMatrix::from_rows(2 * idx.len(), rows).unwrap();
        assert_eq!(rank(&m), 2 * code.n, "{} T={t}", code.name);
    }
}

#[test]
fn meta_check_parities_hold_on_random_outcomes() {
    let g = build_atg(&fixtures::steane(), 2).unwrap();
    let pat = bell_pattern(&g);
    let set = bell_stabilizers(&g, &logical_basis(&g.code));
    let zero = BitVector::zeros(g.num_vertices());
    for seed in 0..20 {
        let (_, s) = measure_cluster(&g, &pat.measured, &zero, seed).unwrap();
        for e in &set.s0 {
            assert!(!s.dot(&e.bulk_x), "{} seed {seed}", e.label());
        }
    }
}

#[test]
fn single_bulk_flips_match_frame_decoder() {
    let p = Pipeline::bell(&fixtures::c422(), 2, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
    for v in p.pattern.measured.iter_ones() {
        let mut eta = ErrorPattern::zeros(&p.graph);
        eta.bits.set(v, true);
        let r = oracle_trial(&p, &eta, v as u64).unwrap();
        assert!(r.agrees(), "flip on {}: {r:?}", p.graph.vertices[v]);
    }
}

#[test]
fn ghz_zero_error_and_noisy() {
    let p = Pipeline::ghz(&fixtures::c422(), 2, 3, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
    let r = oracle_trial(&p, &ErrorPattern::zeros(&p.graph), 1).unwrap();
    assert!(r.agrees() && !r.fail_x && !r.fail_z);
    let rep = oracle_cross_check(&p, 0.05, 100, 8).unwrap();
    assert!(rep.passed(), "{:?}", rep.mismatches.first());
}

#[test]
fn oracle_is_deterministic() {
    let p = Pipeline::bell(&fixtures::c422(), 1, DecodeMode::Exact, DEFAULT_EXACT_CAP).unwrap();
    let a = oracle_cross_check(&p, 0.2, 50, 4).unwrap();
    let b = oracle_cross_check(&p, 0.2, 50, 4).unwrap();
    assert_eq!((a.failures_x, a.failures_z), (b.failures_x, b.failures_z));
    let eta = sample_error(&p.graph, &p.pattern, &NoiseConfig::new(0.2, trial_seed(4, 0, 0)).unwrap());
    let (_, s1) = measure_cluster(&p.graph, &p.pattern.measured, &eta.bits, 9).unwrap();
    let (_, s2) = measure_cluster(&p.graph, &p.pattern.measured, &eta.bits, 9).unwrap();
    assert_eq!(s1, s2);
}
