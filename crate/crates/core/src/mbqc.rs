//! Correspondence between a foliated cluster state and T rounds of repeated
//! syndrome measurement.
//!
//! The foliated cluster is the layered graph with `2T` layers: Z checks on
//! odd layers, X checks on even layers, and code qubits on every layer, the
//! last layer left unmeasured. Round `j` of the repeated protocol is
//!
//! 1. X-type data error `f_code^{2j-2}` (absent for `j = 1`),
//! 2. Z-check measurement with flip `f_z^j`,
//! 3. Z-type data error `f_code^{2j-1}`,
//! 4. X-check measurement with flip `f_x^j`,
//!
//! and every record is a parity relative to the noiseless run.

use rand::Rng;
use serde::Serialize;

use crate::atg::{AtgGraph, MeasurementPattern};
use crate::code::CssCode;
use crate::error::{AtgError, Result};
use crate::gf2::BitVector;
use crate::noise::{rng_from_seed, sample_error, trial_seed, NoiseConfig};

/// Error locations of the repeated protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorLayers {
    /// `2T - 1` data-error layers; entry `t - 1` is `f_code^t`.
    pub code: Vec<BitVector>,
    pub x: Vec<BitVector>,
    pub z: Vec<BitVector>,
}

impl ErrorLayers {
    pub fn zeros(code: &CssCode, t: usize) -> Self {
        Self {
            code: vec![BitVector::zeros(code.n); 2 * t - 1],
            x: vec![BitVector::zeros(code.m_x); t],
            z: vec![BitVector::zeros(code.m_z); t],
        }
    }

    pub fn rounds(&self) -> usize {
        self.x.len()
    }

    pub fn weight(&self) -> usize {
        self.code
            .iter()
            .chain(&self.x)
            .chain(&self.z)
            .map(BitVector::weight)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepeatedMeasRecord {
    pub s_z: Vec<BitVector>,
    pub s_x: Vec<BitVector>,
    pub f: ErrorLayers,
}

/// Measurement outcomes of the foliated cluster grouped by role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoliatedRecord {
    pub z_code: Vec<BitVector>,
    pub z_x: Vec<BitVector>,
    pub z_z: Vec<BitVector>,
}

impl FoliatedRecord {
    pub fn zeros(code: &CssCode, t: usize) -> Self {
        let f = ErrorLayers::zeros(code, t);
        Self {
            z_code: f.code,
            z_x: f.x,
            z_z: f.z,
        }
    }

    pub fn rounds(&self) -> usize {
        self.z_x.len()
    }

    pub fn xor(&self, other: &FoliatedRecord) -> FoliatedRecord {
        let zip = |a: &[BitVector], b: &[BitVector]| a.iter().zip(b).map(|(u, v)| u.xor(v)).collect();
        FoliatedRecord {
            z_code: zip(&self.z_code, &other.z_code),
            z_x: zip(&self.z_x, &other.z_x),
            z_z: zip(&self.z_z, &other.z_z),
        }
    }
}

/// Records the protocol's syndromes for the given error locations.
pub fn repeated_from_errors(code: &CssCode, f: &ErrorLayers) -> Result<RepeatedMeasRecord> {
    check_layers(code, f)?;
    let t = f.rounds();
    let mut x_err = BitVector::zeros(code.n);
    let mut z_err = BitVector::zeros(code.n);
    let mut s_z = Vec::with_capacity(t);
    let mut s_x = Vec::with_capacity(t);
    for j in 1..=t {
        if j >= 2 {
            x_err.xor_assign(&f.code[2 * j - 3]);
        }
        s_z.push(code.syndrome_z(&x_err)?.xor(&f.z[j - 1]));
        z_err.xor_assign(&f.code[2 * j - 2]);
        s_x.push(code.syndrome_x(&z_err)?.xor(&f.x[j - 1]));
    }
    Ok(RepeatedMeasRecord { s_z, s_x, f: f.clone() })
}

/// Samples every error location independently with probability `cfg.p`, in
/// protocol order, and records the syndromes.
pub fn simulate_repeated(code: &CssCode, t: usize, cfg: &NoiseConfig) -> Result<RepeatedMeasRecord> {
    if t == 0 {
        return Err(AtgError::InvalidConfig("need at least one round".into()));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut draw = |len: usize| BitVector::from_bits((0..len).map(|_| rng.gen::<f64>() < cfg.p));
    let mut f = ErrorLayers::zeros(code, t);
    for j in 1..=t {
        if j >= 2 {
            f.code[2 * j - 3] = draw(code.n);
        }
        f.z[j - 1] = draw(code.m_z);
        f.code[2 * j - 2] = draw(code.n);
        f.x[j - 1] = draw(code.m_x);
    }
    repeated_from_errors(code, &f)
}

/// Translates foliated outcomes into repeated-measurement syndromes:
/// `s_x^j = z_x^j + Syn_X(sum_{i<=j} z_code^{2i-1})` and
/// `s_z^j = z_z^j + Syn_Z(sum_{i<j} z_code^{2i})`.
pub fn foliate_outcomes(code: &CssCode, rec: &FoliatedRecord) -> Result<(Vec<BitVector>, Vec<BitVector>)> {
    check_record(code, rec)?;
    let t = rec.rounds();
    let mut odd = BitVector::zeros(code.n);
    let mut even = BitVector::zeros(code.n);
    let mut s_x = Vec::with_capacity(t);
    let mut s_z = Vec::with_capacity(t);
    for j in 1..=t {
        if j >= 2 {
            even.xor_assign(&rec.z_code[2 * j - 3]);
        }
        s_z.push(rec.z_z[j - 1].xor(&code.syndrome_z(&even)?));
        odd.xor_assign(&rec.z_code[2 * j - 2]);
        s_x.push(rec.z_x[j - 1].xor(&code.syndrome_x(&odd)?));
    }
    Ok((s_x, s_z))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RecurrenceSide {
    X,
    Z,
}

/// Rounds at which the syndrome recurrence fails. The X side is checked for
/// every round (the X syndrome before round 1 is zero); the Z side from
/// round 2, because the first Z syndrome of `|+>^n` is not determined.
pub fn recurrence_failures(
    code: &CssCode,
    rec: &FoliatedRecord,
    f: &ErrorLayers,
) -> Result<Vec<(RecurrenceSide, usize)>> {
    check_layers(code, f)?;
    if f.rounds() != rec.rounds() {
        return Err(AtgError::Dimension(format!(
            "{} error rounds for {} recorded rounds",
            f.rounds(),
            rec.rounds()
        )));
    }
    let (s_x, s_z) = foliate_outcomes(code, rec)?;
    let mut out = Vec::new();
    for j in 1..=rec.rounds() {
        let mut lhs = s_x[j - 1].xor(&f.x[j - 1]);
        if j >= 2 {
            lhs.xor_assign(&s_x[j - 2]);
            lhs.xor_assign(&f.x[j - 2]);
        }
        if lhs != code.syndrome_x(&f.code[2 * j - 2])? {
            out.push((RecurrenceSide::X, j));
        }
        if j >= 2 {
            let lhs = s_z[j - 1].xor(&f.z[j - 1]).xor(&s_z[j - 2]).xor(&f.z[j - 2]);
            if lhs != code.syndrome_z(&f.code[2 * j - 3])? {
                out.push((RecurrenceSide::Z, j));
            }
        }
    }
    Ok(out)
}

pub fn verify_recurrence(code: &CssCode, rec: &FoliatedRecord, f: &ErrorLayers) -> Result<bool> {
    Ok(recurrence_failures(code, rec, f)?.is_empty())
}

pub fn foliated_graph(code: &CssCode, t: usize) -> Result<AtgGraph> {
    if t == 0 {
        return Err(AtgError::InvalidConfig("need at least one round".into()));
    }
    Ok(AtgGraph::layered(code, 2 * t, &[2 * t]))
}

pub fn foliated_pattern(g: &AtgGraph) -> MeasurementPattern {
    MeasurementPattern::leaving_layers(g, &[g.layers])
}

/// Groups per-vertex outcome bits of a foliated graph into a record.
pub fn record_from_outcomes(g: &AtgGraph, bits: &BitVector) -> FoliatedRecord {
    let t = g.layers / 2;
    FoliatedRecord {
        z_code: (1..2 * t).map(|l| g.code_slice(bits, l)).collect(),
        z_x: (1..=t).map(|j| g.check_slice(bits, 2 * j)).collect(),
        z_z: (1..=t).map(|j| g.check_slice(bits, 2 * j - 1)).collect(),
    }
}

/// The bijection from Z-error locations on the foliated graph to protocol error locations.
pub fn error_layers_from_eta(g: &AtgGraph, eta: &BitVector) -> ErrorLayers {
    let r = record_from_outcomes(g, eta);
    ErrorLayers {
        code: r.z_code,
        x: r.z_x,
        z: r.z_z,
    }
}

/// One noisy foliated run in the frame convention: each Z error flips only
/// its own outcome, so the record equals the error pattern.
pub fn frame_run(code: &CssCode, t: usize, p: f64, seed: u64) -> Result<(FoliatedRecord, ErrorLayers)> {
    let g = foliated_graph(code, t)?;
    let pattern = foliated_pattern(&g);
    let cfg = NoiseConfig::new(p, trial_seed(seed, 0, 0))?;
    let eta = sample_error(&g, &pattern, &cfg);
    Ok((record_from_outcomes(&g, &eta.bits), error_layers_from_eta(&g, &eta.bits)))
}

fn check_layers(code: &CssCode, f: &ErrorLayers) -> Result<()> {
    let t = f.rounds();
    let ok = t >= 1
        && f.z.len() == t
        && f.code.len() == 2 * t - 1
        && f.code.iter().all(|v| v.len() == code.n)
        && f.x.iter().all(|v| v.len() == code.m_x)
        && f.z.iter().all(|v| v.len() == code.m_z);
    if ok {
        Ok(())
    } else {
        Err(AtgError::Dimension("error layers do not match the code and round count".into()))
    }
}

fn check_record(code: &CssCode, rec: &FoliatedRecord) -> Result<()> {
    check_layers(
        code,
        &ErrorLayers {
            code: rec.z_code.clone(),
            x: rec.z_x.clone(),
            z: rec.z_z.clone(),
        },
    )
    .map_err(|_| AtgError::Dimension("foliated record does not match the code and round count".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::fixtures;

    #[test]
    fn noiseless_is_zero() {
        let code = fixtures::steane();
        let r = simulate_repeated(&code, 3, &NoiseConfig::new(0.0, 4).unwrap()).unwrap();
        assert!(r.s_x.iter().chain(&r.s_z).all(BitVector::is_zero));
        let (sx, sz) = foliate_outcomes(&code, &FoliatedRecord::zeros(&code, 3)).unwrap();
        assert!(sx.iter().chain(&sz).all(BitVector::is_zero));
    }

    #[test]
    fn data_x_error_persists() {
        let code = fixtures::steane();
        let mut f = ErrorLayers::zeros(&code, 3);
        // X-type error at the start of round 2
        f.code[1].set(0, true);
        let r = repeated_from_errors(&code, &f).unwrap();
        let syn = code.syndrome_z(&BitVector::from_support(7, &[0])).unwrap();
        assert!(r.s_z[0].is_zero());
        assert_eq!(r.s_z[1], syn);
        assert_eq!(r.s_z[2], syn);
        assert!(r.s_x.iter().all(BitVector::is_zero));
    }

    #[test]
    fn check_flip_is_local() {
        let code = fixtures::c422();
        let mut f = ErrorLayers::zeros(&code, 3);
        f.x[1].set(0, true);
        let r = repeated_from_errors(&code, &f).unwrap();
        let flipped: Vec<bool> = r.s_x.iter().map(|v| !v.is_zero()).collect();
        assert_eq!(flipped, vec![false, true, false]);
    }

    #[test]
    fn first_code_layer_shifts_x_syndromes() {
        let code = fixtures::steane();
        let mut rec = FoliatedRecord::zeros(&code, 3);
        let e = BitVector::from_support(7, &[2, 5]);
        rec.z_code[0] = e.clone();
        let (sx, sz) = foliate_outcomes(&code, &rec).unwrap();
        for j in 0..3 {
            assert_eq!(sx[j], code.syndrome_x(&e).unwrap());
            assert!(sz[j].is_zero());
        }
    }

    #[test]
    fn corrupted_code_bit_breaks_one_round() {
        let code = fixtures::c422();
        let f = ErrorLayers::zeros(&code, 3);
        let rec = FoliatedRecord::zeros(&code, 3);
        assert!(verify_recurrence(&code, &rec, &f).unwrap());
        let mut bad = f.clone();
        bad.code[3].set(1, true);
        assert_eq!(
            recurrence_failures(&code, &rec, &bad).unwrap(),
            vec![(RecurrenceSide::Z, 3)]
        );
    }

    #[test]
    fn shape_errors() {
        let code = fixtures::c422();
        let mut rec = FoliatedRecord::zeros(&code, 2);
        rec.z_code.pop();
        assert!(foliate_outcomes(&code, &rec).is_err());
    }

    #[test]
    fn foliated_counts() {
        let g = foliated_graph(&fixtures::c422(), 3).unwrap();
        assert_eq!(g.num_vertices(), 30);
        assert_eq!(foliated_pattern(&g).measured.weight(), 26);
    }
}
