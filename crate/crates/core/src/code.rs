//! CSS codes: validation, parameters, logical operators and small constructions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AtgError, Result};
use crate::gf2::{self, BitMatrix, BitVector, EchelonBasis};

/// Codes up to this length get their distance computed on construction.
pub const AUTO_DISTANCE_MAX_N: usize = 16;

#[derive(Clone, Debug)]
pub struct CssCode {
    pub name: String,
    pub h_x: BitMatrix,
    pub h_z: BitMatrix,
    pub n: usize,
    pub m_x: usize,
    pub m_z: usize,
    pub k: usize,
    pub ell: usize,
    pub d: Option<usize>,
}

/// Validates a pair of check matrices and computes the code parameters.
pub fn validate_css(h_x: BitMatrix, h_z: BitMatrix) -> Result<CssCode> {
    CssCode::new("code", h_x, h_z)
}

impl CssCode {
    pub fn new(name: &str, h_x: BitMatrix, h_z: BitMatrix) -> Result<Self> {
        if h_x.cols() != h_z.cols() {
            return Err(AtgError::Dimension(format!(
                "H_X has {} columns but H_Z has {}",
                h_x.cols(),
                h_z.cols()
            )));
        }
        for (a, xr) in h_x.row_iter().enumerate() {
            for (b, zr) in h_z.row_iter().enumerate() {
                if xr.dot(zr) {
                    return Err(AtgError::NotOrthogonal { x_row: a, z_row: b });
                }
            }
        }
        for (label, m) in [("H_X", &h_x), ("H_Z", &h_z)] {
            let r = gf2::rank(m);
            if r < m.rows() {
                return Err(AtgError::RankDeficient {
                    matrix: label,
                    rank: r,
                    rows: m.rows(),
                });
            }
        }
        let n = h_x.cols();
        let (m_x, m_z) = (h_x.rows(), h_z.rows());
        let ell = ldpc_parameter(&h_x, &h_z);
        let mut code = CssCode {
            name: name.to_string(),
            h_x,
            h_z,
            n,
            m_x,
            m_z,
            k: n - m_x - m_z,
            ell,
            d: None,
        };
        if n <= AUTO_DISTANCE_MAX_N {
            code.d = distance_bruteforce(&code, AUTO_DISTANCE_MAX_N)?;
        }
        Ok(code)
    }

    pub fn syndrome_x(&self, e: &BitVector) -> Result<BitVector> {
        self.h_x.mul_vec(e)
    }

    pub fn syndrome_z(&self, e: &BitVector) -> Result<BitVector> {
        self.h_z.mul_vec(e)
    }

    /// Qubits in the support of row `c` of H_Z.
    pub fn z_check_support(&self, c: usize) -> Vec<usize> {
        self.h_z.row(c).support()
    }

    pub fn x_check_support(&self, c: usize) -> Vec<usize> {
        self.h_x.row(c).support()
    }

    pub fn to_file(&self) -> CodeFile {
        let rows = |m: &BitMatrix| m.row_iter().map(BitVector::to_u8s).collect();
        CodeFile {
            name: self.name.clone(),
            hx: rows(&self.h_x),
            hz: rows(&self.h_z),
        }
    }
}

/// Largest row weight, or largest number of checks (of both types) on one qubit.
fn ldpc_parameter(h_x: &BitMatrix, h_z: &BitMatrix) -> usize {
    let row_max = h_x
        .row_iter()
        .chain(h_z.row_iter())
        .map(BitVector::weight)
        .max()
        .unwrap_or(0);
    let col_max = (0..h_x.cols())
        .map(|i| h_x.column(i).weight() + h_z.column(i).weight())
        .max()
        .unwrap_or(0);
    row_max.max(col_max)
}

#[derive(Clone, Debug)]
pub struct LogicalBasis {
    pub x_logicals: Vec<BitVector>,
    pub z_logicals: Vec<BitVector>,
}

impl LogicalBasis {
    pub fn k(&self) -> usize {
        self.x_logicals.len()
    }

    /// Matrix of inner products `x_i . z_j`.
    pub fn pairing(&self) -> BitMatrix {
        let k = self.k();
        let mut m = BitMatrix::zeros(k, k);
        for (i, x) in self.x_logicals.iter().enumerate() {
            for (j, z) in self.z_logicals.iter().enumerate() {
                m.set(i, j, x.dot(z));
            }
        }
        m
    }
}

/// Kernel vectors of `kernel_of` that are independent modulo the row space of `modulo`.
fn quotient_representatives(kernel_of: &BitMatrix, modulo: &BitMatrix, count: usize) -> Vec<BitVector> {
    let mut basis = EchelonBasis::new(modulo.cols());
    for row in modulo.row_iter() {
        basis.insert(row);
    }
    let mut reps = Vec::with_capacity(count);
    for v in gf2::nullspace_basis(kernel_of) {
        if reps.len() == count {
            break;
        }
        if basis.insert(&v) {
            reps.push(v);
        }
    }
    reps
}

pub fn logical_basis(code: &CssCode) -> LogicalBasis {
    let x_logicals = quotient_representatives(&code.h_z, &code.h_x, code.k);
    let z_raw = quotient_representatives(&code.h_x, &code.h_z, code.k);
    assert_eq!(x_logicals.len(), code.k, "X logical count");
    assert_eq!(z_raw.len(), code.k, "Z logical count");

    let k = code.k;
    let raw = LogicalBasis {
        x_logicals: x_logicals.clone(),
        z_logicals: z_raw.clone(),
    };
    // z'_j = sum_l (M^-1)_{j l} z_l makes the pairing the identity
    let m_inv = gf2::inverse(&raw.pairing()).expect("logical pairing is nondegenerate");
    let n_mat = m_inv.transpose();
    let z_logicals = (0..k)
        .map(|j| {
            let mut z = BitVector::zeros(code.n);
            for l in n_mat.row(j).iter_ones() {
                z.xor_assign(&z_raw[l]);
            }
            z
        })
        .collect();
    LogicalBasis {
        x_logicals,
        z_logicals,
    }
}

/// Exact distance by enumerating all `2^n` vectors. `None` when `k = 0`.
pub fn distance_bruteforce(code: &CssCode, cap: usize) -> Result<Option<usize>> {
    if code.n > cap || code.n > 40 {
        return Err(AtgError::CapExceeded {
            what: "distance enumeration",
            size: code.n,
            cap: cap.min(40),
        });
    }
    if code.k == 0 {
        return Ok(None);
    }
    let lb = logical_basis(code);
    let n = code.n;
    let pack = |vs: &[BitVector]| vs.iter().map(BitVector::to_u64).collect::<Vec<u64>>();
    let hx = pack(&code.h_x.row_iter().cloned().collect::<Vec<_>>());
    let hz = pack(&code.h_z.row_iter().cloned().collect::<Vec<_>>());
    let lx = pack(&lb.x_logicals);
    let lz = pack(&lb.z_logicals);
    let odd = |a: u64, b: u64| (a & b).count_ones() & 1 == 1;

    let mut best = usize::MAX;
    for y in 1u64..(1u64 << n) {
        let w = y.count_ones() as usize;
        if w >= best {
            continue;
        }
        // X-type: commutes with Z checks, anticommutes with some Z logical
        let x_type = hz.iter().all(|&r| !odd(r, y)) && lz.iter().any(|&r| odd(r, y));
        let z_type = hx.iter().all(|&r| !odd(r, y)) && lx.iter().any(|&r| odd(r, y));
        if x_type || z_type {
            best = w;
        }
    }
    Ok(Some(best))
}

/// Raw hypergraph-product matrices, without validation.
pub fn hypergraph_product_matrices(h1: &BitMatrix, h2: &BitMatrix) -> (BitMatrix, BitMatrix) {
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    let h_x = h1
        .kron(&BitMatrix::identity(n2))
        .hstack(&BitMatrix::identity(m1).kron(&h2.transpose()))
        .expect("row counts agree");
    let h_z = BitMatrix::identity(n1)
        .kron(h2)
        .hstack(&h1.transpose().kron(&BitMatrix::identity(m2)))
        .expect("row counts agree");
    (h_x, h_z)
}

pub fn hypergraph_product(h1: &BitMatrix, h2: &BitMatrix) -> Result<CssCode> {
    let (h_x, h_z) = hypergraph_product_matrices(h1, h2);
    CssCode::new("hgp", h_x, h_z)
}

/// On-disk JSON form of a code.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub name: String,
    pub hx: Vec<Vec<u8>>,
    pub hz: Vec<Vec<u8>>,
}

impl CodeFile {
    pub fn into_code(self, path: &Path) -> Result<CssCode> {
        let schema = |message: String| AtgError::Schema {
            path: path.to_path_buf(),
            message,
        };
        let n = self
            .hx
            .first()
            .or(self.hz.first())
            .map(Vec::len)
            .ok_or_else(|| schema("hx and hz are both empty; cannot infer n".into()))?;
        for (field, rows) in [("hx", &self.hx), ("hz", &self.hz)] {
            for (i, r) in rows.iter().enumerate() {
                if r.len() != n {
                    return Err(schema(format!(
                        "{field}[{i}] has {} entries, expected {n}",
                        r.len()
                    )));
                }
                if let Some(j) = r.iter().position(|&b| b > 1) {
                    return Err(schema(format!("{field}[{i}][{j}] = {} is not 0/1", r[j])));
                }
            }
        }
        let h_x = BitMatrix::from_u8_rows(&self.hx, n)?;
        let h_z = BitMatrix::from_u8_rows(&self.hz, n)?;
        CssCode::new(&self.name, h_x, h_z)
    }
}

pub fn parse_code_str(text: &str, path: &Path) -> Result<CssCode> {
    let file: CodeFile = serde_json::from_str(text).map_err(|e| AtgError::Schema {
        path: path.to_path_buf(),
        message: format!("line {} column {}: {e}", e.line(), e.column()),
    })?;
    file.into_code(path)
}

pub fn parse_code_file(path: &Path) -> Result<CssCode> {
    let text = std::fs::read_to_string(path).map_err(|source| AtgError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_code_str(&text, path)
}

/// Small codes used throughout the tests and examples.
pub mod fixtures {
    use super::*;

    pub fn hamming_7_4() -> BitMatrix {
        BitMatrix::from_str_rows(&["1010101", "0110011", "0001111"])
    }

    pub fn repetition_3() -> BitMatrix {
        BitMatrix::from_str_rows(&["110", "011"])
    }

    /// [[4,2,2]]
    pub fn c422() -> CssCode {
        let h = BitMatrix::from_str_rows(&["1111"]);
        CssCode::new("c422", h.clone(), h).unwrap()
    }

    /// [[7,1,3]]
    pub fn steane() -> CssCode {
        CssCode::new("steane", hamming_7_4(), hamming_7_4()).unwrap()
    }

    /// [[13,1,3]], the product of two length-3 repetition codes.
    pub fn surface13() -> CssCode {
        let mut c = hypergraph_product(&repetition_3(), &repetition_3()).unwrap();
        c.name = "surface13".into();
        c
    }

    /// [[5,1,2]], the product of two length-2 repetition codes.
    pub fn hgp5() -> CssCode {
        let h = BitMatrix::from_str_rows(&["11"]);
        let mut c = hypergraph_product(&h, &h).unwrap();
        c.name = "hgp5".into();
        c
    }

    /// One qubit and no checks.
    pub fn trivial() -> CssCode {
        CssCode::new("trivial", BitMatrix::zeros(0, 1), BitMatrix::zeros(0, 1)).unwrap()
    }

    pub fn all() -> Vec<CssCode> {
        vec![c422(), steane(), surface13(), hgp5()]
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn c422_parameters() {
        let c = c422();
        assert_eq!((c.n, c.m_x, c.m_z, c.k, c.ell), (4, 1, 1, 2, 4));
        assert_eq!(c.d, Some(2));
    }

    #[test]
    fn steane_parameters() {
        let c = steane();
        assert_eq!((c.n, c.k, c.ell), (7, 1, 6));
        assert_eq!(c.d, Some(3));
    }

    #[test]
    fn rejects_non_orthogonal() {
        let err = validate_css(
            BitMatrix::from_str_rows(&["11"]),
            BitMatrix::from_str_rows(&["10"]),
        )
        .unwrap_err();
        assert!(matches!(err, AtgError::NotOrthogonal { x_row: 0, z_row: 0 }));
    }

    #[test]
    fn rejects_rank_deficient() {
        let h = BitMatrix::from_str_rows(&["1111", "1111"]);
        let err = validate_css(h, BitMatrix::zeros(0, 4)).unwrap_err();
        assert!(matches!(err, AtgError::RankDeficient { .. }));
    }

    #[test]
    fn c422_logicals_pair_to_identity() {
        let lb = logical_basis(&c422());
        assert_eq!(lb.k(), 2);
        assert_eq!(lb.pairing(), BitMatrix::identity(2));
    }

    #[test]
    fn steane_weight_three_logical_in_coset() {
        let c = steane();
        let lb = logical_basis(&c);
        let rep = BitVector::from_str01("1110000");
        assert!(c.syndrome_z(&rep).unwrap().is_zero());
        // same coset as the basis element: difference lies in the row space of H_X
        let diff = rep.xor(&lb.x_logicals[0]);
        assert!(gf2::in_row_space(&c.h_x, &diff));
    }

    #[test]
    fn k_zero_has_empty_basis() {
        let c = validate_css(BitMatrix::from_str_rows(&["10", "01"]), BitMatrix::zeros(0, 2)).unwrap();
        assert_eq!(c.k, 0);
        assert_eq!(logical_basis(&c).k(), 0);
        assert_eq!(distance_bruteforce(&c, 10).unwrap(), None);
    }

    #[test]
    fn distance_refuses_large_n() {
        let mut c = steane();
        c.n = 40;
        assert!(matches!(
            distance_bruteforce(&c, 25),
            Err(AtgError::CapExceeded { .. })
        ));
    }

    #[test]
    fn hgp_fixtures() {
        let s = surface13();
        assert_eq!((s.n, s.k, s.d), (13, 1, Some(3)));
        let h = hgp5();
        assert_eq!((h.n, h.k, h.d), (5, 1, Some(2)));
    }

    #[test]
    fn syndromes() {
        let c = c422();
        assert!(c.syndrome_x(&BitVector::zeros(4)).unwrap().is_zero());
        assert_eq!(
            c.syndrome_x(&BitVector::from_str01("1000")).unwrap(),
            BitVector::from_str01("1")
        );
        let s = steane();
        for r in s.h_z.row_iter() {
            assert!(s.syndrome_x(r).unwrap().is_zero());
        }
        assert!(s.syndrome_x(&BitVector::zeros(3)).is_err());
    }

    #[test]
    fn parse_rejects_ragged() {
        let text = r#"{"name":"bad","hx":[[1,1,1]],"hz":[[1,1]]}"#;
        let err = parse_code_str(text, Path::new("bad.json")).unwrap_err();
        assert!(matches!(err, AtgError::Schema { .. }));
    }

    #[test]
    fn parse_reports_orthogonality() {
        let text = r#"{"name":"bad","hx":[[1,1]],"hz":[[1,0]]}"#;
        let err = parse_code_str(text, Path::new("bad.json")).unwrap_err();
        assert!(matches!(err, AtgError::NotOrthogonal { x_row: 0, z_row: 0 }));
    }
}
