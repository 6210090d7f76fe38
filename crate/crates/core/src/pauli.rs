//! The two-qubit Pauli group modulo phases.
//!
//! Elements are stored in symplectic form: one X bit and one Z bit per qubit,
//! with qubit 1 in the high bit. The canonical matrix representative of an
//! element is the plain tensor product of `I`, `X`, `Y`, `Z` with prefactor +1;
//! products keep track of the power of `i` that relates them back to a
//! canonical representative.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Mat4, I, ONE, ZERO};

/// Signless element of the two-qubit Pauli group.
///
/// Field order gives the `(x_bits, z_bits)` lexicographic order used to sort
/// triple members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOp {
    x_bits: u8,
    z_bits: u8,
}

impl PauliOp {
    pub const IDENTITY: PauliOp = PauliOp {
        x_bits: 0,
        z_bits: 0,
    };

    pub fn new(x_bits: u8, z_bits: u8) -> Result<Self> {
        if x_bits > 3 || z_bits > 3 {
            return Err(Error::input(format!(
                "symplectic bits out of range: x={x_bits:#b}, z={z_bits:#b}"
            )));
        }
        Ok(PauliOp { x_bits, z_bits })
    }

    pub fn x_bits(self) -> u8 {
        self.x_bits
    }

    pub fn z_bits(self) -> u8 {
        self.z_bits
    }

    pub fn is_identity(self) -> bool {
        self.x_bits | self.z_bits == 0
    }

    /// All 16 elements, identity first.
    pub fn all() -> impl Iterator<Item = PauliOp> {
        (0..16u8).map(|v| PauliOp {
            x_bits: v >> 2,
            z_bits: v & 3,
        })
    }

    pub fn non_identity() -> impl Iterator<Item = PauliOp> {
        Self::all().skip(1)
    }

    /// `(x, z)` bits of the single-qubit factor; qubit 0 is the left symbol.
    fn qubit(self, q: usize) -> (u8, u8) {
        let shift = 1 - q;
        ((self.x_bits >> shift) & 1, (self.z_bits >> shift) & 1)
    }

    pub fn from_label(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        if chars.len() != 2 {
            return Err(Error::input(format!(
                "Pauli label `{label}` must have exactly 2 characters"
            )));
        }
        let mut x_bits = 0;
        let mut z_bits = 0;
        for c in chars {
            let (x, z) = match c {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                other => {
                    return Err(Error::input(format!(
                        "Pauli label `{label}` contains `{other}`; expected one of I, X, Y, Z"
                    )))
                }
            };
            x_bits = (x_bits << 1) | x;
            z_bits = (z_bits << 1) | z;
        }
        Ok(PauliOp { x_bits, z_bits })
    }

    pub fn label(self) -> String {
        (0..2)
            .map(|q| match self.qubit(q) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            })
            .collect()
    }

    /// Symplectic form over GF(2); zero iff the canonical representatives commute.
    pub fn commutes(self, other: PauliOp) -> bool {
        let form = (self.x_bits & other.z_bits) ^ (self.z_bits & other.x_bits);
        form.count_ones().is_multiple_of(2)
    }

    pub fn matrix(self) -> Mat4 {
        let single = |(x, z): (u8, u8)| -> Mat2 {
            match (x, z) {
                (0, 0) => [[ONE, ZERO], [ZERO, ONE]],
                (1, 0) => [[ZERO, ONE], [ONE, ZERO]],
                (1, 1) => [[ZERO, -I], [I, ZERO]],
                _ => [[ONE, ZERO], [ZERO, -ONE]],
            }
        };
        linalg::kron(&single(self.qubit(0)), &single(self.qubit(1)))
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliOp::from_label(s)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PauliOp::from_label(&s).map_err(serde::de::Error::custom)
    }
}

/// `i^phase_exp` times the canonical representative of `op`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub op: PauliOp,
    pub phase_exp: u8,
}

impl SignedPauli {
    pub fn new(op: PauliOp, phase_exp: u8) -> Self {
        SignedPauli {
            op,
            phase_exp: phase_exp % 4,
        }
    }

    pub fn matrix(self) -> Mat4 {
        let phase = [ONE, I, -ONE, -I][self.phase_exp as usize];
        linalg::scale(&self.op.matrix(), phase)
    }

    /// `Some(+1)` or `Some(-1)` when the phase is real.
    pub fn sign(self) -> Option<i8> {
        match self.phase_exp {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl From<PauliOp> for SignedPauli {
    fn from(op: PauliOp) -> Self {
        SignedPauli { op, phase_exp: 0 }
    }
}

impl Mul for SignedPauli {
    type Output = SignedPauli;

    fn mul(self, rhs: SignedPauli) -> SignedPauli {
        let mut phase = self.phase_exp as u32 + rhs.phase_exp as u32;
        // Per qubit, with P(x,z) = i^{xz} X^x Z^z:
        // P1 P2 = i^{x1 z1 + x2 z2 + 2 z1 x2 - x3 z3} P(x3, z3).
        for q in 0..2 {
            let (x1, z1) = self.op.qubit(q);
            let (x2, z2) = rhs.op.qubit(q);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            phase += (x1 * z1 + x2 * z2 + 2 * z1 * x2) as u32;
            phase += 3 * (x3 * z3) as u32;
        }
        SignedPauli {
            op: PauliOp {
                x_bits: self.op.x_bits ^ rhs.op.x_bits,
                z_bits: self.op.z_bits ^ rhs.op.z_bits,
            },
            phase_exp: (phase % 4) as u8,
        }
    }
}

pub fn multiply(a: SignedPauli, b: SignedPauli) -> SignedPauli {
    a * b
}

pub fn commutes(a: PauliOp, b: PauliOp) -> bool {
    a.commutes(b)
}

pub fn matrix_rep(s: SignedPauli) -> Mat4 {
    s.matrix()
}

/// Three distinct, pairwise commuting, non-identity elements whose product is
/// `product_sign * II`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommutingTriple {
    ops: [PauliOp; 3],
    product_sign: i8,
}

impl CommutingTriple {
    /// Members may be given in any order; they are stored sorted.
    pub fn new(a: PauliOp, b: PauliOp, c: PauliOp) -> Result<Self> {
        let mut ops = [a, b, c];
        ops.sort();
        if ops.iter().any(|p| p.is_identity()) {
            return Err(Error::input("commuting triple cannot contain the identity"));
        }
        if ops[0] == ops[1] || ops[1] == ops[2] {
            return Err(Error::input(format!(
                "commuting triple members must be distinct: {a} {b} {c}"
            )));
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if !ops[i].commutes(ops[j]) {
                return Err(Error::input(format!(
                    "{} and {} anticommute",
                    ops[i], ops[j]
                )));
            }
        }
        let product = SignedPauli::from(ops[0]) * ops[1].into() * ops[2].into();
        if !product.op.is_identity() {
            return Err(Error::input(format!(
                "{a} {b} {c} is not closed under multiplication"
            )));
        }
        let product_sign = product
            .sign()
            .ok_or_else(|| Error::consistency("product of commuting Paulis has imaginary phase"))?;
        Ok(CommutingTriple { ops, product_sign })
    }

    pub fn ops(&self) -> [PauliOp; 3] {
        self.ops
    }

    pub fn product_sign(&self) -> i8 {
        self.product_sign
    }

    pub fn contains(&self, p: PauliOp) -> bool {
        self.ops.contains(&p)
    }

    pub fn shared_count(&self, other: &CommutingTriple) -> usize {
        self.ops.iter().filter(|p| other.contains(**p)).count()
    }

    pub fn labels(&self) -> [String; 3] {
        self.ops.map(PauliOp::label)
    }
}

impl fmt::Display for CommutingTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.ops;
        let sign = if self.product_sign < 0 { "-" } else { "" };
        write!(f, "{a} · {b} · {c} = {sign}II")
    }
}

/// The 15 commuting triples, in order of their sorted members.
pub fn enumerate_commuting_triples() -> Vec<CommutingTriple> {
    let ops: Vec<PauliOp> = PauliOp::non_identity().collect();
    let mut triples = Vec::with_capacity(15);
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            for k in j + 1..ops.len() {
                if let Ok(t) = CommutingTriple::new(ops[i], ops[j], ops[k]) {
                    triples.push(t);
                }
            }
        }
    }
    triples.sort();
    triples
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceReport {
    /// Number of triples each non-identity element belongs to, by label.
    pub membership: Vec<(String, usize)>,
    /// `histogram[c]` elements belong to exactly `c` triples.
    pub membership_histogram: Vec<usize>,
    /// For each triple, how many other triples share exactly one element.
    pub one_element_neighbors: Vec<usize>,
    pub ordered_intersecting_pairs: usize,
}

pub fn incidence_stats(triples: &[CommutingTriple]) -> IncidenceReport {
    let membership: Vec<(String, usize)> = PauliOp::non_identity()
        .map(|p| (p.label(), triples.iter().filter(|t| t.contains(p)).count()))
        .collect();
    let max = membership.iter().map(|(_, c)| *c).max().unwrap_or(0);
    let mut membership_histogram = vec![0; max + 1];
    for (_, c) in &membership {
        membership_histogram[*c] += 1;
    }
    let one_element_neighbors: Vec<usize> = triples
        .iter()
        .enumerate()
        .map(|(i, t)| {
            triples
                .iter()
                .enumerate()
                .filter(|(j, u)| *j != i && t.shared_count(u) == 1)
                .count()
        })
        .collect();
    let ordered_intersecting_pairs = one_element_neighbors.iter().sum();
    IncidenceReport {
        membership,
        membership_histogram,
        one_element_neighbors,
        ordered_intersecting_pairs,
    }
}

/// Nine distinct operators laid out as three row triples crossing three
/// column triples, each row meeting each column in exactly one operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMagicSquare {
    pub rows: [CommutingTriple; 3],
    pub cols: [CommutingTriple; 3],
    pub grid: [[PauliOp; 3]; 3],
}

impl OperatorMagicSquare {
    /// Builds the grid from row and column triples, or `None` when they do not
    /// cross in exactly one element pairwise.
    pub fn from_lines(rows: [CommutingTriple; 3], cols: [CommutingTriple; 3]) -> Option<Self> {
        let mut grid = [[PauliOp::IDENTITY; 3]; 3];
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                let shared: Vec<PauliOp> =
                    r.ops.iter().copied().filter(|p| c.contains(*p)).collect();
                if shared.len() != 1 {
                    return None;
                }
                grid[i][j] = shared[0];
            }
        }
        let distinct: BTreeSet<PauliOp> = grid.iter().flatten().copied().collect();
        (distinct.len() == 9).then_some(OperatorMagicSquare { rows, cols, grid })
    }

    pub fn negative_lines(&self) -> usize {
        self.rows
            .iter()
            .chain(&self.cols)
            .filter(|t| t.product_sign < 0)
            .count()
    }

    pub fn operators(&self) -> BTreeSet<PauliOp> {
        self.grid.iter().flatten().copied().collect()
    }

    pub fn lines(&self) -> impl Iterator<Item = &CommutingTriple> {
        self.rows.iter().chain(&self.cols)
    }

    /// Row and column triples each sorted, with the lexicographically smaller
    /// set first. Equal keys mean equal squares up to row/column permutation
    /// and transpose.
    pub fn canonical_key(&self) -> ([CommutingTriple; 3], [CommutingTriple; 3]) {
        let mut r = self.rows;
        let mut c = self.cols;
        r.sort();
        c.sort();
        if c < r {
            (c, r)
        } else {
            (r, c)
        }
    }
}

/// All operator magic squares up to row/column permutation and transpose, in
/// canonical order. Rows are the lexicographically smaller line set.
pub fn enumerate_magic_squares(triples: &[CommutingTriple]) -> Vec<OperatorMagicSquare> {
    let disjoint = |a: &CommutingTriple, b: &CommutingTriple| a.shared_count(b) == 0;
    let n = triples.len();
    let mut partitions = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !disjoint(&triples[i], &triples[j]) {
                continue;
            }
            for k in j + 1..n {
                if disjoint(&triples[i], &triples[k]) && disjoint(&triples[j], &triples[k]) {
                    partitions.push([triples[i], triples[j], triples[k]]);
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut squares = Vec::new();
    for rows in &partitions {
        for cols in &partitions {
            let Some(sq) = OperatorMagicSquare::from_lines(*rows, *cols) else {
                continue;
            };
            let key = sq.canonical_key();
            if seen.insert(key) {
                let (r, c) = key;
                squares.push(OperatorMagicSquare::from_lines(r, c).expect("canonical lines cross"));
            }
        }
    }
    squares.sort_by_key(|s| s.canonical_key());
    squares
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleJson {
    pub ops: Vec<String>,
    pub sign: i8,
}

impl From<&CommutingTriple> for TripleJson {
    fn from(t: &CommutingTriple) -> Self {
        TripleJson {
            ops: t.labels().to_vec(),
            sign: t.product_sign,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareJson {
    pub rows: Vec<TripleJson>,
    pub cols: Vec<TripleJson>,
    pub grid: Vec<Vec<String>>,
}

impl From<&OperatorMagicSquare> for SquareJson {
    fn from(s: &OperatorMagicSquare) -> Self {
        SquareJson {
            rows: s.rows.iter().map(TripleJson::from).collect(),
            cols: s.cols.iter().map(TripleJson::from).collect(),
            grid: s
                .grid
                .iter()
                .map(|r| r.iter().map(|p| p.label()).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_diff, mul, sub, trace};

    fn op(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn sp(s: &str) -> SignedPauli {
        op(s).into()
    }

    #[test]
    fn labels_encode_symplectic_bits() {
        assert_eq!(op("II"), PauliOp::new(0b00, 0b00).unwrap());
        assert_eq!(op("XX"), PauliOp::new(0b11, 0b00).unwrap());
        assert_eq!(op("YZ"), PauliOp::new(0b10, 0b11).unwrap());
        for p in PauliOp::all() {
            assert_eq!(op(&p.label()), p);
        }
        assert_eq!(PauliOp::all().collect::<BTreeSet<_>>().len(), 16);
        assert_eq!(
            PauliOp::non_identity().filter(|p| p.is_identity()).count(),
            0
        );
    }

    #[test]
    fn malformed_labels_name_the_offender() {
        let err = PauliOp::from_label("XW").unwrap_err().to_string();
        assert!(err.contains('W'), "{err}");
        assert!(PauliOp::from_label("X").is_err());
        assert!(PauliOp::from_label("XYZ").is_err());
        assert!(PauliOp::from_label("xx").is_err());
    }

    #[test]
    fn product_examples() {
        assert_eq!(sp("XX") * sp("XX"), SignedPauli::new(op("II"), 0));
        assert_eq!(sp("XX") * sp("YY"), SignedPauli::new(op("ZZ"), 2));
        assert_eq!(sp("IX") * sp("XI"), SignedPauli::new(op("XX"), 0));
        assert_eq!(sp("XI") * sp("YI"), SignedPauli::new(op("ZI"), 1));
        assert_eq!(sp("YI") * sp("XI"), SignedPauli::new(op("ZI"), 3));
    }

    #[test]
    fn commutation_examples() {
        for p in PauliOp::all() {
            assert!(commutes(PauliOp::IDENTITY, p));
        }
        assert!(commutes(op("XX"), op("YY")));
        assert!(!commutes(op("XI"), op("ZI")));
    }

    // Matrix oracle: every product and commutator over all 256 ordered pairs.
    #[test]
    fn algebra_agrees_with_matrices() {
        for a in PauliOp::all() {
            for b in PauliOp::all() {
                let ma = a.matrix();
                let mb = b.matrix();
                let prod = mul(&ma, &mb);
                let got = matrix_rep(multiply(a.into(), b.into()));
                assert!(max_abs_diff(&prod, &got) == 0.0, "{a}·{b}");
                let comm = sub(&prod, &mul(&mb, &ma));
                assert_eq!(commutes(a, b), max_abs(&comm) == 0.0, "[{a},{b}]");
            }
        }
    }

    #[test]
    fn phases_compose_with_matrices() {
        for a in PauliOp::all() {
            for b in PauliOp::all() {
                for (pa, pb) in [(1, 0), (2, 3), (3, 3)] {
                    let x = SignedPauli::new(a, pa);
                    let y = SignedPauli::new(b, pb);
                    let want = mul(&x.matrix(), &y.matrix());
                    assert!(max_abs_diff(&want, &(x * y).matrix()) == 0.0);
                }
            }
        }
    }

    #[test]
    fn non_identity_elements_are_traceless() {
        assert_eq!(PauliOp::IDENTITY.matrix(), crate::linalg::identity4());
        for p in PauliOp::non_identity() {
            assert_eq!(trace(&p.matrix()).norm(), 0.0);
        }
    }

    #[test]
    fn fifteen_triples_three_negative() {
        let triples = enumerate_commuting_triples();
        assert_eq!(triples.len(), 15);
        let negative: BTreeSet<BTreeSet<String>> = triples
            .iter()
            .filter(|t| t.product_sign() < 0)
            .map(|t| t.labels().into_iter().collect())
            .collect();
        let want: BTreeSet<BTreeSet<String>> =
            [["XX", "YY", "ZZ"], ["XY", "YZ", "ZX"], ["XZ", "YX", "ZY"]]
                .iter()
                .map(|l| l.iter().map(|s| s.to_string()).collect())
                .collect();
        assert_eq!(negative, want);
        let t = CommutingTriple::new(op("IX"), op("XI"), op("XX")).unwrap();
        assert!(triples.contains(&t));
        assert_eq!(t.product_sign(), 1);
    }

    #[test]
    fn triple_sign_is_order_independent() {
        for t in enumerate_commuting_triples() {
            let [a, b, c] = t.ops();
            for perm in [
                [a, b, c],
                [a, c, b],
                [b, a, c],
                [b, c, a],
                [c, a, b],
                [c, b, a],
            ] {
                let p = SignedPauli::from(perm[0]) * perm[1].into() * perm[2].into();
                assert!(p.op.is_identity());
                assert_eq!(p.sign(), Some(t.product_sign()));
            }
        }
    }

    #[test]
    fn triple_constructor_rejects_bad_input() {
        assert!(CommutingTriple::new(op("XI"), op("ZI"), op("YI")).is_err());
        assert!(CommutingTriple::new(op("II"), op("XI"), op("XI")).is_err());
        assert!(CommutingTriple::new(op("XX"), op("XX"), op("YY")).is_err());
    }

    #[test]
    fn incidence_structure() {
        let r = incidence_stats(&enumerate_commuting_triples());
        assert!(r.membership.iter().all(|(_, c)| *c == 3));
        assert_eq!(r.membership_histogram, vec![0, 0, 0, 15]);
        assert!(r.one_element_neighbors.iter().all(|c| *c == 6));
        assert_eq!(r.ordered_intersecting_pairs, 90);
    }

    #[test]
    fn ten_magic_squares_with_odd_negative_lines() {
        let squares = enumerate_magic_squares(&enumerate_commuting_triples());
        assert_eq!(squares.len(), 10);
        for s in &squares {
            assert_eq!(s.operators().len(), 9);
            assert_eq!(s.negative_lines() % 2, 1);
            for i in 0..3 {
                let row: BTreeSet<_> = s.grid[i].iter().copied().collect();
                assert_eq!(row, s.rows[i].ops().into_iter().collect());
                let col: BTreeSet<_> = (0..3).map(|r| s.grid[r][i]).collect();
                assert_eq!(col, s.cols[i].ops().into_iter().collect());
            }
        }
        let mermin_rows: BTreeSet<CommutingTriple> =
            [["XX", "YZ", "ZY"], ["YY", "ZX", "XZ"], ["ZZ", "XY", "YX"]]
                .iter()
                .map(|[a, b, c]| CommutingTriple::new(op(a), op(b), op(c)).unwrap())
                .collect();
        let hits = squares
            .iter()
            .filter(|s| {
                let r: BTreeSet<_> = s.rows.iter().copied().collect();
                let c: BTreeSet<_> = s.cols.iter().copied().collect();
                r == mermin_rows || c == mermin_rows
            })
            .count();
        assert_eq!(hits, 1);
    }

    #[test]
    fn enumeration_is_order_independent() {
        let mut triples = enumerate_commuting_triples();
        let forward = enumerate_magic_squares(&triples);
        triples.reverse();
        assert_eq!(enumerate_magic_squares(&triples), forward);
    }

    #[test]
    fn pauli_json_uses_labels() {
        let s = serde_json::to_string(&op("YZ")).unwrap();
        assert_eq!(s, "\"YZ\"");
        let back: PauliOp = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op("YZ"));
    }
}
