//! The MS, AMS and p-SAMS games.
//!
//! Questions are equations over boolean variables; every variable stands for
//! one Pauli operator and every equation for one commuting triple. A player
//! answers an equation with three bits, one per variable in the order the
//! variables are listed in the equation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{self, CommutingTriple, PauliOp};
use crate::rational::{self, Rational, RationalJson};

/// Operator attached to each AMS variable `V_0..V_14`.
pub const AMS_VARIABLES: [&str; 15] = [
    "IX", "IY", "IZ", "XI", "YI", "ZI", "XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ",
];

/// AMS equations: variables in printed order, right-hand side.
pub const AMS_EQUATIONS: [([usize; 3], u8); 15] = [
    ([0, 3, 6], 0),
    ([1, 3, 7], 0),
    ([2, 3, 8], 0),
    ([0, 4, 9], 0),
    ([1, 4, 10], 0),
    ([2, 4, 11], 0),
    ([0, 5, 12], 0),
    ([1, 5, 13], 0),
    ([2, 5, 14], 0),
    ([11, 13, 6], 0),
    ([12, 8, 10], 0),
    ([7, 9, 14], 0),
    ([6, 10, 14], 1),
    ([7, 11, 12], 1),
    ([8, 9, 13], 1),
];

/// Operator attached to each MS variable, read row by row off the square.
pub const MS_VARIABLES: [&str; 9] = ["XX", "YZ", "ZY", "YY", "ZX", "XZ", "ZZ", "XY", "YX"];

/// MS equations: three rows (even parity) then three columns (odd parity).
pub const MS_EQUATIONS: [([usize; 3], u8); 6] = [
    ([0, 1, 2], 0),
    ([3, 4, 5], 0),
    ([6, 7, 8], 0),
    ([0, 3, 6], 1),
    ([1, 4, 7], 1),
    ([2, 5, 8], 1),
];

/// Deterministic generator behind every seeded draw in the crate: ChaCha8
/// keyed by `seed_from_u64`. The stream is platform independent.
pub type GameRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> GameRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Ms,
    Ams,
    Psams,
}

impl GameKind {
    pub fn id(self) -> &'static str {
        match self {
            GameKind::Ms => "ms",
            GameKind::Ams => "ams",
            GameKind::Psams => "psams",
        }
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ms" => Ok(GameKind::Ms),
            "ams" => Ok(GameKind::Ams),
            "psams" => Ok(GameKind::Psams),
            other => Err(Error::input(format!(
                "unknown game `{other}`; expected ms, ams or psams"
            ))),
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub id: usize,
    pub vars: [usize; 3],
    pub parity: u8,
}

impl Equation {
    pub fn position_of(&self, var: usize) -> Option<usize> {
        self.vars.iter().position(|v| *v == var)
    }

    /// The four answers meeting this equation's parity, ascending.
    pub fn valid_answers(&self) -> [AnswerTriple; 4] {
        let mut out = [AnswerTriple(0); 4];
        let mut n = 0;
        for v in 0..8u8 {
            if (v.count_ones() as u8 & 1) == self.parity {
                out[n] = AnswerTriple(v);
                n += 1;
            }
        }
        out
    }

    pub fn satisfied_by(&self, a: AnswerTriple) -> bool {
        a.parity() == self.parity
    }
}

/// Three answer bits; bit `i` is the value given to the equation's `i`-th variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AnswerTriple(u8);

impl AnswerTriple {
    pub fn new(value: u8) -> Result<Self> {
        if value > 7 {
            return Err(Error::input(format!(
                "answer value {value} does not fit in 3 bits"
            )));
        }
        Ok(AnswerTriple(value))
    }

    pub fn from_bits(bits: [u8; 3]) -> Result<Self> {
        if let Some(b) = bits.iter().find(|b| **b > 1) {
            return Err(Error::input(format!("answer bit {b} is not 0 or 1")));
        }
        Ok(AnswerTriple(bits[0] | bits[1] << 1 | bits[2] << 2))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn bit(self, position: usize) -> u8 {
        (self.0 >> position) & 1
    }

    pub fn bits(self) -> [u8; 3] {
        [self.bit(0), self.bit(1), self.bit(2)]
    }

    pub fn parity(self) -> u8 {
        (self.0.count_ones() & 1) as u8
    }

    pub fn all() -> impl Iterator<Item = AnswerTriple> {
        (0..8).map(AnswerTriple)
    }
}

impl fmt::Display for AnswerTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.bits();
        write!(f, "{a}{b}{c}")
    }
}

impl Serialize for AnswerTriple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bits().serialize(s)
    }
}

/// One refereed round and its outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Round {
    pub j: usize,
    pub k: usize,
    pub a: AnswerTriple,
    pub b: AnswerTriple,
    pub win: bool,
}

/// A question pair with positive probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPair {
    pub j: usize,
    pub k: usize,
    pub weight: Rational,
    /// `(position in E_j, position in E_k)` for every shared variable.
    pub shared: Vec<(usize, usize)>,
}

impl WeightedPair {
    pub fn is_sync(&self) -> bool {
        self.j == self.k
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    kind: GameKind,
    equations: Vec<Equation>,
    variable_ops: Vec<PauliOp>,
    pairs: Vec<WeightedPair>,
    sync_weight: Rational,
    pair_index: Vec<Option<usize>>,
}

impl GameSpec {
    fn assemble(
        kind: GameKind,
        table: &[([usize; 3], u8)],
        labels: &[&str],
        sync_weight: Rational,
    ) -> Result<Self> {
        let equations: Vec<Equation> = table
            .iter()
            .enumerate()
            .map(|(id, (vars, parity))| Equation {
                id,
                vars: *vars,
                parity: *parity,
            })
            .collect();
        let variable_ops = labels
            .iter()
            .map(|l| PauliOp::from_label(l))
            .collect::<Result<Vec<_>>>()?;
        let n = equations.len();

        let mut async_pairs = Vec::new();
        for a in &equations {
            for b in &equations {
                if a.id == b.id {
                    continue;
                }
                let shared: Vec<(usize, usize)> = a
                    .vars
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| b.position_of(*v).map(|pk| (i, pk)))
                    .collect();
                if shared.len() == 1 {
                    async_pairs.push((a.id, b.id, shared));
                }
            }
        }
        let async_weight = if async_pairs.is_empty() {
            Rational::zero()
        } else {
            (Rational::one() - sync_weight) / async_pairs.len() as i64
        };
        let diag_weight = sync_weight / n as i64;

        let mut pairs = Vec::new();
        for j in 0..n {
            if diag_weight > Rational::zero() {
                pairs.push(WeightedPair {
                    j,
                    k: j,
                    weight: diag_weight,
                    shared: vec![(0, 0), (1, 1), (2, 2)],
                });
            }
            if async_weight > Rational::zero() {
                for (a, b, shared) in async_pairs.iter().filter(|(a, _, _)| *a == j) {
                    pairs.push(WeightedPair {
                        j: *a,
                        k: *b,
                        weight: async_weight,
                        shared: shared.clone(),
                    });
                }
            }
        }
        pairs.sort_by_key(|p| (p.j, p.k));
        let mut pair_index = vec![None; n * n];
        for (i, p) in pairs.iter().enumerate() {
            pair_index[p.j * n + p.k] = Some(i);
        }

        let g = GameSpec {
            kind,
            equations,
            variable_ops,
            pairs,
            sync_weight,
            pair_index,
        };
        g.check_structure()?;
        Ok(g)
    }

    fn check_structure(&self) -> Result<()> {
        let total: Rational = self.pairs.iter().map(|p| p.weight).sum();
        if total != Rational::one() {
            return Err(Error::consistency(format!(
                "pair weights sum to {}",
                rational::display(total)
            )));
        }
        for p in &self.pairs {
            let ok = if p.is_sync() {
                p.weight == self.sync_weight / self.n_questions() as i64
            } else {
                p.shared.len() == 1
            };
            if !ok {
                return Err(Error::consistency(format!(
                    "malformed pair ({}, {})",
                    p.j, p.k
                )));
            }
        }
        // Each equation must be a commuting triple whose sign is its parity.
        for e in &self.equations {
            let [a, b, c] = e.vars.map(|v| self.variable_ops[v]);
            let t = CommutingTriple::new(a, b, c)
                .map_err(|err| Error::consistency(format!("equation {}: {err}", e.id)))?;
            if (t.product_sign() < 0) as u8 != e.parity {
                return Err(Error::consistency(format!(
                    "equation {} has parity {} but its triple is {t}",
                    e.id, e.parity
                )));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn n_questions(&self) -> usize {
        self.equations.len()
    }

    pub fn n_variables(&self) -> usize {
        self.variable_ops.len()
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn equation(&self, j: usize) -> &Equation {
        &self.equations[j]
    }

    pub fn variable_ops(&self) -> &[PauliOp] {
        &self.variable_ops
    }

    /// Operators of equation `j` in the order of its variables.
    pub fn equation_ops(&self, j: usize) -> [PauliOp; 3] {
        self.equations[j].vars.map(|v| self.variable_ops[v])
    }

    pub fn pairs(&self) -> &[WeightedPair] {
        &self.pairs
    }

    pub fn sync_weight(&self) -> Rational {
        self.sync_weight
    }

    pub fn pair(&self, j: usize, k: usize) -> Option<&WeightedPair> {
        let n = self.n_questions();
        if j >= n || k >= n {
            return None;
        }
        self.pair_index[j * n + k].map(|i| &self.pairs[i])
    }

    pub fn weight(&self, j: usize, k: usize) -> Rational {
        self.pair(j, k).map_or(Rational::zero(), |p| p.weight)
    }

    /// Equations containing variable `m`, ascending.
    pub fn equations_with(&self, m: usize) -> Vec<usize> {
        self.equations
            .iter()
            .filter(|e| e.vars.contains(&m))
            .map(|e| e.id)
            .collect()
    }

    pub fn distribution(&self) -> PairDistribution {
        PairDistribution(self.pairs.iter().map(|p| ((p.j, p.k), p.weight)).collect())
    }

    pub fn to_json(&self) -> GameJson {
        GameJson {
            game: self.kind,
            variables: self.variable_ops.iter().map(|p| p.label()).collect(),
            equations: self
                .equations
                .iter()
                .map(|e| EquationJson {
                    id: e.id,
                    vars: e.vars,
                    parity: e.parity,
                })
                .collect(),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairJson {
                    j: p.j,
                    k: p.k,
                    num: *p.weight.numer(),
                    den: *p.weight.denom(),
                })
                .collect(),
            p: self.sync_weight.into(),
        }
    }
}

/// `R(j, k, a, b)`: both parities hold and the answers agree on every shared
/// variable. Zero-probability pairs are rejected.
pub fn payoff(g: &GameSpec, j: usize, k: usize, a: AnswerTriple, b: AnswerTriple) -> Result<bool> {
    let pair = g.pair(j, k).ok_or_else(|| {
        Error::input(format!(
            "question pair ({j}, {k}) has probability zero in the {} game",
            g.kind
        ))
    })?;
    Ok(wins(g, pair, a, b))
}

#[inline]
pub(crate) fn wins(g: &GameSpec, pair: &WeightedPair, a: AnswerTriple, b: AnswerTriple) -> bool {
    g.equations[pair.j].satisfied_by(a)
        && g.equations[pair.k].satisfied_by(b)
        && pair.shared.iter().all(|(pa, pb)| a.bit(*pa) == b.bit(*pb))
}

pub fn build_ms_game() -> Result<GameSpec> {
    GameSpec::assemble(GameKind::Ms, &MS_EQUATIONS, &MS_VARIABLES, Rational::zero())
}

/// Builds the AMS game, regenerating its equations from the commuting triples
/// of the Pauli group and checking them against the fixed table.
pub fn build_ams_game() -> Result<GameSpec> {
    let g = GameSpec::assemble(
        GameKind::Ams,
        &AMS_EQUATIONS,
        &AMS_VARIABLES,
        Rational::zero(),
    )?;
    let generated =
        equations_from_triples(&pauli::enumerate_commuting_triples(), g.variable_ops())?;
    let tabled: BTreeSet<(BTreeSet<usize>, u8)> = g
        .equations
        .iter()
        .map(|e| (e.vars.iter().copied().collect(), e.parity))
        .collect();
    if generated != tabled {
        return Err(Error::consistency(
            "equations generated from the commuting triples differ from the AMS table",
        ));
    }
    Ok(g)
}

/// `(variable set, parity)` for each triple under the given variable labelling.
pub fn equations_from_triples(
    triples: &[CommutingTriple],
    variable_ops: &[PauliOp],
) -> Result<BTreeSet<(BTreeSet<usize>, u8)>> {
    triples
        .iter()
        .map(|t| {
            let vars = t
                .ops()
                .iter()
                .map(|p| {
                    variable_ops
                        .iter()
                        .position(|q| q == p)
                        .ok_or_else(|| Error::consistency(format!("{p} has no variable")))
                })
                .collect::<Result<BTreeSet<usize>>>()?;
            Ok((vars, (t.product_sign() < 0) as u8))
        })
        .collect()
}

/// The p-SAMS game; `p = 0` gives back the AMS game itself.
pub fn build_psams_game(p: Rational) -> Result<GameSpec> {
    if !rational::in_unit_interval(p) {
        return Err(Error::input(format!(
            "synchronous probability {} is outside [0, 1]",
            rational::display(p)
        )));
    }
    let ams = build_ams_game()?;
    if p.is_zero() {
        return Ok(ams);
    }
    GameSpec::assemble(GameKind::Psams, &AMS_EQUATIONS, &AMS_VARIABLES, p)
}

pub fn build_game(kind: GameKind, p: Option<Rational>) -> Result<GameSpec> {
    match (kind, p) {
        (GameKind::Ms, None) => build_ms_game(),
        (GameKind::Ams, None) => build_ams_game(),
        (GameKind::Psams, Some(p)) => build_psams_game(p),
        (GameKind::Psams, None) => Err(Error::input("the psams game needs a value for p")),
        (k, Some(_)) => Err(Error::input(format!("the {k} game takes no p parameter"))),
    }
}

/// Exact probability of every ordered question pair; absent pairs have zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDistribution(pub BTreeMap<(usize, usize), Rational>);

impl PairDistribution {
    pub fn total(&self) -> Rational {
        self.0.values().sum()
    }

    pub fn get(&self, j: usize, k: usize) -> Rational {
        self.0.get(&(j, k)).copied().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&mut self, j: usize, k: usize, w: Rational) {
        *self.0.entry((j, k)).or_insert_with(Rational::zero) += w;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingProcedure {
    Flat,
    EquationFirst,
    VariableFirst,
    MagicSquareFirst,
}

impl SamplingProcedure {
    pub const ALL: [SamplingProcedure; 4] = [
        SamplingProcedure::Flat,
        SamplingProcedure::EquationFirst,
        SamplingProcedure::VariableFirst,
        SamplingProcedure::MagicSquareFirst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplingProcedure::Flat => "flat",
            SamplingProcedure::EquationFirst => "equation_first",
            SamplingProcedure::VariableFirst => "variable_first",
            SamplingProcedure::MagicSquareFirst => "magic_square_first",
        }
    }
}

impl FromStr for SamplingProcedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SamplingProcedure::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown sampling procedure `{s}`; expected flat, equation_first, variable_first or magic_square_first"
                ))
            })
    }
}

impl fmt::Display for SamplingProcedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Row and column equation ids of one of the MS-equivalent subgames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquareLines {
    pub rows: [usize; 3],
    pub cols: [usize; 3],
}

impl SquareLines {
    /// The 18 ordered row/column pairs, i.e. the subgame's question support.
    pub fn ordered_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(18);
        for r in self.rows {
            for c in self.cols {
                out.push((r, c));
                out.push((c, r));
            }
        }
        out.sort();
        out
    }
}

/// The 10 operator magic squares expressed as AMS equation ids.
pub fn magic_square_lines(g: &GameSpec) -> Result<Vec<SquareLines>> {
    let by_ops: BTreeMap<BTreeSet<PauliOp>, usize> = (0..g.n_questions())
        .map(|j| (g.equation_ops(j).into_iter().collect(), j))
        .collect();
    let find = |t: &CommutingTriple| {
        by_ops
            .get(&t.ops().into_iter().collect::<BTreeSet<_>>())
            .copied()
            .ok_or_else(|| Error::consistency(format!("triple {t} is not an equation of the game")))
    };
    pauli::enumerate_magic_squares(&pauli::enumerate_commuting_triples())
        .iter()
        .map(|s| {
            Ok(SquareLines {
                rows: [find(&s.rows[0])?, find(&s.rows[1])?, find(&s.rows[2])?],
                cols: [find(&s.cols[0])?, find(&s.cols[1])?, find(&s.cols[2])?],
            })
        })
        .collect()
}

fn require_ams(g: &GameSpec, procedure: SamplingProcedure) -> Result<()> {
    if procedure != SamplingProcedure::Flat && g.kind != GameKind::Ams {
        return Err(Error::UnsupportedProcedure {
            procedure: procedure.name().to_string(),
            game: format!("the {} game", g.kind),
        });
    }
    Ok(())
}

/// Exact distribution induced by a sampling procedure, obtained by walking
/// its decision tree rather than by sampling.
pub fn exact_pair_distribution(
    g: &GameSpec,
    procedure: SamplingProcedure,
) -> Result<PairDistribution> {
    require_ams(g, procedure)?;
    let mut d = PairDistribution(BTreeMap::new());
    let n = g.n_questions();
    match procedure {
        SamplingProcedure::Flat => return Ok(g.distribution()),
        SamplingProcedure::EquationFirst => {
            for j in 0..n {
                let partners = intersecting(g, j);
                let w = Rational::new(1, (n * partners.len()) as i64);
                for k in partners {
                    d.add(j, k, w);
                }
            }
        }
        SamplingProcedure::VariableFirst => {
            let nv = g.n_variables();
            for m in 0..nv {
                let eqs = g.equations_with(m);
                let choices = (eqs.len() * (eqs.len() - 1)) as i64;
                for &j in &eqs {
                    for &k in eqs.iter().filter(|k| **k != j) {
                        d.add(j, k, Rational::new(1, nv as i64 * choices));
                    }
                }
            }
        }
        SamplingProcedure::MagicSquareFirst => {
            let squares = magic_square_lines(g)?;
            for s in &squares {
                let pairs = s.ordered_pairs();
                let w = Rational::new(1, (squares.len() * pairs.len()) as i64);
                for (j, k) in pairs {
                    d.add(j, k, w);
                }
            }
        }
    }
    Ok(d)
}

fn intersecting(g: &GameSpec, j: usize) -> Vec<usize> {
    (0..g.n_questions())
        .filter(|&k| k != j && g.pair(j, k).is_some())
        .collect()
}

/// Draws question pairs according to one sampling procedure; structure is
/// precomputed so repeated draws are cheap.
#[derive(Debug, Clone)]
pub struct QuestionSampler {
    procedure: SamplingProcedure,
    /// Flat: cumulative integer weights over `pairs`.
    cumulative: Vec<u64>,
    pairs: Vec<(usize, usize)>,
    partners: Vec<Vec<usize>>,
    var_equations: Vec<Vec<usize>>,
    square_pairs: Vec<Vec<(usize, usize)>>,
}

impl QuestionSampler {
    pub fn new(g: &GameSpec, procedure: SamplingProcedure) -> Result<Self> {
        require_ams(g, procedure)?;
        let scale = rational::common_denominator(g.pairs().iter().map(|p| &p.weight));
        let mut acc = 0u64;
        let cumulative = g
            .pairs()
            .iter()
            .map(|p| {
                acc += (p.weight * scale).to_integer() as u64;
                acc
            })
            .collect();
        let mut sampler = QuestionSampler {
            procedure,
            cumulative,
            pairs: g.pairs().iter().map(|p| (p.j, p.k)).collect(),
            partners: Vec::new(),
            var_equations: Vec::new(),
            square_pairs: Vec::new(),
        };
        match procedure {
            SamplingProcedure::Flat => {}
            SamplingProcedure::EquationFirst => {
                sampler.partners = (0..g.n_questions()).map(|j| intersecting(g, j)).collect();
            }
            SamplingProcedure::VariableFirst => {
                sampler.var_equations = (0..g.n_variables()).map(|m| g.equations_with(m)).collect();
            }
            SamplingProcedure::MagicSquareFirst => {
                sampler.square_pairs = magic_square_lines(g)?
                    .iter()
                    .map(|s| s.ordered_pairs())
                    .collect();
            }
        }
        Ok(sampler)
    }

    pub fn procedure(&self) -> SamplingProcedure {
        self.procedure
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        match self.procedure {
            SamplingProcedure::Flat => {
                let total = *self.cumulative.last().expect("game has pairs");
                let x = rng.gen_range(0..total);
                self.pairs[self.cumulative.partition_point(|c| *c <= x)]
            }
            SamplingProcedure::EquationFirst => {
                let j = rng.gen_range(0..self.partners.len());
                let ks = &self.partners[j];
                (j, ks[rng.gen_range(0..ks.len())])
            }
            SamplingProcedure::VariableFirst => {
                let eqs = &self.var_equations[rng.gen_range(0..self.var_equations.len())];
                let a = rng.gen_range(0..eqs.len());
                let mut b = rng.gen_range(0..eqs.len() - 1);
                if b >= a {
                    b += 1;
                }
                (eqs[a], eqs[b])
            }
            SamplingProcedure::MagicSquareFirst => {
                let sq = &self.square_pairs[rng.gen_range(0..self.square_pairs.len())];
                sq[rng.gen_range(0..sq.len())]
            }
        }
    }
}

pub fn sample_question_pair<R: Rng + ?Sized>(
    g: &GameSpec,
    procedure: SamplingProcedure,
    rng: &mut R,
) -> Result<(usize, usize)> {
    Ok(QuestionSampler::new(g, procedure)?.sample(rng))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationJson {
    pub id: usize,
    pub vars: [usize; 3],
    pub parity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub j: usize,
    pub k: usize,
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameJson {
    pub game: GameKind,
    pub variables: Vec<String>,
    pub equations: Vec<EquationJson>,
    pub pairs: Vec<PairJson>,
    pub p: RationalJson,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ans(bits: [u8; 3]) -> AnswerTriple {
        AnswerTriple::from_bits(bits).unwrap()
    }

    #[test]
    fn ms_structure() {
        let g = build_ms_game().unwrap();
        assert_eq!(g.pairs().len(), 18);
        assert_eq!(g.weight(0, 3), Rational::new(1, 18));
        assert_eq!(g.weight(0, 1), Rational::zero());
        for p in g.pairs() {
            assert!((p.j < 3) != (p.k < 3), "rows only meet columns");
        }
        let parities: Vec<u8> = g.equations().iter().map(|e| e.parity).collect();
        assert_eq!(parities, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn ams_structure() {
        let g = build_ams_game().unwrap();
        assert_eq!(g.pairs().len(), 90);
        assert!(g.pairs().iter().all(|p| p.weight == Rational::new(1, 90)));
        let p09 = g.pair(0, 9).unwrap();
        assert_eq!(p09.shared.len(), 1);
        let (pa, pb) = p09.shared[0];
        assert_eq!(g.equation(0).vars[pa], 6);
        assert_eq!(g.equation(9).vars[pb], 6);
        assert_eq!(g.weight(0, 4), Rational::zero());
        for m in 0..15 {
            assert_eq!(g.equations_with(m).len(), 3);
        }
        let odd: Vec<usize> = g
            .equations()
            .iter()
            .filter(|e| e.parity == 1)
            .map(|e| e.id)
            .collect();
        assert_eq!(odd, vec![12, 13, 14]);
    }

    #[test]
    fn tampered_table_is_detected() {
        let mut table = AMS_EQUATIONS;
        table[12].1 = 0;
        let err = GameSpec::assemble(GameKind::Ams, &table, &AMS_VARIABLES, Rational::zero())
            .unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }

    #[test]
    fn psams_weights() {
        assert_eq!(
            build_psams_game(Rational::zero()).unwrap(),
            build_ams_game().unwrap()
        );

        let one = build_psams_game(Rational::one()).unwrap();
        assert_eq!(one.pairs().len(), 15);
        assert!(one
            .pairs()
            .iter()
            .all(|p| p.is_sync() && p.weight == Rational::new(1, 15)));

        let g = build_psams_game(Rational::new(1, 7)).unwrap();
        assert_eq!(g.pairs().len(), 105);
        assert_eq!(g.weight(3, 3), Rational::new(1, 105));
        assert_eq!(g.weight(0, 9), Rational::new(6, 630));

        assert!(build_psams_game(Rational::new(-1, 7)).is_err());
        assert!(build_psams_game(Rational::new(8, 7)).is_err());
    }

    #[test]
    fn payoff_cases() {
        let g = build_ams_game().unwrap();
        // E_0 = (V0, V3, V6), E_9 = (V11, V13, V6).
        assert!(payoff(&g, 0, 9, ans([0, 0, 0]), ans([1, 1, 0])).unwrap());
        assert!(!payoff(&g, 0, 9, ans([0, 0, 0]), ans([1, 0, 1])).unwrap());
        assert!(!payoff(&g, 0, 9, ans([1, 0, 0]), ans([1, 1, 0])).unwrap());
        assert!(payoff(&g, 0, 4, ans([0, 0, 0]), ans([0, 0, 0])).is_err());

        let s = build_psams_game(Rational::new(1, 7)).unwrap();
        assert!(payoff(&s, 12, 12, ans([1, 0, 0]), ans([1, 0, 0])).unwrap());
        assert!(!payoff(&s, 12, 12, ans([1, 0, 0]), ans([0, 1, 0])).unwrap());
    }

    #[test]
    fn four_procedures_agree_exactly() {
        let g = build_ams_game().unwrap();
        let flat = exact_pair_distribution(&g, SamplingProcedure::Flat).unwrap();
        assert_eq!(flat.len(), 90);
        assert_eq!(flat.total(), Rational::one());
        for proc in SamplingProcedure::ALL {
            let d = exact_pair_distribution(&g, proc).unwrap();
            assert_eq!(d, flat, "{proc}");
            assert!(d.0.values().all(|w| *w == Rational::new(1, 90)));
        }
    }

    #[test]
    fn non_flat_procedures_need_the_ams_game() {
        let ms = build_ms_game().unwrap();
        let sams = build_psams_game(Rational::new(1, 7)).unwrap();
        for proc in &SamplingProcedure::ALL[1..] {
            assert!(matches!(
                exact_pair_distribution(&ms, *proc),
                Err(Error::UnsupportedProcedure { .. })
            ));
            assert!(QuestionSampler::new(&sams, *proc).is_err());
        }
        assert!(QuestionSampler::new(&ms, SamplingProcedure::Flat).is_ok());
    }

    #[test]
    fn sampled_pairs_stay_on_support() {
        let g = build_ams_game().unwrap();
        let squares = magic_square_lines(&g).unwrap();
        assert_eq!(squares.len(), 10);
        for proc in SamplingProcedure::ALL {
            let s = QuestionSampler::new(&g, proc).unwrap();
            let mut rng = seeded_rng(7);
            for _ in 0..2000 {
                let (j, k) = s.sample(&mut rng);
                assert_eq!(g.weight(j, k), Rational::new(1, 90));
                if proc == SamplingProcedure::MagicSquareFirst {
                    assert!(squares
                        .iter()
                        .any(|sq| sq.ordered_pairs().contains(&(j, k))));
                }
            }
        }
    }

    #[test]
    fn variable_first_pairs_share_the_drawn_variable() {
        let g = build_ams_game().unwrap();
        // With V_6 drawn, both questions come from {E_0, E_9, E_12}.
        let eqs = g.equations_with(6);
        assert_eq!(eqs, vec![0, 9, 12]);
        let d = exact_pair_distribution(&g, SamplingProcedure::VariableFirst).unwrap();
        for &j in &eqs {
            for &k in &eqs {
                assert_eq!(d.get(j, k) > Rational::zero(), j != k);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let g = build_ams_game().unwrap();
        for proc in SamplingProcedure::ALL {
            let s = QuestionSampler::new(&g, proc).unwrap();
            let draw = |seed| {
                let mut rng = seeded_rng(seed);
                (0..50).map(|_| s.sample(&mut rng)).collect::<Vec<_>>()
            };
            assert_eq!(draw(11), draw(11));
            assert_ne!(draw(11), draw(12));
        }
    }

    #[test]
    fn procedure_names_round_trip() {
        for p in SamplingProcedure::ALL {
            assert_eq!(p.name().parse::<SamplingProcedure>().unwrap(), p);
        }
        assert!("Flat".parse::<SamplingProcedure>().is_err());
    }

    #[test]
    fn valid_answers_have_matching_parity() {
        let g = build_ams_game().unwrap();
        for e in g.equations() {
            let va = e.valid_answers();
            assert!(va.iter().all(|a| e.satisfied_by(*a)));
            assert!(va.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn game_json_shape() {
        let g = build_psams_game(Rational::new(1, 7)).unwrap();
        let v = serde_json::to_value(g.to_json()).unwrap();
        assert_eq!(v["game"], "psams");
        assert_eq!(v["p"]["num"], 1);
        assert_eq!(v["p"]["den"], 7);
        assert_eq!(v["equations"][9]["vars"], serde_json::json!([11, 13, 6]));
        assert_eq!(v["pairs"].as_array().unwrap().len(), 105);
    }
}
