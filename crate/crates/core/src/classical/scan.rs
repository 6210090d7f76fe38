//! Gray-code exhaustive scan over packed Alice strategies.
//!
//! The packed space has `4^n` points. It is cut into `2^SHARD_BITS`
//! contiguous shards keyed by the high bits; inside a shard the low bits are
//! walked in reflected Gray-code order, so consecutive points differ in a
//! single bit and hence in one question's answer. Only the Bob questions
//! paired with that question need their score tables touched.
//!
//! Shard results are merged by value, then by smallest packed index, so the
//! outcome does not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{self, GameSpec};
use crate::rational::{self, Rational};

const SHARD_BITS: u32 = 10;
const MAX_QUESTIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SearchOptions {
    pub fn with_threads(threads: usize) -> Self {
        SearchOptions {
            threads: threads.max(1),
        }
    }
}

/// `gain[alice choice][bob choice]` for one question pair, in integer units.
#[derive(Debug, Clone, Copy)]
struct Edge {
    k: usize,
    gain: [[u32; 4]; 4],
}

/// Integer-weighted game tables shared read-only by every worker.
#[derive(Debug, Clone)]
pub(crate) struct ScanTables {
    n: usize,
    /// Probability of an integer total `t` is `t / scale`.
    scale: i64,
    /// Per Alice question `j`: the Bob questions `k` with `(j, k)` weighted.
    edges: Vec<Vec<Edge>>,
    /// Per question `q`, for symmetric play: every other question sharing a
    /// weighted pair with it, both orientations folded into one table.
    sym_edges: Vec<Vec<Edge>>,
    /// Synchronous pairs always win under symmetric parity-valid play.
    sym_constant: u64,
}

impl ScanTables {
    pub(crate) fn new(g: &GameSpec) -> Result<Self> {
        let n = g.n_questions();
        if n > MAX_QUESTIONS {
            return Err(Error::input(format!(
                "{n} questions do not fit the packed search"
            )));
        }
        let scale = rational::common_denominator(g.pairs().iter().map(|p| &p.weight));
        if scale > u32::MAX as i64 {
            return Err(Error::input(format!(
                "weights need a common denominator of {scale}, too large for the search"
            )));
        }
        let unit = |w: Rational| (w * scale).to_integer() as u32;
        let valid: Vec<_> = g.equations().iter().map(|e| e.valid_answers()).collect();

        let mut edges = vec![Vec::new(); n];
        for p in g.pairs() {
            let w = unit(p.weight);
            let mut gain = [[0u32; 4]; 4];
            for (ca, row) in gain.iter_mut().enumerate() {
                for (cb, cell) in row.iter_mut().enumerate() {
                    if game::wins(g, p, valid[p.j][ca], valid[p.k][cb]) {
                        *cell = w;
                    }
                }
            }
            edges[p.j].push(Edge { k: p.k, gain });
        }

        let mut sym_edges = vec![Vec::new(); n];
        let mut sym_constant = 0u64;
        for q in 0..n {
            for k in 0..n {
                if k == q {
                    if g.pair(q, q).is_some() {
                        sym_constant += unit(g.weight(q, q)) as u64;
                    }
                    continue;
                }
                let forward = g.pair(q, k);
                let backward = g.pair(k, q);
                if forward.is_none() && backward.is_none() {
                    continue;
                }
                let mut gain = [[0u32; 4]; 4];
                for (cq, row) in gain.iter_mut().enumerate() {
                    for (ck, cell) in row.iter_mut().enumerate() {
                        if let Some(p) = forward {
                            if game::wins(g, p, valid[q][cq], valid[k][ck]) {
                                *cell += unit(p.weight);
                            }
                        }
                        if let Some(p) = backward {
                            if game::wins(g, p, valid[k][ck], valid[q][cq]) {
                                *cell += unit(p.weight);
                            }
                        }
                    }
                }
                sym_edges[q].push(Edge { k, gain });
            }
        }

        Ok(ScanTables {
            n,
            scale,
            edges,
            sym_edges,
            sym_constant,
        })
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn value(&self, total: u64) -> Rational {
        Rational::new(total as i64, self.scale)
    }

    pub(crate) fn points(&self) -> u64 {
        1u64 << (2 * self.n)
    }
}

pub(crate) trait GrayState {
    fn reset(&mut self, packed: u32);
    fn flip(&mut self, q: usize, choice: u8);
    fn total(&self) -> u64;
}

/// Alice fixed, Bob best-responding: per Bob question a score for each of
/// its four parity-valid answers, and the sum of the per-question maxima.
pub(crate) struct BestResponseState<'a> {
    t: &'a ScanTables,
    choice: [u8; MAX_QUESTIONS],
    score: [[u32; 4]; MAX_QUESTIONS],
    best: [u32; MAX_QUESTIONS],
    total: u64,
}

impl<'a> BestResponseState<'a> {
    pub(crate) fn new(t: &'a ScanTables) -> Self {
        BestResponseState {
            t,
            choice: [0; MAX_QUESTIONS],
            score: [[0; 4]; MAX_QUESTIONS],
            best: [0; MAX_QUESTIONS],
            total: 0,
        }
    }

    /// Questions where Alice's own answer is among Bob's maximizers, i.e. the
    /// most synchronous questions any best-responding Bob can agree on.
    pub(crate) fn agreement(&self) -> u32 {
        (0..self.t.n)
            .filter(|&k| self.score[k][self.choice[k] as usize] == self.best[k])
            .count() as u32
    }
}

#[inline(always)]
fn max4(s: &[u32; 4]) -> u32 {
    s[0].max(s[1]).max(s[2].max(s[3]))
}

impl GrayState for BestResponseState<'_> {
    fn reset(&mut self, packed: u32) {
        let n = self.t.n;
        self.score = [[0; 4]; MAX_QUESTIONS];
        for q in 0..n {
            self.choice[q] = ((packed >> (2 * q)) & 3) as u8;
        }
        for q in 0..n {
            let c = self.choice[q] as usize;
            for e in &self.t.edges[q] {
                for b in 0..4 {
                    self.score[e.k][b] += e.gain[c][b];
                }
            }
        }
        self.total = 0;
        for k in 0..n {
            self.best[k] = max4(&self.score[k]);
            self.total += self.best[k] as u64;
        }
    }

    #[inline(always)]
    fn flip(&mut self, q: usize, choice: u8) {
        let old = self.choice[q] as usize;
        let new = choice as usize;
        self.choice[q] = choice;
        for e in &self.t.edges[q] {
            let s = &mut self.score[e.k];
            for (b, v) in s.iter_mut().enumerate() {
                *v = *v - e.gain[old][b] + e.gain[new][b];
            }
            let m = max4(s);
            self.total = self.total - self.best[e.k] as u64 + m as u64;
            self.best[e.k] = m;
        }
    }

    #[inline(always)]
    fn total(&self) -> u64 {
        self.total
    }
}

/// Both players use the same packed strategy.
pub(crate) struct SymmetricState<'a> {
    t: &'a ScanTables,
    choice: [u8; MAX_QUESTIONS],
    total: u64,
}

impl<'a> SymmetricState<'a> {
    pub(crate) fn new(t: &'a ScanTables) -> Self {
        SymmetricState {
            t,
            choice: [0; MAX_QUESTIONS],
            total: 0,
        }
    }
}

impl GrayState for SymmetricState<'_> {
    fn reset(&mut self, packed: u32) {
        for q in 0..self.t.n {
            self.choice[q] = ((packed >> (2 * q)) & 3) as u8;
        }
        self.total = self.t.sym_constant;
        for q in 0..self.t.n {
            for e in self.t.sym_edges[q].iter().filter(|e| e.k > q) {
                self.total += e.gain[self.choice[q] as usize][self.choice[e.k] as usize] as u64;
            }
        }
    }

    #[inline(always)]
    fn flip(&mut self, q: usize, choice: u8) {
        let old = self.choice[q] as usize;
        let new = choice as usize;
        self.choice[q] = choice;
        let mut total = self.total as i64;
        for e in &self.t.sym_edges[q] {
            let ck = self.choice[e.k] as usize;
            total += e.gain[new][ck] as i64 - e.gain[old][ck] as i64;
        }
        self.total = total as u64;
    }

    #[inline(always)]
    fn total(&self) -> u64 {
        self.total
    }
}

pub(crate) trait Visitor<S>: Send + Sized {
    fn visit(&mut self, state: &S, packed: u32);
    fn merge(self, other: Self) -> Self;
}

/// Largest total and the smallest packed index attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BestTracker {
    pub total: u64,
    pub packed: u32,
}

impl Default for BestTracker {
    fn default() -> Self {
        BestTracker {
            total: 0,
            packed: u32::MAX,
        }
    }
}

impl BestTracker {
    #[inline(always)]
    fn offer(&mut self, total: u64, packed: u32) {
        if total > self.total || (total == self.total && packed < self.packed) {
            self.total = total;
            self.packed = packed;
        }
    }
}

impl<S: GrayState> Visitor<S> for BestTracker {
    #[inline(always)]
    fn visit(&mut self, state: &S, packed: u32) {
        let t = state.total();
        if t >= self.total {
            self.offer(t, packed);
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.offer(other.total, other.packed);
        self
    }
}

/// `(agreement, packed)`, larger agreement first, then smaller index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AgreementBest {
    pub agreement: u32,
    pub packed: u32,
}

fn better_agreement(a: Option<AgreementBest>, b: Option<AgreementBest>) -> Option<AgreementBest> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if (y.agreement, std::cmp::Reverse(y.packed))
                > (x.agreement, std::cmp::Reverse(x.packed))
            {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// Among Alice strategies with the largest best-response total: how many
/// there are, and the largest synchronous agreement a best-responding Bob can
/// reach, overall and excluding full agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AgreementTracker {
    pub n: u32,
    pub best: BestTracker,
    pub optimal_count: u64,
    pub max_agreement: Option<AgreementBest>,
    pub max_partial_agreement: Option<AgreementBest>,
}

impl AgreementTracker {
    pub(crate) fn new(n: usize) -> Self {
        AgreementTracker {
            n: n as u32,
            best: BestTracker::default(),
            optimal_count: 0,
            max_agreement: None,
            max_partial_agreement: None,
        }
    }
}

impl Visitor<BestResponseState<'_>> for AgreementTracker {
    #[inline(always)]
    fn visit(&mut self, state: &BestResponseState<'_>, packed: u32) {
        let t = state.total();
        if t < self.best.total {
            return;
        }
        if t > self.best.total {
            *self = AgreementTracker::new(self.n as usize);
            self.best.total = t;
        }
        self.best.offer(t, packed);
        self.optimal_count += 1;
        let here = AgreementBest {
            agreement: state.agreement(),
            packed,
        };
        self.max_agreement = better_agreement(self.max_agreement, Some(here));
        if here.agreement < self.n {
            self.max_partial_agreement = better_agreement(self.max_partial_agreement, Some(here));
        }
    }

    fn merge(self, other: Self) -> Self {
        if other.best.total > self.best.total {
            return other;
        }
        if other.best.total < self.best.total {
            return self;
        }
        let mut best = self.best;
        best.offer(other.best.total, other.best.packed);
        AgreementTracker {
            n: self.n,
            best,
            optimal_count: self.optimal_count + other.optimal_count,
            max_agreement: better_agreement(self.max_agreement, other.max_agreement),
            max_partial_agreement: better_agreement(
                self.max_partial_agreement,
                other.max_partial_agreement,
            ),
        }
    }
}

#[inline(always)]
fn run_shard<S: GrayState, V: Visitor<S>>(
    state: &mut S,
    visitor: &mut V,
    shard: u32,
    low_bits: u32,
) {
    let base = if low_bits >= 32 { 0 } else { shard << low_bits };
    state.reset(base);
    visitor.visit(state, base);
    let mut gray = 0u32;
    for i in 1u64..(1u64 << low_bits) {
        let bit = i.trailing_zeros();
        gray ^= 1 << bit;
        let q = (bit / 2) as usize;
        let packed = base | gray;
        state.flip(q, ((packed >> (2 * q)) & 3) as u8);
        visitor.visit(state, packed);
    }
}

/// Visits every packed strategy once and merges the shard visitors in shard
/// order.
pub(crate) fn scan<'t, S, V>(
    tables: &'t ScanTables,
    opts: &SearchOptions,
    make_state: impl Fn(&'t ScanTables) -> S + Sync,
    make_visitor: impl Fn() -> V + Sync,
) -> Result<V>
where
    S: GrayState,
    V: Visitor<S>,
{
    let bits = 2 * tables.n as u32;
    let shard_bits = bits.min(SHARD_BITS);
    let low_bits = bits - shard_bits;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| Error::input(format!("cannot start {} worker threads: {e}", opts.threads)))?;
    let parts: Vec<V> = pool.install(|| {
        (0..1u32 << shard_bits)
            .into_par_iter()
            .map(|shard| {
                let mut state = make_state(tables);
                let mut visitor = make_visitor();
                run_shard(&mut state, &mut visitor, shard, low_bits);
                visitor
            })
            .collect()
    });
    Ok(parts
        .into_iter()
        .reduce(|a, b| a.merge(b))
        .expect("at least one shard"))
}
