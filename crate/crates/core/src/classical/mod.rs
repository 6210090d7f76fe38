//! Deterministic (classical) strategies: exact evaluation, best responses and
//! exhaustive optimization.

mod scan;
mod search;
mod strategy_file;

use std::time::Duration;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{self, AnswerTriple, Equation, GameKind, GameSpec};
use crate::rational::Rational;

pub use scan::SearchOptions;
pub use search::{
    check_sweep_envelope, find_optimal_witness, max_sync_agreement_over_optima, psams_value_sweep,
    solve_classical_value, solve_symmetric_value, solve_value_with_agreement, sweep_row, SweepRow,
    SyncAgreementReport,
};
pub(crate) use strategy_file::serialize_strategy;
pub use strategy_file::{
    load_strategy_file, save_strategy_file, verify_strategy, verify_strategy_file, LosingPair,
    LossReason, StrategyCheck, StrategyFile,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: Vec<AnswerTriple>,
    pub bob: Vec<AnswerTriple>,
}

impl DeterministicStrategy {
    pub fn symmetric(answers: Vec<AnswerTriple>) -> Self {
        DeterministicStrategy {
            bob: answers.clone(),
            alice: answers,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.alice == self.bob
    }

    /// True when every answer of both players meets its equation's parity.
    pub fn satisfies_parities(&self, g: &GameSpec) -> bool {
        let ok = |side: &[AnswerTriple]| {
            side.iter()
                .zip(g.equations())
                .all(|(a, e)| e.satisfied_by(*a))
        };
        ok(&self.alice) && ok(&self.bob)
    }

    /// Number of questions on which both players give the same answer.
    pub fn agreement(&self) -> usize {
        self.alice
            .iter()
            .zip(&self.bob)
            .filter(|(a, b)| a == b)
            .count()
    }

    fn check_size(&self, g: &GameSpec) -> Result<()> {
        let n = g.n_questions();
        if self.alice.len() != n || self.bob.len() != n {
            return Err(Error::input(format!(
                "strategy answers {} / {} questions but the {} game has {n}",
                self.alice.len(),
                self.bob.len(),
                g.kind()
            )));
        }
        Ok(())
    }
}

/// A strategy whose Alice side meets every parity constraint, packed two bits
/// per question: question `q` occupies bits `2q..2q+2` and indexes the
/// parity-valid answers of equation `q` in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackedAliceStrategy(pub u32);

impl PackedAliceStrategy {
    pub fn choice(self, q: usize) -> u8 {
        ((self.0 >> (2 * q)) & 3) as u8
    }

    pub fn decode(self, g: &GameSpec) -> Vec<AnswerTriple> {
        g.equations()
            .iter()
            .enumerate()
            .map(|(q, e)| e.valid_answers()[self.choice(q) as usize])
            .collect()
    }

    /// Fails if an answer violates its parity.
    pub fn encode(g: &GameSpec, answers: &[AnswerTriple]) -> Result<Self> {
        if answers.len() != g.n_questions() || answers.len() > 16 {
            return Err(Error::input("answer list does not match the game"));
        }
        let mut packed = 0u32;
        for (q, (a, e)) in answers.iter().zip(g.equations()).enumerate() {
            let c = e
                .valid_answers()
                .iter()
                .position(|v| v == a)
                .ok_or_else(|| {
                    Error::input(format!("answer {a} to question {q} violates its parity"))
                })?;
            packed |= (c as u32) << (2 * q);
        }
        Ok(PackedAliceStrategy(packed))
    }
}

/// Exact winning probability: the sum over question pairs of weight × payoff.
pub fn evaluate_pair(g: &GameSpec, s: &DeterministicStrategy) -> Result<Rational> {
    s.check_size(g)?;
    Ok(g.pairs()
        .iter()
        .filter(|p| game::wins(g, p, s.alice[p.j], s.bob[p.k]))
        .map(|p| p.weight)
        .sum())
}

/// Which answers Bob may choose from when best-responding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobAnswers {
    /// All eight bit triples.
    All,
    /// Only the four answers meeting the equation's parity.
    ParityValid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub value: Rational,
    /// Per Bob question, every answer achieving that question's maximum.
    pub argmax: Vec<Vec<AnswerTriple>>,
}

impl BestResponse {
    /// Bob strategy taking the smallest maximizing answer everywhere.
    pub fn first_choice(&self) -> Vec<AnswerTriple> {
        self.argmax.iter().map(|s| s[0]).collect()
    }
}

/// Bob's optimal reply to a fixed Alice strategy, maximized one Bob question
/// at a time.
pub fn best_response(
    g: &GameSpec,
    alice: &[AnswerTriple],
    answers: BobAnswers,
) -> Result<BestResponse> {
    let n = g.n_questions();
    if alice.len() != n {
        return Err(Error::input(format!(
            "Alice answers {} questions but the {} game has {n}",
            alice.len(),
            g.kind()
        )));
    }
    let mut value = Rational::zero();
    let mut argmax = Vec::with_capacity(n);
    for k in 0..n {
        let candidates: Vec<AnswerTriple> = match answers {
            BobAnswers::All => AnswerTriple::all().collect(),
            BobAnswers::ParityValid => g.equation(k).valid_answers().to_vec(),
        };
        let score = |b: AnswerTriple| -> Rational {
            g.pairs()
                .iter()
                .filter(|p| p.k == k && game::wins(g, p, alice[p.j], b))
                .map(|p| p.weight)
                .sum()
        };
        let scores: Vec<Rational> = candidates.iter().map(|b| score(*b)).collect();
        let best = *scores.iter().max().expect("candidates are nonempty");
        value += best;
        argmax.push(
            candidates
                .iter()
                .zip(&scores)
                .filter(|(_, s)| **s == best)
                .map(|(b, _)| *b)
                .collect(),
        );
    }
    Ok(BestResponse { value, argmax })
}

pub fn best_response_value(g: &GameSpec, alice: &[AnswerTriple]) -> Result<BestResponse> {
    best_response(g, alice, BobAnswers::All)
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueReport {
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub value: Rational,
    #[serde(serialize_with = "strategy_file::serialize_strategy")]
    pub witness: DeterministicStrategy,
    pub strategies_scanned: u64,
    #[serde(serialize_with = "serialize_seconds")]
    pub wall_time: Duration,
}

fn serialize_seconds<S: serde::Serializer>(
    d: &Duration,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SatisfiabilityReport {
    pub max_count: usize,
    /// One bit per variable; the first assignment (as an integer, variable 0
    /// in the low bit) reaching `max_count`.
    pub witness: Vec<u8>,
}

/// Exhaustive maximum, over all bit assignments to the variables, of the
/// number of equations satisfied.
pub fn max_satisfiable_assignment(
    equations: &[Equation],
    n_vars: usize,
) -> Result<SatisfiabilityReport> {
    if n_vars > 30 {
        return Err(Error::input(format!(
            "{n_vars} variables is too many to enumerate"
        )));
    }
    if let Some(e) = equations
        .iter()
        .find(|e| e.vars.iter().any(|v| *v >= n_vars))
    {
        return Err(Error::input(format!(
            "equation {} uses a variable out of range",
            e.id
        )));
    }
    let masks: Vec<(u32, u32)> = equations
        .iter()
        .map(|e| (e.vars.iter().fold(0u32, |m, v| m | 1 << v), e.parity as u32))
        .collect();
    let mut best = (0usize, 0u32);
    for assignment in 0u32..(1u32 << n_vars) {
        let count = masks
            .iter()
            .filter(|(m, parity)| (assignment & m).count_ones() & 1 == *parity)
            .count();
        if count > best.0 {
            best = (count, assignment);
        }
    }
    Ok(SatisfiabilityReport {
        max_count: best.0,
        witness: (0..n_vars).map(|v| ((best.1 >> v) & 1) as u8).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyProfile {
    /// Variables answered identically in all three equations containing them.
    pub q: usize,
    pub two_thirds_vars: Vec<usize>,
}

impl ConsistencyProfile {
    /// Winning probability `(15 + 2q) / 45` predicted for the symmetric strategy.
    pub fn predicted_value(&self) -> Rational {
        Rational::new(15 + 2 * self.q as i64, 45)
    }
}

/// Splits the variables of a parity-satisfying symmetric AMS strategy into
/// consistent and 2/3-consistent ones.
pub fn consistency_profile(g: &GameSpec, answers: &[AnswerTriple]) -> Result<ConsistencyProfile> {
    if g.kind() == GameKind::Ms {
        return Err(Error::input(
            "consistency profiles are defined for the AMS question structure",
        ));
    }
    if answers.len() != g.n_questions() {
        return Err(Error::input("answer list does not match the game"));
    }
    if let Some((q, a)) = answers
        .iter()
        .enumerate()
        .find(|(q, a)| !g.equation(*q).satisfied_by(**a))
    {
        return Err(Error::input(format!(
            "answer {a} to question {q} violates its parity; the profile needs a parity-satisfying strategy"
        )));
    }
    let mut q = 0;
    let mut two_thirds_vars = Vec::new();
    for m in 0..g.n_variables() {
        let bits: Vec<u8> = g
            .equations_with(m)
            .into_iter()
            .map(|j| {
                let pos = g
                    .equation(j)
                    .position_of(m)
                    .expect("variable occurs in equation");
                answers[j].bit(pos)
            })
            .collect();
        if bits.iter().all(|b| *b == bits[0]) {
            q += 1;
        } else {
            two_thirds_vars.push(m);
        }
    }
    Ok(ConsistencyProfile { q, two_thirds_vars })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_ams_game, build_ms_game, build_psams_game, seeded_rng};
    use num_traits::One;
    use rand::Rng;

    fn zeros(n: usize) -> Vec<AnswerTriple> {
        vec![AnswerTriple::default(); n]
    }

    fn random_valid(g: &GameSpec, rng: &mut impl Rng) -> Vec<AnswerTriple> {
        g.equations()
            .iter()
            .map(|e| e.valid_answers()[rng.gen_range(0..4)])
            .collect()
    }

    // Oracle: count winning pairs one by one.
    fn count_wins(g: &GameSpec, s: &DeterministicStrategy) -> usize {
        let mut wins = 0;
        for p in g.pairs() {
            let e = g.equation(p.j);
            let f = g.equation(p.k);
            let (a, b) = (s.alice[p.j], s.bob[p.k]);
            if a.parity() != e.parity || b.parity() != f.parity {
                continue;
            }
            let shared = e
                .vars
                .iter()
                .enumerate()
                .all(|(i, v)| match f.position_of(*v) {
                    Some(pos) => a.bit(i) == b.bit(pos),
                    None => true,
                });
            wins += shared as usize;
        }
        wins
    }

    #[test]
    fn all_zero_ams_strategy_wins_three_fifths() {
        let g = build_ams_game().unwrap();
        let s = DeterministicStrategy::symmetric(zeros(15));
        assert_eq!(count_wins(&g, &s), 54);
        assert_eq!(evaluate_pair(&g, &s).unwrap(), Rational::new(3, 5));
    }

    #[test]
    fn all_zero_ms_strategy_by_enumeration() {
        let g = build_ms_game().unwrap();
        let s = DeterministicStrategy::symmetric(zeros(6));
        // Columns have odd parity, so every pair fails on its column side.
        assert_eq!(count_wins(&g, &s), 0);
        assert_eq!(evaluate_pair(&g, &s).unwrap(), Rational::zero());
    }

    #[test]
    fn evaluator_matches_pair_count_on_random_strategies() {
        let g = build_ams_game().unwrap();
        let mut rng = seeded_rng(3);
        for _ in 0..200 {
            let s = DeterministicStrategy {
                alice: (0..15)
                    .map(|_| AnswerTriple::new(rng.gen_range(0..8)).unwrap())
                    .collect(),
                bob: (0..15)
                    .map(|_| AnswerTriple::new(rng.gen_range(0..8)).unwrap())
                    .collect(),
            };
            assert_eq!(
                evaluate_pair(&g, &s).unwrap(),
                Rational::new(count_wins(&g, &s) as i64, 90)
            );
        }
    }

    #[test]
    fn trivial_sync_game_rewards_valid_symmetric_play() {
        let g = build_psams_game(Rational::one()).unwrap();
        let mut rng = seeded_rng(5);
        let s = DeterministicStrategy::symmetric(random_valid(&g, &mut rng));
        assert_eq!(evaluate_pair(&g, &s).unwrap(), Rational::one());
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = build_ams_game().unwrap();
        let s = DeterministicStrategy::symmetric(zeros(6));
        assert!(evaluate_pair(&g, &s).is_err());
        assert!(best_response_value(&g, &zeros(6)).is_err());
    }

    #[test]
    fn best_response_per_question_brute_force() {
        let g = build_ams_game().unwrap();
        let alice = zeros(15);
        let br = best_response_value(&g, &alice).unwrap();
        let mut total = Rational::zero();
        for k in 0..15 {
            let mut best = Rational::zero();
            for b in AnswerTriple::all() {
                let mut bob = zeros(15);
                bob[k] = b;
                let score: Rational = g
                    .pairs()
                    .iter()
                    .filter(|p| p.k == k)
                    .filter(|p| crate::game::payoff(&g, p.j, p.k, alice[p.j], bob[k]).unwrap())
                    .map(|p| p.weight)
                    .sum();
                best = best.max(score);
            }
            total += best;
        }
        assert_eq!(br.value, total);
        let bob = br.first_choice();
        let s = DeterministicStrategy { alice, bob };
        assert_eq!(evaluate_pair(&g, &s).unwrap(), br.value);
    }

    #[test]
    fn best_response_in_trivial_sync_game() {
        let g = build_psams_game(Rational::one()).unwrap();
        let mut alice = zeros(15);
        // Questions 12..14 need odd parity, so the all-zero answers there lose.
        assert_eq!(
            best_response_value(&g, &alice).unwrap().value,
            Rational::new(12, 15)
        );
        alice[12] = AnswerTriple::new(1).unwrap();
        assert_eq!(
            best_response_value(&g, &alice).unwrap().value,
            Rational::new(13, 15)
        );
    }

    #[test]
    fn parity_violating_alice_answer_scores_nothing() {
        let g = build_ams_game().unwrap();
        let mut alice = zeros(15);
        alice[0] = AnswerTriple::new(1).unwrap();
        let br = best_response_value(&g, &alice).unwrap();
        let bob = br.first_choice();
        let s = DeterministicStrategy { alice, bob };
        for p in g.pairs().iter().filter(|p| p.j == 0) {
            assert!(!crate::game::payoff(&g, p.j, p.k, s.alice[0], s.bob[p.k]).unwrap());
        }
    }

    #[test]
    fn packing_round_trips() {
        let g = build_ams_game().unwrap();
        for raw in [0u32, 1, 0x2AAA_AAAA, (1 << 30) - 1, 123_456_789] {
            let p = PackedAliceStrategy(raw);
            let answers = p.decode(&g);
            assert!(answers
                .iter()
                .zip(g.equations())
                .all(|(a, e)| e.satisfied_by(*a)));
            assert_eq!(PackedAliceStrategy::encode(&g, &answers).unwrap(), p);
        }
        let mut bad = zeros(15);
        bad[3] = AnswerTriple::new(1).unwrap();
        assert!(PackedAliceStrategy::encode(&g, &bad).is_err());
    }

    #[test]
    fn satisfiability_maxima() {
        let ams = build_ams_game().unwrap();
        let r = max_satisfiable_assignment(ams.equations(), 15).unwrap();
        assert_eq!(r.max_count, 12);
        // The all-zero assignment already satisfies the twelve even equations.
        assert_eq!(r.witness, vec![0; 15]);

        let ms = build_ms_game().unwrap();
        assert_eq!(
            max_satisfiable_assignment(ms.equations(), 9)
                .unwrap()
                .max_count,
            5
        );
    }

    #[test]
    fn consistency_profile_examples() {
        let g = build_ams_game().unwrap();
        // All-zero assignment, with each odd equation answered by flipping its
        // last variable: V14, V12 and V13 become 2/3-consistent.
        let mut answers = zeros(15);
        for j in [12, 13, 14] {
            answers[j] = AnswerTriple::from_bits([0, 0, 1]).unwrap();
        }
        let prof = consistency_profile(&g, &answers).unwrap();
        assert_eq!(prof.q, 12);
        assert_eq!(prof.two_thirds_vars, vec![12, 13, 14]);
        let value = evaluate_pair(&g, &DeterministicStrategy::symmetric(answers)).unwrap();
        assert_eq!(value, Rational::new(13, 15));
        assert_eq!(value, prof.predicted_value());

        assert!(consistency_profile(&g, &zeros(15)).is_err());
        assert!(consistency_profile(&build_ms_game().unwrap(), &zeros(6)).is_err());
    }

    #[test]
    fn symmetric_values_follow_consistency_count() {
        let g = build_ams_game().unwrap();
        let mut rng = seeded_rng(17);
        for _ in 0..300 {
            let answers = random_valid(&g, &mut rng);
            let prof = consistency_profile(&g, &answers).unwrap();
            assert_eq!(prof.q + prof.two_thirds_vars.len(), 15);
            let value = evaluate_pair(&g, &DeterministicStrategy::symmetric(answers)).unwrap();
            assert_eq!(value, prof.predicted_value());
        }
    }
}
