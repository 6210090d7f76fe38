//! Exact simulation of the two-Bell-pair strategy.
//!
//! The shared state lives on four qubits ordered `(A1, A2, B1, B2)`. A basis
//! index is `8*A1 + 4*A2 + 2*B1 + B2`, so Alice's two-qubit index is
//! `idx >> 2` and Bob's is `idx & 3`, both in the `2 * q1 + q2` convention of
//! [`crate::linalg`]. Bell pairs join `A1` with `B1` and `A2` with `B2`.
//!
//! Each question is measured in the common eigenbasis of its observables.
//! Bob measures the entrywise conjugates of Alice's operators. For Hermitian
//! `M`, `(M ⊗ I)|φ+⟩ = (I ⊗ conj(M))|φ+⟩`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{wins, AnswerTriple, GameSpec, QuestionSampler, Round, SamplingProcedure};
use crate::linalg::{self, Mat4, ONE, ZERO};
use crate::pauli::PauliOp;

pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector([Complex64; 16]);

impl StateVector {
    pub fn new(amplitudes: [Complex64; 16]) -> Result<Self> {
        let s = StateVector(amplitudes);
        if (s.norm() - 1.0).abs() > TOLERANCE {
            return Err(Error::input(format!(
                "state has norm {}, expected 1",
                s.norm()
            )));
        }
        Ok(s)
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.0[index]
    }

    pub fn amplitudes(&self) -> &[Complex64; 16] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨ψ| P ⊗ Q |ψ⟩` with `P` on Alice's qubits and `Q` on Bob's.
    pub fn expectation(&self, p: &Mat4, q: &Mat4) -> Complex64 {
        let mut acc = ZERO;
        for row in 0..16 {
            let (ra, rb) = (row >> 2, row & 3);
            let mut image = ZERO;
            for col in 0..16 {
                image += p[ra][col >> 2] * q[rb][col & 3] * self.0[col];
            }
            acc += self.0[row].conj() * image;
        }
        acc
    }
}

/// `|φ+⟩` on `(A1, B1)` tensored with `|φ+⟩` on `(A2, B2)`.
pub fn bell_state() -> StateVector {
    let mut amps = [ZERO; 16];
    for a1 in 0..2 {
        for a2 in 0..2 {
            amps[8 * a1 + 4 * a2 + 2 * a1 + a2] = Complex64::new(0.5, 0.0);
        }
    }
    StateVector(amps)
}

/// Joint eigenprojectors of one question's observables.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    pub question: usize,
    /// Ascending; bit `i` is the outcome of `observables[i]`.
    pub labels: [AnswerTriple; 4],
    pub projectors: [Mat4; 4],
    pub observables: [Mat4; 3],
}

impl ProjectorFamily {
    /// Outcome parity shared by all four labels.
    pub fn parity(&self) -> u8 {
        self.labels[0].parity()
    }

    pub fn projector(&self, label: AnswerTriple) -> Option<&Mat4> {
        self.labels
            .iter()
            .position(|l| *l == label)
            .map(|i| &self.projectors[i])
    }

    /// Largest deviation across every projector identity; zero for exact arithmetic.
    pub fn max_deviation(&self) -> f64 {
        let id = linalg::identity4();
        let mut worst: f64 = 0.0;
        let mut sum = [[ZERO; 4]; 4];
        for (i, (label, p)) in self.labels.iter().zip(&self.projectors).enumerate() {
            worst = worst.max(linalg::max_abs_diff(p, &linalg::adjoint(p)));
            worst = worst.max(linalg::max_abs_diff(&linalg::mul(p, p), p));
            worst = worst.max((linalg::trace(p) - ONE).norm());
            for q in &self.projectors[i + 1..] {
                worst = worst.max(linalg::max_abs(&linalg::mul(p, q)));
            }
            for (bit, o) in self.observables.iter().enumerate() {
                let commutator = linalg::sub(&linalg::mul(o, p), &linalg::mul(p, o));
                worst = worst.max(linalg::max_abs(&commutator));
                let s = if label.bit(bit) == 0 { ONE } else { -ONE };
                worst = worst.max(linalg::max_abs_diff(
                    &linalg::mul(o, p),
                    &linalg::scale(p, s),
                ));
            }
            sum = linalg::add(&sum, p);
        }
        worst.max(linalg::max_abs_diff(&sum, &id))
    }

    pub fn check(&self) -> Result<()> {
        let dev = self.max_deviation();
        if dev > TOLERANCE {
            return Err(Error::consistency(format!(
                "projectors for question {} deviate by {dev:e}",
                self.question
            )));
        }
        Ok(())
    }
}

/// Projectors for observables given in the question's variable order.
///
/// The first two observables fix the projector and the third outcome bit
/// follows from the sign of `O0·O1·O2`, computed here from the matrices.
pub fn triple_projectors(
    question: usize,
    ops: [PauliOp; 3],
    conjugated: bool,
) -> Result<ProjectorFamily> {
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if !ops[i].commutes(ops[j]) {
            return Err(Error::input(format!(
                "question {question}: {} and {} do not commute",
                ops[i], ops[j]
            )));
        }
    }
    let observables = ops.map(|o| {
        let m = o.matrix();
        if conjugated {
            linalg::conj(&m)
        } else {
            m
        }
    });
    let id = linalg::identity4();
    let product = linalg::mul(
        &linalg::mul(&observables[0], &observables[1]),
        &observables[2],
    );
    let negative = if linalg::max_abs_diff(&product, &id) <= TOLERANCE {
        0
    } else if linalg::max_abs_diff(&product, &linalg::scale(&id, -ONE)) <= TOLERANCE {
        1
    } else {
        return Err(Error::input(format!(
            "question {question}: {} {} {} do not multiply to ±II",
            ops[0], ops[1], ops[2]
        )));
    };

    let half = Complex64::new(0.5, 0.0);
    let factor = |o: &Mat4, bit: u8| {
        let s = if bit == 0 { ONE } else { -ONE };
        linalg::scale(&linalg::add(&id, &linalg::scale(o, s)), half)
    };
    let mut labels = [AnswerTriple::default(); 4];
    let mut projectors = [[[ZERO; 4]; 4]; 4];
    let mut outcomes: Vec<(AnswerTriple, Mat4)> = (0..4u8)
        .map(|v| {
            let (a0, a1) = (v & 1, v >> 1);
            let label = AnswerTriple::from_bits([a0, a1, a0 ^ a1 ^ negative])?;
            Ok((
                label,
                linalg::mul(&factor(&observables[0], a0), &factor(&observables[1], a1)),
            ))
        })
        .collect::<Result<_>>()?;
    outcomes.sort_by_key(|(l, _)| *l);
    for (i, (l, p)) in outcomes.into_iter().enumerate() {
        labels[i] = l;
        projectors[i] = p;
    }
    Ok(ProjectorFamily {
        question,
        labels,
        projectors,
        observables,
    })
}

/// A shared state plus one projector family per question for each player.
#[derive(Debug, Clone)]
pub struct EntangledStrategyDescriptor {
    pub state: StateVector,
    pub alice_projectors: Vec<ProjectorFamily>,
    pub bob_projectors: Vec<ProjectorFamily>,
}

/// Two Bell pairs with both players measuring the game's Pauli observables.
/// With `bob_conjugated` false Bob uses Alice's matrices unchanged, which is
/// not a perfect strategy once `Y` is involved.
pub fn entangled_strategy(
    g: &GameSpec,
    bob_conjugated: bool,
) -> Result<EntangledStrategyDescriptor> {
    let mut alice = Vec::with_capacity(g.n_questions());
    let mut bob = Vec::with_capacity(g.n_questions());
    for j in 0..g.n_questions() {
        let ops = g.equation_ops(j);
        let a = triple_projectors(j, ops, false)?;
        let b = triple_projectors(j, ops, bob_conjugated)?;
        for fam in [&a, &b] {
            fam.check()?;
            if fam.parity() != g.equation(j).parity {
                return Err(Error::consistency(format!(
                    "question {j}: measured outcome parity {} but the equation asks for {}",
                    fam.parity(),
                    g.equation(j).parity
                )));
            }
        }
        alice.push(a);
        bob.push(b);
    }
    Ok(EntangledStrategyDescriptor {
        state: bell_state(),
        alice_projectors: alice,
        bob_projectors: bob,
    })
}

pub fn perfect_strategy(g: &GameSpec) -> Result<EntangledStrategyDescriptor> {
    entangled_strategy(g, true)
}

fn check_sized(g: &GameSpec, s: &EntangledStrategyDescriptor) -> Result<()> {
    let n = g.n_questions();
    if s.alice_projectors.len() != n || s.bob_projectors.len() != n {
        return Err(Error::input(format!(
            "strategy has {}/{} projector families but the {} game has {n} questions",
            s.alice_projectors.len(),
            s.bob_projectors.len(),
            g.kind()
        )));
    }
    Ok(())
}

/// Born probabilities `[alice outcome][bob outcome]`, indexed like each
/// family's `labels`.
pub fn joint_distribution(
    s: &EntangledStrategyDescriptor,
    j: usize,
    k: usize,
) -> Result<[[f64; 4]; 4]> {
    let (fa, fb) = match (s.alice_projectors.get(j), s.bob_projectors.get(k)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::input(format!(
                "question pair ({j}, {k}) is out of range"
            )))
        }
    };
    let mut out = [[0.0; 4]; 4];
    let mut total = 0.0;
    for (ia, p) in fa.projectors.iter().enumerate() {
        for (ib, q) in fb.projectors.iter().enumerate() {
            let e = s.state.expectation(p, q);
            if e.im.abs() > TOLERANCE || e.re < -TOLERANCE {
                return Err(Error::consistency(format!(
                    "pair ({j}, {k}) has Born value {e} for outcome ({ia}, {ib})"
                )));
            }
            out[ia][ib] = e.re.max(0.0);
            total += e.re;
        }
    }
    if (total - 1.0).abs() > TOLERANCE {
        return Err(Error::consistency(format!(
            "pair ({j}, {k}) outcome probabilities sum to {total}"
        )));
    }
    Ok(out)
}

pub fn conditional_win_probability(
    g: &GameSpec,
    s: &EntangledStrategyDescriptor,
    j: usize,
    k: usize,
) -> Result<f64> {
    check_sized(g, s)?;
    let pair = g.pair(j, k).ok_or_else(|| {
        Error::input(format!(
            "question pair ({j}, {k}) has probability zero in the {} game",
            g.kind()
        ))
    })?;
    let dist = joint_distribution(s, j, k)?;
    let (la, lb) = (&s.alice_projectors[j].labels, &s.bob_projectors[k].labels);
    let mut prob = 0.0;
    for (ia, a) in la.iter().enumerate() {
        for (ib, b) in lb.iter().enumerate() {
            if wins(g, pair, *a, *b) {
                prob += dist[ia][ib];
            }
        }
    }
    Ok(prob)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairProbability {
    pub j: usize,
    pub k: usize,
    pub prob: f64,
}

/// Conditional win probability of every positive-weight pair, in pair order.
pub fn pair_win_probabilities(
    g: &GameSpec,
    s: &EntangledStrategyDescriptor,
) -> Result<Vec<PairProbability>> {
    g.pairs()
        .iter()
        .map(|p| {
            Ok(PairProbability {
                j: p.j,
                k: p.k,
                prob: conditional_win_probability(g, s, p.j, p.k)?,
            })
        })
        .collect()
}

pub fn entangled_win_probability(g: &GameSpec, s: &EntangledStrategyDescriptor) -> Result<f64> {
    let mut total = 0.0;
    for (pair, pp) in g.pairs().iter().zip(pair_win_probabilities(g, s)?) {
        total += crate::rational::to_f64(pair.weight) * pp.prob;
    }
    Ok(total)
}

/// Plays one round with questions from `sampler` and outcomes drawn from
/// the joint Born distribution.
pub fn play_entangled_round<R: Rng + ?Sized>(
    g: &GameSpec,
    s: &EntangledStrategyDescriptor,
    sampler: &QuestionSampler,
    rng: &mut R,
) -> Result<Round> {
    let (j, k) = sampler.sample(rng);
    let dist = joint_distribution(s, j, k)?;
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    let mut pick = None;
    for (ia, row) in dist.iter().enumerate() {
        for (ib, p) in row.iter().enumerate() {
            if *p <= 0.0 {
                continue;
            }
            acc += p;
            pick = Some((ia, ib));
            if x < acc {
                break;
            }
        }
        if x < acc {
            break;
        }
    }
    let (ia, ib) =
        pick.ok_or_else(|| Error::consistency(format!("pair ({j}, {k}) has no possible outcome")))?;
    let a = s.alice_projectors[j].labels[ia];
    let b = s.bob_projectors[k].labels[ib];
    let pair = g
        .pair(j, k)
        .ok_or_else(|| Error::consistency("sampler drew a zero-weight pair"))?;
    Ok(Round {
        j,
        k,
        a,
        b,
        win: wins(g, pair, a, b),
    })
}

pub fn sample_entangled_round<R: Rng + ?Sized>(
    g: &GameSpec,
    s: &EntangledStrategyDescriptor,
    rng: &mut R,
) -> Result<Round> {
    check_sized(g, s)?;
    play_entangled_round(
        g,
        s,
        &QuestionSampler::new(g, SamplingProcedure::Flat)?,
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_ams_game, build_ms_game, build_psams_game, seeded_rng};
    use crate::rational::Rational;

    fn op(l: &str) -> PauliOp {
        PauliOp::from_label(l).unwrap()
    }

    #[test]
    fn bell_state_amplitudes() {
        let s = bell_state();
        for idx in [0b0000, 0b0101, 0b1010, 0b1111] {
            assert_eq!(s.amplitude(idx), Complex64::new(0.5, 0.0));
        }
        assert_eq!(s.amplitude(0b0110), ZERO);
        assert_eq!(s.0.iter().filter(|a| **a != ZERO).count(), 4);
        assert!((s.norm() - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn outcome_parity_follows_the_matrix_sign() {
        let odd = triple_projectors(12, [op("XX"), op("YY"), op("ZZ")], false).unwrap();
        assert!(odd.labels.iter().all(|l| l.parity() == 1));
        let even = triple_projectors(0, [op("IX"), op("XI"), op("XX")], false).unwrap();
        assert!(even.labels.iter().all(|l| l.parity() == 0));
        for fam in [&odd, &even] {
            fam.check().unwrap();
            let sum = fam
                .projectors
                .iter()
                .fold([[ZERO; 4]; 4], |acc, p| linalg::add(&acc, p));
            assert!(linalg::max_abs_diff(&sum, &linalg::identity4()) < TOLERANCE);
        }
    }

    #[test]
    fn rejects_non_commuting_observables() {
        assert!(triple_projectors(0, [op("XI"), op("ZI"), op("YI")], false).is_err());
    }

    #[test]
    fn family_counts() {
        let ams = perfect_strategy(&build_ams_game().unwrap()).unwrap();
        assert_eq!(ams.alice_projectors.len(), 15);
        assert_eq!(ams.bob_projectors.len(), 15);
        let ms = perfect_strategy(&build_ms_game().unwrap()).unwrap();
        assert_eq!(ms.alice_projectors.len(), 6);
    }

    #[test]
    fn perfect_strategy_wins_every_pair() {
        for g in [
            build_ms_game().unwrap(),
            build_ams_game().unwrap(),
            build_psams_game(Rational::new(1, 7)).unwrap(),
        ] {
            let s = perfect_strategy(&g).unwrap();
            for pp in pair_win_probabilities(&g, &s).unwrap() {
                assert!(
                    (pp.prob - 1.0).abs() < TOLERANCE,
                    "{} pair {:?}",
                    g.kind(),
                    pp
                );
            }
            assert!((entangled_win_probability(&g, &s).unwrap() - 1.0).abs() < TOLERANCE);
        }
    }

    #[test]
    fn unconjugated_bob_loses() {
        let g = build_ams_game().unwrap();
        let s = entangled_strategy(&g, false).unwrap();
        assert!(entangled_win_probability(&g, &s).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn alice_marginals_are_uniform() {
        let g = build_ams_game().unwrap();
        let s = perfect_strategy(&g).unwrap();
        for pair in g.pairs() {
            let dist = joint_distribution(&s, pair.j, pair.k).unwrap();
            for row in dist {
                assert!((row.iter().sum::<f64>() - 0.25).abs() < TOLERANCE);
            }
        }
    }

    #[test]
    fn sampled_rounds_always_win_and_replay() {
        let g = build_psams_game(Rational::new(1, 7)).unwrap();
        let s = perfect_strategy(&g).unwrap();
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            (0..2000)
                .map(|_| sample_entangled_round(&g, &s, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        let rounds = draw(5);
        assert!(rounds.iter().all(|r| r.win));
        assert_eq!(rounds, draw(5));
    }
}
