//! Verification suite and Monte Carlo referee.
//!
//! [`verify_all`] recomputes every headline number from scratch. Each claim
//! records the expected and computed values.

use std::time::Instant;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::classical::{
    self, best_response, consistency_profile, evaluate_pair, max_satisfiable_assignment,
    solve_classical_value, solve_symmetric_value, solve_value_with_agreement, sweep_row,
    BobAnswers, DeterministicStrategy, SearchOptions, SweepRow, SyncAgreementReport,
};
use crate::error::{Error, Result};
use crate::game::{
    build_ams_game, build_ms_game, build_psams_game, exact_pair_distribution, seeded_rng, wins,
    AnswerTriple, GameKind, GameSpec, QuestionSampler, Round, SamplingProcedure,
};
use crate::pauli::{
    self, enumerate_commuting_triples, enumerate_magic_squares, incidence_stats, SquareJson,
    TripleJson,
};
use crate::quantum::{self, pair_win_probabilities, triple_projectors, TOLERANCE};
use crate::rational::{self, Rational, RationalJson};

/// Seed for the random strategy samples inside the suite.
pub const SUITE_SEED: u64 = 0x5eed_2024;

/// Largest synchronous agreement an optimal AMS strategy may reach.
pub const SYNC_AGREEMENT_BOUND: u32 = 13;

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub id: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
struct Claims {
    items: Vec<Claim>,
    clock: Option<Instant>,
}

impl Claims {
    fn start(&mut self) {
        self.clock = Some(Instant::now());
    }

    fn push(&mut self, id: &str, expected: impl ToString, computed: impl ToString, pass: bool) {
        let seconds = self.clock.take().map_or(0.0, |c| c.elapsed().as_secs_f64());
        self.items.push(Claim {
            id: id.to_string(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            pass,
            seconds,
        });
    }

    fn equal<T: PartialEq + ToString>(&mut self, id: &str, expected: T, computed: T) {
        let pass = expected == computed;
        self.push(id, expected.to_string(), computed.to_string(), pass);
    }

    fn rational(&mut self, id: &str, expected: Rational, computed: Rational) {
        self.push(
            id,
            rational::display(expected),
            rational::display(computed),
            expected == computed,
        );
    }
}

/// Every value in `values` equal to `v`, rendered for a claim line.
fn uniform(values: impl IntoIterator<Item = usize>) -> String {
    let values: Vec<usize> = values.into_iter().collect();
    match values.first() {
        Some(v) if values.iter().all(|x| x == v) => format!("{v} for all {}", values.len()),
        _ => format!("{values:?}"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub triples: Vec<TripleJson>,
    pub incidence: pauli::IncidenceReport,
    pub squares: Vec<SquareJson>,
    pub ams_ordered_pairs: usize,
    pub claims: Vec<Claim>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }
}

fn structure_claims(claims: &mut Claims) -> Result<StructureReport> {
    claims.start();
    let triples = enumerate_commuting_triples();
    claims.equal("structure.commuting_triples", 15, triples.len());
    claims.start();
    let incidence = incidence_stats(&triples);
    claims.push(
        "structure.triples_per_element",
        uniform([3; 15]),
        uniform(incidence.membership.iter().map(|(_, c)| *c)),
        incidence.membership.len() == 15 && incidence.membership.iter().all(|(_, c)| *c == 3),
    );
    claims.start();
    claims.push(
        "structure.one_element_neighbors",
        uniform([6; 15]),
        uniform(incidence.one_element_neighbors.iter().copied()),
        incidence.one_element_neighbors.len() == 15
            && incidence.one_element_neighbors.iter().all(|c| *c == 6),
    );
    claims.start();
    let negative = triples.iter().filter(|t| t.product_sign() == -1).count();
    claims.equal("structure.negative_triples", 3, negative);
    claims.start();
    let squares = enumerate_magic_squares(&triples);
    claims.equal("structure.magic_squares", 10, squares.len());
    claims.start();
    let odd = squares
        .iter()
        .filter(|s| s.negative_lines() % 2 == 1)
        .count();
    claims.equal(
        "structure.squares_with_odd_negative_lines",
        squares.len(),
        odd,
    );
    claims.start();
    let ams = build_ams_game()?;
    let async_pairs = ams.pairs().iter().filter(|p| !p.is_sync()).count();
    claims.equal("structure.ams_ordered_pairs", 90, async_pairs);
    claims.start();
    claims.equal(
        "structure.ordered_intersecting_triples",
        90,
        incidence.ordered_intersecting_pairs,
    );
    Ok(StructureReport {
        triples: triples.iter().map(TripleJson::from).collect(),
        incidence,
        squares: squares.iter().map(SquareJson::from).collect(),
        ams_ordered_pairs: async_pairs,
        claims: Vec::new(),
    })
}

/// Enumerates the Pauli incidence structure and checks its counts.
pub fn cmd_structure() -> Result<StructureReport> {
    let mut claims = Claims::default();
    let mut report = structure_claims(&mut claims)?;
    report.claims = claims.items;
    Ok(report)
}

/// Integer weights `w * scale` per pair plus the scale itself.
fn integer_weights(g: &GameSpec) -> (Vec<u64>, u64) {
    let scale = rational::common_denominator(g.pairs().iter().map(|p| &p.weight));
    let units = g
        .pairs()
        .iter()
        .map(|p| (p.weight * scale).to_integer() as u64)
        .collect();
    (units, scale as u64)
}

/// Best total over every Bob answer vector drawn from `bob_choices`, by
/// explicit enumeration of the joint vector (no per-question decomposition).
/// An odometer walk changes one Bob answer at a time; only pairs touching
/// that question are rescored before the full total is compared.
fn enumerate_bob(
    g: &GameSpec,
    alice: &[AnswerTriple],
    bob_choices: &[Vec<AnswerTriple>],
    units: &[u64],
) -> u64 {
    let n = g.n_questions();
    let touching: Vec<Vec<usize>> = (0..n)
        .map(|k| {
            (0..g.pairs().len())
                .filter(|i| g.pairs()[*i].k == k)
                .collect()
        })
        .collect();
    let mut digits = vec![0usize; n];
    let mut pair_score: Vec<u64> = g
        .pairs()
        .iter()
        .zip(units)
        .map(|(p, u)| {
            if wins(g, p, alice[p.j], bob_choices[p.k][0]) {
                *u
            } else {
                0
            }
        })
        .collect();
    let mut total: u64 = pair_score.iter().sum();
    let mut best = total;
    loop {
        let mut q = 0;
        while q < n {
            digits[q] += 1;
            if digits[q] < bob_choices[q].len() {
                break;
            }
            digits[q] = 0;
            q += 1;
        }
        // Every digit up to q changed.
        for changed in 0..=q.min(n - 1) {
            let b = bob_choices[changed][digits[changed]];
            for &i in &touching[changed] {
                let p = &g.pairs()[i];
                let s = if wins(g, p, alice[p.j], b) {
                    units[i]
                } else {
                    0
                };
                total = total - pair_score[i] + s;
                pair_score[i] = s;
            }
        }
        if q == n {
            return best;
        }
        best = best.max(total);
    }
}

fn valid_choices(g: &GameSpec) -> Vec<Vec<AnswerTriple>> {
    g.equations()
        .iter()
        .map(|e| e.valid_answers().to_vec())
        .collect()
}

fn all_choices(g: &GameSpec) -> Vec<Vec<AnswerTriple>> {
    vec![AnswerTriple::all().collect(); g.n_questions()]
}

/// Classical value by enumerating every parity-valid Alice vector against
/// every parity-valid Bob vector.
pub fn double_enumeration_value(g: &GameSpec) -> Result<Rational> {
    if g.n_questions() > 8 {
        return Err(Error::input(
            "double enumeration is only feasible for small games",
        ));
    }
    let (units, scale) = integer_weights(g);
    let choices = valid_choices(g);
    let n = g.n_questions();
    let mut best = 0;
    for code in 0..(1u64 << (2 * n)) {
        let alice: Vec<AnswerTriple> = (0..n)
            .map(|q| choices[q][((code >> (2 * q)) & 3) as usize])
            .collect();
        best = best.max(enumerate_bob(g, &alice, &choices, &units));
    }
    Ok(Rational::new(best as i64, scale as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleDiscrepancies {
    pub samples: usize,
    /// Per-question best response disagrees with enumerating all Bob vectors.
    pub separability: usize,
    /// Restricting Bob to parity-valid answers changes the best total.
    pub parity_restriction: usize,
}

/// Compares the per-question best response against full enumeration of
/// Bob's answer vectors, for `samples` seeded Alice strategies using any of
/// the eight answers.
pub fn best_response_oracle(
    g: &GameSpec,
    samples: usize,
    seed: u64,
) -> Result<OracleDiscrepancies> {
    let (units, scale) = integer_weights(g);
    let (all, valid) = (all_choices(g), valid_choices(g));
    let mut rng = seeded_rng(seed);
    let mut out = OracleDiscrepancies {
        samples,
        separability: 0,
        parity_restriction: 0,
    };
    for _ in 0..samples {
        let alice: Vec<AnswerTriple> = (0..g.n_questions())
            .map(|_| AnswerTriple::new(rng.gen_range(0..8)))
            .collect::<Result<_>>()?;
        let full = Rational::new(enumerate_bob(g, &alice, &all, &units) as i64, scale as i64);
        let restricted = Rational::new(
            enumerate_bob(g, &alice, &valid, &units) as i64,
            scale as i64,
        );
        if best_response(g, &alice, BobAnswers::All)?.value != full {
            out.separability += 1;
        }
        if best_response(g, &alice, BobAnswers::ParityValid)?.value != full || restricted != full {
            out.parity_restriction += 1;
        }
    }
    Ok(out)
}

/// Largest best-response value over every Alice vector of all eight answers
/// per question.
fn unrestricted_alice_value(g: &GameSpec) -> Result<Rational> {
    let n = g.n_questions();
    let mut best = Rational::zero();
    for code in 0..(1u64 << (3 * n)) {
        let alice: Vec<AnswerTriple> = (0..n)
            .map(|q| AnswerTriple::new(((code >> (3 * q)) & 7) as u8))
            .collect::<Result<_>>()?;
        best = best.max(best_response(g, &alice, BobAnswers::All)?.value);
    }
    Ok(best)
}

/// Number of seeded symmetric parity-satisfying strategies whose exact value
/// differs from `(15 + 2q) / 45`.
pub fn symmetric_profile_mismatches(g: &GameSpec, samples: usize, seed: u64) -> Result<usize> {
    let mut rng = seeded_rng(seed);
    let mut bad = 0;
    for _ in 0..samples {
        let answers: Vec<AnswerTriple> = g
            .equations()
            .iter()
            .map(|e| e.valid_answers()[rng.gen_range(0..4)])
            .collect();
        let predicted = consistency_profile(g, &answers)?.predicted_value();
        if evaluate_pair(g, &DeterministicStrategy::symmetric(answers))? != predicted {
            bad += 1;
        }
    }
    Ok(bad)
}

#[derive(Debug, Clone, Serialize)]
pub struct SyncAgreementArtifact {
    #[serde(flatten)]
    pub report: SyncAgreementReport,
    pub bound: u32,
    pub bound_attained: bool,
    pub note: String,
}

impl SyncAgreementArtifact {
    fn new(report: SyncAgreementReport) -> Self {
        let s = report.max_agreement;
        let note = if s == SYNC_AGREEMENT_BOUND {
            format!("an optimal AMS strategy answers {s} synchronous questions alike: the bound of {SYNC_AGREEMENT_BOUND} is attained")
        } else {
            format!(
                "NOTABLE: no optimal AMS strategy agrees on more than {s} synchronous questions, strictly below the bound of {SYNC_AGREEMENT_BOUND}"
            )
        };
        SyncAgreementArtifact {
            bound_attained: s == SYNC_AGREEMENT_BOUND,
            bound: SYNC_AGREEMENT_BOUND,
            note,
            report,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LineCheck {
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub p: Rational,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub value: Rational,
    /// `max(p + (1 - p) * 13/15, p * s/15 + (1 - p) * 8/9)` with `s` the
    /// attained synchronous agreement.
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub two_line_bound: Rational,
    pub value_equals_bound: bool,
}

fn two_line_bound(p: Rational, agreement: u32) -> Rational {
    let one = Rational::one();
    let symmetric = p + (one - p) * Rational::new(13, 15);
    let asymmetric = p * Rational::new(agreement as i64, 15) + (one - p) * Rational::new(8, 9);
    symmetric.max(asymmetric)
}

#[derive(Debug, Clone, Serialize)]
pub struct EntangledSummary {
    pub game: GameKind,
    pub pairs: usize,
    pub min_pair_probability: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteArtifacts {
    pub structure: StructureReport,
    #[serde(serialize_with = "crate::classical::serialize_strategy")]
    pub ams_witness: DeterministicStrategy,
    #[serde(serialize_with = "crate::classical::serialize_strategy")]
    pub symmetric_witness: DeterministicStrategy,
    pub sync_agreement: SyncAgreementArtifact,
    pub sweep: Vec<SweepRow>,
    pub line_checks: Vec<LineCheck>,
    pub best_response_oracle: OracleDiscrepancies,
    pub entangled: Vec<EntangledSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationSuiteResult {
    pub pass: bool,
    pub claims: Vec<Claim>,
    pub artifacts: SuiteArtifacts,
}

impl VerificationSuiteResult {
    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.pass)
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    /// Pretty JSON. Without timings every `seconds` and `wall_time` field is
    /// dropped, leaving output that depends only on the computation.
    pub fn to_json(&self, timings: bool) -> Result<String> {
        let mut v = serde_json::to_value(self).map_err(|e| Error::consistency(e.to_string()))?;
        if !timings {
            strip_timings(&mut v);
        }
        serde_json::to_string_pretty(&v).map_err(|e| Error::consistency(e.to_string()))
    }
}

fn strip_timings(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("seconds");
            map.remove("wall_time");
            map.values_mut().for_each(strip_timings);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

/// p values swept for the envelope check.
pub fn sweep_points() -> Vec<Rational> {
    vec![
        Rational::zero(),
        Rational::new(1, 14),
        Rational::new(1, 7),
        Rational::new(1, 2),
        Rational::one(),
    ]
}

/// Runs every check. Mismatches mark claims as failed; internal
/// inconsistencies (a witness that does not reproduce its value, a Born
/// distribution that does not normalize) abort with an error.
pub fn verify_all(opts: &SearchOptions) -> Result<VerificationSuiteResult> {
    let mut c = Claims::default();
    let structure = structure_claims(&mut c)?;

    let ams = build_ams_game()?;
    let ms = build_ms_game()?;
    let flat = ams.distribution();
    for procedure in SamplingProcedure::ALL {
        c.start();
        let dist = exact_pair_distribution(&ams, procedure)?;
        let uniform = dist.len() == 90 && dist.0.values().all(|w| *w == Rational::new(1, 90));
        let computed = if uniform {
            "1/90 on each of 90 pairs".to_string()
        } else {
            format!(
                "{} pairs, total {}",
                dist.len(),
                rational::display(dist.total())
            )
        };
        c.push(
            &format!("sampler.{}", procedure.name()),
            "1/90 on each of 90 pairs",
            computed,
            uniform && dist == flat,
        );
    }

    c.start();
    let ms_value = solve_classical_value(&ms, opts)?;
    c.rational("ms.classical_value", Rational::new(8, 9), ms_value.value);
    c.start();
    c.rational(
        "ms.double_enumeration",
        Rational::new(8, 9),
        double_enumeration_value(&ms)?,
    );
    c.start();
    c.rational(
        "ms.unrestricted_alice",
        ms_value.value,
        unrestricted_alice_value(&ms)?,
    );

    c.start();
    let (ams_value, agreement) = solve_value_with_agreement(&ams, opts)?;
    c.rational("ams.classical_value", Rational::new(8, 9), ams_value.value);
    c.start();
    c.equal(
        "ams.witness_asymmetric",
        true,
        !ams_value.witness.is_symmetric(),
    );
    c.start();
    c.equal(
        "ams.witness_satisfies_parities",
        true,
        ams_value.witness.satisfies_parities(&ams),
    );

    c.start();
    let sym = solve_symmetric_value(&ams, opts)?;
    c.rational("ams.symmetric_value", Rational::new(13, 15), sym.value);

    c.start();
    let sat = max_satisfiable_assignment(ams.equations(), ams.n_variables())?;
    c.equal("ams.max_satisfiable_equations", 12, sat.max_count);

    c.start();
    let mismatches = symmetric_profile_mismatches(&ams, 1000, SUITE_SEED)?;
    c.equal("ams.symmetric_value_from_profile", 0, mismatches);

    c.start();
    c.push(
        "ams.sync_agreement_bound",
        format!("at most {SYNC_AGREEMENT_BOUND}"),
        agreement.max_agreement,
        agreement.max_agreement <= SYNC_AGREEMENT_BOUND,
    );
    let sync_agreement = SyncAgreementArtifact::new(agreement);

    c.start();
    let mut sweep = Vec::new();
    for p in sweep_points() {
        let row = if p.is_zero() {
            sweep_row(p, &ams_value)?
        } else {
            sweep_row(p, &solve_classical_value(&build_psams_game(p)?, opts)?)?
        };
        sweep.push(row);
    }
    let value_at = |p: Rational| {
        sweep
            .iter()
            .find(|r| r.p == p)
            .map(|r| r.value)
            .unwrap_or_default()
    };
    let seventh = Rational::new(1, 7);
    c.rational(
        "psams.value_p0",
        Rational::new(8, 9),
        value_at(Rational::zero()),
    );
    c.rational("psams.value_p1_7", Rational::new(31, 35), value_at(seventh));
    c.rational("psams.value_p1", Rational::one(), value_at(Rational::one()));

    c.start();
    let envelope = classical::check_sweep_envelope(&sweep);
    c.push(
        "psams.sweep_is_upper_envelope",
        "true",
        envelope
            .as_ref()
            .map_or_else(|e| e.to_string(), |_| "true".to_string()),
        envelope.is_ok(),
    );
    let line_checks: Vec<LineCheck> = sweep
        .iter()
        .map(|r| {
            let bound = two_line_bound(r.p, sync_agreement.report.max_agreement);
            LineCheck {
                p: r.p,
                value: r.value,
                two_line_bound: bound,
                value_equals_bound: r.value == bound,
            }
        })
        .collect();
    c.push(
        "psams.value_at_least_two_line_bound",
        "true",
        line_checks.iter().all(|l| l.value >= l.two_line_bound),
        line_checks.iter().all(|l| l.value >= l.two_line_bound),
    );

    c.start();
    let oracle = best_response_oracle(&ms, 1000, SUITE_SEED)?;
    c.equal("oracle.best_response_separability", 0, oracle.separability);
    c.equal("oracle.parity_restriction", 0, oracle.parity_restriction);

    let psams = build_psams_game(seventh)?;
    let mut entangled = Vec::new();
    let mut max_deviation: f64 = 0.0;
    let mut parity_matches = 0;
    c.start();
    for (j, eq) in ams.equations().iter().enumerate() {
        for conjugated in [false, true] {
            let fam = triple_projectors(j, ams.equation_ops(j), conjugated)?;
            max_deviation = max_deviation.max(fam.max_deviation());
            if !conjugated && fam.parity() == eq.parity {
                parity_matches += 1;
            }
        }
    }
    c.equal(
        "quantum.outcome_parities_match_equations",
        ams.n_questions(),
        parity_matches,
    );
    c.push(
        "quantum.projector_invariants",
        format!("max deviation at most {TOLERANCE:e}"),
        format!("{max_deviation:.3e}"),
        max_deviation <= TOLERANCE,
    );
    for (g, id, filter) in [
        (&ms, "quantum.ms_pairs_won", None),
        (&ams, "quantum.ams_async_pairs_won", Some(false)),
        (&psams, "quantum.psams_sync_pairs_won", Some(true)),
    ] {
        c.start();
        let s = quantum::perfect_strategy(g)?;
        let probs = pair_win_probabilities(g, &s)?;
        let selected: Vec<f64> = probs
            .iter()
            .filter(|pp| filter.is_none_or(|sync| (pp.j == pp.k) == sync))
            .map(|pp| pp.prob)
            .collect();
        let worst = selected.iter().copied().fold(1.0f64, f64::min);
        let won = selected
            .iter()
            .filter(|p| (*p - 1.0).abs() <= TOLERANCE)
            .count();
        c.push(
            id,
            format!("{} of {}", selected.len(), selected.len()),
            format!("{won} of {}", selected.len()),
            won == selected.len() && !selected.is_empty(),
        );
        let value = quantum::entangled_win_probability(g, &s)?;
        entangled.push(EntangledSummary {
            game: g.kind(),
            pairs: probs.len(),
            min_pair_probability: worst,
            value,
        });
    }
    c.start();
    let all_one = entangled.iter().all(|e| (e.value - 1.0).abs() <= TOLERANCE);
    c.push(
        "quantum.entangled_values",
        "1 for ms, ams, psams",
        if all_one {
            "1 for ms, ams, psams".to_string()
        } else {
            entangled
                .iter()
                .map(|e| format!("{}: {}", e.game, e.value))
                .collect::<Vec<_>>()
                .join(", ")
        },
        all_one,
    );
    c.start();
    let unconjugated =
        quantum::entangled_win_probability(&ams, &quantum::entangled_strategy(&ams, false)?)?;
    c.push(
        "quantum.unconjugated_bob_not_perfect",
        "below 1",
        format!("{unconjugated:.12}"),
        unconjugated < 1.0 - TOLERANCE,
    );

    c.start();
    let entangled_value = if all_one {
        Rational::one()
    } else {
        Rational::zero()
    };
    c.rational(
        "psams.gap_p1_7",
        Rational::new(4, 35),
        entangled_value - value_at(seventh),
    );
    c.start();
    let below = value_at(seventh) < ams_value.value;
    c.push(
        "psams.value_p1_7_below_ams",
        "31/35 < 8/9",
        format!(
            "{} {} {}",
            rational::display(value_at(seventh)),
            if below { "<" } else { ">=" },
            rational::display(ams_value.value)
        ),
        below,
    );

    let claims = c.items;
    Ok(VerificationSuiteResult {
        pass: claims.iter().all(|c| c.pass),
        claims,
        artifacts: SuiteArtifacts {
            structure,
            ams_witness: ams_value.witness,
            symmetric_witness: sym.witness,
            sync_agreement,
            sweep,
            line_checks,
            best_response_oracle: oracle,
            entangled,
        },
    })
}

#[derive(Debug, Clone)]
pub enum PlayStrategy {
    EntangledPerfect,
    Classical(DeterministicStrategy),
}

impl PlayStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            PlayStrategy::EntangledPerfect => "entangled-perfect",
            PlayStrategy::Classical(_) => "classical",
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RoundLog {
    pub seed: u64,
    pub game: GameKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<RationalJson>,
    pub procedure: SamplingProcedure,
    pub strategy: String,
    pub rounds: Vec<Round>,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct PlaySummary {
    pub rounds: usize,
    pub wins: usize,
    pub win_rate: f64,
    pub std_error: f64,
}

impl RoundLog {
    pub fn summary(&self) -> PlaySummary {
        let n = self.rounds.len();
        let wins = self.rounds.iter().filter(|r| r.win).count();
        let rate = if n == 0 { 0.0 } else { wins as f64 / n as f64 };
        PlaySummary {
            rounds: n,
            wins,
            win_rate: rate,
            std_error: if n == 0 {
                0.0
            } else {
                (rate * (1.0 - rate) / n as f64).sqrt()
            },
        }
    }
}

/// Plays `rounds` seeded rounds. The same arguments always give the same log.
pub fn play(
    g: &GameSpec,
    strategy: &PlayStrategy,
    procedure: SamplingProcedure,
    rounds: usize,
    seed: u64,
) -> Result<RoundLog> {
    let sampler = QuestionSampler::new(g, procedure)?;
    let mut rng = seeded_rng(seed);
    let mut log = Vec::with_capacity(rounds);
    match strategy {
        PlayStrategy::EntangledPerfect => {
            let s = quantum::perfect_strategy(g)?;
            for _ in 0..rounds {
                log.push(quantum::play_entangled_round(g, &s, &sampler, &mut rng)?);
            }
        }
        PlayStrategy::Classical(s) => {
            if s.alice.len() != g.n_questions() || s.bob.len() != g.n_questions() {
                return Err(Error::input(format!(
                    "strategy answers {} questions but the {} game has {}",
                    s.alice.len(),
                    g.kind(),
                    g.n_questions()
                )));
            }
            for _ in 0..rounds {
                let (j, k) = sampler.sample(&mut rng);
                let pair = g
                    .pair(j, k)
                    .ok_or_else(|| Error::consistency("sampler drew a zero-weight pair"))?;
                let (a, b) = (s.alice[j], s.bob[k]);
                log.push(Round {
                    j,
                    k,
                    a,
                    b,
                    win: wins(g, pair, a, b),
                });
            }
        }
    }
    Ok(RoundLog {
        seed,
        game: g.kind(),
        p: (g.kind() == GameKind::Psams).then(|| g.sync_weight().into()),
        procedure,
        strategy: strategy.name().to_string(),
        rounds: log,
    })
}
