//! Exhaustive optimization entry points built on the packed scan.
//!
//! Alice ranges over parity-valid answers only. A parity-violating answer
//! loses every pair it takes part in.

use std::time::Instant;

use num_traits::{One, Zero};
use serde::Serialize;

use super::scan::{
    self, AgreementTracker, BestResponseState, BestTracker, ScanTables, SymmetricState,
};
use super::{
    best_response, evaluate_pair, BobAnswers, DeterministicStrategy, PackedAliceStrategy,
    SearchOptions, ValueReport,
};
use crate::error::{Error, Result};
use crate::game::{build_ams_game, build_psams_game, GameSpec};
use crate::rational::{self, Rational};

fn bob_reply(g: &GameSpec, alice: &[crate::game::AnswerTriple]) -> Result<DeterministicStrategy> {
    let bob = best_response(g, alice, BobAnswers::ParityValid)?.first_choice();
    Ok(DeterministicStrategy {
        alice: alice.to_vec(),
        bob,
    })
}

fn confirm(g: &GameSpec, witness: &DeterministicStrategy, value: Rational) -> Result<()> {
    let direct = evaluate_pair(g, witness)?;
    if direct != value {
        return Err(Error::consistency(format!(
            "scan reported {} but its witness evaluates to {}",
            rational::display(value),
            rational::display(direct)
        )));
    }
    Ok(())
}

/// Exact classical value: every packed Alice strategy against its best
/// response. The witness is the smallest packed Alice reaching the value,
/// with Bob taking his smallest maximizing answer on each question.
pub fn solve_classical_value(g: &GameSpec, opts: &SearchOptions) -> Result<ValueReport> {
    let start = Instant::now();
    let tables = ScanTables::new(g)?;
    let best = scan::scan(&tables, opts, BestResponseState::new, BestTracker::default)?;
    let value = tables.value(best.total);
    let witness = bob_reply(g, &PackedAliceStrategy(best.packed).decode(g))?;
    confirm(g, &witness, value)?;
    Ok(ValueReport {
        value,
        witness,
        strategies_scanned: tables.points(),
        wall_time: start.elapsed(),
    })
}

/// Exact value over strategies with identical answer functions for both players.
pub fn solve_symmetric_value(g: &GameSpec, opts: &SearchOptions) -> Result<ValueReport> {
    let start = Instant::now();
    let tables = ScanTables::new(g)?;
    let best = scan::scan(&tables, opts, SymmetricState::new, BestTracker::default)?;
    let value = tables.value(best.total);
    let witness = DeterministicStrategy::symmetric(PackedAliceStrategy(best.packed).decode(g));
    confirm(g, &witness, value)?;
    Ok(ValueReport {
        value,
        witness,
        strategies_scanned: tables.points(),
        wall_time: start.elapsed(),
    })
}

/// First optimal strategy in packed order; for the AMS game it must be
/// asymmetric and satisfy every parity constraint.
pub fn find_optimal_witness(g: &GameSpec, opts: &SearchOptions) -> Result<DeterministicStrategy> {
    Ok(solve_classical_value(g, opts)?.witness)
}

#[derive(Debug, Clone, Serialize)]
pub struct SyncAgreementReport {
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub optimal_value: Rational,
    /// Packed Alice strategies whose best response reaches the optimum.
    pub optimal_alice_count: u64,
    /// Most questions on which an optimal pair can answer identically.
    pub max_agreement: u32,
    #[serde(serialize_with = "super::strategy_file::serialize_strategy")]
    pub witness: DeterministicStrategy,
    /// Same maximum over optimal pairs that are not fully synchronous.
    pub max_asymmetric_agreement: Option<u32>,
    #[serde(serialize_with = "super::strategy_file::serialize_optional_strategy")]
    pub asymmetric_witness: Option<DeterministicStrategy>,
    pub strategies_scanned: u64,
    pub seconds: f64,
}

/// For every Alice strategy attaining the classical value, the largest number
/// of questions on which some optimal Bob answers exactly like her; maximized
/// over all such Alices.
pub fn max_sync_agreement_over_optima(
    g: &GameSpec,
    opts: &SearchOptions,
) -> Result<SyncAgreementReport> {
    Ok(solve_value_with_agreement(g, opts)?.1)
}

/// [`solve_classical_value`] and [`max_sync_agreement_over_optima`] from a
/// single pass over the packed space.
pub fn solve_value_with_agreement(
    g: &GameSpec,
    opts: &SearchOptions,
) -> Result<(ValueReport, SyncAgreementReport)> {
    let start = Instant::now();
    let tables = ScanTables::new(g)?;
    let n = tables.n();
    let tracker = scan::scan(&tables, opts, BestResponseState::new, || {
        AgreementTracker::new(n)
    })?;
    let optimal_value = tables.value(tracker.best.total);

    let agreeing_pair = |packed: u32, expected: u32| -> Result<DeterministicStrategy> {
        let alice = PackedAliceStrategy(packed).decode(g);
        let br = best_response(g, &alice, BobAnswers::ParityValid)?;
        let bob = alice
            .iter()
            .zip(&br.argmax)
            .map(|(a, set)| if set.contains(a) { *a } else { set[0] })
            .collect();
        let s = DeterministicStrategy { alice, bob };
        confirm(g, &s, optimal_value)?;
        if s.agreement() as u32 != expected {
            return Err(Error::consistency(format!(
                "agreement witness answers {} questions alike, scan said {expected}",
                s.agreement()
            )));
        }
        Ok(s)
    };

    let top = tracker
        .max_agreement
        .ok_or_else(|| Error::consistency("scan recorded no optimal strategy"))?;
    let witness = agreeing_pair(top.packed, top.agreement)?;
    let asymmetric_witness = tracker
        .max_partial_agreement
        .map(|a| agreeing_pair(a.packed, a.agreement))
        .transpose()?;
    let value_witness = bob_reply(g, &PackedAliceStrategy(tracker.best.packed).decode(g))?;
    confirm(g, &value_witness, optimal_value)?;
    let value = ValueReport {
        value: optimal_value,
        witness: value_witness,
        strategies_scanned: tables.points(),
        wall_time: start.elapsed(),
    };
    let agreement = SyncAgreementReport {
        optimal_value,
        optimal_alice_count: tracker.optimal_count,
        max_agreement: top.agreement,
        witness,
        max_asymmetric_agreement: tracker.max_partial_agreement.map(|a| a.agreement),
        asymmetric_witness,
        strategies_scanned: tables.points(),
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((value, agreement))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub p: Rational,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub value: Rational,
    #[serde(serialize_with = "super::strategy_file::serialize_strategy")]
    pub witness: DeterministicStrategy,
    /// The witness's value in the AMS game.
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub ams_value: Rational,
    /// Synchronous questions the witness wins.
    pub sync_wins: usize,
    pub seconds: f64,
}

impl SweepRow {
    /// Value of this row's witness in the p-SAMS game: affine in p.
    pub fn line_at(&self, p: Rational) -> Rational {
        (Rational::one() - p) * self.ams_value + p * Rational::new(self.sync_wins as i64, 15)
    }
}

fn sync_wins(g: &GameSpec, s: &DeterministicStrategy) -> usize {
    (0..g.n_questions())
        .filter(|&j| s.alice[j] == s.bob[j] && g.equation(j).satisfied_by(s.alice[j]))
        .count()
}

/// Builds a sweep row from a finished value scan of the p-SAMS game at `p`,
/// checking that the witness's line passes through the value.
pub fn sweep_row(p: Rational, report: &ValueReport) -> Result<SweepRow> {
    let ams = build_ams_game()?;
    let g = build_psams_game(p)?;
    let row = SweepRow {
        p,
        value: report.value,
        ams_value: evaluate_pair(&ams, &report.witness)?,
        sync_wins: sync_wins(&g, &report.witness),
        witness: report.witness.clone(),
        seconds: report.wall_time.as_secs_f64(),
    };
    if row.line_at(p) != row.value {
        return Err(Error::consistency(format!(
            "witness line at p = {} disagrees with the scan",
            rational::display(p)
        )));
    }
    Ok(row)
}

/// Classical value of the p-SAMS game for each requested p.
pub fn psams_value_sweep(p_values: &[Rational], opts: &SearchOptions) -> Result<Vec<SweepRow>> {
    p_values
        .iter()
        .map(|&p| sweep_row(p, &solve_classical_value(&build_psams_game(p)?, opts)?))
        .collect()
}

/// Checks that each swept value is the upper envelope of the witnesses'
/// lines: no witness beats the reported value at any swept p.
pub fn check_sweep_envelope(rows: &[SweepRow]) -> Result<()> {
    for at in rows {
        let best = rows
            .iter()
            .map(|w| w.line_at(at.p))
            .max()
            .unwrap_or_else(Rational::zero);
        if best != at.value {
            return Err(Error::consistency(format!(
                "at p = {} the witness lines peak at {} but the value is {}",
                rational::display(at.p),
                rational::display(best),
                rational::display(at.value)
            )));
        }
    }
    Ok(())
}
