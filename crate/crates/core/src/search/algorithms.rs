use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{odometer, Algorithm, BccMode, CombinationSet, Metric, SearchSettings, SearchState};
use crate::error::{Error, Result};
use crate::precode::{ActiveMask, ApDesign, BeamAssignment, Evaluator, MetricsReport};
use crate::scenario::{ChannelRealization, Codebook};
use crate::seed::{substream, Stream};

/// Inputs shared by every search on one realization.
#[derive(Clone, Copy)]
pub struct SearchProblem<'a> {
    pub realization: &'a ChannelRealization,
    pub codebook: &'a Codebook,
    pub p_t_w: f64,
    /// Served pairs; `None` serves every user from every AP.
    pub mask: Option<&'a ActiveMask>,
    /// Master seed of the random initializations.
    pub seed: u64,
}

impl<'a> SearchProblem<'a> {
    pub fn new(realization: &'a ChannelRealization, codebook: &'a Codebook, p_t_w: f64, seed: u64) -> Self {
        Self { realization, codebook, p_t_w, mask: None, seed }
    }

    pub fn with_mask(mut self, mask: Option<&'a ActiveMask>) -> Self {
        self.mask = mask;
        self
    }

    fn evaluator(&self, settings: &SearchSettings) -> Result<Evaluator<'a>> {
        Evaluator::new(
            self.realization,
            self.codebook,
            self.p_t_w,
            settings.precoder,
            settings.bcc_mode == BccMode::Off,
            self.mask,
        )
    }

    /// Initial assignment number `index`, reproducible from the seed.
    pub fn initial_assignment(&self, index: u64, bcc: BccMode) -> BeamAssignment {
        let mut rng = substream(self.seed, self.realization.run_index(), Stream::SearchInit, index);
        random_init(&mut rng, self.realization.aps(), self.realization.users(), self.codebook.len(), bcc)
    }
}

/// Random starting point. With conflict control each user gets a distinct
/// beam that every AP uses; otherwise every entry is uniform.
pub fn random_init<R: Rng + ?Sized>(rng: &mut R, aps: usize, users: usize, codebook_size: usize, bcc: BccMode) -> BeamAssignment {
    if bcc.feasible_init() && codebook_size >= users {
        let per_user = sample(rng, codebook_size, users).into_vec();
        BeamAssignment::repeated(aps, &per_user)
    } else {
        let idx = (0..aps * users).map(|_| rng.random_range(0..codebook_size)).collect();
        BeamAssignment::from_indices(aps, users, idx).expect("length matches")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub assignment: BeamAssignment,
    pub report: MetricsReport,
}

/// Best assignment found plus search counters, before the final report.
struct Found {
    assignment: BeamAssignment,
    evaluations: u64,
    fallbacks: u64,
}

fn finish(eval: &Evaluator<'_>, found: Found) -> SearchOutcome {
    let mut report = eval.report(&found.assignment);
    report.evaluation_count = found.evaluations;
    report.fallback_count += found.fallbacks;
    SearchOutcome { assignment: found.assignment, report }
}

/// Runs the search selected by `settings`.
pub fn search(problem: &SearchProblem<'_>, settings: &SearchSettings) -> Result<SearchOutcome> {
    let start = Instant::now();
    let mut out = match settings.algorithm {
        Algorithm::Exhaustive => exhaustive_search(problem, settings)?,
        Algorithm::DisjointLinearDl => disjoint_linear_dl(problem, settings)?,
        Algorithm::Linear | Algorithm::Semilinear => run_ii(problem, settings)?,
        Algorithm::LinearIis => run_iis(problem, settings)?,
    };
    out.report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(out)
}

fn check(problem: &SearchProblem<'_>, settings: &SearchSettings) -> Result<()> {
    settings.check_network(problem.realization.users(), problem.codebook.len())?;
    if let Some(m) = problem.mask {
        if m.aps() != problem.realization.aps() || m.users() != problem.realization.users() {
            return Err(Error::InvalidConfig("mask dimensions do not match the network".into()));
        }
    }
    Ok(())
}

fn budget_check(combinations: u128, budget: u64) -> Result<()> {
    if combinations > budget as u128 {
        return Err(Error::OracleBudgetExceeded { combinations, budget });
    }
    Ok(())
}

/// Scores every (conflict-free, under full BCC) index matrix and keeps the
/// best sum-rate; ties go to the lexicographically smallest matrix.
pub fn exhaustive_search(problem: &SearchProblem<'_>, settings: &SearchSettings) -> Result<SearchOutcome> {
    check(problem, settings)?;
    let (aps, users, nb) = (problem.realization.aps(), problem.realization.users(), problem.codebook.len());
    let raw = (nb as u128).checked_pow((users * aps) as u32).unwrap_or(u128::MAX);
    budget_check(raw, settings.exhaustive_budget)?;
    let eval = problem.evaluator(settings)?;
    let tuples = CombinationSet::all(nb, users);
    let designs: Vec<Vec<ApDesign>> = (0..aps)
        .map(|l| tuples.tuples().iter().map(|t| eval.design(l, t)).collect())
        .collect();
    let fallbacks = designs.iter().flatten().filter(|d| d.used_fallback).count() as u64;
    let full_bcc = settings.bcc_mode == BccMode::Full;
    let mut digits = vec![0usize; aps];
    let mut current = BeamAssignment::filled(aps, users, 0);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluations = 0u64;
    loop {
        for (l, &t) in digits.iter().enumerate() {
            current.set_ap_beams(l, tuples.get(t));
        }
        if !full_bcc || current.is_conflict_free(problem.mask) {
            evaluations += 1;
            let chosen: Vec<&ApDesign> = digits.iter().enumerate().map(|(l, &t)| &designs[l][t]).collect();
            let score = eval.sum_rate(&chosen);
            if best.is_none() || score > best.as_ref().map_or(f64::NEG_INFINITY, |b| b.0) {
                best = Some((score, digits.clone()));
            }
        }
        if !odometer(&mut digits, tuples.len()) {
            break;
        }
    }
    let (_, digits) = best.ok_or(Error::BccExhausted { ap: 0, user: 0 })?;
    let mut assignment = BeamAssignment::filled(aps, users, 0);
    for (l, &t) in digits.iter().enumerate() {
        assignment.set_ap_beams(l, tuples.get(t));
    }
    Ok(finish(&eval, Found { assignment, evaluations, fallbacks }))
}

fn semilinear_budget(problem: &SearchProblem<'_>, settings: &SearchSettings) -> Result<()> {
    if settings.algorithm != Algorithm::Semilinear {
        return Ok(());
    }
    let (users, nb) = (problem.realization.users() as u128, problem.codebook.len() as u128);
    let c = if settings.bcc_mode == BccMode::Full {
        (0..users).map(|i| nb.saturating_sub(i)).fold(1u128, |a, x| a.saturating_mul(x))
    } else {
        nb.checked_pow(users as u32).unwrap_or(u128::MAX)
    };
    budget_check(c, settings.exhaustive_budget)
}

/// Sweeps over APs in `order`, `n_iter` times, from `init`. Returns the best
/// assignment seen after any sweep.
fn sweep(
    eval: &Evaluator<'_>,
    settings: &SearchSettings,
    init: BeamAssignment,
    order: &[usize],
) -> Result<(f64, BeamAssignment, u64, u64)> {
    let mut state = match settings.algorithm {
        Algorithm::Semilinear => SearchState::for_semilinear(eval, init, settings.metric, settings.bcc_mode),
        _ => SearchState::for_linear(eval, init, settings.metric, settings.bcc_mode),
    };
    let mut best: Option<(f64, BeamAssignment)> = None;
    for _ in 0..settings.n_iter {
        for &l in order {
            match settings.algorithm {
                Algorithm::Semilinear => state.semilinear_pass(l)?,
                _ => state.linear_pass(l)?,
            }
        }
        let obj = state.objective();
        if best.as_ref().is_none_or(|b| obj > b.0) {
            best = Some((obj, state.assignment().clone()));
        }
    }
    let (obj, a) = best.expect("n_iter >= 1");
    Ok((obj, a, state.evaluations(), state.fallbacks()))
}

/// Random restarts around the linear or semilinear pass.
pub fn run_ii(problem: &SearchProblem<'_>, settings: &SearchSettings) -> Result<SearchOutcome> {
    check(problem, settings)?;
    if !matches!(settings.algorithm, Algorithm::Linear | Algorithm::Semilinear) {
        return Err(Error::InvalidConfig(format!("{} is not a restart search", settings.algorithm)));
    }
    semilinear_budget(problem, settings)?;
    let eval = problem.evaluator(settings)?;
    let order: Vec<usize> = (0..problem.realization.aps()).collect();
    let mut best: Option<(f64, BeamAssignment)> = None;
    let (mut evaluations, mut fallbacks) = (0, 0);
    for i in 0..settings.n_init {
        let init = problem.initial_assignment(i as u64, settings.bcc_mode);
        let (obj, a, e, f) = sweep(&eval, settings, init, &order)?;
        evaluations += e;
        fallbacks += f;
        if best.as_ref().is_none_or(|b| obj > b.0) {
            best = Some((obj, a));
        }
    }
    let (_, assignment) = best.expect("n_init >= 1");
    Ok(finish(&eval, Found { assignment, evaluations, fallbacks }))
}

/// Linear restarts repeated over every circular shift of the AP order.
pub fn run_iis(problem: &SearchProblem<'_>, settings: &SearchSettings) -> Result<SearchOutcome> {
    check(problem, settings)?;
    if settings.algorithm != Algorithm::LinearIis {
        return Err(Error::InvalidConfig(format!("{} is not the prioritized search", settings.algorithm)));
    }
    let eval = problem.evaluator(settings)?;
    let aps = problem.realization.aps();
    let mut best: Option<(f64, BeamAssignment)> = None;
    let (mut evaluations, mut fallbacks) = (0, 0);
    for i in 0..settings.n_init {
        let init = problem.initial_assignment(i as u64, settings.bcc_mode);
        let mut order: Vec<usize> = (0..aps).collect();
        for _ in 0..aps {
            let (obj, a, e, f) = sweep(&eval, settings, init.clone(), &order)?;
            evaluations += e;
            fallbacks += f;
            if best.as_ref().is_none_or(|b| obj > b.0) {
                best = Some((obj, a));
            }
            order.rotate_left(1);
        }
    }
    let (_, assignment) = best.expect("n_init >= 1");
    Ok(finish(&eval, Found { assignment, evaluations, fallbacks }))
}

/// Matched-filter beam choice per (AP, user) without precoders in the loop;
/// precoders are designed once at the end.
pub fn disjoint_linear_dl(problem: &SearchProblem<'_>, settings: &SearchSettings) -> Result<SearchOutcome> {
    check(problem, settings)?;
    if settings.metric != Metric::Dl {
        return Err(Error::InvalidConfig("the disjoint search scores direct-link power".into()));
    }
    let eval = problem.evaluator(settings)?;
    let init = problem.initial_assignment(0, settings.bcc_mode);
    let mut state = SearchState::for_disjoint(&eval, init, settings.bcc_mode);
    for l in 0..problem.realization.aps() {
        state.disjoint_pass(l)?;
    }
    let found = Found {
        assignment: state.assignment().clone(),
        evaluations: state.evaluations(),
        fallbacks: state.fallbacks(),
    };
    Ok(finish(&eval, found))
}
