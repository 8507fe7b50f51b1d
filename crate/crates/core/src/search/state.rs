use super::{BccMode, CodebookLog, CombinationSet, Metric};
use crate::error::{Error, Result};
use crate::precode::{ApDesign, BeamAssignment, Evaluator};

/// Mutable state of one search run: the incumbent assignment, its per-AP
/// designs and the conflict-control bookkeeping.
pub struct SearchState<'e, 'a> {
    eval: &'e Evaluator<'a>,
    metric: Metric,
    bcc: BccMode,
    assignment: BeamAssignment,
    designs: Vec<ApDesign>,
    logs: Option<CodebookLog>,
    combos: Option<CombinationSet>,
    evaluations: u64,
    fallbacks: u64,
    commits: Vec<f64>,
}

impl<'e, 'a> SearchState<'e, 'a> {
    /// State for linear passes. Under full BCC the logs start with `init`
    /// recorded so that every incumbent beam stays a legal candidate.
    pub fn for_linear(eval: &'e Evaluator<'a>, init: BeamAssignment, metric: Metric, bcc: BccMode) -> Self {
        let logs = (bcc == BccMode::Full).then(|| CodebookLog::with_init(eval.codebook_size(), &init, eval.mask()));
        Self::new(eval, init, metric, bcc, logs, None)
    }

    /// State for semilinear passes. The combination set is not pruned by the
    /// initial assignment.
    pub fn for_semilinear(eval: &'e Evaluator<'a>, init: BeamAssignment, metric: Metric, bcc: BccMode) -> Self {
        let (b, k) = (eval.codebook_size(), eval.users());
        let combos = if bcc == BccMode::Full { CombinationSet::distinct(b, k) } else { CombinationSet::all(b, k) };
        Self::new(eval, init, metric, bcc, None, Some(combos))
    }

    /// State for the disjoint baseline: fresh logs, nothing recorded.
    pub fn for_disjoint(eval: &'e Evaluator<'a>, init: BeamAssignment, bcc: BccMode) -> Self {
        let logs = (bcc == BccMode::Full).then(|| CodebookLog::with_init(eval.codebook_size(), &init, eval.mask()));
        Self::new(eval, init, Metric::Dl, bcc, logs, None)
    }

    fn new(
        eval: &'e Evaluator<'a>,
        init: BeamAssignment,
        metric: Metric,
        bcc: BccMode,
        logs: Option<CodebookLog>,
        combos: Option<CombinationSet>,
    ) -> Self {
        let designs = eval.design_all(&init);
        Self {
            eval,
            metric,
            bcc,
            assignment: init,
            designs,
            logs,
            combos,
            evaluations: 0,
            fallbacks: 0,
            commits: Vec::new(),
        }
    }

    pub fn assignment(&self) -> &BeamAssignment {
        &self.assignment
    }

    pub fn designs(&self) -> &[ApDesign] {
        &self.designs
    }

    pub fn logs(&self) -> Option<&CodebookLog> {
        self.logs.as_ref()
    }

    pub fn combinations(&self) -> Option<&CombinationSet> {
        self.combos.as_ref()
    }

    pub fn bcc_mode(&self) -> BccMode {
        self.bcc
    }

    /// Candidate designs scored so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn fallbacks(&self) -> u64 {
        self.fallbacks
    }

    /// Objective after each commit, in order.
    pub fn commit_trace(&self) -> &[f64] {
        &self.commits
    }

    /// Network objective of the incumbent. APs whose design is singular
    /// count as silent.
    pub fn objective(&self) -> f64 {
        match self.metric {
            Metric::Rate => self.eval.sum_rate_silent(&self.designs),
            Metric::Dl => self.eval.dl_sum_silent(&self.designs),
        }
    }

    /// Objective with AP `ap`'s design swapped for `design`; `-inf` if that
    /// design is singular.
    fn score_with(&mut self, ap: usize, design: ApDesign) -> (f64, ApDesign) {
        if design.singular {
            return (f64::NEG_INFINITY, design);
        }
        let old = std::mem::replace(&mut self.designs[ap], design);
        let score = self.objective();
        let design = std::mem::replace(&mut self.designs[ap], old);
        (score, design)
    }

    fn design(&mut self, ap: usize, beams: &[usize]) -> ApDesign {
        let d = self.eval.design(ap, beams);
        self.evaluations += 1;
        if d.used_fallback {
            self.fallbacks += 1;
        }
        d
    }

    /// One linear segment at AP `ap`: every served user in index order picks
    /// the beam that maximizes the network objective with all other beams
    /// fixed.
    pub fn linear_pass(&mut self, ap: usize) -> Result<()> {
        let served = self.eval.served(ap).to_vec();
        for k in served {
            let candidates = match &self.logs {
                Some(log) => log.candidates(k),
                None => (0..self.eval.codebook_size()).collect(),
            };
            if candidates.is_empty() {
                return Err(Error::BccExhausted { ap, user: k });
            }
            let mut beams = self.assignment.ap_beams(ap).to_vec();
            let mut best: Option<(f64, usize, ApDesign)> = None;
            for b in candidates {
                beams[k] = b;
                let d = self.design(ap, &beams);
                let (score, d) = self.score_with(ap, d);
                if score > best.as_ref().map_or(f64::NEG_INFINITY, |x| x.0) {
                    best = Some((score, b, d));
                }
            }
            // every candidate singular: keep the incumbent
            let chosen = match best {
                Some((_, b, d)) => {
                    self.assignment.set(ap, k, b);
                    self.designs[ap] = d;
                    b
                }
                None => self.assignment.get(ap, k),
            };
            if let Some(log) = &mut self.logs {
                log.assign(k, chosen);
            }
            let obj = self.objective();
            self.commits.push(obj);
        }
        Ok(())
    }

    /// One semilinear segment at AP `ap`: scores every surviving tuple as the
    /// AP's beams and commits the best.
    pub fn semilinear_pass(&mut self, ap: usize) -> Result<()> {
        let combos = self.combos.take().expect("semilinear pass on a state without a combination set");
        if combos.is_empty() {
            self.combos = Some(combos);
            return Err(Error::BccExhausted { ap, user: 0 });
        }
        let mut best: Option<(f64, usize, ApDesign)> = None;
        for (c, tuple) in combos.tuples().iter().enumerate() {
            let d = self.design(ap, tuple);
            let (score, d) = self.score_with(ap, d);
            if score > best.as_ref().map_or(f64::NEG_INFINITY, |x| x.0) {
                best = Some((score, c, d));
            }
        }
        let mut combos = combos;
        // every tuple singular: all tie, so the lowest index wins
        let (c, d) = match best {
            Some((_, c, d)) => (c, d),
            None => (0, self.eval.design(ap, combos.get(0))),
        };
        let tuple = combos.get(c).to_vec();
        self.assignment.set_ap_beams(ap, &tuple);
        self.designs[ap] = d;
        if self.bcc == BccMode::Full {
            combos.prune(&tuple);
        }
        self.combos = Some(combos);
        let obj = self.objective();
        self.commits.push(obj);
        Ok(())
    }

    /// Assigns each served user of AP `ap` the surviving beam with the
    /// strongest bare-codeword direct link. Precoders are not designed.
    pub fn disjoint_pass(&mut self, ap: usize) -> Result<()> {
        let served = self.eval.served(ap).to_vec();
        for k in served {
            let candidates = match &self.logs {
                Some(log) => log.candidates(k),
                None => (0..self.eval.codebook_size()).collect(),
            };
            let mut best: Option<(f64, usize)> = None;
            for b in candidates {
                self.evaluations += 1;
                let p = self.eval.analog_dl_power(k, ap, b);
                if best.is_none_or(|(s, _)| p > s) {
                    best = Some((p, b));
                }
            }
            let (_, b) = best.ok_or(Error::BccExhausted { ap, user: k })?;
            self.assignment.set(ap, k, b);
            if let Some(log) = &mut self.logs {
                log.assign(k, b);
            }
        }
        Ok(())
    }

    /// Redesigns every AP for the current assignment.
    pub fn refresh_designs(&mut self) {
        self.designs = self.eval.design_all(&self.assignment);
    }
}

/// Runs one linear segment at AP `ap`.
pub fn linear_search_pass(state: &mut SearchState<'_, '_>, ap: usize) -> Result<()> {
    state.linear_pass(ap)
}

/// Runs one semilinear segment at AP `ap`.
pub fn semilinear_search_pass(state: &mut SearchState<'_, '_>, ap: usize) -> Result<()> {
    state.semilinear_pass(ap)
}
