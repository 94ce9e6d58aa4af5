use super::EngineState;
use crate::engine::{EngineConfig, Event, Observer, Stratification};
use crate::model::{Archive, MocoInstance, Objective, ParetoResult, SolveStats, Status};

/// Splits the distinct weights of an objective into partitions, heaviest
/// first. Returns the weight threshold of each partition: the partition
/// holds every term whose weight is at least its threshold and below the
/// previous threshold.
pub fn partition_weights(obj: &Objective, strat: &Stratification) -> Vec<u64> {
    let mut weights: Vec<u64> = obj.terms().iter().map(|t| t.0).collect();
    weights.sort_unstable_by(|a, b| b.cmp(a));
    let mut thresholds: Vec<u64> = Vec::new();
    let mut size = 0usize;
    let mut prev: Option<u64> = None;
    let mut i = 0;
    while i < weights.len() {
        let w = weights[i];
        let count = weights[i..].iter().take_while(|&&x| x == w).count();
        let split = match prev {
            None => true,
            Some(p) => p > strat.ratio.saturating_mul(w) || size >= strat.max_partition,
        };
        if split {
            thresholds.push(w);
            size = 0;
        } else {
            *thresholds.last_mut().unwrap() = w;
        }
        size += count;
        prev = Some(w);
        i += count;
    }
    thresholds
}

/// Forwards events of an intermediate round except archive changes, whose
/// vectors are measured by partial objectives.
struct PartialRound<'a>(&'a mut dyn Observer);

impl Observer for PartialRound<'_> {
    fn on_event(&mut self, event: &Event<'_>) {
        if !matches!(event, Event::ArchiveChanged { .. }) {
            self.0.on_event(event);
        }
    }
}

/// Runs the fence engine on successively fuller objectives: round `r`
/// exposes the `r + 1` heaviest partitions of every objective. Solutions of
/// a round are re-evaluated and carried into the next one.
pub fn stratified_solve(
    instance: &MocoInstance,
    cfg: &EngineConfig,
    obs: &mut dyn Observer,
) -> ParetoResult {
    let parts: Vec<Vec<u64>> = instance
        .objectives()
        .iter()
        .map(|o| partition_weights(o, &cfg.stratification))
        .collect();
    let rounds = parts.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let mut carried = Archive::new();
    let mut stats = SolveStats::default();
    for round in 0..rounds {
        let objectives: Vec<Objective> = instance
            .objectives()
            .iter()
            .zip(&parts)
            .map(|(o, p)| {
                let threshold = match p.get(round) {
                    Some(&t) => t,
                    None => 0,
                };
                let terms = o.terms().iter().copied().filter(|t| t.0 >= threshold).collect();
                Objective::from_normalized(terms, o.offset())
            })
            .collect();
        let sub = instance.with_objectives(objectives);
        let mut state = EngineState::new(&sub, cfg);
        if !cfg.anytime_strict {
            for e in carried.entries() {
                state.seed(e.assignment.clone());
            }
        }
        let last = round + 1 == rounds;
        let status = if last {
            state.run(&cfg.limits, obs)
        } else {
            state.run(&cfg.limits, &mut PartialRound(obs))
        };
        stats.absorb(state.stats());
        stats.iterations += state.stats().iterations;
        if last && status == Status::Complete {
            return ParetoResult::from_archive(state.archive(), status, stats);
        }
        // re-evaluate under the full objectives
        carried = Archive::new();
        for e in state.into_archive().drain() {
            let y = instance.evaluate(&e.assignment);
            carried.insert(e.assignment, y);
        }
        obs.on_event(&Event::RoundDone {
            round,
            archive: &carried,
        });
        obs.on_event(&Event::ArchiveChanged { archive: &carried });
        if status != Status::Complete {
            return ParetoResult::from_archive(&carried, status, stats);
        }
    }
    unreachable!("the last round returns")
}
