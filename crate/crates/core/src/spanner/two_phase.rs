//! Two-phase construction for unweighted graphs.
//!
//! The first phase grows clusters for `t = ceil(sqrt k)` iterations with
//! probability `n^(-1/k)` and contracts them. The second phase runs the
//! classic construction with parameter `t' = t` on the contracted graph,
//! whose edges still name original edges, so its output maps straight back.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::engine::{phase2, whole_graph, BuildState, Level};
use super::{epoch_schedule, EpochPlan, SpannerBuild};
use crate::clustering::{compose, QuotientGraph};
use crate::error::SpannerError;
use crate::graph::WeightedGraph;

/// `ceil(sqrt k)`, the iteration count of both phases.
pub fn two_phase_iterations(k: u32) -> u32 {
    let mut t = 1u32;
    while u64::from(t) * u64::from(t) < u64::from(k) {
        t += 1;
    }
    t
}

pub fn two_phase_spanner(
    g: &WeightedGraph,
    k: u32,
    seed: u64,
) -> Result<SpannerBuild, SpannerError> {
    if k == 0 {
        return Err(SpannerError::InvalidK);
    }
    if !g.is_unit_weight() {
        return Err(SpannerError::WeightedInput);
    }
    let t = two_phase_iterations(k);
    if k == 1 {
        return Ok(whole_graph(g, k, t, seed));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = BuildState::new(g.m());
    let base = QuotientGraph::identity(g);

    let exponent = 1.0 / f64::from(k);
    let first = EpochPlan {
        epoch: 1,
        exponent,
        probability: libm::pow(g.n() as f64, -exponent).clamp(0.0, 1.0),
        iterations: t,
    };
    let mut level = Level::new(&base);
    let grown = level
        .run_epoch(&mut state, &first, true, &mut rng)?
        .composed;
    let contracted = level.graph().clone();

    let mut second = epoch_schedule(t, t, contracted.super_count())?[0];
    second.epoch = 2;
    let mut level = Level::new(&contracted);
    let end = level.run_epoch(&mut state, &second, false, &mut rng)?;
    let phase2 = phase2(&contracted, &end.composed, &mut state, 2);
    let final_clustering = compose(&end.composed, &grown, &base)?;
    Ok(state.finish(g, k, t, seed, phase2, final_clustering))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{self, WeightDist};

    #[test]
    fn iterations_are_ceil_sqrt() {
        let expect = [
            (1, 1),
            (2, 2),
            (4, 2),
            (5, 3),
            (9, 3),
            (10, 4),
            (16, 4),
            (17, 5),
        ];
        for (k, t) in expect {
            assert_eq!(two_phase_iterations(k), t);
        }
    }

    #[test]
    fn rejects_weighted_input() {
        let g = generate::gnp(20, 0.3, WeightDist::Uniform { lo: 1.0, hi: 2.0 }, 1).unwrap();
        assert_eq!(
            two_phase_spanner(&g, 4, 0),
            Err(SpannerError::WeightedInput)
        );
    }

    #[test]
    fn empty_graph_gives_empty_spanner() {
        let g = WeightedGraph::empty(6).unwrap();
        assert_eq!(two_phase_spanner(&g, 4, 0).unwrap().size(), 0);
    }

    #[test]
    fn completes_and_keeps_trees() {
        let g = generate::gnp(150, 0.05, WeightDist::Unit, 11).unwrap();
        for k in [2, 4, 9, 16] {
            let b = two_phase_spanner(&g, k, 3).unwrap();
            assert!(b.is_complete());
            b.check_consistency().unwrap();
            b.final_clustering.validate().unwrap();
        }
        let star = generate::star(7).unwrap();
        assert_eq!(two_phase_spanner(&star, 9, 1).unwrap().size(), 7);
    }
}
