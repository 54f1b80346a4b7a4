//! Deterministic graph generators and the textual generator spec.
//!
//! Spec grammar (colon separated):
//!
//! ```text
//! gnp:<n>:<p>:unit
//! gnp:<n>:<p>:uniform(<lo>,<hi>)
//! grid:<w>:<h>
//! path:<n>
//! cycle:<n>
//! complete:<n>
//! star:<leaves>
//! ```
//!
//! Everything except `gnp` produces unit weights.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::WeightedGraph;

/// Salt mixed into generator seeds so graph and algorithm streams differ
/// even when callers reuse one seed for both.
const GENERATOR_SALT: u64 = 0x6e1f_4a9d_3c2b_8e57;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightDist {
    Unit,
    Uniform { lo: f64, hi: f64 },
}

impl WeightDist {
    fn check(&self) -> Result<(), GraphError> {
        match *self {
            WeightDist::Unit => Ok(()),
            WeightDist::Uniform { lo, hi } => {
                if lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi {
                    Ok(())
                } else {
                    Err(GraphError::InvalidWeightRange { lo, hi })
                }
            }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightDist::Unit => 1.0,
            WeightDist::Uniform { lo, hi } => rng.gen_range(lo..hi),
        }
    }
}

impl fmt::Display for WeightDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDist::Unit => f.write_str("unit"),
            WeightDist::Uniform { lo, hi } => write!(f, "uniform({lo},{hi})"),
        }
    }
}

/// Erdős–Rényi graph: each of the `n(n-1)/2` pairs is present independently
/// with probability `p`. A pure function of its arguments.
pub fn gnp(n: usize, p: f64, dist: WeightDist, seed: u64) -> Result<WeightedGraph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    dist.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ GENERATOR_SALT);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                let w = dist.draw(&mut rng);
                edges.push((u, v, w));
            }
        }
    }
    WeightedGraph::from_edges(n, edges)
}

pub fn path(n: usize) -> Result<WeightedGraph, GraphError> {
    WeightedGraph::from_edges(n, (1..n).map(|v| (v - 1, v, 1.0)))
}

pub fn cycle(n: usize) -> Result<WeightedGraph, GraphError> {
    let wrap = (n >= 3).then_some((n - 1, 0, 1.0));
    WeightedGraph::from_edges(n, (1..n).map(|v| (v - 1, v, 1.0)).chain(wrap))
}

pub fn complete(n: usize) -> Result<WeightedGraph, GraphError> {
    let edges = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v, 1.0)));
    WeightedGraph::from_edges(n, edges)
}

/// `K_{1,leaves}` with the center at vertex 0.
pub fn star(leaves: usize) -> Result<WeightedGraph, GraphError> {
    WeightedGraph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v, 1.0)))
}

/// `width × height` grid, vertex `(x, y)` at index `y * width + x`.
pub fn grid(width: usize, height: usize) -> Result<WeightedGraph, GraphError> {
    let mut edges = Vec::new();
    for y in 0..height {
        for x in 0..width {
            let v = y * width + x;
            if x + 1 < width {
                edges.push((v, v + 1, 1.0));
            }
            if y + 1 < height {
                edges.push((v, v + width, 1.0));
            }
        }
    }
    WeightedGraph::from_edges(width * height, edges)
}

/// Parsed generator description; see the module docs for the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphSpec {
    Gnp {
        n: usize,
        p: f64,
        weights: WeightDist,
    },
    Grid {
        width: usize,
        height: usize,
    },
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Star {
        leaves: usize,
    },
}

impl GraphSpec {
    /// Instantiates the spec. Only `gnp` consumes the seed.
    pub fn generate(&self, seed: u64) -> Result<WeightedGraph, GraphError> {
        match *self {
            GraphSpec::Gnp { n, p, weights } => gnp(n, p, weights, seed),
            GraphSpec::Grid { width, height } => grid(width, height),
            GraphSpec::Path { n } => path(n),
            GraphSpec::Cycle { n } => cycle(n),
            GraphSpec::Complete { n } => complete(n),
            GraphSpec::Star { leaves } => star(leaves),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            GraphSpec::Gnp { n, .. }
            | GraphSpec::Path { n }
            | GraphSpec::Cycle { n }
            | GraphSpec::Complete { n } => n,
            GraphSpec::Grid { width, height } => width * height,
            GraphSpec::Star { leaves } => leaves + 1,
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Gnp { n, p, weights } => write!(f, "gnp:{n}:{p}:{weights}"),
            GraphSpec::Grid { width, height } => write!(f, "grid:{width}:{height}"),
            GraphSpec::Path { n } => write!(f, "path:{n}"),
            GraphSpec::Cycle { n } => write!(f, "cycle:{n}"),
            GraphSpec::Complete { n } => write!(f, "complete:{n}"),
            GraphSpec::Star { leaves } => write!(f, "star:{leaves}"),
        }
    }
}

fn spec_err(s: &str, why: &str) -> GraphError {
    GraphError::InvalidSpec(format!("{s:?}: {why}"))
}

fn parse_count(field: &str, whole: &str) -> Result<usize, GraphError> {
    let n: usize = field
        .trim()
        .parse()
        .map_err(|_| spec_err(whole, "expected a non-negative integer"))?;
    if n == 0 {
        return Err(spec_err(whole, "vertex count must be positive"));
    }
    Ok(n)
}

fn parse_weights(field: &str, whole: &str) -> Result<WeightDist, GraphError> {
    let field = field.trim();
    if field == "unit" {
        return Ok(WeightDist::Unit);
    }
    let inner = field
        .strip_prefix("uniform(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| spec_err(whole, "weights must be `unit` or `uniform(lo,hi)`"))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| spec_err(whole, "uniform needs two bounds"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| spec_err(whole, "bad lower bound"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| spec_err(whole, "bad upper bound"))?;
    let dist = WeightDist::Uniform { lo, hi };
    dist.check()?;
    Ok(dist)
}

impl FromStr for GraphSpec {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let spec = match parts.as_slice() {
            ["gnp", n, p, w] => {
                let n = parse_count(n, s)?;
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| spec_err(s, "bad probability"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(GraphError::InvalidProbability(p));
                }
                GraphSpec::Gnp {
                    n,
                    p,
                    weights: parse_weights(w, s)?,
                }
            }
            ["grid", w, h] => GraphSpec::Grid {
                width: parse_count(w, s)?,
                height: parse_count(h, s)?,
            },
            ["path", n] => GraphSpec::Path {
                n: parse_count(n, s)?,
            },
            ["cycle", n] => GraphSpec::Cycle {
                n: parse_count(n, s)?,
            },
            ["complete", n] => GraphSpec::Complete {
                n: parse_count(n, s)?,
            },
            ["star", l] => GraphSpec::Star {
                leaves: l
                    .trim()
                    .parse()
                    .map_err(|_| spec_err(s, "bad leaf count"))?,
            },
            _ => return Err(GraphError::InvalidSpec(s.to_string())),
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp(10, 0.0, WeightDist::Unit, 3).unwrap().m(), 0);
        assert_eq!(gnp(5, 1.0, WeightDist::Unit, 3).unwrap().m(), 10);
    }

    #[test]
    fn gnp_is_deterministic() {
        let a = gnp(100, 0.1, WeightDist::Unit, 42).unwrap();
        let b = gnp(100, 0.1, WeightDist::Unit, 42).unwrap();
        assert_eq!(a, b);
        let c = gnp(100, 0.1, WeightDist::Unit, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gnp_rejects_bad_probability() {
        assert!(matches!(
            gnp(4, 1.5, WeightDist::Unit, 0),
            Err(GraphError::InvalidProbability(_))
        ));
        assert!(gnp(4, -0.1, WeightDist::Unit, 0).is_err());
    }

    #[test]
    fn uniform_weights_in_range() {
        let g = gnp(40, 0.3, WeightDist::Uniform { lo: 1.0, hi: 10.0 }, 7).unwrap();
        assert!(g.edges().iter().all(|e| (1.0..10.0).contains(&e.w)));
        g.validate().unwrap();
    }

    #[test]
    fn families_have_expected_sizes() {
        assert_eq!(path(10).unwrap().m(), 9);
        assert_eq!(cycle(5).unwrap().m(), 5);
        assert_eq!(cycle(2).unwrap().m(), 1);
        assert_eq!(complete(4).unwrap().m(), 6);
        assert_eq!(star(7).unwrap().m(), 7);
        assert_eq!(grid(3, 4).unwrap().m(), 3 * 3 + 2 * 4);
    }

    #[test]
    fn parses_specs() {
        let s: GraphSpec = "gnp:100:0.1:unit".parse().unwrap();
        assert_eq!(
            s,
            GraphSpec::Gnp {
                n: 100,
                p: 0.1,
                weights: WeightDist::Unit
            }
        );
        let s: GraphSpec = "gnp:20:0.3:uniform(1,10)".parse().unwrap();
        assert_eq!(
            s,
            GraphSpec::Gnp {
                n: 20,
                p: 0.3,
                weights: WeightDist::Uniform { lo: 1.0, hi: 10.0 }
            }
        );
        assert_eq!("grid:3:4".parse::<GraphSpec>().unwrap().vertex_count(), 12);
        assert_eq!(
            "path:9".parse::<GraphSpec>().unwrap(),
            GraphSpec::Path { n: 9 }
        );
        for bad in [
            "gnp:10:2:unit",
            "gnp:x:0.1:unit",
            "blob:3",
            "gnp:5:0.1:uniform(3,1)",
            "",
        ] {
            assert!(bad.parse::<GraphSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spec_display_round_trips() {
        for s in [
            "gnp:100:0.1:unit",
            "gnp:20:0.3:uniform(1,10)",
            "grid:3:4",
            "star:7",
        ] {
            let spec: GraphSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<GraphSpec>().unwrap(), spec);
        }
    }
}
