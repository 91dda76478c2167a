//! Undirected correlation network and directed influence network.

use std::collections::HashSet;

use thiserror::Error;

use crate::aggregate::{PairAggregate, Verdict};
use crate::num::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("pair ({0}, {1}) appears more than once")]
    DuplicatePair(String, String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct UndirectedEdge<T> {
    pub a: String,
    pub b: String,
    /// Mean Pearson correlation.
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectedEdge<T> {
    pub source: String,
    pub target: String,
    /// `-log10(p)`
    pub weight: T,
    pub p_value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceNetwork<T> {
    /// Variable codes in order of first appearance.
    pub nodes: Vec<String>,
    pub undirected: Vec<UndirectedEdge<T>>,
    pub directed: Vec<DirectedEdge<T>>,
}

pub fn build_networks<T: Real>(
    aggregates: &[PairAggregate<T>],
) -> Result<InfluenceNetwork<T>, NetworkError> {
    let mut nodes: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    let mut undirected = Vec::with_capacity(aggregates.len());
    let mut directed = Vec::new();

    for agg in aggregates {
        let (a, b) = (&agg.pair.0, &agg.pair.1);
        let key = if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if !seen.insert(key) {
            return Err(NetworkError::DuplicatePair(a.clone(), b.clone()));
        }
        for code in [a, b] {
            if !nodes.contains(code) {
                nodes.push(code.clone());
            }
        }
        undirected.push(UndirectedEdge {
            a: a.clone(),
            b: b.clone(),
            weight: agg.e_c,
        });
        let oriented = match agg.verdict {
            Verdict::Forward => Some((a, b)),
            Verdict::Backward => Some((b, a)),
            Verdict::Undecided => None,
        };
        if let Some((source, target)) = oriented {
            directed.push(DirectedEdge {
                source: source.clone(),
                target: target.clone(),
                weight: -agg.p_value.log10(),
                p_value: agg.p_value,
            });
        }
    }
    Ok(InfluenceNetwork {
        nodes,
        undirected,
        directed,
    })
}
